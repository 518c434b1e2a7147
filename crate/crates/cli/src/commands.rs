//! Subcommand implementations. Each returns a [`Report`]: a status, an exit code and a JSON body.

use omega_core::algebra::{AlgebraError, DistributivityWitness, Element, OperationFamily};
use omega_core::convexity::{convex_hull, extreme_hull, is_extreme_set, omega_boundary, omega_interior, Subset};
use omega_core::functions::{
    check_nondecreasing, check_order_automorphism, is_affine_map, is_concave_map, is_convex_map, FiniteRange,
    FunctionError, FunctionTable, LinearRange, MapWitness, OrderedRange, RangeDistributivityWitness,
    SectionDefect, SectionWitness,
};
use omega_core::order::{
    controllability_functional, dual_cone, is_salient_cone, is_sharp_with, DualCone, OrderError, RationalCone, Salience,
    Sharpness,
};
use omega_core::lp::Solver;
use omega_core::rational::QVec;
use omega_core::support::{
    delta_support, mt2_compile, ri_certificate, subadditive_support, sublinear_support, support_at_point,
    support_extend, CertificateChecks, SupportBackend, SupportError, SupportInstance, SupportOptions,
};
use omega_core::Limits;
use serde_json::{json, Map, Value};

use crate::schema::{cone_json, finite_value, matrix_json, norm_name, qvec_json, rational_json, SchemaError, SCHEMA_VERSION};
use crate::{Command, ConeAction, InstanceDocument, EXIT_FALSE, EXIT_INVALID, EXIT_OK, EXIT_RESOURCE};

pub struct Report {
    code: i32,
    status: &'static str,
    body: Map<String, Value>,
}

impl Report {
    fn new(code: i32, status: &'static str) -> Self {
        Report { code, status, body: Map::new() }
    }

    fn ok() -> Self {
        Report::new(EXIT_OK, "ok")
    }

    /// `ok` when `holds`, otherwise a false predicate.
    fn verdict(holds: bool) -> Self {
        if holds {
            Report::ok()
        } else {
            Report::new(EXIT_FALSE, "fail")
        }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body.insert(key.to_string(), value);
        self
    }

    pub fn schema_errors(errors: Vec<SchemaError>) -> Self {
        let errors = serde_json::to_value(errors).expect("plain records serialize");
        Report::new(EXIT_INVALID, "schema_error").with("errors", errors)
    }

    fn invalid(path: &str, message: impl Into<String>) -> Self {
        Report::schema_errors(vec![SchemaError { path: path.to_string(), message: message.into() }])
    }

    pub fn finish(mut self, command: &str) -> (i32, Value) {
        self.body.insert("schema_version".into(), json!(SCHEMA_VERSION));
        self.body.insert("command".into(), json!(command));
        self.body.insert("status".into(), json!(self.status));
        (self.code, Value::Object(self.body))
    }
}

impl From<SupportError> for Report {
    fn from(e: SupportError) -> Self {
        let message = e.to_string();
        let report = match &e {
            SupportError::ResourceLimit(_) => Report::new(EXIT_RESOURCE, "resource_limit"),
            SupportError::Infeasible { active } => {
                Report::new(EXIT_FALSE, "infeasible").with("active_constraints", json!(active))
            }
            SupportError::TheoremViolation { active } => {
                Report::new(EXIT_FALSE, "error").with("active_constraints", json!(active))
            }
            SupportError::Internal(_) => Report::new(EXIT_FALSE, "error"),
            SupportError::HypothesisFailure { name, detail } => Report::new(EXIT_FALSE, "fail")
                .with("witness", json!({ "hypothesis": name.as_str(), "detail": detail })),
            SupportError::NotInterior(p) => {
                Report::new(EXIT_FALSE, "fail").with("witness", json!({ "not_interior": p }))
            }
            SupportError::NotReflexive { side, op } => {
                Report::new(EXIT_FALSE, "fail").with("witness", json!({ "not_reflexive": { "side": side, "op": op } }))
            }
            SupportError::NotSubadditive(x, y) => {
                Report::new(EXIT_FALSE, "fail").with("witness", json!({ "not_subadditive": [x, y] }))
            }
            SupportError::NotSublinear { x, y, t, s } => Report::new(EXIT_FALSE, "fail")
                .with("witness", json!({ "not_sublinear": { "x": x, "y": y, "t": t, "s": s } })),
            SupportError::ConditionFailure { condition, detail } => Report::new(EXIT_FALSE, "fail")
                .with("witness", json!({ "condition": condition, "detail": detail })),
            SupportError::NotSharp => Report::new(EXIT_FALSE, "fail").with("witness", json!({ "not_sharp": true })),
            SupportError::NotDeltaConvex(i, j) => {
                Report::new(EXIT_FALSE, "fail").with("witness", json!({ "not_delta_convex": [i, j] }))
            }
            SupportError::NotRelativeInterior { n_max } => {
                Report::new(EXIT_FALSE, "fail").with("witness", json!({ "not_relative_interior": { "n_max": n_max } }))
            }
            SupportError::UnsupportedNorm(_)
            | SupportError::InvalidInput(_)
            | SupportError::Function(_)
            | SupportError::Order(_)
            | SupportError::Algebra(_) => Report::new(EXIT_INVALID, "invalid_input"),
        };
        report.with("message", json!(message))
    }
}

impl From<AlgebraError> for Report {
    fn from(e: AlgebraError) -> Self {
        SupportError::from(e).into()
    }
}

impl From<OrderError> for Report {
    fn from(e: OrderError) -> Self {
        SupportError::from(e).into()
    }
}

impl From<FunctionError> for Report {
    fn from(e: FunctionError) -> Self {
        SupportError::from(e).into()
    }
}

pub fn dispatch(command: &Command, doc: &InstanceDocument, limits: &Limits) -> Report {
    let result = match command {
        Command::Check { .. } => check(doc, limits),
        Command::Hull { set, .. } => hull(doc, set, false),
        Command::ExtremeHull { set, .. } => hull(doc, set, true),
        Command::Interior { .. } => {
            Ok(Report::ok().with("interior", json!(omega_interior(&doc.structure).to_vec())))
        }
        Command::Boundary { .. } => {
            let boundary = omega_boundary(&doc.structure);
            let extreme = is_extreme_set(&doc.structure, &boundary).is_none();
            Ok(Report::ok().with("boundary", json!(boundary.to_vec())).with("extreme", json!(extreme)))
        }
        Command::ClassifyMap { function, .. } => classify(doc, function.as_deref()),
        Command::Support { override_preconditions, .. } => support(doc, None, *override_preconditions, limits),
        Command::SupportAt { point, override_preconditions, .. } => {
            support(doc, Some(*point), *override_preconditions, limits)
        }
        Command::Subadditive { .. } => subadditive(doc, limits),
        Command::Sublinear { .. } => sublinear(doc, limits),
        Command::Mt2 { .. } => mt2(doc, limits),
        Command::RiCert { .. } => ri(doc, limits),
        Command::DeltaSupport { norm, .. } => delta(doc, norm.map(Into::into), limits),
        Command::Cone { action, cone, norm, .. } => cone_command(doc, *action, cone.as_deref(), (*norm).into(), limits),
    };
    result.unwrap_or_else(|r| r)
}

type Outcome = Result<Report, Report>;

/// Range flavors as seen from the document.
trait DocRange: SupportBackend {
    fn table(&self, values: &[QVec], path: &str) -> Result<FunctionTable<Self::Value>, Report>;
    fn value_json(v: &Self::Value) -> Value;
}

impl DocRange for FiniteRange {
    fn table(&self, values: &[QVec], path: &str) -> Result<FunctionTable<Element>, Report> {
        let size = self.poset().size();
        values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                finite_value(v, size).ok_or_else(|| {
                    Report::invalid(&format!("{path}[{i}]"), format!("expected an element index below {size}"))
                })
            })
            .collect::<Result<_, _>>()
            .map(FunctionTable::new)
    }

    fn value_json(v: &Element) -> Value {
        json!(v)
    }
}

impl DocRange for LinearRange {
    fn table(&self, values: &[QVec], path: &str) -> Result<FunctionTable<QVec>, Report> {
        if let Some(i) = values.iter().position(|v| v.len() != self.dim()) {
            return Err(Report::invalid(&format!("{path}[{i}]"), format!("expected a vector of length {}", self.dim())));
        }
        Ok(FunctionTable::new(values.to_vec()))
    }

    fn value_json(v: &QVec) -> Value {
        qvec_json(v)
    }
}

fn table_json<R: DocRange>(g: &FunctionTable<R::Value>) -> Value {
    Value::Array(g.values().iter().map(R::value_json).collect())
}

fn pass(holds: bool) -> Value {
    json!(if holds { "pass" } else { "fail" })
}

fn distributivity_json(w: &DistributivityWitness) -> Value {
    json!({
        "outer": w.outer,
        "inner": w.inner,
        "slot": w.slot,
        "fixed": w.fixed,
        "inner_args": w.inner_args,
        "lhs": w.lhs,
        "rhs": w.rhs,
    })
}

fn range_distributivity_json(w: &RangeDistributivityWitness) -> Value {
    match w {
        RangeDistributivityWitness::Finite(w) => distributivity_json(w),
        RangeDistributivityWitness::Linear { outer, inner, slot, term } => {
            json!({ "outer": outer, "inner": inner, "slot": slot, "term": term })
        }
    }
}

fn section_json<R: DocRange>(w: &SectionWitness<R::Value>) -> Value {
    let defect = match w.defect {
        SectionDefect::NotMonotone => "not_monotone",
        SectionDefect::NotInjective => "not_injective",
        SectionDefect::InverseNotMonotone => "inverse_not_monotone",
        SectionDefect::Singular => "singular",
        SectionDefect::ConeNotPreserved => "cone_not_preserved",
    };
    json!({
        "op": w.op,
        "slot": w.slot,
        "defect": defect,
        "fixed": w.fixed.iter().map(R::value_json).collect::<Vec<_>>(),
        "points": w.points.iter().map(R::value_json).collect::<Vec<_>>(),
    })
}

fn map_witness_json(w: &MapWitness) -> Value {
    json!({ "op": w.op, "args": w.args })
}

/// Collects `name → pass|fail` plus the witnesses of failures.
#[derive(Default)]
struct Table {
    verdicts: Map<String, Value>,
    witnesses: Map<String, Value>,
}

impl Table {
    fn record(&mut self, name: &str, witness: Option<Value>) {
        self.verdicts.insert(name.into(), pass(witness.is_none()));
        if let Some(w) = witness {
            self.witnesses.insert(name.into(), w);
        }
    }

    fn all_pass(&self) -> bool {
        self.witnesses.is_empty()
    }
}

fn check(doc: &InstanceDocument, limits: &Limits) -> Outcome {
    let mut t = Table::default();
    let omega = &doc.structure;
    t.record(
        "reflexive",
        omega.check_reflexive().map(|w| json!({ "op": w.op, "element": w.element })),
    );
    t.record("mutually_distributive", omega.check_mutually_distributive(limits)?.as_ref().map(distributivity_json));
    match &doc.range {
        Some(OrderedRange::Finite(r)) => check_range(r, doc, limits, &mut t)?,
        Some(OrderedRange::Linear(r)) => check_range(r, doc, limits, &mut t)?,
        None => {}
    }
    let mut report = Report::verdict(t.all_pass());
    for (k, v) in t.verdicts {
        report = report.with(&k, v);
    }
    if !t.witnesses.is_empty() {
        report = report.with("witnesses", Value::Object(t.witnesses));
    }
    Ok(report)
}

fn check_range<R: DocRange + Clone>(range: &R, doc: &InstanceDocument, limits: &Limits, t: &mut Table) -> Result<(), Report> {
    t.record("range_reflexive", range.check_reflexive().map(|op| json!({ "op": op })));
    t.record(
        "range_mutually_distributive",
        range.check_mutually_distributive(limits)?.as_ref().map(range_distributivity_json),
    );
    t.record(
        "range_lower_chain_complete",
        (!range.is_lower_chain_complete()?).then(|| json!({ "detail": "order cone is not sharp" })),
    );
    let mut automorphism = None;
    let mut monotone = None;
    for name in range.op_names() {
        let arity = range.op_arity(range.position(&name).expect("listed"));
        if monotone.is_none() {
            monotone = check_nondecreasing(range, &name)?;
        }
        for slot in 1..=arity {
            if automorphism.is_none() {
                automorphism = check_order_automorphism(range, &name, slot)?;
            }
        }
    }
    t.record("range_nondecreasing", monotone.as_ref().map(section_json::<R>));
    t.record("range_order_automorphism", automorphism.as_ref().map(section_json::<R>));
    if let Some(spec) = &doc.support {
        if let Some(anchor) = &spec.anchor {
            let f = range.table(&spec.f, "support.f")?;
            let inst = SupportInstance::new(
                doc.structure.clone(),
                range.clone(),
                f,
                Subset::from_elements(doc.structure.size(), anchor.iter().copied()),
            );
            let mut hyps = Map::new();
            for r in inst.hypotheses(limits)? {
                let mut entry = Map::new();
                entry.insert("status".into(), pass(r.holds));
                if let Some(d) = r.detail {
                    entry.insert("detail".into(), json!(d));
                }
                hyps.insert(r.hypothesis.as_str().into(), Value::Object(entry));
            }
            let all = hyps.values().all(|v| v["status"] == "pass");
            t.verdicts.insert("support_hypotheses".into(), pass(all));
            if !all {
                t.witnesses.insert("support_hypotheses".into(), Value::Object(hyps.clone()));
            }
            t.verdicts.insert("hypotheses".into(), Value::Object(hyps));
        }
    }
    Ok(())
}

fn named_set(doc: &InstanceDocument, name: &str) -> Result<Subset, Report> {
    match doc.sets.get(name) {
        Some(s) => Ok(Subset::from_elements(doc.structure.size(), s.iter().copied())),
        None => Err(Report::invalid(&format!("sets.{name}"), "no such set")),
    }
}

fn hull(doc: &InstanceDocument, set: &str, extreme: bool) -> Outcome {
    let h = named_set(doc, set)?;
    let out = if extreme { extreme_hull(&doc.structure, &h) } else { convex_hull(&doc.structure, &h) };
    Ok(Report::ok().with("set", json!(set)).with("input", json!(h.to_vec())).with("hull", json!(out.to_vec())))
}

fn function_values<'a>(doc: &'a InstanceDocument, name: Option<&str>) -> Result<(String, &'a [QVec]), Report> {
    match name {
        Some(n) => doc
            .functions
            .get(n)
            .map(|f| (n.to_string(), f.as_slice()))
            .ok_or_else(|| Report::invalid(&format!("functions.{n}"), "no such function")),
        None => {
            if let Some(s) = &doc.support {
                return Ok(("support.f".into(), &s.f));
            }
            match doc.functions.iter().collect::<Vec<_>>().as_slice() {
                [(n, f)] => Ok(((*n).clone(), f.as_slice())),
                _ => Err(Report::invalid("functions", "name the function with --function")),
            }
        }
    }
}

fn require_range(doc: &InstanceDocument) -> Result<&OrderedRange, Report> {
    doc.range.as_ref().ok_or_else(|| Report::invalid("range", "this command needs a range"))
}

fn classify(doc: &InstanceDocument, name: Option<&str>) -> Outcome {
    let (label, values) = function_values(doc, name)?;
    let path = if label.contains('.') { label.clone() } else { format!("functions.{label}") };
    match require_range(doc)? {
        OrderedRange::Finite(r) => classify_in(r, &doc.structure, values, &label, &path),
        OrderedRange::Linear(r) => classify_in(r, &doc.structure, values, &label, &path),
    }
}

fn classify_in<R: DocRange>(range: &R, omega: &OperationFamily, values: &[QVec], label: &str, path: &str) -> Outcome {
    let f = range.table(values, path)?;
    let verdict = |w: Option<MapWitness>| match w {
        None => json!({ "holds": true }),
        Some(w) => json!({ "holds": false, "witness": map_witness_json(&w) }),
    };
    Ok(Report::ok()
        .with("function", json!(label))
        .with("convex", verdict(is_convex_map(&f, omega, range)?))
        .with("concave", verdict(is_concave_map(&f, omega, range)?))
        .with("affine", verdict(is_affine_map(&f, omega, range)?)))
}

fn checks_json(c: &CertificateChecks) -> Value {
    json!({ "affine": c.affine, "dominated": c.dominated, "agrees_on_anchor": c.agrees_on_anchor })
}

/// `point` is `None` for `support`, `Some(flag)` for `support-at`.
fn support(doc: &InstanceDocument, point: Option<Option<usize>>, override_preconditions: bool, limits: &Limits) -> Outcome {
    let spec = doc.support.as_ref().ok_or_else(|| Report::invalid("support", "this command needs a support block"))?;
    let options = SupportOptions { limits: *limits, override_preconditions };
    match require_range(doc)? {
        OrderedRange::Finite(r) => support_in(r, doc, spec, point, &options),
        OrderedRange::Linear(r) => support_in(r, doc, spec, point, &options),
    }
}

fn support_in<R: DocRange + Clone>(
    range: &R,
    doc: &InstanceDocument,
    spec: &crate::schema::SupportSpec,
    point: Option<Option<usize>>,
    options: &SupportOptions,
) -> Outcome {
    let f = range.table(&spec.f, "support.f")?;
    let n = doc.structure.size();
    let (cert, anchor) = match point {
        None => {
            let anchor = spec.anchor.clone().ok_or_else(|| Report::invalid("support.D", "missing anchor set"))?;
            let inst = SupportInstance::new(
                doc.structure.clone(),
                range.clone(),
                f,
                Subset::from_elements(n, anchor.iter().copied()),
            );
            (support_extend(&inst, options)?, anchor)
        }
        Some(flag) => {
            let p = flag.or(spec.p).ok_or_else(|| Report::invalid("support.p", "give --point or support.p"))?;
            if p >= n {
                return Err(Report::invalid("--point", format!("index {p} is outside 0..{n}")));
            }
            (support_at_point(doc.structure.clone(), range.clone(), f, p, options)?, vec![p])
        }
    };
    Ok(Report::ok()
        .with("anchor", json!(anchor))
        .with("certificate", json!({ "g": table_json::<R>(&cert.g), "checks": checks_json(&cert.checks) })))
}

fn subadditive(doc: &InstanceDocument, limits: &Limits) -> Outcome {
    let spec = doc.subadditive.as_ref().ok_or_else(|| Report::invalid("subadditive", "missing subadditive block"))?;
    let op = doc.structure.op(&spec.operation)?;
    let cert = subadditive_support(op, &spec.f, spec.p, limits)?;
    let g: Vec<Value> = cert.g.values().iter().map(|v| rational_json(&v[0])).collect();
    Ok(Report::ok().with("certificate", json!({ "g": g, "checks": checks_json(&cert.checks) })))
}

fn sublinear(doc: &InstanceDocument, limits: &Limits) -> Outcome {
    let spec = doc.sublinear.as_ref().ok_or_else(|| Report::invalid("sublinear", "missing sublinear block"))?;
    let cert = sublinear_support(&spec.sample, &spec.f, &spec.cone, spec.p, &spec.multipliers, limits)?;
    Ok(Report::ok().with(
        "certificate",
        json!({
            "matrix": matrix_json(&cert.matrix),
            "values": cert.values.iter().map(|v| qvec_json(v)).collect::<Vec<_>>(),
            "checks": { "dominated": cert.checks.dominated, "agrees_at_p": cert.checks.agrees_at_p },
        }),
    ))
}

fn ri_json(c: &omega_core::support::RiCertificate) -> Value {
    json!({
        "n": c.n,
        "chain": c.chain.iter().map(|v| qvec_json(v)).collect::<Vec<_>>(),
        "checks": {
            "memberships": c.checks.memberships,
            "construction": c.checks.construction,
            "identities": c.checks.identities,
            "commute": c.checks.commute,
        },
    })
}

fn ri(doc: &InstanceDocument, limits: &Limits) -> Outcome {
    let inst = doc.ri.as_ref().ok_or_else(|| Report::invalid("ri", "missing ri block"))?;
    let cert = ri_certificate(inst, limits)?;
    Ok(Report::verdict(cert.checks.passed()).with("certificate", ri_json(&cert)))
}

fn mt2(doc: &InstanceDocument, limits: &Limits) -> Outcome {
    let spec = doc.mt2.as_ref().ok_or_else(|| Report::invalid("mt2", "missing mt2 block"))?;
    let inst = mt2_compile(
        &spec.a_maps,
        &spec.range_maps,
        &spec.cone,
        &spec.polytope,
        &spec.grid,
        spec.p.clone(),
        spec.n_max,
        limits,
    )?;
    let interior: Vec<Value> = inst
        .interior
        .iter()
        .zip(&inst.vertices)
        .map(|(c, v)| json!({ "vertex": qvec_json(v), "n": c.n, "chain_length": c.chain.len(), "passed": c.checks.passed() }))
        .collect();
    let interior_ok = inst.interior.iter().all(|c| c.checks.passed());
    let mut report = Report::verdict(interior_ok)
        .with("vertices", Value::Array(inst.vertices.iter().map(|v| qvec_json(v)).collect()))
        .with("p", qvec_json(&inst.p))
        .with("grid_closed", json!(inst.grid_closed))
        .with("interior", Value::Array(interior));
    if let Some((f, anchor)) = &spec.support {
        if !inst.grid_closed {
            return Ok(Report::new(EXIT_FALSE, "fail")
                .with("grid_closed", json!(false))
                .with("witness", json!({ "detail": "support needs a grid closed under the combination" })));
        }
        let sub = inst.support_instance(f.clone(), Subset::from_elements(inst.grid.len(), anchor.iter().copied()), limits)?;
        let cert = support_extend(&sub, &SupportOptions { limits: *limits, override_preconditions: false })?;
        report = report.with(
            "certificate",
            json!({ "g": table_json::<LinearRange>(&cert.g), "checks": checks_json(&cert.checks) }),
        );
    }
    Ok(report)
}

fn delta(doc: &InstanceDocument, norm: Option<omega_core::Norm>, limits: &Limits) -> Outcome {
    let mut inst = doc.delta.clone().ok_or_else(|| Report::invalid("delta", "missing delta block"))?;
    if let Some(n) = norm {
        inst.norm = n;
    }
    let cert = delta_support(&inst, limits)?;
    Ok(Report::ok().with("norm", json!(norm_name(inst.norm))).with(
        "certificate",
        json!({
            "A": cert.big_a.iter().map(|v| qvec_json(v)).collect::<Vec<_>>(),
            "a": cert.a.iter().map(rational_json).collect::<Vec<_>>(),
            "checks": { "affine": cert.checks.affine, "dominated": cert.checks.dominated, "anchored": cert.checks.anchored },
        }),
    ))
}

fn pick_cone<'a>(doc: &'a InstanceDocument, name: Option<&str>) -> Result<(String, &'a RationalCone), Report> {
    match name {
        Some(n) => doc
            .cones
            .get(n)
            .map(|c| (n.to_string(), c))
            .ok_or_else(|| Report::invalid(&format!("cones.{n}"), "no such cone")),
        None => match doc.cones.iter().collect::<Vec<_>>().as_slice() {
            [(n, c)] => Ok(((*n).clone(), *c)),
            _ => Err(Report::invalid("cones", "name the cone with --cone")),
        },
    }
}

fn cone_command(
    doc: &InstanceDocument,
    action: ConeAction,
    name: Option<&str>,
    norm: omega_core::Norm,
    limits: &Limits,
) -> Outcome {
    let (label, cone) = pick_cone(doc, name)?;
    let base = |r: Report| r.with("cone", json!(label)).with("definition", cone_json(cone));
    Ok(match action {
        ConeAction::Dual => {
            let dual = match dual_cone(cone) {
                DualCone::Halfspaces { dim, rows } => json!({
                    "kind": "halfspaces",
                    "dim": dim,
                    "rows": rows.iter().map(|r| qvec_json(r)).collect::<Vec<_>>(),
                }),
                DualCone::Lorenz { epsilon, dim, primal_norm } => json!({
                    "kind": "lorenz",
                    "dim": dim,
                    "epsilon": rational_json(&epsilon),
                    "dual_norm": norm_name(primal_norm.dual()),
                }),
            };
            base(Report::ok()).with("dual", dual)
        }
        ConeAction::Sharp => match is_sharp_with(cone, &Solver::new(limits.max_pivots))? {
            Sharpness::Sharp { phi } => base(Report::ok()).with("sharp", json!(true)).with("phi", qvec_json(&phi)),
            Sharpness::NotSharp { weights } => base(Report::new(EXIT_FALSE, "fail"))
                .with("sharp", json!(false))
                .with("witness", json!({ "weights": qvec_json(&weights) })),
        },
        ConeAction::Salient => match is_salient_cone(cone)? {
            Salience::Salient => base(Report::ok()).with("salient", json!(true)),
            Salience::Line { y } => base(Report::new(EXIT_FALSE, "fail"))
                .with("salient", json!(false))
                .with("witness", json!({ "line": qvec_json(&y) })),
        },
        ConeAction::Control => match controllability_functional(cone, norm) {
            Ok(c) => base(Report::ok()).with(
                "certificate",
                json!({ "phi": qvec_json(&c.phi), "scale": rational_json(&c.scale), "norm": norm_name(c.norm) }),
            ),
            Err(OrderError::NotSharp) => {
                base(Report::new(EXIT_FALSE, "fail")).with("witness", json!({ "not_sharp": true }))
            }
            Err(e) => return Err(e.into()),
        },
    })
}
