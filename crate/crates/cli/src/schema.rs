//! The instance document: parsing with JSON-path diagnostics, and canonical serialization.

use std::collections::BTreeMap;
use std::fmt;

use omega_core::algebra::{Carrier, Element, Operation, OperationFamily};
use omega_core::functions::{FiniteRange, LinearRange, OrderedRange};
use omega_core::order::{FinitePoset, Norm, RationalCone};
use omega_core::rational::{format_rational, parse_rational, QMatrix, QVec, Rational};
use omega_core::support::{default_multipliers, DeltaInstance, Polytope, RiInstance, DEFAULT_N_MAX};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: &str = "1";

/// Tables larger than this are rejected before allocation.
const MAX_TABLE_CELLS: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSpec {
    pub f: Vec<QVec>,
    pub anchor: Option<Vec<Element>>,
    pub p: Option<Element>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubadditiveSpec {
    pub operation: String,
    pub f: Vec<Rational>,
    pub p: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SublinearSpec {
    pub sample: Vec<QVec>,
    pub f: Vec<QVec>,
    pub cone: RationalCone,
    pub p: usize,
    pub multipliers: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mt2Spec {
    pub a_maps: Vec<QMatrix>,
    pub range_maps: Vec<QMatrix>,
    pub cone: RationalCone,
    pub polytope: Polytope,
    pub grid: Vec<QVec>,
    pub p: Option<QVec>,
    pub n_max: u32,
    /// Values on the grid and an anchor set of grid indices.
    pub support: Option<(Vec<QVec>, Vec<usize>)>,
}

/// A validated instance file. Named references are resolved during parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDocument {
    pub structure: OperationFamily,
    pub range: Option<OrderedRange>,
    pub sets: BTreeMap<String, Vec<Element>>,
    pub functions: BTreeMap<String, Vec<QVec>>,
    pub cones: BTreeMap<String, RationalCone>,
    pub support: Option<SupportSpec>,
    pub ri: Option<RiInstance>,
    pub delta: Option<DeltaInstance>,
    pub subadditive: Option<SubadditiveSpec>,
    pub sublinear: Option<SublinearSpec>,
    pub mt2: Option<Mt2Spec>,
}

const TOP_KEYS: [&str; 12] = [
    "schema_version",
    "structure",
    "range",
    "sets",
    "functions",
    "cones",
    "support",
    "ri",
    "delta",
    "subadditive",
    "sublinear",
    "mt2",
];

pub fn parse_instance(text: &str) -> Result<InstanceDocument, Vec<SchemaError>> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| vec![SchemaError { path: "$".into(), message: format!("malformed JSON: {e}") }])?;
    let mut cx = Ctx::default();
    let doc = cx.document(&value);
    match doc {
        Some(doc) if cx.errors.is_empty() => Ok(doc),
        _ => {
            if cx.errors.is_empty() {
                cx.fail::<()>("$", "invalid document");
            }
            Err(cx.errors)
        }
    }
}

fn join(path: &str, key: &str) -> String {
    if path == "$" {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn index(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

#[derive(Default)]
struct Ctx {
    errors: Vec<SchemaError>,
}

impl Ctx {
    fn fail<T>(&mut self, path: &str, message: impl Into<String>) -> Option<T> {
        self.errors.push(SchemaError { path: path.to_string(), message: message.into() });
        None
    }

    fn object<'a>(&mut self, v: &'a Value, path: &str, allowed: &[&str]) -> Option<&'a Map<String, Value>> {
        let Some(map) = v.as_object() else { return self.fail(path, "expected an object") };
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                self.fail::<()>(&join(path, key), "unknown field");
            }
        }
        Some(map)
    }

    fn required<'a>(&mut self, map: &'a Map<String, Value>, key: &str, path: &str) -> Option<&'a Value> {
        match map.get(key) {
            Some(v) => Some(v),
            None => self.fail(&join(path, key), "missing required field"),
        }
    }

    fn array<'a>(&mut self, v: &'a Value, path: &str) -> Option<&'a [Value]> {
        match v.as_array() {
            Some(a) => Some(a),
            None => self.fail(path, "expected an array"),
        }
    }

    fn string<'a>(&mut self, v: &'a Value, path: &str) -> Option<&'a str> {
        match v.as_str() {
            Some(s) => Some(s),
            None => self.fail(path, "expected a string"),
        }
    }

    fn natural(&mut self, v: &Value, path: &str) -> Option<usize> {
        match v.as_u64().and_then(|n| usize::try_from(n).ok()) {
            Some(n) => Some(n),
            None => self.fail(path, "expected a nonnegative integer"),
        }
    }

    fn element(&mut self, v: &Value, path: &str, size: usize) -> Option<Element> {
        let x = self.natural(v, path)?;
        if x >= size {
            return self.fail(path, format!("index {x} is outside 0..{size}"));
        }
        Some(x)
    }

    fn rational(&mut self, v: &Value, path: &str) -> Option<Rational> {
        match v {
            Value::String(s) => match parse_rational(s) {
                Ok(r) => Some(r),
                Err(e) => self.fail(path, e.to_string()),
            },
            Value::Number(n) if n.is_i64() || n.is_u64() => {
                parse_rational(&n.to_string()).ok().or_else(|| self.fail(path, "bad integer"))
            }
            Value::Number(_) => self.fail(path, "non-integer numbers are not exact; write rationals as \"p/q\" strings"),
            _ => self.fail(path, "expected a rational string"),
        }
    }

    fn list<T>(&mut self, v: &Value, path: &str, mut item: impl FnMut(&mut Self, &Value, &str) -> Option<T>) -> Option<Vec<T>> {
        let items = self.array(v, path)?;
        let mut out = Vec::with_capacity(items.len());
        let mut ok = true;
        for (i, x) in items.iter().enumerate() {
            match item(self, x, &index(path, i)) {
                Some(t) => out.push(t),
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn qvec(&mut self, v: &Value, path: &str, dim: Option<usize>) -> Option<QVec> {
        let out = self.list(v, path, |cx, x, p| cx.rational(x, p))?;
        if let Some(d) = dim {
            if out.len() != d {
                return self.fail(path, format!("expected {d} entries, found {}", out.len()));
            }
        }
        Some(out)
    }

    /// A vector, or a bare rational read as a one-entry vector.
    fn value_vec(&mut self, v: &Value, path: &str) -> Option<QVec> {
        if v.is_array() {
            self.qvec(v, path, None)
        } else {
            self.rational(v, path).map(|r| vec![r])
        }
    }

    /// A square matrix given as rows, or a bare rational meaning that multiple of the identity.
    fn matrix(&mut self, v: &Value, path: &str, dim: usize) -> Option<QMatrix> {
        if !v.is_array() {
            return self.rational(v, path).map(|r| QMatrix::scalar(dim, r));
        }
        let rows = self.list(v, path, |cx, row, p| cx.qvec(row, p, Some(dim)))?;
        if rows.len() != dim {
            return self.fail(path, format!("expected {dim} rows, found {}", rows.len()));
        }
        QMatrix::from_rows(rows).or_else(|| self.fail(path, "ragged matrix"))
    }

    fn norm(&mut self, v: &Value, path: &str) -> Option<Norm> {
        match self.string(v, path)? {
            "l1" => Some(Norm::L1),
            "linf" => Some(Norm::Linf),
            "l2" => Some(Norm::L2),
            other => self.fail(path, format!("unknown norm {other:?}; expected l1, linf or l2")),
        }
    }

    fn document(&mut self, v: &Value) -> Option<InstanceDocument> {
        let map = self.object(v, "$", &TOP_KEYS)?;
        match map.get("schema_version") {
            Some(Value::String(s)) if s == SCHEMA_VERSION => {}
            Some(_) => {
                self.fail::<()>("schema_version", format!("expected \"{SCHEMA_VERSION}\""));
            }
            None => {
                self.fail::<()>("schema_version", "missing required field");
            }
        }
        let structure = self.required(map, "structure", "$").and_then(|s| self.structure(s, "structure"));
        let size = structure.as_ref().map(|s| s.size());
        let cones = match map.get("cones") {
            Some(c) => self.cones(c, "cones").unwrap_or_default(),
            None => BTreeMap::new(),
        };
        let sets = match (map.get("sets"), size) {
            (Some(s), Some(n)) => self.sets(s, "sets", n).unwrap_or_default(),
            _ => BTreeMap::new(),
        };
        let functions = match map.get("functions") {
            Some(f) => self.functions(f, "functions").unwrap_or_default(),
            None => BTreeMap::new(),
        };
        let range = match (map.get("range"), &structure) {
            (Some(r), Some(s)) => self.range(r, "range", s, &cones),
            _ => None,
        };
        let support = match (map.get("support"), size) {
            (Some(s), Some(n)) => self.support(s, "support", n, &sets, &functions, range.as_ref()),
            _ => None,
        };
        let ri = map.get("ri").and_then(|r| self.ri(r, "ri"));
        let delta = map.get("delta").and_then(|d| self.delta(d, "delta"));
        let subadditive = match (map.get("subadditive"), &structure) {
            (Some(s), Some(fam)) => self.subadditive(s, "subadditive", fam, &functions),
            _ => None,
        };
        let sublinear = map.get("sublinear").and_then(|s| self.sublinear(s, "sublinear", &cones, &functions));
        let mt2 = map.get("mt2").and_then(|m| self.mt2(m, "mt2", &cones));
        Some(InstanceDocument {
            structure: structure?,
            range,
            sets,
            functions,
            cones,
            support,
            ri,
            delta,
            subadditive,
            sublinear,
            mt2,
        })
    }

    fn structure(&mut self, v: &Value, path: &str) -> Option<OperationFamily> {
        let map = self.object(v, path, &["carrier_size", "labels", "operations"])?;
        let size = self.required(map, "carrier_size", path).and_then(|s| self.natural(s, &join(path, "carrier_size")))?;
        if size == 0 {
            return self.fail(&join(path, "carrier_size"), "carrier must be nonempty");
        }
        let carrier = match map.get("labels") {
            Some(l) => {
                let lp = join(path, "labels");
                let labels = self.list(l, &lp, |cx, x, p| cx.string(x, p).map(str::to_string))?;
                if labels.len() != size {
                    return self.fail(&lp, format!("expected {size} labels, found {}", labels.len()));
                }
                match Carrier::with_labels(labels) {
                    Ok(c) => c,
                    Err(e) => return self.fail(&lp, e.to_string()),
                }
            }
            None => Carrier::new(size).expect("nonempty"),
        };
        let ops_path = join(path, "operations");
        let ops = self.required(map, "operations", path)?;
        let parsed = self.list(ops, &ops_path, |cx, op, p| cx.operation(op, p, size))?;
        let mut family = OperationFamily::new(carrier);
        for (i, (name, op)) in parsed.into_iter().enumerate() {
            if let Err(e) = family.push(name, op) {
                return self.fail(&join(&index(&ops_path, i), "name"), e.to_string());
            }
        }
        Some(family)
    }

    fn operation(&mut self, v: &Value, path: &str, size: usize) -> Option<(String, Operation)> {
        let map = self.object(v, path, &["name", "arity", "table"])?;
        let name = self.required(map, "name", path).and_then(|n| self.string(n, &join(path, "name")))?.to_string();
        let arity = self.required(map, "arity", path).and_then(|a| self.natural(a, &join(path, "arity")))?;
        if arity == 0 {
            return self.fail(&join(path, "arity"), "arity must be at least 1");
        }
        let table_path = join(path, "table");
        let cells = omega_core::algebra::tuple_count(size, arity);
        if cells.is_none_or(|c| c > MAX_TABLE_CELLS) {
            return self.fail(&table_path, format!("a table of {size}^{arity} cells is too large"));
        }
        let table = self.required(map, "table", path)?;
        let mut flat = Vec::with_capacity(cells.expect("checked") as usize);
        self.table(table, &table_path, size, arity, &mut flat)?;
        match Operation::new(size, arity, flat) {
            Ok(op) => Some((name, op)),
            Err(e) => self.fail(&table_path, e.to_string()),
        }
    }

    /// Nested arrays, outermost index first; entries are carrier indices.
    fn table(&mut self, v: &Value, path: &str, size: usize, depth: usize, out: &mut Vec<Element>) -> Option<()> {
        let items = self.array(v, path)?;
        if items.len() != size {
            return self.fail(path, format!("expected {size} entries, found {}", items.len()));
        }
        let mut ok = true;
        for (i, x) in items.iter().enumerate() {
            let p = index(path, i);
            let r = if depth == 1 { self.element(x, &p, size).map(|e| out.push(e)) } else { self.table(x, &p, size, depth - 1, out) };
            ok &= r.is_some();
        }
        ok.then_some(())
    }

    fn sets(&mut self, v: &Value, path: &str, size: usize) -> Option<BTreeMap<String, Vec<Element>>> {
        let Some(map) = v.as_object() else { return self.fail(path, "expected an object") };
        let mut out = BTreeMap::new();
        for (name, items) in map {
            if let Some(set) = self.index_set(items, &join(path, name), size) {
                out.insert(name.clone(), set);
            }
        }
        Some(out)
    }

    fn index_set(&mut self, v: &Value, path: &str, size: usize) -> Option<Vec<Element>> {
        let mut set = self.list(v, path, |cx, x, p| cx.element(x, p, size))?;
        set.sort_unstable();
        set.dedup();
        Some(set)
    }

    fn functions(&mut self, v: &Value, path: &str) -> Option<BTreeMap<String, Vec<QVec>>> {
        let Some(map) = v.as_object() else { return self.fail(path, "expected an object") };
        let mut out = BTreeMap::new();
        for (name, values) in map {
            if let Some(f) = self.list(values, &join(path, name), |cx, x, p| cx.value_vec(x, p)) {
                out.insert(name.clone(), f);
            }
        }
        Some(out)
    }

    fn cones(&mut self, v: &Value, path: &str) -> Option<BTreeMap<String, RationalCone>> {
        let Some(map) = v.as_object() else { return self.fail(path, "expected an object") };
        let mut out = BTreeMap::new();
        for (name, c) in map {
            if let Some(cone) = self.cone(c, &join(path, name)) {
                out.insert(name.clone(), cone);
            }
        }
        Some(out)
    }

    fn cone(&mut self, v: &Value, path: &str) -> Option<RationalCone> {
        let map = self.object(v, path, &["kind", "dim", "generators", "epsilon", "norm"])?;
        let kind = self.required(map, "kind", path).and_then(|k| self.string(k, &join(path, "kind")))?;
        let dim = self.required(map, "dim", path).and_then(|d| self.natural(d, &join(path, "dim")))?;
        let built = match kind {
            "orthant" => Ok(RationalCone::orthant(dim)),
            "polyhedral" => {
                let gp = join(path, "generators");
                let gens = self.required(map, "generators", path)?;
                let gens = self.list(gens, &gp, |cx, g, p| cx.qvec(g, p, Some(dim)))?;
                RationalCone::polyhedral(dim, gens)
            }
            "lorenz" => {
                let eps = self.required(map, "epsilon", path).and_then(|e| self.rational(e, &join(path, "epsilon")))?;
                let norm = self.required(map, "norm", path).and_then(|n| self.norm(n, &join(path, "norm")))?;
                RationalCone::lorenz(eps, dim, norm)
            }
            other => return self.fail(&join(path, "kind"), format!("unknown cone kind {other:?}")),
        };
        built.map_err(|e| self.fail::<()>(path, e.to_string())).ok()
    }

    fn cone_ref(&mut self, v: &Value, path: &str, cones: &BTreeMap<String, RationalCone>) -> Option<RationalCone> {
        match v {
            Value::String(name) => match cones.get(name) {
                Some(c) => Some(c.clone()),
                None => self.fail(path, format!("no cone named {name:?}")),
            },
            _ => self.cone(v, path),
        }
    }

    fn function_ref(&mut self, v: &Value, path: &str, functions: &BTreeMap<String, Vec<QVec>>) -> Option<Vec<QVec>> {
        match v {
            Value::String(name) => match functions.get(name) {
                Some(f) => Some(f.clone()),
                None => self.fail(path, format!("no function named {name:?}")),
            },
            _ => self.list(v, path, |cx, x, p| cx.value_vec(x, p)),
        }
    }

    fn range(
        &mut self,
        v: &Value,
        path: &str,
        structure: &OperationFamily,
        cones: &BTreeMap<String, RationalCone>,
    ) -> Option<OrderedRange> {
        let map = self.object(v, path, &["flavor", "poset", "operations", "dim", "cone", "matrices"])?;
        let flavor = self.required(map, "flavor", path).and_then(|f| self.string(f, &join(path, "flavor")))?;
        match flavor {
            "finite" => {
                let pp = join(path, "poset");
                let poset = self.required(map, "poset", path).and_then(|p| self.poset(p, &pp))?;
                let ops = self.required(map, "operations", path)?;
                let op_path = join(path, "operations");
                let parsed = self.list(ops, &op_path, |cx, op, p| cx.operation(op, p, poset.size()))?;
                let mut family = OperationFamily::new(Carrier::new(poset.size()).expect("nonempty poset"));
                for (i, (name, op)) in parsed.into_iter().enumerate() {
                    if let Err(e) = family.push(name, op) {
                        return self.fail(&join(&index(&op_path, i), "name"), e.to_string());
                    }
                }
                match FiniteRange::new(poset, family) {
                    Ok(r) => Some(OrderedRange::Finite(r)),
                    Err(e) => self.fail(path, e.to_string()),
                }
            }
            "linear" => {
                let dim = self.required(map, "dim", path).and_then(|d| self.natural(d, &join(path, "dim")))?;
                let cp = join(path, "cone");
                let cone = self.required(map, "cone", path).and_then(|c| self.cone_ref(c, &cp, cones))?;
                if cone.ambient_dim() != dim {
                    return self.fail(&cp, format!("cone lives in dimension {}, range has dim {dim}", cone.ambient_dim()));
                }
                let mp = join(path, "matrices");
                let mats = self.required(map, "matrices", path)?;
                let Some(mats) = mats.as_object() else { return self.fail(&mp, "expected an object") };
                let mut ops = Vec::new();
                for (name, slots) in mats {
                    let sp = join(&mp, name);
                    let ms = self.list(slots, &sp, |cx, m, p| cx.matrix(m, p, dim))?;
                    ops.push((name.clone(), ms));
                }
                // Range operations follow the structure's order, then any extras by name.
                ops.sort_by_key(|(name, _)| structure.position(name).unwrap_or(usize::MAX));
                match LinearRange::new(cone, ops) {
                    Ok(r) => Some(OrderedRange::Linear(r)),
                    Err(e) => self.fail(path, e.to_string()),
                }
            }
            other => self.fail(&join(path, "flavor"), format!("unknown flavor {other:?}; expected finite or linear")),
        }
    }

    /// `{size, relations: [[a, b], …]}` with `a ≤ b`; the reflexive-transitive closure is taken.
    fn poset(&mut self, v: &Value, path: &str) -> Option<FinitePoset> {
        let map = self.object(v, path, &["size", "relations"])?;
        let size = self.required(map, "size", path).and_then(|s| self.natural(s, &join(path, "size")))?;
        if size == 0 {
            return self.fail(&join(path, "size"), "poset must be nonempty");
        }
        let rp = join(path, "relations");
        let pairs = match map.get("relations") {
            Some(r) => self.list(r, &rp, |cx, pair, p| {
                let both = cx.list(pair, p, |cx, x, q| cx.element(x, q, size))?;
                match both.as_slice() {
                    [a, b] => Some((*a, *b)),
                    _ => cx.fail(p, "expected a pair [a, b]"),
                }
            })?,
            None => Vec::new(),
        };
        let mut leq = vec![false; size * size];
        for x in 0..size {
            leq[x * size + x] = true;
        }
        for (a, b) in pairs {
            leq[a * size + b] = true;
        }
        for k in 0..size {
            for i in 0..size {
                if leq[i * size + k] {
                    for j in 0..size {
                        if leq[k * size + j] {
                            leq[i * size + j] = true;
                        }
                    }
                }
            }
        }
        FinitePoset::new(size, leq).map_err(|e| self.fail::<()>(&rp, e.to_string())).ok()
    }

    fn support(
        &mut self,
        v: &Value,
        path: &str,
        size: usize,
        sets: &BTreeMap<String, Vec<Element>>,
        functions: &BTreeMap<String, Vec<QVec>>,
        range: Option<&OrderedRange>,
    ) -> Option<SupportSpec> {
        let map = self.object(v, path, &["f", "D", "p"])?;
        let fp = join(path, "f");
        let f = self.required(map, "f", path).and_then(|f| self.function_ref(f, &fp, functions))?;
        if f.len() != size {
            return self.fail(&fp, format!("expected {size} values, found {}", f.len()));
        }
        match range {
            Some(OrderedRange::Finite(r)) => {
                for (i, value) in f.iter().enumerate() {
                    if finite_value(value, r.poset().size()).is_none() {
                        self.fail::<()>(&index(&fp, i), format!("expected an element index below {}", r.poset().size()));
                    }
                }
            }
            Some(OrderedRange::Linear(r)) => {
                for (i, value) in f.iter().enumerate() {
                    if value.len() != r.dim() {
                        self.fail::<()>(&index(&fp, i), format!("expected a vector of length {}", r.dim()));
                    }
                }
            }
            None => {}
        }
        let dp = join(path, "D");
        let anchor = match map.get("D") {
            Some(Value::String(name)) => match sets.get(name) {
                Some(s) => Some(s.clone()),
                None => return self.fail(&dp, format!("no set named {name:?}")),
            },
            Some(d) => Some(self.index_set(d, &dp, size)?),
            None => None,
        };
        let p = match map.get("p") {
            Some(p) => Some(self.element(p, &join(path, "p"), size)?),
            None => None,
        };
        Some(SupportSpec { f, anchor, p })
    }

    fn halfspaces(&mut self, v: &Value, path: &str) -> Option<Polytope> {
        let rows = self.list(v, path, |cx, h, p| {
            let map = cx.object(h, p, &["normal", "bound"])?;
            let normal = cx.required(map, "normal", p).and_then(|n| cx.qvec(n, &join(p, "normal"), None))?;
            let bound = cx.required(map, "bound", p).and_then(|b| cx.rational(b, &join(p, "bound")))?;
            Some((normal, bound))
        })?;
        let Some(dim) = rows.first().map(|(h, _)| h.len()) else {
            return self.fail(path, "at least one halfspace is required");
        };
        Polytope::new(dim, rows).map_err(|e| self.fail::<()>(path, e.to_string())).ok()
    }

    fn ri(&mut self, v: &Value, path: &str) -> Option<RiInstance> {
        let map = self.object(v, path, &["halfspaces", "a_matrix", "p", "x", "n_max"])?;
        let polytope = self.required(map, "halfspaces", path).and_then(|h| self.halfspaces(h, &join(path, "halfspaces")))?;
        let d = polytope.dim();
        let a = self.required(map, "a_matrix", path).and_then(|a| self.matrix(a, &join(path, "a_matrix"), d))?;
        let p = self.required(map, "p", path).and_then(|p| self.qvec(p, &join(path, "p"), Some(d)))?;
        let x = self.required(map, "x", path).and_then(|x| self.qvec(x, &join(path, "x"), Some(d)))?;
        let n_max = self.n_max(map, path)?;
        Some(RiInstance { polytope, a, p, x, n_max })
    }

    fn n_max(&mut self, map: &Map<String, Value>, path: &str) -> Option<u32> {
        match map.get("n_max") {
            None => Some(DEFAULT_N_MAX),
            Some(n) => {
                let np = join(path, "n_max");
                let n = self.natural(n, &np)?;
                u32::try_from(n).ok().or_else(|| self.fail(&np, "n_max is too large"))
            }
        }
    }

    fn point_index(&mut self, v: &Value, path: &str, sample: &[QVec]) -> Option<usize> {
        if v.is_array() {
            let point = self.qvec(v, path, None)?;
            match sample.iter().position(|x| *x == point) {
                Some(i) => Some(i),
                None => self.fail(path, "point is not in the sample"),
            }
        } else {
            self.element(v, path, sample.len())
        }
    }

    fn delta(&mut self, v: &Value, path: &str) -> Option<DeltaInstance> {
        let map = self.object(v, path, &["sample", "s", "t", "F", "f", "p", "norm"])?;
        let sample = self
            .required(map, "sample", path)
            .and_then(|s| self.list(s, &join(path, "sample"), |cx, x, p| cx.value_vec(x, p)))?;
        let s = self.required(map, "s", path).and_then(|s| self.rational(s, &join(path, "s")))?;
        let t = self.required(map, "t", path).and_then(|t| self.rational(t, &join(path, "t")))?;
        let big_f = self.required(map, "F", path).and_then(|f| self.list(f, &join(path, "F"), |cx, x, p| cx.value_vec(x, p)))?;
        let f = self.required(map, "f", path).and_then(|f| self.qvec(f, &join(path, "f"), Some(sample.len())))?;
        let p = self.required(map, "p", path).and_then(|p| self.point_index(p, &join(path, "p"), &sample))?;
        let norm = match map.get("norm") {
            Some(n) => self.norm(n, &join(path, "norm"))?,
            None => Norm::L1,
        };
        let inst = DeltaInstance { sample, s, t, big_f, f, p, norm };
        inst.validate().map_err(|e| self.fail::<()>(path, e.to_string())).ok()?;
        Some(inst)
    }

    fn subadditive(
        &mut self,
        v: &Value,
        path: &str,
        structure: &OperationFamily,
        functions: &BTreeMap<String, Vec<QVec>>,
    ) -> Option<SubadditiveSpec> {
        let map = self.object(v, path, &["operation", "f", "p"])?;
        let op_path = join(path, "operation");
        let operation = self.required(map, "operation", path).and_then(|o| self.string(o, &op_path))?.to_string();
        if structure.position(&operation).is_none() {
            return self.fail(&op_path, format!("no operation named {operation:?}"));
        }
        let fp = join(path, "f");
        let values = self.required(map, "f", path).and_then(|f| self.function_ref(f, &fp, functions))?;
        let mut f = Vec::with_capacity(values.len());
        for (i, value) in values.into_iter().enumerate() {
            match <[Rational; 1]>::try_from(value) {
                Ok([r]) => f.push(r),
                Err(_) => {
                    self.fail::<()>(&index(&fp, i), "expected a scalar");
                }
            }
        }
        if f.len() != structure.size() {
            return self.fail(&fp, format!("expected {} scalar values", structure.size()));
        }
        let p = self.required(map, "p", path).and_then(|p| self.element(p, &join(path, "p"), structure.size()))?;
        Some(SubadditiveSpec { operation, f, p })
    }

    fn sublinear(
        &mut self,
        v: &Value,
        path: &str,
        cones: &BTreeMap<String, RationalCone>,
        functions: &BTreeMap<String, Vec<QVec>>,
    ) -> Option<SublinearSpec> {
        let map = self.object(v, path, &["sample", "f", "cone", "p", "multipliers"])?;
        let sample = self
            .required(map, "sample", path)
            .and_then(|s| self.list(s, &join(path, "sample"), |cx, x, p| cx.value_vec(x, p)))?;
        let fp = join(path, "f");
        let f = self.required(map, "f", path).and_then(|f| self.function_ref(f, &fp, functions))?;
        if f.len() != sample.len() {
            return self.fail(&fp, format!("expected {} values, found {}", sample.len(), f.len()));
        }
        let cone = self.required(map, "cone", path).and_then(|c| self.cone_ref(c, &join(path, "cone"), cones))?;
        let p = self.required(map, "p", path).and_then(|p| self.point_index(p, &join(path, "p"), &sample))?;
        let multipliers = match map.get("multipliers") {
            Some(m) => self.list(m, &join(path, "multipliers"), |cx, x, p| cx.rational(x, p))?,
            None => default_multipliers(),
        };
        Some(SublinearSpec { sample, f, cone, p, multipliers })
    }

    fn mt2(&mut self, v: &Value, path: &str, cones: &BTreeMap<String, RationalCone>) -> Option<Mt2Spec> {
        let map = self.object(v, path, &["a_maps", "range_maps", "cone", "halfspaces", "grid", "p", "n_max", "support"])?;
        let polytope = self.required(map, "halfspaces", path).and_then(|h| self.halfspaces(h, &join(path, "halfspaces")))?;
        let d = polytope.dim();
        let cone = self.required(map, "cone", path).and_then(|c| self.cone_ref(c, &join(path, "cone"), cones))?;
        let e = cone.ambient_dim();
        let a_maps = self
            .required(map, "a_maps", path)
            .and_then(|m| self.list(m, &join(path, "a_maps"), |cx, x, p| cx.matrix(x, p, d)))?;
        let range_maps = self
            .required(map, "range_maps", path)
            .and_then(|m| self.list(m, &join(path, "range_maps"), |cx, x, p| cx.matrix(x, p, e)))?;
        let grid = match map.get("grid") {
            Some(g) => self.list(g, &join(path, "grid"), |cx, x, p| cx.qvec(x, p, Some(d)))?,
            None => Vec::new(),
        };
        let p = match map.get("p") {
            Some(p) => Some(self.qvec(p, &join(path, "p"), Some(d))?),
            None => None,
        };
        let n_max = self.n_max(map, path)?;
        let support = match map.get("support") {
            Some(s) => {
                let sp = join(path, "support");
                let sm = self.object(s, &sp, &["f", "D"])?;
                let fp = join(&sp, "f");
                let f = self.required(sm, "f", &sp).and_then(|f| self.list(f, &fp, |cx, x, p| cx.qvec(x, p, Some(e))))?;
                if f.len() != grid.len() {
                    return self.fail(&fp, format!("expected one value per grid point ({})", grid.len()));
                }
                let anchor = self.required(sm, "D", &sp).and_then(|dv| self.index_set(dv, &join(&sp, "D"), grid.len()))?;
                Some((f, anchor))
            }
            None => None,
        };
        Some(Mt2Spec { a_maps, range_maps, cone, polytope, grid, p, n_max, support })
    }
}

/// A one-entry nonnegative integer vector as a finite range element.
pub fn finite_value(value: &QVec, size: usize) -> Option<Element> {
    match value.as_slice() {
        [r] if r.is_integer() => {
            let n: usize = r.numer().try_into().ok()?;
            (n < size).then_some(n)
        }
        _ => None,
    }
}

pub fn rational_json(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn qvec_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_json).collect())
}

pub fn matrix_json(m: &QMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| qvec_json(r)).collect())
}

pub fn norm_name(n: Norm) -> &'static str {
    match n {
        Norm::L1 => "l1",
        Norm::Linf => "linf",
        Norm::L2 => "l2",
    }
}

pub fn cone_json(c: &RationalCone) -> Value {
    match c {
        RationalCone::Polyhedral { dim, generators } => json!({
            "kind": "polyhedral",
            "dim": dim,
            "generators": generators.iter().map(|g| qvec_json(g)).collect::<Vec<_>>(),
        }),
        RationalCone::Lorenz { epsilon, dim, norm } => json!({
            "kind": "lorenz",
            "dim": dim,
            "epsilon": rational_json(epsilon),
            "norm": norm_name(*norm),
        }),
    }
}

fn operations_json(family: &OperationFamily) -> Value {
    let size = family.size();
    let ops = family
        .iter()
        .map(|(name, op)| json!({ "name": name, "arity": op.arity(), "table": nest(op.table(), size, op.arity()) }))
        .collect();
    Value::Array(ops)
}

fn nest(flat: &[Element], size: usize, depth: usize) -> Value {
    if depth <= 1 {
        return Value::Array(flat.iter().map(|&x| json!(x)).collect());
    }
    Value::Array(flat.chunks(flat.len() / size).map(|c| nest(c, size, depth - 1)).collect())
}

fn polytope_json(p: &Polytope) -> Value {
    Value::Array(p.rows().iter().map(|(h, c)| json!({ "normal": qvec_json(h), "bound": rational_json(c) })).collect())
}

fn values_json(f: &[QVec]) -> Value {
    Value::Array(f.iter().map(|v| qvec_json(v)).collect())
}

impl InstanceDocument {
    /// The canonical JSON form; every reference is written inline.
    pub fn to_json(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
        let mut structure = Map::new();
        structure.insert("carrier_size".into(), json!(self.structure.size()));
        if let Some(labels) = self.structure.carrier().labels() {
            structure.insert("labels".into(), json!(labels));
        }
        structure.insert("operations".into(), operations_json(&self.structure));
        doc.insert("structure".into(), Value::Object(structure));
        match &self.range {
            Some(OrderedRange::Finite(r)) => {
                let n = r.poset().size();
                let relations: Vec<Value> = (0..n)
                    .flat_map(|a| (0..n).filter(move |&b| a != b).map(move |b| (a, b)))
                    .filter(|&(a, b)| r.poset().leq(a, b))
                    .map(|(a, b)| json!([a, b]))
                    .collect();
                doc.insert(
                    "range".into(),
                    json!({
                        "flavor": "finite",
                        "poset": { "size": n, "relations": relations },
                        "operations": operations_json(r.ops()),
                    }),
                );
            }
            Some(OrderedRange::Linear(r)) => {
                let mut mats = Map::new();
                for (i, name) in omega_core::functions::OrderedCodomain::op_names(r).into_iter().enumerate() {
                    mats.insert(name, Value::Array(r.matrices(i).iter().map(matrix_json).collect()));
                }
                doc.insert(
                    "range".into(),
                    json!({ "flavor": "linear", "dim": r.dim(), "cone": cone_json(r.cone()), "matrices": mats }),
                );
            }
            None => {}
        }
        if !self.sets.is_empty() {
            doc.insert("sets".into(), json!(self.sets));
        }
        if !self.functions.is_empty() {
            let fs: Map<String, Value> = self.functions.iter().map(|(k, f)| (k.clone(), values_json(f))).collect();
            doc.insert("functions".into(), Value::Object(fs));
        }
        if !self.cones.is_empty() {
            let cs: Map<String, Value> = self.cones.iter().map(|(k, c)| (k.clone(), cone_json(c))).collect();
            doc.insert("cones".into(), Value::Object(cs));
        }
        if let Some(s) = &self.support {
            let mut m = Map::new();
            m.insert("f".into(), values_json(&s.f));
            if let Some(d) = &s.anchor {
                m.insert("D".into(), json!(d));
            }
            if let Some(p) = s.p {
                m.insert("p".into(), json!(p));
            }
            doc.insert("support".into(), Value::Object(m));
        }
        if let Some(ri) = &self.ri {
            doc.insert(
                "ri".into(),
                json!({
                    "halfspaces": polytope_json(&ri.polytope),
                    "a_matrix": matrix_json(&ri.a),
                    "p": qvec_json(&ri.p),
                    "x": qvec_json(&ri.x),
                    "n_max": ri.n_max,
                }),
            );
        }
        if let Some(d) = &self.delta {
            doc.insert(
                "delta".into(),
                json!({
                    "sample": values_json(&d.sample),
                    "s": rational_json(&d.s),
                    "t": rational_json(&d.t),
                    "F": values_json(&d.big_f),
                    "f": qvec_json(&d.f),
                    "p": d.p,
                    "norm": norm_name(d.norm),
                }),
            );
        }
        if let Some(s) = &self.subadditive {
            doc.insert("subadditive".into(), json!({ "operation": s.operation, "f": qvec_json(&s.f), "p": s.p }));
        }
        if let Some(s) = &self.sublinear {
            doc.insert(
                "sublinear".into(),
                json!({
                    "sample": values_json(&s.sample),
                    "f": values_json(&s.f),
                    "cone": cone_json(&s.cone),
                    "p": s.p,
                    "multipliers": qvec_json(&s.multipliers),
                }),
            );
        }
        if let Some(m) = &self.mt2 {
            let mut o = Map::new();
            o.insert("a_maps".into(), Value::Array(m.a_maps.iter().map(matrix_json).collect()));
            o.insert("range_maps".into(), Value::Array(m.range_maps.iter().map(matrix_json).collect()));
            o.insert("cone".into(), cone_json(&m.cone));
            o.insert("halfspaces".into(), polytope_json(&m.polytope));
            o.insert("grid".into(), values_json(&m.grid));
            if let Some(p) = &m.p {
                o.insert("p".into(), qvec_json(p));
            }
            o.insert("n_max".into(), json!(m.n_max));
            if let Some((f, d)) = &m.support {
                o.insert("support".into(), json!({ "f": values_json(f), "D": d }));
            }
            doc.insert("mt2".into(), Value::Object(o));
        }
        Value::Object(doc)
    }
}
