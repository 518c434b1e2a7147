//! The extension engine: from a convex `f` affine on an anchor set `D` with
//! `ext(D) = X`, find an affine `g ≤ f` agreeing with `f` on `D`.

use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::{tuple_count, Element, OperationFamily, Tuples};
use crate::convexity::{convex_hull, extreme_hull, is_convex_set, omega_interior, Subset};
use crate::functions::{
    check_order_automorphism, check_table, is_affine_map, is_affine_on, is_convex_map, match_families, FiniteRange,
    FunctionTable, LinearRange, OrderedCodomain,
};
use crate::lp::{Relation, Sense};
use crate::rational::{QVec, Rational};
use crate::Limits;

use super::builder::{positive_functional, require_linear_cone, LpBuilder, Outcome, Terms};
use super::SupportError;

/// The named hypotheses of the extension theorem, in the order they are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Hypothesis {
    AnchorNonempty,
    AnchorConvex,
    FConvex,
    FAffineOnAnchor,
    AnchorExtremeHull,
    LowerChainComplete,
    DomainDistributive,
    RangeDistributive,
    OrderAutomorphism,
    AbelianSemigroup,
}

impl Hypothesis {
    pub fn as_str(self) -> &'static str {
        match self {
            Hypothesis::AnchorNonempty => "anchor_nonempty",
            Hypothesis::AnchorConvex => "anchor_convex",
            Hypothesis::FConvex => "f_convex",
            Hypothesis::FAffineOnAnchor => "f_affine_on_anchor",
            Hypothesis::AnchorExtremeHull => "anchor_extreme_hull",
            Hypothesis::LowerChainComplete => "lower_chain_complete",
            Hypothesis::DomainDistributive => "domain_distributive",
            Hypothesis::RangeDistributive => "range_distributive",
            Hypothesis::OrderAutomorphism => "order_automorphism",
            Hypothesis::AbelianSemigroup => "abelian_semigroup",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisReport {
    pub hypothesis: Hypothesis,
    pub holds: bool,
    /// Description of the first counterexample when the hypothesis fails.
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportInstance<R: OrderedCodomain> {
    pub omega: OperationFamily,
    pub range: R,
    pub f: FunctionTable<R::Value>,
    pub anchor: Subset,
}

impl<R: OrderedCodomain> SupportInstance<R> {
    pub fn new(omega: OperationFamily, range: R, f: FunctionTable<R::Value>, anchor: Subset) -> Self {
        SupportInstance { omega, range, f, anchor }
    }

    /// Shape checks that precede any hypothesis.
    pub fn check_shapes(&self) -> Result<(), SupportError> {
        match_families(&self.omega, &self.range)?;
        check_table(&self.f, self.omega.size(), &self.range)?;
        if self.anchor.universe() != self.omega.size() {
            return Err(SupportError::InvalidInput(format!(
                "anchor set lives on {} elements, carrier has {}",
                self.anchor.universe(),
                self.omega.size()
            )));
        }
        Ok(())
    }

    /// Evaluates every hypothesis, reporting each verdict.
    pub fn hypotheses(&self, limits: &Limits) -> Result<Vec<HypothesisReport>, SupportError> {
        self.check_shapes()?;
        let mut out = Vec::new();
        let mut report = |hypothesis, detail: Option<String>| {
            out.push(HypothesisReport { hypothesis, holds: detail.is_none(), detail })
        };
        report(Hypothesis::AnchorNonempty, self.anchor.is_empty().then(|| "anchor set is empty".to_string()));
        report(
            Hypothesis::AnchorConvex,
            is_convex_set(&self.omega, &self.anchor).map(|w| format!("{}{:?} leaves the anchor set", w.op, w.args)),
        );
        report(
            Hypothesis::FConvex,
            is_convex_map(&self.f, &self.omega, &self.range)?.map(|w| format!("inequality fails at {}{:?}", w.op, w.args)),
        );
        report(
            Hypothesis::FAffineOnAnchor,
            is_affine_on(&self.f, &self.omega, &self.range, &self.anchor)?
                .map(|w| format!("equation fails at {}{:?}", w.op, w.args)),
        );
        let ext = extreme_hull(&self.omega, &self.anchor);
        report(
            Hypothesis::AnchorExtremeHull,
            (!ext.is_full()).then(|| format!("extreme hull of the anchor set is {:?}", ext)),
        );
        report(
            Hypothesis::LowerChainComplete,
            (!self.range.is_lower_chain_complete()?).then(|| "order cone is not sharp".to_string()),
        );
        report(
            Hypothesis::DomainDistributive,
            self.omega.check_mutually_distributive(limits)?.map(|w| format!("{w:?}")),
        );
        report(
            Hypothesis::RangeDistributive,
            self.range.check_mutually_distributive(limits)?.map(|w| format!("{w:?}")),
        );
        let mut automorphism = None;
        'ops: for name in self.range.op_names() {
            let arity = self.range.op_arity(self.range.position(&name).expect("listed name"));
            for slot in 1..=arity {
                if let Some(w) = check_order_automorphism(&self.range, &name, slot)? {
                    automorphism = Some(format!("{w:?}"));
                    break 'ops;
                }
            }
        }
        report(Hypothesis::OrderAutomorphism, automorphism);
        Ok(out)
    }

    /// The first failing hypothesis, as an error.
    pub fn validate(&self, limits: &Limits) -> Result<(), SupportError> {
        match self.hypotheses(limits)?.into_iter().find(|r| !r.holds) {
            Some(r) => Err(SupportError::HypothesisFailure { name: r.hypothesis, detail: r.detail.unwrap_or_default() }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SupportOptions {
    pub limits: Limits,
    /// Skip the hypothesis checks; infeasibility is then reported as [`SupportError::Infeasible`].
    pub override_preconditions: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertificateChecks {
    pub affine: bool,
    pub dominated: bool,
    pub agrees_on_anchor: bool,
}

impl CertificateChecks {
    pub fn passed(&self) -> bool {
        self.affine && self.dominated && self.agrees_on_anchor
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.affine {
            out.push("affine");
        }
        if !self.dominated {
            out.push("dominated");
        }
        if !self.agrees_on_anchor {
            out.push("agrees_on_anchor");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportCertificate<V> {
    pub g: FunctionTable<V>,
    pub checks: CertificateChecks,
}

pub enum SupportSearch<V> {
    Found(FunctionTable<V>),
    /// Labels of the constraints taking part in the infeasibility proof.
    Infeasible(Vec<String>),
}

/// A range flavor with a procedure for finding certificates.
pub trait SupportBackend: OrderedCodomain + Sized {
    fn find_support(inst: &SupportInstance<Self>, limits: &Limits) -> Result<SupportSearch<Self::Value>, SupportError>;
}

/// Checks the three certificate predicates for a candidate `g`.
pub fn verify_support_certificate<R: OrderedCodomain>(
    inst: &SupportInstance<R>,
    g: &FunctionTable<R::Value>,
) -> Result<CertificateChecks, SupportError> {
    inst.check_shapes()?;
    check_table(g, inst.omega.size(), &inst.range)?;
    let affine = is_affine_map(g, &inst.omega, &inst.range)?.is_none();
    let mut dominated = true;
    for x in 0..g.len() {
        if !inst.range.leq(g.get(x), inst.f.get(x))? {
            dominated = false;
            break;
        }
    }
    let agrees_on_anchor = inst.anchor.iter().all(|x| g.get(x) == inst.f.get(x));
    Ok(CertificateChecks { affine, dominated, agrees_on_anchor })
}

pub fn support_extend<R: SupportBackend>(
    inst: &SupportInstance<R>,
    options: &SupportOptions,
) -> Result<SupportCertificate<R::Value>, SupportError> {
    if options.override_preconditions {
        inst.check_shapes()?;
    } else {
        inst.validate(&options.limits)?;
    }
    solve_and_verify(inst, &options.limits, options.override_preconditions)
}

pub(crate) fn solve_and_verify<R: SupportBackend>(
    inst: &SupportInstance<R>,
    limits: &Limits,
    infeasible_allowed: bool,
) -> Result<SupportCertificate<R::Value>, SupportError> {
    match R::find_support(inst, limits)? {
        SupportSearch::Found(g) => {
            let checks = verify_support_certificate(inst, &g)?;
            if !checks.passed() {
                return Err(SupportError::Internal("solver output fails certificate verification"));
            }
            Ok(SupportCertificate { g, checks })
        }
        SupportSearch::Infeasible(active) if infeasible_allowed => Err(SupportError::Infeasible { active }),
        SupportSearch::Infeasible(active) => Err(SupportError::TheoremViolation { active }),
    }
}

/// Support at an interior point `p`, with anchor `{p}`; both families must be reflexive.
pub fn support_at_point<R: SupportBackend>(
    omega: OperationFamily,
    range: R,
    f: FunctionTable<R::Value>,
    p: Element,
    options: &SupportOptions,
) -> Result<SupportCertificate<R::Value>, SupportError> {
    let n = omega.size();
    if p >= n {
        return Err(SupportError::InvalidInput(format!("point {p} outside a carrier of size {n}")));
    }
    if let Some(w) = omega.check_reflexive() {
        return Err(SupportError::NotReflexive { side: "domain", op: w.op });
    }
    if let Some(op) = range.check_reflexive() {
        return Err(SupportError::NotReflexive { side: "range", op });
    }
    if !omega_interior(&omega).contains(p) {
        return Err(SupportError::NotInterior(p));
    }
    let anchor = Subset::singleton(n, p);
    debug_assert_eq!(convex_hull(&omega, &anchor), anchor);
    support_extend(&SupportInstance::new(omega, range, f, anchor), options)
}

impl SupportBackend for LinearRange {
    /// Exact LP over the unknown values `g(x) ∈ ℚ^d`, maximizing `Σₓ ⟨φ, g(x)⟩` for a
    /// functional `φ` positive on the cone.
    fn find_support(inst: &SupportInstance<Self>, limits: &Limits) -> Result<SupportSearch<QVec>, SupportError> {
        let range = &inst.range;
        let cone = range.cone();
        require_linear_cone(cone)?;
        let pairing = match_families(&inst.omega, range)?;
        let n = inst.omega.size();
        let d = range.dim();
        let mut cells = 0u64;
        for (_, op) in inst.omega.iter() {
            cells = cells.saturating_add(tuple_count(n, op.arity()).unwrap_or(u64::MAX).saturating_mul(d as u64));
        }
        if cells > limits.max_cells {
            return Err(SupportError::ResourceLimit(format!("{cells} equations needed, limit {}", limits.max_cells)));
        }

        let mut b = LpBuilder::new();
        let first = b.vars(n * d, |i| format!("g({})[{}]", i / d, i % d));
        let var = |x: Element, j: usize| first + x * d + j;
        for x in inst.anchor.iter() {
            for j in 0..d {
                b.fix(var(x, j), inst.f.get(x)[j].clone());
            }
        }
        let all: Vec<Element> = (0..n).collect();
        for ((name, op), &r) in inst.omega.iter().zip(&pairing) {
            let mats = range.matrices(r);
            for args in Tuples::new(&all, op.arity()) {
                let out = op.apply(&args);
                for j in 0..d {
                    let mut terms: Terms = vec![(var(out, j), Rational::one())];
                    for (m, &xi) in mats.iter().zip(&args) {
                        terms.extend((0..d).map(|l| (var(xi, l), -m.get(j, l).clone())));
                    }
                    b.row(&terms, Relation::Eq, Rational::zero(), || {
                        format!("equation {name}{args:?} coordinate {j}")
                    });
                }
            }
        }
        for x in (0..n).filter(|&x| !inst.anchor.contains(x)) {
            let expr: Vec<Terms> = (0..d).map(|j| vec![(var(x, j), Rational::one())]).collect();
            b.cone_slack(cone, &expr, inst.f.get(x), &format!("g({x}) <= f({x})"))?;
        }
        let objective = positive_functional(cone, limits.max_pivots)?.map(|phi| {
            let mut coeffs = vec![Rational::zero(); b.num_vars()];
            for x in 0..n {
                for j in 0..d {
                    coeffs[var(x, j)] = phi[j].clone();
                }
            }
            (Sense::Maximize, coeffs)
        });
        match b.solve(objective, limits.max_pivots)? {
            Outcome::Point(point) => Ok(SupportSearch::Found(FunctionTable::new(
                (0..n).map(|x| point[var(x, 0)..var(x, 0) + d].to_vec()).collect(),
            ))),
            Outcome::Infeasible(active) => Ok(SupportSearch::Infeasible(active)),
        }
    }
}

impl SupportBackend for FiniteRange {
    /// Exhaustive search over tables with `g(x) ≤ f(x)` and `g = f` on the anchor set,
    /// in lexicographic order of `(g(0), g(1), …)`; the first affine table wins.
    fn find_support(inst: &SupportInstance<Self>, limits: &Limits) -> Result<SupportSearch<Element>, SupportError> {
        let poset = inst.range.poset();
        let n = inst.omega.size();
        let candidates: Vec<Vec<Element>> = (0..n)
            .map(|x| {
                let fx = *inst.f.get(x);
                if inst.anchor.contains(x) {
                    vec![fx]
                } else {
                    (0..poset.size()).filter(|&y| poset.leq(y, fx)).collect()
                }
            })
            .collect();
        let total = candidates.iter().try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64));
        match total {
            Some(t) if t <= limits.max_cells => {}
            Some(t) => return Err(SupportError::ResourceLimit(format!("{t} candidate tables, limit {}", limits.max_cells))),
            None => return Err(SupportError::ResourceLimit("candidate count overflows".into())),
        }
        let mut digits = vec![0usize; n];
        loop {
            let g = FunctionTable::new(digits.iter().zip(&candidates).map(|(&i, c)| c[i]).collect());
            if is_affine_map(&g, &inst.omega, &inst.range)?.is_none() {
                return Ok(SupportSearch::Found(g));
            }
            let mut pos = n;
            loop {
                if pos == 0 {
                    return Ok(SupportSearch::Infeasible(vec!["every candidate table fails the affine equation".into()]));
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < candidates[pos].len() {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_modular_linear_family, min_operation, Carrier, Operation};
    use crate::order::FinitePoset;
    use crate::rational::{int, ratio};

    fn average(name: &str) -> LinearRange {
        LinearRange::scalar(vec![(name.into(), vec![ratio(1, 2), ratio(1, 2)])]).unwrap()
    }

    fn table(values: &[i64]) -> FunctionTable<QVec> {
        FunctionTable::new(values.iter().map(|&v| vec![int(v)]).collect())
    }

    fn omega5() -> OperationFamily {
        build_modular_linear_family(5, &[vec![3, 3]], &Limits::default()).unwrap()
    }

    fn min_family(size: usize) -> OperationFamily {
        OperationFamily::new(Carrier::new(size).unwrap()).with("min2", min_operation(size)).unwrap()
    }

    #[test]
    fn modular_midpoint_support_is_constant() {
        let inst = SupportInstance::new(omega5(), average("lin0"), table(&[4, 4, 4, 4, 4]), Subset::singleton(5, 2));
        let cert = support_extend(&inst, &SupportOptions::default()).unwrap();
        assert_eq!(cert.g, table(&[4, 4, 4, 4, 4]));
    }

    #[test]
    fn min_chain_support_is_constant() {
        let inst = SupportInstance::new(min_family(4), average("min2"), table(&[1, 2, 2, 5]), Subset::singleton(4, 0));
        let cert = support_extend(&inst, &SupportOptions::default()).unwrap();
        assert_eq!(cert.g, table(&[1, 1, 1, 1]));
        assert!(cert.checks.passed());
    }

    #[test]
    fn full_anchor_returns_f() {
        let f = table(&[3, 3, 3, 3]);
        let inst = SupportInstance::new(min_family(4), average("min2"), f.clone(), Subset::full(4));
        assert_eq!(support_extend(&inst, &SupportOptions::default()).unwrap().g, f);
    }

    #[test]
    fn hypothesis_failures_are_named() {
        let inst = SupportInstance::new(min_family(4), average("min2"), table(&[1, 2, 2, 5]), Subset::singleton(4, 1));
        let err = support_extend(&inst, &SupportOptions::default()).unwrap_err();
        assert!(matches!(err, SupportError::HypothesisFailure { name: Hypothesis::AnchorExtremeHull, .. }));
        let inst = SupportInstance::new(min_family(4), average("min2"), table(&[5, 1, 1, 1]), Subset::singleton(4, 0));
        let err = support_extend(&inst, &SupportOptions::default()).unwrap_err();
        assert!(matches!(err, SupportError::HypothesisFailure { name: Hypothesis::FConvex, .. }));
    }

    #[test]
    fn override_exposes_infeasibility() {
        let inst = SupportInstance::new(min_family(4), average("min2"), table(&[5, 1, 1, 1]), Subset::singleton(4, 0));
        let options = SupportOptions { override_preconditions: true, ..SupportOptions::default() };
        assert!(matches!(support_extend(&inst, &options), Err(SupportError::Infeasible { .. })));
    }

    #[test]
    fn support_at_interior_points() {
        let cert = support_at_point(min_family(4), average("min2"), table(&[2, 3, 3, 4]), 0, &SupportOptions::default()).unwrap();
        assert_eq!(cert.g, table(&[2, 2, 2, 2]));
        let err = support_at_point(min_family(4), average("min2"), table(&[2, 3, 3, 4]), 1, &SupportOptions::default());
        assert_eq!(err, Err(SupportError::NotInterior(1)));
        let cert = support_at_point(omega5(), average("lin0"), table(&[7, 7, 7, 7, 7]), 3, &SupportOptions::default()).unwrap();
        assert_eq!(cert.g, table(&[7, 7, 7, 7, 7]));
        let plus = LinearRange::scalar(vec![("lin0".into(), vec![int(1), int(1)])]).unwrap();
        let err = support_at_point(omega5(), plus, table(&[0, 0, 0, 0, 0]), 3, &SupportOptions::default());
        assert!(matches!(err, Err(SupportError::NotReflexive { side: "range", .. })));
    }

    #[test]
    fn verifier_lists_failures() {
        let inst = SupportInstance::new(min_family(4), average("min2"), table(&[1, 2, 2, 5]), Subset::singleton(4, 0));
        let checks = verify_support_certificate(&inst, &inst.f).unwrap();
        assert_eq!(checks.failures(), vec!["affine"]);
        let checks = verify_support_certificate(&inst, &table(&[0, 0, 0, 0])).unwrap();
        assert_eq!(checks.failures(), vec!["agrees_on_anchor"]);
    }

    #[test]
    fn finite_backend_search() {
        // ω collapses everything to 0; Ω swaps 2 and 3 in divisibility on {1,2,3,6}.
        let constant = Operation::new(3, 1, vec![0, 0, 0]).unwrap();
        let omega = OperationFamily::new(Carrier::new(3).unwrap()).with("c", constant).unwrap();
        let swap = Operation::new(4, 1, vec![0, 2, 1, 3]).unwrap();
        let range = FiniteRange::new(
            FinitePoset::divisibility(&[1, 2, 3, 6]).unwrap(),
            OperationFamily::new(Carrier::new(4).unwrap()).with("c", swap).unwrap(),
        )
        .unwrap();
        let inst = SupportInstance::new(omega, range, FunctionTable::new(vec![0, 1, 3]), Subset::singleton(3, 0));
        let cert = support_extend(&inst, &SupportOptions::default()).unwrap();
        assert_eq!(cert.g, FunctionTable::new(vec![0, 0, 0]));
    }
}
