//! Additive supports: subadditive maps on finite abelian semigroups and
//! sublinear maps sampled on a cone.
//!
//! Addition is not self-distributive, so these front ends check their own
//! conditions and solve directly instead of going through the full hypothesis list.

use num_traits::Zero;

use crate::algebra::{Element, Operation, OperationFamily};
use crate::convexity::Subset;
use crate::functions::{is_convex_map, FunctionTable, LinearRange};
use crate::lp::{Relation, Sense};
use crate::order::{cone_leq, RationalCone};
use crate::rational::{add, format_rational, int, ratio, scale, QMatrix, QVec, Rational};
use crate::Limits;

use super::builder::{positive_functional, require_linear_cone, LpBuilder, Outcome, Terms};
use super::extend::{solve_and_verify, Hypothesis, SupportCertificate, SupportInstance};
use super::SupportError;

/// Multipliers `t, s` used when sampling `f(tx + sy) ≤ t f(x) + s f(y)`.
pub const DEFAULT_MULTIPLIERS: [(i64, i64); 3] = [(1, 2), (1, 1), (2, 1)];

/// An additive `g : X → ℚ` with `g ≤ f` and `g(p) = f(p)`, for subadditive `f` on a finite abelian semigroup.
///
/// Conditions: `f(np) = n f(p)` for every `n ≥ 1`, and every `x` has `y` and `n` with `x + y = np`.
pub fn subadditive_support(
    addition: &Operation,
    f: &[Rational],
    p: Element,
    limits: &Limits,
) -> Result<SupportCertificate<QVec>, SupportError> {
    let size = addition.size();
    if addition.arity() != 2 {
        return Err(SupportError::InvalidInput("addition must be binary".into()));
    }
    if f.len() != size || p >= size {
        return Err(SupportError::InvalidInput(format!("f needs {size} values and p must be an element")));
    }
    let plus = |a: Element, b: Element| addition.apply(&[a, b]);
    for a in 0..size {
        for b in 0..size {
            if plus(a, b) != plus(b, a) {
                return Err(SupportError::HypothesisFailure {
                    name: Hypothesis::AbelianSemigroup,
                    detail: format!("{a} + {b} != {b} + {a}"),
                });
            }
            for c in 0..size {
                if plus(plus(a, b), c) != plus(a, plus(b, c)) {
                    return Err(SupportError::HypothesisFailure {
                        name: Hypothesis::AbelianSemigroup,
                        detail: format!("addition is not associative at ({a}, {b}, {c})"),
                    });
                }
            }
        }
    }
    let omega = OperationFamily::new(crate::algebra::Carrier::new(size)?).with("add", addition.clone())?;
    let range = LinearRange::scalar(vec![("add".into(), vec![int(1), int(1)])])?;
    let table = FunctionTable::new(f.iter().map(|v| vec![v.clone()]).collect());
    if let Some(w) = is_convex_map(&table, &omega, &range)? {
        return Err(SupportError::NotSubadditive(w.args[0], w.args[1]));
    }

    // multiples[n-1] = np; after size+1 terms the sequence has repeated.
    let mut multiples = vec![p];
    while multiples.len() <= size {
        multiples.push(plus(*multiples.last().expect("nonempty"), p));
    }
    for (i, &np) in multiples.iter().enumerate() {
        let n = int(i as i64 + 1);
        if f[np] != &n * &f[p] {
            return Err(SupportError::ConditionFailure {
                condition: "i",
                detail: format!(
                    "f({n}p) = f({np}) = {} but {n} f(p) = {}",
                    format_rational(&f[np]),
                    format_rational(&(&n * &f[p]))
                ),
            });
        }
    }
    let anchor = Subset::from_elements(size, multiples.iter().copied());
    for x in 0..size {
        if !(0..size).any(|y| anchor.contains(plus(x, y))) {
            return Err(SupportError::ConditionFailure {
                condition: "ii",
                detail: format!("no y gives {x} + y in the multiples of {p}"),
            });
        }
    }
    solve_and_verify(&SupportInstance::new(omega, range, table, anchor), limits, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SublinearChecks {
    pub dominated: bool,
    pub agrees_at_p: bool,
}

/// A linear `g(x) = Gx` with `g ≤_K f` on the sample and `g(p) = f(p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SublinearCertificate {
    pub matrix: QMatrix,
    pub values: Vec<QVec>,
    pub checks: SublinearChecks,
}

/// Sampled sublinear support.
///
/// Sublinearity and `f(tp) = t f(p)` are checked only where `tx + sy` (resp. `tp`) lands in
/// the sample, with `t, s` drawn from `multipliers`.
pub fn sublinear_support(
    sample: &[QVec],
    f: &[QVec],
    cone: &RationalCone,
    p: usize,
    multipliers: &[Rational],
    limits: &Limits,
) -> Result<SublinearCertificate, SupportError> {
    let Some(k) = sample.first().map(Vec::len) else {
        return Err(SupportError::InvalidInput("empty sample".into()));
    };
    let d = cone.ambient_dim();
    if f.len() != sample.len() || p >= sample.len() {
        return Err(SupportError::InvalidInput("f needs one value per sample point and p must index the sample".into()));
    }
    if sample.iter().any(|x| x.len() != k) || f.iter().any(|y| y.len() != d) {
        return Err(SupportError::InvalidInput("inconsistent dimensions".into()));
    }
    require_linear_cone(cone)?;
    let Some(phi) = positive_functional(cone, limits.max_pivots)? else {
        return Err(SupportError::NotSharp);
    };
    let index_of = |z: &QVec| sample.iter().position(|x| x == z);
    for (i, x) in sample.iter().enumerate() {
        for (j, y) in sample.iter().enumerate() {
            for t in multipliers {
                for s in multipliers {
                    if let Some(l) = index_of(&add(&scale(t, x), &scale(s, y))) {
                        if !cone_leq(cone, &f[l], &add(&scale(t, &f[i]), &scale(s, &f[j])))? {
                            return Err(SupportError::NotSublinear {
                                x: i,
                                y: j,
                                t: format_rational(t),
                                s: format_rational(s),
                            });
                        }
                    }
                }
            }
        }
    }
    for t in multipliers {
        if let Some(l) = index_of(&scale(t, &sample[p])) {
            if f[l] != scale(t, &f[p]) {
                return Err(SupportError::ConditionFailure {
                    condition: "i",
                    detail: format!("f({} p) differs from {} f(p)", format_rational(t), format_rational(t)),
                });
            }
        }
    }

    let mut b = LpBuilder::new();
    let first = b.vars(d * k, |i| format!("G[{}][{}]", i / k, i % k));
    let entry = |r: usize, c: usize| first + r * k + c;
    let image = |x: &QVec| -> Vec<Terms> { (0..d).map(|r| (0..k).map(|c| (entry(r, c), x[c].clone())).collect()).collect() };
    for (r, terms) in image(&sample[p]).iter().enumerate() {
        b.row(terms, Relation::Eq, f[p][r].clone(), || format!("g(p) = f(p) coordinate {r}"));
    }
    for (i, x) in sample.iter().enumerate() {
        if i != p {
            b.cone_slack(cone, &image(x), &f[i], &format!("g(x{i}) <= f(x{i})"))?;
        }
    }
    let mut objective = vec![Rational::zero(); b.num_vars()];
    for x in sample {
        for r in 0..d {
            for c in 0..k {
                objective[entry(r, c)] += &phi[r] * &x[c];
            }
        }
    }
    let point = match b.solve(Some((Sense::Maximize, objective)), limits.max_pivots)? {
        Outcome::Point(point) => point,
        Outcome::Infeasible(active) => return Err(SupportError::Infeasible { active }),
    };
    let matrix = QMatrix::from_rows((0..d).map(|r| point[entry(r, 0)..entry(r, 0) + k].to_vec()).collect())
        .expect("rectangular");
    let values: Vec<QVec> = sample.iter().map(|x| matrix.mul_vec(x)).collect();
    let mut dominated = true;
    for (v, fx) in values.iter().zip(f) {
        dominated &= cone_leq(cone, v, fx)?;
    }
    let checks = SublinearChecks { dominated, agrees_at_p: values[p] == f[p] };
    if !(checks.dominated && checks.agrees_at_p) {
        return Err(SupportError::Internal("sublinear certificate fails verification"));
    }
    Ok(SublinearCertificate { matrix, values, checks })
}

/// The default multiplier list as rationals.
pub fn default_multipliers() -> Vec<Rational> {
    DEFAULT_MULTIPLIERS.iter().map(|&(n, d)| ratio(n, d)).collect()
}
