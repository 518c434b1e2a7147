//! Delta (s,t)-convex maps on a finite sample: a map `F` controlled by `f` gets
//! an (s,t)-affine pair `(A, a)` with `‖F − A‖ ≤ f − a` and equality of both at `p`.

use num_traits::{One, Signed, Zero};

use crate::lp::{Relation, Sense};
use crate::order::Norm;
use crate::rational::{add, scale, sub, QVec, Rational};
use crate::Limits;

use super::builder::{LpBuilder, Outcome, Terms};
use super::SupportError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaInstance {
    pub sample: Vec<QVec>,
    pub s: Rational,
    pub t: Rational,
    /// `F`, one vector in `ℚ^m` per sample point.
    pub big_f: Vec<QVec>,
    /// The control function `f`.
    pub f: Vec<Rational>,
    /// Index of the anchor point in the sample.
    pub p: usize,
    pub norm: Norm,
}

impl DeltaInstance {
    pub fn validate(&self) -> Result<(), SupportError> {
        let unit_open = |r: &Rational| r.is_positive() && *r < Rational::one();
        if !unit_open(&self.s) || !unit_open(&self.t) {
            return Err(SupportError::InvalidInput("s and t must lie strictly between 0 and 1".into()));
        }
        let n = self.sample.len();
        if n == 0 || self.big_f.len() != n || self.f.len() != n || self.p >= n {
            return Err(SupportError::InvalidInput("sample, F and f must have equal nonzero length and p must index the sample".into()));
        }
        let k = self.sample[0].len();
        let m = self.big_f[0].len();
        if self.sample.iter().any(|x| x.len() != k) || self.big_f.iter().any(|y| y.len() != m) {
            return Err(SupportError::InvalidInput("inconsistent dimensions".into()));
        }
        for i in 0..n {
            if self.sample[i + 1..].contains(&self.sample[i]) {
                return Err(SupportError::InvalidInput(format!("sample point {i} is repeated")));
            }
        }
        Ok(())
    }

    fn index_of(&self, z: &QVec) -> Option<usize> {
        self.sample.iter().position(|x| x == z)
    }

    /// In-sample triples `(i, j, l)` with `s·xᵢ + (1−s)·xⱼ = x_l`, in lexicographic `(i, j)` order.
    pub fn triples(&self) -> Vec<(usize, usize, usize)> {
        let one_minus_s = Rational::one() - &self.s;
        let mut out = Vec::new();
        for (i, x) in self.sample.iter().enumerate() {
            for (j, y) in self.sample.iter().enumerate() {
                if let Some(l) = self.index_of(&add(&scale(&self.s, x), &scale(&one_minus_s, y))) {
                    out.push((i, j, l));
                }
            }
        }
        out
    }
}

/// First in-sample pair violating `‖tF(x) + (1−t)F(y) − F(z)‖ ≤ tf(x) + (1−t)f(y) − f(z)`.
pub fn check_delta_convex(inst: &DeltaInstance) -> Result<Option<(usize, usize)>, SupportError> {
    inst.validate()?;
    let one_minus_t = Rational::one() - &inst.t;
    for (i, j, l) in inst.triples() {
        let mean = add(&scale(&inst.t, &inst.big_f[i]), &scale(&one_minus_t, &inst.big_f[j]));
        let bound = &inst.t * &inst.f[i] + &one_minus_t * &inst.f[j] - &inst.f[l];
        if !inst.norm.at_most(&sub(&mean, &inst.big_f[l]), &bound) {
            return Ok(Some((i, j)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaChecks {
    /// Both tables satisfy the (s,t)-affine equation on every in-sample triple.
    pub affine: bool,
    pub dominated: bool,
    pub anchored: bool,
}

impl DeltaChecks {
    pub fn passed(&self) -> bool {
        self.affine && self.dominated && self.anchored
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaCertificate {
    pub big_a: Vec<QVec>,
    pub a: Vec<Rational>,
    pub checks: DeltaChecks,
}

/// Checks a candidate pair `(A, a)` against the instance, for any norm.
pub fn verify_delta_certificate(inst: &DeltaInstance, big_a: &[QVec], a: &[Rational]) -> Result<DeltaChecks, SupportError> {
    inst.validate()?;
    let n = inst.sample.len();
    let m = inst.big_f[0].len();
    if big_a.len() != n || a.len() != n || big_a.iter().any(|v| v.len() != m) {
        return Err(SupportError::InvalidInput("candidate tables have the wrong shape".into()));
    }
    let one_minus_t = Rational::one() - &inst.t;
    let affine = inst.triples().iter().all(|&(i, j, l)| {
        big_a[l] == add(&scale(&inst.t, &big_a[i]), &scale(&one_minus_t, &big_a[j]))
            && a[l] == &inst.t * &a[i] + &one_minus_t * &a[j]
    });
    let dominated =
        (0..n).all(|x| inst.norm.at_most(&sub(&inst.big_f[x], &big_a[x]), &(&inst.f[x] - &a[x])));
    let anchored = big_a[inst.p] == inst.big_f[inst.p] && a[inst.p] == inst.f[inst.p];
    Ok(DeltaChecks { affine, dominated, anchored })
}

/// Solves for `(A, a)` by LP, maximizing `Σ a(x)`.
///
/// L1 and L∞ are encoded exactly by sign rows; L2 only for scalar `F`, where it coincides with `|·|`.
pub fn delta_support(inst: &DeltaInstance, limits: &Limits) -> Result<DeltaCertificate, SupportError> {
    if let Some((i, j)) = check_delta_convex(inst)? {
        return Err(SupportError::NotDeltaConvex(i, j));
    }
    let n = inst.sample.len();
    let m = inst.big_f[0].len();
    let norm = match (inst.norm, m) {
        (Norm::L2, 1) => Norm::Linf,
        (Norm::L2, _) => return Err(SupportError::UnsupportedNorm(Norm::L2)),
        (other, _) => other,
    };
    let sign_rows: Vec<QVec> = match norm {
        Norm::Linf => (0..m)
            .flat_map(|j| {
                [Rational::one(), -Rational::one()].into_iter().map(move |sg| {
                    let mut v = vec![Rational::zero(); m];
                    v[j] = sg;
                    v
                })
            })
            .collect(),
        _ => {
            if m >= 24 {
                return Err(SupportError::ResourceLimit(format!("2^{m} sign rows")));
            }
            (0..1u64 << m)
                .map(|mask| (0..m).map(|j| if mask & (1 << j) == 0 { Rational::one() } else { -Rational::one() }).collect())
                .collect()
        }
    };
    if (sign_rows.len() as u64).saturating_mul(n as u64) > limits.max_cells {
        return Err(SupportError::ResourceLimit("too many domination rows".into()));
    }

    let mut b = LpBuilder::new();
    let first = b.vars(n * (m + 1), |i| {
        let (x, j) = (i / (m + 1), i % (m + 1));
        if j < m { format!("A({x})[{j}]") } else { format!("a({x})") }
    });
    let big = |x: usize, j: usize| first + x * (m + 1) + j;
    let small = |x: usize| first + x * (m + 1) + m;
    for j in 0..m {
        b.fix(big(inst.p, j), inst.big_f[inst.p][j].clone());
    }
    b.fix(small(inst.p), inst.f[inst.p].clone());
    let one_minus_t = Rational::one() - &inst.t;
    for (i, j, l) in inst.triples() {
        for c in 0..=m {
            let var = |x: usize| if c < m { big(x, c) } else { small(x) };
            let terms: Terms = vec![(var(l), Rational::one()), (var(i), -inst.t.clone()), (var(j), -one_minus_t.clone())];
            b.row(&terms, Relation::Eq, Rational::zero(), || format!("affine at ({i}, {j}) coordinate {c}"));
        }
    }
    for x in 0..n {
        for (r, sigma) in sign_rows.iter().enumerate() {
            // σ·(F − A) ≤ f − a  ⇔  −σ·A + a ≤ f − σ·F
            let mut terms: Terms = (0..m).map(|j| (big(x, j), -sigma[j].clone())).collect();
            terms.push((small(x), Rational::one()));
            let rhs = &inst.f[x] - sigma.iter().zip(&inst.big_f[x]).map(|(s, v)| s * v).sum::<Rational>();
            b.row(&terms, Relation::Le, rhs, || format!("domination at sample point {x}, sign row {r}"));
        }
    }
    let mut objective = vec![Rational::zero(); b.num_vars()];
    for x in 0..n {
        objective[small(x)] = Rational::one();
    }
    let point = match b.solve(Some((Sense::Maximize, objective)), limits.max_pivots)? {
        Outcome::Point(point) => point,
        Outcome::Infeasible(active) => return Err(SupportError::Infeasible { active }),
    };
    let big_a: Vec<QVec> = (0..n).map(|x| (0..m).map(|j| point[big(x, j)].clone()).collect()).collect();
    let a: Vec<Rational> = (0..n).map(|x| point[small(x)].clone()).collect();
    let checks = verify_delta_certificate(inst, &big_a, &a)?;
    if !checks.passed() {
        return Err(SupportError::Internal("delta certificate fails verification"));
    }
    Ok(DeltaCertificate { big_a, a, checks })
}
