//! Additive-map instances on rational polytopes and the dyadic chain
//! certifying that relative interior points are ω-interior.

use num_bigint::BigInt;
use num_traits::One;

use crate::algebra::{Carrier, Operation, OperationFamily, Tuples};
use crate::convexity::Subset;
use crate::functions::{FunctionTable, LinearRange};
use crate::lp::{LinearProgram, Optimum, Relation, Sense, Solver};
use crate::order::{is_cone_automorphism, RationalCone};
use crate::rational::{add, dot, scale, solve_square, sub, unit, zeros, QMatrix, QVec, Rational};
use crate::Limits;

use super::extend::SupportInstance;
use super::SupportError;

pub const DEFAULT_N_MAX: u32 = 64;

/// `{x ∈ ℚ^d : h·x ≤ c for every row (h, c)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    dim: usize,
    rows: Vec<(QVec, Rational)>,
}

impl Polytope {
    pub fn new(dim: usize, rows: Vec<(QVec, Rational)>) -> Result<Self, SupportError> {
        if dim == 0 {
            return Err(SupportError::InvalidInput("polytope dimension must be positive".into()));
        }
        if let Some((h, _)) = rows.iter().find(|(h, _)| h.len() != dim) {
            return Err(SupportError::InvalidInput(format!("halfspace of length {} in dimension {dim}", h.len())));
        }
        Ok(Polytope { dim, rows })
    }

    /// The box `∏ [lo_i, hi_i]`.
    pub fn from_box(lo: &[Rational], hi: &[Rational]) -> Self {
        let dim = lo.len();
        let mut rows = Vec::new();
        for i in 0..dim {
            rows.push((unit(dim, i), hi[i].clone()));
            rows.push((scale(&-Rational::one(), &unit(dim, i)), -lo[i].clone()));
        }
        Polytope { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[(QVec, Rational)] {
        &self.rows
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim && self.rows.iter().all(|(h, c)| dot(h, x) <= *c)
    }

    /// Whether every coordinate is bounded above and below on the polytope.
    pub fn is_bounded(&self, limits: &Limits) -> Result<bool, SupportError> {
        let solver = Solver::new(limits.max_pivots);
        for i in 0..self.dim {
            for sign in [1i64, -1] {
                let mut lp = LinearProgram::new(self.dim);
                for (h, c) in &self.rows {
                    lp.add_row(h.clone(), Relation::Le, c.clone())?;
                }
                lp.set_objective(Sense::Maximize, scale(&Rational::from_integer(sign.into()), &unit(self.dim, i)))?;
                match solver.optimize(&lp)? {
                    Optimum::Optimal { .. } | Optimum::Infeasible(_) => {}
                    Optimum::Unbounded { .. } => return Ok(false),
                }
            }
        }
        Ok(true)
    }

    /// Vertices of a bounded polytope, sorted, by solving every `d`-subset of tight rows.
    pub fn vertices(&self, limits: &Limits) -> Result<Vec<QVec>, SupportError> {
        let m = self.rows.len();
        let subsets = binomial(m as u64, self.dim as u64);
        if subsets.is_none_or(|s| s > limits.max_cells) {
            return Err(SupportError::ResourceLimit(format!("vertex enumeration over {m} halfspaces")));
        }
        let index: Vec<usize> = (0..m).collect();
        let mut out: Vec<QVec> = Vec::new();
        for combo in Combinations::new(&index, self.dim) {
            let a: Vec<QVec> = combo.iter().map(|&i| self.rows[i].0.clone()).collect();
            let b: QVec = combo.iter().map(|&i| self.rows[i].1.clone()).collect();
            if let Some(x) = solve_square(&a, &b) {
                if self.contains(&x) {
                    out.push(x);
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Increasing `k`-subsets of a slice, lexicographically.
struct Combinations<'a> {
    items: &'a [usize],
    idx: Vec<usize>,
    done: bool,
}

impl<'a> Combinations<'a> {
    fn new(items: &'a [usize], k: usize) -> Self {
        Combinations { items, idx: (0..k).collect(), done: k > items.len() }
    }
}

impl Iterator for Combinations<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.iter().map(|&i| self.items[i]).collect();
        let (k, n) = (self.idx.len(), self.items.len());
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Data for the dyadic chain: `ω(u, v) = a(u) + v − a(v)` on a polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiInstance {
    pub polytope: Polytope,
    pub a: QMatrix,
    pub p: QVec,
    pub x: QVec,
    pub n_max: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RiChecks {
    /// Every chain entry lies in the polytope.
    pub memberships: bool,
    /// Even entries are the dyadic points and odd entries their ω-images.
    pub construction: bool,
    /// `x_{2k} = ω(x_{2k+1}, x_{2k−1})` for `k = 0, …, 2^n − 1`.
    pub identities: bool,
    /// `a ∘ (I − a) = (I − a) ∘ a`.
    pub commute: bool,
}

impl RiChecks {
    pub fn passed(&self) -> bool {
        self.memberships && self.construction && self.identities && self.commute
    }
}

/// The chain `x_{−2}, x_{−1}, …, x_{2^{n+1}}`, stored from index `−2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiCertificate {
    pub n: u32,
    pub chain: Vec<QVec>,
    pub checks: RiChecks,
}

fn omega_ri(a: &QMatrix, u: &[Rational], v: &[Rational]) -> QVec {
    add(&a.mul_vec(u), &sub(v, &a.mul_vec(v)))
}

fn dyadic(k: i64, n: u32) -> Rational {
    Rational::new(BigInt::from(k), BigInt::one() << n)
}

/// Finds the least `n ≤ n_max` with `p + 2^{−n}(p − x)` in the polytope and emits the chain.
pub fn ri_certificate(inst: &RiInstance, limits: &Limits) -> Result<RiCertificate, SupportError> {
    let d = inst.polytope.dim();
    if inst.a.rows() != d || inst.a.cols() != d || inst.p.len() != d || inst.x.len() != d {
        return Err(SupportError::InvalidInput(format!("ri data must live in dimension {d}")));
    }
    if !inst.polytope.contains(&inst.p) || !inst.polytope.contains(&inst.x) {
        return Err(SupportError::InvalidInput("p and x must lie in the polytope".into()));
    }
    let step = sub(&inst.p, &inst.x);
    let n = (0..=inst.n_max)
        .find(|&n| inst.polytope.contains(&add(&inst.p, &scale(&dyadic(1, n), &step))))
        .ok_or(SupportError::NotRelativeInterior { n_max: inst.n_max })?;
    let len = 2u64.checked_pow(n + 1).and_then(|v| v.checked_add(3));
    if len.is_none_or(|l| l > limits.max_cells) {
        return Err(SupportError::ResourceLimit(format!("chain for n = {n} exceeds {} entries", limits.max_cells)));
    }
    let top = 1i64 << n;
    let even = |k: i64| add(&scale(&dyadic(k, n), &inst.x), &scale(&(Rational::one() - dyadic(k, n)), &inst.p));
    // chain[i + 2] holds x_i.
    let mut chain: Vec<QVec> = Vec::with_capacity(len.expect("checked") as usize);
    chain.push(even(-1));
    for k in 0..=top {
        let odd = omega_ri(&inst.a, chain.last().expect("nonempty"), &even(k));
        chain.push(odd);
        chain.push(even(k));
    }
    let checks = verify_ri_chain(inst, n, &chain);
    Ok(RiCertificate { n, chain, checks })
}

/// Re-checks a chain produced for `inst` at level `n`.
pub fn verify_ri_chain(inst: &RiInstance, n: u32, chain: &[QVec]) -> RiChecks {
    let top = 1i64 << n;
    let at = |i: i64| &chain[(i + 2) as usize];
    let expected_len = (2 * top + 3) as usize;
    if chain.len() != expected_len {
        return RiChecks { memberships: false, construction: false, identities: false, commute: false };
    }
    let memberships = chain.iter().all(|v| inst.polytope.contains(v));
    let even_ok = (-1..=top).all(|k| {
        *at(2 * k) == add(&scale(&dyadic(k, n), &inst.x), &scale(&(Rational::one() - dyadic(k, n)), &inst.p))
    });
    let odd_ok = (0..=top).all(|k| *at(2 * k - 1) == omega_ri(&inst.a, at(2 * k - 2), at(2 * k)));
    let identities = (0..top).all(|k| *at(2 * k) == omega_ri(&inst.a, at(2 * k + 1), at(2 * k - 1)));
    let b = QMatrix::identity(inst.a.rows()).sub(&inst.a);
    let commute = inst.a.mul(&b) == b.mul(&inst.a);
    RiChecks { memberships, construction: even_ok && odd_ok, identities, commute }
}

/// A verified additive-map instance on a polytope, with a finite grid of sample points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mt2Instance {
    pub a_maps: Vec<QMatrix>,
    pub range_maps: Vec<QMatrix>,
    pub cone: RationalCone,
    pub polytope: Polytope,
    pub vertices: Vec<QVec>,
    pub grid: Vec<QVec>,
    /// Whether `Σ aᵢ(gᵢ)` stays in the grid for all grid tuples.
    pub grid_closed: bool,
    pub p: QVec,
    /// One chain per polytope vertex, for `ω*(x, y) = a₁(x) + (I − a₁)(y)`.
    pub interior: Vec<RiCertificate>,
}

impl Mt2Instance {
    /// The grid as a finite carrier with `ω₁(x̄) = Σ aᵢ(xᵢ)`; needs a closed grid.
    pub fn support_instance(
        &self,
        f: Vec<QVec>,
        anchor: Subset,
        limits: &Limits,
    ) -> Result<SupportInstance<LinearRange>, SupportError> {
        if !self.grid_closed {
            return Err(SupportError::InvalidInput("grid is not closed under the combination".into()));
        }
        let size = self.grid.len();
        let arity = self.a_maps.len();
        let a = &self.a_maps;
        let grid = &self.grid;
        let op = Operation::from_fn(size, arity, limits, |args| {
            let v = args.iter().zip(a).fold(zeros(grid[0].len()), |acc, (&i, m)| add(&acc, &m.mul_vec(&grid[i])));
            grid.iter().position(|g| *g == v).expect("closed grid")
        })?;
        let omega = OperationFamily::new(Carrier::new(size)?).with("omega1", op)?;
        let range = LinearRange::new(self.cone.clone(), vec![("omega1".into(), self.range_maps.clone())])?;
        Ok(SupportInstance::new(omega, range, FunctionTable::new(f), anchor))
    }
}

fn matrix_sum(ms: &[QMatrix], dim: usize) -> QMatrix {
    ms.iter().fold(QMatrix::zeros(dim, dim), |acc, m| acc.add(m))
}

fn first_noncommuting(ms: &[QMatrix]) -> Option<(usize, usize)> {
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            if ms[i].mul(&ms[j]) != ms[j].mul(&ms[i]) {
                return Some((i + 1, j + 1));
            }
        }
    }
    None
}

/// Checks conditions (i)–(iv) and certifies interiority of `p` (default: the vertex centroid).
pub fn mt2_compile(
    a_maps: &[QMatrix],
    range_maps: &[QMatrix],
    cone: &RationalCone,
    polytope: &Polytope,
    grid: &[QVec],
    p: Option<QVec>,
    n_max: u32,
    limits: &Limits,
) -> Result<Mt2Instance, SupportError> {
    let n = a_maps.len();
    let d = polytope.dim();
    let e = cone.ambient_dim();
    if n < 2 || range_maps.len() != n {
        return Err(SupportError::InvalidInput("need n ≥ 2 maps on each side".into()));
    }
    if a_maps.iter().any(|m| m.rows() != d || m.cols() != d) {
        return Err(SupportError::InvalidInput(format!("domain maps must be {d}×{d}")));
    }
    if range_maps.iter().any(|m| m.rows() != e || m.cols() != e) {
        return Err(SupportError::InvalidInput(format!("range maps must be {e}×{e}")));
    }
    if let Some(g) = grid.iter().find(|g| !polytope.contains(g)) {
        return Err(SupportError::InvalidInput(format!("grid point {g:?} lies outside the polytope")));
    }

    for (side, ms) in [("a", a_maps), ("A", range_maps)] {
        if let Some((i, j)) = first_noncommuting(ms) {
            return Err(SupportError::ConditionFailure {
                condition: "i",
                detail: format!("{side}_{i} and {side}_{j} do not commute"),
            });
        }
    }
    if matrix_sum(a_maps, d) != QMatrix::identity(d) {
        return Err(SupportError::ConditionFailure { condition: "ii", detail: "a_1 + … + a_n is not the identity".into() });
    }
    if matrix_sum(range_maps, e) != QMatrix::identity(e) {
        return Err(SupportError::ConditionFailure { condition: "ii", detail: "A_1 + … + A_n is not the identity".into() });
    }
    if !polytope.is_bounded(limits)? {
        return Err(SupportError::InvalidInput("polytope is unbounded".into()));
    }
    let vertices = polytope.vertices(limits)?;
    if vertices.is_empty() {
        return Err(SupportError::InvalidInput("polytope is empty".into()));
    }
    let vidx: Vec<usize> = (0..vertices.len()).collect();
    let tuples = crate::algebra::tuple_count(vertices.len(), n);
    if tuples.is_none_or(|t| t > limits.max_cells) {
        return Err(SupportError::ResourceLimit("too many vertex tuples".into()));
    }
    for combo in Tuples::new(&vidx, n) {
        let v = combo.iter().zip(a_maps).fold(zeros(d), |acc, (&i, m)| add(&acc, &m.mul_vec(&vertices[i])));
        if !polytope.contains(&v) {
            return Err(SupportError::ConditionFailure {
                condition: "iii",
                detail: format!("combination of vertices {combo:?} leaves the set"),
            });
        }
    }
    for (i, m) in range_maps.iter().enumerate() {
        if m.inverse().is_none() {
            return Err(SupportError::ConditionFailure { condition: "iv", detail: format!("A_{} is singular", i + 1) });
        }
        if !is_cone_automorphism(cone, m)? {
            return Err(SupportError::ConditionFailure { condition: "iv", detail: format!("A_{}(S) != S", i + 1) });
        }
    }

    let p = match p {
        Some(p) => p,
        None => {
            let count = Rational::from_integer(BigInt::from(vertices.len()));
            scale(&(Rational::one() / count), &vertices.iter().fold(zeros(d), |acc, v| add(&acc, v)))
        }
    };
    if !polytope.contains(&p) {
        return Err(SupportError::InvalidInput("p lies outside the polytope".into()));
    }
    let mut interior = Vec::new();
    for v in &vertices {
        let inst = RiInstance { polytope: polytope.clone(), a: a_maps[0].clone(), p: p.clone(), x: v.clone(), n_max };
        interior.push(ri_certificate(&inst, limits)?);
    }

    let gidx: Vec<usize> = (0..grid.len()).collect();
    let grid_tuples = crate::algebra::tuple_count(grid.len(), n);
    if grid_tuples.is_none_or(|t| t > limits.max_cells) {
        return Err(SupportError::ResourceLimit("too many grid tuples".into()));
    }
    let grid_closed = Tuples::new(&gidx, n).all(|combo| {
        let v = combo.iter().zip(a_maps).fold(zeros(d), |acc, (&i, m)| add(&acc, &m.mul_vec(&grid[i])));
        grid.contains(&v)
    });

    Ok(Mt2Instance {
        a_maps: a_maps.to_vec(),
        range_maps: range_maps.to_vec(),
        cone: cone.clone(),
        polytope: polytope.clone(),
        vertices,
        grid: grid.to_vec(),
        grid_closed,
        p,
        interior,
    })
}
