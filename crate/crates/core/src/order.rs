//! Finite posets, semigroup-induced orders and exact rational cone orders.
//!
//! Cones live in `ℚ^d`. A polyhedral cone is given by generators; a Lorenz
//! cone `{(x, t) : ε‖x‖ ≤ t}` by `ε`, the dimension of `x`, and the norm. The
//! L1 and L∞ Lorenz cones are polyhedral and are handled through their finite
//! generator and halfspace descriptions; the L2 cone only supports exact
//! membership tests through squared comparisons.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{Element, Operation};
use crate::convexity::Subset;
use crate::lp::{Feasibility, LinearProgram, LpError, Optimum, Relation, Sense, Solver};
use crate::rational::{dot, int, norm_l1, norm_l2_squared, norm_linf, scale, sub, unit, zeros, QMatrix, QVec, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("relation is not a partial order: {0}")]
    NotPartialOrder(String),
    #[error("elements {0} and {1} are incomparable")]
    NotAChain(Element, Element),
    #[error("empty chain")]
    Empty,
    #[error("no supremum exists")]
    NoSupremum,
    #[error("no infimum exists")]
    NoInfimum,
    #[error("addition table is not an abelian group: {0}")]
    NotAGroup(String),
    #[error("the positive set does not contain zero")]
    NotPointed,
    #[error("element {0} and its negation are both positive")]
    NotSalient(String),
    #[error("positive set is not closed under addition: {0} + {1}")]
    NotClosed(String, String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("cone is not sharp")]
    NotSharp,
    #[error("operation not supported for the {0:?} norm here")]
    UnsupportedNorm(Norm),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// A partial order on `{0, …, size-1}`, validated on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    size: usize,
    leq: Vec<bool>,
}

impl FinitePoset {
    pub fn new(size: usize, leq: Vec<bool>) -> Result<Self, OrderError> {
        if size == 0 {
            return Err(OrderError::NotPartialOrder("empty carrier".into()));
        }
        if leq.len() != size * size {
            return Err(OrderError::NotPartialOrder(format!("matrix has {} cells, expected {}", leq.len(), size * size)));
        }
        let p = FinitePoset { size, leq };
        for a in 0..size {
            if !p.leq(a, a) {
                return Err(OrderError::NotPartialOrder(format!("not reflexive at {a}")));
            }
            for b in 0..size {
                if a != b && p.leq(a, b) && p.leq(b, a) {
                    return Err(OrderError::NotPartialOrder(format!("not antisymmetric at ({a}, {b})")));
                }
                for c in 0..size {
                    if p.leq(a, b) && p.leq(b, c) && !p.leq(a, c) {
                        return Err(OrderError::NotPartialOrder(format!("not transitive at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(p)
    }

    pub fn from_fn(size: usize, leq: impl Fn(Element, Element) -> bool) -> Result<Self, OrderError> {
        let cells = (0..size * size).map(|i| leq(i / size, i % size)).collect();
        Self::new(size, cells)
    }

    /// The chain `0 < 1 < ⋯ < size-1`.
    pub fn chain(size: usize) -> Self {
        Self::from_fn(size, |a, b| a <= b).expect("chain is a partial order")
    }

    pub fn antichain(size: usize) -> Self {
        Self::from_fn(size, |a, b| a == b).expect("antichain is a partial order")
    }

    /// Divisibility on the given positive integers; element `i` is `values[i]`.
    pub fn divisibility(values: &[u64]) -> Result<Self, OrderError> {
        Self::from_fn(values.len(), |a, b| values[b].is_multiple_of(values[a]))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leq(&self, a: Element, b: Element) -> bool {
        self.leq[a * self.size + b]
    }

    pub fn comparable(&self, a: Element, b: Element) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    pub fn is_chain(&self, set: &Subset) -> bool {
        let xs = set.to_vec();
        xs.iter().all(|&a| xs.iter().all(|&b| self.comparable(a, b)))
    }

    /// Greatest lower bound of `set`, if one exists.
    pub fn meet(&self, set: &[Element]) -> Option<Element> {
        let lower: Vec<Element> = (0..self.size).filter(|&l| set.iter().all(|&s| self.leq(l, s))).collect();
        lower.iter().copied().find(|&g| lower.iter().all(|&l| self.leq(l, g)))
    }

    /// Least upper bound of `set`, if one exists.
    pub fn join(&self, set: &[Element]) -> Option<Element> {
        let upper: Vec<Element> = (0..self.size).filter(|&u| set.iter().all(|&s| self.leq(s, u))).collect();
        upper.iter().copied().find(|&l| upper.iter().all(|&u| self.leq(l, u)))
    }

    /// The poset transported along a permutation: `perm[a] ≤' perm[b]` iff `a ≤ b`.
    pub fn relabel(&self, perm: &[Element]) -> Result<Self, OrderError> {
        let mut inverse = vec![usize::MAX; self.size];
        for (a, &pa) in perm.iter().enumerate() {
            if pa >= self.size || inverse[pa] != usize::MAX {
                return Err(OrderError::NotPartialOrder("relabeling is not a permutation".into()));
            }
            inverse[pa] = a;
        }
        if perm.len() != self.size {
            return Err(OrderError::NotPartialOrder("relabeling is not a permutation".into()));
        }
        Self::from_fn(self.size, |a, b| self.leq(inverse[a], inverse[b]))
    }
}

/// The least element of a nonempty chain, which is its infimum.
pub fn infimum_of_chain(poset: &FinitePoset, chain: &Subset) -> Result<Element, OrderError> {
    let xs = chain.to_vec();
    if xs.is_empty() {
        return Err(OrderError::Empty);
    }
    for (i, &a) in xs.iter().enumerate() {
        for &b in &xs[i + 1..] {
            if !poset.comparable(a, b) {
                return Err(OrderError::NotAChain(a, b));
            }
        }
    }
    Ok(xs.iter().copied().find(|&a| xs.iter().all(|&b| poset.leq(a, b))).expect("finite chains have a minimum"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainCompleteness {
    pub holds: bool,
    pub reason: &'static str,
}

/// Always holds on a finite poset.
pub fn is_lower_chain_complete(_poset: &FinitePoset) -> ChainCompleteness {
    ChainCompleteness {
        holds: true,
        reason: "every nonempty chain in a finite poset is finite and has a least element, which is its infimum",
    }
}

/// An abelian group given by its addition table, with a positive set `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemigroupOrderSpec {
    pub addition: Operation,
    pub zero: Element,
    pub positive: Subset,
}

/// The order `x ≤ y ⇔ y − x ∈ S`.
pub fn semigroup_order(spec: &SemigroupOrderSpec) -> Result<FinitePoset, OrderError> {
    let add = &spec.addition;
    let n = add.size();
    if add.arity() != 2 {
        return Err(OrderError::NotAGroup("addition must be binary".into()));
    }
    if spec.zero >= n || spec.positive.universe() != n {
        return Err(OrderError::NotAGroup("zero or positive set outside the carrier".into()));
    }
    let plus = |a: Element, b: Element| add.apply(&[a, b]);
    for a in 0..n {
        if plus(a, spec.zero) != a {
            return Err(OrderError::NotAGroup(format!("{} is not an identity for {a}", spec.zero)));
        }
        for b in 0..n {
            if plus(a, b) != plus(b, a) {
                return Err(OrderError::NotAGroup(format!("not commutative at ({a}, {b})")));
            }
            for c in 0..n {
                if plus(plus(a, b), c) != plus(a, plus(b, c)) {
                    return Err(OrderError::NotAGroup(format!("not associative at ({a}, {b}, {c})")));
                }
            }
        }
    }
    let negation: Vec<Element> = (0..n)
        .map(|a| (0..n).find(|&b| plus(a, b) == spec.zero).ok_or_else(|| OrderError::NotAGroup(format!("{a} has no inverse"))))
        .collect::<Result<_, _>>()?;
    let s = &spec.positive;
    if !s.contains(spec.zero) {
        return Err(OrderError::NotPointed);
    }
    for a in s.iter() {
        for b in s.iter() {
            if !s.contains(plus(a, b)) {
                return Err(OrderError::NotClosed(a.to_string(), b.to_string()));
            }
        }
    }
    if let Some(y) = s.iter().find(|&y| y != spec.zero && s.contains(negation[y])) {
        return Err(OrderError::NotSalient(y.to_string()));
    }
    FinitePoset::from_fn(n, |x, y| s.contains(plus(y, negation[x])))
}

/// The order `values[i] ≤ values[j] ⇔ values[j] − values[i] ∈ S` on a finite window of ℤ.
///
/// Pointedness, salience and closure of `S` are checked on the differences
/// that occur inside the window.
pub fn integer_window_order(values: &[i64], positive: impl Fn(i64) -> bool) -> Result<FinitePoset, OrderError> {
    if !positive(0) {
        return Err(OrderError::NotPointed);
    }
    let mut diffs: Vec<i64> = values.iter().flat_map(|a| values.iter().map(move |b| b - a)).collect();
    diffs.sort_unstable();
    diffs.dedup();
    for &d in &diffs {
        if d != 0 && positive(d) && positive(-d) {
            return Err(OrderError::NotSalient(d.to_string()));
        }
    }
    for &a in diffs.iter().filter(|&&d| positive(d)) {
        for &b in diffs.iter().filter(|&&d| positive(d)) {
            if !positive(a + b) {
                return Err(OrderError::NotClosed(a.to_string(), b.to_string()));
            }
        }
    }
    FinitePoset::from_fn(values.len(), |i, j| positive(values[j] - values[i]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    L1,
    Linf,
    L2,
}

impl Norm {
    pub fn dual(self) -> Norm {
        match self {
            Norm::L1 => Norm::Linf,
            Norm::Linf => Norm::L1,
            Norm::L2 => Norm::L2,
        }
    }

    /// Exact value for L1/L∞; `None` for L2.
    pub fn eval(self, v: &[Rational]) -> Option<Rational> {
        match self {
            Norm::L1 => Some(norm_l1(v)),
            Norm::Linf => Some(norm_linf(v)),
            Norm::L2 => None,
        }
    }

    /// Decides `‖v‖ ≤ bound` exactly; L2 via squares.
    pub fn at_most(self, v: &[Rational], bound: &Rational) -> bool {
        match self.eval(v) {
            Some(n) => n <= *bound,
            None => !bound.is_negative() && norm_l2_squared(v) <= bound * bound,
        }
    }
}

/// A closed convex cone in `ℚ^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalCone {
    Polyhedral { dim: usize, generators: Vec<QVec> },
    /// `{(x, t) ∈ ℚ^dim × ℚ : ε‖x‖ ≤ t}`; the ambient dimension is `dim + 1`.
    Lorenz { epsilon: Rational, dim: usize, norm: Norm },
}

impl RationalCone {
    pub fn polyhedral(dim: usize, generators: Vec<QVec>) -> Result<Self, OrderError> {
        if dim == 0 {
            return Err(OrderError::InvalidCone("dimension must be positive".into()));
        }
        for g in &generators {
            if g.len() != dim {
                return Err(OrderError::DimensionMismatch { expected: dim, found: g.len() });
            }
            if g.iter().all(Zero::is_zero) {
                return Err(OrderError::InvalidCone("zero generator".into()));
            }
        }
        Ok(RationalCone::Polyhedral { dim, generators })
    }

    pub fn orthant(dim: usize) -> Self {
        RationalCone::Polyhedral { dim, generators: (0..dim).map(|i| unit(dim, i)).collect() }
    }

    pub fn lorenz(epsilon: Rational, dim: usize, norm: Norm) -> Result<Self, OrderError> {
        if dim == 0 {
            return Err(OrderError::InvalidCone("dimension must be positive".into()));
        }
        if !epsilon.is_positive() {
            return Err(OrderError::InvalidCone("epsilon must be positive".into()));
        }
        Ok(RationalCone::Lorenz { epsilon, dim, norm })
    }

    /// Dimension of the space the cone lives in.
    pub fn ambient_dim(&self) -> usize {
        match self {
            RationalCone::Polyhedral { dim, .. } => *dim,
            RationalCone::Lorenz { dim, .. } => dim + 1,
        }
    }

    /// A finite generating set, when the cone is polyhedral.
    pub fn generators(&self) -> Option<Vec<QVec>> {
        match self {
            RationalCone::Polyhedral { generators, .. } => Some(generators.clone()),
            RationalCone::Lorenz { epsilon, dim, norm } => {
                let inv = Rational::one() / epsilon;
                let d = *dim;
                let mut out = Vec::new();
                match norm {
                    Norm::L1 => {
                        for i in 0..d {
                            for sign in [1, -1] {
                                let mut g = zeros(d + 1);
                                g[i] = &inv * int(sign);
                                g[d] = Rational::one();
                                out.push(g);
                            }
                        }
                    }
                    Norm::Linf => {
                        for mask in 0..(1u64 << d) {
                            let mut g: QVec =
                                (0..d).map(|i| if mask & (1 << i) == 0 { inv.clone() } else { -inv.clone() }).collect();
                            g.push(Rational::one());
                            out.push(g);
                        }
                    }
                    Norm::L2 => return None,
                }
                Some(out)
            }
        }
    }

    /// Rows `h` with `K = {y : h·y ≥ 0 for all h}` for the L1/L∞ Lorenz cones.
    pub fn lorenz_halfspaces(&self) -> Option<Vec<QVec>> {
        let RationalCone::Lorenz { epsilon, dim, norm } = self else { return None };
        let d = *dim;
        let mut rows = Vec::new();
        match norm {
            Norm::Linf => {
                for i in 0..d {
                    for sign in [1, -1] {
                        let mut h = zeros(d + 1);
                        h[i] = -(epsilon * int(sign));
                        h[d] = Rational::one();
                        rows.push(h);
                    }
                }
            }
            Norm::L1 => {
                for mask in 0..(1u64 << d) {
                    let mut h: QVec =
                        (0..d).map(|i| if mask & (1 << i) == 0 { -epsilon.clone() } else { epsilon.clone() }).collect();
                    h.push(Rational::one());
                    rows.push(h);
                }
            }
            Norm::L2 => return None,
        }
        Some(rows)
    }

    /// `true` when the generators are positive multiples of distinct unit vectors covering every axis.
    pub fn is_positive_orthant(&self) -> bool {
        let RationalCone::Polyhedral { dim, generators } = self else { return false };
        let mut seen = vec![false; *dim];
        for g in generators {
            let nz: Vec<usize> = (0..*dim).filter(|&i| !g[i].is_zero()).collect();
            if nz.len() != 1 || !g[nz[0]].is_positive() {
                return false;
            }
            seen[nz[0]] = true;
        }
        seen.iter().all(|&s| s)
    }

    fn check_dim(&self, v: &[Rational]) -> Result<(), OrderError> {
        let expected = self.ambient_dim();
        if v.len() != expected {
            return Err(OrderError::DimensionMismatch { expected, found: v.len() });
        }
        Ok(())
    }

    /// Exact membership test.
    pub fn contains(&self, y: &[Rational]) -> Result<bool, OrderError> {
        self.check_dim(y)?;
        match self {
            RationalCone::Lorenz { .. } => {
                let d = y.len() - 1;
                lorenz_member(self, &y[..d], &y[d])
            }
            RationalCone::Polyhedral { .. } if self.is_positive_orthant() => Ok(y.iter().all(|v| !v.is_negative())),
            RationalCone::Polyhedral { dim, generators } => {
                if y.iter().all(Zero::is_zero) {
                    return Ok(true);
                }
                let k = generators.len();
                let mut lp = LinearProgram::new(k);
                for v in 0..k {
                    lp.set_nonnegative(v);
                }
                for (i, target) in y.iter().enumerate().take(*dim) {
                    let row: QVec = generators.iter().map(|g| g[i].clone()).collect();
                    lp.add_row(row, Relation::Eq, target.clone())?;
                }
                Ok(matches!(Solver::default().feasible(&lp)?, Feasibility::Point(_)))
            }
        }
    }
}

/// The dual cone `K° = {φ : φ(y) ≥ 0 for all y ∈ K}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualCone {
    /// `{φ : h·φ ≥ 0 for each row h}`.
    Halfspaces { dim: usize, rows: Vec<QVec> },
    /// `{(φ, c) : ‖φ‖_* ≤ ε·c}`.
    Lorenz { epsilon: Rational, dim: usize, primal_norm: Norm },
}

impl DualCone {
    pub fn contains(&self, phi: &[Rational]) -> Result<bool, OrderError> {
        match self {
            DualCone::Halfspaces { dim, rows } => {
                if phi.len() != *dim {
                    return Err(OrderError::DimensionMismatch { expected: *dim, found: phi.len() });
                }
                Ok(rows.iter().all(|h| !dot(h, phi).is_negative()))
            }
            DualCone::Lorenz { epsilon, dim, primal_norm } => {
                let cone = RationalCone::Lorenz { epsilon: epsilon.clone(), dim: *dim, norm: *primal_norm };
                if phi.len() != dim + 1 {
                    return Err(OrderError::DimensionMismatch { expected: dim + 1, found: phi.len() });
                }
                lorenz_dual_member(&cone, &phi[..*dim], &phi[*dim])
            }
        }
    }
}

pub fn dual_cone(cone: &RationalCone) -> DualCone {
    match cone {
        RationalCone::Polyhedral { dim, generators } => DualCone::Halfspaces { dim: *dim, rows: generators.clone() },
        RationalCone::Lorenz { epsilon, dim, norm } => {
            DualCone::Lorenz { epsilon: epsilon.clone(), dim: *dim, primal_norm: *norm }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sharpness {
    /// `φ` with `⟨φ, g⟩ ≥ 1` on every generator (or `φ = (0,…,0,1)` for a Lorenz cone).
    Sharp { phi: QVec },
    /// Nonnegative, nonzero weights with `Σ λᵢ gᵢ = 0`.
    NotSharp { weights: QVec },
}

pub fn is_sharp(cone: &RationalCone) -> Result<Sharpness, OrderError> {
    is_sharp_with(cone, &Solver::default())
}

pub fn is_sharp_with(cone: &RationalCone, solver: &Solver) -> Result<Sharpness, OrderError> {
    match cone {
        RationalCone::Lorenz { dim, .. } => Ok(Sharpness::Sharp { phi: unit(dim + 1, *dim) }),
        RationalCone::Polyhedral { dim, generators } => {
            let mut lp = LinearProgram::new(*dim);
            for g in generators {
                lp.add_row(g.clone(), Relation::Ge, Rational::one())?;
            }
            match solver.feasible(&lp)? {
                Feasibility::Point(phi) => Ok(Sharpness::Sharp { phi }),
                Feasibility::Infeasible(cert) => Ok(Sharpness::NotSharp { weights: cert.row_multipliers }),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Salience {
    Salient,
    /// A nonzero `y` with both `y` and `−y` in the cone.
    Line { y: QVec },
}

pub fn is_salient_cone(cone: &RationalCone) -> Result<Salience, OrderError> {
    let Some(generators) = cone.generators() else {
        // The L2 Lorenz cone meets its negation only at the apex.
        return Ok(Salience::Salient);
    };
    let dim = cone.ambient_dim();
    let k = generators.len();
    if k == 0 {
        return Ok(Salience::Salient);
    }
    let mut lp = LinearProgram::new(k);
    for v in 0..k {
        lp.set_nonnegative(v);
    }
    for i in 0..dim {
        lp.add_row(generators.iter().map(|g| g[i].clone()).collect(), Relation::Eq, Rational::zero())?;
    }
    lp.add_row(vec![Rational::one(); k], Relation::Eq, Rational::one())?;
    match Solver::default().feasible(&lp)? {
        Feasibility::Infeasible(_) => Ok(Salience::Salient),
        Feasibility::Point(weights) => {
            let j = weights.iter().position(Signed::is_positive).expect("weights sum to one");
            Ok(Salience::Line { y: generators[j].clone() })
        }
    }
}

/// `φ` and `scale` with `‖y‖ ≤ scale·⟨φ, y⟩` on the cone, `φ` of unit dual norm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControllabilityCertificate {
    pub phi: QVec,
    pub scale: Rational,
    pub norm: Norm,
}

impl ControllabilityCertificate {
    pub fn bound_holds(&self, y: &[Rational]) -> bool {
        let bound = &self.scale * dot(&self.phi, y);
        self.norm.at_most(y, &bound)
    }
}

/// Finds the functional by minimizing `‖ψ‖_*` subject to `⟨ψ, g⟩ ≥ ‖g‖` on every generator,
/// then returns `φ = ψ/‖ψ‖_*` and `scale = ‖ψ‖_*`.
pub fn controllability_functional(cone: &RationalCone, norm: Norm) -> Result<ControllabilityCertificate, OrderError> {
    if norm == Norm::L2 {
        return Err(OrderError::UnsupportedNorm(norm));
    }
    let generators = match cone {
        RationalCone::Lorenz { norm: Norm::L2, .. } => return Err(OrderError::UnsupportedNorm(Norm::L2)),
        _ => cone.generators().expect("polyhedral"),
    };
    let d = cone.ambient_dim();
    // Variables: ψ (d, free) followed by the dual-norm epigraph variables.
    let aux = match norm.dual() {
        Norm::Linf => 1,
        _ => d,
    };
    let mut lp = LinearProgram::new(d + aux);
    for g in &generators {
        let mut row = g.clone();
        row.extend(zeros(aux));
        lp.add_row(row, Relation::Ge, norm.eval(g).expect("polyhedral norm"))?;
    }
    for i in 0..d {
        let t = if aux == 1 { d } else { d + i };
        lp.add_sparse_row(&[(i, Rational::one()), (t, -Rational::one())], Relation::Le, Rational::zero());
        lp.add_sparse_row(&[(i, Rational::one()), (t, Rational::one())], Relation::Ge, Rational::zero());
    }
    let mut objective = zeros(d);
    objective.extend(vec![Rational::one(); aux]);
    lp.set_objective(Sense::Minimize, objective)?;
    let (psi, size) = match Solver::default().optimize(&lp)? {
        Optimum::Optimal { point, value } => (point[..d].to_vec(), value),
        Optimum::Infeasible(_) => return Err(OrderError::NotSharp),
        Optimum::Unbounded { .. } => return Err(OrderError::Lp(LpError::Internal("dual norm unbounded below"))),
    };
    if size.is_zero() {
        // Only the trivial cone {0} admits ψ = 0.
        return Ok(ControllabilityCertificate { phi: zeros(d), scale: Rational::one(), norm });
    }
    let cert = ControllabilityCertificate { phi: scale(&(Rational::one() / &size), &psi), scale: size, norm };
    if !generators.iter().all(|g| cert.bound_holds(g)) {
        return Err(OrderError::Lp(LpError::Internal("controllability certificate fails on a generator")));
    }
    Ok(cert)
}

/// `ε‖x‖ ≤ t`, exactly.
pub fn lorenz_member(cone: &RationalCone, x: &[Rational], t: &Rational) -> Result<bool, OrderError> {
    let RationalCone::Lorenz { epsilon, dim, norm } = cone else {
        return Err(OrderError::InvalidCone("not a Lorenz cone".into()));
    };
    if x.len() != *dim {
        return Err(OrderError::DimensionMismatch { expected: *dim, found: x.len() });
    }
    Ok(norm.at_most(&scale(epsilon, x), t))
}

/// `‖φ‖_* ≤ ε·c` for the dual norm of the cone's norm.
pub fn lorenz_dual_member(cone: &RationalCone, phi: &[Rational], c: &Rational) -> Result<bool, OrderError> {
    let RationalCone::Lorenz { epsilon, dim, norm } = cone else {
        return Err(OrderError::InvalidCone("not a Lorenz cone".into()));
    };
    if phi.len() != *dim {
        return Err(OrderError::DimensionMismatch { expected: *dim, found: phi.len() });
    }
    Ok(norm.dual().at_most(phi, &(epsilon * c)))
}

/// `y ≤_K z ⇔ z − y ∈ K`.
pub fn cone_leq(cone: &RationalCone, y: &[Rational], z: &[Rational]) -> Result<bool, OrderError> {
    cone.check_dim(y)?;
    cone.check_dim(z)?;
    cone.contains(&sub(z, y))
}

/// Membership in the bidual `(K°)°`, decided from the halfspace description of `K°`.
pub fn bidual_member(cone: &RationalCone, y: &[Rational]) -> Result<bool, OrderError> {
    cone.check_dim(y)?;
    match dual_cone(cone) {
        DualCone::Halfspaces { dim, rows } => {
            let mut lp = LinearProgram::new(dim);
            for h in rows {
                lp.add_row(h, Relation::Ge, Rational::zero())?;
            }
            lp.set_objective(Sense::Minimize, y.to_vec())?;
            match Solver::default().optimize(&lp)? {
                Optimum::Optimal { value, .. } => Ok(!value.is_negative()),
                Optimum::Unbounded { .. } => Ok(false),
                Optimum::Infeasible(_) => Err(OrderError::Lp(LpError::Internal("dual cone cannot be empty"))),
            }
        }
        DualCone::Lorenz { .. } => cone.contains(y),
    }
}

/// Whether the linear map `a` is invertible and maps the cone onto itself.
pub fn is_cone_automorphism(cone: &RationalCone, a: &QMatrix) -> Result<bool, OrderError> {
    let d = cone.ambient_dim();
    if a.rows() != d || a.cols() != d {
        return Err(OrderError::DimensionMismatch { expected: d, found: a.rows() });
    }
    let Some(inv) = a.inverse() else { return Ok(false) };
    Ok(maps_into(cone, a)? && maps_into(cone, &inv)?)
}

/// Whether `a(K) ⊆ K`.
pub fn maps_into(cone: &RationalCone, a: &QMatrix) -> Result<bool, OrderError> {
    match cone.generators() {
        Some(gens) => {
            for g in gens {
                if !cone.contains(&a.mul_vec(&g))? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        None => {
            // L2 Lorenz: decided only for positive multiples of the identity.
            let d = cone.ambient_dim();
            let lambda = a.get(0, 0).clone();
            if lambda.is_positive() && *a == QMatrix::scalar(d, lambda) {
                Ok(true)
            } else {
                Err(OrderError::UnsupportedNorm(Norm::L2))
            }
        }
    }
}
