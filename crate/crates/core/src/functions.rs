//! Maps from a finite carrier into an ordered range, and the (ω, Ω) convexity,
//! concavity and affinity predicates relating them.
//!
//! A range is either a finite poset carrying its own operation tables, or
//! `ℚ^d` ordered by a rational cone with each `Ω_γ(y₁,…,yₙ) = Σ A_{γ,i} yᵢ`.

use std::fmt;

use thiserror::Error;

use crate::algebra::{AlgebraError, DistributivityWitness, Element, OperationFamily, Tuples};
use crate::convexity::Subset;
use crate::order::{is_cone_automorphism, is_sharp, maps_into, FinitePoset, OrderError, RationalCone, Sharpness};
use crate::rational::{add, zeros, QMatrix, QVec, Rational};
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctionError {
    #[error("operation families do not match: {0}")]
    FamilyMismatch(String),
    #[error("function has {found} values, expected {expected}")]
    Shape { expected: usize, found: usize },
    #[error("value at position {0} is not a valid range element")]
    BadValue(usize),
    #[error("no supremum at point {0}")]
    NoSupremum(Element),
    #[error("no infimum at point {0}")]
    NoInfimum(Element),
    #[error("functions {0} and {1} are not comparable pointwise")]
    NotAChain(usize, usize),
    #[error("empty function list")]
    Empty,
    #[error("pointwise suprema need a lattice (orthant) cone order")]
    UnsupportedOrder,
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Values of a map `X → Y`, indexed by carrier element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionTable<V> {
    values: Vec<V>,
}

impl<V> FunctionTable<V> {
    pub fn new(values: Vec<V>) -> Self {
        FunctionTable { values }
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, x: Element) -> &V {
        &self.values[x]
    }

    pub fn into_values(self) -> Vec<V> {
        self.values
    }
}

impl<V: Clone> FunctionTable<V> {
    pub fn constant(size: usize, value: V) -> Self {
        FunctionTable { values: vec![value; size] }
    }
}

/// Which property of the sections `u ↦ Ω_γ(…, u, …)` to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionCheck {
    Nondecreasing,
    Automorphism,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionDefect {
    /// `u ≤ v` but the images are not ordered.
    NotMonotone,
    NotInjective,
    /// The images are ordered but `u ≤ v` fails.
    InverseNotMonotone,
    /// The coefficient matrix has no inverse.
    Singular,
    /// The coefficient matrix or its inverse moves the cone outside itself.
    ConeNotPreserved,
}

/// A section `u ↦ Ω_γ(…, u, …)` at slot `slot` (one-based) failing a check.
///
/// `fixed` holds the other arguments (finite ranges only) and `points` the
/// offending values `u, v`; linear ranges report the slot matrix alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionWitness<V> {
    pub op: String,
    pub slot: usize,
    pub defect: SectionDefect,
    pub fixed: Vec<V>,
    pub points: Vec<V>,
}

/// Failure of `Ω_γ(…, Ω_β(z₁,…,z_m), …) = Ω_β(Ω_γ(…, z₁, …), …)` on a linear range:
/// `term` is the outer slot index (one-based) whose coefficient identity fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RangeDistributivityWitness {
    Finite(DistributivityWitness),
    Linear { outer: String, inner: String, slot: usize, term: usize },
}

/// A partially ordered range carrying the operations `Ω_γ`.
pub trait OrderedCodomain {
    type Value: Clone + PartialEq + fmt::Debug;

    /// Operation names, in index order.
    fn op_names(&self) -> Vec<String>;
    fn op_arity(&self, op: usize) -> usize;
    fn apply(&self, op: usize, args: &[Self::Value]) -> Self::Value;
    fn leq(&self, a: &Self::Value, b: &Self::Value) -> Result<bool, FunctionError>;
    fn validate_value(&self, v: &Self::Value) -> bool;
    fn supremum(&self, values: &[Self::Value]) -> Result<Option<Self::Value>, FunctionError>;
    fn check_section(
        &self,
        op: usize,
        slot: usize,
        check: SectionCheck,
    ) -> Result<Option<SectionWitness<Self::Value>>, FunctionError>;
    /// First `γ` with `Ω_γ(y,…,y) ≠ y` for some `y`.
    fn check_reflexive(&self) -> Option<String>;
    fn check_mutually_distributive(&self, limits: &Limits) -> Result<Option<RangeDistributivityWitness>, FunctionError>;
    fn is_lower_chain_complete(&self) -> Result<bool, FunctionError>;

    fn position(&self, name: &str) -> Option<usize> {
        self.op_names().iter().position(|n| n == name)
    }

    fn equal(&self, a: &Self::Value, b: &Self::Value) -> bool {
        a == b
    }
}

/// A finite poset with operation tables on the same carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRange {
    poset: FinitePoset,
    ops: OperationFamily,
}

impl FiniteRange {
    pub fn new(poset: FinitePoset, ops: OperationFamily) -> Result<Self, FunctionError> {
        if poset.size() != ops.size() {
            return Err(FunctionError::InvalidRange(format!(
                "poset has {} elements but the operations act on {}",
                poset.size(),
                ops.size()
            )));
        }
        Ok(FiniteRange { poset, ops })
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn ops(&self) -> &OperationFamily {
        &self.ops
    }

    fn section(&self, op: usize, slot: usize, fixed: &[Element], u: Element) -> Element {
        let mut args = fixed.to_vec();
        args.insert(slot, u);
        self.ops.iter().nth(op).expect("operation index").1.apply(&args)
    }
}

impl OrderedCodomain for FiniteRange {
    type Value = Element;

    fn op_names(&self) -> Vec<String> {
        self.ops.names().to_vec()
    }

    fn op_arity(&self, op: usize) -> usize {
        self.ops.iter().nth(op).expect("operation index").1.arity()
    }

    fn apply(&self, op: usize, args: &[Element]) -> Element {
        self.ops.iter().nth(op).expect("operation index").1.apply(args)
    }

    fn leq(&self, a: &Element, b: &Element) -> Result<bool, FunctionError> {
        Ok(self.poset.leq(*a, *b))
    }

    fn validate_value(&self, v: &Element) -> bool {
        *v < self.poset.size()
    }

    fn supremum(&self, values: &[Element]) -> Result<Option<Element>, FunctionError> {
        Ok(self.poset.join(values))
    }

    fn check_section(
        &self,
        op: usize,
        slot: usize,
        check: SectionCheck,
    ) -> Result<Option<SectionWitness<Element>>, FunctionError> {
        let arity = self.op_arity(op);
        if slot == 0 || slot > arity {
            return Err(FunctionError::FamilyMismatch(format!("slot {slot} outside arity {arity}")));
        }
        let n = self.poset.size();
        let all: Vec<Element> = (0..n).collect();
        let name = self.ops.names()[op].clone();
        let k = slot - 1;
        for fixed in Tuples::new(&all, arity - 1) {
            let image: Vec<Element> = all.iter().map(|&u| self.section(op, k, &fixed, u)).collect();
            for u in 0..n {
                for v in 0..n {
                    let defect = if self.poset.leq(u, v) && !self.poset.leq(image[u], image[v]) {
                        Some(SectionDefect::NotMonotone)
                    } else if check == SectionCheck::Automorphism && u < v && image[u] == image[v] {
                        Some(SectionDefect::NotInjective)
                    } else if check == SectionCheck::Automorphism
                        && self.poset.leq(image[u], image[v])
                        && !self.poset.leq(u, v)
                    {
                        Some(SectionDefect::InverseNotMonotone)
                    } else {
                        None
                    };
                    if let Some(defect) = defect {
                        return Ok(Some(SectionWitness { op: name, slot, defect, fixed, points: vec![u, v] }));
                    }
                }
            }
        }
        Ok(None)
    }

    fn check_reflexive(&self) -> Option<String> {
        self.ops.check_reflexive().map(|w| w.op)
    }

    fn check_mutually_distributive(&self, limits: &Limits) -> Result<Option<RangeDistributivityWitness>, FunctionError> {
        Ok(self.ops.check_mutually_distributive(limits)?.map(RangeDistributivityWitness::Finite))
    }

    fn is_lower_chain_complete(&self) -> Result<bool, FunctionError> {
        Ok(true)
    }
}

/// `ℚ^d` ordered by a cone, with `Ω_γ(y₁,…,yₙ) = Σ A_{γ,i} yᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRange {
    dim: usize,
    cone: RationalCone,
    names: Vec<String>,
    matrices: Vec<Vec<QMatrix>>,
}

impl LinearRange {
    pub fn new(cone: RationalCone, ops: Vec<(String, Vec<QMatrix>)>) -> Result<Self, FunctionError> {
        let dim = cone.ambient_dim();
        let mut names = Vec::new();
        let mut matrices = Vec::new();
        for (name, mats) in ops {
            if names.contains(&name) {
                return Err(FunctionError::InvalidRange(format!("duplicate operation {name:?}")));
            }
            if mats.is_empty() {
                return Err(FunctionError::InvalidRange(format!("operation {name:?} has arity zero")));
            }
            if mats.iter().any(|m| m.rows() != dim || m.cols() != dim) {
                return Err(FunctionError::InvalidRange(format!("operation {name:?} needs {dim}×{dim} matrices")));
            }
            names.push(name);
            matrices.push(mats);
        }
        Ok(LinearRange { dim, cone, names, matrices })
    }

    /// `ℚ` with the usual order and the given scalar weights per operation.
    pub fn scalar(ops: Vec<(String, Vec<Rational>)>) -> Result<Self, FunctionError> {
        let ops = ops
            .into_iter()
            .map(|(name, ws)| (name, ws.into_iter().map(|w| QMatrix::scalar(1, w)).collect()))
            .collect();
        Self::new(RationalCone::orthant(1), ops)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cone(&self) -> &RationalCone {
        &self.cone
    }

    pub fn matrices(&self, op: usize) -> &[QMatrix] {
        &self.matrices[op]
    }
}

impl OrderedCodomain for LinearRange {
    type Value = QVec;

    fn op_names(&self) -> Vec<String> {
        self.names.clone()
    }

    fn op_arity(&self, op: usize) -> usize {
        self.matrices[op].len()
    }

    fn apply(&self, op: usize, args: &[QVec]) -> QVec {
        self.matrices[op].iter().zip(args).fold(zeros(self.dim), |acc, (m, y)| add(&acc, &m.mul_vec(y)))
    }

    fn leq(&self, a: &QVec, b: &QVec) -> Result<bool, FunctionError> {
        Ok(crate::order::cone_leq(&self.cone, a, b)?)
    }

    fn validate_value(&self, v: &QVec) -> bool {
        v.len() == self.dim
    }

    fn supremum(&self, values: &[QVec]) -> Result<Option<QVec>, FunctionError> {
        if !self.cone.is_positive_orthant() {
            return Err(FunctionError::UnsupportedOrder);
        }
        let Some(first) = values.first() else { return Ok(None) };
        Ok(Some(
            values[1..]
                .iter()
                .fold(first.clone(), |acc, v| acc.iter().zip(v).map(|(a, b)| a.max(b).clone()).collect()),
        ))
    }

    fn check_section(
        &self,
        op: usize,
        slot: usize,
        check: SectionCheck,
    ) -> Result<Option<SectionWitness<QVec>>, FunctionError> {
        let arity = self.op_arity(op);
        if slot == 0 || slot > arity {
            return Err(FunctionError::FamilyMismatch(format!("slot {slot} outside arity {arity}")));
        }
        let a = &self.matrices[op][slot - 1];
        let defect = match check {
            SectionCheck::Nondecreasing => (!maps_into(&self.cone, a)?).then_some(SectionDefect::NotMonotone),
            SectionCheck::Automorphism => {
                if a.inverse().is_none() {
                    Some(SectionDefect::Singular)
                } else {
                    (!is_cone_automorphism(&self.cone, a)?).then_some(SectionDefect::ConeNotPreserved)
                }
            }
        };
        Ok(defect.map(|defect| SectionWitness {
            op: self.names[op].clone(),
            slot,
            defect,
            fixed: Vec::new(),
            points: a.to_rows(),
        }))
    }

    fn check_reflexive(&self) -> Option<String> {
        let id = QMatrix::identity(self.dim);
        self.names
            .iter()
            .zip(&self.matrices)
            .find(|(_, mats)| sum_matrices(mats, self.dim) != id)
            .map(|(name, _)| name.clone())
    }

    fn check_mutually_distributive(&self, _limits: &Limits) -> Result<Option<RangeDistributivityWitness>, FunctionError> {
        let id = QMatrix::identity(self.dim);
        for (g, gname) in self.names.iter().enumerate() {
            for (b, bname) in self.names.iter().enumerate() {
                let inner_sum = sum_matrices(&self.matrices[b], self.dim).sub(&id);
                for k in 0..self.op_arity(g) {
                    for (i, ai) in self.matrices[g].iter().enumerate() {
                        let holds = if i == k {
                            self.matrices[b].iter().all(|bj| ai.mul(bj) == bj.mul(ai))
                        } else {
                            inner_sum.mul(ai).is_zero()
                        };
                        if !holds {
                            return Ok(Some(RangeDistributivityWitness::Linear {
                                outer: gname.clone(),
                                inner: bname.clone(),
                                slot: k + 1,
                                term: i + 1,
                            }));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// Closed sharp cones induce lower chain-complete orders.
    fn is_lower_chain_complete(&self) -> Result<bool, FunctionError> {
        Ok(matches!(is_sharp(&self.cone)?, Sharpness::Sharp { .. }))
    }
}

fn sum_matrices(mats: &[QMatrix], dim: usize) -> QMatrix {
    mats.iter().fold(QMatrix::zeros(dim, dim), |acc, m| acc.add(m))
}

/// Either range flavor, for callers that pick one at run time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderedRange {
    Finite(FiniteRange),
    Linear(LinearRange),
}

/// An operation and argument tuple where a map predicate fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapWitness {
    pub op: String,
    pub args: Vec<Element>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Relation {
    Convex,
    Concave,
    Affine,
}

/// Pairs each `ω_γ` with the range operation of the same name, requiring equal arities.
pub fn match_families<R: OrderedCodomain>(omega: &OperationFamily, range: &R) -> Result<Vec<usize>, FunctionError> {
    let names = range.op_names();
    if names.len() != omega.len() {
        return Err(FunctionError::FamilyMismatch(format!(
            "domain has {} operations, range has {}",
            omega.len(),
            names.len()
        )));
    }
    omega
        .iter()
        .map(|(name, op)| {
            let i = range
                .position(name)
                .ok_or_else(|| FunctionError::FamilyMismatch(format!("range lacks operation {name:?}")))?;
            if range.op_arity(i) != op.arity() {
                return Err(FunctionError::FamilyMismatch(format!(
                    "{name:?} has arity {} on the domain and {} on the range",
                    op.arity(),
                    range.op_arity(i)
                )));
            }
            Ok(i)
        })
        .collect()
}

/// Checks that `f` has one valid range value per carrier element.
pub fn check_table<R: OrderedCodomain>(
    f: &FunctionTable<R::Value>,
    size: usize,
    range: &R,
) -> Result<(), FunctionError> {
    if f.len() != size {
        return Err(FunctionError::Shape { expected: size, found: f.len() });
    }
    match f.values().iter().position(|v| !range.validate_value(v)) {
        Some(i) => Err(FunctionError::BadValue(i)),
        None => Ok(()),
    }
}

fn check_relation<R: OrderedCodomain>(
    f: &FunctionTable<R::Value>,
    omega: &OperationFamily,
    range: &R,
    domain: Option<&Subset>,
    relation: Relation,
) -> Result<Option<MapWitness>, FunctionError> {
    let pairing = match_families(omega, range)?;
    check_table(f, omega.size(), range)?;
    let members: Vec<Element> = match domain {
        Some(d) => d.to_vec(),
        None => (0..omega.size()).collect(),
    };
    for ((name, op), &r) in omega.iter().zip(&pairing) {
        for args in Tuples::new(&members, op.arity()) {
            let lhs = f.get(op.apply(&args));
            let values: Vec<R::Value> = args.iter().map(|&x| f.get(x).clone()).collect();
            let rhs = range.apply(r, &values);
            let holds = match relation {
                Relation::Convex => range.leq(lhs, &rhs)?,
                Relation::Concave => range.leq(&rhs, lhs)?,
                Relation::Affine => range.equal(lhs, &rhs),
            };
            if !holds {
                return Ok(Some(MapWitness { op: name.to_string(), args }));
            }
        }
    }
    Ok(None)
}

/// First `(γ, x̄)` with `f(ω_γ(x̄)) ≰ Ω_γ(f(x₁),…,f(xₙ))`.
pub fn is_convex_map<R: OrderedCodomain>(
    f: &FunctionTable<R::Value>,
    omega: &OperationFamily,
    range: &R,
) -> Result<Option<MapWitness>, FunctionError> {
    check_relation(f, omega, range, None, Relation::Convex)
}

pub fn is_concave_map<R: OrderedCodomain>(
    f: &FunctionTable<R::Value>,
    omega: &OperationFamily,
    range: &R,
) -> Result<Option<MapWitness>, FunctionError> {
    check_relation(f, omega, range, None, Relation::Concave)
}

pub fn is_affine_map<R: OrderedCodomain>(
    f: &FunctionTable<R::Value>,
    omega: &OperationFamily,
    range: &R,
) -> Result<Option<MapWitness>, FunctionError> {
    check_relation(f, omega, range, None, Relation::Affine)
}

/// Affinity with arguments restricted to `domain`.
pub fn is_affine_on<R: OrderedCodomain>(
    f: &FunctionTable<R::Value>,
    omega: &OperationFamily,
    range: &R,
    domain: &Subset,
) -> Result<Option<MapWitness>, FunctionError> {
    check_relation(f, omega, range, Some(domain), Relation::Affine)
}

pub fn pointwise_sup<R: OrderedCodomain>(
    fs: &[FunctionTable<R::Value>],
    range: &R,
) -> Result<FunctionTable<R::Value>, FunctionError> {
    let first = fs.first().ok_or(FunctionError::Empty)?;
    let size = first.len();
    for f in fs {
        check_table(f, size, range)?;
    }
    let values = (0..size)
        .map(|x| {
            let column: Vec<R::Value> = fs.iter().map(|f| f.get(x).clone()).collect();
            range.supremum(&column)?.ok_or(FunctionError::NoSupremum(x))
        })
        .collect::<Result<_, _>>()?;
    Ok(FunctionTable::new(values))
}

/// Pointwise infimum of a family that is a chain for the pointwise order; this is its least member.
pub fn pointwise_inf_chain<R: OrderedCodomain>(
    fs: &[FunctionTable<R::Value>],
    range: &R,
) -> Result<FunctionTable<R::Value>, FunctionError> {
    let first = fs.first().ok_or(FunctionError::Empty)?;
    let size = first.len();
    for f in fs {
        check_table(f, size, range)?;
    }
    let below = |i: usize, j: usize| -> Result<bool, FunctionError> {
        for x in 0..size {
            if !range.leq(fs[i].get(x), fs[j].get(x))? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut least = 0;
    for i in 0..fs.len() {
        for j in i + 1..fs.len() {
            if !below(i, j)? && !below(j, i)? {
                return Err(FunctionError::NotAChain(i, j));
            }
        }
        if below(i, least)? {
            least = i;
        }
    }
    Ok(fs[least].clone())
}

/// Whether every section of `Ω_γ` in `slot` (one-based) is an order automorphism.
pub fn check_order_automorphism<R: OrderedCodomain>(
    range: &R,
    op: &str,
    slot: usize,
) -> Result<Option<SectionWitness<R::Value>>, FunctionError> {
    let i = range.position(op).ok_or_else(|| FunctionError::FamilyMismatch(format!("unknown operation {op:?}")))?;
    range.check_section(i, slot, SectionCheck::Automorphism)
}

/// Whether `Ω_γ` is nondecreasing in each variable.
pub fn check_nondecreasing<R: OrderedCodomain>(
    range: &R,
    op: &str,
) -> Result<Option<SectionWitness<R::Value>>, FunctionError> {
    let i = range.position(op).ok_or_else(|| FunctionError::FamilyMismatch(format!("unknown operation {op:?}")))?;
    for slot in 1..=range.op_arity(i) {
        if let Some(w) = range.check_section(i, slot, SectionCheck::Nondecreasing)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_modular_linear_family, min_operation, Carrier};
    use crate::rational::{int, qvec, ratio};

    fn min_family(size: usize) -> OperationFamily {
        OperationFamily::new(Carrier::new(size).unwrap()).with("min2", min_operation(size)).unwrap()
    }

    fn average(name: &str) -> LinearRange {
        LinearRange::scalar(vec![(name.into(), vec![ratio(1, 2), ratio(1, 2)])]).unwrap()
    }

    fn table(values: &[i64]) -> FunctionTable<QVec> {
        FunctionTable::new(values.iter().map(|&v| vec![int(v)]).collect())
    }

    #[test]
    fn convex_maps_on_min_chain() {
        let omega = min_family(4);
        let range = average("min2");
        assert_eq!(is_convex_map(&table(&[1, 2, 2, 5]), &omega, &range).unwrap(), None);
        assert_eq!(
            is_convex_map(&table(&[5, 1, 1, 1]), &omega, &range).unwrap(),
            Some(MapWitness { op: "min2".into(), args: vec![0, 1] })
        );
        assert_eq!(is_convex_map(&table(&[3, 3, 3, 3]), &omega, &range).unwrap(), None);
    }

    #[test]
    fn concave_maps_on_min_chain() {
        let omega = min_family(4);
        let range = average("min2");
        assert_eq!(is_concave_map(&table(&[5, 2, 2, 1]), &omega, &range).unwrap(), None);
        assert_eq!(is_concave_map(&table(&[7, 7, 7, 7]), &omega, &range).unwrap(), None);
        assert!(is_concave_map(&table(&[1, 2, 2, 5]), &omega, &range).unwrap().is_some());
    }

    #[test]
    fn affine_maps() {
        let omega = build_modular_linear_family(5, &[vec![3, 3]], &Limits::default()).unwrap();
        let range = average("lin0");
        assert_eq!(is_affine_map(&table(&[2, 2, 2, 2, 2]), &omega, &range).unwrap(), None);
        assert!(is_affine_map(&table(&[0, 1, 2, 3, 4]), &omega, &range).unwrap().is_some());
        let w = is_affine_map(&table(&[0, 1, 2, 3]), &min_family(4), &average("min2")).unwrap();
        assert_eq!(w, Some(MapWitness { op: "min2".into(), args: vec![0, 1] }));
    }

    #[test]
    fn mismatched_families() {
        let err = is_convex_map(&table(&[0, 0, 0, 0]), &min_family(4), &average("other"));
        assert!(matches!(err, Err(FunctionError::FamilyMismatch(_))));
        let unary = LinearRange::scalar(vec![("min2".into(), vec![int(1)])]).unwrap();
        assert!(matches!(is_convex_map(&table(&[0, 0, 0, 0]), &min_family(4), &unary), Err(FunctionError::FamilyMismatch(_))));
        assert!(matches!(
            is_convex_map(&table(&[0, 0]), &min_family(4), &average("min2")),
            Err(FunctionError::Shape { .. })
        ));
    }

    #[test]
    fn suprema() {
        let range = average("g");
        let sup = pointwise_sup(&[table(&[1, 1, 1, 1]), table(&[0, 2, 2, 2])], &range).unwrap();
        assert_eq!(sup, table(&[1, 2, 2, 2]));
        assert_eq!(pointwise_sup(&[table(&[4, 1])], &range).unwrap(), table(&[4, 1]));
        let antichain = FiniteRange::new(FinitePoset::antichain(2), OperationFamily::new(Carrier::new(2).unwrap())).unwrap();
        let fs = [FunctionTable::new(vec![0, 0]), FunctionTable::new(vec![0, 1])];
        assert_eq!(pointwise_sup(&fs, &antichain), Err(FunctionError::NoSupremum(1)));
        let lorenz = LinearRange::new(RationalCone::lorenz(int(1), 1, crate::order::Norm::Linf).unwrap(), vec![]).unwrap();
        assert_eq!(pointwise_sup(&[FunctionTable::new(vec![qvec(&[0, 0])])], &lorenz), Err(FunctionError::UnsupportedOrder));
    }

    #[test]
    fn chain_infima() {
        let range = average("g");
        assert_eq!(pointwise_inf_chain(&[table(&[3, 3]), table(&[1, 2])], &range).unwrap(), table(&[1, 2]));
        assert_eq!(pointwise_inf_chain(&[table(&[3, 3])], &range).unwrap(), table(&[3, 3]));
        assert_eq!(pointwise_inf_chain(&[table(&[1, 2]), table(&[2, 1])], &range), Err(FunctionError::NotAChain(0, 1)));
    }

    #[test]
    fn automorphism_checks() {
        let half = LinearRange::scalar(vec![("h".into(), vec![ratio(1, 2)])]).unwrap();
        assert_eq!(check_order_automorphism(&half, "h", 1).unwrap(), None);
        let flip = LinearRange::scalar(vec![("h".into(), vec![int(-1)])]).unwrap();
        let w = check_order_automorphism(&flip, "h", 1).unwrap().unwrap();
        assert_eq!(w.defect, SectionDefect::ConeNotPreserved);
        let chain = FiniteRange::new(FinitePoset::chain(2), min_family(2)).unwrap();
        let w = check_order_automorphism(&chain, "min2", 1).unwrap().unwrap();
        assert_eq!(w.defect, SectionDefect::NotInjective);
        assert_eq!(w.fixed, vec![0]);
    }

    #[test]
    fn monotonicity_checks() {
        assert_eq!(check_nondecreasing(&average("g"), "g").unwrap(), None);
        let chain = FiniteRange::new(FinitePoset::chain(4), min_family(4)).unwrap();
        assert_eq!(check_nondecreasing(&chain, "min2").unwrap(), None);
        let shear = QMatrix::from_rows(vec![qvec(&[1, -1]), qvec(&[0, 1])]).unwrap();
        let range = LinearRange::new(RationalCone::orthant(2), vec![("g".into(), vec![shear])]).unwrap();
        let w = check_nondecreasing(&range, "g").unwrap().unwrap();
        assert_eq!((w.slot, w.defect), (1, SectionDefect::NotMonotone));
    }

    #[test]
    fn range_hypotheses() {
        let range = average("g");
        assert_eq!(range.check_reflexive(), None);
        assert_eq!(range.check_mutually_distributive(&Limits::default()).unwrap(), None);
        assert!(range.is_lower_chain_complete().unwrap());
        let plus = LinearRange::scalar(vec![("add".into(), vec![int(1), int(1)])]).unwrap();
        assert_eq!(plus.check_reflexive(), Some("add".into()));
        assert_eq!(
            plus.check_mutually_distributive(&Limits::default()).unwrap(),
            Some(RangeDistributivityWitness::Linear { outer: "add".into(), inner: "add".into(), slot: 1, term: 2 })
        );
    }
}
