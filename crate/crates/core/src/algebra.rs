//! Finite carriers and indexed families of finitary operations.
//!
//! Operations are total tables over a carrier `{0, …, size-1}` stored densely
//! in row-major order, so the argument tuple `(a₁, …, aₙ)` lives at index
//! `Σ aᵢ·size^(n-i)`. Enumerating indices in increasing order therefore
//! enumerates tuples lexicographically, which is the witness order used
//! throughout the crate.

use std::collections::HashSet;

use thiserror::Error;

use crate::Limits;

/// An element of a finite carrier, identified by its index.
pub type Element = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("carrier must have at least one element")]
    EmptyCarrier,
    #[error("carrier labels must be distinct and number {expected}, found {found}")]
    BadLabels { expected: usize, found: usize },
    #[error("unknown operation {0:?}")]
    UnknownIndex(String),
    #[error("duplicate operation name {0:?}")]
    DuplicateIndex(String),
    #[error("operation {op:?} expects {expected} arguments, got {found}")]
    ArityMismatch { op: String, expected: usize, found: usize },
    #[error("element {value} is outside the carrier of size {size}")]
    OutOfRange { value: usize, size: usize },
    #[error("operation {0:?} has arity zero")]
    ZeroArity(String),
    #[error("operation table of {op:?} has length {found}, expected {expected}")]
    TableLength { op: String, expected: u64, found: usize },
    #[error("operations live on carriers of different sizes ({0} vs {1})")]
    CarrierMismatch(usize, usize),
    #[error("enumeration needs {cells} cells, above the limit of {limit}")]
    ResourceLimit { cells: u64, limit: u64 },
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
}

/// `size^arity`, or `None` on overflow.
pub fn tuple_count(size: usize, arity: usize) -> Option<u64> {
    (size as u64).checked_pow(arity as u32)
}

fn check_cells(cells: Option<u64>, limits: &Limits) -> Result<u64, AlgebraError> {
    match cells {
        Some(c) if c <= limits.max_cells => Ok(c),
        Some(c) => Err(AlgebraError::ResourceLimit { cells: c, limit: limits.max_cells }),
        None => Err(AlgebraError::ResourceLimit { cells: u64::MAX, limit: limits.max_cells }),
    }
}

/// Lexicographic enumeration of all tuples over a sorted list of values.
#[derive(Debug, Clone)]
pub struct Tuples<'a> {
    values: &'a [Element],
    digits: Vec<usize>,
    done: bool,
}

impl<'a> Tuples<'a> {
    pub fn new(values: &'a [Element], arity: usize) -> Self {
        Tuples { values, digits: vec![0; arity], done: values.is_empty() && arity > 0 }
    }
}

impl Iterator for Tuples<'_> {
    type Item = Vec<Element>;

    fn next(&mut self) -> Option<Vec<Element>> {
        if self.done {
            return None;
        }
        let item = self.digits.iter().map(|&d| self.values[d]).collect();
        let mut pos = self.digits.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.digits[pos] += 1;
            if self.digits[pos] < self.values.len() {
                break;
            }
            self.digits[pos] = 0;
        }
        Some(item)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Carrier {
    size: usize,
    labels: Option<Vec<String>>,
}

impl Carrier {
    pub fn new(size: usize) -> Result<Self, AlgebraError> {
        if size == 0 {
            return Err(AlgebraError::EmptyCarrier);
        }
        Ok(Carrier { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self, AlgebraError> {
        let size = labels.len();
        if size == 0 {
            return Err(AlgebraError::EmptyCarrier);
        }
        let distinct: HashSet<&String> = labels.iter().collect();
        if distinct.len() != size {
            return Err(AlgebraError::BadLabels { expected: size, found: distinct.len() });
        }
        Ok(Carrier { size, labels: Some(labels) })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.size
    }
}

/// A total operation `X^arity → X` stored as a dense table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Operation {
    arity: usize,
    size: usize,
    table: Vec<Element>,
}

impl Operation {
    pub fn new(size: usize, arity: usize, table: Vec<Element>) -> Result<Self, AlgebraError> {
        if arity == 0 {
            return Err(AlgebraError::ZeroArity(String::new()));
        }
        let expected = tuple_count(size, arity).unwrap_or(u64::MAX);
        if table.len() as u64 != expected {
            return Err(AlgebraError::TableLength { op: String::new(), expected, found: table.len() });
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= size) {
            return Err(AlgebraError::OutOfRange { value: bad, size });
        }
        Ok(Operation { arity, size, table })
    }

    /// Tabulates `f` over all tuples, subject to the cell limit.
    pub fn from_fn(
        size: usize,
        arity: usize,
        limits: &Limits,
        f: impl Fn(&[Element]) -> Element,
    ) -> Result<Self, AlgebraError> {
        if arity == 0 {
            return Err(AlgebraError::ZeroArity(String::new()));
        }
        check_cells(tuple_count(size, arity), limits)?;
        let all: Vec<Element> = (0..size).collect();
        let table = Tuples::new(&all, arity).map(|t| f(&t)).collect();
        Operation::new(size, arity, table)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn table(&self) -> &[Element] {
        &self.table
    }

    pub fn index_of(&self, args: &[Element]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.size + a)
    }

    /// Unchecked lookup; callers guarantee shape and range.
    pub fn apply(&self, args: &[Element]) -> Element {
        self.table[self.index_of(args)]
    }

    /// Decodes a table index into its argument tuple.
    pub fn args_of(&self, mut index: usize) -> Vec<Element> {
        let mut args = vec![0; self.arity];
        for slot in (0..self.arity).rev() {
            args[slot] = index % self.size;
            index /= self.size;
        }
        args
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReflexivityWitness {
    pub op: String,
    pub element: Element,
}

/// A failure of `γ(x₁,…,β(y₁,…,y_m),…,xₙ) = β(γ(x₁,…,y₁,…,xₙ), …, γ(x₁,…,y_m,…,xₙ))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributivityWitness {
    pub outer: String,
    pub inner: String,
    /// One-based slot of the outer operation receiving the inner result.
    pub slot: usize,
    /// The outer arguments other than `slot`, in order.
    pub fixed: Vec<Element>,
    pub inner_args: Vec<Element>,
    pub lhs: Element,
    pub rhs: Element,
}

/// An indexed family `{ω_γ : γ ∈ Γ}` over one carrier; Γ is a list of distinct names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationFamily {
    carrier: Carrier,
    names: Vec<String>,
    ops: Vec<Operation>,
}

impl OperationFamily {
    pub fn new(carrier: Carrier) -> Self {
        OperationFamily { carrier, names: Vec::new(), ops: Vec::new() }
    }

    pub fn with(mut self, name: impl Into<String>, op: Operation) -> Result<Self, AlgebraError> {
        self.push(name, op)?;
        Ok(self)
    }

    pub fn push(&mut self, name: impl Into<String>, op: Operation) -> Result<(), AlgebraError> {
        let name = name.into();
        if self.names.contains(&name) {
            return Err(AlgebraError::DuplicateIndex(name));
        }
        if op.size != self.carrier.size {
            return Err(AlgebraError::CarrierMismatch(self.carrier.size, op.size));
        }
        self.names.push(name);
        self.ops.push(op);
        Ok(())
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn size(&self) -> usize {
        self.carrier.size
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Operation)> {
        self.names.iter().map(String::as_str).zip(&self.ops)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn op(&self, name: &str) -> Result<&Operation, AlgebraError> {
        self.position(name)
            .map(|i| &self.ops[i])
            .ok_or_else(|| AlgebraError::UnknownIndex(name.to_string()))
    }

    pub fn arity_of(&self, name: &str) -> Result<usize, AlgebraError> {
        self.op(name).map(Operation::arity)
    }

    pub fn max_arity(&self) -> usize {
        self.ops.iter().map(Operation::arity).max().unwrap_or(0)
    }

    pub fn evaluate(&self, name: &str, args: &[Element]) -> Result<Element, AlgebraError> {
        let op = self.op(name)?;
        if args.len() != op.arity {
            return Err(AlgebraError::ArityMismatch { op: name.to_string(), expected: op.arity, found: args.len() });
        }
        if let Some(&bad) = args.iter().find(|&&a| a >= self.carrier.size) {
            return Err(AlgebraError::OutOfRange { value: bad, size: self.carrier.size });
        }
        Ok(op.apply(args))
    }

    /// First `(γ, x)` in (index, element) order with `ω_γ(x,…,x) ≠ x`.
    pub fn check_reflexive(&self) -> Option<ReflexivityWitness> {
        for (name, op) in self.iter() {
            for x in self.carrier.elements() {
                if op.apply(&vec![x; op.arity]) != x {
                    return Some(ReflexivityWitness { op: name.to_string(), element: x });
                }
            }
        }
        None
    }

    /// Evaluates both sides of the distributivity identity at one point.
    pub fn distributivity_sides(
        &self,
        outer: &str,
        inner: &str,
        slot: usize,
        fixed: &[Element],
        inner_args: &[Element],
    ) -> Result<(Element, Element), AlgebraError> {
        let g = self.op(outer)?;
        let b = self.op(inner)?;
        if slot == 0 || slot > g.arity {
            return Err(AlgebraError::ArityMismatch { op: outer.to_string(), expected: g.arity, found: slot });
        }
        if fixed.len() + 1 != g.arity {
            return Err(AlgebraError::ArityMismatch { op: outer.to_string(), expected: g.arity - 1, found: fixed.len() });
        }
        if inner_args.len() != b.arity {
            return Err(AlgebraError::ArityMismatch { op: inner.to_string(), expected: b.arity, found: inner_args.len() });
        }
        Ok(distributivity_at(g, b, slot - 1, fixed, inner_args))
    }

    /// Checks pairwise mutual distributivity by exhaustive enumeration.
    ///
    /// Order: outer index, inner index, slot, then the tuple
    /// `(fixed outer arguments…, inner arguments…)` lexicographically.
    pub fn check_mutually_distributive(&self, limits: &Limits) -> Result<Option<DistributivityWitness>, AlgebraError> {
        let size = self.carrier.size;
        for g in &self.ops {
            for b in &self.ops {
                check_cells(tuple_count(size, g.arity + b.arity - 1), limits)?;
            }
        }
        let all: Vec<Element> = self.carrier.elements().collect();
        for (gname, g) in self.iter() {
            for (bname, b) in self.iter() {
                for k in 0..g.arity {
                    for tuple in Tuples::new(&all, g.arity - 1 + b.arity) {
                        let (fixed, inner_args) = tuple.split_at(g.arity - 1);
                        let (lhs, rhs) = distributivity_at(g, b, k, fixed, inner_args);
                        if lhs != rhs {
                            return Ok(Some(DistributivityWitness {
                                outer: gname.to_string(),
                                inner: bname.to_string(),
                                slot: k + 1,
                                fixed: fixed.to_vec(),
                                inner_args: inner_args.to_vec(),
                                lhs,
                                rhs,
                            }));
                        }
                    }
                }
            }
        }
        Ok(None)
    }
}

fn with_slot(fixed: &[Element], slot: usize, value: Element) -> Vec<Element> {
    let mut args = Vec::with_capacity(fixed.len() + 1);
    args.extend_from_slice(&fixed[..slot]);
    args.push(value);
    args.extend_from_slice(&fixed[slot..]);
    args
}

fn distributivity_at(g: &Operation, b: &Operation, slot: usize, fixed: &[Element], ys: &[Element]) -> (Element, Element) {
    let lhs = g.apply(&with_slot(fixed, slot, b.apply(ys)));
    let spread: Vec<Element> = ys.iter().map(|&y| g.apply(&with_slot(fixed, slot, y))).collect();
    (lhs, b.apply(&spread))
}

/// One operation `(x₁,…,x_k) ↦ (c₁x₁+⋯+c_kx_k) mod m` per coefficient list, named `lin0`, `lin1`, ….
pub fn build_modular_linear_family(
    modulus: u64,
    coefficient_lists: &[Vec<i64>],
    limits: &Limits,
) -> Result<OperationFamily, AlgebraError> {
    if modulus < 2 {
        return Err(AlgebraError::BadModulus(modulus));
    }
    let m = modulus as i64;
    let size = modulus as usize;
    let mut family = OperationFamily::new(Carrier::new(size)?);
    for (i, coeffs) in coefficient_lists.iter().enumerate() {
        if coeffs.is_empty() {
            return Err(AlgebraError::ZeroArity(format!("lin{i}")));
        }
        let reduced: Vec<i64> = coeffs.iter().map(|c| c.rem_euclid(m)).collect();
        let op = Operation::from_fn(size, coeffs.len(), limits, |args| {
            let s = reduced.iter().zip(args).fold(0i64, |acc, (c, &a)| (acc + c * a as i64) % m);
            s as Element
        })?;
        family.push(format!("lin{i}"), op)?;
    }
    Ok(family)
}

/// `min(x, y)` on the chain `0 < 1 < ⋯ < size-1`.
pub fn min_operation(size: usize) -> Operation {
    let table = Tuples::new(&(0..size).collect::<Vec<_>>(), 2).map(|t| t[0].min(t[1])).collect();
    Operation { arity: 2, size, table }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn min_family(size: usize) -> OperationFamily {
        OperationFamily::new(Carrier::new(size).unwrap()).with("min2", min_operation(size)).unwrap()
    }

    fn omega5() -> OperationFamily {
        build_modular_linear_family(5, &[vec![3, 3]], &Limits::default()).unwrap()
    }

    #[test]
    fn evaluate_looks_up_tables() {
        assert_eq!(min_family(4).evaluate("min2", &[1, 3]).unwrap(), 1);
        assert_eq!(omega5().evaluate("lin0", &[2, 4]).unwrap(), 3);
        for x in 0..5 {
            assert_eq!(omega5().evaluate("lin0", &[x, x]).unwrap(), x);
        }
    }

    #[test]
    fn evaluate_rejects_bad_calls() {
        let f = min_family(4);
        assert_eq!(f.evaluate("max2", &[0, 0]), Err(AlgebraError::UnknownIndex("max2".into())));
        assert!(matches!(f.evaluate("min2", &[0]), Err(AlgebraError::ArityMismatch { .. })));
        assert_eq!(f.evaluate("min2", &[0, 4]), Err(AlgebraError::OutOfRange { value: 4, size: 4 }));
    }

    #[test]
    fn reflexivity() {
        assert_eq!(min_family(4).check_reflexive(), None);
        let add4 = build_modular_linear_family(4, &[vec![1, 1]], &Limits::default()).unwrap();
        assert_eq!(add4.check_reflexive(), Some(ReflexivityWitness { op: "lin0".into(), element: 1 }));
        assert_eq!(OperationFamily::new(Carrier::new(3).unwrap()).check_reflexive(), None);
    }

    #[test]
    fn distributivity_of_min_and_midpoint() {
        let limits = Limits::default();
        assert_eq!(min_family(4).check_mutually_distributive(&limits).unwrap(), None);
        assert_eq!(omega5().check_mutually_distributive(&limits).unwrap(), None);
    }

    #[test]
    fn min_and_add_are_not_mutually_distributive() {
        let limits = Limits::default();
        let add4 = build_modular_linear_family(4, &[vec![1, 1]], &limits).unwrap();
        let family = min_family(4).with("add4", add4.op("lin0").unwrap().clone()).unwrap();
        let w = family.check_mutually_distributive(&limits).unwrap().expect("witness");
        // First counterexample in enumeration order: min(1 + 1, 1) = 1 but min(1,1) + min(1,1) = 2.
        assert_eq!(
            w,
            DistributivityWitness {
                outer: "min2".into(),
                inner: "add4".into(),
                slot: 1,
                fixed: vec![1],
                inner_args: vec![1, 1],
                lhs: 1,
                rhs: 2,
            }
        );
        // The hand-found point min(2, (3+3) mod 4) = 2 vs (min(2,3)+min(2,3)) mod 4 = 0 also fails.
        assert_eq!(family.distributivity_sides("min2", "add4", 2, &[2], &[3, 3]).unwrap(), (2, 0));
    }

    #[test]
    fn distributivity_respects_cell_limit() {
        let limits = Limits { max_cells: 10, ..Limits::default() };
        assert!(matches!(
            omega5().check_mutually_distributive(&limits),
            Err(AlgebraError::ResourceLimit { cells: 125, limit: 10 })
        ));
    }

    #[test]
    fn modular_families() {
        let limits = Limits::default();
        let w = omega5();
        assert_eq!(w.op("lin0").unwrap().table()[1], 3);
        let add4 = build_modular_linear_family(4, &[vec![1, 1]], &limits).unwrap();
        assert_eq!(add4.evaluate("lin0", &[3, 3]).unwrap(), 2);
        let two = build_modular_linear_family(6, &[vec![1, 1], vec![2, 5]], &limits).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two.evaluate("lin1", &[1, 1]).unwrap(), 1);
        assert!(matches!(build_modular_linear_family(1, &[vec![1]], &limits), Err(AlgebraError::BadModulus(1))));
    }

    #[test]
    fn tables_are_validated() {
        assert!(matches!(Operation::new(3, 2, vec![0; 8]), Err(AlgebraError::TableLength { .. })));
        assert!(matches!(Operation::new(2, 1, vec![0, 2]), Err(AlgebraError::OutOfRange { value: 2, size: 2 })));
        assert!(Carrier::with_labels(vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn tuples_are_lexicographic() {
        let vals = [1, 3];
        let all: Vec<_> = Tuples::new(&vals, 2).collect();
        assert_eq!(all, vec![vec![1, 1], vec![1, 3], vec![3, 1], vec![3, 3]]);
        assert_eq!(Tuples::new(&[], 2).count(), 0);
        assert_eq!(Tuples::new(&[], 0).count(), 1);
    }
}
