//! Convex and extreme subsets of a finite carrier, their hulls, and the
//! interior/boundary split.

use std::fmt;

use crate::algebra::{Element, OperationFamily, Tuples};

/// A subset of a finite carrier, stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    len: usize,
    words: Vec<u64>,
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Subset {
    pub fn empty(len: usize) -> Self {
        Subset { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for x in 0..len {
            s.insert(x);
        }
        s
    }

    /// Builds a subset; elements at or beyond `len` are ignored.
    pub fn from_elements(len: usize, elements: impl IntoIterator<Item = Element>) -> Self {
        let mut s = Self::empty(len);
        for x in elements {
            if x < len {
                s.insert(x);
            }
        }
        s
    }

    /// Subset whose members are the set bits of `mask`; for carriers of at most 64 elements.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64, "mask subsets need a carrier of at most 64 elements");
        let mask = if len == 64 { mask } else { mask & ((1u64 << len) - 1) };
        let mut s = Self::empty(len);
        if len > 0 {
            s.words[0] = mask;
        }
        s
    }

    pub fn singleton(len: usize, x: Element) -> Self {
        Self::from_elements(len, [x])
    }

    /// Size of the ambient carrier.
    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn contains(&self, x: Element) -> bool {
        x < self.len && self.words[x / 64] & (1 << (x % 64)) != 0
    }

    /// Returns `true` if `x` was newly inserted.
    pub fn insert(&mut self, x: Element) -> bool {
        assert!(x < self.len, "element {x} outside carrier of size {}", self.len);
        let had = self.contains(x);
        self.words[x / 64] |= 1 << (x % 64);
        !had
    }

    pub fn remove(&mut self, x: Element) {
        if x < self.len {
            self.words[x / 64] &= !(1 << (x % 64));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.len).filter(move |&x| self.contains(x))
    }

    pub fn to_vec(&self) -> Vec<Element> {
        self.iter().collect()
    }

    pub fn complement(&self) -> Subset {
        Subset::from_elements(self.len, (0..self.len).filter(|&x| !self.contains(x)))
    }

    pub fn union(&self, other: &Subset) -> Subset {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn zip_words(&self, other: &Subset, f: impl Fn(u64, u64) -> u64) -> Subset {
        assert_eq!(self.len, other.len, "subsets of different carriers");
        Subset { len: self.len, words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect() }
    }
}

/// An operation and argument tuple at which a set predicate fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetWitness {
    pub op: String,
    pub args: Vec<Element>,
}

/// First `(γ, tuple)` with all arguments in `set` whose image leaves `set`.
pub fn is_convex_set(family: &OperationFamily, set: &Subset) -> Option<SetWitness> {
    let members = set.to_vec();
    for (name, op) in family.iter() {
        for args in Tuples::new(&members, op.arity()) {
            if !set.contains(op.apply(&args)) {
                return Some(SetWitness { op: name.to_string(), args });
            }
        }
    }
    None
}

/// First `(γ, tuple)` whose image lies in `set` while some argument does not.
pub fn is_extreme_set(family: &OperationFamily, set: &Subset) -> Option<SetWitness> {
    for (name, op) in family.iter() {
        for (index, &out) in op.table().iter().enumerate() {
            if set.contains(out) {
                let args = op.args_of(index);
                if args.iter().any(|&a| !set.contains(a)) {
                    return Some(SetWitness { op: name.to_string(), args });
                }
            }
        }
    }
    None
}

/// Smallest convex superset, by iterating `C ← C ∪ ⋃_γ ω_γ(Cⁿ)` to a fixed point.
pub fn convex_hull(family: &OperationFamily, set: &Subset) -> Subset {
    let mut current = set.clone();
    loop {
        let members = current.to_vec();
        let mut next = current.clone();
        for (_, op) in family.iter() {
            for args in Tuples::new(&members, op.arity()) {
                next.insert(op.apply(&args));
            }
        }
        if next == current {
            return current;
        }
        current = next;
    }
}

/// Smallest extreme superset, by iterating `D ← D ∪ {coordinates of ω_γ⁻¹(D)}` to a fixed point.
pub fn extreme_hull(family: &OperationFamily, set: &Subset) -> Subset {
    let mut current = set.clone();
    loop {
        let mut next = current.clone();
        for (_, op) in family.iter() {
            for (index, &out) in op.table().iter().enumerate() {
                if current.contains(out) {
                    for a in op.args_of(index) {
                        next.insert(a);
                    }
                }
            }
        }
        if next == current {
            return current;
        }
        current = next;
    }
}

/// Points whose extreme hull is the whole carrier.
pub fn omega_interior(family: &OperationFamily) -> Subset {
    let n = family.size();
    Subset::from_elements(n, (0..n).filter(|&p| extreme_hull(family, &Subset::singleton(n, p)).is_full()))
}

pub fn omega_boundary(family: &OperationFamily) -> Subset {
    omega_interior(family).complement()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_modular_linear_family, min_operation, Carrier};
    use crate::Limits;

    fn min_family(size: usize) -> OperationFamily {
        OperationFamily::new(Carrier::new(size).unwrap()).with("min2", min_operation(size)).unwrap()
    }

    fn omega5() -> OperationFamily {
        build_modular_linear_family(5, &[vec![3, 3]], &Limits::default()).unwrap()
    }

    fn set(n: usize, xs: &[Element]) -> Subset {
        Subset::from_elements(n, xs.iter().copied())
    }

    #[test]
    fn convex_set_examples() {
        assert_eq!(is_convex_set(&min_family(4), &set(4, &[1, 3])), None);
        assert_eq!(is_convex_set(&omega5(), &set(5, &[0, 1])), Some(SetWitness { op: "lin0".into(), args: vec![0, 1] }));
        assert_eq!(is_convex_set(&omega5(), &Subset::full(5)), None);
    }

    #[test]
    fn extreme_set_examples() {
        assert_eq!(is_extreme_set(&min_family(6), &set(6, &[3, 4, 5])), None);
        let w = is_extreme_set(&min_family(6), &set(6, &[1, 2])).expect("witness");
        assert_eq!(w.args, vec![1, 3]);
        assert_eq!(is_extreme_set(&min_family(6), &Subset::empty(6)), None);
    }

    #[test]
    fn hull_examples() {
        assert_eq!(convex_hull(&min_family(4), &set(4, &[1, 3])), set(4, &[1, 3]));
        assert_eq!(convex_hull(&omega5(), &set(5, &[0, 1])), Subset::full(5));
        assert_eq!(convex_hull(&omega5(), &Subset::empty(5)), Subset::empty(5));
        assert_eq!(extreme_hull(&min_family(4), &set(4, &[2])), set(4, &[2, 3]));
        assert_eq!(extreme_hull(&min_family(4), &set(4, &[0])), Subset::full(4));
        assert_eq!(extreme_hull(&min_family(4), &Subset::full(4)), Subset::full(4));
    }

    #[test]
    fn interior_and_boundary() {
        assert_eq!(omega_interior(&min_family(4)), set(4, &[0]));
        assert_eq!(omega_boundary(&min_family(4)), set(4, &[1, 2, 3]));
        assert_eq!(omega_interior(&omega5()), Subset::full(5));
        assert_eq!(omega_boundary(&omega5()), Subset::empty(5));
        let bare = OperationFamily::new(Carrier::new(3).unwrap());
        assert_eq!(omega_interior(&bare), Subset::empty(3));
        let single = OperationFamily::new(Carrier::new(1).unwrap());
        assert_eq!(omega_interior(&single), Subset::full(1));
        assert_eq!(omega_boundary(&single), Subset::empty(1));
    }

    #[test]
    fn bitset_basics() {
        let a = set(70, &[0, 65, 69]);
        assert!(a.contains(65) && !a.contains(64));
        assert_eq!(a.count(), 3);
        assert_eq!(a.complement().count(), 67);
        assert!(a.is_subset(&a.union(&set(70, &[3]))));
        assert_eq!(Subset::from_mask(3, 0b101), set(3, &[0, 2]));
    }
}
