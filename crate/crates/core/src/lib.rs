//! Generalized convexity over families of finitary operations.
//!
//! The crate works on finite carriers with operations given as tables and on
//! ranges that are either finite posets or `ℚ^d` ordered by a rational cone.
//! All arithmetic is exact.

pub mod algebra;
pub mod convexity;
pub mod functions;
pub mod lp;
pub mod order;
pub mod rational;
pub mod support;

pub use algebra::{Carrier, Element, Operation, OperationFamily};
pub use convexity::Subset;
pub use order::{FinitePoset, Norm, RationalCone};
pub use rational::{QMatrix, QVec, Rational};

/// Resource caps shared by the exhaustive and LP-based procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Upper bound on the number of table cells or tuples a single check may enumerate.
    pub max_cells: u64,
    /// Upper bound on simplex pivots per solve.
    pub max_pivots: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_cells: 10_000_000, max_pivots: lp::DEFAULT_MAX_PIVOTS }
    }
}
