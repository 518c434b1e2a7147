//! Supporting (ω, Ω)-affine minorants: construction, verification, and the
//! specialised front ends for semigroups, cones, dyadic chains and delta-convex maps.
//!
//! Every certificate is re-checked in exact arithmetic before it is returned.

mod builder;
mod delta;
mod extend;
mod mt2;
mod semigroup;

pub use delta::{check_delta_convex, delta_support, verify_delta_certificate, DeltaCertificate, DeltaChecks, DeltaInstance};
pub use extend::{
    support_at_point, support_extend, verify_support_certificate, CertificateChecks, Hypothesis, HypothesisReport,
    SupportBackend, SupportCertificate, SupportInstance, SupportOptions, SupportSearch,
};
pub use mt2::{
    mt2_compile, ri_certificate, verify_ri_chain, Mt2Instance, Polytope, RiCertificate, RiChecks, RiInstance,
    DEFAULT_N_MAX,
};
pub use semigroup::{
    default_multipliers, subadditive_support, sublinear_support, SublinearCertificate, SublinearChecks,
    DEFAULT_MULTIPLIERS,
};

use thiserror::Error;

use crate::algebra::{AlgebraError, Element};
use crate::functions::FunctionError;
use crate::lp::LpError;
use crate::order::{Norm, OrderError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SupportError {
    #[error("hypothesis {name} fails: {detail}")]
    HypothesisFailure { name: Hypothesis, detail: String },
    #[error("no certificate exists; active constraints: {}", active.join("; "))]
    Infeasible { active: Vec<String> },
    #[error("certificate search failed on an instance whose hypotheses hold; active constraints: {}", active.join("; "))]
    TheoremViolation { active: Vec<String> },
    #[error("resource limit reached: {0}")]
    ResourceLimit(String),
    #[error("point {0} is not an interior point")]
    NotInterior(Element),
    #[error("operation {op:?} on the {side} is not reflexive")]
    NotReflexive { side: &'static str, op: String },
    #[error("not subadditive at ({0}, {1})")]
    NotSubadditive(Element, Element),
    #[error("not sublinear at sample points {x} and {y} with multipliers {t} and {s}")]
    NotSublinear { x: usize, y: usize, t: String, s: String },
    #[error("condition ({condition}) fails: {detail}")]
    ConditionFailure { condition: &'static str, detail: String },
    #[error("the order cone is not sharp")]
    NotSharp,
    #[error("delta convexity fails at sample points {0} and {1}")]
    NotDeltaConvex(usize, usize),
    #[error("no n up to {n_max} puts p + 2^-n (p - x) inside the set")]
    NotRelativeInterior { n_max: u32 },
    #[error("norm {0:?} is not supported here")]
    UnsupportedNorm(Norm),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal error: {0}")]
    Internal(&'static str),
    #[error(transparent)]
    Function(FunctionError),
    #[error(transparent)]
    Order(OrderError),
    #[error(transparent)]
    Algebra(AlgebraError),
}

impl From<LpError> for SupportError {
    fn from(e: LpError) -> Self {
        match e {
            LpError::ResourceLimit(n) => SupportError::ResourceLimit(format!("pivot limit of {n} reached")),
            LpError::Internal(msg) => SupportError::Internal(msg),
            LpError::Shape { .. } => SupportError::Internal("linear program shape mismatch"),
            LpError::MissingObjective => SupportError::Internal("missing objective"),
        }
    }
}

impl From<AlgebraError> for SupportError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::ResourceLimit { cells, limit } => {
                SupportError::ResourceLimit(format!("{cells} cells needed, limit {limit}"))
            }
            other => SupportError::Algebra(other),
        }
    }
}

impl From<OrderError> for SupportError {
    fn from(e: OrderError) -> Self {
        match e {
            OrderError::Lp(lp) => lp.into(),
            OrderError::NotSharp => SupportError::NotSharp,
            OrderError::UnsupportedNorm(n) => SupportError::UnsupportedNorm(n),
            other => SupportError::Order(other),
        }
    }
}

impl From<FunctionError> for SupportError {
    fn from(e: FunctionError) -> Self {
        match e {
            FunctionError::Order(o) => o.into(),
            FunctionError::Algebra(a) => a.into(),
            other => SupportError::Function(other),
        }
    }
}
