//! Labelled linear programs and cone constraints shared by the support solvers.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::lp::{FarkasCertificate, LinearProgram, Optimum, Relation, Sense, Solver};
use crate::order::{is_sharp_with, Norm, RationalCone, Sharpness};
use crate::rational::{QVec, Rational};

use super::SupportError;

/// A sparse linear form `Σ cᵢ xᵢ`.
pub(crate) type Terms = Vec<(usize, Rational)>;

pub(crate) enum Outcome {
    Point(QVec),
    Infeasible(Vec<String>),
}

pub(crate) struct LpBuilder {
    lp: LinearProgram,
    row_labels: Vec<String>,
    var_labels: Vec<String>,
    seen_rows: BTreeSet<(Terms, Rational)>,
}

impl LpBuilder {
    pub fn new() -> Self {
        LpBuilder { lp: LinearProgram::new(0), row_labels: Vec::new(), var_labels: Vec::new(), seen_rows: BTreeSet::new() }
    }

    pub fn vars(&mut self, count: usize, label: impl Fn(usize) -> String) -> usize {
        let first = self.lp.add_variables(count);
        self.var_labels.extend((0..count).map(label));
        first
    }

    /// Adds `terms rel rhs`, merging repeated variables; zero rows and exact duplicates of earlier equalities are dropped.
    pub fn row(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational, label: impl FnOnce() -> String) {
        let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
        for (v, c) in terms {
            *merged.entry(*v).or_insert_with(Rational::zero) += c;
        }
        let canonical: Terms = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if canonical.is_empty() && relation == Relation::Eq && rhs.is_zero() {
            return;
        }
        if relation == Relation::Eq && !self.seen_rows.insert((canonical.clone(), rhs.clone())) {
            return;
        }
        self.lp.add_sparse_row(&canonical, relation, rhs);
        self.row_labels.push(label());
    }

    pub fn fix(&mut self, var: usize, value: Rational) {
        self.lp.set_bounds(var, Some(value.clone()), Some(value));
    }

    pub fn nonnegative(&mut self, var: usize) {
        self.lp.set_nonnegative(var);
    }

    /// Constrains `target − expr ∈ K`, where `expr[j]` is the j-th coordinate as a linear form.
    pub fn cone_slack(
        &mut self,
        cone: &RationalCone,
        expr: &[Terms],
        target: &[Rational],
        label: &str,
    ) -> Result<(), SupportError> {
        if cone.is_positive_orthant() {
            for (j, (terms, t)) in expr.iter().zip(target).enumerate() {
                if let [(v, c)] = terms.as_slice() {
                    if c.is_one() && self.lp.bounds()[*v].upper.is_none() {
                        let lower = self.lp.bounds()[*v].lower.clone();
                        self.lp.set_bounds(*v, lower, Some(t.clone()));
                        continue;
                    }
                }
                self.row(terms, Relation::Le, t.clone(), || format!("{label} coordinate {j}"));
            }
            return Ok(());
        }
        if let Some(rows) = cone.lorenz_halfspaces() {
            for (i, h) in rows.iter().enumerate() {
                let terms: Terms =
                    expr.iter().zip(h).flat_map(|(e, hj)| e.iter().map(move |(v, c)| (*v, c * hj))).collect();
                let rhs = h.iter().zip(target).map(|(a, b)| a * b).sum();
                self.row(&terms, Relation::Le, rhs, || format!("{label} facet {i}"));
            }
            return Ok(());
        }
        match cone {
            RationalCone::Polyhedral { generators, .. } => {
                let first = self.vars(generators.len(), |i| format!("{label} weight {i}"));
                for i in 0..generators.len() {
                    self.nonnegative(first + i);
                }
                for (j, (terms, t)) in expr.iter().zip(target).enumerate() {
                    let mut row = terms.clone();
                    row.extend(generators.iter().enumerate().map(|(i, g)| (first + i, g[j].clone())));
                    self.row(&row, Relation::Eq, t.clone(), || format!("{label} coordinate {j}"));
                }
                Ok(())
            }
            RationalCone::Lorenz { norm, .. } => Err(SupportError::UnsupportedNorm(*norm)),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.lp.num_vars()
    }

    fn active_labels(&self, cert: &FarkasCertificate) -> Vec<String> {
        let mut out: Vec<String> = cert
            .row_multipliers
            .iter()
            .zip(&self.row_labels)
            .filter(|(m, _)| !m.is_zero())
            .map(|(_, l)| l.clone())
            .collect();
        for (v, (lo, hi)) in cert.lower_bound_multipliers.iter().zip(&cert.upper_bound_multipliers).enumerate() {
            if lo.is_positive() {
                out.push(format!("lower bound of {}", self.var_labels[v]));
            }
            if hi.is_positive() {
                out.push(format!("upper bound of {}", self.var_labels[v]));
            }
        }
        out
    }

    /// Solves with the given objective, or as a pure feasibility problem when `objective` is `None`.
    pub fn solve(mut self, objective: Option<(Sense, QVec)>, max_pivots: u64) -> Result<Outcome, SupportError> {
        let solver = Solver::new(max_pivots);
        match objective {
            None => match solver.feasible(&self.lp)? {
                crate::lp::Feasibility::Point(p) => Ok(Outcome::Point(p)),
                crate::lp::Feasibility::Infeasible(cert) => Ok(Outcome::Infeasible(self.active_labels(&cert))),
            },
            Some((sense, coeffs)) => {
                self.lp.set_objective(sense, coeffs)?;
                match solver.optimize(&self.lp)? {
                    Optimum::Optimal { point, .. } => Ok(Outcome::Point(point)),
                    Optimum::Infeasible(cert) => Ok(Outcome::Infeasible(self.active_labels(&cert))),
                    Optimum::Unbounded { .. } => Err(SupportError::Internal("objective unbounded over a sharp cone")),
                }
            }
        }
    }
}

/// A functional strictly positive on the nonzero cone elements, if the cone is sharp.
pub(crate) fn positive_functional(cone: &RationalCone, max_pivots: u64) -> Result<Option<QVec>, SupportError> {
    match is_sharp_with(cone, &Solver::new(max_pivots))? {
        Sharpness::Sharp { phi } => Ok(Some(phi)),
        Sharpness::NotSharp { .. } => Ok(None),
    }
}

/// Rejects cones the linear backends cannot encode.
pub(crate) fn require_linear_cone(cone: &RationalCone) -> Result<(), SupportError> {
    match cone {
        RationalCone::Lorenz { norm: Norm::L2, .. } => Err(SupportError::UnsupportedNorm(Norm::L2)),
        _ => Ok(()),
    }
}
