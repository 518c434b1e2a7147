//! Exact rational linear programming.
//!
//! A dense two-phase primal simplex over [`Rational`] with Bland's pivoting
//! rule. There are no tolerances: every comparison is an exact rational
//! comparison, and every point, ray and infeasibility certificate is
//! re-substituted into the original program before it is returned.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{dot, zeros, QVec, Rational};

pub const DEFAULT_MAX_PIVOTS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: QVec,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn holds_at(&self, point: &[Rational]) -> bool {
        let lhs = dot(&self.coeffs, point);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub sense: Sense,
    pub coeffs: QVec,
}

/// Per-variable bounds; `None` is an infinite bound.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bound {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

/// A linear program over `num_vars` variables. Variables are free unless bounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    num_vars: usize,
    rows: Vec<Constraint>,
    bounds: Vec<Bound>,
    objective: Option<Objective>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            rows: Vec::new(),
            bounds: vec![Bound::default(); num_vars],
            objective: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    pub fn objective(&self) -> Option<&Objective> {
        self.objective.as_ref()
    }

    pub fn add_row(&mut self, coeffs: QVec, relation: Relation, rhs: Rational) -> Result<usize, LpError> {
        if coeffs.len() != self.num_vars {
            return Err(LpError::Shape { expected: self.num_vars, found: coeffs.len() });
        }
        self.rows.push(Constraint { coeffs, relation, rhs });
        Ok(self.rows.len() - 1)
    }

    /// Adds a row given as sparse `(variable, coefficient)` terms.
    pub fn add_sparse_row(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) -> usize {
        let mut coeffs = zeros(self.num_vars);
        for (var, c) in terms {
            coeffs[*var] = &coeffs[*var] + c;
        }
        self.rows.push(Constraint { coeffs, relation, rhs });
        self.rows.len() - 1
    }

    /// Appends `count` free variables with zero coefficients everywhere; returns the first new index.
    pub fn add_variables(&mut self, count: usize) -> usize {
        let first = self.num_vars;
        self.num_vars += count;
        for row in &mut self.rows {
            row.coeffs.resize(self.num_vars, Rational::zero());
        }
        if let Some(obj) = &mut self.objective {
            obj.coeffs.resize(self.num_vars, Rational::zero());
        }
        self.bounds.resize(self.num_vars, Bound::default());
        first
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<Rational>, upper: Option<Rational>) {
        self.bounds[var] = Bound { lower, upper };
    }

    pub fn set_nonnegative(&mut self, var: usize) {
        self.bounds[var].lower = Some(Rational::zero());
    }

    pub fn set_objective(&mut self, sense: Sense, coeffs: QVec) -> Result<(), LpError> {
        if coeffs.len() != self.num_vars {
            return Err(LpError::Shape { expected: self.num_vars, found: coeffs.len() });
        }
        self.objective = Some(Objective { sense, coeffs });
        Ok(())
    }

    pub fn is_feasible_point(&self, point: &[Rational]) -> bool {
        point.len() == self.num_vars
            && self.rows.iter().all(|r| r.holds_at(point))
            && self.bounds.iter().zip(point).all(|(b, x)| {
                b.lower.as_ref().is_none_or(|l| x >= l) && b.upper.as_ref().is_none_or(|u| x <= u)
            })
    }

    /// Checks that `ray` is a recession direction improving the objective.
    pub fn is_improving_ray(&self, ray: &[Rational]) -> bool {
        let Some(obj) = &self.objective else { return false };
        if ray.len() != self.num_vars || ray.iter().all(Zero::is_zero) {
            return false;
        }
        let rows_ok = self.rows.iter().all(|r| {
            let v = dot(&r.coeffs, ray);
            match r.relation {
                Relation::Le => !v.is_positive(),
                Relation::Eq => v.is_zero(),
                Relation::Ge => !v.is_negative(),
            }
        });
        let bounds_ok = self.bounds.iter().zip(ray).all(|(b, d)| {
            (b.lower.is_none() || !d.is_negative()) && (b.upper.is_none() || !d.is_positive())
        });
        let gain = dot(&obj.coeffs, ray);
        let improving = match obj.sense {
            Sense::Maximize => gain.is_positive(),
            Sense::Minimize => gain.is_negative(),
        };
        rows_ok && bounds_ok && improving
    }
}

/// Farkas-style proof of infeasibility.
///
/// Every row is read in `≥` form (`≤` rows negated); multipliers of inequality
/// rows and of bounds are nonnegative, multipliers of equality rows are free.
/// The combination has zero left-hand side and a positive right-hand side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub row_multipliers: QVec,
    pub lower_bound_multipliers: QVec,
    pub upper_bound_multipliers: QVec,
}

impl FarkasCertificate {
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        let n = lp.num_vars;
        if self.row_multipliers.len() != lp.rows.len()
            || self.lower_bound_multipliers.len() != n
            || self.upper_bound_multipliers.len() != n
        {
            return false;
        }
        let mut lhs = zeros(n);
        let mut rhs = Rational::zero();
        for (row, lambda) in lp.rows.iter().zip(&self.row_multipliers) {
            let sign = match row.relation {
                Relation::Le => -Rational::one(),
                Relation::Ge => Rational::one(),
                Relation::Eq => Rational::one(),
            };
            if row.relation != Relation::Eq && lambda.is_negative() {
                return false;
            }
            let k = &sign * lambda;
            for (acc, c) in lhs.iter_mut().zip(&row.coeffs) {
                *acc = &*acc + &k * c;
            }
            rhs += &k * &row.rhs;
        }
        for (j, bound) in lp.bounds.iter().enumerate() {
            let ml = &self.lower_bound_multipliers[j];
            let mu = &self.upper_bound_multipliers[j];
            if ml.is_negative() || mu.is_negative() {
                return false;
            }
            if !ml.is_zero() {
                let Some(l) = &bound.lower else { return false };
                lhs[j] = &lhs[j] + ml;
                rhs += ml * l;
            }
            if !mu.is_zero() {
                let Some(u) = &bound.upper else { return false };
                lhs[j] = &lhs[j] - mu;
                rhs -= mu * u;
            }
        }
        lhs.iter().all(Zero::is_zero) && rhs.is_positive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Point(QVec),
    Infeasible(FarkasCertificate),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Optimum {
    Optimal { point: QVec, value: Rational },
    /// `point` is feasible and `point + s·ray` stays feasible for all `s ≥ 0`.
    Unbounded { point: QVec, ray: QVec },
    Infeasible(FarkasCertificate),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("coefficient vector has length {found}, expected {expected}")]
    Shape { expected: usize, found: usize },
    #[error("pivot limit of {0} reached")]
    ResourceLimit(u64),
    #[error("optimization requested without an objective")]
    MissingObjective,
    #[error("internal solver error: {0}")]
    Internal(&'static str),
}

/// Simplex driver with a pivot budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Solver {
    pub max_pivots: u64,
}

impl Default for Solver {
    fn default() -> Self {
        Solver { max_pivots: DEFAULT_MAX_PIVOTS }
    }
}

pub fn lp_feasible(lp: &LinearProgram) -> Result<Feasibility, LpError> {
    Solver::default().feasible(lp)
}

pub fn lp_optimize(lp: &LinearProgram) -> Result<Optimum, LpError> {
    Solver::default().optimize(lp)
}

impl Solver {
    pub fn new(max_pivots: u64) -> Self {
        Solver { max_pivots }
    }

    pub fn feasible(&self, lp: &LinearProgram) -> Result<Feasibility, LpError> {
        let mut sf = StandardForm::build(lp);
        let mut pivots = 0;
        match sf.phase_one(self.max_pivots, &mut pivots)? {
            PhaseOne::Infeasible(cert) => {
                if !cert.verify(lp) {
                    return Err(LpError::Internal("infeasibility certificate fails re-substitution"));
                }
                Ok(Feasibility::Infeasible(cert))
            }
            PhaseOne::Feasible => {
                let point = sf.current_point();
                if !lp.is_feasible_point(&point) {
                    return Err(LpError::Internal("phase-one point fails re-substitution"));
                }
                Ok(Feasibility::Point(point))
            }
        }
    }

    pub fn optimize(&self, lp: &LinearProgram) -> Result<Optimum, LpError> {
        let obj = lp.objective.as_ref().ok_or(LpError::MissingObjective)?;
        let mut sf = StandardForm::build(lp);
        let mut pivots = 0;
        if let PhaseOne::Infeasible(cert) = sf.phase_one(self.max_pivots, &mut pivots)? {
            if !cert.verify(lp) {
                return Err(LpError::Internal("infeasibility certificate fails re-substitution"));
            }
            return Ok(Optimum::Infeasible(cert));
        }
        // Phase two minimizes; maximization negates the objective.
        let mut costs = zeros(sf.num_cols);
        for (col, map) in sf.col_map.iter().enumerate() {
            if let Some((var, sign)) = map {
                let c = &obj.coeffs[*var] * sign;
                costs[col] = match obj.sense {
                    Sense::Minimize => c,
                    Sense::Maximize => -c,
                };
            }
        }
        let allowed: Vec<bool> = (0..sf.num_cols).map(|c| c < sf.first_artificial).collect();
        match sf.tableau.run(&costs, &allowed, self.max_pivots, &mut pivots)? {
            SimplexEnd::Optimal => {
                let point = sf.current_point();
                if !lp.is_feasible_point(&point) {
                    return Err(LpError::Internal("optimal point fails re-substitution"));
                }
                let value = dot(&obj.coeffs, &point);
                Ok(Optimum::Optimal { point, value })
            }
            SimplexEnd::Unbounded(col) => {
                let point = sf.current_point();
                let ray = sf.ray_for(col);
                if !lp.is_feasible_point(&point) || !lp.is_improving_ray(&ray) {
                    return Err(LpError::Internal("unbounded ray fails re-substitution"));
                }
                Ok(Optimum::Unbounded { point, ray })
            }
        }
    }
}

enum SimplexEnd {
    Optimal,
    Unbounded(usize),
}

enum PhaseOne {
    Feasible,
    Infeasible(FarkasCertificate),
}

struct Tableau {
    rows: Vec<QVec>,
    rhs: QVec,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = &*v / &p;
                }
            }
            self.rhs[r] = &self.rhs[r] / &p;
        }
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let factor = self.rows[i][c].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = &*v - &factor * pv;
                }
            }
            self.rhs[i] = &self.rhs[i] - &factor * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, costs: &[Rational]) -> QVec {
        let mut rc = costs.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (r, t) in rc.iter_mut().zip(&self.rows[i]) {
                if !t.is_zero() {
                    *r = &*r - cb * t;
                }
            }
        }
        rc
    }

    fn objective_value(&self, costs: &[Rational]) -> Rational {
        self.basis.iter().zip(&self.rhs).fold(Rational::zero(), |acc, (&b, v)| acc + &costs[b] * v)
    }

    /// Minimizes `costs` from the current basic feasible solution using Bland's rule.
    fn run(&mut self, costs: &[Rational], allowed: &[bool], cap: u64, pivots: &mut u64) -> Result<SimplexEnd, LpError> {
        loop {
            let rc = self.reduced_costs(costs);
            let Some(enter) = (0..rc.len()).find(|&j| allowed[j] && rc[j].is_negative()) else {
                return Ok(SimplexEnd::Optimal);
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return Ok(SimplexEnd::Unbounded(enter));
            };
            if *pivots >= cap {
                return Err(LpError::ResourceLimit(cap));
            }
            *pivots += 1;
            self.pivot(row, enter);
        }
    }
}

/// The program rewritten as `T z = b, z ≥ 0, b ≥ 0` with one artificial per row.
struct StandardForm {
    tableau: Tableau,
    num_vars: usize,
    num_cols: usize,
    first_artificial: usize,
    /// Structural column → (original variable, sign) with `x = offset + sign·z`.
    col_map: Vec<Option<(usize, Rational)>>,
    offsets: QVec,
    /// Internal row → (original row index or `None` for an upper-bound row on `var`, flip sign).
    row_origin: Vec<(RowOrigin, Rational)>,
    source_rows: Vec<(QVec, Relation)>,
}

#[derive(Clone, Copy)]
enum RowOrigin {
    Row(usize),
    Upper(usize),
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars;
        let mut col_map: Vec<Option<(usize, Rational)>> = Vec::new();
        let mut offsets = zeros(n);
        // Internal rows expressed over original variables: (coeffs, relation, rhs, origin).
        let mut internal: Vec<(QVec, Relation, Rational, RowOrigin)> = lp
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.coeffs.clone(), r.relation, r.rhs.clone(), RowOrigin::Row(i)))
            .collect();
        for (j, b) in lp.bounds.iter().enumerate() {
            match (&b.lower, &b.upper) {
                (Some(l), upper) => {
                    offsets[j] = l.clone();
                    col_map.push(Some((j, Rational::one())));
                    if let Some(u) = upper {
                        let mut coeffs = zeros(n);
                        coeffs[j] = Rational::one();
                        internal.push((coeffs, Relation::Le, u.clone(), RowOrigin::Upper(j)));
                    }
                }
                (None, Some(u)) => {
                    offsets[j] = u.clone();
                    col_map.push(Some((j, -Rational::one())));
                }
                (None, None) => {
                    col_map.push(Some((j, Rational::one())));
                    col_map.push(Some((j, -Rational::one())));
                }
            }
        }
        let num_struct = col_map.len();
        let slack_rows: Vec<usize> =
            (0..internal.len()).filter(|&i| internal[i].1 != Relation::Eq).collect();
        let num_slack = slack_rows.len();
        let m = internal.len();
        let first_artificial = num_struct + num_slack;
        let num_cols = first_artificial + m;
        for _ in 0..num_slack + m {
            col_map.push(None);
        }

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut row_origin = Vec::with_capacity(m);
        for (i, (coeffs, rel, b, origin)) in internal.iter().enumerate() {
            let mut row = zeros(num_cols);
            for (col, map) in col_map.iter().take(num_struct).enumerate() {
                if let Some((var, sign)) = map {
                    row[col] = &coeffs[*var] * sign;
                }
            }
            if let Some(pos) = slack_rows.iter().position(|&s| s == i) {
                row[num_struct + pos] = match rel {
                    Relation::Le => Rational::one(),
                    _ => -Rational::one(),
                };
            }
            let mut b = b - dot(coeffs, &offsets);
            let flip = if b.is_negative() { -Rational::one() } else { Rational::one() };
            if b.is_negative() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
                b = -b;
            }
            row[first_artificial + i] = Rational::one();
            rows.push(row);
            rhs.push(b);
            row_origin.push((*origin, flip));
        }
        let basis = (0..m).map(|i| first_artificial + i).collect();
        StandardForm {
            tableau: Tableau { rows, rhs, basis },
            num_vars: n,
            num_cols,
            first_artificial,
            col_map,
            offsets,
            row_origin,
            source_rows: lp.rows.iter().map(|r| (r.coeffs.clone(), r.relation)).collect(),
        }
    }

    fn phase_one(&mut self, cap: u64, pivots: &mut u64) -> Result<PhaseOne, LpError> {
        let mut costs = zeros(self.num_cols);
        for c in costs.iter_mut().skip(self.first_artificial) {
            *c = Rational::one();
        }
        let allowed = vec![true; self.num_cols];
        match self.tableau.run(&costs, &allowed, cap, pivots)? {
            SimplexEnd::Optimal => {}
            SimplexEnd::Unbounded(_) => return Err(LpError::Internal("phase one cannot be unbounded")),
        }
        if self.tableau.objective_value(&costs).is_positive() {
            let rc = self.tableau.reduced_costs(&costs);
            let duals: QVec = (0..self.tableau.rows.len())
                .map(|i| Rational::one() - &rc[self.first_artificial + i])
                .collect();
            return Ok(PhaseOne::Infeasible(self.certificate_from_duals(&duals)?));
        }
        self.drive_out_artificials();
        Ok(PhaseOne::Feasible)
    }

    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.tableau.rows.len() {
            if self.tableau.basis[i] >= self.first_artificial {
                let col = (0..self.first_artificial).find(|&c| !self.tableau.rows[i][c].is_zero());
                match col {
                    Some(c) => {
                        self.tableau.pivot(i, c);
                        i += 1;
                    }
                    None => {
                        // Redundant row.
                        self.tableau.rows.remove(i);
                        self.tableau.rhs.remove(i);
                        self.tableau.basis.remove(i);
                        self.row_origin.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    fn certificate_from_duals(&self, duals: &[Rational]) -> Result<FarkasCertificate, LpError> {
        let n = self.num_vars;
        let mut rows = zeros(self.source_rows.len());
        let mut lower = zeros(n);
        let mut upper = zeros(n);
        for ((origin, flip), y) in self.row_origin.iter().zip(duals) {
            let nu = flip * y;
            match origin {
                RowOrigin::Row(i) => {
                    rows[*i] = nu;
                }
                // An upper-bound row x_j ≤ u carries a nonpositive multiplier.
                RowOrigin::Upper(j) => upper[*j] = -nu,
            }
        }
        // Remaining imbalance is absorbed by the finite bounds that produced the offsets.
        let lp_relations = &self.source_rows;
        let mut residual = zeros(n);
        for (i, nu) in rows.iter().enumerate() {
            if nu.is_zero() {
                continue;
            }
            for (r, c) in residual.iter_mut().zip(&lp_relations[i].0) {
                *r = &*r + nu * c;
            }
        }
        for j in 0..n {
            residual[j] = &residual[j] - &upper[j];
            if residual[j].is_negative() {
                lower[j] = -residual[j].clone();
            } else if residual[j].is_positive() {
                upper[j] = &upper[j] + &residual[j];
            }
        }
        let row_multipliers: QVec = rows
            .into_iter()
            .zip(lp_relations)
            .map(|(nu, (_, rel))| if *rel == Relation::Le { -nu } else { nu })
            .collect();
        Ok(FarkasCertificate {
            row_multipliers,
            lower_bound_multipliers: lower,
            upper_bound_multipliers: upper,
        })
    }

    fn current_point(&self) -> QVec {
        let mut z = zeros(self.num_cols);
        for (i, &b) in self.tableau.basis.iter().enumerate() {
            z[b] = self.tableau.rhs[i].clone();
        }
        let mut x = self.offsets.clone();
        for (col, map) in self.col_map.iter().enumerate() {
            if let Some((var, sign)) = map {
                if !z[col].is_zero() {
                    x[*var] = &x[*var] + sign * &z[col];
                }
            }
        }
        x
    }

    fn ray_for(&self, enter: usize) -> QVec {
        let mut z = zeros(self.num_cols);
        z[enter] = Rational::one();
        for (i, &b) in self.tableau.basis.iter().enumerate() {
            z[b] = -self.tableau.rows[i][enter].clone();
        }
        let mut ray = zeros(self.num_vars);
        for (col, map) in self.col_map.iter().enumerate() {
            if let Some((var, sign)) = map {
                if !z[col].is_zero() {
                    ray[*var] = &ray[*var] + sign * &z[col];
                }
            }
        }
        ray
    }
}
