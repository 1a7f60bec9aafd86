//! Small dense-basis linear programming solver.
//!
//! Problems are always minimizations. Dual sign convention: a `<=` row has a
//! nonpositive dual, a `>=` row a nonnegative dual and an `=` row a free dual,
//! so that the reduced cost of column `j` is `c_j - sum_i y_i a_ij` and is
//! nonnegative at an optimum (minus the upper-bound dual for variables at
//! their upper bound).

mod certificate;
mod dump;
mod simplex;

pub use certificate::{verify_certificates, CertificateReport};
pub use dump::write_lp_format;

use serde::{Deserialize, Serialize};

/// Central tolerance table.
pub mod tol {
    /// Relative tolerance on certificates (primal/dual feasibility,
    /// complementary slackness, duality gap).
    pub const CERTIFICATE: f64 = 1e-7;
    /// Relative tolerance on reduced costs when choosing entering columns.
    pub const OPTIMALITY: f64 = 1e-9;
    /// Smallest pivot element accepted in a ratio test.
    pub const PIVOT: f64 = 1e-9;
    /// Relative phase-one objective above which a problem is infeasible.
    pub const PHASE_ONE: f64 = 1e-8;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// Sparse coefficients `(variable, value)`.
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `min c.x  s.t.  rows,  lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub lower: Vec<f64>,
    pub upper: Vec<Option<f64>>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            lower: vec![0.0; num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_var(&mut self, cost: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(0.0);
        self.upper.push(None);
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.rows.push(Row { coeffs, relation, rhs });
        self.rows.len() - 1
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Dimension("bound vectors must match the objective length".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("objective"));
        }
        for (i, r) in self.rows.iter().enumerate() {
            if !r.rhs.is_finite() {
                return Err(LpError::NonFinite("right-hand side"));
            }
            for &(j, a) in &r.coeffs {
                if j >= n {
                    return Err(LpError::Dimension(format!("row {i} references variable {j} of {n}")));
                }
                if !a.is_finite() {
                    return Err(LpError::NonFinite("coefficient"));
                }
            }
        }
        for j in 0..n {
            if !self.lower[j].is_finite() || self.upper[j].is_some_and(|u| !u.is_finite()) {
                return Err(LpError::NonFinite("bound"));
            }
        }
        Ok(())
    }

    /// `a_i . x` for every row.
    pub fn row_activity(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.coeffs.iter().map(|&(j, a)| a * x[j]).sum()).collect()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite {0}")]
    NonFinite(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// One dual per row, signed per the module convention.
    pub dual: Vec<f64>,
    /// Dual of each variable's upper bound (nonpositive, zero when unbounded
    /// above or not at the bound).
    pub upper_dual: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// `c_j - sum_i y_i a_ij - w_j` for every variable.
    pub fn reduced_costs(&self, lp: &LinearProgram) -> Vec<f64> {
        let mut d: Vec<f64> = lp.objective.iter().zip(&self.upper_dual).map(|(c, w)| c - w).collect();
        for (r, y) in lp.rows.iter().zip(&self.dual) {
            for &(j, a) in &r.coeffs {
                d[j] -= y * a;
            }
        }
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Pivot cap; `None` means `50 * (rows + cols)`.
    pub max_iterations: Option<usize>,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub stall_threshold: usize,
    /// Pivots between basis reinversions.
    pub refactor_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iterations: None, stall_threshold: 30, refactor_every: 64 }
    }
}

/// Solves `lp` with default options.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    solve_lp_with(lp, &SolverOptions::default())
}

pub fn solve_lp_with(lp: &LinearProgram, opts: &SolverOptions) -> Result<LpSolution, LpError> {
    lp.validate()?;
    Ok(simplex::solve(lp, opts))
}
