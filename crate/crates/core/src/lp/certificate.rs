use super::{tol, LinearProgram, LpSolution, Relation};

/// Optimality certificates recomputed from scratch.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub primal_residual: f64,
    pub primal_ok: bool,
    pub dual_violation: f64,
    pub dual_ok: bool,
    pub complementarity: f64,
    pub complementarity_ok: bool,
    pub duality_gap: f64,
    pub gap_ok: bool,
}

impl CertificateReport {
    pub fn all_pass(&self) -> bool {
        self.primal_ok && self.dual_ok && self.complementarity_ok && self.gap_ok
    }
}

fn inf_norm<'a>(v: impl IntoIterator<Item = &'a f64>) -> f64 {
    v.into_iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

pub fn verify_certificates(lp: &LinearProgram, sol: &LpSolution) -> CertificateReport {
    let x = &sol.primal;
    let n = lp.num_vars();
    let activity = lp.row_activity(x);

    let b_norm = inf_norm(lp.rows.iter().map(|r| &r.rhs))
        .max(inf_norm(&lp.lower))
        .max(inf_norm(lp.upper.iter().flatten()));
    let c_norm = inf_norm(&lp.objective);
    let x_norm = inf_norm(x);
    let y_norm = inf_norm(&sol.dual).max(inf_norm(&sol.upper_dual));

    // Primal feasibility.
    let mut primal_residual = 0.0f64;
    for (r, a) in lp.rows.iter().zip(&activity) {
        let v = match r.relation {
            Relation::Le => (a - r.rhs).max(0.0),
            Relation::Ge => (r.rhs - a).max(0.0),
            Relation::Eq => (a - r.rhs).abs(),
        };
        primal_residual = primal_residual.max(v);
    }
    for j in 0..n {
        primal_residual = primal_residual.max(lp.lower[j] - x[j]);
        if let Some(u) = lp.upper[j] {
            primal_residual = primal_residual.max(x[j] - u);
        }
    }

    // Dual feasibility: sign of row duals and nonnegative reduced costs.
    let d = sol.reduced_costs(lp);
    let mut dual_violation = 0.0f64;
    for (r, y) in lp.rows.iter().zip(&sol.dual) {
        let v = match r.relation {
            Relation::Le => y.max(0.0),
            Relation::Ge => (-y).max(0.0),
            Relation::Eq => 0.0,
        };
        dual_violation = dual_violation.max(v);
    }
    for j in 0..n {
        dual_violation = dual_violation.max(sol.upper_dual[j].max(0.0));
        if lp.upper[j].is_none() && sol.upper_dual[j] != 0.0 {
            dual_violation = dual_violation.max(sol.upper_dual[j].abs());
        }
        dual_violation = dual_violation.max(-d[j]);
    }

    // Complementary slackness.
    let mut complementarity = 0.0f64;
    for ((r, a), y) in lp.rows.iter().zip(&activity).zip(&sol.dual) {
        complementarity = complementarity.max((y * (r.rhs - a)).abs());
    }
    for j in 0..n {
        complementarity = complementarity.max((d[j] * (x[j] - lp.lower[j])).abs());
        if let Some(u) = lp.upper[j] {
            complementarity = complementarity.max((sol.upper_dual[j] * (u - x[j])).abs());
        }
    }

    // Duality gap.
    let primal_obj = lp.objective_value(x);
    let mut dual_obj: f64 = lp.rows.iter().zip(&sol.dual).map(|(r, y)| r.rhs * y).sum();
    for j in 0..n {
        dual_obj += lp.lower[j] * d[j];
        if let Some(u) = lp.upper[j] {
            dual_obj += u * sol.upper_dual[j];
        }
    }
    let duality_gap = (primal_obj - dual_obj).abs();

    let t = tol::CERTIFICATE;
    CertificateReport {
        primal_ok: primal_residual <= t * (1.0 + b_norm),
        primal_residual,
        dual_ok: dual_violation <= t * (1.0 + c_norm),
        dual_violation,
        complementarity_ok: complementarity <= t * (1.0 + c_norm.max(y_norm)) * (1.0 + x_norm.max(b_norm)),
        complementarity,
        gap_ok: duality_gap <= t * (1.0 + primal_obj.abs()),
        duality_gap,
    }
}
