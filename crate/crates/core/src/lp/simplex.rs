//! Two-phase revised simplex with an explicit dense basis inverse.

use super::{tol, LinearProgram, LpSolution, LpStatus, Relation, SolverOptions};

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural(usize),
    /// Slack of a normalized `<=` row or surplus of a `>=` row.
    Logical,
    Artificial,
}

struct Column {
    entries: Vec<(usize, f64)>,
    kind: ColKind,
}

/// Internal origin of a standard-form row.
#[derive(Clone, Copy)]
enum RowOrigin {
    Original(usize),
    UpperBound(usize),
}

struct Standard {
    m: usize,
    cols: Vec<Column>,
    rhs: Vec<f64>,
    /// +1 or -1: how the row was scaled to make `rhs >= 0`.
    sign: Vec<f64>,
    origin: Vec<RowOrigin>,
    /// Phase-two cost per column.
    cost: Vec<f64>,
    basis: Vec<usize>,
    /// Structural variable index -> column, `None` when fixed.
    var_col: Vec<Option<usize>>,
    cost_scale: f64,
    rhs_scale: f64,
}

fn to_standard(lp: &LinearProgram) -> Standard {
    let n = lp.num_vars();
    let fixed: Vec<bool> = (0..n).map(|j| lp.upper[j].is_some_and(|u| u <= lp.lower[j])).collect();

    // Row data in terms of shifted variables x' = x - lower.
    let mut rows: Vec<(Vec<(usize, f64)>, Relation, f64, RowOrigin)> = Vec::new();
    for (i, r) in lp.rows.iter().enumerate() {
        let mut rhs = r.rhs;
        let mut coeffs = Vec::with_capacity(r.coeffs.len());
        for &(j, a) in &r.coeffs {
            rhs -= a * lp.lower[j];
            if !fixed[j] && a != 0.0 {
                coeffs.push((j, a));
            }
        }
        rows.push((coeffs, r.relation, rhs, RowOrigin::Original(i)));
    }
    for j in 0..n {
        if let Some(u) = lp.upper[j] {
            if !fixed[j] {
                rows.push((vec![(j, 1.0)], Relation::Le, u - lp.lower[j], RowOrigin::UpperBound(j)));
            }
        }
    }

    let m = rows.len();
    let mut col_entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut rhs = Vec::with_capacity(m);
    let mut sign = Vec::with_capacity(m);
    let mut origin = Vec::with_capacity(m);
    let mut rel = Vec::with_capacity(m);
    for (i, (coeffs, relation, b, o)) in rows.into_iter().enumerate() {
        let s = if b < 0.0 { -1.0 } else { 1.0 };
        for (j, a) in coeffs {
            col_entries[j].push((i, s * a));
        }
        rhs.push(s * b);
        sign.push(s);
        origin.push(o);
        rel.push(match (relation, s < 0.0) {
            (Relation::Le, false) | (Relation::Ge, true) => Relation::Le,
            (Relation::Ge, false) | (Relation::Le, true) => Relation::Ge,
            (Relation::Eq, _) => Relation::Eq,
        });
    }

    let mut cols = Vec::with_capacity(n + 2 * m);
    let mut cost = Vec::with_capacity(n + 2 * m);
    let mut var_col = vec![None; n];
    for (j, entries) in col_entries.into_iter().enumerate() {
        if fixed[j] {
            continue;
        }
        var_col[j] = Some(cols.len());
        cols.push(Column { entries, kind: ColKind::Structural(j) });
        cost.push(lp.objective[j]);
    }
    let mut basis = vec![usize::MAX; m];
    for (i, r) in rel.iter().enumerate() {
        match r {
            Relation::Le => {
                basis[i] = cols.len();
                cols.push(Column { entries: vec![(i, 1.0)], kind: ColKind::Logical });
                cost.push(0.0);
            }
            Relation::Ge => {
                cols.push(Column { entries: vec![(i, -1.0)], kind: ColKind::Logical });
                cost.push(0.0);
            }
            Relation::Eq => {}
        }
    }
    for (i, r) in rel.iter().enumerate() {
        if *r != Relation::Le {
            basis[i] = cols.len();
            cols.push(Column { entries: vec![(i, 1.0)], kind: ColKind::Artificial });
            cost.push(0.0);
        }
    }

    let cost_scale = 1.0 + lp.objective.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let rhs_scale = 1.0 + rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    Standard { m, cols, rhs, sign, origin, cost, basis, var_col, cost_scale, rhs_scale }
}

struct Tableau<'a> {
    sf: &'a Standard,
    m: usize,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl<'a> Tableau<'a> {
    fn new(sf: &'a Standard) -> Self {
        let m = sf.m;
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        let mut in_basis = vec![false; sf.cols.len()];
        for &b in &sf.basis {
            in_basis[b] = true;
        }
        Tableau {
            sf,
            m,
            basis: sf.basis.clone(),
            in_basis,
            binv,
            xb: sf.rhs.clone(),
            iterations: 0,
            since_refactor: 0,
        }
    }

    /// Rebuilds `B^-1` from the basis columns by Gauss-Jordan elimination.
    fn refactor(&mut self) {
        let m = self.m;
        let mut b = vec![0.0; m * m];
        for (k, &c) in self.basis.iter().enumerate() {
            for &(i, a) in &self.sf.cols[c].entries {
                b[i * m + k] = a;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv = col;
            let mut best = b[col * m + col].abs();
            for r in (col + 1)..m {
                let v = b[r * m + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-14 {
                // Singular basis should not happen; keep the incremental inverse.
                return;
            }
            if piv != col {
                for k in 0..m {
                    b.swap(col * m + k, piv * m + k);
                    inv.swap(col * m + k, piv * m + k);
                }
            }
            let p = b[col * m + col];
            for k in 0..m {
                b[col * m + k] /= p;
                inv[col * m + k] /= p;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = b[r * m + col];
                if f != 0.0 {
                    for k in 0..m {
                        b[r * m + k] -= f * b[col * m + k];
                        inv[r * m + k] -= f * inv[col * m + k];
                    }
                }
            }
        }
        self.binv = inv;
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            self.xb[i] = row.iter().zip(&self.sf.rhs).map(|(a, b)| a * b).sum();
        }
        self.since_refactor = 0;
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (k, &c) in self.basis.iter().enumerate() {
            let cb = cost[c];
            if cb != 0.0 {
                let row = &self.binv[k * m..(k + 1) * m];
                for (yi, a) in y.iter_mut().zip(row) {
                    *yi += cb * a;
                }
            }
        }
        y
    }

    fn ftran(&self, col: usize) -> Vec<f64> {
        let m = self.m;
        let mut out = vec![0.0; m];
        for &(i, a) in &self.sf.cols[col].entries {
            for (r, o) in out.iter_mut().enumerate() {
                *o += self.binv[r * m + i] * a;
            }
        }
        out
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64]) {
        let m = self.m;
        let theta = self.xb[r] / alpha[r];
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * alpha[i];
            }
        }
        self.xb[r] = theta;
        let ar = alpha[r];
        for k in 0..m {
            self.binv[r * m + k] /= ar;
        }
        for i in 0..m {
            if i == r || alpha[i] == 0.0 {
                continue;
            }
            let f = alpha[i];
            for k in 0..m {
                self.binv[i * m + k] -= f * self.binv[r * m + k];
            }
        }
        self.in_basis[self.basis[r]] = false;
        self.basis[r] = q;
        self.in_basis[q] = true;
        self.iterations += 1;
        self.since_refactor += 1;
    }

    fn run(&mut self, cost: &[f64], phase_two: bool, max_iter: usize, opts: &SolverOptions) -> PhaseOutcome {
        let ncols = self.sf.cols.len();
        let opt_tol = tol::OPTIMALITY * if phase_two { self.sf.cost_scale } else { 1.0 };
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            if self.since_refactor >= opts.refactor_every {
                self.refactor();
            }
            let y = self.duals(cost);
            let mut enter = None;
            let mut best = -opt_tol;
            for j in 0..ncols {
                if self.in_basis[j] {
                    continue;
                }
                let col = &self.sf.cols[j];
                if phase_two && col.kind == ColKind::Artificial {
                    continue;
                }
                let d = cost[j] - col.entries.iter().map(|&(i, a)| y[i] * a).sum::<f64>();
                if bland {
                    if d < -opt_tol {
                        enter = Some(j);
                        break;
                    }
                } else if d < best {
                    best = d;
                    enter = Some(j);
                }
            }
            let Some(q) = enter else {
                return PhaseOutcome::Optimal;
            };
            if self.iterations >= max_iter {
                return PhaseOutcome::IterationLimit;
            }
            let alpha = self.ftran(q);
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.m {
                let a = alpha[i];
                let basic_art = phase_two && self.sf.cols[self.basis[i]].kind == ColKind::Artificial;
                let ratio = if basic_art && a.abs() > tol::PIVOT {
                    0.0
                } else if a > tol::PIVOT {
                    self.xb[i].max(0.0) / a
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some(l) => {
                        if ratio < best_ratio - 1e-12 {
                            true
                        } else if ratio <= best_ratio + 1e-12 {
                            if bland {
                                self.basis[i] < self.basis[l]
                            } else {
                                a.abs() > alpha[l].abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some(i);
                    best_ratio = best_ratio.min(ratio);
                }
            }
            let Some(r) = leave else {
                return PhaseOutcome::Unbounded;
            };
            if self.sf.cols[self.basis[r]].kind == ColKind::Artificial && phase_two {
                // Keep the artificial at exactly zero when driving it out.
                self.xb[r] = 0.0;
            }
            if best_ratio <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run >= opts.stall_threshold {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
            self.pivot(r, q, &alpha);
        }
    }

    /// Pivots basic artificials out at zero level where possible.
    fn drive_out_artificials(&mut self) {
        let m = self.m;
        for r in 0..m {
            if self.sf.cols[self.basis[r]].kind != ColKind::Artificial {
                continue;
            }
            let row: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
            let mut pick = None;
            for (j, col) in self.sf.cols.iter().enumerate() {
                if self.in_basis[j] || col.kind == ColKind::Artificial {
                    continue;
                }
                let v: f64 = col.entries.iter().map(|&(i, a)| row[i] * a).sum();
                if v.abs() > 1e-7 {
                    pick = Some(j);
                    break;
                }
            }
            if let Some(q) = pick {
                let alpha = self.ftran(q);
                self.xb[r] = 0.0;
                self.pivot(r, q, &alpha);
            }
        }
    }
}

pub(super) fn solve(lp: &LinearProgram, opts: &SolverOptions) -> LpSolution {
    let sf = to_standard(lp);
    let n = lp.num_vars();
    let max_iter = opts.max_iterations.unwrap_or(50 * (lp.num_rows() + n).max(1));
    let mut tab = Tableau::new(&sf);

    let fail = |status: LpStatus, iterations: usize| LpSolution {
        status,
        primal: vec![0.0; n],
        dual: vec![0.0; lp.num_rows()],
        upper_dual: vec![0.0; n],
        objective_value: f64::NAN,
        iterations,
    };

    // Phase one.
    let has_artificial = sf.cols.iter().any(|c| c.kind == ColKind::Artificial);
    if has_artificial {
        let p1: Vec<f64> =
            sf.cols.iter().map(|c| if c.kind == ColKind::Artificial { 1.0 } else { 0.0 }).collect();
        match tab.run(&p1, false, max_iter, opts) {
            PhaseOutcome::Optimal => {}
            PhaseOutcome::IterationLimit => return fail(LpStatus::IterationLimit, tab.iterations),
            // Phase one is bounded below by zero.
            PhaseOutcome::Unbounded => return fail(LpStatus::Infeasible, tab.iterations),
        }
        tab.refactor();
        let infeas: f64 = tab
            .basis
            .iter()
            .zip(&tab.xb)
            .filter(|(c, _)| sf.cols[**c].kind == ColKind::Artificial)
            .map(|(_, x)| x.max(0.0))
            .sum();
        if infeas > tol::PHASE_ONE * sf.rhs_scale {
            return fail(LpStatus::Infeasible, tab.iterations);
        }
        tab.drive_out_artificials();
        tab.refactor();
    }

    match tab.run(&sf.cost, true, max_iter, opts) {
        PhaseOutcome::Optimal => {}
        PhaseOutcome::Unbounded => return fail(LpStatus::Unbounded, tab.iterations),
        PhaseOutcome::IterationLimit => return fail(LpStatus::IterationLimit, tab.iterations),
    }
    tab.refactor();

    // Primal.
    let mut colval = vec![0.0; sf.cols.len()];
    for (k, &c) in tab.basis.iter().enumerate() {
        colval[c] = tab.xb[k].max(0.0);
    }
    let mut primal = lp.lower.clone();
    for j in 0..n {
        if let Some(c) = sf.var_col[j] {
            primal[j] += colval[c];
        }
    }

    // Duals back in the caller's row orientation.
    let y = tab.duals(&sf.cost);
    let mut dual = vec![0.0; lp.num_rows()];
    let mut upper_dual = vec![0.0; n];
    for i in 0..sf.m {
        let v = sf.sign[i] * y[i];
        match sf.origin[i] {
            RowOrigin::Original(r) => dual[r] = v,
            RowOrigin::UpperBound(j) => upper_dual[j] = v.min(0.0),
        }
    }
    // Fixed variables absorb a negative reduced cost into their upper-bound dual.
    for j in 0..n {
        if sf.var_col[j].is_none() {
            let mut d = lp.objective[j];
            for (r, yr) in lp.rows.iter().zip(&dual) {
                for &(jj, a) in &r.coeffs {
                    if jj == j {
                        d -= yr * a;
                    }
                }
            }
            upper_dual[j] = d.min(0.0);
        }
    }

    LpSolution {
        status: LpStatus::Optimal,
        objective_value: lp.objective_value(&primal),
        primal,
        dual,
        upper_dual,
        iterations: tab.iterations,
    }
}
