//! Brute-force LP oracle: enumerate every basic solution.

use dpdp_core::lp::{LinearProgram, Relation};
use rand::Rng;

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting; `None` when singular.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Minimum objective over all feasible basic solutions, `None` if there is
/// none. Assumes the feasible region is bounded.
pub fn vertex_enumeration(lp: &LinearProgram) -> Option<f64> {
    let n = lp.num_vars();
    // Hyperplanes: (coefficients, rhs).
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for r in &lp.rows {
        let mut a = vec![0.0; n];
        for &(j, v) in &r.coeffs {
            a[j] += v;
        }
        planes.push((a, r.rhs));
    }
    for j in 0..n {
        let mut a = vec![0.0; n];
        a[j] = 1.0;
        planes.push((a.clone(), lp.lower[j]));
        if let Some(u) = lp.upper[j] {
            planes.push((a, u));
        }
    }
    let feasible = |x: &[f64]| -> bool {
        let act = lp.row_activity(x);
        let ok_rows = lp.rows.iter().zip(&act).all(|(r, a)| match r.relation {
            Relation::Le => *a <= r.rhs + 1e-9,
            Relation::Ge => *a >= r.rhs - 1e-9,
            Relation::Eq => (a - r.rhs).abs() <= 1e-9,
        });
        ok_rows
            && (0..n).all(|j| x[j] >= lp.lower[j] - 1e-9 && lp.upper[j].map_or(true, |u| x[j] <= u + 1e-9))
    };
    let mut best: Option<f64> = None;
    combinations(planes.len(), n, &mut |idx| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_dense(a, b) {
            if feasible(&x) {
                let v = lp.objective_value(&x);
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
    });
    best
}

/// Random bounded LP with at most 6 variables and 6 rows. Integer data makes
/// degenerate vertices common.
pub fn random_lp(rng: &mut impl Rng) -> LinearProgram {
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(1..=6);
    let mut lp = LinearProgram::new(n);
    for c in lp.objective.iter_mut() {
        *c = rng.gen_range(-10..=10) as f64;
    }
    let mut upper = vec![0.0; n];
    for j in 0..n {
        if rng.gen_bool(0.2) {
            lp.lower[j] = rng.gen_range(0..=2) as f64;
        }
        upper[j] = lp.lower[j] + rng.gen_range(0..=10) as f64;
    }
    // Most instances get right-hand sides around an integer point inside the
    // bounds, so they are feasible; the rest draw free right-hand sides.
    let planted: Option<Vec<f64>> =
        rng.gen_bool(0.6).then(|| (0..n).map(|j| rng.gen_range(lp.lower[j] as i64..=upper[j] as i64) as f64).collect());
    for _ in 0..m {
        let mut coeffs = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.7) {
                coeffs.push((j, rng.gen_range(-5..=5) as f64));
            }
        }
        let rel = match rng.gen_range(0..10) {
            0..=5 => Relation::Le,
            6..=7 => Relation::Ge,
            _ => Relation::Eq,
        };
        let rhs = match &planted {
            Some(x) => {
                let at: f64 = coeffs.iter().map(|&(j, a)| a * x[j]).sum();
                let slack = rng.gen_range(0..=5) as f64;
                match rel {
                    Relation::Le => at + slack,
                    Relation::Ge => at - slack,
                    Relation::Eq => at,
                }
            }
            None => rng.gen_range(-10..=20) as f64,
        };
        lp.add_row(coeffs, rel, rhs);
    }
    for j in 0..n {
        if rng.gen_bool(0.5) {
            lp.upper[j] = Some(upper[j]);
        } else {
            lp.add_row(vec![(j, 1.0)], Relation::Le, upper[j]);
        }
    }
    lp
}
