//! Writer for the CPLEX-style `.lp` text format, for cross-checking problems
//! with external solvers.
//!
//! Layout: a `Minimize` section with a single `obj:` line, a `Subject To`
//! section with one `c<i>:` line per row, a `Bounds` section listing every
//! variable as `l <= x<j> <= u` (or `x<j> >= l` when unbounded above), and
//! `End`. Numbers use Rust's shortest round-trip formatting.

use std::fmt::Write;

use super::{LinearProgram, Relation};

fn term(out: &mut String, first: bool, coef: f64, j: usize) {
    if first {
        let _ = write!(out, " {coef} x{j}");
    } else if coef < 0.0 {
        let _ = write!(out, " - {} x{j}", -coef);
    } else {
        let _ = write!(out, " + {coef} x{j}");
    }
}

pub fn write_lp_format(lp: &LinearProgram) -> String {
    let mut out = String::from("\\ dpdp lp dump v1\nMinimize\n obj:");
    let mut first = true;
    for (j, &c) in lp.objective.iter().enumerate() {
        if c != 0.0 {
            term(&mut out, first, c, j);
            first = false;
        }
    }
    if first {
        out.push_str(" 0 x0");
    }
    out.push_str("\nSubject To\n");
    for (i, r) in lp.rows.iter().enumerate() {
        let _ = write!(out, " c{i}:");
        let mut first = true;
        for &(j, a) in &r.coeffs {
            term(&mut out, first, a, j);
            first = false;
        }
        if first {
            out.push_str(" 0 x0");
        }
        let rel = match r.relation {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        let _ = writeln!(out, " {rel} {}", r.rhs);
    }
    out.push_str("Bounds\n");
    for j in 0..lp.num_vars() {
        match lp.upper[j] {
            Some(u) => {
                let _ = writeln!(out, " {} <= x{j} <= {u}", lp.lower[j]);
            }
            None => {
                let _ = writeln!(out, " x{j} >= {}", lp.lower[j]);
            }
        }
    }
    out.push_str("End\n");
    out
}
