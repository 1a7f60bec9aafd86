use std::time::{Duration, Instant};

use super::rmp::RmpModel;
use crate::lp::{solve_lp, LpSolution, LpStatus};

const INTEGRAL: f64 = 1e-6;
const PRUNE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BnbLimits {
    pub time_limit: Duration,
    pub node_limit: usize,
}

impl Default for BnbLimits {
    fn default() -> Self {
        BnbLimits { time_limit: Duration::from_secs(20), node_limit: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegerSolution {
    /// Selected column indices, ascending.
    pub selected: Vec<usize>,
    pub objective: f64,
    pub nodes: usize,
    /// False if a limit stopped the search early.
    pub proven_optimal: bool,
}

fn integral_selection(rmp: &RmpModel, sol: &LpSolution) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    for (j, &y) in sol.primal[..rmp.num_columns()].iter().enumerate() {
        if y > 1.0 - INTEGRAL {
            out.push(j);
        } else if y > INTEGRAL {
            return None;
        }
    }
    Some(out)
}

fn most_fractional(rmp: &RmpModel, sol: &LpSolution) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (j, &y) in sol.primal[..rmp.num_columns()].iter().enumerate() {
        let dist = (y - 0.5).abs();
        if y > INTEGRAL && y < 1.0 - INTEGRAL && dist < best.0 {
            best = (dist, j);
        }
    }
    best.1
}

/// Depth-first branch and bound over the column variables.
///
/// `root` is the optimal relaxation of `rmp.lp` if already known. Branches
/// on the most fractional column, exploring `y = 1` first. The incumbent
/// starts as the empty selection, which is always feasible.
pub fn solve_integer_rmp(rmp: &RmpModel, root: Option<&LpSolution>, limits: &BnbLimits) -> IntegerSolution {
    let started = Instant::now();
    let n = rmp.num_columns();
    let mut incumbent = IntegerSolution {
        selected: Vec::new(),
        objective: rmp.integer_objective(&[]),
        nodes: 0,
        proven_optimal: true,
    };
    // Each node is a list of (column, fixed value).
    let mut stack: Vec<Vec<(usize, bool)>> = vec![Vec::new()];
    let mut lp = rmp.lp.clone();
    while let Some(fixings) = stack.pop() {
        if incumbent.nodes >= limits.node_limit || started.elapsed() >= limits.time_limit {
            incumbent.proven_optimal = false;
            break;
        }
        incumbent.nodes += 1;
        let owned;
        let sol = match (fixings.is_empty(), root) {
            (true, Some(r)) => r,
            _ => {
                for j in 0..n {
                    lp.lower[j] = 0.0;
                    lp.upper[j] = None;
                }
                for &(j, one) in &fixings {
                    let v = if one { 1.0 } else { 0.0 };
                    lp.lower[j] = v;
                    lp.upper[j] = Some(v);
                }
                match solve_lp(&lp) {
                    Ok(s) if s.status == LpStatus::Optimal => {
                        owned = s;
                        &owned
                    }
                    // Infeasible fixings; any other failure prunes the node too.
                    _ => continue,
                }
            }
        };
        if sol.objective_value >= incumbent.objective - PRUNE {
            continue;
        }
        match integral_selection(rmp, sol) {
            Some(selected) => {
                let obj = rmp.integer_objective(&selected);
                if obj < incumbent.objective - PRUNE {
                    incumbent.objective = obj;
                    incumbent.selected = selected;
                }
            }
            None => {
                let j = most_fractional(rmp, sol);
                let mut zero = fixings.clone();
                zero.push((j, false));
                let mut one = fixings;
                one.push((j, true));
                stack.push(zero);
                stack.push(one);
            }
        }
    }
    incumbent
}
