//! Property checks shared by the per-topic tests and the acceptance suite.
//! Each returns `Ok(summary)` or `Err(first failure)`.

use std::collections::HashSet;

use dpdp_core::cfa::{
    build_rmp, price_vehicle, solve_integer_rmp, solve_relaxation, BnbLimits, CfaEngine, CfaParams, MasterMode,
    PricingParams, IMPROVING,
};
use dpdp_core::lp::{solve_lp, verify_certificates, LpStatus};
use dpdp_core::model::{Location, PenaltySpec, Request, RequestId, Time, TravelMetric, VehicleId};
use dpdp_core::policy::{Policy, PolicySpec};
use dpdp_core::routing::{
    cheapest_insertion, reduced_cost, schedule_path, CostWeights, PathObjective, RoutingContext, Stop, VehiclePath,
};
use dpdp_core::sim::{generate_scenario, run_episode, Decision, EpisodeOptions, ScenarioConfig, State};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lp_oracle::{random_lp, vertex_enumeration};
use super::routing_oracle::{all_insertions, grid_point, leg_fold, random_request, Objective};

pub type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

/// Simplex against brute-force vertex enumeration on random small LPs.
pub fn lp_equivalence(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut optimal, mut infeasible) = (0, 0);
    for case in 0..cases {
        let lp = random_lp(&mut rng);
        let sol = solve_lp(&lp).map_err(|e| format!("case {case}: {e}"))?;
        match vertex_enumeration(&lp) {
            Some(best) => {
                ensure!(sol.status == LpStatus::Optimal, "case {case}: status {:?}, enumeration {best}", sol.status);
                ensure!(
                    (sol.objective_value - best).abs() <= 1e-6,
                    "case {case}: simplex {} vs enumeration {best}",
                    sol.objective_value
                );
                let rep = verify_certificates(&lp, &sol);
                ensure!(rep.all_pass(), "case {case}: certificates {rep:?}");
                optimal += 1;
            }
            None => {
                ensure!(sol.status == LpStatus::Infeasible, "case {case}: status {:?}, enumeration infeasible", sol.status);
                infeasible += 1;
            }
        }
    }
    ensure!(optimal > cases / 4 && infeasible > cases / 20, "degenerate sample: {optimal} optimal, {infeasible} infeasible");
    Ok(format!("{cases} LPs, {optimal} optimal, {infeasible} infeasible"))
}

/// A random precedence-respecting interleaving of `n` fresh requests.
pub fn random_stops(rng: &mut ChaCha8Rng, n: u32) -> (Vec<Stop>, Vec<Request>) {
    let reqs: Vec<_> = (0..n).map(|i| random_request(rng, i)).collect();
    let mut stops = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    let mut pending: Vec<usize> = (0..reqs.len()).collect();
    pending.shuffle(rng);
    while !pending.is_empty() || !open.is_empty() {
        if !pending.is_empty() && (open.is_empty() || rng.gen_bool(0.5)) {
            let i = pending.pop().unwrap();
            stops.push(Stop::pickup(&reqs[i]));
            open.push(i);
        } else {
            let k = rng.gen_range(0..open.len());
            let i = open.swap_remove(k);
            stops.push(Stop::delivery(&reqs[i]));
        }
    }
    (stops, reqs)
}

/// Scheduled arrivals against an independent leg fold.
pub fn schedule_oracle(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let speed = [0.4, 1.0, 0.37][rng.gen_range(0..3)];
        let ctx = RoutingContext { metric: TravelMetric::new(speed), penalty: PenaltySpec::BASE };
        let n = rng.gen_range(0..=3);
        let (stops, _) = random_stops(&mut rng, n);
        let start = grid_point(&mut rng);
        let t0 = rng.gen_range(0..10_000_000);
        let p = schedule_path(&ctx, VehicleId(0), start, Time::from_millis(t0), stops.clone())
            .map_err(|e| format!("case {case}: {e}"))?;
        let oracle = leg_fold(&start, t0, &stops, speed);
        let got: Vec<i64> = p.arrivals().iter().map(|t| t.millis()).collect();
        ensure!(got.len() == oracle.len(), "case {case}: {} arrivals vs {}", got.len(), oracle.len());
        for (g, o) in got.iter().zip(&oracle) {
            ensure!(((g - o) as f64).abs() <= 1e-9, "case {case}: arrival {g} vs leg-fold {o}");
        }
        let obj = Objective { speed, fixed: 50.0, rate: 100.0, alpha: 0.0, first_leg: true };
        let want = obj.cost(&start, t0, &stops);
        ensure!((p.true_cost() - want).abs() <= 1e-9, "case {case}: cost {} vs {want}", p.true_cost());
    }
    Ok(format!("{cases} schedules"))
}

/// Cheapest insertion against exhaustive enumeration of insertion positions.
pub fn insertion_oracle(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut late_cases = 0;
    for case in 0..cases {
        let penalty = [PenaltySpec::BASE, PenaltySpec::FIXED_DOMINANT, PenaltySpec::RATE_DOMINANT][case % 3];
        let speed = 0.4;
        let ctx = RoutingContext { metric: TravelMetric::new(speed), penalty };
        let weights = CostWeights {
            alpha: [0.0, 0.01, 0.05, 0.2][rng.gen_range(0..4)],
            alpha_includes_first_leg: rng.gen_bool(0.7),
        };
        // Existing path of up to 2 requests; with the new one at most 6 nodes.
        let n = rng.gen_range(0..=2);
        let (stops, _) = random_stops(&mut rng, n);
        let start = Location::new(rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0));
        let t0 = rng.gen_range(0..7_200_000);
        let base = schedule_path(&ctx, VehicleId(1), start, Time::from_millis(t0), stops.clone())
            .map_err(|e| format!("case {case}: {e}"))?;
        let new_r = random_request(&mut rng, 9);
        let reward = rng.gen_range(-50.0..200.0);
        let reward_fn = move |_| reward;
        let objective = PathObjective { ctx: &ctx, weights: &weights, reward: &reward_fn, constant: 0.0 };
        let (path, delta) = cheapest_insertion(&base, &new_r, &objective);

        let oracle = Objective {
            speed,
            fixed: penalty.fixed,
            rate: penalty.rate,
            alpha: weights.alpha,
            first_leg: weights.alpha_includes_first_leg,
        };
        let before = oracle.cost(&start, t0, &stops);
        let best = all_insertions(&stops, &new_r)
            .into_iter()
            .map(|(_, _, s)| oracle.cost(&start, t0, &s) - reward - before)
            .fold(f64::INFINITY, f64::min);
        let tol = 1e-9 * (1.0 + best.abs());
        ensure!((delta - best).abs() <= tol, "case {case}: delta {delta} vs enumeration {best}");
        let realized = oracle.cost(&start, t0, path.stops()) - reward - before;
        ensure!((realized - best).abs() <= tol, "case {case}: returned path realizes {realized}, best {best}");
        ensure!(path.covers(new_r.id), "case {case}: request not inserted");
        if path.true_cost() > 0.0 {
            late_cases += 1;
        }
    }
    ensure!(late_cases > cases / 10, "too few cases exercise late deliveries: {late_cases}");
    Ok(format!("{cases} insertions, {late_cases} with late deliveries"))
}

/// Every stop sequence over exactly the requests in `reqs`.
fn all_sequences(reqs: &[Request]) -> Vec<Vec<Stop>> {
    let mut seqs = vec![Vec::new()];
    for r in reqs {
        seqs = seqs.iter().flat_map(|s| all_insertions(s, r).into_iter().map(|(_, _, s)| s)).collect();
    }
    seqs
}

/// Integer master problem over exhaustively enumerated columns against brute
/// force over all assignments of requests to vehicles.
pub fn integer_rmp_oracle(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut branched = 0;
    for case in 0..cases {
        let nv = rng.gen_range(1..=2usize);
        let nr = rng.gen_range(1..=3usize);
        let reqs: Vec<Request> = (0..nr as u32).map(|i| random_request(&mut rng, i)).collect();
        let ids: Vec<RequestId> = reqs.iter().map(|r| r.id).collect();
        let penalty = [PenaltySpec::BASE, PenaltySpec::FIXED_DOMINANT, PenaltySpec::RATE_DOMINANT][case % 3];
        let ctx = RoutingContext { metric: TravelMetric::new(0.4), penalty };
        let weights = CostWeights { alpha: [0.0, 0.02, 0.1][rng.gen_range(0..3)], alpha_includes_first_leg: rng.gen_bool(0.7) };
        let starts: Vec<(Location, i64)> = (0..nv).map(|_| (grid_point(&mut rng), rng.gen_range(0..5_400_000))).collect();
        let vehicles: Vec<VehicleId> = (0..nv as u32).map(VehicleId).collect();
        let urgency: Vec<f64> = (0..nr).map(|_| rng.gen_range(0.0..3.0)).collect();
        let mode = if case % 4 == 3 {
            MasterMode::Partition { big_m: 1e4 }
        } else {
            MasterMode::Packing { beta: [0.5, 5.0, 50.0, 500.0][rng.gen_range(0..4)] }
        };

        let mut columns = Vec::new();
        for mask in 1u32..(1 << nr) {
            let subset: Vec<Request> = (0..nr).filter(|i| mask >> i & 1 == 1).map(|i| reqs[i]).collect();
            for (v, &(pos, t0)) in starts.iter().enumerate() {
                for s in all_sequences(&subset) {
                    let p = schedule_path(&ctx, VehicleId(v as u32), pos, Time::from_millis(t0), s)
                        .map_err(|e| format!("case {case}: {e}"))?;
                    columns.push(p);
                }
            }
        }
        let refs: Vec<&VehiclePath> = columns.iter().collect();
        let rmp = build_rmp(mode, &vehicles, &ids, &urgency, &refs, &weights);
        let relaxed = solve_relaxation(&rmp).map_err(|e| format!("case {case}: {e}"))?;
        let int = solve_integer_rmp(&rmp, Some(&relaxed), &BnbLimits::default());
        ensure!(int.proven_optimal, "case {case}: search stopped by a limit");
        if int.nodes > 1 {
            branched += 1;
        }

        let uncovered = |r: usize| match mode {
            MasterMode::Packing { beta } => beta * urgency[r],
            MasterMode::Partition { big_m } => big_m,
        };
        let obj = Objective {
            speed: 0.4,
            fixed: penalty.fixed,
            rate: penalty.rate,
            alpha: weights.alpha,
            first_leg: weights.alpha_includes_first_leg,
        };
        // Each request goes to vehicle 0..nv or stays uncovered (value nv).
        let mut best = f64::INFINITY;
        let combos = (nv + 1).pow(nr as u32);
        for code in 0..combos {
            let mut c = code;
            let mut total = 0.0;
            let mut sets: Vec<Vec<Request>> = vec![Vec::new(); nv];
            for (r, req) in reqs.iter().enumerate() {
                let a = c % (nv + 1);
                c /= nv + 1;
                if a == nv {
                    total += uncovered(r);
                } else {
                    sets[a].push(*req);
                }
            }
            for (v, set) in sets.iter().enumerate() {
                if !set.is_empty() {
                    let (pos, t0) = starts[v];
                    total += all_sequences(set).iter().map(|s| obj.cost(&pos, t0, s)).fold(f64::INFINITY, f64::min);
                }
            }
            best = best.min(total);
        }
        ensure!(
            (int.objective - best).abs() <= 1e-7 * (1.0 + best.abs()),
            "case {case}: branch and bound {} vs brute force {best}",
            int.objective
        );
        ensure!(
            (rmp.integer_objective(&int.selected) - int.objective).abs() <= 1e-9 * (1.0 + best.abs()),
            "case {case}: reported objective disagrees with the selection"
        );
        ensure!(
            relaxed.objective_value <= int.objective + 1e-7 * (1.0 + best.abs()),
            "case {case}: relaxation {} above integer optimum {}",
            relaxed.objective_value,
            int.objective
        );
        let mut used_v = HashSet::new();
        let mut used_r = HashSet::new();
        for &j in &int.selected {
            ensure!(used_v.insert(columns[j].vehicle), "case {case}: vehicle used twice");
            for r in columns[j].covered() {
                ensure!(used_r.insert(*r), "case {case}: request covered twice");
            }
        }
    }
    Ok(format!("{cases} instances, {branched} needed branching"))
}

/// Wraps a policy and checks the epoch clock and the idle-only rule.
struct Watched {
    inner: Box<dyn Policy + Send>,
    last: Option<Time>,
    error: Option<String>,
}

impl Policy for Watched {
    fn name(&self) -> String {
        self.inner.name()
    }

    fn decide(&mut self, state: &State) -> Decision {
        if self.last.is_some_and(|t| state.time <= t) && self.error.is_none() {
            self.error = Some(format!("epoch time {} does not advance past {}", state.time, self.last.unwrap()));
        }
        self.last = Some(state.time);
        let d = self.inner.decide(state);
        for p in &d.paths {
            if !state.idle_vehicles().any(|v| v.id == p.vehicle) && self.error.is_none() {
                self.error = Some(format!("busy vehicle {} assigned at {}", p.vehicle, state.time));
            }
        }
        d
    }
}

/// Conservation, clock, idle-only and replay determinism over base-system
/// episodes.
pub fn conservation(specs: &[PolicySpec], episodes: u64, seed_base: u64) -> Check {
    let base = ScenarioConfig::default();
    let mut total_requests = 0;
    for spec in specs {
        for seed in seed_base..seed_base + episodes {
            let cfg = ScenarioConfig { seed, ..base.clone() };
            let scenario = generate_scenario(&cfg);
            let mut bytes = Vec::new();
            for _ in 0..2 {
                let mut w = Watched { inner: spec.build(&cfg, seed), last: None, error: None };
                let log = run_episode(&scenario, &mut w, &EpisodeOptions::default())
                    .map_err(|e| format!("{} seed {seed}: {e}", spec.label()))?;
                if let Some(e) = w.error {
                    return Err(format!("{} seed {seed}: {e}", spec.label()));
                }
                let arrived: HashSet<RequestId> = scenario.requests().map(|r| r.id).collect();
                let delivered: HashSet<RequestId> = log.deliveries.iter().map(|d| d.request).collect();
                ensure!(
                    log.deliveries.len() == arrived.len() && delivered == arrived,
                    "{} seed {seed}: {} arrived, {} delivered",
                    spec.label(),
                    arrived.len(),
                    log.deliveries.len()
                );
                ensure!(
                    log.deliveries.iter().all(|d| d.assigned_at >= d.order_time && d.delivered_at > d.assigned_at),
                    "{} seed {seed}: delivery precedes assignment or arrival",
                    spec.label()
                );
                bytes.push(log.to_bytes());
                total_requests += arrived.len();
            }
            ensure!(bytes[0] == bytes[1], "{} seed {seed}: replay differs", spec.label());
        }
    }
    Ok(format!("{} policies x {episodes} episodes, {} requests delivered", specs.len(), total_requests / 2))
}

/// Runs column generation from the public building blocks alongside the
/// engine and checks every relaxation optimum: urgency auxiliaries, optimality
/// of the columns already in the master, improving re-evaluation of every
/// priced column, and a non-increasing objective across rounds.
struct Audited {
    engine: CfaEngine,
    rng: ChaCha8Rng,
    optima: usize,
    epochs: usize,
    priced: usize,
    error: Option<String>,
}

impl Audited {
    fn audit(&mut self, state: &State) -> Result<(), String> {
        let params = self.engine.params().clone();
        let weights = params.weights();
        let requests = self.engine.candidate_requests(state);
        let ids: Vec<RequestId> = requests.iter().map(|r| r.id).collect();
        let urgency = self.engine.urgencies(state.time, &requests);
        let vehicles: Vec<VehicleId> = state.idle_vehicles().map(|v| v.id).collect();
        let mode = MasterMode::Packing { beta: params.beta };
        let pricing = PricingParams { samples: params.samples, keep: params.keep, max_requests: None };
        let mut pool: Vec<VehiclePath> = Vec::new();
        let mut keys: HashSet<(VehicleId, Vec<u32>)> = HashSet::new();
        let mut last = f64::INFINITY;
        for _ in 0..=params.rounds {
            let refs: Vec<&VehiclePath> = pool.iter().collect();
            let rmp = build_rmp(mode, &vehicles, &ids, &urgency, &refs, &weights);
            let sol = solve_relaxation(&rmp).map_err(|e| e.to_string())?;
            let t = state.time;
            ensure!(sol.objective_value <= last + 1e-7 * (1.0 + last.abs()), "t={t}: objective rose to {}", sol.objective_value);
            last = sol.objective_value;
            let n = rmp.num_columns();
            let cov = rmp.coverage(&sol.primal[..n]);
            for r in 0..ids.len() {
                let eta = sol.primal[rmp.aux_var(r)];
                let want = (params.beta * urgency[r] * (1.0 - cov[r])).max(0.0);
                ensure!((eta - want).abs() <= 1e-7, "t={t}: eta {eta} vs {want} for request {r}");
            }
            let duals = rmp.dual_prices(&sol);
            let urg = rmp.urgency_map();
            for p in &pool {
                let rc = reduced_cost(p, &weights, &duals, params.beta, &urg).map_err(|e| e.to_string())?;
                ensure!(rc >= IMPROVING, "t={t}: master column with reduced cost {rc} at an optimum");
            }
            self.optima += 1;
            let rewards = rmp.request_rewards(&sol);
            let mut added = 0;
            for v in state.idle_vehicles() {
                let found = price_vehicle(
                    &mut self.rng,
                    self.engine.routing(),
                    &weights,
                    &requests,
                    &rewards,
                    v.id,
                    rmp.vehicle_dual(&sol, v.id),
                    (v.position, t),
                    &pricing,
                );
                for c in found {
                    let rc = reduced_cost(&c.path, &weights, &duals, params.beta, &urg).map_err(|e| e.to_string())?;
                    ensure!(rc < IMPROVING, "t={t}: priced column re-evaluates to {rc}");
                    ensure!((rc - c.reduced_cost).abs() <= 1e-9 * (1.0 + rc.abs()), "reported {} vs {rc}", c.reduced_cost);
                    self.priced += 1;
                    if keys.insert((c.path.vehicle, c.path.sequence_key())) {
                        pool.push(c.path);
                        added += 1;
                    }
                }
            }
            if added == 0 {
                break;
            }
        }
        self.epochs += 1;
        Ok(())
    }
}

impl Policy for Audited {
    fn name(&self) -> String {
        "audited".into()
    }

    fn decide(&mut self, state: &State) -> Decision {
        if state.num_idle() > 0 && !state.unassigned.is_empty() && self.error.is_none() {
            if let Err(e) = self.audit(state) {
                self.error = Some(e);
            }
        }
        self.engine.decide(state).map(|(d, _)| d).unwrap_or_else(|_| Decision::none())
    }
}

/// Master-problem consistency over at least `min_epochs` logged epochs of
/// CFA episodes on the base system.
pub fn master_consistency(params: &CfaParams, min_epochs: usize) -> Check {
    let base = ScenarioConfig::default();
    let (mut epochs, mut optima, mut priced) = (0, 0, 0);
    let mut seed = 0;
    while epochs < min_epochs {
        let cfg = ScenarioConfig { seed, ..base.clone() };
        let scenario = generate_scenario(&cfg);
        let engine = CfaEngine::new(
            CfaParams { seed, ..params.clone() },
            MasterMode::Packing { beta: params.beta },
            None,
            &cfg,
        );
        let mut a =
            Audited { engine, rng: ChaCha8Rng::seed_from_u64(seed + 17), optima: 0, epochs: 0, priced: 0, error: None };
        // Postponing forever is possible for some parameters; the epoch cap ends those.
        let opts = EpisodeOptions { max_epochs: 400 };
        let _ = run_episode(&scenario, &mut a, &opts);
        if let Some(e) = a.error {
            return Err(format!("seed {seed}: {e}"));
        }
        epochs += a.epochs;
        optima += a.optima;
        priced += a.priced;
        seed += 1;
    }
    ensure!(priced > 0, "no columns priced in {epochs} epochs");
    Ok(format!("{epochs} epochs over {seed} episodes, {optima} relaxation optima, {priced} priced columns re-evaluated"))
}
