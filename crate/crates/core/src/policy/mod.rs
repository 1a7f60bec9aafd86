//! Dispatching policies: the parameterized CFA, the direct scheduling policy
//! and the limited-length policies.

mod greedy;

use serde::{Deserialize, Serialize};

pub use greedy::greedy_assign;

use crate::cfa::{CfaEngine, CfaParams, EpochTrace, LengthLimit, MasterMode};
use crate::model::Time;
use crate::routing::RoutingContext;
use crate::sim::{Decision, ScenarioConfig, State};

/// Default charge per uncovered request in the partitioning master problem.
pub const DEFAULT_BIG_M: f64 = 1e7;
/// Urgency weight used by the limited-length policies.
pub const LIML_BETA: f64 = 1e6;

pub trait Policy {
    fn name(&self) -> String;
    fn decide(&mut self, state: &State) -> Decision;
    /// Per-epoch trace lines collected so far, if tracing is on.
    fn take_trace(&mut self) -> Vec<EpochTrace> {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PolicyKind {
    Cfa,
    Dsp {
        #[serde(default = "default_big_m")]
        big_m: f64,
    },
    Liml {
        m: usize,
    },
}

fn default_big_m() -> f64 {
    DEFAULT_BIG_M
}

/// Everything needed to instantiate a policy for one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySpec {
    #[serde(flatten)]
    pub kind: PolicyKind,
    #[serde(default)]
    pub engine: CfaParams,
}

impl Default for PolicySpec {
    fn default() -> Self {
        PolicySpec { kind: PolicyKind::Cfa, engine: CfaParams::default() }
    }
}

impl PolicySpec {
    pub fn cfa(alpha: f64, beta: f64) -> Self {
        PolicySpec { kind: PolicyKind::Cfa, engine: CfaParams { alpha, beta, ..Default::default() } }
    }

    pub fn dsp(alpha: f64) -> Self {
        PolicySpec { kind: PolicyKind::Dsp { big_m: DEFAULT_BIG_M }, engine: CfaParams { alpha, ..Default::default() } }
    }

    pub fn liml(m: usize, alpha: f64) -> Self {
        PolicySpec {
            kind: PolicyKind::Liml { m },
            engine: CfaParams { alpha, beta: LIML_BETA, ..Default::default() },
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            PolicyKind::Cfa => "CFA".into(),
            PolicyKind::Dsp { .. } => "DSP".into(),
            PolicyKind::Liml { m } => format!("LIML-{m}"),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        self.engine.validate()?;
        match self.kind {
            PolicyKind::Dsp { big_m } if !(big_m > 0.0 && big_m.is_finite()) => Err("big_m must be positive".into()),
            PolicyKind::Liml { m: 0 } => Err("LIML path size must be at least 1".into()),
            _ => Ok(()),
        }
    }

    /// Instantiates the policy; `seed` drives the pricing randomness.
    pub fn build(&self, config: &ScenarioConfig, seed: u64) -> Box<dyn Policy + Send> {
        self.build_traced(config, seed, false)
    }

    /// Like [`PolicySpec::build`], optionally recording per-epoch traces.
    pub fn build_traced(&self, config: &ScenarioConfig, seed: u64, trace: bool) -> Box<dyn Policy + Send> {
        let params = CfaParams { seed, ..self.engine.clone() };
        let sink = || TraceSink(trace.then(Vec::new));
        match self.kind {
            PolicyKind::Cfa => Box::new(CfaPolicy { trace: sink(), ..CfaPolicy::new(params, config) }),
            PolicyKind::Dsp { big_m } => Box::new(DspPolicy { trace: sink(), ..DspPolicy::new(params, big_m, config) }),
            PolicyKind::Liml { m } => Box::new(LimlPolicy { trace: sink(), ..LimlPolicy::new(params, m, config) }),
        }
    }
}

/// Tracing shared by the engine-backed policies.
#[derive(Default)]
struct TraceSink(Option<Vec<EpochTrace>>);

impl TraceSink {
    fn push(&mut self, t: EpochTrace) {
        if let Some(v) = &mut self.0 {
            v.push(t);
        }
    }

    fn take(&mut self) -> Vec<EpochTrace> {
        self.0.as_mut().map(std::mem::take).unwrap_or_default()
    }
}

/// Runs the engine, falling back to greedy immediate assignment if the
/// master relaxation cannot be solved.
fn engine_or_greedy(engine: &mut CfaEngine, state: &State, sink: &mut TraceSink, cap: Option<usize>) -> Decision {
    match engine.decide(state) {
        Ok((d, t)) => {
            sink.push(t);
            d
        }
        Err(_) => {
            let ctx = *engine.routing();
            let reqs = engine.candidate_requests(state);
            let d = greedy_assign(state, &ctx, &engine.params().weights(), &reqs, cap);
            sink.push(EpochTrace {
                time_s: state.time.secs(),
                idle: state.num_idle(),
                unassigned: state.unassigned.len(),
                rounds: 0,
                columns_added: 0,
                pool_size: 0,
                relaxation_objective: f64::NAN,
                integer_objective: f64::NAN,
                nodes: 0,
                assigned: d.num_assigned(),
                fallback: true,
            });
            d
        }
    }
}

/// The cost function approximation: packing master problem with urgency
/// charges weighted by `beta` and path lengths weighted by `alpha`.
///
/// Once no more orders can arrive, an epoch in which the CFA postpones every
/// request while all vehicles idle dispatches them greedily in deadline order
/// instead; waiting can then no longer pay off.
pub struct CfaPolicy {
    engine: CfaEngine,
    horizon: Time,
    trace: TraceSink,
}

impl CfaPolicy {
    pub fn new(params: CfaParams, config: &ScenarioConfig) -> Self {
        CfaPolicy {
            engine: CfaEngine::new(params.clone(), MasterMode::Packing { beta: params.beta }, None, config),
            horizon: config.horizon(),
            trace: TraceSink::default(),
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = TraceSink(Some(Vec::new()));
        self
    }
}

impl Policy for CfaPolicy {
    fn name(&self) -> String {
        let p = self.engine.params();
        format!("CFA(alpha={},beta={})", p.alpha, p.beta)
    }

    fn decide(&mut self, state: &State) -> Decision {
        let d = engine_or_greedy(&mut self.engine, state, &mut self.trace, None);
        if d.paths.is_empty() && !state.unassigned.is_empty() && state.all_idle() && state.time >= self.horizon {
            let mut reqs = state.unassigned.clone();
            reqs.sort_by_key(|r| (r.deadline, r.id));
            return greedy_assign(state, self.engine.routing(), &self.engine.params().weights(), &reqs, None);
        }
        d
    }

    fn take_trace(&mut self) -> Vec<EpochTrace> {
        self.trace.take()
    }
}

/// Direct scheduling: every request is assigned as soon as a vehicle idles.
pub struct DspPolicy {
    engine: CfaEngine,
    trace: TraceSink,
}

impl DspPolicy {
    pub fn new(params: CfaParams, big_m: f64, config: &ScenarioConfig) -> Self {
        DspPolicy {
            engine: CfaEngine::new(params, MasterMode::Partition { big_m }, None, config),
            trace: TraceSink::default(),
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = TraceSink(Some(Vec::new()));
        self
    }
}

impl Policy for DspPolicy {
    fn name(&self) -> String {
        format!("DSP(alpha={})", self.engine.params().alpha)
    }

    fn decide(&mut self, state: &State) -> Decision {
        engine_or_greedy(&mut self.engine, state, &mut self.trace, None)
    }

    fn take_trace(&mut self) -> Vec<EpochTrace> {
        self.trace.take()
    }
}

/// Limited-length policy: the `m` earliest-deadline requests per idle
/// vehicle, paths of at most `m` requests, urgency dominating the objective.
pub struct LimlPolicy {
    m: usize,
    engine: CfaEngine,
    ctx: RoutingContext,
    trace: TraceSink,
}

impl LimlPolicy {
    pub fn new(params: CfaParams, m: usize, config: &ScenarioConfig) -> Self {
        assert!(m >= 1);
        LimlPolicy {
            m,
            engine: CfaEngine::new(
                params.clone(),
                MasterMode::Packing { beta: params.beta },
                Some(LengthLimit { m }),
                config,
            ),
            ctx: config.routing(),
            trace: TraceSink::default(),
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = TraceSink(Some(Vec::new()));
        self
    }
}

impl Policy for LimlPolicy {
    fn name(&self) -> String {
        format!("LIML-{}(alpha={})", self.m, self.engine.params().alpha)
    }

    fn decide(&mut self, state: &State) -> Decision {
        if self.m == 1 {
            let mut reqs = self.engine.candidate_requests(state);
            reqs.sort_by_key(|r| (r.order_time, r.id));
            return greedy_assign(state, &self.ctx, &self.engine.params().weights(), &reqs, Some(1));
        }
        engine_or_greedy(&mut self.engine, state, &mut self.trace, Some(self.m))
    }

    fn take_trace(&mut self) -> Vec<EpochTrace> {
        self.trace.take()
    }
}
