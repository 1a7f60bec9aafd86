use dpdp_core::policy::Policy;
use dpdp_core::{generate_scenario, Decision, PolicySpec, ScenarioConfig, State};

/// Steps an episode by hand, handing every pre-decision state and the
/// decision taken in it to `visit`. Returns the number of epochs.
pub fn drive(spec: &PolicySpec, config: &ScenarioConfig, mut visit: impl FnMut(&State, &Decision)) -> u64 {
    let scenario = generate_scenario(config);
    let ctx = config.routing();
    let mut policy = spec.build(config, config.seed);
    let mut state = State::initial(&scenario);
    let Some(t) = state.next_epoch_time(&scenario) else { return 0 };
    state.advance(&scenario, t);
    loop {
        let decision = policy.decide(&state);
        visit(&state, &decision);
        state.apply_decision(&ctx, &decision).expect("policy decisions are feasible");
        match state.next_epoch_time(&scenario) {
            Some(t) => state.advance(&scenario, t),
            None => return state.epoch,
        }
    }
}

/// Decides one state with a fresh policy instance.
pub fn decide_fresh(spec: &PolicySpec, config: &ScenarioConfig, state: &State) -> Decision {
    let mut p: Box<dyn Policy + Send> = spec.build(config, config.seed);
    p.decide(state)
}
