use guandan::engine::replay_deal;
use guandan::{
    build_deck, deal_outcome, run_deal, run_match, Agent, AgentError, BestPLowVAgent, Card, DealState, Decision,
    MatchConfig, Observation, RandomAgent,
};
use proptest::prelude::*;

fn random_table(seed: u64) -> Vec<Box<dyn Agent>> {
    (0..4).map(|s| Box::new(RandomAgent::new(seed * 4 + s)) as Box<dyn Agent>).collect()
}

fn sorted(mut v: Vec<Card>) -> Vec<Card> {
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn cards_are_conserved_at_every_step(seed in 0u64..10_000, picks in proptest::collection::vec(any::<u16>(), 400)) {
        let config = MatchConfig::new(1, seed);
        let mut state = DealState::new_deal(&config, 0).unwrap();
        let deck = sorted(build_deck());
        let mut i = 0;
        while !state.is_over() {
            let legal = state.legal_actions().unwrap();
            let pick = picks[i % picks.len()] as usize % legal.len();
            state.apply_action(legal[pick].clone()).unwrap();
            i += 1;
            let mut all: Vec<Card> = (0..4).flat_map(|s| state.hand(s).to_vec()).collect();
            all.extend(state.played_cards());
            prop_assert_eq!(sorted(all), deck.clone());
            let mut seen = state.finish_order().to_vec();
            seen.sort();
            seen.dedup();
            prop_assert_eq!(seen.len(), state.finish_order().len());
            if !state.is_over() {
                prop_assert!(!state.finish_order().contains(&state.current_seat()));
            }
        }
        prop_assert!(i < 2000);
        let result = deal_outcome(state.finish_order()).unwrap();
        prop_assert_eq!(result.team_points[0] + result.team_points[1], 0);
    }
}

#[test]
fn random_deals_terminate_zero_sum_and_replay() {
    for seed in 0..40u64 {
        let config = MatchConfig::new(1, seed);
        let state = DealState::new_deal(&config, 0).unwrap();
        let record = run_deal(state, 0, &mut random_table(seed)).unwrap();
        assert_eq!(record.result.team_points.iter().sum::<i32>(), 0);
        let actions: Vec<_> = record.steps.iter().map(|s| s.action.clone()).collect();
        assert_eq!(replay_deal(&config, 0, record.leader, &actions).unwrap(), record.final_state);
    }
}

#[test]
fn match_totals_and_determinism() {
    let config = MatchConfig::new(3, 7);
    let a = run_match(&config, &mut random_table(1)).unwrap();
    let b = run_match(&config, &mut random_table(1)).unwrap();
    assert_eq!(a, b);
    let sum: i32 = a.deals.iter().map(|d| d.result.team_points[0]).sum();
    assert_eq!(a.totals[0], sum);
    assert_eq!(a.totals[0] + a.totals[1], 0);
    assert_eq!(a.deals[1].leader, a.deals[0].result.finish_order[0]);
    assert!(run_match(&MatchConfig::new(0, 7), &mut random_table(1)).is_err());
}

struct Broken;

impl Agent for Broken {
    fn act(&mut self, _: &Observation) -> Result<Decision, AgentError> {
        Err(AgentError::Other("always fails".into()))
    }

    fn name(&self) -> &str {
        "broken"
    }
}

#[test]
fn failing_agent_is_substituted() {
    let mut agents: Vec<Box<dyn Agent>> =
        vec![Box::new(Broken), Box::new(RandomAgent::new(1)), Box::new(Broken), Box::new(RandomAgent::new(2))];
    let state = DealState::new_deal(&MatchConfig::new(1, 3), 0).unwrap();
    let record = run_deal(state, 0, &mut agents).unwrap();
    assert!(record.violations() > 0);
    assert!(record.steps.iter().filter(|s| s.seat % 2 == 0).all(|s| s.violation.is_some()));
}

#[test]
fn rule_agents_beat_random_agents() {
    let mut total = 0;
    for seed in 0..60u64 {
        let mut agents: Vec<Box<dyn Agent>> = vec![
            Box::new(BestPLowVAgent::new()),
            Box::new(RandomAgent::new(seed * 2)),
            Box::new(BestPLowVAgent::new()),
            Box::new(RandomAgent::new(seed * 2 + 1)),
        ];
        let state = DealState::new_deal(&MatchConfig::new(1, seed), 0).unwrap();
        total += run_deal(state, 0, &mut agents).unwrap().result.team_points[0];
    }
    println!("rule team average over 60 deals: {}", total as f64 / 60.0);
    assert!(total > 0);
}

#[test]
#[ignore]
fn measure_action_counts() {
    let start = std::time::Instant::now();
    let mut max_len = 0;
    let mut decisions = 0;
    for seed in 0..100u64 {
        let state = DealState::new_deal(&MatchConfig::new(1, seed), 0).unwrap();
        let record = run_deal(state, 0, &mut random_table(seed)).unwrap();
        decisions += record.steps.len();
        max_len = max_len.max(record.steps.iter().map(|s| s.legal_count).max().unwrap());
    }
    println!("100 deals: {decisions} decisions, max legal {max_len}, {:?}", start.elapsed());
}
