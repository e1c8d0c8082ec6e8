//! Deal and match state machine: turn order, trick closure, finish order,
//! scoring and history.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::agents::{Agent, Decision, Observation};
use crate::cards::{build_deck, deal, Card, Level, NUM_SEATS};
use crate::combos::{beats, enumerate_legal_actions, validate_combo, Action, Combo};
use crate::error::{GameError, Result};

pub type Seat = usize;

/// Seats 0 and 2 form team 0; seats 1 and 3 form team 1.
pub fn team_of(seat: Seat) -> usize {
    seat % 2
}

pub fn teammate(seat: Seat) -> Seat {
    (seat + 2) % NUM_SEATS
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryEvent {
    pub seat: Seat,
    pub action: Action,
    pub hand_size_after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub num_deals: usize,
    pub base_seed: u64,
    /// Cycled over deal indices.
    pub level_schedule: Vec<Level>,
}

impl MatchConfig {
    pub fn new(num_deals: usize, base_seed: u64) -> MatchConfig {
        MatchConfig { num_deals, base_seed, level_schedule: vec![Level::default()] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_deals == 0 {
            return Err(GameError::InvalidInput("num_deals must be at least 1".into()));
        }
        if self.level_schedule.is_empty() {
            return Err(GameError::InvalidInput("level_schedule must not be empty".into()));
        }
        Ok(())
    }

    pub fn deal_seed(&self, deal_index: usize) -> u64 {
        self.base_seed.wrapping_add(deal_index as u64)
    }

    pub fn level_for(&self, deal_index: usize) -> Level {
        self.level_schedule[deal_index % self.level_schedule.len()]
    }
}

/// Authoritative state of one deal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DealState {
    hands: [Vec<Card>; NUM_SEATS],
    level: Level,
    current_seat: Seat,
    trick_leader: Seat,
    incumbent: Option<(Seat, Combo)>,
    /// Seats that passed since the incumbent was set.
    passed: [bool; NUM_SEATS],
    consecutive_passes: u8,
    finish_order: Vec<Seat>,
    history: Vec<HistoryEvent>,
    rng_seed: u64,
}

impl DealState {
    /// Deals with seed `base_seed + deal_index`; seat 0 leads.
    pub fn new_deal(config: &MatchConfig, deal_index: usize) -> Result<DealState> {
        config.validate()?;
        if deal_index >= config.num_deals {
            return Err(GameError::InvalidInput(format!(
                "deal index {deal_index} out of range for {} deals",
                config.num_deals
            )));
        }
        let seed = config.deal_seed(deal_index);
        let hands = deal(&build_deck(), seed)?;
        Ok(DealState {
            hands,
            level: config.level_for(deal_index),
            current_seat: 0,
            trick_leader: 0,
            incumbent: None,
            passed: [false; NUM_SEATS],
            consecutive_passes: 0,
            finish_order: Vec::new(),
            history: Vec::new(),
            rng_seed: seed,
        })
    }

    /// An arbitrary mid-deal position, e.g. a hand-built fixture. The
    /// position has no history and is not replayable from a fresh deal.
    pub fn from_position(
        hands: [Vec<Card>; NUM_SEATS],
        level: Level,
        current_seat: Seat,
        incumbent: Option<(Seat, Combo)>,
    ) -> Result<DealState> {
        if current_seat >= NUM_SEATS || hands[current_seat].is_empty() {
            return Err(GameError::InvalidInput("current seat must hold cards".into()));
        }
        let mut all: Vec<Card> = hands.iter().flatten().copied().collect();
        all.sort();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(GameError::InvalidInput("hands overlap".into()));
        }
        let mut hands = hands;
        for h in &mut hands {
            h.sort();
        }
        let finish_order = (0..NUM_SEATS).filter(|&s| hands[s].is_empty()).collect();
        let trick_leader = incumbent.as_ref().map_or(current_seat, |(s, _)| *s);
        Ok(DealState {
            hands,
            level,
            current_seat,
            trick_leader,
            incumbent,
            passed: [false; NUM_SEATS],
            consecutive_passes: 0,
            finish_order,
            history: Vec::new(),
            rng_seed: 0,
        })
    }

    /// Hands the opening lead to `seat` before any action is taken.
    pub fn with_leader(mut self, seat: Seat) -> Result<DealState> {
        if !self.history.is_empty() || seat >= NUM_SEATS || self.hands[seat].is_empty() {
            return Err(GameError::InvalidState("leader can only be set on a fresh deal".into()));
        }
        self.current_seat = seat;
        self.trick_leader = seat;
        Ok(self)
    }

    pub fn hand(&self, seat: Seat) -> &[Card] {
        &self.hands[seat]
    }

    pub fn hand_sizes(&self) -> [usize; NUM_SEATS] {
        [0, 1, 2, 3].map(|s| self.hands[s].len())
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn current_seat(&self) -> Seat {
        self.current_seat
    }

    pub fn trick_leader(&self) -> Seat {
        self.trick_leader
    }

    pub fn incumbent(&self) -> Option<&(Seat, Combo)> {
        self.incumbent.as_ref()
    }

    pub fn consecutive_passes(&self) -> u8 {
        self.consecutive_passes
    }

    pub fn finish_order(&self) -> &[Seat] {
        &self.finish_order
    }

    pub fn history(&self) -> &[HistoryEvent] {
        &self.history
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn is_over(&self) -> bool {
        self.finish_order.len() == NUM_SEATS
    }

    /// Cards played so far, in play order.
    pub fn played_cards(&self) -> Vec<Card> {
        self.history.iter().filter_map(|e| e.action.combo()).flat_map(|c| c.cards().iter().copied()).collect()
    }

    pub fn legal_actions(&self) -> Result<Vec<Action>> {
        if self.is_over() {
            return Err(GameError::InvalidState("the deal is over".into()));
        }
        enumerate_legal_actions(&self.hands[self.current_seat], self.incumbent.as_ref().map(|(_, c)| c), self.level)
    }

    /// Checks a declared action for the current seat. Any valid declaration
    /// made from the seat's own cards that beats the incumbent is accepted;
    /// the enumerated list offers one canonical declaration per option.
    pub fn check_action(&self, action: &Action) -> Result<()> {
        if self.is_over() {
            return Err(GameError::InvalidState("the deal is over".into()));
        }
        match action {
            Action::Pass => {
                if self.incumbent.is_none() {
                    return Err(GameError::IllegalAction("the leader cannot pass".into()));
                }
            }
            Action::Play(combo) => {
                let hand = &self.hands[self.current_seat];
                if let Some(c) = combo.cards().iter().find(|c| !hand.contains(c)) {
                    return Err(GameError::IllegalAction(format!("{c} is not in seat {}'s hand", self.current_seat)));
                }
                let checked = validate_combo(combo.cards(), combo.kind(), combo.wild(), self.level)
                    .map_err(|e| GameError::IllegalAction(e.to_string()))?;
                if &checked != combo {
                    return Err(GameError::IllegalAction("combo does not match its validation".into()));
                }
                if let Some((_, inc)) = &self.incumbent {
                    if !beats(combo, inc) {
                        return Err(GameError::IllegalAction(format!("{combo} does not beat {inc}")));
                    }
                }
            }
        }
        Ok(())
    }

    fn next_holder_after(&self, seat: Seat) -> Option<Seat> {
        (1..=NUM_SEATS).map(|d| (seat + d) % NUM_SEATS).find(|&s| !self.hands[s].is_empty())
    }

    pub fn apply_action(&mut self, action: Action) -> Result<()> {
        self.check_action(&action)?;
        let seat = self.current_seat;
        match &action {
            Action::Play(combo) => {
                let hand = &mut self.hands[seat];
                hand.retain(|c| !combo.cards().contains(c));
                self.incumbent = Some((seat, combo.clone()));
                self.passed = [false; NUM_SEATS];
                self.consecutive_passes = 0;
                if hand.is_empty() {
                    self.finish_order.push(seat);
                }
            }
            Action::Pass => {
                self.passed[seat] = true;
                self.consecutive_passes += 1;
            }
        }
        self.history.push(HistoryEvent { seat, action, hand_size_after: self.hands[seat].len() });

        if self.finish_order.len() >= NUM_SEATS - 1 {
            if let Some(last) = (0..NUM_SEATS).find(|s| !self.finish_order.contains(s)) {
                self.finish_order.push(last);
            }
            self.incumbent = None;
            return Ok(());
        }

        if let Some((owner, _)) = &self.incumbent {
            let owner = *owner;
            let closed = (0..NUM_SEATS).filter(|&s| s != owner && !self.hands[s].is_empty()).all(|s| self.passed[s]);
            if closed {
                let leader = if !self.hands[owner].is_empty() {
                    owner
                } else if !self.hands[teammate(owner)].is_empty() {
                    teammate(owner)
                } else {
                    self.next_holder_after(owner).expect("two or more seats hold cards")
                };
                self.incumbent = None;
                self.passed = [false; NUM_SEATS];
                self.consecutive_passes = 0;
                self.trick_leader = leader;
                self.current_seat = leader;
                return Ok(());
            }
        }
        self.current_seat = self.next_holder_after(seat).expect("two or more seats hold cards");
        Ok(())
    }

    /// What the current seat is allowed to see.
    pub fn observe(&self, deal_index: usize) -> Result<Observation> {
        let legal_actions = self.legal_actions()?;
        Ok(Observation {
            seat: self.current_seat,
            deal_index,
            step: self.history.len(),
            hand: self.hands[self.current_seat].clone(),
            level: self.level,
            hand_counts: self.hand_sizes(),
            last_play: self.incumbent.clone(),
            legal_actions,
            history: self.history.clone(),
        })
    }
}

/// Outcome of one deal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DealResult {
    pub finish_order: [Seat; NUM_SEATS],
    /// Indexed by team: 0 = seats 0 and 2, 1 = seats 1 and 3.
    pub team_points: [i32; 2],
}

impl DealResult {
    pub fn points_for_seat(&self, seat: Seat) -> i32 {
        self.team_points[team_of(seat)]
    }
}

/// Scores a finish order: the first finisher's team earns 4, 2 or 1 points
/// as the partner finishes second, third or last; the other team loses as
/// much.
pub fn deal_outcome(finish_order: &[Seat]) -> Result<DealResult> {
    let mut seen = [false; NUM_SEATS];
    if finish_order.len() != NUM_SEATS {
        return Err(GameError::InvalidInput("finish order needs four seats".into()));
    }
    for &s in finish_order {
        if s >= NUM_SEATS || seen[s] {
            return Err(GameError::InvalidInput(format!("malformed finish order {finish_order:?}")));
        }
        seen[s] = true;
    }
    let winner = finish_order[0];
    let partner_place = finish_order.iter().position(|&s| s == teammate(winner)).expect("all seats present");
    let points = match partner_place {
        1 => 4,
        2 => 2,
        _ => 1,
    };
    let mut team_points = [0; 2];
    team_points[team_of(winner)] = points;
    team_points[1 - team_of(winner)] = -points;
    Ok(DealResult { finish_order: [finish_order[0], finish_order[1], finish_order[2], finish_order[3]], team_points })
}

/// One engine step as seen by the log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub step: usize,
    pub seat: Seat,
    pub action: Action,
    pub hand_sizes: [usize; NUM_SEATS],
    pub incumbent: Option<Combo>,
    pub legal_count: usize,
    pub chosen_index: usize,
    /// Set when the agent's answer was rejected and a substitute was played.
    pub violation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DealRecord {
    pub deal_index: usize,
    pub level: Level,
    pub seed: u64,
    pub leader: Seat,
    pub steps: Vec<StepRecord>,
    pub result: DealResult,
    pub final_state: DealState,
}

impl DealRecord {
    pub fn violations(&self) -> usize {
        self.steps.iter().filter(|s| s.violation.is_some()).count()
    }
}

#[derive(Debug)]
pub enum AgentFault {
    Error(String),
    Illegal(String),
}

impl fmt::Display for AgentFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentFault::Error(e) => write!(f, "agent error: {e}"),
            AgentFault::Illegal(e) => write!(f, "illegal answer: {e}"),
        }
    }
}

fn ask(agent: &mut dyn Agent, obs: &Observation, state: &DealState) -> std::result::Result<Decision, AgentFault> {
    let decision = agent.act(obs).map_err(|e| AgentFault::Error(e.to_string()))?;
    state.check_action(&decision.action).map_err(|e| AgentFault::Illegal(e.to_string()))?;
    Ok(decision)
}

/// Plays a deal to the end. An agent that errors or answers illegally gets
/// one retry; after that the engine plays Pass (or the first legal action
/// when leading) and records a violation.
pub fn run_deal(mut state: DealState, deal_index: usize, agents: &mut [Box<dyn Agent>]) -> Result<DealRecord> {
    if agents.len() != NUM_SEATS {
        return Err(GameError::InvalidInput(format!("need {NUM_SEATS} agents, got {}", agents.len())));
    }
    let leader = state.current_seat();
    let mut steps = Vec::new();
    while !state.is_over() {
        let obs = state.observe(deal_index)?;
        let seat = obs.seat;
        let agent = agents[seat].as_mut();
        let (decision, violation) = match ask(agent, &obs, &state) {
            Ok(d) => (d, None),
            Err(_) => match ask(agent, &obs, &state) {
                Ok(d) => (d, None),
                Err(fault) => {
                    let fallback = if obs.legal_actions.contains(&Action::Pass) {
                        Action::Pass
                    } else {
                        obs.legal_actions[0].clone()
                    };
                    (Decision::new(fallback), Some(fault.to_string()))
                }
            },
        };
        let chosen_index = decision
            .presented_index
            .unwrap_or_else(|| obs.legal_actions.iter().position(|a| a == &decision.action).unwrap_or(0));
        state.apply_action(decision.action.clone())?;
        steps.push(StepRecord {
            step: obs.step,
            seat,
            action: decision.action,
            hand_sizes: state.hand_sizes(),
            incumbent: state.incumbent().map(|(_, c)| c.clone()),
            legal_count: obs.legal_actions.len(),
            chosen_index,
            violation,
        });
    }
    let result = deal_outcome(state.finish_order())?;
    Ok(DealRecord {
        deal_index,
        level: state.level(),
        seed: state.rng_seed(),
        leader,
        steps,
        result,
        final_state: state,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchRecord {
    pub deals: Vec<DealRecord>,
    /// Cumulative points by team.
    pub totals: [i32; 2],
}

/// Plays `config.num_deals` deals. Seat 0 leads the first deal; each later
/// deal is led by the previous deal's first finisher.
pub fn run_match(config: &MatchConfig, agents: &mut [Box<dyn Agent>]) -> Result<MatchRecord> {
    config.validate()?;
    let mut deals = Vec::with_capacity(config.num_deals);
    let mut totals = [0; 2];
    let mut leader = 0;
    for deal_index in 0..config.num_deals {
        let state = DealState::new_deal(config, deal_index)?.with_leader(leader)?;
        let record = run_deal(state, deal_index, agents)?;
        totals[0] += record.result.team_points[0];
        totals[1] += record.result.team_points[1];
        leader = record.result.finish_order[0];
        deals.push(record);
    }
    Ok(MatchRecord { deals, totals })
}

/// Rebuilds a deal from its configuration and the played actions.
pub fn replay_deal(config: &MatchConfig, deal_index: usize, leader: Seat, actions: &[Action]) -> Result<DealState> {
    let mut state = DealState::new_deal(config, deal_index)?.with_leader(leader)?;
    for action in actions {
        state.apply_action(action.clone())?;
    }
    Ok(state)
}
