//! The agent interface, the per-seat observation, and the two rule-based
//! baselines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cards::{Card, Level, NUM_SEATS};
use crate::combos::{Action, Combo, ComboKind};
use crate::engine::{teammate, HistoryEvent, Seat};

/// One seat's view of a deal: its own hand, public counts and the public
/// history. Nothing about hidden hands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub seat: Seat,
    pub deal_index: usize,
    /// Number of actions already taken in this deal.
    pub step: usize,
    pub hand: Vec<Card>,
    pub level: Level,
    pub hand_counts: [usize; NUM_SEATS],
    /// The combo to beat and who played it; `None` when this seat leads.
    pub last_play: Option<(Seat, Combo)>,
    pub legal_actions: Vec<Action>,
    pub history: Vec<HistoryEvent>,
}

impl Observation {
    pub fn has_lead(&self) -> bool {
        self.last_play.is_none()
    }

    pub fn teammate(&self) -> Seat {
        teammate(self.seat)
    }

    /// The opponent who acts right after this seat.
    pub fn next_opponent(&self) -> Seat {
        (self.seat + 1) % NUM_SEATS
    }

    /// The opponent who acts right before this seat.
    pub fn previous_opponent(&self) -> Seat {
        (self.seat + 3) % NUM_SEATS
    }

    pub fn teammate_count(&self) -> usize {
        self.hand_counts[self.teammate()]
    }

    pub fn next_opponent_count(&self) -> usize {
        self.hand_counts[self.next_opponent()]
    }

    pub fn previous_opponent_count(&self) -> usize {
        self.hand_counts[self.previous_opponent()]
    }

    pub fn is_opponent(&self, seat: Seat) -> bool {
        seat % 2 != self.seat % 2
    }
}

/// An agent's answer. `presented_index` is the position of the chosen
/// action in the list the agent actually chose from, when that list is not
/// the full legal list (for example a top-k shortlist).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub action: Action,
    pub presented_index: Option<usize>,
}

impl Decision {
    pub fn new(action: Action) -> Decision {
        Decision { action, presented_index: None }
    }
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("no legal actions offered")]
    NoLegalActions,
    #[error("backend failure: {0}")]
    Backend(String),
    #[error("{0}")]
    Other(String),
}

pub trait Agent: Send {
    fn act(&mut self, obs: &Observation) -> Result<Decision, AgentError>;

    fn name(&self) -> &str;
}

/// Uniform choice over the legal actions from a private seeded stream.
pub struct RandomAgent {
    rng: ChaCha8Rng,
}

impl RandomAgent {
    pub fn new(seed: u64) -> RandomAgent {
        RandomAgent { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Agent for RandomAgent {
    fn act(&mut self, obs: &Observation) -> Result<Decision, AgentError> {
        if obs.legal_actions.is_empty() {
            return Err(AgentError::NoLegalActions);
        }
        let i = self.rng.gen_range(0..obs.legal_actions.len());
        Ok(Decision::new(obs.legal_actions[i].clone()))
    }

    fn name(&self) -> &str {
        "random"
    }
}

/// Kind preference when leading, most preferred first.
pub const LEAD_PRIORITY: [ComboKind; 10] = [
    ComboKind::TripleWithPair,
    ComboKind::TwoConsecutiveTriples,
    ComboKind::ThreeConsecutivePairs,
    ComboKind::Straight,
    ComboKind::Triple,
    ComboKind::Pair,
    ComboKind::Single,
    ComboKind::StraightFlush,
    ComboKind::Bomb,
    ComboKind::JokerBomb,
];

/// Opponents this close to going out justify spending a bomb.
pub const BOMB_THRESHOLD: usize = 5;

/// Orders Category Two combos from weakest to strongest: small bombs,
/// straight flushes, big bombs, the joker bomb.
fn category_two_strength(c: &Combo) -> (u8, usize, u8) {
    match c.kind() {
        ComboKind::Bomb if c.len() <= 5 => (0, c.len(), c.key_rank().ordinal()),
        ComboKind::StraightFlush => (1, 0, c.key_rank().ordinal()),
        ComboKind::Bomb => (2, c.len(), c.key_rank().ordinal()),
        _ => (3, 0, 0),
    }
}

/// The "best priority, lowest value" baseline.
///
/// Leading: the highest-priority kind available (see [`LEAD_PRIORITY`]),
/// lowest comparison rank first. Following: the lowest-ranked Category One
/// beat; a bomb only when nothing else beats and both opponents are down to
/// [`BOMB_THRESHOLD`] cards or fewer; otherwise pass.
#[derive(Debug, Default, Clone)]
pub struct BestPLowVAgent;

impl BestPLowVAgent {
    pub fn new() -> BestPLowVAgent {
        BestPLowVAgent
    }

    pub fn choose(obs: &Observation) -> Option<Action> {
        let plays: Vec<&Combo> = obs.legal_actions.iter().filter_map(Action::combo).collect();
        if obs.has_lead() {
            let priority = |k: ComboKind| LEAD_PRIORITY.iter().position(|&p| p == k).unwrap_or(usize::MAX);
            // min_by_key keeps the first minimum, i.e. enumeration order on ties.
            return plays
                .into_iter()
                .min_by_key(|c| (priority(c.kind()), c.key_rank()))
                .map(|c| Action::Play(c.clone()));
        }
        if let Some(c) = plays.iter().filter(|c| !c.kind().is_category_two()).min_by_key(|c| c.key_rank()) {
            return Some(Action::Play((*c).clone()));
        }
        let opponents_low =
            obs.next_opponent_count() <= BOMB_THRESHOLD && obs.previous_opponent_count() <= BOMB_THRESHOLD;
        if opponents_low {
            if let Some(c) = plays.iter().min_by_key(|c| category_two_strength(c)) {
                return Some(Action::Play((*c).clone()));
            }
        }
        obs.legal_actions.iter().find(|a| a.is_pass()).cloned()
    }
}

impl Agent for BestPLowVAgent {
    fn act(&mut self, obs: &Observation) -> Result<Decision, AgentError> {
        BestPLowVAgent::choose(obs).map(Decision::new).ok_or(AgentError::NoLegalActions)
    }

    fn name(&self) -> &str {
        "rule"
    }
}
