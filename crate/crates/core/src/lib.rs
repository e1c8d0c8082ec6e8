//! Rules engine for Guandan, the four-player partnership climbing game:
//! cards and combos, legal-move generation with wildcards, the deal state
//! machine, scoring, baseline agents, the action recommender and the
//! JSON-lines game log.

pub mod agents;
pub mod cards;
pub mod combos;
pub mod engine;
pub mod error;
pub mod fixtures;
pub mod log;
pub mod recommender;

pub use agents::{Agent, AgentError, BestPLowVAgent, Decision, Observation, RandomAgent};
pub use cards::{build_deck, deal, is_wildcard, Card, Face, Level, Rank, Suit};
pub use combos::{beats, enumerate_legal_actions, validate_combo, Action, Combo, ComboKind, WildAssignment};
pub use engine::{
    deal_outcome, run_deal, run_match, DealRecord, DealResult, DealState, MatchConfig, MatchRecord, Seat,
};
pub use error::{GameError, Result};
pub use recommender::{top_k, HeuristicScorer, HeuristicWeights, RecommenderAgent, ScoredAction, Scorer};
