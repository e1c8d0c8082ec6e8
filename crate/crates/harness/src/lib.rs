//! Evaluation protocols for Guandan agents: seeded series, position-swap
//! series, and action-distribution statistics from game logs.

pub mod agents;
pub mod error;
pub mod output;
pub mod series;
pub mod stats;

pub use agents::{agent_seed, AgentFactory, AgentSpec};
pub use error::{HarnessError, Result};
pub use series::{run_position_swap, run_seeded_series, GameOutcome, Protocol, Series, SeriesOptions, SeriesReport};
pub use stats::{collect_action_stats, ActionStats};
