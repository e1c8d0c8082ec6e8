//! Agent specs by name and the factory that builds them for a seat.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use guandan::recommender::DEFAULT_K;
use guandan::{Agent, BestPLowVAgent, HeuristicScorer, HeuristicWeights, RandomAgent, RecommenderAgent, Seat};
use guandan_tom::{DecisionLog, LlmBackend, MockBackend, TemplateStore, TomAgent, TomConfig, TomMode};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AgentSpec {
    Random,
    Rule,
    Reco,
    Tom(TomMode),
}

impl AgentSpec {
    pub const NAMES: [&'static str; 6] = ["random", "rule", "reco", "tom-vanilla", "tom-1st", "tom-2nd"];

    pub fn name(self) -> &'static str {
        match self {
            AgentSpec::Random => "random",
            AgentSpec::Rule => "rule",
            AgentSpec::Reco => "reco",
            AgentSpec::Tom(TomMode::Vanilla) => "tom-vanilla",
            AgentSpec::Tom(TomMode::First) => "tom-1st",
            AgentSpec::Tom(TomMode::Second) => "tom-2nd",
        }
    }

    pub fn is_tom(self) -> bool {
        matches!(self, AgentSpec::Tom(_))
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<AgentSpec> {
        match s.trim() {
            "random" => Ok(AgentSpec::Random),
            "rule" => Ok(AgentSpec::Rule),
            "reco" => Ok(AgentSpec::Reco),
            "tom-vanilla" => Ok(AgentSpec::Tom(TomMode::Vanilla)),
            "tom-1st" => Ok(AgentSpec::Tom(TomMode::First)),
            "tom-2nd" => Ok(AgentSpec::Tom(TomMode::Second)),
            other => Err(HarnessError::InvalidInput(format!(
                "unknown agent {other:?}; expected one of {}",
                AgentSpec::NAMES.join(", ")
            ))),
        }
    }
}

impl TryFrom<String> for AgentSpec {
    type Error = HarnessError;

    fn try_from(s: String) -> Result<AgentSpec> {
        s.parse()
    }
}

impl From<AgentSpec> for String {
    fn from(spec: AgentSpec) -> String {
        spec.name().to_string()
    }
}

/// Seed for the agent at `seat` in the game seeded with `game_seed`. Depends
/// on the seat, never on which team sits there.
pub fn agent_seed(game_seed: u64, seat: Seat) -> u64 {
    let mixed = game_seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(29);
    mixed ^ (seat as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

/// Builds agents from specs. Shared read-only across games.
#[derive(Clone)]
pub struct AgentFactory {
    pub weights: HeuristicWeights,
    pub k: usize,
    /// Settings for language-model agents; `mode` is taken from the spec.
    pub tom: TomConfig,
    pub backend: Arc<dyn LlmBackend>,
    pub store: Arc<TemplateStore>,
}

impl Default for AgentFactory {
    fn default() -> Self {
        AgentFactory {
            weights: HeuristicWeights::default(),
            k: DEFAULT_K,
            tom: TomConfig::default(),
            backend: Arc::new(MockBackend::new()),
            store: Arc::new(TemplateStore::builtin()),
        }
    }
}

impl AgentFactory {
    pub fn build(
        &self,
        spec: AgentSpec,
        seat: Seat,
        game_seed: u64,
        log: Option<&DecisionLog>,
    ) -> Result<Box<dyn Agent>> {
        if self.k < 1 {
            return Err(HarnessError::InvalidInput("recommender k must be at least 1".into()));
        }
        let scorer = || Box::new(HeuristicScorer::new(self.weights));
        Ok(match spec {
            AgentSpec::Random => Box::new(RandomAgent::new(agent_seed(game_seed, seat))),
            AgentSpec::Rule => Box::new(BestPLowVAgent::new()),
            AgentSpec::Reco => Box::new(RecommenderAgent::new(scorer())),
            AgentSpec::Tom(mode) => {
                let config = TomConfig { mode, k: self.k, ..self.tom.clone() };
                let agent = TomAgent::new(config, self.backend.clone(), self.store.clone()).with_scorer(scorer());
                match log {
                    Some(log) => Box::new(agent.with_log(log.clone())),
                    None => Box::new(agent),
                }
            }
        })
    }

    /// One agent per seat; `seats[i]` is the spec for seat `i`.
    pub fn build_table(
        &self,
        seats: [AgentSpec; 4],
        game_seed: u64,
        log: Option<&DecisionLog>,
    ) -> Result<Vec<Box<dyn Agent>>> {
        seats.iter().enumerate().map(|(seat, &spec)| self.build(spec, seat, game_seed, log)).collect()
    }
}
