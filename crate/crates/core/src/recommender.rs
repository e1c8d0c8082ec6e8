//! Action scoring and top-k shortlisting.
//!
//! [`HeuristicScorer`] stands in for a learned action-value model; anything
//! implementing [`Scorer`] can replace it.

use serde::{Deserialize, Serialize};

use crate::agents::{Agent, AgentError, Decision, Observation};
use crate::combos::Action;
use crate::error::{GameError, Result};

pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredAction {
    pub action: Action,
    pub score: f64,
}

pub trait Scorer: Send + Sync {
    fn score(&self, obs: &Observation, action: &Action) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeuristicWeights {
    pub pass: f64,
    pub per_card: f64,
    pub per_rank: f64,
    pub category_two: f64,
    pub empties_hand: f64,
    pub beats_opponent: f64,
}

impl Default for HeuristicWeights {
    fn default() -> Self {
        HeuristicWeights {
            pass: -1.0,
            per_card: 2.0,
            per_rank: -0.1,
            category_two: -5.0,
            empties_hand: 6.0,
            beats_opponent: 1.5,
        }
    }
}

/// Prefers shedding many low cards, holding bombs back, going out, and
/// taking tricks away from opponents.
#[derive(Debug, Clone, Default)]
pub struct HeuristicScorer {
    pub weights: HeuristicWeights,
}

impl HeuristicScorer {
    pub fn new(weights: HeuristicWeights) -> HeuristicScorer {
        HeuristicScorer { weights }
    }
}

impl Scorer for HeuristicScorer {
    fn score(&self, obs: &Observation, action: &Action) -> f64 {
        let w = &self.weights;
        let Some(combo) = action.combo() else {
            return w.pass;
        };
        let mut score = w.per_card * combo.len() as f64 + w.per_rank * f64::from(combo.key_rank().ordinal());
        if combo.kind().is_category_two() {
            score += w.category_two;
        }
        if combo.len() == obs.hand.len() {
            score += w.empties_hand;
        }
        if matches!(&obs.last_play, Some((owner, _)) if obs.is_opponent(*owner)) {
            score += w.beats_opponent;
        }
        score
    }
}

/// Scores every legal action, best first; ties keep enumeration order.
pub fn score_actions(scorer: &dyn Scorer, obs: &Observation) -> Vec<ScoredAction> {
    let mut scored: Vec<ScoredAction> =
        obs.legal_actions.iter().map(|a| ScoredAction { action: a.clone(), score: scorer.score(obs, a) }).collect();
    scored.sort_by(|a, b| b.score.total_cmp(&a.score));
    scored
}

/// The first `k` entries of a best-first list. When the list offers Pass
/// (the seat is following) and the cut dropped it, Pass is appended so the
/// decision maker can always decline.
pub fn top_k(scored: &[ScoredAction], k: usize) -> Result<Vec<ScoredAction>> {
    if k < 1 {
        return Err(GameError::InvalidInput("k must be at least 1".into()));
    }
    let mut kept: Vec<ScoredAction> = scored.iter().take(k).cloned().collect();
    if !kept.iter().any(|s| s.action.is_pass()) {
        if let Some(pass) = scored.iter().find(|s| s.action.is_pass()) {
            kept.push(pass.clone());
        }
    }
    Ok(kept)
}

/// Plays the scorer's top choice.
pub struct RecommenderAgent {
    scorer: Box<dyn Scorer>,
}

impl RecommenderAgent {
    pub fn new(scorer: Box<dyn Scorer>) -> RecommenderAgent {
        RecommenderAgent { scorer }
    }
}

impl Agent for RecommenderAgent {
    fn act(&mut self, obs: &Observation) -> std::result::Result<Decision, AgentError> {
        score_actions(self.scorer.as_ref(), obs)
            .into_iter()
            .next()
            .map(|s| Decision::new(s.action))
            .ok_or(AgentError::NoLegalActions)
    }

    fn name(&self) -> &str {
        "reco"
    }
}
