//! The language-model planning agent in its three flavours.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use guandan::recommender::{score_actions, top_k, DEFAULT_K};
use guandan::{Agent, AgentError, Decision, HeuristicScorer, Observation, ScoredAction, Scorer};

use crate::backend::{truncate_chars, GenerationParams, LlmBackend};
use crate::error::{Result, TomError};
use crate::parse::parse_action_choice;
use crate::prompts::{
    build_belief_prompt, build_plan_eval_prompt, build_second_order_prompt, BeliefReport, PromptBundle, PromptContext,
    DEFAULT_HISTORY_WINDOW,
};
use crate::templates::{Locale, TemplateStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TomMode {
    Vanilla,
    First,
    Second,
}

impl TomMode {
    pub fn name(self) -> &'static str {
        match self {
            TomMode::Vanilla => "vanilla",
            TomMode::First => "first",
            TomMode::Second => "second",
        }
    }

    /// Backend calls per decision.
    pub fn calls_per_decision(self) -> usize {
        match self {
            TomMode::Vanilla => 1,
            TomMode::First => 2,
            TomMode::Second => 3,
        }
    }
}

impl fmt::Display for TomMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TomMode {
    type Err = TomError;

    fn from_str(s: &str) -> Result<TomMode> {
        match s {
            "vanilla" => Ok(TomMode::Vanilla),
            "first" | "1st" => Ok(TomMode::First),
            "second" | "2nd" => Ok(TomMode::Second),
            other => Err(TomError::InvalidInput(format!("unknown mode {other:?}"))),
        }
    }
}

/// One decision-log record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionLine {
    pub deal: usize,
    pub step: usize,
    pub seat: usize,
    pub mode: TomMode,
    pub prompts: Vec<String>,
    pub responses: Vec<String>,
    pub chosen_index: usize,
    pub fallback: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Shared sink for decision records, appended in decision order.
pub type DecisionLog = Arc<Mutex<Vec<DecisionLine>>>;

pub fn new_decision_log() -> DecisionLog {
    Arc::new(Mutex::new(Vec::new()))
}

#[derive(Debug, Clone)]
pub struct TomConfig {
    pub mode: TomMode,
    pub k: usize,
    pub locale: Locale,
    pub history_window: usize,
    pub params: GenerationParams,
}

impl Default for TomConfig {
    fn default() -> Self {
        TomConfig {
            mode: TomMode::Vanilla,
            k: DEFAULT_K,
            locale: Locale::default(),
            history_window: DEFAULT_HISTORY_WINDOW,
            params: GenerationParams::default(),
        }
    }
}

pub struct TomAgent {
    config: TomConfig,
    backend: Arc<dyn LlmBackend>,
    scorer: Box<dyn Scorer>,
    store: Arc<TemplateStore>,
    log: Option<DecisionLog>,
    label: String,
}

struct Transcript {
    prompts: Vec<String>,
    responses: Vec<String>,
}

impl TomAgent {
    pub fn new(config: TomConfig, backend: Arc<dyn LlmBackend>, store: Arc<TemplateStore>) -> TomAgent {
        let label = format!("tom-{}", config.mode);
        TomAgent { config, backend, scorer: Box::new(HeuristicScorer::default()), store, log: None, label }
    }

    pub fn with_scorer(mut self, scorer: Box<dyn Scorer>) -> TomAgent {
        self.scorer = scorer;
        self
    }

    pub fn with_log(mut self, log: DecisionLog) -> TomAgent {
        self.log = Some(log);
        self
    }

    pub fn config(&self) -> &TomConfig {
        &self.config
    }

    fn call(&self, prompt: &PromptBundle, transcript: &mut Transcript) -> std::result::Result<String, String> {
        transcript.prompts.push(prompt.to_text());
        let reply = self.backend.complete(prompt, &self.config.params).map_err(|e| e.to_string())?;
        let reply = truncate_chars(&reply, self.config.params.max_output).to_string();
        transcript.responses.push(reply.clone());
        Ok(reply)
    }

    /// Runs the prompt chain and returns the model's final reply.
    fn run_chain(
        &self,
        obs: &Observation,
        topk: &[ScoredAction],
        transcript: &mut Transcript,
    ) -> std::result::Result<String, String> {
        let store = self.store.as_ref();
        let ctx = PromptContext::from_observation(store, obs, self.config.history_window, self.config.locale)
            .map_err(|e| e.to_string())?;
        let belief = match self.config.mode {
            TomMode::Vanilla => None,
            TomMode::First | TomMode::Second => {
                let prompt = build_belief_prompt(store, &ctx).map_err(|e| e.to_string())?;
                let first = BeliefReport::first(self.call(&prompt, transcript)?);
                if self.config.mode == TomMode::Second {
                    let prompt = build_second_order_prompt(store, &ctx, Some(&first)).map_err(|e| e.to_string())?;
                    let second = self.call(&prompt, transcript)?;
                    Some(BeliefReport::second(&first, &second))
                } else {
                    Some(first)
                }
            }
        };
        let prompt = build_plan_eval_prompt(store, &ctx, belief.as_ref(), topk).map_err(|e| e.to_string())?;
        self.call(&prompt, transcript)
    }

    fn record(
        &self,
        obs: &Observation,
        transcript: Transcript,
        chosen_index: usize,
        fallback: bool,
        error: Option<String>,
    ) {
        if let Some(log) = &self.log {
            let line = DecisionLine {
                deal: obs.deal_index,
                step: obs.step,
                seat: obs.seat,
                mode: self.config.mode,
                prompts: transcript.prompts,
                responses: transcript.responses,
                chosen_index,
                fallback,
                error,
            };
            log.lock().unwrap_or_else(|e| e.into_inner()).push(line);
        }
    }
}

impl Agent for TomAgent {
    fn act(&mut self, obs: &Observation) -> std::result::Result<Decision, AgentError> {
        let scored = score_actions(self.scorer.as_ref(), obs);
        let topk = top_k(&scored, self.config.k).map_err(|e| AgentError::Other(e.to_string()))?;
        if topk.is_empty() {
            return Err(AgentError::NoLegalActions);
        }
        let mut transcript = Transcript { prompts: Vec::new(), responses: Vec::new() };
        if topk.len() == 1 {
            self.record(obs, transcript, 0, false, None);
            return Ok(Decision { action: topk[0].action.clone(), presented_index: Some(0) });
        }
        let (index, fallback, error) = match self.run_chain(obs, &topk, &mut transcript) {
            Ok(reply) => {
                let parsed = parse_action_choice(&reply, topk.len());
                (parsed.index, parsed.fallback, None)
            }
            Err(e) => (0, true, Some(e)),
        };
        self.record(obs, transcript, index, fallback, error);
        Ok(Decision { action: topk[index].action.clone(), presented_index: Some(index) })
    }

    fn name(&self) -> &str {
        &self.label
    }
}
