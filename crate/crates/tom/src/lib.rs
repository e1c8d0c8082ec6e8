//! Language-model planning agents for Guandan: state-to-text rendering,
//! prompt assembly for plain, first-order and second-order Theory-of-Mind
//! planning, reply parsing, and the backend abstraction.

pub mod agent;
pub mod backend;
pub mod error;
pub mod interpreter;
pub mod parse;
pub mod prompts;
pub mod templates;

pub use agent::{new_decision_log, DecisionLine, DecisionLog, TomAgent, TomConfig, TomMode};
pub use backend::{BackendError, GenerationParams, HttpBackend, HttpConfig, LlmBackend, MockBackend};
pub use error::{Result, TomError};
pub use interpreter::{render_history, render_observation, render_rules};
pub use parse::{parse_action_choice, ParsedChoice};
pub use prompts::{
    build_belief_prompt, build_plan_eval_prompt, build_second_order_prompt, BeliefReport, PromptBundle, PromptContext,
};
pub use templates::{Locale, TemplateStore};
