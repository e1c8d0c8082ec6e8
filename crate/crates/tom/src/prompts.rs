//! Prompt assembly: belief, second-order belief and plan-evaluation prompts.

use serde::{Deserialize, Serialize};

use guandan::engine::HistoryEvent;
use guandan::{Action, Observation, ScoredAction, Seat};

use crate::error::{Result, TomError};
use crate::interpreter::{
    combo_plain, history_window, kind_name, render_history, render_observation, render_rules, RenderedHistory,
    RenderedObservation, RuleText,
};
use crate::templates::{Locale, TemplateStore};

pub const DEFAULT_HISTORY_WINDOW: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

/// What a prompt asks for. Not sent to the model; backends may use it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromptKind {
    Belief,
    SecondOrderBelief,
    /// A plan-evaluation prompt over this many indexed actions.
    PlanEval {
        actions: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBundle {
    pub messages: Vec<Message>,
    pub kind: PromptKind,
}

impl PromptBundle {
    fn new(system: String, user: String, kind: PromptKind) -> PromptBundle {
        PromptBundle {
            messages: vec![
                Message { role: Role::System, content: system },
                Message { role: Role::User, content: user },
            ],
            kind,
        }
    }

    pub fn system(&self) -> &str {
        self.messages.iter().find(|m| m.role == Role::System).map_or("", |m| m.content.as_str())
    }

    pub fn user(&self) -> &str {
        self.messages.iter().rev().find(|m| m.role == Role::User).map_or("", |m| m.content.as_str())
    }

    /// Plain-text dump: each message under a `[role]` header.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.messages {
            let role = match m.role {
                Role::System => "system",
                Role::User => "user",
                Role::Assistant => "assistant",
            };
            out.push_str(&format!("[{role}]\n{}\n\n", m.content));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeliefOrder {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefReport {
    pub text: String,
    pub order: BeliefOrder,
}

impl BeliefReport {
    pub fn first(text: impl Into<String>) -> BeliefReport {
        BeliefReport { text: text.into(), order: BeliefOrder::First }
    }

    /// The first-order report followed by the second-order one.
    pub fn second(first: &BeliefReport, second: &str) -> BeliefReport {
        BeliefReport { text: format!("{}\n\n{}", first.text.trim_end(), second.trim_end()), order: BeliefOrder::Second }
    }
}

/// Everything a prompt is built from, already rendered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptContext {
    pub locale: Locale,
    pub seat: Seat,
    pub rules: RuleText,
    pub observation: RenderedObservation,
    pub history: RenderedHistory,
}

impl PromptContext {
    pub fn new(
        store: &TemplateStore,
        obs: &Observation,
        history: &[HistoryEvent],
        window: usize,
        locale: Locale,
    ) -> Result<PromptContext> {
        Ok(PromptContext {
            locale,
            seat: obs.seat,
            rules: render_rules(store, obs.level, locale)?,
            observation: render_observation(store, obs, locale)?,
            history: render_history(store, history_window(history, window), obs.seat, locale)?,
        })
    }

    /// Context over the observation's own history.
    pub fn from_observation(
        store: &TemplateStore,
        obs: &Observation,
        window: usize,
        locale: Locale,
    ) -> Result<PromptContext> {
        PromptContext::new(store, obs, &obs.history, window, locale)
    }

    fn seats(&self) -> [(&'static str, String); 3] {
        [
            ("teammate", ((self.seat + 2) % 4).to_string()),
            ("next_opponent", ((self.seat + 1) % 4).to_string()),
            ("previous_opponent", ((self.seat + 3) % 4).to_string()),
        ]
    }
}

fn belief_block(store: &TemplateStore, locale: Locale, file: &str, belief: Option<&BeliefReport>) -> Result<String> {
    match belief {
        Some(b) => Ok(store.render(locale, file, "belief_block", &[("belief", b.text.trim_end())])? + "\n"),
        None => Ok(String::new()),
    }
}

fn user_prompt(store: &TemplateStore, ctx: &PromptContext, file: &str, extra: &[(&str, &str)]) -> Result<String> {
    let seats = ctx.seats();
    let mut values: Vec<(&str, &str)> =
        vec![("observation", ctx.observation.text.as_str()), ("history", ctx.history.text.as_str())];
    values.extend(seats.iter().map(|(k, v)| (*k, v.as_str())));
    values.extend_from_slice(extra);
    store.render(ctx.locale, file, "user", &values)
}

/// Asks for each other player's likely beliefs and hand strengths.
pub fn build_belief_prompt(store: &TemplateStore, ctx: &PromptContext) -> Result<PromptBundle> {
    let user = user_prompt(store, ctx, "belief", &[])?;
    Ok(PromptBundle::new(ctx.rules.text.clone(), user, PromptKind::Belief))
}

/// Asks how the opponents and the teammate see this seat's hand, building on
/// an optional first-order report.
pub fn build_second_order_prompt(
    store: &TemplateStore,
    ctx: &PromptContext,
    first_order: Option<&BeliefReport>,
) -> Result<PromptBundle> {
    let block = belief_block(store, ctx.locale, "second_order", first_order)?;
    let user = user_prompt(store, ctx, "second_order", &[("belief_block", &block)])?;
    Ok(PromptBundle::new(ctx.rules.text.clone(), user, PromptKind::SecondOrderBelief))
}

/// One line per shortlisted action, indexed from 0.
pub fn render_action_lines(store: &TemplateStore, locale: Locale, actions: &[ScoredAction]) -> Result<String> {
    let mut lines = Vec::with_capacity(actions.len());
    for (i, scored) in actions.iter().enumerate() {
        let index = i.to_string();
        let line = match &scored.action {
            Action::Pass => store.render(locale, "plan", "pass_action", &[("index", &index)])?,
            Action::Play(combo) => store.render(
                locale,
                "plan",
                "action",
                &[
                    ("index", &index),
                    ("kind", kind_name(store, locale, combo)?),
                    ("cards", &combo_plain(store, locale, combo)?),
                ],
            )?,
        };
        lines.push(line);
    }
    Ok(lines.join("\n"))
}

/// The merged plan-and-evaluate prompt. Without a belief report this is the
/// plain planning prompt.
pub fn build_plan_eval_prompt(
    store: &TemplateStore,
    ctx: &PromptContext,
    belief: Option<&BeliefReport>,
    topk: &[ScoredAction],
) -> Result<PromptBundle> {
    if topk.is_empty() {
        return Err(TomError::InvalidInput("plan prompt needs at least one action".into()));
    }
    let block = belief_block(store, ctx.locale, "plan", belief)?;
    let actions = render_action_lines(store, ctx.locale, topk)?;
    let user = user_prompt(store, ctx, "plan", &[("belief_block", &block), ("actions", &actions)])?;
    Ok(PromptBundle::new(ctx.rules.text.clone(), user, PromptKind::PlanEval { actions: topk.len() }))
}
