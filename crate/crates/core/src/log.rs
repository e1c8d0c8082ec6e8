//! JSON-lines game log.
//!
//! One line per engine step:
//! `{deal, step, seat, action_kind, cards[], wild{}, hand_sizes[4], incumbent, legal_count, chosen_index}`
//! and one terminal line per deal: `{deal, finish_order[], team_points{}}`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::cards::{Card, Face, Level, NUM_SEATS};
use crate::combos::{validate_combo, Action, ComboKind, WildAssignment};
use crate::engine::{replay_deal, DealRecord, DealResult, DealState, MatchConfig, Seat, StepRecord};
use crate::error::{GameError, Result};

pub const PASS_KIND: &str = "Pass";
pub const TEAM_KEYS: [&str; 2] = ["0&2", "1&3"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepLine {
    pub deal: usize,
    pub step: usize,
    pub seat: Seat,
    pub action_kind: String,
    pub cards: Vec<String>,
    pub wild: BTreeMap<String, String>,
    pub hand_sizes: [usize; NUM_SEATS],
    pub incumbent: Option<String>,
    pub legal_count: usize,
    pub chosen_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultLine {
    pub deal: usize,
    pub finish_order: [Seat; NUM_SEATS],
    pub team_points: BTreeMap<String, i32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LogLine {
    Step(StepLine),
    Result(ResultLine),
}

impl StepLine {
    pub fn from_record(deal: usize, step: &StepRecord) -> StepLine {
        let (action_kind, cards, wild) = match &step.action {
            Action::Pass => (PASS_KIND.to_string(), Vec::new(), BTreeMap::new()),
            Action::Play(c) => (
                c.kind().name().to_string(),
                c.cards().iter().map(ToString::to_string).collect(),
                c.wild().iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            ),
        };
        StepLine {
            deal,
            step: step.step,
            seat: step.seat,
            action_kind,
            cards,
            wild,
            hand_sizes: step.hand_sizes,
            incumbent: step.incumbent.as_ref().map(ToString::to_string),
            legal_count: step.legal_count,
            chosen_index: step.chosen_index,
            violation: step.violation.clone(),
        }
    }

    /// Rebuilds and validates the logged action.
    pub fn action(&self, level: Level) -> Result<Action> {
        if self.action_kind == PASS_KIND {
            return Ok(Action::Pass);
        }
        let kind = ComboKind::from_name(&self.action_kind)
            .ok_or_else(|| GameError::Parse(format!("unknown action kind {:?}", self.action_kind)))?;
        let cards = self.cards.iter().map(|c| c.parse()).collect::<Result<Vec<Card>>>()?;
        let mut wild = WildAssignment::new();
        for (card, face) in &self.wild {
            wild.insert(card.parse()?, face.parse::<Face>()?);
        }
        Ok(Action::Play(validate_combo(&cards, kind, &wild, level)?))
    }
}

impl ResultLine {
    pub fn from_result(deal: usize, result: &DealResult) -> ResultLine {
        ResultLine {
            deal,
            finish_order: result.finish_order,
            team_points: TEAM_KEYS.iter().zip(result.team_points).map(|(k, p)| (k.to_string(), p)).collect(),
        }
    }
}

pub fn deal_lines(record: &DealRecord) -> Vec<LogLine> {
    let mut lines: Vec<LogLine> =
        record.steps.iter().map(|s| LogLine::Step(StepLine::from_record(record.deal_index, s))).collect();
    lines.push(LogLine::Result(ResultLine::from_result(record.deal_index, &record.result)));
    lines
}

pub fn write_deal<W: Write>(out: &mut W, record: &DealRecord) -> std::io::Result<()> {
    for line in deal_lines(record) {
        serde_json::to_writer(&mut *out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses a log, skipping lines that are not valid log records. Returns the
/// parsed lines and how many were skipped.
pub fn read_lines<R: BufRead>(input: R) -> std::io::Result<(Vec<LogLine>, usize)> {
    let mut lines = Vec::new();
    let mut skipped = 0;
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<LogLine>(&line) {
            Ok(l) => lines.push(l),
            Err(_) => skipped += 1,
        }
    }
    Ok((lines, skipped))
}

/// Replays one deal's logged steps on top of a fresh deal from `config`.
pub fn replay_from_log(config: &MatchConfig, deal_index: usize, lines: &[LogLine]) -> Result<DealState> {
    let steps: Vec<&StepLine> = lines
        .iter()
        .filter_map(|l| match l {
            LogLine::Step(s) if s.deal == deal_index => Some(s),
            _ => None,
        })
        .collect();
    let leader = steps.first().map_or(0, |s| s.seat);
    let level = config.level_for(deal_index);
    let actions = steps.iter().map(|s| s.action(level)).collect::<Result<Vec<_>>>()?;
    replay_deal(config, deal_index, leader, &actions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{Agent, RandomAgent};
    use crate::engine::run_match;

    #[test]
    fn log_round_trip_replays_the_match() {
        let config = MatchConfig::new(2, 11);
        let mut agents: Vec<Box<dyn Agent>> = (0..4).map(|s| Box::new(RandomAgent::new(s)) as Box<dyn Agent>).collect();
        let record = run_match(&config, &mut agents).unwrap();
        let mut buf = Vec::new();
        for deal in &record.deals {
            write_deal(&mut buf, deal).unwrap();
        }
        let (lines, skipped) = read_lines(buf.as_slice()).unwrap();
        assert_eq!(skipped, 0);
        assert!(matches!(lines.last(), Some(LogLine::Result(_))));
        for deal in &record.deals {
            let replayed = replay_from_log(&config, deal.deal_index, &lines).unwrap();
            assert_eq!(replayed, deal.final_state);
        }
    }

    #[test]
    fn malformed_lines_are_counted() {
        let text = "{\"deal\":0}\nnot json\n\n{\"deal\":0,\"finish_order\":[0,1,2,3],\"team_points\":{\"0&2\":2,\"1&3\":-2}}\n";
        let (lines, skipped) = read_lines(text.as_bytes()).unwrap();
        assert_eq!(lines.len(), 1);
        assert_eq!(skipped, 2);
    }
}
