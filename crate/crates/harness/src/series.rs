//! Evaluation series: a fixed seed per game with team A on seats 0 and 2,
//! and the position-swap variant that replays the same seeds with the teams
//! exchanged.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use guandan::engine::run_match;
use guandan::{Level, MatchConfig, MatchRecord};
use guandan_tom::{new_decision_log, DecisionLine};

use crate::agents::{AgentFactory, AgentSpec};
use crate::error::{HarnessError, Result};

pub const POS_02: &str = "(Pos 0 & 2)";
pub const POS_13: &str = "(Pos 1 & 3)";

#[derive(Debug, Clone)]
pub struct SeriesOptions {
    pub deals_per_game: usize,
    pub level_schedule: Vec<Level>,
    /// Worker threads; 1 runs games one after another.
    pub parallel: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions { deals_per_game: 1, level_schedule: vec![Level::default()], parallel: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Seeded,
    Swap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRow {
    pub game: usize,
    pub seed: u64,
    /// `"0&2"` or `"1&3"`.
    pub team_a_seats: String,
    pub team_a_points: i32,
    pub team_b_points: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub label: String,
    pub games: usize,
    pub team_a_average: f64,
    pub team_b_average: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub protocol: Protocol,
    pub team_a: AgentSpec,
    pub team_b: AgentSpec,
    pub n_games: usize,
    pub base_seed: u64,
    pub deals_per_game: usize,
    pub games: Vec<GameRow>,
    pub summary: Vec<SummaryRow>,
}

/// Everything one game produced.
#[derive(Debug, Clone)]
pub struct GameOutcome {
    pub game: usize,
    pub seed: u64,
    /// Which seats team A occupied: `false` for 0 & 2, `true` for 1 & 3.
    pub swapped: bool,
    pub record: MatchRecord,
    pub decisions: Vec<DecisionLine>,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub report: SeriesReport,
    pub outcomes: Vec<GameOutcome>,
}

fn mean(values: impl Iterator<Item = i32>) -> f64 {
    let (sum, n) = values.fold((0i64, 0usize), |(s, n), v| (s + i64::from(v), n + 1));
    if n == 0 {
        0.0
    } else {
        sum as f64 / n as f64
    }
}

fn summarize(label: String, rows: &[GameRow]) -> SummaryRow {
    SummaryRow {
        label,
        games: rows.len(),
        team_a_average: mean(rows.iter().map(|r| r.team_a_points)),
        team_b_average: mean(rows.iter().map(|r| r.team_b_points)),
    }
}

/// Plays one game. Team A takes seats 0 and 2 unless `swapped`.
pub fn play_game(
    factory: &AgentFactory,
    team_a: AgentSpec,
    team_b: AgentSpec,
    game: usize,
    seed: u64,
    swapped: bool,
    options: &SeriesOptions,
) -> Result<GameOutcome> {
    let seats = if swapped { [team_b, team_a, team_b, team_a] } else { [team_a, team_b, team_a, team_b] };
    let log = new_decision_log();
    let mut agents = factory.build_table(seats, seed, Some(&log))?;
    let config = MatchConfig {
        num_deals: options.deals_per_game,
        base_seed: seed,
        level_schedule: options.level_schedule.clone(),
    };
    let record = run_match(&config, &mut agents)?;
    drop(agents);
    let decisions = std::mem::take(&mut *log.lock().unwrap_or_else(|e| e.into_inner()));
    Ok(GameOutcome { game, seed, swapped, record, decisions })
}

fn run_games(
    factory: &AgentFactory,
    team_a: AgentSpec,
    team_b: AgentSpec,
    jobs: Vec<(usize, u64, bool)>,
    options: &SeriesOptions,
) -> Result<Vec<GameOutcome>> {
    if options.deals_per_game < 1 {
        return Err(HarnessError::InvalidInput("deals per game must be at least 1".into()));
    }
    let run =
        |&(game, seed, swapped): &(usize, u64, bool)| play_game(factory, team_a, team_b, game, seed, swapped, options);
    if options.parallel <= 1 {
        return jobs.iter().map(run).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.parallel)
        .build()
        .map_err(|e| HarnessError::InvalidInput(format!("thread pool: {e}")))?;
    // Indexed parallel collect keeps game order regardless of finish order.
    pool.install(|| jobs.par_iter().map(run).collect())
}

fn game_row(outcome: &GameOutcome) -> GameRow {
    let (a, b) = if outcome.swapped { (1, 0) } else { (0, 1) };
    GameRow {
        game: outcome.game,
        seed: outcome.seed,
        team_a_seats: if outcome.swapped { "1&3" } else { "0&2" }.to_string(),
        team_a_points: outcome.record.totals[a],
        team_b_points: outcome.record.totals[b],
    }
}

/// Game `i` uses seed `base_seed + i`, team A on seats 0 and 2.
pub fn run_seeded_series(
    factory: &AgentFactory,
    team_a: AgentSpec,
    team_b: AgentSpec,
    n_games: usize,
    base_seed: u64,
    options: &SeriesOptions,
) -> Result<Series> {
    if n_games < 1 {
        return Err(HarnessError::InvalidInput("a series needs at least one game".into()));
    }
    let jobs = (0..n_games).map(|i| (i, base_seed.wrapping_add(i as u64), false)).collect();
    let outcomes = run_games(factory, team_a, team_b, jobs, options)?;
    let games: Vec<GameRow> = outcomes.iter().map(game_row).collect();
    let summary = vec![summarize(format!("{team_a} vs {team_b}"), &games)];
    let report = SeriesReport {
        protocol: Protocol::Seeded,
        team_a,
        team_b,
        n_games,
        base_seed,
        deals_per_game: options.deals_per_game,
        games,
        summary,
    };
    Ok(Series { report, outcomes })
}

/// First half with team A on seats 0 and 2, second half on 1 and 3; the
/// second half reuses the first half's seeds.
pub fn run_position_swap(
    factory: &AgentFactory,
    team_a: AgentSpec,
    team_b: AgentSpec,
    n_games: usize,
    base_seed: u64,
    options: &SeriesOptions,
) -> Result<Series> {
    if n_games < 2 || !n_games.is_multiple_of(2) {
        return Err(HarnessError::InvalidInput(format!("position swap needs an even number of games, got {n_games}")));
    }
    let half = n_games / 2;
    let jobs = (0..n_games).map(|i| (i, base_seed.wrapping_add((i % half) as u64), i >= half)).collect();
    let outcomes = run_games(factory, team_a, team_b, jobs, options)?;
    let games: Vec<GameRow> = outcomes.iter().map(game_row).collect();
    let summary = vec![
        summarize(format!("{team_a} {POS_02}"), &games[..half]),
        summarize(format!("{team_a} {POS_13}"), &games[half..]),
        summarize(format!("{team_a} (combined)"), &games),
    ];
    let report = SeriesReport {
        protocol: Protocol::Swap,
        team_a,
        team_b,
        n_games,
        base_seed,
        deals_per_game: options.deals_per_game,
        games,
        summary,
    };
    Ok(Series { report, outcomes })
}

impl SeriesReport {
    /// The team A average of the last summary row.
    pub fn combined_average(&self) -> f64 {
        self.summary.last().map_or(0.0, |r| r.team_a_average)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned human-readable table, one line per summary row.
    pub fn to_table(&self) -> String {
        let headers = ["Agent", "Games", &format!("Avg vs {}", self.team_b), "Opponent avg"];
        let rows: Vec<[String; 4]> = self
            .summary
            .iter()
            .map(|r| {
                [
                    r.label.clone(),
                    r.games.to_string(),
                    format!("{:+.3}", r.team_a_average),
                    format!("{:+.3}", r.team_b_average),
                ]
            })
            .collect();
        let mut widths = headers.map(|h| h.chars().count());
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: [&str; 4]| {
            let _ = write!(
                out,
                "{:<w0$}  {:>w1$}  {:>w2$}  {:>w3$}",
                cells[0],
                cells[1],
                cells[2],
                cells[3],
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2],
                w3 = widths[3]
            );
            out.push('\n');
        };
        line(&mut out, headers);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(&mut out, [&rule[0], &rule[1], &rule[2], &rule[3]]);
        for row in &rows {
            line(&mut out, [&row[0], &row[1], &row[2], &row[3]]);
        }
        out
    }
}
