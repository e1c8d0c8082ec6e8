//! Run configuration: an optional JSON file, then command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use guandan::{HeuristicWeights, Level};
use guandan_harness::AgentSpec;
use guandan_tom::{GenerationParams, HttpConfig, Locale};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Mock,
    Http,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendSettings {
    pub kind: BackendKind,
    pub generation: GenerationParams,
    pub http: HttpConfig,
    /// JSON file of canned mock replies keyed by prompt digest.
    pub mock_responses: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// One spec per seat, for `simulate`.
    pub agents: Option<Vec<AgentSpec>>,
    pub team_a: Option<AgentSpec>,
    pub team_b: Option<AgentSpec>,
    pub protocol: Option<String>,
    pub games: Option<usize>,
    pub deals: usize,
    pub deals_per_game: usize,
    pub seed: u64,
    pub level_schedule: Vec<Level>,
    pub k: usize,
    pub weights: HeuristicWeights,
    pub locale: String,
    pub templates: Option<PathBuf>,
    pub history_window: usize,
    pub backend: BackendSettings,
    pub out: Option<PathBuf>,
    pub parallel: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            agents: None,
            team_a: None,
            team_b: None,
            protocol: None,
            games: None,
            deals: 1,
            deals_per_game: 1,
            seed: 0,
            level_schedule: vec![Level::default()],
            k: guandan::recommender::DEFAULT_K,
            weights: HeuristicWeights::default(),
            locale: Locale::default().to_string(),
            templates: None,
            history_window: guandan_tom::prompts::DEFAULT_HISTORY_WINDOW,
            backend: BackendSettings::default(),
            out: None,
            parallel: 1,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn locale(&self) -> Result<Locale> {
        Ok(self.locale.parse()?)
    }

    /// Checks that do not depend on the command.
    pub fn validate(&self) -> Result<()> {
        self.locale()?;
        if self.k < 1 {
            bail!("k must be at least 1");
        }
        if self.level_schedule.is_empty() {
            bail!("level_schedule must not be empty");
        }
        if self.parallel < 1 {
            bail!("parallel must be at least 1");
        }
        if self.history_window < 1 {
            bail!("history_window must be at least 1");
        }
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

pub fn parse_agents(list: &str) -> Result<Vec<AgentSpec>> {
    list.split(',').map(|s| Ok(s.parse::<AgentSpec>()?)).collect()
}
