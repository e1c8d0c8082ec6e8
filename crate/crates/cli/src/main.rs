mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use guandan::engine::run_match;
use guandan::log::{write_deal, ResultLine};
use guandan::recommender::{score_actions, top_k};
use guandan::{fixtures, HeuristicScorer, MatchConfig};
use guandan_harness::stats::{collect_from_files, log_files};
use guandan_harness::{run_position_swap, run_seeded_series, AgentFactory, AgentSpec, SeriesOptions};
use guandan_tom::prompts::{
    build_belief_prompt, build_plan_eval_prompt, build_second_order_prompt, BeliefReport, PromptContext,
};
use guandan_tom::{new_decision_log, HttpBackend, LlmBackend, MockBackend, TemplateStore, TomConfig, TomMode};

use config::{parse_agents, BackendKind, RunConfig};

/// Configuration or usage problems; reported with exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    anyhow!(Usage(e.to_string()))
}

#[derive(Parser)]
#[command(name = "guandan", version, about = "Guandan engine, agents and evaluation harness")]
struct Cli {
    /// JSON run configuration; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output root for every file the command writes.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Prompt language: zh or en.
    #[arg(long, global = true)]
    locale: Option<String>,
    /// Directory with <locale>/*.txt templates replacing the built-in ones.
    #[arg(long, global = true)]
    templates: Option<PathBuf>,
    /// Allow the HTTP backend to contact a real endpoint.
    #[arg(long, global = true)]
    live: bool,
    /// Number of games run concurrently.
    #[arg(long, global = true)]
    parallel: Option<usize>,
    /// Recommender shortlist size.
    #[arg(long, global = true)]
    k: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Seeded,
    Swap,
}

#[derive(Subcommand)]
enum Command {
    /// Play a match and write its game log.
    Simulate {
        /// Four comma-separated agent names, seat 0 first.
        #[arg(long)]
        agents: Option<String>,
        #[arg(long)]
        deals: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run an evaluation series between two agent kinds.
    Evaluate {
        #[arg(long, value_enum)]
        protocol: Option<ProtocolArg>,
        /// Team A agent (seats 0 and 2 unless swapped).
        #[arg(long = "a")]
        team_a: Option<String>,
        #[arg(long = "b")]
        team_b: Option<String>,
        #[arg(long)]
        games: Option<usize>,
        #[arg(long)]
        deals_per_game: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Histogram legal-list lengths and chosen indices from game logs.
    Analyze {
        /// Directory containing game_*.jsonl logs.
        logs: PathBuf,
        /// Only count these seats (comma-separated).
        #[arg(long)]
        seats: Option<String>,
    },
    /// Print the prompts for the worked-example position.
    RenderPrompt {
        /// vanilla, 1st or 2nd.
        #[arg(long, default_value = "vanilla")]
        mode: String,
        #[arg(long, default_value = "worked-example")]
        fixture: String,
    },
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(cli.config.as_deref()).map_err(|e| usage(format!("{e:#}")))?;
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if let Some(locale) = &cli.locale {
        cfg.locale = locale.clone();
    }
    if let Some(t) = &cli.templates {
        cfg.templates = Some(t.clone());
    }
    if let Some(p) = cli.parallel {
        cfg.parallel = p;
    }
    if let Some(k) = cli.k {
        cfg.k = k;
    }
    match &cli.command {
        Command::Simulate { agents, deals, seed } => {
            if let Some(a) = agents {
                cfg.agents = Some(parse_agents(a).map_err(usage)?);
            }
            cfg.deals = deals.unwrap_or(cfg.deals);
            cfg.seed = seed.unwrap_or(cfg.seed);
        }
        Command::Evaluate { protocol, team_a, team_b, games, deals_per_game, seed } => {
            if let Some(p) = protocol {
                cfg.protocol = Some(match p {
                    ProtocolArg::Seeded => "seeded".into(),
                    ProtocolArg::Swap => "swap".into(),
                });
            }
            if let Some(a) = team_a {
                cfg.team_a = Some(a.parse().map_err(usage)?);
            }
            if let Some(b) = team_b {
                cfg.team_b = Some(b.parse().map_err(usage)?);
            }
            cfg.games = games.or(cfg.games);
            cfg.deals_per_game = deals_per_game.unwrap_or(cfg.deals_per_game);
            cfg.seed = seed.unwrap_or(cfg.seed);
        }
        Command::Analyze { .. } | Command::RenderPrompt { .. } => {}
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn template_store(cfg: &RunConfig) -> Result<Arc<TemplateStore>> {
    match &cfg.templates {
        Some(dir) => Ok(Arc::new(TemplateStore::load(dir).map_err(usage)?)),
        None => Ok(Arc::new(TemplateStore::builtin())),
    }
}

fn backend(cfg: &RunConfig, live: bool) -> Result<Arc<dyn LlmBackend>> {
    match cfg.backend.kind {
        BackendKind::Mock => match &cfg.backend.mock_responses {
            Some(path) => Ok(Arc::new(MockBackend::from_file(path).map_err(usage)?)),
            None => Ok(Arc::new(MockBackend::new())),
        },
        BackendKind::Http if !live => Err(usage("the http backend contacts a real endpoint; pass --live to allow it")),
        BackendKind::Http => Ok(Arc::new(HttpBackend::new(cfg.backend.http.clone()).map_err(usage)?)),
    }
}

fn factory(cfg: &RunConfig, live: bool, specs: &[AgentSpec]) -> Result<AgentFactory> {
    let store = template_store(cfg)?;
    let backend: Arc<dyn LlmBackend> =
        if specs.iter().any(|s| s.is_tom()) { backend(cfg, live)? } else { Arc::new(MockBackend::new()) };
    let tom = TomConfig {
        mode: TomMode::Vanilla,
        k: cfg.k,
        locale: cfg.locale()?,
        history_window: cfg.history_window,
        params: cfg.backend.generation.clone(),
    };
    Ok(AgentFactory { weights: cfg.weights, k: cfg.k, tom, backend, store })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn simulate(cfg: &RunConfig, live: bool) -> Result<()> {
    let specs = cfg.agents.clone().ok_or_else(|| usage("simulate needs --agents (four names)"))?;
    let seats: [AgentSpec; 4] =
        specs.try_into().map_err(|v: Vec<AgentSpec>| usage(format!("expected 4 agents, got {}", v.len())))?;
    if cfg.deals < 1 {
        return Err(usage("--deals must be at least 1"));
    }
    let factory = factory(cfg, live, &seats)?;
    let log = new_decision_log();
    let mut agents = factory.build_table(seats, cfg.seed, Some(&log))?;
    let match_config =
        MatchConfig { num_deals: cfg.deals, base_seed: cfg.seed, level_schedule: cfg.level_schedule.clone() };
    let record = run_match(&match_config, &mut agents)?;
    drop(agents);

    let out = cfg.out_dir();
    let game_path = out.join("game.jsonl");
    let mut game_log = create(&game_path)?;
    let stdout = std::io::stdout();
    let mut stdout = stdout.lock();
    for deal in &record.deals {
        write_deal(&mut game_log, deal)?;
        serde_json::to_writer(&mut stdout, &ResultLine::from_result(deal.deal_index, &deal.result))?;
        writeln!(stdout)?;
    }
    game_log.flush()?;
    let decisions = log.lock().map_err(|_| anyhow!("decision log poisoned"))?;
    if !decisions.is_empty() {
        let mut w = create(&out.join("decisions.jsonl"))?;
        for line in decisions.iter() {
            serde_json::to_writer(&mut w, line)?;
            writeln!(w)?;
        }
        w.flush()?;
    }
    eprintln!(
        "totals 0&2: {:+}, 1&3: {:+}; log written to {}",
        record.totals[0],
        record.totals[1],
        game_path.display()
    );
    Ok(())
}

fn evaluate(cfg: &RunConfig, live: bool) -> Result<()> {
    let team_a = cfg.team_a.ok_or_else(|| usage("evaluate needs --a"))?;
    let team_b = cfg.team_b.ok_or_else(|| usage("evaluate needs --b"))?;
    let games = cfg.games.unwrap_or(40);
    let protocol = cfg.protocol.as_deref().unwrap_or("seeded");
    if games < 1 {
        return Err(usage("--games must be at least 1"));
    }
    if protocol == "swap" && !games.is_multiple_of(2) {
        return Err(usage(format!("the swap protocol needs an even number of games, got {games}")));
    }
    let factory = factory(cfg, live, &[team_a, team_b])?;
    let options = SeriesOptions {
        deals_per_game: cfg.deals_per_game,
        level_schedule: cfg.level_schedule.clone(),
        parallel: cfg.parallel,
    };
    let series = match protocol {
        "seeded" => run_seeded_series(&factory, team_a, team_b, games, cfg.seed, &options)?,
        "swap" => run_position_swap(&factory, team_a, team_b, games, cfg.seed, &options)?,
        other => return Err(usage(format!("unknown protocol {other:?}; expected seeded or swap"))),
    };
    let out = cfg.out_dir();
    guandan_harness::output::write_outcomes(&out.join("logs"), &series.outcomes)?;
    std::fs::write(out.join("report.json"), series.report.to_json() + "\n")?;
    let table = series.report.to_table();
    std::fs::write(out.join("report.txt"), &table)?;
    print!("{table}");
    Ok(())
}

fn analyze(cfg: &RunConfig, logs: &Path, seats: Option<&str>) -> Result<()> {
    if !logs.is_dir() {
        return Err(usage(format!("log directory {} does not exist", logs.display())));
    }
    let seats: Option<Vec<usize>> = seats
        .map(|s| s.split(',').map(|x| x.trim().parse::<usize>().map_err(usage)).collect::<Result<_>>())
        .transpose()?;
    if seats.as_ref().is_some_and(|s| s.iter().any(|&x| x > 3)) {
        return Err(usage("seats are 0 to 3"));
    }
    let files: Vec<PathBuf> = log_files(logs)?
        .into_iter()
        .filter(|p| !p.file_name().is_some_and(|n| n.to_string_lossy().starts_with("decisions")))
        .collect();
    let stats = collect_from_files(&files, seats.as_deref())?;
    let out = cfg.out.clone().unwrap_or_else(|| logs.to_path_buf());
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("action_lengths.csv"), stats.lengths_csv())?;
    std::fs::write(out.join("selected_index.csv"), stats.selected_csv())?;
    if stats.skipped > 0 {
        eprintln!("warning: skipped {} malformed log lines", stats.skipped);
    }
    println!(
        "{} decisions from {} files; longest legal list {}",
        stats.decisions,
        files.len(),
        stats.max_length().map_or("-".to_string(), |m| m.to_string())
    );
    Ok(())
}

fn render_prompt(cfg: &RunConfig, mode: &str, fixture: &str) -> Result<()> {
    let mode: TomMode = mode.parse().map_err(usage)?;
    if fixture != "worked-example" {
        return Err(usage(format!("unknown fixture {fixture:?}; available: worked-example")));
    }
    let store = template_store(cfg)?;
    let obs = fixtures::observation();
    let ctx = PromptContext::from_observation(&store, &obs, cfg.history_window, cfg.locale()?)?;
    let topk = top_k(&score_actions(&HeuristicScorer::new(cfg.weights), &obs), cfg.k)?;
    let mut sections = Vec::new();
    let belief = match mode {
        TomMode::Vanilla => None,
        TomMode::First | TomMode::Second => {
            sections.push(("belief", build_belief_prompt(&store, &ctx)?));
            let first = BeliefReport::first("<first-order belief>");
            if mode == TomMode::Second {
                sections.push(("second-order belief", build_second_order_prompt(&store, &ctx, Some(&first))?));
                Some(BeliefReport::second(&first, "<second-order belief>"))
            } else {
                Some(first)
            }
        }
    };
    sections.push(("plan", build_plan_eval_prompt(&store, &ctx, belief.as_ref(), &topk)?));
    let stdout = std::io::stdout();
    let mut stdout = stdout.lock();
    for (title, prompt) in sections {
        writeln!(stdout, "##### {title} prompt #####")?;
        write!(stdout, "{}", prompt.to_text())?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve(cli)?;
    match &cli.command {
        Command::Simulate { .. } => simulate(&cfg, cli.live),
        Command::Evaluate { .. } => evaluate(&cfg, cli.live),
        Command::Analyze { logs, seats } => analyze(&cfg, logs, seats.as_deref()),
        Command::RenderPrompt { mode, fixture } => render_prompt(&cfg, mode, fixture),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<Usage>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
