use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use restree::campaign::{load_spec, write_reports, RunConfig};
use restree::generation::KRange;
use restree::mock::MockKind;
use restree::sweep::run_seeds;
use restree::{ApiForest, StrategyKind};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Tree,
    Bfs,
    Topo,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MockArg {
    Gitlab,
    Chain,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TreeFormat {
    Dot,
    Outline,
}

/// Tree-guided black-box fuzzer for REST APIs.
#[derive(Debug, Parser)]
#[command(name = "restree", version)]
struct Args {
    /// OpenAPI 3 or Swagger 2 document (JSON or YAML).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Target base URL, e.g. http://localhost:8080.
    #[arg(long, conflicts_with = "mock")]
    base_url: Option<String>,
    /// Fuzz an embedded in-process service instead of a network target.
    #[arg(long, value_enum, num_args = 0..=1, default_missing_value = "gitlab")]
    mock: Option<MockArg>,
    #[arg(long, value_enum, default_value = "tree")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run this many consecutive seeds starting at --seed.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Time budget in seconds.
    #[arg(long, default_value_t = 60)]
    duration: u64,
    /// Requests per minute.
    #[arg(long, default_value_t = 600)]
    rate: u32,
    #[arg(long)]
    max_requests: Option<u64>,
    #[arg(long, default_value_t = 2)]
    k_min: u32,
    #[arg(long, default_value_t = 5)]
    k_max: u32,
    #[arg(long, default_value_t = 0.5)]
    initial_score: f64,
    #[arg(long, default_value_t = 0.1)]
    delta_plus: f64,
    #[arg(long, default_value_t = 0.2)]
    delta_minus: f64,
    #[arg(long, default_value_t = 0.2)]
    threshold: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// JSON list of `{"id": ..., "names": [...]}` alias sets.
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Comma-separated parameter names that must stay unique on creation.
    #[arg(long, value_delimiter = ',')]
    uniqueness: Option<Vec<String>>,
    #[arg(long)]
    report_dir: Option<PathBuf>,
    /// Environment variable holding the auth token.
    #[arg(long)]
    auth_env: Option<String>,
    #[arg(long, default_value = "Authorization")]
    auth_header: String,
    /// Request timeout in seconds.
    #[arg(long, default_value_t = 10)]
    timeout: u64,
    /// Skip optional-parameter escalation.
    #[arg(long)]
    no_escalation: bool,
    /// Count both orders of each optional pair.
    #[arg(long)]
    ordered_pairs: bool,
    /// Put PATCH into the per-node method template.
    #[arg(long)]
    include_patch: bool,
    /// Also write every generated test case to cases.jsonl.
    #[arg(long)]
    trace: bool,
    /// Print the API forest and exit.
    #[arg(long, value_enum)]
    export_tree: Option<TreeFormat>,
}

impl Args {
    fn config(&self) -> Result<RunConfig> {
        let base_url = match (&self.base_url, self.mock) {
            (Some(url), None) => url.clone(),
            (None, Some(MockArg::Gitlab)) => MockKind::Gitlab.base_url().into(),
            (None, Some(MockArg::Chain)) => MockKind::Chain.base_url().into(),
            (None, None) if self.export_tree.is_some() => String::new(),
            (None, None) => bail!("give either --base-url or --mock"),
            (Some(_), Some(_)) => unreachable!("rejected by clap"),
        };
        if self.spec.is_none() && self.mock.is_none() {
            bail!("--spec is required for network targets");
        }
        let mut config = RunConfig {
            spec_path: self.spec.clone(),
            base_url,
            strategy: match self.strategy {
                StrategyArg::Tree => StrategyKind::Tree,
                StrategyArg::Bfs => StrategyKind::Bfs,
                StrategyArg::Topo => StrategyKind::Topo,
            },
            duration: Duration::from_secs(self.duration),
            rate_per_minute: self.rate,
            seed: self.seed,
            annotations_path: self.annotations.clone(),
            report_dir: self.report_dir.clone(),
            auth_env: self.auth_env.clone(),
            auth_header: self.auth_header.clone(),
            max_requests: self.max_requests,
            trace: self.trace,
            timeout: Duration::from_secs(self.timeout),
            ..RunConfig::default()
        };
        config.generation.k_range = KRange {
            min: self.k_min,
            max: self.k_max,
        };
        config.generation.escalate = !self.no_escalation;
        config.generation.ordered_pairs = self.ordered_pairs;
        config.generation.include_patch = self.include_patch;
        if let Some(u) = &self.uniqueness {
            config.generation.uniqueness = u.clone();
        }
        config.scores.initial = self.initial_score;
        config.scores.increase = self.delta_plus;
        config.scores.decrease = self.delta_minus;
        config.scores.threshold = self.threshold;
        config.scores.epsilon = self.epsilon;
        Ok(config)
    }
}

fn real_main(args: Args) -> Result<()> {
    let config = args.config()?;
    if let Some(format) = args.export_tree {
        let spec = load_spec(&config).context("reading specification")?;
        let forest = ApiForest::build(&spec);
        match format {
            TreeFormat::Dot => print!("{}", forest.to_dot()),
            TreeFormat::Outline => print!("{}", forest.to_outline()),
        }
        return Ok(());
    }
    config.validate().context("invalid configuration")?;
    load_spec(&config).context("reading specification")?;

    let seeds: Vec<u64> = (0..args.seeds.max(1)).map(|i| config.seed + i).collect();
    let mut config = config;
    let report_dir = config.report_dir.take();
    let outcomes = run_seeds(&config, &seeds);
    for (seed, outcome) in seeds.iter().zip(outcomes) {
        let outcome = outcome.with_context(|| format!("run with seed {seed}"))?;
        if let Some(dir) = &report_dir {
            let dir = if seeds.len() > 1 {
                dir.join(format!("seed-{seed}"))
            } else {
                dir.clone()
            };
            write_reports(&outcome, &dir).with_context(|| format!("writing reports to {}", dir.display()))?;
        }
        let m = &outcome.metrics;
        println!(
            "seed {seed}: {} requests, {}/{} operations activated, {} attempted, {} rounds, bugs {} ({} unique)",
            m.requests, m.activated, m.operations, m.attempted, m.rounds, m.bugs_total, m.bugs_unique
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match real_main(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
