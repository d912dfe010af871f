//! Run orchestration: configuration, the fuzzing loop, metrics and report
//! files.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Duration;

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;

use crate::error::{ConfigError, RunError};
use crate::execution::bugs::excerpt;
use crate::execution::{
    compose_request, execute, probe, AuthHeader, BugLog, BugReport, Clock, HttpTransport, StatusClass, SystemClock,
    TokenBucket, Transport, VirtualClock,
};
use crate::generation::{make_strategy, GenOptions, Session, StrategyKind, TestCase};
use crate::matching::{AnnotationTable, MatchPair, PairKey, ScoreParams};
use crate::mock::MockKind;
use crate::pool::DEFAULT_CAPACITY;
use crate::spec::{parse_spec, ApiSpec, FormatHint};

/// Interval between activation samples.
pub const SAMPLE_EVERY: Duration = Duration::from_secs(5);

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    /// Spec document; a mock target falls back to its embedded document.
    pub spec_path: Option<PathBuf>,
    pub base_url: String,
    pub strategy: StrategyKind,
    pub duration: Duration,
    pub rate_per_minute: u32,
    pub seed: u64,
    pub generation: GenOptions,
    pub scores: ScoreParams,
    pub pool_capacity: usize,
    pub annotations_path: Option<PathBuf>,
    pub report_dir: Option<PathBuf>,
    /// Name of the environment variable holding the auth token.
    pub auth_env: Option<String>,
    pub auth_header: String,
    pub max_requests: Option<u64>,
    /// Keep every generated test case in the outcome.
    pub trace: bool,
    pub timeout: Duration,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            spec_path: None,
            base_url: MockKind::Gitlab.base_url().to_string(),
            strategy: StrategyKind::Tree,
            duration: Duration::from_secs(60),
            rate_per_minute: 600,
            seed: 0,
            generation: GenOptions::default(),
            scores: ScoreParams::default(),
            pool_capacity: DEFAULT_CAPACITY,
            annotations_path: None,
            report_dir: None,
            auth_env: None,
            auth_header: "Authorization".into(),
            max_requests: None,
            trace: false,
            timeout: Duration::from_secs(10),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.duration.is_zero() {
            return Err(ConfigError::ZeroDuration);
        }
        if self.rate_per_minute == 0 {
            return Err(ConfigError::ZeroRate);
        }
        if self.pool_capacity == 0 {
            return Err(ConfigError::ZeroCapacity);
        }
        self.generation.k_range.validate()?;
        self.scores.validate()
    }

    pub fn mock(&self) -> Option<MockKind> {
        MockKind::from_base_url(&self.base_url)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub seconds: f64,
    pub requests: u64,
    pub activated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundProgress {
    pub round: u64,
    pub optional_cases: u64,
    /// Largest optional set tried in the round.
    pub max_level: usize,
}

/// Summary of one run. Contains no wall-clock readings, so runs against a
/// mock serialize identically for identical configurations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetrics {
    pub strategy: StrategyKind,
    pub seed: u64,
    pub operations: usize,
    pub requests: u64,
    pub status_counts: BTreeMap<StatusClass, u64>,
    pub activated: usize,
    pub attempted: usize,
    pub activated_operations: Vec<String>,
    pub requests_to_full_activation: Option<u64>,
    pub bugs_total: usize,
    pub bugs_unique: usize,
    pub rounds: u64,
    pub escalation: Vec<RoundProgress>,
    pub elapsed_seconds: f64,
    pub series: Vec<Sample>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairRecord {
    #[serde(flatten)]
    pub key: PairKey,
    #[serde(flatten)]
    pub pair: MatchPair,
}

pub struct RunOutcome {
    pub metrics: RunMetrics,
    pub bugs: BugLog,
    pub trace: Vec<TestCase>,
    pub pairs: Vec<PairRecord>,
    pub pool: Value,
}

impl RunOutcome {
    pub fn metrics_json(&self) -> String {
        serde_json::to_string_pretty(&self.metrics).expect("metrics serialize")
    }

    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for case in &self.trace {
            out.push_str(&serde_json::to_string(case).expect("case serializes"));
            out.push('\n');
        }
        out
    }
}

fn auth_header(config: &RunConfig) -> Option<AuthHeader> {
    let var = config.auth_env.as_ref()?;
    match std::env::var(var) {
        Ok(value) => Some(AuthHeader {
            name: config.auth_header.clone(),
            value,
        }),
        Err(_) => {
            log::warn!("auth variable `{var}` is not set; sending no credentials");
            None
        }
    }
}

/// The fuzzing loop over an already prepared target.
pub fn run_campaign(
    config: &RunConfig,
    spec: ApiSpec,
    table: AnnotationTable,
    transport: &mut dyn Transport,
    clock: &dyn Clock,
    cancel: Option<&AtomicBool>,
) -> Result<RunOutcome, RunError> {
    config.validate()?;
    let auth = auth_header(config);
    let base_path = spec.base_path.clone();
    let mut session = Session::new(
        spec,
        table,
        config.generation.clone(),
        config.scores,
        config.pool_capacity,
        config.seed,
    );
    let mut strategy = make_strategy(config.strategy, &session);
    let n_ops = session.spec.operations.len();
    let started_at = Utc::now();
    let start = clock.now();

    let mut bucket = TokenBucket::per_minute(config.rate_per_minute);
    let mut bugs = BugLog::default();
    let mut trace = Vec::new();
    let mut status_counts: BTreeMap<StatusClass, u64> = BTreeMap::new();
    let mut activated: BTreeSet<usize> = BTreeSet::new();
    let mut attempted: BTreeSet<usize> = BTreeSet::new();
    let mut full_at = None;
    let mut rounds: BTreeMap<u64, RoundProgress> = BTreeMap::new();
    let mut series = vec![Sample {
        seconds: 0.0,
        requests: 0,
        activated: 0,
    }];
    let mut next_sample = SAMPLE_EVERY;
    let mut requests: u64 = 0;

    let elapsed = |clock: &dyn Clock| clock.now().saturating_sub(start);
    loop {
        if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
            break;
        }
        if config.max_requests.is_some_and(|m| requests >= m) || elapsed(clock) >= config.duration {
            break;
        }
        let Some(case) = strategy.next_case(&mut session) else {
            log::warn!("nothing to generate from this specification");
            break;
        };
        let op = &session.spec.operations[case.operation];
        let request = match compose_request(&case, op, &config.base_url, &base_path, auth.as_ref()) {
            Ok(r) => r,
            Err(e) => {
                log::warn!("skipping {} {}: {e}", op.method, op.path);
                continue;
            }
        };

        bucket.acquire(clock);
        let now = elapsed(clock);
        while next_sample <= now.min(config.duration) {
            series.push(Sample {
                seconds: next_sample.as_secs_f64(),
                requests,
                activated: activated.len(),
            });
            next_sample += SAMPLE_EVERY;
        }
        if now >= config.duration {
            break;
        }

        let result = execute(&request, transport, clock);
        let index = requests;
        requests += 1;
        *status_counts.entry(result.class).or_default() += 1;
        attempted.insert(case.operation);
        if result.class == StatusClass::Success && activated.insert(case.operation) && activated.len() == n_ops {
            full_at = Some(requests);
        }
        if !case.optional_set.is_empty() {
            let p = rounds.entry(case.round).or_insert(RoundProgress {
                round: case.round,
                optional_cases: 0,
                max_level: 0,
            });
            p.optional_cases += 1;
            p.max_level = p.max_level.max(case.optional_set.len());
        }
        if result.class == StatusClass::ServerError {
            let offset = chrono::Duration::from_std(elapsed(clock)).unwrap_or_default();
            let fresh = bugs.record(BugReport {
                timestamp: (started_at + offset).to_rfc3339_opts(SecondsFormat::Millis, true),
                operation: op.key(),
                request: request.redacted(auth.as_ref()),
                status_code: result.status.unwrap_or(500),
                response_excerpt: excerpt(&result.body),
                strategy: config.strategy.as_str().to_string(),
                seed: config.seed,
                round: case.round,
                request_index: index,
                duplicate: false,
            });
            if fresh {
                log::info!("new failure: {} -> {}", op.key(), result.status.unwrap_or(0));
            }
        }
        strategy.observe(&case, &result, &mut session);
        if config.trace {
            trace.push(case);
        }
    }

    let end = elapsed(clock).min(config.duration);
    if series.last().is_some_and(|s| s.seconds < end.as_secs_f64()) {
        series.push(Sample {
            seconds: end.as_secs_f64(),
            requests,
            activated: activated.len(),
        });
    }
    let metrics = RunMetrics {
        strategy: config.strategy,
        seed: config.seed,
        operations: n_ops,
        requests,
        status_counts,
        activated: activated.len(),
        attempted: attempted.len(),
        activated_operations: activated.iter().map(|&i| session.spec.operations[i].key().to_string()).collect(),
        requests_to_full_activation: full_at,
        bugs_total: bugs.reports().len(),
        bugs_unique: bugs.unique_count(),
        rounds: strategy.round(),
        escalation: rounds.into_values().collect(),
        elapsed_seconds: end.as_secs_f64(),
        series,
    };
    let pairs = session
        .pairs
        .iter()
        .map(|(k, p)| PairRecord {
            key: k.clone(),
            pair: p.clone(),
        })
        .collect();
    Ok(RunOutcome {
        metrics,
        bugs,
        trace,
        pairs,
        pool: session.pool.snapshot(&session.forest),
    })
}

pub fn load_spec(config: &RunConfig) -> Result<ApiSpec, RunError> {
    let bytes = match (&config.spec_path, config.mock()) {
        (Some(path), _) => fs::read(path)?,
        (None, Some(kind)) => kind.document().as_bytes().to_vec(),
        (None, None) => {
            return Err(RunError::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "no specification given",
            )))
        }
    };
    Ok(parse_spec(&bytes, FormatHint::Auto)?)
}

pub fn load_annotations(config: &RunConfig) -> Result<AnnotationTable, RunError> {
    match &config.annotations_path {
        Some(path) => Ok(AnnotationTable::from_json(&fs::read_to_string(path)?)?),
        None => Ok(AnnotationTable::default()),
    }
}

/// Prepares the target named by the configuration, runs, and writes the
/// reports when a report directory is set.
pub fn run(config: &RunConfig) -> Result<RunOutcome, RunError> {
    config.validate()?;
    let spec = load_spec(config)?;
    let table = load_annotations(config)?;
    let outcome = match config.mock() {
        Some(kind) => {
            let mut transport = kind.transport().with_prefix(&spec.base_path);
            run_campaign(config, spec, table, &mut transport, &VirtualClock::new(), None)?
        }
        None => {
            let mut transport = HttpTransport::new(config.timeout);
            probe(&mut transport, &config.base_url).map_err(|e| RunError::Unreachable(e.to_string()))?;
            let cancel = Arc::new(AtomicBool::new(false));
            let timer = {
                let cancel = Arc::clone(&cancel);
                let budget = config.duration;
                std::thread::spawn(move || {
                    std::thread::sleep(budget);
                    cancel.store(true, Ordering::Relaxed);
                })
            };
            let outcome = run_campaign(config, spec, table, &mut transport, &SystemClock::new(), Some(&cancel))?;
            drop(timer);
            outcome
        }
    };
    if let Some(dir) = &config.report_dir {
        write_reports(&outcome, dir)?;
    }
    Ok(outcome)
}

/// Reruns the configuration up to the request that produced `bug` and
/// returns the report recorded at that index, if the failure recurred.
pub fn replay(config: &RunConfig, bug: &BugReport) -> Result<Option<BugReport>, RunError> {
    let mut again = config.clone();
    again.max_requests = Some(bug.request_index + 1);
    again.report_dir = None;
    again.seed = bug.seed;
    let outcome = run(&again)?;
    Ok(outcome
        .bugs
        .reports()
        .iter()
        .find(|r| r.request_index == bug.request_index)
        .cloned())
}

pub fn write_reports(outcome: &RunOutcome, dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("metrics.json"), outcome.metrics_json() + "\n")?;
    outcome
        .bugs
        .write_jsonl(BufWriter::new(fs::File::create(dir.join("bugs.jsonl"))?))?;

    let mut csv = BufWriter::new(fs::File::create(dir.join("timeseries.csv"))?);
    writeln!(csv, "seconds,requests,activated")?;
    for s in &outcome.metrics.series {
        writeln!(csv, "{},{},{}", s.seconds, s.requests, s.activated)?;
    }
    csv.flush()?;

    fs::write(dir.join("pairs.json"), serde_json::to_string_pretty(&outcome.pairs)? + "\n")?;
    fs::write(dir.join("pool.json"), serde_json::to_string_pretty(&outcome.pool)? + "\n")?;
    if !outcome.trace.is_empty() {
        fs::write(dir.join("cases.jsonl"), outcome.trace_jsonl())?;
    }
    Ok(())
}
