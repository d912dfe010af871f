use std::fs;
use std::time::Duration;

use restree::campaign::{run, RunConfig};
use restree::mock::MockKind;
use restree::{RunError, StrategyKind};
use serde_json::Value;

fn short(seed: u64) -> RunConfig {
    RunConfig {
        seed,
        duration: Duration::from_secs(20),
        ..RunConfig::default()
    }
}

#[test]
fn reports_are_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        trace: true,
        report_dir: Some(dir.path().to_path_buf()),
        ..RunConfig::default()
    };
    let outcome = run(&config).unwrap();
    assert_eq!(outcome.metrics.requests, 600);

    let metrics: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics["requests"], 600);
    assert_eq!(metrics["strategy"], "tree");

    let bugs = fs::read_to_string(dir.path().join("bugs.jsonl")).unwrap();
    let reports: Vec<Value> = bugs.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), outcome.metrics.bugs_total);
    assert_eq!(reports.iter().filter(|r| r["duplicate"] == false).count(), 1);

    let cases = fs::read_to_string(dir.path().join("cases.jsonl")).unwrap();
    assert_eq!(cases.lines().count(), 600);
    for line in cases.lines() {
        serde_json::from_str::<Value>(line).unwrap();
    }

    let csv = fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert!(rows.len() >= 10);
    for w in rows.windows(2) {
        assert!(w[0][0] < w[1][0] && w[0][1] <= w[1][1] && w[0][2] <= w[1][2]);
    }

    let pairs: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("pairs.json")).unwrap()).unwrap();
    assert!(pairs.as_array().is_some_and(|a| !a.is_empty()));
    let pool: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("pool.json")).unwrap()).unwrap();
    assert!(pool.is_object());
}

#[test]
fn request_budget_is_honoured() {
    let config = RunConfig {
        max_requests: Some(37),
        ..short(1)
    };
    assert_eq!(run(&config).unwrap().metrics.requests, 37);
}

#[test]
fn rate_bounds_request_count() {
    let config = RunConfig {
        rate_per_minute: 120,
        ..short(2)
    };
    assert_eq!(run(&config).unwrap().metrics.requests, 40);
}

#[test]
fn invalid_configurations_are_rejected() {
    let zero = RunConfig {
        duration: Duration::ZERO,
        ..RunConfig::default()
    };
    assert!(matches!(run(&zero), Err(RunError::Config(_))));

    let mut k = RunConfig::default();
    k.generation.k_range.min = 6;
    assert!(matches!(run(&k), Err(RunError::Config(_))));

    let missing = RunConfig {
        annotations_path: Some("/nonexistent/annotations.json".into()),
        ..RunConfig::default()
    };
    assert!(run(&missing).is_err());
}

#[test]
fn unreachable_target_fails_fast() {
    let config = RunConfig {
        base_url: "http://127.0.0.1:1".into(),
        spec_path: Some(write_mock_spec(&tempfile::tempdir().unwrap().keep())),
        timeout: Duration::from_secs(2),
        ..RunConfig::default()
    };
    assert!(matches!(run(&config), Err(RunError::Unreachable(_))));
}

fn write_mock_spec(dir: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("spec.yaml");
    let doc: Value = serde_json::from_str(MockKind::Gitlab.document()).unwrap();
    fs::write(&path, serde_yaml::to_string(&doc).unwrap()).unwrap();
    path
}

#[test]
fn yaml_spec_from_disk_drives_the_mock() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        spec_path: Some(write_mock_spec(dir.path())),
        ..RunConfig::default()
    };
    assert_eq!(run(&config).unwrap().metrics.activated, 12);
}

#[test]
fn auth_token_never_reaches_reports() {
    std::env::set_var("RESTREE_TEST_TOKEN", "s3cret-token");
    let config = RunConfig {
        auth_env: Some("RESTREE_TEST_TOKEN".into()),
        ..RunConfig::default()
    };
    let outcome = run(&config).unwrap();
    assert!(outcome.metrics.bugs_total > 0);
    let mut jsonl = Vec::new();
    outcome.bugs.write_jsonl(&mut jsonl).unwrap();
    let text = String::from_utf8(jsonl).unwrap();
    assert!(!text.contains("s3cret-token"));
    assert!(text.contains("Authorization"));
}

#[test]
fn baselines_run_against_the_mock() {
    for strategy in [StrategyKind::Bfs, StrategyKind::Topo] {
        let config = RunConfig {
            strategy,
            ..short(3)
        };
        let m = run(&config).unwrap().metrics;
        assert_eq!(m.requests, 200, "{strategy:?}");
        assert!(m.activated > 0, "{strategy:?}");
        assert!(m.attempted >= m.activated);
    }
}

#[test]
fn tree_activates_more_than_baselines_on_the_chain() {
    let dir = tempfile::tempdir().unwrap();
    let ann = dir.path().join("ann.json");
    fs::write(&ann, r#"[{"id": "id", "names": ["id", "b_id", "c_id", "d_id"]}]"#).unwrap();
    let activated = |strategy| {
        let config = RunConfig {
            base_url: MockKind::Chain.base_url().into(),
            annotations_path: Some(ann.clone()),
            strategy,
            max_requests: Some(300),
            duration: Duration::from_secs(600),
            ..RunConfig::default()
        };
        run(&config).unwrap().metrics.activated
    };
    let tree = activated(StrategyKind::Tree);
    assert_eq!(tree, 25);
    assert!(activated(StrategyKind::Bfs) < tree);
    assert!(activated(StrategyKind::Topo) < tree);
}
