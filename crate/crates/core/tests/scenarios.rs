use relqm::config::{parse_config, serialize_config, ConfigError, RunConfig, ScenarioId};
use relqm::scenarios::{run, sha256_hex, RunError};

fn config_in(dir: &std::path::Path, scenario: ScenarioId, n_trials: usize) -> RunConfig {
    RunConfig { scenario, n_trials, output_dir: dir.to_string_lossy().into_owned(), ..RunConfig::default() }
}

#[test]
fn config_round_trips_through_toml() {
    for scenario in ScenarioId::ALL {
        let c = RunConfig { scenario, seed: 77, beta: -0.3, boost_axis: [0.0, 1.0, 1.0], ..RunConfig::default() };
        let text = serialize_config(&c).unwrap();
        assert_eq!(parse_config(&text).unwrap(), c);
    }
}

#[test]
fn config_guards() {
    assert!(matches!(parse_config("seed = 3"), Err(ConfigError::Parse(_))));
    assert!(matches!(parse_config("scenario = \"teleporter\""), Err(ConfigError::Parse(_))));
    assert!(matches!(parse_config("scenario = \"decay_90\"\ncolour = 1"), Err(ConfigError::Parse(_))));
    match parse_config("scenario = \"epr_boosted\"\nbeta = 1.5") {
        Err(e @ ConfigError::Validation { field: "beta", .. }) => assert!(e.to_string().contains("|beta| < 1")),
        other => panic!("unexpected {other:?}"),
    }
    let ok = parse_config("scenario = \"einstein_screen\"").unwrap();
    assert_eq!(ok.seed, 1);
    assert_eq!(ok.n_trials, 10000);
}

#[test]
fn config_error_maps_to_exit_code_two_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let mut c = config_in(&out, ScenarioId::EprBoosted, 2000);
    c.beta = 1.5;
    let err = run(&c).unwrap_err();
    assert!(matches!(err, RunError::Config(_)));
    assert_eq!(err.exit_code(), 2);
    assert!(!out.exists());
}

#[test]
fn epr_run_writes_manifest_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let c = config_in(dir.path(), ScenarioId::EprBoosted, 10_000);
    let outcome = run(&c).unwrap();
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["scenario"], "epr_boosted");
    assert!(report["chsh"]["estimate"].as_f64().unwrap().abs() > 2.0);
    assert_eq!(report["frame_roles"].as_array().unwrap().len(), 3);
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["scenario"], "epr_boosted");
    assert_eq!(manifest["seed"], 1);
    for f in &outcome.manifest.files {
        let bytes = std::fs::read(dir.path().join(&f.name)).unwrap();
        assert_eq!(bytes.len(), f.bytes);
        assert_eq!(sha256_hex(&bytes), f.sha256, "{}", f.name);
    }
    assert!(outcome.manifest.files.iter().any(|f| f.name == "correlation_sweep.csv"));
}

#[test]
fn reports_are_byte_identical_across_runs_and_threading() {
    for scenario in ScenarioId::ALL {
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let mut a = config_in(d1.path(), scenario, 2000);
        let mut b = config_in(d2.path(), scenario, 2000);
        a.grid_samples = 512;
        b.grid_samples = 512;
        b.parallel = false;
        let (ra, rb) = (run(&a).unwrap(), run(&b).unwrap());
        for (fa, fb) in ra.manifest.files.iter().zip(&rb.manifest.files) {
            assert_eq!(fa.name, fb.name);
            assert_eq!(fa.sha256, fb.sha256, "{} differs for {}", fa.name, scenario.as_str());
        }
    }
}

#[test]
fn screen_run_emits_one_hit_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    run(&config_in(dir.path(), ScenarioId::EinsteinScreen, 1234)).unwrap();
    let text = std::fs::read_to_string(dir.path().join("hemisphere_hits.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("theta,phi,trial,bin"));
    assert_eq!(text.lines().count(), 1235);
    let records = std::fs::read_to_string(dir.path().join("records.jsonl")).unwrap();
    assert_eq!(records.lines().count(), 1234);
}

#[test]
fn zero_trials_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty");
    let err = run(&config_in(&out, ScenarioId::EinsteinScreen, 0)).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(!out.exists());
}

#[test]
fn decay_and_packet_runs_write_their_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    run(&config_in(dir.path(), ScenarioId::Decay90, 500)).unwrap();
    let timeline = std::fs::read_to_string(dir.path().join("arrival_timeline.csv")).unwrap();
    assert!(timeline.lines().count() > 1);

    let dir = tempfile::tempdir().unwrap();
    let outcome = run(&config_in(dir.path(), ScenarioId::PacketBoostDemo, 100)).unwrap();
    assert!(outcome.manifest.files.iter().any(|f| f.name == "spacetime_samples.csv"));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(report["pullback_vs_momentum_boost_l2"].as_f64().unwrap() < 1e-6);
}
