use corrdyn::experiments::{
    analytic_value, linspace, run_fig8, run_scenario, Analysis, Fig8Options, NoiseSpec, ScenarioConfig,
};

fn small(analysis: Analysis, noise: NoiseSpec, pattern: &str) -> ScenarioConfig {
    ScenarioConfig {
        id: "small".into(),
        n_qubits: pattern.len(),
        encoding_pattern: pattern.into(),
        noise,
        time_grid: vec![0.5, 3.0],
        shots: 100,
        n_traj: 200,
        seed: 17,
        analysis,
        repetitions: 2,
    }
}

#[test]
fn runs_are_reproducible_for_a_fixed_seed() {
    let config = small(Analysis::LowerBound, NoiseSpec::Dephasing { sigma_l: 0.0 }, "AB");
    let a = run_scenario(&config).unwrap().to_csv_string().unwrap();
    let b = run_scenario(&config).unwrap().to_csv_string().unwrap();
    assert_eq!(a, b);
    let other = ScenarioConfig { seed: 18, ..config };
    assert_ne!(a, run_scenario(&other).unwrap().to_csv_string().unwrap());
}

#[test]
fn csv_has_the_documented_columns() {
    let config = small(Analysis::FullIbar, NoiseSpec::Decay, "AA");
    let result = run_scenario(&config).unwrap();
    let text = result.to_csv_string().unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "t_over_tau,analytic_ref,pipeline_value,std_err,band_min,band_mean,band_max"
    );
    assert_eq!(text.lines().count(), 3);
    for r in &result.rows {
        assert!(r.analytic_ref.abs() < 1e-9);
        assert!(r.band_min <= r.pipeline_value && r.pipeline_value <= r.band_max);
    }
}

#[test]
fn scenario_file_round_trip() {
    let json = r#"{
        "id": "custom", "nQubits": 3, "encodingPattern": "AAB",
        "noise": {"model": "dephasing", "sigmaL": 0.1},
        "timeGrid": [1.0], "shots": 50, "nTraj": 100, "seed": 1,
        "analysis": "lower-bound", "repetitions": 1
    }"#;
    let config: ScenarioConfig = serde_json::from_str(json).unwrap();
    assert_eq!(config.noise, NoiseSpec::Dephasing { sigma_l: 0.1 });
    let result = run_scenario(&config).unwrap();
    assert_eq!(result.rows.len(), 1);
    assert!((result.rows[0].analytic_ref - analytic_value(&config, 1.0).unwrap()).abs() < 1e-15);
}

#[test]
fn invalid_scenarios_are_rejected() {
    let mut config = small(Analysis::FullIbar, NoiseSpec::Decay, "AA");
    config.repetitions = 0;
    assert!(run_scenario(&config).is_err());
    let mut config = small(Analysis::FullIbar, NoiseSpec::Decay, "AX");
    config.n_qubits = 2;
    assert!(run_scenario(&config).is_err());
}

#[test]
fn surface_checks_pass_on_a_coarse_mesh() {
    let opts = Fig8Options {
        sigma_b: linspace(0.0, 3.0, 7),
        sigma_l: linspace(0.0, 3.0, 7),
        ..Fig8Options::default()
    };
    let result = run_fig8(&opts).unwrap();
    assert_eq!(result.rows.len(), 3 * 49);
    assert!(result.passed(), "{:?}", result.checks);
}
