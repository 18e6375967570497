//! Acceptance criteria A1–A10. Prints one PASS/FAIL line per criterion
//! (including its runtime budget) and exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use corrdyn::bound::{bound_chain, lower_bound_from_state};
use corrdyn::channels::QuantumChannel;
use corrdyn::experiments::{run_fig4, run_fig6, run_fig7, Fig4Variant, SamplingOptions};
use corrdyn::linalg::{relative_entropy, trace_norm, Observable};
use corrdyn::measure::{check_fundamental_law, measure_ibar, PartyStructure};
use corrdyn::noise::{
    analytic_dephasing_channel, long_time_state, sample_dephasing_channel, LongTimeConfig, PhaseNoiseModel,
};
use corrdyn::random::{random_channel, random_density, random_observable, stream_rng};
use corrdyn::tomography::{
    mle_process_tomography, mle_state_tomography, process_tomography_settings, simulate_record,
    state_tomography_settings, MleOptions,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn two_qubits() -> PartyStructure {
    PartyStructure::uniform(2, 2).unwrap()
}

fn xs(n: usize) -> Vec<Observable> {
    vec![Observable::pauli("X").unwrap(); n]
}

fn a1_symmetric_saturation() -> Outcome {
    let model = PhaseNoiseModel::two_qubit(1.0, 1.0, 10.0, 0.0).unwrap();
    let v = measure_ibar(&analytic_dephasing_channel(&model).unwrap(), &two_qubits()).unwrap().i_bar;
    outcome((v - 0.125).abs() <= 1e-3, format!("Ibar = {v:.6}"))
}

fn a2_long_time_bounds() -> Outcome {
    let cases = [
        (LongTimeConfig::Sym2, 0.0451, 1e-4),
        (LongTimeConfig::Sym4, 0.0127, 1e-4),
        (LongTimeConfig::Mixed22, 0.0056, 1e-4),
        (LongTimeConfig::Mixed31, 0.0, 1e-9),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (config, expected, tol) in cases {
        let n = config.n_qubits();
        let rho = long_time_state(config);
        let lb = lower_bound_from_state(&rho, &xs(n), &PartyStructure::uniform(n, 2).unwrap())
            .unwrap()
            .lower_bound;
        ok &= (lb - expected).abs() <= tol;
        parts.push(format!("{config:?} {lb:.5}"));
    }
    outcome(ok, parts.join(", "))
}

fn a3_bound_chain() -> Outcome {
    let p = two_qubits();
    let mut worst = f64::NEG_INFINITY;
    let mut failures = 0;
    for trial in 0..500u64 {
        let mut rng = stream_rng(3, trial);
        let rank = 1 + (trial as usize % 16);
        let ch = random_channel(&[2, 2], rank, &mut rng);
        let inputs = [random_density(&[2], &mut rng), random_density(&[2], &mut rng)];
        let obs = [random_observable(2, &mut rng), random_observable(2, &mut rng)];
        let chain = bound_chain(&ch, &inputs, &obs, &p).unwrap();
        worst = worst.max(chain.observable_term - chain.ibar);
        if !chain.holds(1e-9) || chain.observable_term > chain.ibar + 1e-9 {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures} violations, max (LB - Ibar) = {worst:.3e}"))
}

fn a4_fundamental_law() -> Outcome {
    let p = two_qubits();
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    for trial in 0..200u64 {
        let mut rng = stream_rng(4, trial);
        let ch = random_channel(&[2, 2], 1 + (trial as usize % 16), &mut rng);
        let locals: Vec<_> = (0..2)
            .map(|_| {
                let r1 = 1 + (trial as usize % 4);
                (random_channel(&[2], r1, &mut rng), random_channel(&[2], 5 - r1, &mut rng))
            })
            .collect();
        let law = check_fundamental_law(&ch, &locals, &p).unwrap();
        worst = worst.max(law.after - law.before);
        if law.after > law.before + 1e-9 {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures} violations, max increase {worst:.3e}"))
}

fn a5_anchors() -> Outcome {
    let p = two_qubits();
    let id = measure_ibar(&QuantumChannel::identity(vec![2, 2]), &p).unwrap().i_bar;
    let swap = measure_ibar(&QuantumChannel::swap(2), &p).unwrap().i_bar;
    let mut rng = stream_rng(5, 0);
    let mut product_worst = 0.0f64;
    for _ in 0..20 {
        let ch = random_channel(&[2], 3, &mut rng).tensor(&random_channel(&[2], 2, &mut rng));
        product_worst = product_worst.max(measure_ibar(&ch, &p).unwrap().i_bar.abs());
    }
    outcome(
        id.abs() <= 1e-9 && product_worst <= 1e-8 && (swap - 1.0).abs() <= 1e-9,
        format!("identity {id:.1e}, product max {product_worst:.1e}, swap {swap:.12}"),
    )
}

fn a6_monte_carlo_oracle() -> Outcome {
    let p = two_qubits();
    let mut worst = 0.0f64;
    for (a, b) in [(1.0, 1.0), (1.0, -0.83)] {
        for sb in [0.3, 0.8, 1.5] {
            let model = PhaseNoiseModel::two_qubit(a, b, sb, 0.0).unwrap();
            let exact = analytic_dephasing_channel(&model).unwrap().choi_state(&p).unwrap();
            let mc = sample_dephasing_channel(&model, 10_000, 6).unwrap().choi_state(&p).unwrap();
            worst = worst.max(mc.trace_distance(&exact).unwrap());
        }
    }
    outcome(worst <= 0.01, format!("max CJ trace distance {worst:.4}"))
}

fn a7_pipeline_consistency() -> Outcome {
    let p = two_qubits();
    let opts = MleOptions::default();
    let settings = process_tomography_settings(2);
    let mut ok = true;
    let mut parts = Vec::new();
    let channels = [
        ("identity", QuantumChannel::identity(vec![2, 2])),
        (
            "sym dephasing",
            analytic_dephasing_channel(&PhaseNoiseModel::two_qubit(1.0, 1.0, 1.0, 0.0).unwrap()).unwrap(),
        ),
        (
            "asym dephasing",
            analytic_dephasing_channel(&PhaseNoiseModel::two_qubit(1.0, -0.83, 1.0, 0.0).unwrap()).unwrap(),
        ),
    ];
    for (k, (name, ch)) in channels.iter().enumerate() {
        let truth = measure_ibar(ch, &p).unwrap().i_bar;
        let record = simulate_record(ch, &settings, 10_000, 70 + k as u64).unwrap();
        let est = mle_process_tomography(&record, &opts).unwrap();
        let v = measure_ibar(&est.channel, &p).unwrap().i_bar;
        ok &= (v - truth).abs() <= 0.005;
        parts.push(format!("{name} {v:.4} (true {truth:.4})"));
    }
    // four-qubit state-tomography path
    let rho = long_time_state(LongTimeConfig::Sym4);
    let parties = PartyStructure::uniform(4, 2).unwrap();
    let exact = lower_bound_from_state(&rho, &xs(4), &parties).unwrap().lower_bound;
    let record = simulate_record(&rho, &state_tomography_settings(4), 10_000, 77).unwrap();
    let est = mle_state_tomography(&record, &opts).unwrap();
    let lb = lower_bound_from_state(&est.state, &xs(4), &parties).unwrap().lower_bound;
    ok &= (lb - exact).abs() <= 0.005;
    parts.push(format!("4-qubit XXXX bound {lb:.4} (true {exact:.4})"));
    outcome(ok, parts.join(", "))
}

fn csv_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance")
}

fn a8_figure_bands() -> Outcome {
    let sampling = SamplingOptions::default();
    let dir = csv_dir();
    std::fs::create_dir_all(&dir).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    let mut note = |name: &str, checks: &[corrdyn::experiments::Check]| {
        for c in checks {
            ok &= c.passed;
            if !c.passed {
                parts.push(format!("{name}: FAILED {} ({})", c.name, c.detail));
            }
        }
    };
    for variant in [Fig4Variant::Sym, Fig4Variant::Asym, Fig4Variant::Uncorr] {
        let r = run_fig4(variant, &sampling).unwrap();
        r.write_csv(dir.join(format!("{}.csv", r.id))).unwrap();
        note(&r.id, &r.checks);
    }
    let r6 = run_fig6(&sampling).unwrap();
    r6.write_csv(dir.join("fig6.csv")).unwrap();
    note("fig6", &r6.checks);
    let r7 = run_fig7(&sampling).unwrap();
    r7.write_csv(dir.join("fig7.csv")).unwrap();
    note("fig7", &r7.checks);
    let pairs: Vec<String> = r6.rows.iter().map(|r| format!("{:.4}±{:.4}", r.pipeline_value, r.std_err)).collect();
    parts.push(format!("pairs {}", pairs.join(" ")));
    parts.push(format!("CSVs in {}", dir.display()));
    outcome(ok, parts.join("; "))
}

fn a9_setting_count() -> Outcome {
    let n1 = process_tomography_settings(1).len();
    let n2 = process_tomography_settings(2).len();
    outcome(n1 == 12 && n2 == 144, format!("{n1}, {n2}"))
}

fn a10_pinsker_monotonicity() -> Outcome {
    let mut failures = 0;
    let mut min_gap = f64::INFINITY;
    for trial in 0..1000u64 {
        let mut rng = stream_rng(10, trial);
        let rho = random_density(&[2, 2], &mut rng);
        let sigma = random_density(&[2, 2], &mut rng);
        let s = relative_entropy(&rho, &sigma).unwrap().value;
        let t = trace_norm(&(rho.matrix() - sigma.matrix())).unwrap();
        let pinsker = s - t * t / (2.0 * std::f64::consts::LN_2);
        let reduced = relative_entropy(&rho.partial_trace(&[0]).unwrap(), &sigma.partial_trace(&[0]).unwrap())
            .unwrap()
            .value;
        let ch = random_channel(&[2, 2], 1 + (trial as usize % 4), &mut rng);
        let mapped = relative_entropy(&ch.apply(&rho).unwrap(), &ch.apply(&sigma).unwrap()).unwrap().value;
        min_gap = min_gap.min(pinsker);
        if pinsker < -1e-10 || reduced > s + 1e-10 || mapped > s + 1e-9 {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures} violations, min Pinsker gap {min_gap:.3e}"))
}

type Criterion = (&'static str, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("A1", "symmetric-dephasing saturation", Duration::from_secs(1), a1_symmetric_saturation),
        ("A2", "long-time lower bounds", Duration::from_secs(1), a2_long_time_bounds),
        ("A3", "bound chain validity", Duration::from_secs(120), a3_bound_chain),
        ("A4", "fundamental law", Duration::from_secs(120), a4_fundamental_law),
        ("A5", "zero/one anchors", Duration::from_secs(1), a5_anchors),
        ("A6", "analytic vs Monte-Carlo", Duration::from_secs(60), a6_monte_carlo_oracle),
        ("A7", "end-to-end pipeline consistency", Duration::from_secs(600), a7_pipeline_consistency),
        ("A8", "figure-level qualitative bands", Duration::from_secs(1800), a8_figure_bands),
        ("A9", "tomography setting count", Duration::from_secs(1), a9_setting_count),
        ("A10", "Pinsker and relative-entropy monotonicity", Duration::from_secs(60), a10_pinsker_monotonicity),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut all_passed = true;
    for (id, name, budget, run) in criteria {
        if !only.is_empty() && !only.iter().any(|o| o == id) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= budget, o.detail),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        all_passed &= passed;
        println!(
            "{id:<4} {} {name} [{:.2}s / {}s] {detail}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if !all_passed {
        std::process::exit(1);
    }
}
