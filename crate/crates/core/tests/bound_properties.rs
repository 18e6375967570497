use corrdyn::bound::{bound_chain, lower_bound_from_counts, lower_bound_from_state, pairwise_lower_bound, ErrorMethod};
use corrdyn::linalg::{DensityMatrix, Observable};
use corrdyn::measure::{measure_ibar, PartyStructure};
use corrdyn::noise::{analytic_dephasing_channel, PhaseNoiseModel};
use corrdyn::random::{random_channel, random_observable, random_pure, stream_rng};
use corrdyn::tomography::{simulate_record, state_tomography_settings};
use proptest::prelude::*;

fn two_qubits() -> PartyStructure {
    PartyStructure::uniform(2, 2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_of_bounds_holds(seed in any::<u64>(), rank in 1usize..=16) {
        let mut rng = stream_rng(seed, 0);
        let ch = random_channel(&[2, 2], rank, &mut rng);
        let inputs = [random_pure(&[2], &mut rng), random_pure(&[2], &mut rng)];
        let obs = [random_observable(2, &mut rng), random_observable(2, &mut rng)];
        let chain = bound_chain(&ch, &inputs, &obs, &two_qubits()).unwrap();
        prop_assert!(chain.holds(1e-9), "{chain:?}");
        prop_assert!(chain.observable_term <= chain.ibar + 1e-9);
    }

    #[test]
    fn bound_is_invariant_under_observable_rescaling(seed in any::<u64>(), s1 in 0.1f64..10.0, s2 in -10.0f64..-0.1) {
        let mut rng = stream_rng(seed, 0);
        let rho = random_channel(&[2, 2], 4, &mut rng)
            .apply(&DensityMatrix::plus_state(2)).unwrap();
        let a = random_observable(2, &mut rng);
        let b = random_observable(2, &mut rng);
        let base = lower_bound_from_state(&rho, &[a.clone(), b.clone()], &two_qubits()).unwrap();
        let scaled = lower_bound_from_state(&rho, &[a.scaled(s1), b.scaled(s2)], &two_qubits()).unwrap();
        prop_assert!((base.lower_bound - scaled.lower_bound).abs() < 1e-10);
    }

    #[test]
    fn product_states_give_zero(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let rho = random_pure(&[2], &mut rng).tensor(&random_pure(&[2], &mut rng));
        let obs = [random_observable(2, &mut rng), random_observable(2, &mut rng)];
        prop_assert!(lower_bound_from_state(&rho, &obs, &two_qubits()).unwrap().lower_bound < 1e-12);
    }

    #[test]
    fn pair_order_does_not_matter(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let rho = random_channel(&[2, 2, 2], 3, &mut rng).apply(&DensityMatrix::plus_state(3)).unwrap();
        let x = Observable::pauli("X").unwrap();
        let z = Observable::pauli("Z").unwrap();
        let a = pairwise_lower_bound(&rho, 0, 2, &x, &z).unwrap();
        let b = pairwise_lower_bound(&rho, 2, 0, &z, &x).unwrap();
        prop_assert!((a.lower_bound - b.lower_bound).abs() < 1e-12);
    }
}

#[test]
fn dephasing_bound_stays_below_measure() {
    let p = two_qubits();
    let x = Observable::pauli("X").unwrap();
    for sb in [0.2, 0.7, 1.5, 4.0] {
        let ch = analytic_dephasing_channel(&PhaseNoiseModel::two_qubit(1.0, 1.0, sb, 0.0).unwrap()).unwrap();
        let rho = ch.apply(&DensityMatrix::plus_state(2)).unwrap();
        let lb = lower_bound_from_state(&rho, &[x.clone(), x.clone()], &p).unwrap().lower_bound;
        assert!(lb <= measure_ibar(&ch, &p).unwrap().i_bar + 1e-12);
    }
}

#[test]
fn counts_estimate_converges_with_shots() {
    let p = two_qubits();
    let ch = analytic_dephasing_channel(&PhaseNoiseModel::two_qubit(1.0, 1.0, 1.0, 0.0).unwrap()).unwrap();
    let rho = ch.apply(&DensityMatrix::plus_state(2)).unwrap();
    let x = Observable::pauli("X").unwrap();
    let exact = lower_bound_from_state(&rho, &[x.clone(), x], &p).unwrap().lower_bound;
    let mut errors = Vec::new();
    for shots in [100, 100_000] {
        let record = simulate_record(&rho, &state_tomography_settings(2), shots, 9).unwrap();
        let est = lower_bound_from_counts(&record, &["X", "X"], &p, ErrorMethod::Delta).unwrap();
        let err = (est.lower_bound - exact).abs();
        assert!(err <= 4.0 * est.std_err.unwrap() + 1e-3, "shots {shots}: {err} vs {:?}", est.std_err);
        errors.push(err);
    }
    assert!(errors[1] < 0.005);
}

#[test]
fn delta_and_bootstrap_errors_agree() {
    let p = two_qubits();
    let ch = analytic_dephasing_channel(&PhaseNoiseModel::two_qubit(1.0, 1.0, 1.0, 0.0).unwrap()).unwrap();
    let rho = ch.apply(&DensityMatrix::plus_state(2)).unwrap();
    let record = simulate_record(&rho, &state_tomography_settings(2), 2_000, 4).unwrap();
    let delta = lower_bound_from_counts(&record, &["X", "X"], &p, ErrorMethod::Delta).unwrap();
    let boot = lower_bound_from_counts(&record, &["X", "X"], &p, ErrorMethod::bootstrap(1)).unwrap();
    let (d, b) = (delta.std_err.unwrap(), boot.std_err.unwrap());
    assert!((d - b).abs() < 0.3 * d, "delta {d}, bootstrap {b}");
}

#[test]
fn missing_setting_is_reported() {
    let rho = DensityMatrix::plus_state(2);
    let record = simulate_record(&rho, &state_tomography_settings(2)[..3], 10, 0).unwrap();
    let err = lower_bound_from_counts(&record, &["Y", "X"], &two_qubits(), ErrorMethod::Delta).unwrap_err();
    assert!(matches!(err, corrdyn::Error::MissingSetting(_)), "{err}");
}
