mod common;

use corrdyn::channels::PauliOpBasis;
use corrdyn::linalg::{eigvalsh, DensityMatrix};
use corrdyn::measure::PartyStructure;
use corrdyn::noise::{
    analytic_dephasing_channel, chi_by_quadrature, chi_closed_form, gaussian_dephasing_channel,
    sample_decay_trajectories, sample_dephasing_channel, sample_dephasing_trajectories, sigma_b_at,
    AlphaCoefficients, DecayModel, PhaseNoiseModel, QUADRATURE_NODES,
};
use corrdyn::random::{random_density, stream_rng};
use proptest::prelude::*;

fn suscepts() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(-1.0), Just(-0.83), -2.0f64..2.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn process_matrix_is_positive_and_trace_one(a in suscepts(), b in suscepts(), sb in 0.0f64..3.0, sl in 0.0f64..3.0) {
        let chi = chi_closed_form(&PhaseNoiseModel::two_qubit(a, b, sb, sl).unwrap()).unwrap();
        let ev = eigvalsh(&chi).unwrap();
        prop_assert!(ev.iter().all(|&l| l > -1e-12), "{ev:?}");
        prop_assert!((ev.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_reproduces_closed_form(a in suscepts(), b in suscepts(), sb in 0.0f64..2.0, sl in 0.0f64..2.0) {
        let model = PhaseNoiseModel::two_qubit(a, b, sb, sl).unwrap();
        let diff = (chi_by_quadrature(&model, QUADRATURE_NODES).unwrap() - chi_closed_form(&model).unwrap()).camax();
        prop_assert!(diff < 1e-6, "{diff}");
    }

    #[test]
    fn coherence_factors_match_direct_average(a in suscepts(), b in suscepts(), sb in 0.0f64..2.0, sl in 0.0f64..2.0) {
        let alpha = AlphaCoefficients::from_model(&PhaseNoiseModel::two_qubit(a, b, sb, sl).unwrap()).unwrap();
        let cj = common::dephasing_cj(a, b, sb, sl);
        // CJ rows |s1 s1 s2 s2>: 00 -> 0, 01 -> 3, 10 -> 12, 11 -> 15
        let pairs = [(alpha.a1112, 0, 3), (alpha.a1121, 0, 12), (alpha.a1122, 0, 15), (alpha.a1221, 3, 12)];
        for (value, r, c) in pairs {
            let direct = cj[(r, c)].re * 4.0;
            prop_assert!((value - direct).abs() < 1e-9, "{value} vs {direct}");
        }
    }

    #[test]
    fn dephasing_preserves_populations(seed in any::<u64>(), a in suscepts(), b in suscepts(), sb in 0.0f64..3.0) {
        let rho = random_density(&[2, 2], &mut stream_rng(seed, 0));
        let out = analytic_dephasing_channel(&PhaseNoiseModel::two_qubit(a, b, sb, 0.3).unwrap())
            .unwrap()
            .apply(&rho)
            .unwrap();
        for k in 0..4 {
            prop_assert!((out.matrix()[(k, k)] - rho.matrix()[(k, k)]).norm() < 1e-12);
        }
    }

    #[test]
    fn sampled_channel_matches_sampled_states(seed in any::<u64>(), sb in 0.0f64..2.0) {
        let model = PhaseNoiseModel::two_qubit(1.0, -0.83, sb, 0.2).unwrap();
        let rho = random_density(&[2, 2], &mut stream_rng(seed, 1));
        let via_channel = sample_dephasing_channel(&model, 50, seed).unwrap().apply(&rho).unwrap();
        let direct = sample_dephasing_trajectories(&model, &rho, 50, seed).unwrap();
        prop_assert!(via_channel.approx_eq(&direct, 1e-10));
    }

    #[test]
    fn decay_preserves_trace_and_moves_population_down(seed in any::<u64>(), t in 0.0f64..3.0) {
        let model = DecayModel::new(1.0, vec![0, 1]).unwrap();
        let rho = random_density(&[2, 2], &mut stream_rng(seed, 0));
        let out = model.exact_channel(t, 2).unwrap().apply(&rho).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        // population of |11> (both decayed) never decreases
        prop_assert!(out.matrix()[(3, 3)].re >= rho.matrix()[(3, 3)].re - 1e-12);
    }
}

#[test]
fn sampling_converges_to_the_exact_channel() {
    let model = PhaseNoiseModel::two_qubit(1.0, -0.83, 0.9, 0.4).unwrap();
    let parties = PartyStructure::uniform(2, 2).unwrap();
    let exact = analytic_dephasing_channel(&model).unwrap().choi_state(&parties).unwrap();
    let mut last = f64::INFINITY;
    for n in [100, 10_000, 1_000_000] {
        let mc = sample_dephasing_channel(&model, n, 3).unwrap().choi_state(&parties).unwrap();
        let d = mc.trace_distance(&exact).unwrap();
        assert!(d < 3.0 / (n as f64).sqrt(), "n = {n}: {d}");
        assert!(d < last);
        last = d;
    }
}

#[test]
fn sampling_is_reproducible_per_seed() {
    let model = PhaseNoiseModel::two_qubit(1.0, 1.0, 1.0, 0.0).unwrap();
    let a = sample_dephasing_channel(&model, 1000, 5).unwrap().choi_matrix_natural();
    let b = sample_dephasing_channel(&model, 1000, 5).unwrap().choi_matrix_natural();
    let c = sample_dephasing_channel(&model, 1000, 6).unwrap().choi_matrix_natural();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn many_qubit_channel_agrees_with_two_qubit_form() {
    let model = PhaseNoiseModel::two_qubit(1.0, -0.83, 0.7, 0.5).unwrap();
    let basis = PauliOpBasis::z_dephasing(2);
    let a = gaussian_dephasing_channel(&model).unwrap().to_chi(&basis).unwrap();
    let b = chi_closed_form(&model).unwrap();
    assert!((a - b).camax() < 1e-12);
}

#[test]
fn coherence_time_calibration() {
    let tau = 2.0;
    let model = PhaseNoiseModel::at_time(vec![1.0, 1.0], 0.0, tau, tau).unwrap();
    assert!((model.sigma_b - sigma_b_at(tau, tau, 1.0)).abs() < 1e-15);
    let rho = gaussian_dephasing_channel(&model).unwrap().apply(&DensityMatrix::plus_state(2)).unwrap();
    let single = rho.partial_trace(&[0]).unwrap();
    // <σx> of one qubit decays to 1/e at t = tau
    assert!((2.0 * single.matrix()[(0, 1)].re - (-1.0f64).exp()).abs() < 1e-12);
}

#[test]
fn jump_trajectories_reproduce_amplitude_damping() {
    let model = DecayModel::new(1.0, vec![0, 1]).unwrap();
    let rho = DensityMatrix::plus_state(2);
    for t in [0.3, 1.2] {
        let exact = model.exact_channel(t, 2).unwrap().apply(&rho).unwrap();
        let sampled = sample_decay_trajectories(&model, &rho, t, 40_000, 8).unwrap();
        assert!(exact.trace_distance(&sampled).unwrap() < 0.01);
    }
}
