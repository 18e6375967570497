use corrdyn::linalg::{relative_entropy, trace_norm, von_neumann_entropy, DensityMatrix};
use corrdyn::random::{random_channel, random_density, random_density_rank, stream_rng};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pinsker_inequality(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = stream_rng(seed, 0);
        let dims = vec![2; n];
        let rho = random_density(&dims, &mut rng);
        let sigma = random_density(&dims, &mut rng);
        let s = relative_entropy(&rho, &sigma).unwrap().value;
        let t = trace_norm(&(rho.matrix() - sigma.matrix())).unwrap();
        prop_assert!(s + 1e-10 >= t * t / (2.0 * std::f64::consts::LN_2), "S = {s}, |.|_1 = {t}");
    }

    #[test]
    fn relative_entropy_shrinks_under_partial_trace(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let rho = random_density(&[2, 2], &mut rng);
        let sigma = random_density(&[2, 2], &mut rng);
        let full = relative_entropy(&rho, &sigma).unwrap().value;
        let part = relative_entropy(&rho.partial_trace(&[0]).unwrap(), &sigma.partial_trace(&[0]).unwrap()).unwrap().value;
        prop_assert!(part <= full + 1e-10);
    }

    #[test]
    fn relative_entropy_shrinks_under_channels(seed in any::<u64>(), rank in 1usize..=4) {
        let mut rng = stream_rng(seed, 0);
        let rho = random_density(&[2, 2], &mut rng);
        let sigma = random_density(&[2, 2], &mut rng);
        let ch = random_channel(&[2, 2], rank, &mut rng);
        let before = relative_entropy(&rho, &sigma).unwrap().value;
        let after = relative_entropy(&ch.apply(&rho).unwrap(), &ch.apply(&sigma).unwrap()).unwrap().value;
        prop_assert!(after <= before + 1e-9);
    }

    #[test]
    fn entropy_is_bounded_and_subadditive(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_density_rank(&[2, 2], rank, &mut stream_rng(seed, 0));
        let s = von_neumann_entropy(&rho).unwrap();
        let sa = von_neumann_entropy(&rho.partial_trace(&[0]).unwrap()).unwrap();
        let sb = von_neumann_entropy(&rho.partial_trace(&[1]).unwrap()).unwrap();
        prop_assert!((-1e-12..=2.0 + 1e-12).contains(&s));
        prop_assert!(s <= sa + sb + 1e-10);
        prop_assert!((sa - sb).abs() <= s + 1e-10);
    }

    #[test]
    fn relative_entropy_vanishes_only_on_equal_states(seed in any::<u64>()) {
        let rho = random_density(&[2, 2], &mut stream_rng(seed, 0));
        prop_assert!(relative_entropy(&rho, &rho).unwrap().value.abs() < 1e-10);
    }
}

#[test]
fn support_mismatch_is_flagged() {
    let zero = DensityMatrix::basis_state(vec![2], 0).unwrap();
    let one = DensityMatrix::basis_state(vec![2], 1).unwrap();
    let r = relative_entropy(&zero, &one).unwrap();
    assert!(r.support_violation);
    assert!(!r.is_finite());
}
