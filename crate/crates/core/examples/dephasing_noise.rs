//! Gaussian phase noise three ways: closed form, quadrature and Monte-Carlo
//! phase sampling, plus independent spontaneous decay from quantum jumps.
//!
//! ```bash
//! cargo run --example dephasing_noise
//! ```

use corrdyn::linalg::DensityMatrix;
use corrdyn::measure::{measure_ibar, PartyStructure};
use corrdyn::noise::{
    analytic_dephasing_channel, chi_by_quadrature, chi_closed_form, sample_decay_trajectories,
    sample_dephasing_channel, DecayModel, PhaseNoiseModel, QUADRATURE_NODES,
};

fn main() -> corrdyn::Result<()> {
    let parties = PartyStructure::uniform(2, 2)?;
    for (a, b) in [(1.0, 1.0), (1.0, -0.83)] {
        for t in [0.5, 2.0, 5.0] {
            let model = PhaseNoiseModel::at_time(vec![a, b], 0.0, t, 1.0)?;
            let exact = measure_ibar(&analytic_dephasing_channel(&model)?, &parties)?.i_bar;
            let mc = measure_ibar(&sample_dephasing_channel(&model, 10_000, 7)?, &parties)?.i_bar;
            let quad = (chi_by_quadrature(&model, QUADRATURE_NODES)? - chi_closed_form(&model)?).camax();
            println!("a={a:+.2} b={b:+.2} t/tau={t:.1}: Ibar {exact:.5}  sampled {mc:.5}  |chi_quad - chi| {quad:.1e}");
        }
    }

    let decay = DecayModel::new(1.0, vec![0, 1])?;
    let plus = DensityMatrix::plus_state(2);
    for t in [0.25, 1.0] {
        let exact = decay.exact_channel(t, 2)?.apply(&plus)?;
        let sampled = sample_decay_trajectories(&decay, &plus, t, 5_000, 3)?;
        println!(
            "decay t/T={t}: trace distance exact vs 5000 jump trajectories {:.4}",
            exact.trace_distance(&sampled)?
        );
    }
    Ok(())
}
