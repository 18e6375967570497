//! Process tomography of correlated dephasing from the 144 two-qubit
//! settings, followed by the correlation measure of the reconstruction.
//!
//! ```bash
//! cargo run --release --example process_tomography
//! ```

use corrdyn::measure::{measure_ibar, PartyStructure};
use corrdyn::noise::{analytic_dephasing_channel, PhaseNoiseModel};
use corrdyn::tomography::{
    mle_process_tomography, process_fidelity, process_tomography_settings, simulate_record, MleOptions,
};

fn main() -> corrdyn::Result<()> {
    let parties = PartyStructure::uniform(2, 2)?;
    let truth = analytic_dephasing_channel(&PhaseNoiseModel::two_qubit(1.0, 1.0, 1.0, 0.0)?)?;
    let settings = process_tomography_settings(2);
    println!("{} settings, Ibar of the true channel {:.5}", settings.len(), measure_ibar(&truth, &parties)?.i_bar);

    for shots in [100, 10_000] {
        let record = simulate_record(&truth, &settings, shots, 5)?;
        let est = mle_process_tomography(&record, &MleOptions::default())?;
        println!(
            "{shots:>6} shots: Ibar {:.5}, process fidelity {:.5}, {} iterations",
            measure_ibar(&est.channel, &parties)?.i_bar,
            process_fidelity(&est.channel, &truth)?,
            est.iterations
        );
    }
    Ok(())
}
