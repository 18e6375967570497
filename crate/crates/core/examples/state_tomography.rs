//! Finite-shot state tomography of a dephased two-qubit state, maximum
//! likelihood reconstruction, and the lower bound estimated directly from
//! the counts with a delta-method error bar.
//!
//! ```bash
//! cargo run --example state_tomography
//! ```

use corrdyn::bound::{lower_bound_from_counts, lower_bound_from_state, ErrorMethod};
use corrdyn::linalg::{DensityMatrix, Observable};
use corrdyn::measure::PartyStructure;
use corrdyn::noise::{analytic_dephasing_channel, PhaseNoiseModel};
use corrdyn::tomography::{mle_state_tomography, simulate_record, state_tomography_settings, MleOptions};

fn main() -> corrdyn::Result<()> {
    let parties = PartyStructure::uniform(2, 2)?;
    let channel = analytic_dephasing_channel(&PhaseNoiseModel::two_qubit(1.0, 1.0, 1.5, 0.0)?)?;
    let rho = channel.apply(&DensityMatrix::plus_state(2))?;
    let x = Observable::pauli("X")?;
    let exact = lower_bound_from_state(&rho, &[x.clone(), x.clone()], &parties)?;

    for shots in [100, 1_000, 10_000] {
        let record = simulate_record(&rho, &state_tomography_settings(2), shots, 11)?;
        let est = mle_state_tomography(&record, &MleOptions::default())?;
        let from_state = lower_bound_from_state(&est.state, &[x.clone(), x.clone()], &parties)?;
        let from_counts = lower_bound_from_counts(&record, &["X", "X"], &parties, ErrorMethod::Delta)?;
        println!(
            "{shots:>6} shots: fidelity {:.4}, bound {:.4} (MLE) {:.4} ± {:.4} (counts), exact {:.4}, {} iterations",
            est.state.fidelity(&rho)?,
            from_state.lower_bound,
            from_counts.lower_bound,
            from_counts.std_err.unwrap_or(0.0),
            exact.lower_bound,
            est.iterations
        );
    }
    Ok(())
}
