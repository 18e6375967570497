//! Correlation measure of a few reference channels on two qubits: the
//! identity and product channels carry no correlations, SWAP is maximally
//! correlated, and correlated dephasing sits in between.
//!
//! ```bash
//! cargo run --example correlation_measure
//! ```

use corrdyn::channels::QuantumChannel;
use corrdyn::measure::{measure_ibar, PartyStructure};
use corrdyn::noise::{analytic_dephasing_channel, PhaseNoiseModel};

fn main() -> corrdyn::Result<()> {
    let parties = PartyStructure::uniform(2, 2)?;
    let damp = QuantumChannel::amplitude_damping(0.3)?;
    let dephase = PhaseNoiseModel::two_qubit(1.0, 1.0, 10.0, 0.0)?;

    let channels = [
        ("identity", QuantumChannel::identity(vec![2, 2])),
        ("local damping ⊗ damping", damp.tensor(&damp)),
        ("swap", QuantumChannel::swap(2)),
        ("correlated dephasing", analytic_dephasing_channel(&dephase)?),
    ];
    println!("{:<26} {:>8} {:>10}", "channel", "Ibar", "S(joint)");
    for (name, ch) in &channels {
        let r = measure_ibar(ch, &parties)?;
        println!("{name:<26} {:>8.5} {:>10.5}", r.i_bar, r.joint_entropy);
    }
    Ok(())
}
