//! Converting a channel between Kraus operators, the Choi–Jamiołkowski state
//! and the process matrix, and writing it as a JSON channel file.
//!
//! ```bash
//! cargo run --example channel_forms
//! ```

use corrdyn::channels::{PauliOpBasis, QuantumChannel};
use corrdyn::io::ChannelFile;
use corrdyn::measure::PartyStructure;
use corrdyn::noise::{chi_closed_form, AlphaCoefficients, PhaseNoiseModel};

fn main() -> corrdyn::Result<()> {
    let model = PhaseNoiseModel::two_qubit(1.0, -0.83, 0.6, 0.2)?;
    let chi = chi_closed_form(&model)?;
    let basis = PauliOpBasis::z_dephasing(2);
    let channel = QuantumChannel::from_chi(&chi, &basis)?;
    println!("Kraus operators: {}", channel.kraus().len());
    println!("process matrix over {:?}:\n{:.4}", basis.labels(), chi.map(|z| z.re));
    println!("coherence factors: {:?}", AlphaCoefficients::from_chi(&chi));

    let parties = PartyStructure::uniform(2, 2)?;
    let cj = channel.choi_state(&parties)?;
    let back = QuantumChannel::from_choi_state(&cj, &parties, vec![2, 2])?;
    let roundtrip = (back.to_chi(&basis)? - &chi).camax();
    println!("Kraus -> CJ -> Kraus -> chi deviation: {roundtrip:.2e}");

    let file = ChannelFile::choi_form(&channel, &parties)?;
    println!("{}", serde_json::to_string(&file)?.chars().take(120).collect::<String>() + " ...");
    Ok(())
}
