//! Composing a channel with local operations before and after never
//! increases its correlation measure; local unitaries leave it unchanged.
//!
//! ```bash
//! cargo run --example fundamental_law
//! ```

use corrdyn::measure::{check_fundamental_law, PartyStructure};
use corrdyn::random::{random_channel, random_unitary_channel, stream_rng};

fn main() -> corrdyn::Result<()> {
    let parties = PartyStructure::uniform(2, 2)?;
    let mut rng = stream_rng(42, 0);
    for trial in 0..5 {
        let channel = random_channel(&[2, 2], 3, &mut rng);
        let noisy: Vec<_> = (0..2)
            .map(|_| (random_channel(&[2], 2, &mut rng), random_channel(&[2], 2, &mut rng)))
            .collect();
        let unitary: Vec<_> = (0..2)
            .map(|_| (random_unitary_channel(&[2], &mut rng), random_unitary_channel(&[2], &mut rng)))
            .collect();
        let a = check_fundamental_law(&channel, &noisy, &parties)?;
        let b = check_fundamental_law(&channel, &unitary, &parties)?;
        println!(
            "trial {trial}: {:.5} -> {:.5} with local noise, -> {:.5} with local unitaries",
            a.before, a.after, b.after
        );
    }
    Ok(())
}
