//! Four-qubit register under correlated dephasing: pairwise bounds between
//! the first qubit and each other qubit, and four-body bounds for different
//! encoding configurations, against their long-time limits.
//!
//! ```bash
//! cargo run --release --example four_qubit_bounds
//! ```

use corrdyn::bound::lower_bound_from_state;
use corrdyn::experiments::{run_fig6, run_fig7, SamplingOptions};
use corrdyn::linalg::Observable;
use corrdyn::measure::PartyStructure;
use corrdyn::noise::{long_time_state, LongTimeConfig};

fn main() -> corrdyn::Result<()> {
    let parties = PartyStructure::uniform(4, 2)?;
    let xs = vec![Observable::pauli("X")?; 4];
    for config in [LongTimeConfig::Sym4, LongTimeConfig::Mixed22, LongTimeConfig::Mixed31] {
        let lb = lower_bound_from_state(&long_time_state(config), &xs, &parties)?;
        println!("long-time {config:?}: XXXX bound {:.4}", lb.lower_bound);
    }

    let sampling = SamplingOptions {
        repetitions: 3,
        ..SamplingOptions::default()
    };
    let pairs = run_fig6(&sampling)?;
    for r in &pairs.rows {
        println!("pair {}: {:.4} ± {:.4} (exact {:.4})", r.pair, r.pipeline_value, r.std_err, r.analytic_ref);
    }
    let configs = run_fig7(&sampling)?;
    for r in &configs.rows {
        println!("{}: {:.4} ± {:.4} (exact {:.4}, long-time {:.4})", r.config, r.pipeline_value, r.std_err, r.exact_value, r.analytic_ref);
    }
    for c in pairs.checks.iter().chain(&configs.checks) {
        println!("{} {}  {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    Ok(())
}
