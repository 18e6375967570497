//! Correlation measure versus waiting time for the two-qubit scenarios,
//! comparing the exact value with repeated simulated experiments. Writes
//! one CSV per scenario to the system temp directory.
//!
//! ```bash
//! cargo run --release --example time_scan
//! ```

use corrdyn::experiments::{run_fig4, Fig4Variant, SamplingOptions};

fn main() -> corrdyn::Result<()> {
    let sampling = SamplingOptions {
        repetitions: 3,
        ..SamplingOptions::default()
    };
    for variant in [Fig4Variant::Sym, Fig4Variant::Asym, Fig4Variant::Uncorr] {
        let result = run_fig4(variant, &sampling)?;
        println!("{}", result.id);
        for r in &result.rows {
            println!(
                "  t/tau {:>5.2}  exact {:.4}  simulated {:.4} [{:.4}, {:.4}]",
                r.t_over_tau, r.analytic_ref, r.pipeline_value, r.band_min, r.band_max
            );
        }
        for c in &result.checks {
            println!("  {} {}", if c.passed { "ok  " } else { "FAIL" }, c.name);
        }
        let path = std::env::temp_dir().join(format!("{}.csv", result.id));
        result.write_csv(&path)?;
        println!("  -> {}", path.display());
    }
    Ok(())
}
