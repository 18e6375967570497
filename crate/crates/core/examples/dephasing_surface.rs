//! The two-qubit measure over a grid of magnetic and laser phase widths for
//! equal, opposite and unequal susceptibilities.
//!
//! ```bash
//! cargo run --example dephasing_surface
//! ```

use corrdyn::experiments::{linspace, run_fig8, Fig8Options};

fn main() -> corrdyn::Result<()> {
    let opts = Fig8Options {
        sigma_b: linspace(0.0, 2.0, 5),
        sigma_l: linspace(0.0, 2.0, 5),
        ..Fig8Options::default()
    };
    let result = run_fig8(&opts)?;
    for (a, b) in &opts.suscepts {
        println!("a = {a}, b = {b}   (rows sigma_B, columns sigma_L)");
        for sb in &opts.sigma_b {
            let line: Vec<String> = result
                .rows
                .iter()
                .filter(|r| r.a == *a && r.b == *b && r.sigma_b == *sb)
                .map(|r| format!("{:.4}", r.ibar))
                .collect();
            println!("  {sb:.1}: {}", line.join(" "));
        }
    }
    for c in &result.checks {
        println!("{} {}", if c.passed { "ok  " } else { "FAIL" }, c.name);
    }
    Ok(())
}
