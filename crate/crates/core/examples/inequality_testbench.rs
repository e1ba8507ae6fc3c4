//! Empirical constants of the div-curl, Klainerman-Sobolev and weighted
//! inequalities on the analytic outgoing-wave catalog at `t ∈ {0, 5, 20}`.
//!
//! Run with `cargo run --release --example inequality_testbench`.

use damped_euler::diagnostics::testbench::{run_catalog, stability};

fn main() -> damped_euler::Result<()> {
    let rows = run_catalog(&[0.0, 5.0, 20.0])?;
    for s in stability(&rows) {
        let verdict = match s.stable {
            Some(true) => "stable",
            Some(false) => "UNSTABLE",
            None => "positivity only",
        };
        println!(
            "{:<12} {:<28} param {:<4} C in [{:.4e}, {:.4e}] spread {:.3} {verdict}",
            s.inequality, s.function, s.param, s.min_constant, s.max_constant, s.spread
        );
    }
    Ok(())
}
