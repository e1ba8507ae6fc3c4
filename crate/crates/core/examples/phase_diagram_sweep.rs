//! The Burgers phase diagram over `λ ∈ {0, 0.5, 0.9, 1, 1.1, 2}` and
//! `μ ∈ {1/2, 1, 2}` at `ε = 10⁻³`: global existence exactly when
//! `0 ≤ λ < 1` or `λ = 1, μ > 1`.
//!
//! Run with `cargo run --release --example phase_diagram_sweep`.

use damped_euler::cli::sweep::phase_diagram;
use damped_euler::cli::{ExperimentConfig, Mode};

fn main() -> damped_euler::Result<()> {
    let cfg = ExperimentConfig::default_for(Mode::Sweep);
    let sweep = cfg.sweep.clone().expect("default sweep section");
    for r in phase_diagram(&cfg, &sweep)? {
        let when = match r.lifespan_log1p {
            Some(s) => format!("ln(1+T) = {s:.4}"),
            None => String::new(),
        };
        println!("lambda {:>4} mu {:>4} {:<6} {:<8} {when}", r.lambda, r.mu, r.case, r.outcome);
    }
    Ok(())
}
