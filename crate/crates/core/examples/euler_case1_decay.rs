//! Sub-critical damping (`λ = 1/2`, `μ = 1`): a small vortex-carrying bump
//! exists globally and its vorticity decays like `Ξ(t)^{-1/3}` or faster.
//! Energies `𝓔₂` and `E₂` are recorded at every sample.
//!
//! Run with `cargo run --release --example euler_case1_decay`.

use damped_euler::diagnostics::{SeriesCollector, SeriesOptions};
use damped_euler::euler2d::data::{sample, DataFamily};
use damped_euler::euler2d::{evolve, init_state, Grid2D, RunOptions, Solver, SolverConfig};
use damped_euler::{classify_case, DampingLaw, GasLaw};

fn main() -> damped_euler::Result<()> {
    let law = DampingLaw::from_decimal("1", "0.5")?;
    let gas = GasLaw::new(2.0, 1.0)?;
    let (eps, m, t_end, n) = (0.05, 4.0, 20.0, 128);
    let grid = Grid2D::new(t_end + m + 2.0, n)?;
    let data = sample(&DataFamily::DensityVortex { density: 1.0, swirl: 1.0 }, m, &gas, &grid)?;
    let initial = init_state(&gas, eps, &data.rho0, (&data.u1, &data.u2), &grid)?;
    let config = SolverConfig {
        support_radius: Some(m),
        ..Default::default()
    };
    let mut solver = Solver::new(grid, law, gas, config)?;
    let options = SeriesOptions {
        energies: true,
        strip: None,
    };
    let mut series = SeriesCollector::new(options, classify_case(&law, 2)?, law, gas, grid);
    let outcome = evolve(&mut solver, initial, &RunOptions::new(t_end, 2.0), |o| series.observe(o))?;
    println!("{law}: {}, blowup {:?}", series.series.label, outcome.blowup.map(|b| b.t));
    for r in &series.series.records {
        println!(
            "t {:5.1}  |w| {:.4e}  |w| Xi^(1/3) {:.4e}  mass {:.6e}  E2 {:.4e}  cal E2 {:.4e}",
            r.t,
            r.vorticity,
            r.vorticity * r.xi.cbrt(),
            r.mass,
            r.e2.unwrap_or(f64::NAN),
            r.cal_e2.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
