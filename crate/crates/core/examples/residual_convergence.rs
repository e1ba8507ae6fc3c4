//! Discrete residuals of the vorticity equation and of the quasilinear
//! wave equation for `θ` on a smooth sub-critical run, under joint
//! refinement of `h` and `dt`. Flipping the sign of any single quadratic
//! term destroys the convergence.
//!
//! Run with `cargo run --release --example residual_convergence`.

use damped_euler::euler2d::data::{sample, DataFamily};
use damped_euler::euler2d::residual::{vorticity_residual, wave_residual_with, QTerm};
use damped_euler::euler2d::stencil::l2_norm;
use damped_euler::euler2d::{evolve, init_state, Grid2D, RunOptions, Solver, SolverConfig, TimeStep};
use damped_euler::{DampingLaw, GasLaw};

fn main() -> damped_euler::Result<()> {
    let law = DampingLaw::from_decimal("1", "0.5")?;
    let gas = GasLaw::new(2.0, 1.0)?;
    let (eps, m, t_end) = (0.2, 4.0, 2.0);
    let mut previous: Option<Vec<f64>> = None;
    for n in [64usize, 128, 256] {
        let grid = Grid2D::new(8.0, n)?;
        let data = sample(&DataFamily::DensityVortex { density: 1.0, swirl: 1.0 }, m, &gas, &grid)?;
        let initial = init_state(&gas, eps, &data.rho0, (&data.u1, &data.u2), &grid)?;
        let config = SolverConfig {
            support_radius: Some(m),
            ..Default::default()
        };
        let mut solver = Solver::new(grid, law, gas, config)?;
        let mut run = RunOptions::new(t_end, t_end);
        run.step = TimeStep::Fixed { dt: 0.05 * 64.0 / n as f64 };
        let mut norms = Vec::new();
        evolve(&mut solver, initial, &run, |o| {
            if o.center == 1 {
                norms.push(l2_norm(&vorticity_residual(o.history, &law, &grid)?, &grid));
                norms.push(l2_norm(&wave_residual_with(o.history, &law, &gas, &grid, None)?, &grid));
                for q in QTerm::ALL {
                    norms.push(l2_norm(&wave_residual_with(o.history, &law, &gas, &grid, Some(q))?, &grid));
                }
            }
            Ok(())
        })?;
        let rate = |k: usize| previous.as_ref().map_or(f64::NAN, |p| (p[k] / norms[k]).log2());
        println!("n {n}: vorticity {:.3e} (rate {:.2}), wave {:.3e} (rate {:.2})", norms[0], rate(0), norms[1], rate(1));
        for (k, q) in QTerm::ALL.iter().enumerate() {
            println!("    flipped {:<20} {:.3e} (rate {:.2})", q.name(), norms[k + 2], rate(k + 2));
        }
        previous = Some(norms);
    }
    Ok(())
}
