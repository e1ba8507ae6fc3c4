//! Super-critical power (`λ = 2`, `μ = 1`) with outgoing-momentum data:
//! the half-plane functional `P`, its lower bound, `F = ∬P/√l` and the
//! ratios of `F″` to the right sides of its differential inequalities.
//!
//! Run with `cargo run --release --example euler_case4_blowup`.

use damped_euler::diagnostics::{blowup_suite, density, SeriesCollector, SeriesOptions, StripSpec};
use damped_euler::euler2d::data::{sample, DataFamily};
use damped_euler::euler2d::{evolve, init_state, Grid2D, RunOptions, Solver, SolverConfig};
use damped_euler::{classify_case, DampingLaw, GasLaw};

fn main() -> damped_euler::Result<()> {
    let law = DampingLaw::from_decimal("1", "2")?;
    let gas = GasLaw::new(2.0, 1.0)?;
    let (eps, m, t_end, n) = (0.3, 1.0, 14.0, 256);
    let grid = Grid2D::new(t_end + m + 2.0, n)?;
    let data = sample(&DataFamily::OutgoingMomentum { lambda_cap: 3.0 }, m, &gas, &grid)?;
    let initial = init_state(&gas, eps, &data.rho0, (&data.u1, &data.u2), &grid)?;
    let rho0 = density(&initial, &gas)?;
    let config = SolverConfig {
        support_radius: Some(m),
        ..Default::default()
    };
    let mut solver = Solver::new(grid, law, gas, config)?;
    let strip = StripSpec { m0: 0.125, m };
    let options = SeriesOptions {
        energies: false,
        strip: Some(strip),
    };
    let mut series = SeriesCollector::new(options, classify_case(&law, 2)?, law, gas, grid);
    let mut run = RunOptions::new(t_end, 0.125);
    run.stop_factor = Some(1e4);
    let outcome = evolve(&mut solver, initial, &run, |o| series.observe(o))?;
    for factor in [1e2, 1e3, 1e4] {
        println!("gradient x{factor:e}: detected at {:?}", outcome.detection_time(factor));
    }
    let t_blowup = outcome.detection_time(1e3);
    let suite = blowup_suite(&series.series, strip, &rho0, gas.rho_bar(), &grid, &law, eps, gas.gamma(), t_blowup)?;
    println!(
        "lower bound: min P/bound {:.4} over {} samples (holds {})",
        suite.lower_bound_min_ratio,
        suite.lower_bound.len(),
        suite.lower_bound_holds()
    );
    println!(
        "window [{:.3}, {:.3}]: inf linear ratio {:.4e}, inf nonlinear ratio {:.4e}",
        suite.ode.window.0, suite.ode.window.1, suite.ode.linear_inf, suite.ode.nonlinear_inf
    );
    for (k, t) in suite.f.t.iter().enumerate().step_by(16) {
        println!("t {t:6.3}  F {:.4e}  F'' {:.4e}", suite.f.f[k], suite.f.f2[k]);
    }
    Ok(())
}
