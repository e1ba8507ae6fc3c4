//! Lifespan of the damped Burgers equation: the exact prediction from
//! characteristics against blowup detected by the Godunov grid solver.
//!
//! Run with `cargo run --release --example burgers_lifespan`.

use damped_euler::burgers::{
    exact_value, grid_solve, lifespan, GridOptions, InitialProfile, ProfileFamily,
};
use damped_euler::DampingLaw;

fn main() -> damped_euler::Result<()> {
    let law = DampingLaw::from_decimal("0.5", "1")?;
    let eps = 0.1;
    let profile = InitialProfile::slope_normalized(ProfileFamily::Bump { amplitude: 1.0 }, 1.0, -1.0, 2001)?;
    let predicted = lifespan(&profile, eps, &law)?.time();
    println!("law {law}, eps {eps}, min v0' = {:.6}", profile.min_slope());
    println!("predicted lifespan T = {predicted:.10}");

    for factor in [10.0, 30.0, 1e3] {
        let opts = GridOptions {
            nx: 4096,
            slope_factor: factor,
            snapshot_times: vec![30.0],
            ..Default::default()
        };
        let sol = grid_solve(&profile, eps, &law, 60.0, &opts)?;
        let peak = sol.series.iter().map(|r| r.max_slope).fold(0.0, f64::max);
        match sol.blowup_time {
            Some(t) => println!(
                "threshold {factor:>6}x initial slope: detected T = {t:.4} ({:+.2}%)",
                100.0 * (t - predicted) / predicted
            ),
            None => println!(
                "threshold {factor:>6}x initial slope: not reached (peak ratio {:.1})",
                peak / sol.series[0].max_slope
            ),
        }
        if factor == 10.0 {
            let snap = &sol.snapshots[0];
            let err = sol
                .x
                .iter()
                .zip(&snap.v)
                .map(|(&x, &v)| Ok((v - exact_value(&profile, eps, &law, snap.t, x)?).abs()))
                .collect::<damped_euler::Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            println!("sup |grid - exact| at t = {}: {err:.3e}", snap.t);
        }
    }
    Ok(())
}
