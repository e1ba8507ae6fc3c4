//! The series `Ψ(a,b,c;z)` with `a+b = 1`, its index-shift derivative
//! identity, and the largest `δ₀` for which both `Ψ(a,b,1;·)` and
//! `Ψ(a+1,b+1,2;·)` stay in `[1/2, 3/2]` on `[-δ₀/2, 0]`.
//!
//! Run with `cargo run --release --example hypergeometric_window`.

use damped_euler::specfun::{delta0_search, prod_ab, psi, psi_shifted, window_holds, HyperParams, DELTA0_SAMPLES};
use damped_euler::DampingLaw;

fn main() -> damped_euler::Result<()> {
    for (mu, lambda) in [("1", "1"), ("1", "1.5"), ("1", "2"), ("2", "2"), ("0.5", "3")] {
        let law = DampingLaw::from_decimal(mu, lambda)?;
        let params = HyperParams::from_law(&law, 1.0)?;
        let delta0 = delta0_search(&law)?;
        let verified = window_holds(&law, delta0, 10 * DELTA0_SAMPLES)?;
        let z = -0.25;
        let h = 1e-4;
        let fd = (psi(&params, z + h)? - psi(&params, z - h)?) / (2.0 * h);
        let identity = params.prod_ab / params.c * psi_shifted(&params, z)?;
        println!(
            "{law}: ab = {:.4}, delta0 = {delta0:.6} (10x check {verified}), Psi(-1/4) = {:.12}, Psi' fd/identity - 1 = {:+.2e}",
            prod_ab(&law)?,
            psi(&params, z)?,
            fd / identity - 1.0
        );
    }
    Ok(())
}
