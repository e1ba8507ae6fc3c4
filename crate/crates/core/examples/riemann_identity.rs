//! The Riemann function of the one-dimensional damped wave operator: the
//! finite-difference adjoint residual falls at second order, and the
//! closed-form bracket vanishes identically at `λ = 1`.
//!
//! Run with `cargo run --release --example riemann_identity`.

use damped_euler::specfun::{adjoint_bracket, adjoint_residual, riemann_r, CharPoint};
use damped_euler::DampingLaw;

fn main() -> damped_euler::Result<()> {
    let pa = CharPoint::new(2.0, 5.0);
    let points = [CharPoint::new(1.6, 4.1), CharPoint::new(1.2, 3.0), CharPoint::new(1.9, 4.8)];
    for lambda in ["1", "1.5", "2"] {
        let law = DampingLaw::from_decimal("1", lambda)?;
        for p in points {
            let coarse = adjoint_residual(p, pa, &law, 1e-2)?;
            let fine = adjoint_residual(p, pa, &law, 5e-3)?;
            println!(
                "{law} at ({}, {}): R = {:.6}, residual {coarse:+.3e} -> {fine:+.3e}, ratio {:.3}, bracket {:+.3e}",
                p.xi,
                p.zeta,
                riemann_r(p, pa, &law)?,
                coarse / fine,
                adjoint_bracket(&law, p.xi + p.zeta)?
            );
        }
    }
    Ok(())
}
