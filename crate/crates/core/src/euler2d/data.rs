//! Compactly supported initial data families on the grid.

use serde::{Deserialize, Serialize};

use super::grid::Grid2D;
use crate::damping::GasLaw;
use crate::error::{Error, Result};

/// Power of the polynomial bump. `(1-s²)^8` is `C⁷`; its fifth derivative
/// is a few thousand at most, against about 10⁶ for `exp(1 - 1/(1-s²))`,
/// which keeps fourth-order stencils accurate at moderate resolution.
pub const BUMP_POWER: i32 = 8;

/// `(1-s²)^8` for `|s| < 1`, zero otherwise; equals 1 at the origin.
pub fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - s * s).powi(BUMP_POWER)
    }
}

/// `B'(s)/s` for the bump above.
fn bump_prime_over_s(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        -2.0 * BUMP_POWER as f64 * (1.0 - s * s).powi(BUMP_POWER - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DataFamily {
    Zero,
    /// `ρ₀ = a·B(r/M)`, `u₀ = b·B(r/M)·(-x₂, x₁)/M`: rotational.
    DensityVortex { density: f64, swirl: f64 },
    /// `ρ₀ = a·B(r/M)`, `u₀ = ∇(b·M·B(r/M))`: curl-free.
    Irrotational { density: f64, potential: f64 },
    /// `ρ₀ = B(r/M) > 0` inside the support, `u₁,₀ = x₁ρ₀Λ/ρ̄`, `u₂,₀ = 0`.
    OutgoingMomentum { lambda_cap: f64 },
}

impl DataFamily {
    pub fn id(&self) -> &'static str {
        match self {
            DataFamily::Zero => "zero",
            DataFamily::DensityVortex { .. } => "density_vortex",
            DataFamily::Irrotational { .. } => "irrotational",
            DataFamily::OutgoingMomentum { .. } => "outgoing_momentum",
        }
    }
}

#[derive(Debug, Clone)]
pub struct InitialData {
    pub rho0: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

/// Samples `family` with support radius `m` on `grid`.
pub fn sample(family: &DataFamily, m: f64, gas: &GasLaw, grid: &Grid2D) -> Result<InitialData> {
    if !(m > 0.0) {
        return Err(Error::param("M", format!("support radius must be positive, got {m}")));
    }
    let radial = |x: f64, y: f64| (x * x + y * y).sqrt() / m;
    let (rho0, u1, u2) = match *family {
        DataFamily::Zero => {
            let z = vec![0.0; grid.len()];
            (z.clone(), z.clone(), z)
        }
        DataFamily::DensityVortex { density, swirl } => (
            grid.sample(|x, y| density * bump(radial(x, y))),
            grid.sample(|x, y| -swirl * bump(radial(x, y)) * y / m),
            grid.sample(|x, y| swirl * bump(radial(x, y)) * x / m),
        ),
        DataFamily::Irrotational { density, potential } => (
            grid.sample(|x, y| density * bump(radial(x, y))),
            grid.sample(|x, y| potential * bump_prime_over_s(radial(x, y)) * x / m),
            grid.sample(|x, y| potential * bump_prime_over_s(radial(x, y)) * y / m),
        ),
        DataFamily::OutgoingMomentum { lambda_cap } => {
            if !(lambda_cap >= 0.0) {
                return Err(Error::param("Lambda", format!("must be non-negative, got {lambda_cap}")));
            }
            let rho_bar = gas.rho_bar();
            (
                grid.sample(|x, y| bump(radial(x, y))),
                grid.sample(|x, y| x * bump(radial(x, y)) * lambda_cap / rho_bar),
                vec![0.0; grid.len()],
            )
        }
    };
    Ok(InitialData { rho0, u1, u2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler2d::stencil::{d1, Axis};

    #[test]
    fn irrotational_family_is_a_gradient() {
        // The sampled field is the exact gradient, so the stencil error of the
        // potential must fall at fourth order.
        let err = |n: usize| {
            let g = Grid2D::new(6.0, n).unwrap();
            let gas = GasLaw::new(1.4, 1.0).unwrap();
            let d = sample(&DataFamily::Irrotational { density: 0.0, potential: 1.0 }, 4.0, &gas, &g).unwrap();
            let phi = g.sample(|x, y| 4.0 * bump((x * x + y * y).sqrt() / 4.0));
            let px = d1(&phi, &g, Axis::X1);
            px.iter().zip(&d.u1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(128), err(256));
        assert!(coarse < 1e-4, "{coarse}");
        assert!(coarse / fine > 12.0, "{coarse} {fine}");
    }

    #[test]
    fn outgoing_momentum_without_lambda_is_at_rest() {
        let g = Grid2D::new(4.0, 32).unwrap();
        let gas = GasLaw::new(2.0, 1.0).unwrap();
        let d = sample(&DataFamily::OutgoingMomentum { lambda_cap: 0.0 }, 2.0, &gas, &g).unwrap();
        assert!(d.u1.iter().chain(&d.u2).all(|&v| v == 0.0));
        assert!(d.rho0.iter().any(|&r| r > 0.5));
    }
}
