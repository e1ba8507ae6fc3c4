//! Half-plane moments `∫_{x₁>l} (x₁-l)^p f dx` of grid fields: the initial
//! functionals `q₀`, `q₁` and the weighted density excess `P(t,l)`.
//!
//! Fields are treated as constant on each cell and the polynomial weight is
//! integrated exactly over the part of the cell with `x₁ > l`. Both `η` and
//! `∂₁η` vanish at `x₁ = l`, so the clipped cell contributes at third order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::damping::GasLaw;
use crate::error::{Error, Result};
use crate::euler2d::{FlowState2D, Grid2D};

/// Integrals over `x₂` of each grid column, ready for repeated moments in `l`.
#[derive(Debug, Clone)]
pub struct ColumnProfile {
    lower: Vec<f64>,
    h: f64,
    sums: Vec<f64>,
}

impl ColumnProfile {
    pub fn new(field: &[f64], grid: &Grid2D) -> Self {
        let n = grid.n;
        let mut sums = vec![0.0; n];
        for row in field.chunks_exact(n) {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        sums.iter_mut().for_each(|s| *s *= grid.h);
        Self {
            lower: (0..n).map(|i| grid.coord(i) - 0.5 * grid.h).collect(),
            h: grid.h,
            sums,
        }
    }

    /// `∫_{x₁>l} (x₁-l)^p f dx`.
    pub fn moment(&self, l: f64, p: i32) -> f64 {
        let q = (p + 1) as f64;
        let mut acc = 0.0;
        for (&a, &s) in self.lower.iter().zip(&self.sums) {
            let b = a + self.h;
            if b <= l || s == 0.0 {
                continue;
            }
            let lo = (a - l).max(0.0);
            acc += s * ((b - l).powi(p + 1) - lo.powi(p + 1)) / q;
        }
        acc
    }
}

/// `q₀(l) = ∫_{x₁>l} (x₁-l)²(ρ(0,x) - ρ̄) dx` from the initial density field.
pub fn q0(density: &[f64], grid: &Grid2D, l: f64, rho_bar: f64) -> f64 {
    let excess: Vec<f64> = density.iter().map(|r| r - rho_bar).collect();
    ColumnProfile::new(&excess, grid).moment(l, 2)
}

/// `q₁(l) = 2∫_{x₁>l} (x₁-l)(ρu₁)(0,x) dx` from the initial momentum field.
pub fn q1(momentum: &[f64], grid: &Grid2D, l: f64) -> f64 {
    2.0 * ColumnProfile::new(momentum, grid).moment(l, 1)
}

/// Density field `ρ(θ)` of a state.
pub fn density(state: &FlowState2D, gas: &GasLaw) -> Result<Vec<f64>> {
    state.theta.par_iter().map(|&th| gas.rho_from_theta(th)).collect()
}

/// `P(t,l) = ∫_{x₁>l} (x₁-l)²(ρ(t,x) - ρ̄) dx` for every `l` in `l_grid`.
/// Uses the same quadrature as [`q0`], so `P(0,·) = q₀` on the same density.
pub fn p_functional(state: &FlowState2D, l_grid: &[f64], gas: &GasLaw, grid: &Grid2D) -> Result<Vec<f64>> {
    let excess: Vec<f64> = density(state, gas)?.iter().map(|r| r - gas.rho_bar()).collect();
    let profile = ColumnProfile::new(&excess, grid);
    Ok(l_grid.iter().map(|&l| profile.moment(l, 2)).collect())
}

/// Initial velocity `u₁,₀ = x₁ρ₀Λ/ρ̄`, `u₂,₀ = 0` for a non-negative density
/// bump `ρ₀`.
pub fn outgoing_momentum_data(rho0: &[f64], lambda_cap: f64, gas: &GasLaw, grid: &Grid2D) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(lambda_cap >= 0.0) {
        return Err(Error::param("Lambda", format!("must be non-negative, got {lambda_cap}")));
    }
    if let Some(k) = rho0.iter().position(|&r| !(r >= 0.0)) {
        return Err(Error::Domain(format!("rho0 = {} is negative at {:?}", rho0[k], grid.point(k))));
    }
    let rho_bar = gas.rho_bar();
    let u1 = rho0
        .par_iter()
        .enumerate()
        .map(|(k, &r)| grid.point(k).0 * r * lambda_cap / rho_bar)
        .collect();
    Ok((u1, vec![0.0; rho0.len()]))
}

/// Radii entering the blowup conditions: support `M`, inner radius `M̃`,
/// strip radius `M₀` and the momentum ratio `Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupData {
    pub m: f64,
    pub m_tilde: f64,
    pub m0: f64,
    pub lambda_cap: f64,
    pub delta0: f64,
}

impl BlowupData {
    /// Checks `0 ≤ M̃ < M`, `max(M̃, M-δ₀) ≤ M₀ < M` and `Λ ≥ 3ab`.
    pub fn validate(&self, prod_ab: f64) -> Result<()> {
        let BlowupData {
            m,
            m_tilde,
            m0,
            lambda_cap,
            delta0,
        } = *self;
        if !(0.0 <= m_tilde && m_tilde < m) {
            return Err(Error::param("M_tilde", format!("need 0 <= M_tilde < M, got {m_tilde} (M = {m})")));
        }
        if !(m_tilde.max(m - delta0) <= m0 && m0 < m) {
            return Err(Error::param(
                "M0",
                format!("need max(M_tilde, M - delta0) <= M0 < M, got {m0} (M = {m}, delta0 = {delta0})"),
            ));
        }
        if !(lambda_cap >= 3.0 * prod_ab) {
            return Err(Error::param("Lambda", format!("need Lambda >= 3ab = {}, got {lambda_cap}", 3.0 * prod_ab)));
        }
        Ok(())
    }

    /// Evaluates `q₀ > 0` on `(M̃, M)` and `q₁ ≥ Λq₀` on `(M₀, M)` at
    /// `samples` interior points of each interval.
    pub fn check_conditions(&self, density: &[f64], momentum: &[f64], rho_bar: f64, grid: &Grid2D, samples: usize) -> ConditionReport {
        let excess: Vec<f64> = density.iter().map(|r| r - rho_bar).collect();
        let mass = ColumnProfile::new(&excess, grid);
        let flux = ColumnProfile::new(momentum, grid);
        let interior = |a: f64, b: f64| (1..=samples).map(move |k| a + (b - a) * k as f64 / (samples + 1) as f64);
        let min_q0 = interior(self.m_tilde, self.m)
            .map(|l| mass.moment(l, 2))
            .fold(f64::INFINITY, f64::min);
        let min_margin = interior(self.m0, self.m)
            .map(|l| 2.0 * flux.moment(l, 1) - self.lambda_cap * mass.moment(l, 2))
            .fold(f64::INFINITY, f64::min);
        ConditionReport {
            min_q0,
            min_momentum_margin: min_margin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionReport {
    /// Smallest sampled `q₀` on `(M̃, M)`.
    pub min_q0: f64,
    /// Smallest sampled `q₁ - Λq₀` on `(M₀, M)`.
    pub min_momentum_margin: f64,
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        self.min_q0 > 0.0 && self.min_momentum_margin >= 0.0
    }
}
