//! Flow state `(θ, u₁, u₂)` and quantities derived from it.

use serde::Serialize;

use super::grid::Grid2D;
use super::stencil::{d1, Axis};
use crate::damping::GasLaw;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowState2D {
    pub t: f64,
    pub theta: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl FlowState2D {
    pub fn zeros(grid: &Grid2D) -> Self {
        Self {
            t: 0.0,
            theta: vec![0.0; grid.len()],
            u1: vec![0.0; grid.len()],
            u2: vec![0.0; grid.len()],
        }
    }

    pub fn fields(&self) -> [&[f64]; 3] {
        [&self.theta, &self.u1, &self.u2]
    }

    pub fn is_finite(&self) -> bool {
        self.fields().iter().all(|f| f.iter().all(|v| v.is_finite()))
    }
}

/// `θ(0,x) = [(1+ερ₀/ρ̄)^{γ-1} - 1]/(γ-1)` and `u(0,x) = εu₀`.
pub fn init_state(
    gas: &GasLaw,
    eps: f64,
    rho0: &[f64],
    u0: (&[f64], &[f64]),
    grid: &Grid2D,
) -> Result<FlowState2D> {
    let n = grid.len();
    if rho0.len() != n || u0.0.len() != n || u0.1.len() != n {
        return Err(Error::param("fields", format!("expected {n} samples per field")));
    }
    let rho_bar = gas.rho_bar();
    let mut theta = Vec::with_capacity(n);
    for (k, &r) in rho0.iter().enumerate() {
        let rho = rho_bar + eps * r;
        if !(rho > 0.0) {
            let (x1, x2) = grid.point(k);
            return Err(Error::Domain(format!("density {rho} is not positive at ({x1}, {x2})")));
        }
        theta.push(gas.theta_from_rho(rho));
    }
    Ok(FlowState2D {
        t: 0.0,
        theta,
        u1: u0.0.iter().map(|v| eps * v).collect(),
        u2: u0.1.iter().map(|v| eps * v).collect(),
    })
}

/// Discrete scalar curl `∂₁u₂ - ∂₂u₁`.
pub fn vorticity(state: &FlowState2D, grid: &Grid2D) -> Vec<f64> {
    let a = d1(&state.u2, grid, Axis::X1);
    let b = d1(&state.u1, grid, Axis::X2);
    a.iter().zip(&b).map(|(a, b)| a - b).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivedFields {
    pub rho: Vec<f64>,
    pub pressure: Vec<f64>,
    pub vorticity: Vec<f64>,
}

pub fn derived_fields(state: &FlowState2D, gas: &GasLaw, grid: &Grid2D) -> Result<DerivedFields> {
    let rho = state
        .theta
        .iter()
        .map(|&th| gas.rho_from_theta(th))
        .collect::<Result<Vec<_>>>()?;
    let pressure = rho.iter().map(|&r| gas.pressure(r)).collect();
    Ok(DerivedFields {
        rho,
        pressure,
        vorticity: vorticity(state, grid),
    })
}
