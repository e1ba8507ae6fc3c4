//! Blowup detection: gradient growth, non-finite values or loss of
//! positivity of `c² = 1 + (γ-1)θ`.

use rayon::prelude::*;
use serde::Serialize;

use super::grid::Grid2D;
use super::state::FlowState2D;
use super::stencil::{d1, Axis};
use crate::damping::GasLaw;

pub const DEFAULT_GRADIENT_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlowupKind {
    Gradient,
    NonFinite,
    Positivity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupReport {
    pub t: f64,
    pub kind: BlowupKind,
    pub x1: f64,
    pub x2: f64,
    pub value: f64,
}

/// Reference gradient and multiplier for the gradient criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupMonitor {
    pub initial_gradient: f64,
    pub factor: f64,
}

impl BlowupMonitor {
    pub fn new(initial: &FlowState2D, grid: &Grid2D, factor: f64) -> Self {
        Self {
            initial_gradient: max_gradient(initial, grid).0,
            factor,
        }
    }
}

/// `max(|∇θ|, |∇u|)` over the grid (Euclidean and Frobenius norms) and the
/// cell where it is attained.
pub fn max_gradient(state: &FlowState2D, grid: &Grid2D) -> (f64, usize) {
    let d = [
        d1(&state.theta, grid, Axis::X1),
        d1(&state.theta, grid, Axis::X2),
        d1(&state.u1, grid, Axis::X1),
        d1(&state.u1, grid, Axis::X2),
        d1(&state.u2, grid, Axis::X1),
        d1(&state.u2, grid, Axis::X2),
    ];
    let n = grid.n;
    let partial: Vec<(f64, usize)> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut best = (0.0f64, j * n);
            for k in j * n..(j + 1) * n {
                let gt = (d[0][k] * d[0][k] + d[1][k] * d[1][k]).sqrt();
                let gu = (d[2][k] * d[2][k] + d[3][k] * d[3][k] + d[4][k] * d[4][k] + d[5][k] * d[5][k]).sqrt();
                let g = gt.max(gu);
                if g > best.0 {
                    best = (g, k);
                }
            }
            best
        })
        .collect();
    partial.into_iter().fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a })
}

pub fn detect_blowup(
    state: &FlowState2D,
    gas: &GasLaw,
    grid: &Grid2D,
    monitor: &BlowupMonitor,
) -> Option<BlowupReport> {
    let report = |kind, k: usize, value| {
        let (x1, x2) = grid.point(k);
        Some(BlowupReport {
            t: state.t,
            kind,
            x1,
            x2,
            value,
        })
    };
    for field in state.fields() {
        if let Some(k) = field.iter().position(|v| !v.is_finite()) {
            return report(BlowupKind::NonFinite, k, field[k]);
        }
    }
    if let Some(k) = state.theta.iter().position(|&th| gas.sound_speed_sq(th) <= 0.0) {
        return report(BlowupKind::Positivity, k, gas.sound_speed_sq(state.theta[k]));
    }
    let (g, k) = max_gradient(state, grid);
    if g > monitor.factor * monitor.initial_gradient {
        return report(BlowupKind::Gradient, k, g);
    }
    None
}
