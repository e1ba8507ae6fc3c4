//! Residuals of the vorticity transport equation
//! `w_t + αw + u·∇w + w div u = 0` and of the damped wave equation
//! `θ_tt + αθ_t - Δθ = Q(θ, u)`, evaluated on stored solver states.
//!
//! Time derivatives use three consecutive stored levels (the last three in
//! the history), so the checks never call the solver right-hand side.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::Grid2D;
use super::state::{vorticity, FlowState2D};
use super::stencil::{d1, d12, d2, Axis};
use crate::damping::{DampingLaw, GasLaw};
use crate::error::{Error, Result};

/// Weights `(c0, c1, c2)` of the three-point first and second derivatives at
/// the middle of `t0 < t1 < t2`.
pub fn three_point_weights(t0: f64, t1: f64, t2: f64) -> ([f64; 3], [f64; 3]) {
    let (h0, h1) = (t1 - t0, t2 - t1);
    let s = h0 + h1;
    (
        [-h1 / (h0 * s), (h1 - h0) / (h0 * h1), h0 / (h1 * s)],
        [2.0 / (h0 * s), -2.0 / (h0 * h1), 2.0 / (h1 * s)],
    )
}

/// Weights of the first and second derivatives at `at` from values at
/// `t0 < t1 < t2` (derivatives of the interpolating quadratic).
pub fn three_point_weights_at(t: [f64; 3], at: f64) -> ([f64; 3], [f64; 3]) {
    let mut d = [0.0; 3];
    let mut dd = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let denom = (t[i] - t[j]) * (t[i] - t[k]);
        d[i] = ((at - t[j]) + (at - t[k])) / denom;
        dd[i] = 2.0 / denom;
    }
    (d, dd)
}

pub(crate) fn combine(w: &[f64; 3], f: [&[f64]; 3]) -> Vec<f64> {
    f[0].par_iter()
        .zip(f[1].par_iter())
        .zip(f[2].par_iter())
        .map(|((a, b), c)| w[0] * a + w[1] * b + w[2] * c)
        .collect()
}

fn last_three(history: &[FlowState2D]) -> Result<[&FlowState2D; 3]> {
    let n = history.len();
    if n < 3 {
        return Err(Error::InsufficientHistory { needed: 3, have: n });
    }
    Ok([&history[n - 3], &history[n - 2], &history[n - 1]])
}

/// Vorticity residual at the middle of the last three stored levels.
pub fn vorticity_residual(history: &[FlowState2D], law: &DampingLaw, grid: &Grid2D) -> Result<Vec<f64>> {
    let [s0, s1, s2] = last_three(history)?;
    let (dt, _) = three_point_weights(s0.t, s1.t, s2.t);
    let w: Vec<Vec<f64>> = [s0, s1, s2].iter().map(|s| vorticity(s, grid)).collect();
    let w_t = combine(&dt, [&w[0], &w[1], &w[2]]);
    let wm = &w[1];
    let wx = d1(wm, grid, Axis::X1);
    let wy = d1(wm, grid, Axis::X2);
    let div: Vec<f64> = d1(&s1.u1, grid, Axis::X1)
        .iter()
        .zip(&d1(&s1.u2, grid, Axis::X2))
        .map(|(a, b)| a + b)
        .collect();
    let alpha = law.alpha(s1.t);
    Ok((0..grid.len())
        .into_par_iter()
        .map(|k| w_t[k] + alpha * wm[k] + s1.u1[k] * wx[k] + s1.u2[k] * wy[k] + wm[k] * div[k])
        .collect())
}

/// Individual terms of `Q = Q₁ + Q₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QTerm {
    /// `(γ-1)θΔθ`
    ThetaLaplacian,
    /// `-α u·∇θ`
    DampedAdvection,
    /// `-2u·∇θ_t`
    MixedAdvection,
    /// `-Σ uᵢuⱼ∂ᵢⱼθ`
    Hessian,
    /// `-Σ uᵢ∂ᵢuⱼ∂ⱼθ`
    Convective,
    /// `-u_t·∇θ`
    Acceleration,
    /// `(1+(γ-1)θ)Σ∂ᵢuⱼ∂ⱼuᵢ`
    Strain,
    /// `(1+(γ-1)θ)(γ-1)|div u|²`
    Compression,
}

impl QTerm {
    pub const ALL: [QTerm; 8] = [
        QTerm::ThetaLaplacian,
        QTerm::DampedAdvection,
        QTerm::MixedAdvection,
        QTerm::Hessian,
        QTerm::Convective,
        QTerm::Acceleration,
        QTerm::Strain,
        QTerm::Compression,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            QTerm::ThetaLaplacian => "theta_laplacian",
            QTerm::DampedAdvection => "damped_advection",
            QTerm::MixedAdvection => "mixed_advection",
            QTerm::Hessian => "hessian",
            QTerm::Convective => "convective",
            QTerm::Acceleration => "acceleration",
            QTerm::Strain => "strain",
            QTerm::Compression => "compression",
        }
    }
}

/// `θ_tt + αθ_t - Δθ - Q` at the middle of the last three stored levels.
/// `flip` negates one term of `Q`; it exists to check that the residual
/// notices a wrong sign.
pub fn wave_residual_with(
    history: &[FlowState2D],
    law: &DampingLaw,
    gas: &GasLaw,
    grid: &Grid2D,
    flip: Option<QTerm>,
) -> Result<Vec<f64>> {
    let [s0, s1, s2] = last_three(history)?;
    let (d_t, d_tt) = three_point_weights(s0.t, s1.t, s2.t);
    let th_t = combine(&d_t, [&s0.theta, &s1.theta, &s2.theta]);
    let th_tt = combine(&d_tt, [&s0.theta, &s1.theta, &s2.theta]);
    let u1_t = combine(&d_t, [&s0.u1, &s1.u1, &s2.u1]);
    let u2_t = combine(&d_t, [&s0.u2, &s1.u2, &s2.u2]);

    let th = &s1.theta;
    let (u1, u2) = (&s1.u1, &s1.u2);
    let tx = d1(th, grid, Axis::X1);
    let ty = d1(th, grid, Axis::X2);
    let txx = d2(th, grid, Axis::X1);
    let tyy = d2(th, grid, Axis::X2);
    let txy = d12(th, grid);
    let ttx = d1(&th_t, grid, Axis::X1);
    let tty = d1(&th_t, grid, Axis::X2);
    let u1x = d1(u1, grid, Axis::X1);
    let u1y = d1(u1, grid, Axis::X2);
    let u2x = d1(u2, grid, Axis::X1);
    let u2y = d1(u2, grid, Axis::X2);

    let alpha = law.alpha(s1.t);
    let gm1 = gas.gamma() - 1.0;
    let sign = |term: QTerm| if flip == Some(term) { -1.0 } else { 1.0 };
    let signs: Vec<f64> = QTerm::ALL.iter().map(|&t| sign(t)).collect();

    Ok((0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (a, b) = (u1[k], u2[k]);
            let lap = txx[k] + tyy[k];
            let div = u1x[k] + u2y[k];
            let c2 = 1.0 + gm1 * th[k];
            let terms = [
                gm1 * th[k] * lap,
                -alpha * (a * tx[k] + b * ty[k]),
                -2.0 * (a * ttx[k] + b * tty[k]),
                -(a * a * txx[k] + 2.0 * a * b * txy[k] + b * b * tyy[k]),
                -(a * (u1x[k] * tx[k] + u2x[k] * ty[k]) + b * (u1y[k] * tx[k] + u2y[k] * ty[k])),
                -(u1_t[k] * tx[k] + u2_t[k] * ty[k]),
                c2 * (u1x[k] * u1x[k] + 2.0 * u1y[k] * u2x[k] + u2y[k] * u2y[k]),
                c2 * gm1 * div * div,
            ];
            let q: f64 = terms.iter().zip(&signs).map(|(t, s)| t * s).sum();
            th_tt[k] + alpha * th_t[k] - lap - q
        })
        .collect())
}

pub fn wave_residual(history: &[FlowState2D], law: &DampingLaw, gas: &GasLaw, grid: &Grid2D) -> Result<Vec<f64>> {
    wave_residual_with(history, law, gas, grid, None)
}
