//! Discrete energies of solver output, truncated to order `k ≤ 2`:
//!
//! * `𝓔_k[Φ] = (1+t)^λ Σ_{1≤|α|+j≤k} ‖∂_t^j ∂^α Φ‖ + ‖Φ‖`
//! * `E_k[Φ] = (1+t)^{1/2} Σ_{|α|≤k-1} ‖∂Z^αΦ‖ + (1+t)^{-1/2}‖Φ‖`
//!
//! summed over `Φ ∈ {θ, u₁, u₂}`. Time derivatives come from three stored
//! levels, space derivatives from the fourth-order stencils.

use rayon::prelude::*;

use super::zfields::{PointJet, VectorField};
use crate::damping::DampingLaw;
use crate::error::{Error, Result};
use crate::euler2d::residual::{combine, three_point_weights_at};
use crate::euler2d::stencil::{d1, d12, d2, l2_norm, row_sums, Axis};
use crate::euler2d::{FlowState2D, Grid2D};

pub const MAX_ORDER: usize = 2;

/// `σ₋(t,x) = √(1 + (|x| - t)²)`.
pub fn sigma_minus(t: f64, x: &[f64]) -> f64 {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    (1.0 + (r - t) * (r - t)).sqrt()
}

/// Space-time derivatives up to second order of one field at the observed
/// level.
pub struct FieldJets {
    pub t: f64,
    pub v: Vec<f64>,
    pub dt: Vec<f64>,
    pub dtt: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub dt1: Vec<f64>,
    pub dt2: Vec<f64>,
    pub d11: Vec<f64>,
    pub d12: Vec<f64>,
    pub d22: Vec<f64>,
}

impl FieldJets {
    pub fn new(levels: [&[f64]; 3], times: [f64; 3], center: usize, grid: &Grid2D) -> Self {
        let at = times[center];
        let (w1, w2) = three_point_weights_at(times, at);
        let v = levels[center].to_vec();
        let dt = combine(&w1, levels);
        let dtt = combine(&w2, levels);
        Self {
            t: at,
            d1: d1(&v, grid, Axis::X1),
            d2: d1(&v, grid, Axis::X2),
            dt1: d1(&dt, grid, Axis::X1),
            dt2: d1(&dt, grid, Axis::X2),
            d11: d2(&v, grid, Axis::X1),
            d12: d12(&v, grid),
            d22: d2(&v, grid, Axis::X2),
            v,
            dt,
            dtt,
        }
    }

    pub fn point(&self, k: usize, grid: &Grid2D) -> PointJet {
        let (x1, x2) = grid.point(k);
        PointJet {
            p: [self.t, x1, x2],
            v: self.v[k],
            g: [self.dt[k], self.d1[k], self.d2[k]],
            h: [
                [self.dtt[k], self.dt1[k], self.dt2[k]],
                [self.dt1[k], self.d11[k], self.d12[k]],
                [self.dt2[k], self.d12[k], self.d22[k]],
            ],
        }
    }
}

fn check(history: &[FlowState2D], center: usize, k: usize) -> Result<()> {
    if history.len() < 3 {
        return Err(Error::InsufficientHistory {
            needed: 3,
            have: history.len(),
        });
    }
    if center > 2 {
        return Err(Error::param("center", format!("must index one of three levels, got {center}")));
    }
    if k > MAX_ORDER {
        return Err(Error::param("k", format!("energies are truncated to k <= {MAX_ORDER}, got {k}")));
    }
    Ok(())
}

fn jets(history: &[FlowState2D], center: usize, grid: &Grid2D) -> [FieldJets; 3] {
    let h = &history[history.len() - 3..];
    let times = [h[0].t, h[1].t, h[2].t];
    [
        FieldJets::new([&h[0].theta, &h[1].theta, &h[2].theta], times, center, grid),
        FieldJets::new([&h[0].u1, &h[1].u1, &h[2].u1], times, center, grid),
        FieldJets::new([&h[0].u2, &h[1].u2, &h[2].u2], times, center, grid),
    ]
}

/// `𝓔_k[θ, u₁, u₂]` at the level `history[center]` of the last three levels.
pub fn energy_cal_e(history: &[FlowState2D], center: usize, k: usize, law: &DampingLaw, grid: &Grid2D) -> Result<f64> {
    check(history, center, k)?;
    let jets = jets(history, center, grid);
    let weight = (1.0 + jets[0].t).powf(law.lambda());
    Ok(jets
        .iter()
        .map(|j| {
            let mut derivs: Vec<&[f64]> = Vec::new();
            if k >= 1 {
                derivs.extend([&j.d1[..], &j.d2, &j.dt]);
            }
            if k >= 2 {
                derivs.extend([&j.d11[..], &j.d12, &j.d22, &j.dt1, &j.dt2, &j.dtt]);
            }
            weight * derivs.iter().map(|f| l2_norm(f, grid)).sum::<f64>() + l2_norm(&j.v, grid)
        })
        .sum())
}

/// `‖∂(ZΦ)‖` for each of the seven fields, with `‖∂F‖² = ∫ F_t² + |∇F|²`.
pub fn z_gradient_norms(j: &FieldJets, grid: &Grid2D) -> [f64; 7] {
    let mut out = [0.0; 7];
    for (o, z) in out.iter_mut().zip(VectorField::ALL) {
        let sq: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let d = j.point(k, grid).grad_apply(z);
                d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
            })
            .collect();
        *o = (grid.cell_area() * row_sums(&sq, grid.n, |v| v)).sqrt();
    }
    out
}

/// `E_k[θ, u₁, u₂]` at the level `history[center]` of the last three levels.
pub fn energy_e(history: &[FlowState2D], center: usize, k: usize, grid: &Grid2D) -> Result<f64> {
    check(history, center, k)?;
    let jets = jets(history, center, grid);
    let t = jets[0].t;
    Ok(jets
        .iter()
        .map(|j| {
            let mut sum = 0.0;
            if k >= 1 {
                let sq: Vec<f64> = (0..grid.len()).map(|m| j.dt[m] * j.dt[m] + j.d1[m] * j.d1[m] + j.d2[m] * j.d2[m]).collect();
                sum += (grid.cell_area() * row_sums(&sq, grid.n, |v| v)).sqrt();
            }
            if k >= 2 {
                sum += z_gradient_norms(j, grid).iter().sum::<f64>();
            }
            (1.0 + t).sqrt() * sum + l2_norm(&j.v, grid) / (1.0 + t).sqrt()
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levels(g: &Grid2D, f: impl Fn(f64, f64, f64) -> f64 + Sync, times: [f64; 3]) -> Vec<FlowState2D> {
        times
            .iter()
            .map(|&t| FlowState2D {
                t,
                theta: g.sample(|x, y| f(t, x, y)),
                u1: vec![0.0; g.len()],
                u2: vec![0.0; g.len()],
            })
            .collect()
    }

    #[test]
    fn sigma_minus_values() {
        assert_eq!(sigma_minus(0.0, &[0.0, 0.0]), 1.0);
        assert_eq!(sigma_minus(3.0, &[3.0, 0.0]), 1.0);
        assert!((sigma_minus(0.0, &[0.6, 0.8]) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_state_has_zero_energies_and_k0_is_the_norm() {
        let g = Grid2D::new(4.0, 32).unwrap();
        let law = DampingLaw::new(1.0, 0.5).unwrap();
        let z = levels(&g, |_, _, _| 0.0, [0.0, 0.1, 0.2]);
        assert_eq!(energy_cal_e(&z, 1, 2, &law, &g).unwrap(), 0.0);
        assert_eq!(energy_e(&z, 1, 2, &g).unwrap(), 0.0);
        let h = levels(&g, |t, x, y| (1.0 + t) * (-(x * x + y * y)).exp(), [0.0, 0.1, 0.2]);
        let norm = l2_norm(&h[1].theta, &g);
        assert_eq!(energy_cal_e(&h, 1, 0, &law, &g).unwrap(), norm);
        assert!((energy_e(&h, 1, 0, &g).unwrap() - norm / 1.1f64.sqrt()).abs() < 1e-15);
        assert!(energy_cal_e(&h, 1, 3, &law, &g).is_err());
        assert!(energy_e(&h[..2], 1, 1, &g).is_err());
    }

    #[test]
    fn rotation_annihilates_static_radial_fields() {
        let err = |n: usize| {
            let g = Grid2D::new(5.0, n).unwrap();
            let h = levels(&g, |_, x, y| (-(x * x + y * y)).exp(), [0.9, 1.0, 1.1]);
            let j = FieldJets::new([&h[0].theta, &h[1].theta, &h[2].theta], [0.9, 1.0, 1.1], 1, &g);
            let norms = z_gradient_norms(&j, &g);
            (norms[4], norms[1])
        };
        let (r1, d1) = err(64);
        let (r2, _) = err(128);
        assert!(r1 < 1e-3 * d1, "{r1} {d1}");
        assert!(r1 / r2 > 12.0, "{r1} {r2}");
    }

    #[test]
    fn time_derivatives_at_the_initial_level_are_one_sided_but_exact_on_quadratics() {
        let g = Grid2D::new(3.0, 16).unwrap();
        let h = levels(&g, |t, _, _| 1.0 + 2.0 * t + 3.0 * t * t, [0.0, 0.2, 0.5]);
        let j = FieldJets::new([&h[0].theta, &h[1].theta, &h[2].theta], [0.0, 0.2, 0.5], 0, &g);
        assert!((j.dt[0] - 2.0).abs() < 1e-12 && (j.dtt[0] - 6.0).abs() < 1e-11);
    }
}
