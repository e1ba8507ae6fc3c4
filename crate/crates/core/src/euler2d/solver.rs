//! Method-of-lines solver for
//! `θ_t + u·∇θ + (1+(γ-1)θ) div u = 0`, `u_t + α(t)u + u·∇u + ∇θ = 0`
//! with fourth-order central differences, sixth-order hyperviscosity and
//! the classical four-stage Runge–Kutta method.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::Grid2D;
use super::state::FlowState2D;
use super::stencil::{d1_into, hyperviscosity_into, Axis};
use crate::damping::{DampingLaw, GasLaw};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub cfl: f64,
    /// Hyperviscosity coefficient `σ` in `σh⁵∇⁶`.
    pub sigma: f64,
    /// Initial support radius `M`; when set, fields are zeroed outside
    /// `t + M + 4h` after every step.
    pub support_radius: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            sigma: 0.01,
            support_radius: None,
        }
    }
}

/// Right-hand side fields `(θ_t, u₁_t, u₂_t)`.
#[derive(Debug, Clone)]
pub struct Rates {
    pub theta: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

pub struct Solver {
    pub grid: Grid2D,
    pub law: DampingLaw,
    pub gas: GasLaw,
    pub config: SolverConfig,
    scratch: Vec<Vec<f64>>,
}

impl Solver {
    pub fn new(grid: Grid2D, law: DampingLaw, gas: GasLaw, config: SolverConfig) -> Result<Self> {
        if !(config.cfl > 0.0 && config.cfl <= 1.0) {
            return Err(Error::param("cfl", format!("must lie in (0, 1], got {}", config.cfl)));
        }
        if !(config.sigma >= 0.0) {
            return Err(Error::param("sigma", format!("must be non-negative, got {}", config.sigma)));
        }
        let n = grid.len();
        Ok(Self {
            grid,
            law,
            gas,
            config,
            scratch: vec![vec![0.0; n]; 8],
        })
    }

    pub fn rates_zeroed(&self) -> Rates {
        let n = self.grid.len();
        Rates {
            theta: vec![0.0; n],
            u1: vec![0.0; n],
            u2: vec![0.0; n],
        }
    }

    /// Evaluates the right-hand side at `state`, writing into `out`.
    pub fn rhs_into(&mut self, state: &FlowState2D, out: &mut Rates) {
        let g = self.grid;
        let alpha = self.law.alpha(state.t);
        let gm1 = self.gas.gamma() - 1.0;
        let sigma = self.config.sigma;
        let [tx, ty, ax, ay, bx, by, hv, hs] = &mut self.scratch[..] else {
            unreachable!("scratch has eight buffers")
        };
        d1_into(&state.theta, &g, Axis::X1, tx);
        d1_into(&state.theta, &g, Axis::X2, ty);
        d1_into(&state.u1, &g, Axis::X1, ax);
        d1_into(&state.u1, &g, Axis::X2, ay);
        d1_into(&state.u2, &g, Axis::X1, bx);
        d1_into(&state.u2, &g, Axis::X2, by);
        (&mut out.theta, &mut out.u1, &mut out.u2)
            .into_par_iter()
            .enumerate()
            .for_each(|(k, (rt, r1, r2))| {
                let (th, u, v) = (state.theta[k], state.u1[k], state.u2[k]);
                let div = ax[k] + by[k];
                *rt = -(u * tx[k] + v * ty[k] + (1.0 + gm1 * th) * div);
                *r1 = -(alpha * u + u * ax[k] + v * ay[k] + tx[k]);
                *r2 = -(alpha * v + u * bx[k] + v * by[k] + ty[k]);
            });
        if sigma > 0.0 {
            for (field, rate) in [
                (&state.theta, &mut out.theta),
                (&state.u1, &mut out.u1),
                (&state.u2, &mut out.u2),
            ] {
                hyperviscosity_into(field, &g, sigma, hv, hs);
                rate.par_iter_mut().zip(hv.par_iter()).for_each(|(r, d)| *r += d);
            }
        }
    }

    pub fn rhs(&mut self, state: &FlowState2D) -> Rates {
        let mut out = self.rates_zeroed();
        self.rhs_into(state, &mut out);
        out
    }

    /// Largest `|u| + c` over the grid, `NaN` if any cell is non-finite.
    pub fn max_wave_speed(&self, state: &FlowState2D) -> f64 {
        let gm1 = self.gas.gamma() - 1.0;
        let partial: Vec<f64> = state
            .theta
            .par_chunks(self.grid.n)
            .zip(state.u1.par_chunks(self.grid.n))
            .zip(state.u2.par_chunks(self.grid.n))
            .map(|((th, u), v)| {
                let mut m = 0.0f64;
                for k in 0..th.len() {
                    let c2 = 1.0 + gm1 * th[k];
                    let s = (u[k] * u[k] + v[k] * v[k]).sqrt() + c2.max(0.0).sqrt();
                    if !s.is_finite() {
                        return f64::NAN;
                    }
                    m = m.max(s);
                }
                m
            })
            .collect();
        partial.iter().fold(0.0, |m, &s| if s.is_nan() || m.is_nan() { f64::NAN } else { m.max(s) })
    }

    /// `cfl·h / max(|u|+c)`.
    pub fn stable_dt(&self, state: &FlowState2D) -> f64 {
        self.config.cfl * self.grid.h / self.max_wave_speed(state)
    }

    /// One Runge–Kutta step of size `dt`.
    pub fn step(&mut self, state: &FlowState2D, dt: f64) -> Result<FlowState2D> {
        let limit = self.stable_dt(state);
        if limit.is_finite() && dt > limit * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, limit });
        }
        let mut k1 = self.rates_zeroed();
        let mut k2 = self.rates_zeroed();
        let mut k3 = self.rates_zeroed();
        let mut k4 = self.rates_zeroed();
        self.rhs_into(state, &mut k1);
        let s2 = axpy(state, &k1, 0.5 * dt);
        self.rhs_into(&s2, &mut k2);
        let s3 = axpy(state, &k2, 0.5 * dt);
        self.rhs_into(&s3, &mut k3);
        let s4 = axpy(state, &k3, dt);
        self.rhs_into(&s4, &mut k4);
        let combine = |y: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
            y.par_iter()
                .enumerate()
                .map(|(k, &y)| y + dt / 6.0 * (a[k] + 2.0 * b[k] + 2.0 * c[k] + d[k]))
                .collect()
        };
        let mut next = FlowState2D {
            t: state.t + dt,
            theta: combine(&state.theta, &k1.theta, &k2.theta, &k3.theta, &k4.theta),
            u1: combine(&state.u1, &k1.u1, &k2.u1, &k3.u1, &k4.u1),
            u2: combine(&state.u2, &k1.u2, &k2.u2, &k3.u2, &k4.u2),
        };
        if let Some(m) = self.config.support_radius {
            self.clamp_support(&mut next, m);
        }
        Ok(next)
    }

    /// Zeroes all fields outside radius `t + M + 4h`.
    pub fn clamp_support(&self, state: &mut FlowState2D, m: f64) {
        let g = self.grid;
        let r = state.t + m + 4.0 * g.h;
        let r2 = r * r;
        for field in [&mut state.theta, &mut state.u1, &mut state.u2] {
            field.par_chunks_mut(g.n).enumerate().for_each(|(j, row)| {
                let y = g.coord(j);
                for (i, v) in row.iter_mut().enumerate() {
                    let x = g.coord(i);
                    if x * x + y * y > r2 {
                        *v = 0.0;
                    }
                }
            });
        }
    }
}

fn axpy(state: &FlowState2D, k: &Rates, a: f64) -> FlowState2D {
    let f = |y: &[f64], d: &[f64]| -> Vec<f64> { y.par_iter().zip(d.par_iter()).map(|(y, d)| y + a * d).collect() };
    FlowState2D {
        t: state.t + a,
        theta: f(&state.theta, &k.theta),
        u1: f(&state.u1, &k.u1),
        u2: f(&state.u2, &k.u2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: usize, half: f64) -> Solver {
        let g = Grid2D::new(half, n).unwrap();
        let law = DampingLaw::new(1.0, 0.5).unwrap();
        let gas = GasLaw::new(1.4, 1.0).unwrap();
        Solver::new(g, law, gas, SolverConfig::default()).unwrap()
    }

    #[test]
    fn zero_state_is_stationary() {
        let mut s = setup(32, 4.0);
        let z = FlowState2D::zeros(&s.grid);
        let r = s.rhs(&z);
        assert!(r.theta.iter().chain(&r.u1).chain(&r.u2).all(|&v| v == 0.0));
        let next = s.step(&z, 0.1).unwrap();
        assert!(next.theta.iter().all(|&v| v == 0.0));
        assert_eq!(next.t, 0.1);
    }

    #[test]
    fn plateau_interior_is_stationary() {
        let mut s = setup(64, 4.0);
        let mut st = FlowState2D::zeros(&s.grid);
        st.theta = vec![0.3; s.grid.len()];
        let r = s.rhs(&st);
        let g = s.grid;
        for j in 8..56 {
            for i in 8..56 {
                let k = g.idx(i, j);
                assert!(r.theta[k].abs() < 1e-14 && r.u1[k].abs() < 1e-14 && r.u2[k].abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rhs_matches_hand_derivation_on_polynomial_window() {
        // θ = a + b x + c y², u = (d y, e x): in the interior the fourth-order
        // stencils are exact for these polynomials.
        let mut s = setup(64, 4.0);
        s.config.sigma = 0.0;
        let g = s.grid;
        let (a, b, c, d, e) = (0.1, 0.02, -0.01, 0.05, 0.03);
        let mut st = FlowState2D::zeros(&g);
        st.t = 2.0;
        st.theta = g.sample(|x, y| a + b * x + c * y * y);
        st.u1 = g.sample(|_, y| d * y);
        st.u2 = g.sample(|x, _| e * x);
        let r = s.rhs(&st);
        let alpha = s.law.alpha(2.0);
        for j in 8..56 {
            for i in 8..56 {
                let (x, y) = (g.coord(i), g.coord(j));
                let k = g.idx(i, j);
                let th_t = -(d * y * b + e * x * 2.0 * c * y);
                let u1_t = -(alpha * d * y + e * x * d + b);
                let u2_t = -(alpha * e * x + d * y * e + 2.0 * c * y);
                assert!((r.theta[k] - th_t).abs() < 1e-13);
                assert!((r.u1[k] - u1_t).abs() < 1e-13);
                assert!((r.u2[k] - u2_t).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn cfl_violation_is_rejected() {
        let mut s = setup(32, 4.0);
        let z = FlowState2D::zeros(&s.grid);
        let limit = s.stable_dt(&z);
        assert!((limit - 0.4 * s.grid.h).abs() < 1e-15);
        assert!(matches!(s.step(&z, 2.0 * limit), Err(Error::CflViolation { .. })));
    }
}
