//! The blowup functional `F(t) = ∫₀ᵗ (t-τ) ∫_{τ+M₀}^{τ+M} P(τ,l) dl/√l dτ`
//! and the ratios that monitor its differential inequalities.

use serde::Serialize;

use crate::damping::{Case, CaseLabel};
use crate::error::{Error, Result};

/// Number of intervals of the default strip grid.
pub const STRIP_INTERVALS: usize = 64;

/// Uniform grid on `[t+M₀, t+M]` with `intervals` cells.
pub fn strip_grid(t: f64, m0: f64, m: f64, intervals: usize) -> Vec<f64> {
    let w = (m - m0) / intervals as f64;
    (0..=intervals).map(|k| t + m0 + w * k as f64).collect()
}

/// `P(t,·)` sampled on a strip grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripSample {
    pub t: f64,
    pub l: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FSeries {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
}

/// `F″(t) = ∫_{t+M₀}^{t+M} P(t,l) dl/√l` by the composite Simpson rule
/// (trapezoid when the interval count is odd).
fn strip_integral(s: &StripSample) -> f64 {
    let n = s.l.len() - 1;
    let w = (s.l[n] - s.l[0]) / n as f64;
    let g: Vec<f64> = s.l.iter().zip(&s.p).map(|(l, p)| p / l.sqrt()).collect();
    if n % 2 == 0 {
        let mut acc = g[0] + g[n];
        for (k, v) in g.iter().enumerate().take(n).skip(1) {
            acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        acc * w / 3.0
    } else {
        (g.iter().sum::<f64>() - 0.5 * (g[0] + g[n])) * w
    }
}

/// `F″` from the strip identity, then `F′` and `F` by cumulative trapezoids
/// from `F(0) = F′(0) = 0`. The first sample must be at `t = 0`.
pub fn f_functional(samples: &[StripSample], m0: f64, m: f64) -> Result<FSeries> {
    if !(m0 < m && m0 > 0.0) {
        return Err(Error::param("M0", format!("need 0 < M0 < M, got M0 = {m0}, M = {m}")));
    }
    let Some(first) = samples.first() else {
        return Err(Error::param("samples", "empty P series"));
    };
    if first.t != 0.0 {
        return Err(Error::param("samples", format!("series must start at t = 0, starts at {}", first.t)));
    }
    let required = (m - m0) / STRIP_INTERVALS as f64;
    for s in samples {
        let n = s.l.len();
        if n < 2 || s.p.len() != n {
            return Err(Error::param("samples", format!("malformed strip sample at t = {}", s.t)));
        }
        let spacing = (s.l[n - 1] - s.l[0]) / (n - 1) as f64;
        if spacing > required * (1.0 + 1e-9) {
            return Err(Error::SparseGrid { spacing, required });
        }
        let tol = 1e-9 * (1.0 + s.t + m);
        if (s.l[0] - (s.t + m0)).abs() > tol || (s.l[n - 1] - (s.t + m)).abs() > tol {
            return Err(Error::param("samples", format!("l-grid at t = {} does not span [t+M0, t+M]", s.t)));
        }
    }
    let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let f2: Vec<f64> = samples.iter().map(strip_integral).collect();
    let mut f1 = vec![0.0; t.len()];
    let mut f = vec![0.0; t.len()];
    for k in 1..t.len() {
        let dt = t[k] - t[k - 1];
        f1[k] = f1[k - 1] + 0.5 * dt * (f2[k] + f2[k - 1]);
        f[k] = f[k - 1] + 0.5 * dt * (f1[k] + f1[k - 1]);
    }
    Ok(FSeries { t, f, f1, f2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeRow {
    pub t: f64,
    /// `F″(t)(t+M)/ε`.
    pub linear: f64,
    /// `F″(t)(t+M)³log(t/M+1)/F²` (γ ≥ 2).
    pub quadratic: Option<f64>,
    /// `F″(t)(t+M)^{1+γ}log^{γ/2}(t/M+1)/F^γ` (1 < γ < 2).
    pub power: Option<f64>,
    /// Inside the monitored window.
    pub in_window: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeReport {
    pub rows: Vec<OdeRow>,
    /// Start and end of the monitored window.
    pub window: (f64, f64),
    pub linear_inf: f64,
    pub nonlinear_inf: f64,
}

impl OdeReport {
    pub fn holds(&self) -> bool {
        self.linear_inf > 0.0 && self.nonlinear_inf > 0.0 && self.linear_inf.is_finite() && self.nonlinear_inf.is_finite()
    }
}

/// Ratios of `F″` to the right sides of its lower bounds. The window starts
/// at `Me²` for γ ≥ 2 and at `Me` for 1 < γ < 2, and ends at `t_stop`.
/// Only the blowup cases are monitored.
pub fn monitor_ode_inequalities(fs: &FSeries, eps: f64, m: f64, gamma: f64, label: CaseLabel, t_stop: f64) -> Result<OdeReport> {
    if !matches!(label.case, Case::Case3 | Case::Case4) {
        return Err(Error::WrongRegime(format!("{} is a global-existence case", label.case)));
    }
    if !(gamma > 1.0) {
        return Err(Error::param("gamma", format!("must exceed 1, got {gamma}")));
    }
    let quadratic_branch = gamma >= 2.0;
    let t_start = if quadratic_branch { m * std::f64::consts::E.powi(2) } else { m * std::f64::consts::E };
    let mut rows = Vec::with_capacity(fs.t.len());
    let (mut linear_inf, mut nonlinear_inf) = (f64::INFINITY, f64::INFINITY);
    for k in 0..fs.t.len() {
        let (t, f, f2) = (fs.t[k], fs.f[k], fs.f2[k]);
        let tm = t + m;
        let log = (t / m + 1.0).ln();
        let linear = f2 * tm / eps;
        let nonlinear = if f > 0.0 {
            if quadratic_branch {
                f2 * tm.powi(3) * log / (f * f)
            } else {
                f2 * tm.powf(1.0 + gamma) * log.powf(gamma / 2.0) / f.powf(gamma)
            }
        } else {
            f64::NAN
        };
        let in_window = t >= t_start && t <= t_stop;
        if in_window {
            linear_inf = linear_inf.min(linear);
            nonlinear_inf = if nonlinear.is_nan() { f64::NAN } else { nonlinear_inf.min(nonlinear) };
        }
        rows.push(OdeRow {
            t,
            linear,
            quadratic: quadratic_branch.then_some(nonlinear),
            power: (!quadratic_branch).then_some(nonlinear),
            in_window,
        });
    }
    Ok(OdeReport {
        rows,
        window: (t_start, t_stop),
        linear_inf,
        nonlinear_inf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::damping::{classify_case, DampingLaw};

    fn samples(p: impl Fn(f64, f64) -> f64, dt: f64, steps: usize, m0: f64, m: f64) -> Vec<StripSample> {
        (0..=steps)
            .map(|k| {
                let t = k as f64 * dt;
                let l = strip_grid(t, m0, m, STRIP_INTERVALS);
                let p = l.iter().map(|&l| p(t, l)).collect();
                StripSample { t, l, p }
            })
            .collect()
    }

    #[test]
    fn zero_p_gives_zero_f() {
        let fs = f_functional(&samples(|_, _| 0.0, 0.5, 10, 0.5, 1.0), 0.5, 1.0).unwrap();
        assert!(fs.f.iter().chain(&fs.f1).chain(&fs.f2).all(|&v| v == 0.0));
    }

    #[test]
    fn starts_at_rest_and_integrates_consistently() {
        let (m0, m) = (0.5, 1.0);
        let dt = 0.05;
        let fs = f_functional(&samples(|t, l| (1.0 + t).sin() * (l - t), dt, 200, m0, m), m0, m).unwrap();
        assert_eq!((fs.f[0], fs.f1[0]), (0.0, 0.0));
        // Second differences of F recover F″ to O(Δt²).
        let mut worst = 0.0f64;
        for k in 1..fs.t.len() - 1 {
            let dd = (fs.f[k + 1] - 2.0 * fs.f[k] + fs.f[k - 1]) / (dt * dt);
            worst = worst.max((dd - fs.f2[k]).abs());
        }
        assert!(worst < 2.0 * dt * dt, "{worst}");
        // F″ matches the closed form ∫(l-t)/√l dl with P = sin(1+t)(l-t).
        let t = fs.t[40];
        let (a, b) = (t + m0, t + m);
        let exact = (1.0 + t).sin() * ((2.0 / 3.0) * (b.powf(1.5) - a.powf(1.5)) - 2.0 * t * (b.sqrt() - a.sqrt()));
        assert!((fs.f2[40] - exact).abs() < 1e-10);
    }

    #[test]
    fn sparse_or_misplaced_grids_are_rejected() {
        let mut s = samples(|_, _| 1.0, 0.5, 2, 0.5, 1.0);
        s[1].l = strip_grid(0.5, 0.5, 1.0, 16);
        s[1].p = vec![1.0; 17];
        assert!(matches!(f_functional(&s, 0.5, 1.0), Err(Error::SparseGrid { .. })));
        let mut s = samples(|_, _| 1.0, 0.5, 2, 0.5, 1.0);
        s.remove(0);
        assert!(f_functional(&s, 0.5, 1.0).is_err());
    }

    #[test]
    fn monitor_declines_global_cases_and_windows_blowup_cases() {
        let fs = f_functional(&samples(|_, _| 1.0, 1.0, 30, 0.5, 1.0), 0.5, 1.0).unwrap();
        let case1 = classify_case(&DampingLaw::new(1.0, 0.5).unwrap(), 2).unwrap();
        assert!(matches!(
            monitor_ode_inequalities(&fs, 0.1, 1.0, 2.0, case1, 30.0),
            Err(Error::WrongRegime(_))
        ));
        let case4 = classify_case(&DampingLaw::new(1.0, 2.0).unwrap(), 2).unwrap();
        let r = monitor_ode_inequalities(&fs, 0.1, 1.0, 2.0, case4, 30.0).unwrap();
        assert!(r.rows.iter().filter(|row| row.in_window).all(|row| row.t >= std::f64::consts::E.powi(2)));
        assert!(r.holds());
        let r = monitor_ode_inequalities(&fs, 0.1, 1.0, 1.5, case4, 30.0).unwrap();
        assert!(r.rows[5].power.is_some() && r.rows[5].quadratic.is_none());
    }
}
