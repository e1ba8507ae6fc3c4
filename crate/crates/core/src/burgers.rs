//! Damped Burgers equation `v_t + v v_x = -α(t) v`: the exact solution by
//! characteristics, its lifespan, and a Godunov grid solver used to
//! cross-check both.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::damping::{integral_is_finite, xi_inverse_integral, xi_inverse_integral_log1p, DampingLaw};
use crate::error::{Error, Result};
use crate::numeric::{bracket_increasing, brent};

/// Closed-form compactly supported initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProfileFamily {
    /// `A·exp(1 - 1/(1-(x/M)²))`, even with peak `A` at the origin.
    Bump { amplitude: f64 },
    /// `A·(x/M)·exp(1 - 1/(1-(x/M)²))`, odd.
    OddBump { amplitude: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub x: f64,
    pub v0: f64,
    pub v0_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialProfile {
    pub family: ProfileFamily,
    pub support: f64,
    pub samples: Vec<ProfileSample>,
}

// (x/M) at which the unit bump has its steepest descent: 3^{-1/4}.
fn bump_steepest() -> f64 {
    3f64.powf(-0.25)
}

fn bump(y: f64) -> (f64, f64, f64) {
    // value and first two derivatives in y of exp(1 - 1/(1-y²))
    if y.abs() >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let q = 1.0 - y * y;
    let b = (1.0 - 1.0 / q).exp();
    let g1 = -2.0 * y / (q * q);
    let g2 = -2.0 / (q * q) - 8.0 * y * y / (q * q * q);
    (b, b * g1, b * (g1 * g1 + g2))
}

impl ProfileFamily {
    fn amplitude(&self) -> f64 {
        match *self {
            ProfileFamily::Bump { amplitude } | ProfileFamily::OddBump { amplitude } => amplitude,
        }
    }

    fn with_amplitude(&self, amplitude: f64) -> Self {
        match self {
            ProfileFamily::Bump { .. } => ProfileFamily::Bump { amplitude },
            ProfileFamily::OddBump { .. } => ProfileFamily::OddBump { amplitude },
        }
    }

    /// `(v0, v0')` at `x` for support radius `m`.
    pub fn eval(&self, x: f64, m: f64) -> (f64, f64) {
        let y = x / m;
        let (b, b1, _) = bump(y);
        match *self {
            ProfileFamily::Bump { amplitude } => (amplitude * b, amplitude * b1 / m),
            ProfileFamily::OddBump { amplitude } => (amplitude * y * b, amplitude * (b + y * b1) / m),
        }
    }

    fn slope_derivative(&self, x: f64, m: f64) -> f64 {
        let y = x / m;
        let (_, b1, b2) = bump(y);
        match *self {
            ProfileFamily::Bump { amplitude } => amplitude * b2 / (m * m),
            ProfileFamily::OddBump { amplitude } => amplitude * (2.0 * b1 + y * b2) / (m * m),
        }
    }

    /// Points where `v0'` attains its minimum (for positive amplitude).
    fn steepest_points(&self, m: f64) -> Result<Vec<f64>> {
        match self {
            ProfileFamily::Bump { .. } => Ok(vec![m * bump_steepest()]),
            ProfileFamily::OddBump { .. } => {
                let unit = ProfileFamily::OddBump { amplitude: 1.0 };
                // v0' is even; its minimum on (0, M) is a zero of v0''
                // between the positive peak at 0 and the support edge.
                let n = 2000;
                let xs: Vec<f64> = (1..n).map(|i| m * i as f64 / n as f64).collect();
                let k = (0..xs.len())
                    .min_by(|&a, &b| unit.eval(xs[a], m).1.total_cmp(&unit.eval(xs[b], m).1))
                    .expect("non-empty");
                let lo = xs[k.saturating_sub(1)];
                let hi = xs[(k + 1).min(xs.len() - 1)];
                let x = brent(|x| unit.slope_derivative(x, m), lo, hi, |_| 1e-15)?;
                Ok(vec![-x, x])
            }
        }
    }
}

impl InitialProfile {
    /// Samples `family` at `n` equispaced points of `[-M, M]` plus the
    /// analytic locations of the steepest negative slope.
    pub fn new(family: ProfileFamily, support: f64, n: usize) -> Result<Self> {
        if !(support > 0.0) {
            return Err(Error::param("support", format!("must be positive, got {support}")));
        }
        if family.amplitude() == 0.0 || !family.amplitude().is_finite() {
            return Err(Error::param("amplitude", "profile must not vanish identically"));
        }
        if n < 3 {
            return Err(Error::param("n", "need at least 3 samples"));
        }
        let mut xs: Vec<f64> = (0..n)
            .map(|i| -support + 2.0 * support * i as f64 / (n - 1) as f64)
            .collect();
        let steep = family.steepest_points(support)?;
        let sign = family.amplitude().signum();
        for x in steep {
            xs.push(sign * x);
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let samples = xs
            .into_iter()
            .map(|x| {
                let (v0, v0_prime) = family.eval(x, support);
                ProfileSample { x, v0, v0_prime }
            })
            .collect();
        Ok(Self {
            family,
            support,
            samples,
        })
    }

    /// Rescales the amplitude so that `min v0' = min_slope < 0`.
    pub fn slope_normalized(family: ProfileFamily, support: f64, min_slope: f64, n: usize) -> Result<Self> {
        if !(min_slope < 0.0) {
            return Err(Error::param("min_slope", format!("must be negative, got {min_slope}")));
        }
        let unit = Self::new(family.with_amplitude(1.0), support, n)?;
        let m = unit.min_slope();
        Self::new(family.with_amplitude(min_slope / m), support, n)
    }

    pub fn eval(&self, x: f64) -> (f64, f64) {
        self.family.eval(x, self.support)
    }

    /// `m = min v0'` over the samples.
    pub fn min_slope(&self) -> f64 {
        self.samples.iter().map(|s| s.v0_prime).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|s| s.v0.abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FanRecord {
    pub x0: f64,
    pub position: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacteristicFan {
    pub t: f64,
    pub records: Vec<FanRecord>,
}

/// Lifespan of the smooth solution. Finite times are stored as `ln(1+T)`
/// because some laws (e.g. `λ = μ = 1` at small `ε`) give `T = e^{1/ε|m|}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Lifespan {
    Global,
    Finite { log1p: f64 },
}

impl Lifespan {
    pub fn is_global(&self) -> bool {
        matches!(self, Lifespan::Global)
    }

    /// The blowup time, `+∞` when global or beyond the range of `f64`.
    pub fn time(&self) -> f64 {
        match *self {
            Lifespan::Global => f64::INFINITY,
            Lifespan::Finite { log1p } => log1p.exp_m1(),
        }
    }

    pub fn exceeds(&self, t: f64) -> bool {
        match *self {
            Lifespan::Global => true,
            Lifespan::Finite { log1p } => t.ln_1p() < log1p,
        }
    }
}

/// First time at which `1 + ε·m·I(T) = 0`, or global if `ε|m|I(∞) ≤ 1`.
pub fn lifespan_for_slope(eps: f64, m: f64, law: &DampingLaw) -> Result<Lifespan> {
    if !(eps > 0.0) {
        return Err(Error::param("eps", format!("must be positive, got {eps}")));
    }
    if !(m < 0.0) {
        return Ok(Lifespan::Global);
    }
    let target = 1.0 / (eps * m.abs());
    if integral_is_finite(law) && xi_inverse_integral(law, f64::INFINITY)? <= target {
        return Ok(Lifespan::Global);
    }
    let g = |s: f64| xi_inverse_integral_log1p(law, s).map(|v| v - target).unwrap_or(f64::NAN);
    let hi = bracket_increasing(g, 1.0, 1e300)?;
    let lo = if hi > 1.0 { 0.5 * hi } else { 0.0 };
    let s = brent(g, lo, hi, |s| 5e-11 * (-(-s).exp_m1()))?;
    Ok(Lifespan::Finite { log1p: s })
}

pub fn lifespan(profile: &InitialProfile, eps: f64, law: &DampingLaw) -> Result<Lifespan> {
    lifespan_for_slope(eps, profile.min_slope(), law)
}

pub fn evolve_fan(profile: &InitialProfile, eps: f64, law: &DampingLaw, t: f64) -> Result<CharacteristicFan> {
    let life = lifespan(profile, eps, law)?;
    if !life.exceeds(t) {
        return Err(Error::CharacteristicFold {
            t,
            lifespan: life.time(),
        });
    }
    let i_t = xi_inverse_integral(law, t)?;
    let xi_t = law.xi(t);
    let records = profile
        .samples
        .par_iter()
        .map(|s| FanRecord {
            x0: s.x,
            position: s.x + eps * s.v0 * i_t,
            value: eps * s.v0 / xi_t,
        })
        .collect();
    Ok(CharacteristicFan { t, records })
}

/// Exact solution `v(t, x)` before the lifespan, by inverting the
/// characteristic map `x0 ↦ x0 + ε v0(x0) I(t)`.
pub fn exact_value(profile: &InitialProfile, eps: f64, law: &DampingLaw, t: f64, x: f64) -> Result<f64> {
    let i_t = xi_inverse_integral(law, t)?;
    let reach = eps * profile.max_abs() * i_t + 1e-12;
    let map = |x0: f64| x0 + eps * profile.eval(x0).0 * i_t - x;
    let x0 = brent(map, x - reach, x + reach, |_| 1e-15)?;
    Ok(eps * profile.eval(x0).0 / law.xi(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// First-order Godunov with forward Euler.
    Godunov,
    /// Minmod-limited MUSCL reconstruction with the Godunov flux and Heun's
    /// method.
    Muscl,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridOptions {
    pub nx: usize,
    pub scheme: Scheme,
    pub cfl: f64,
    /// Blowup is flagged when the discrete slope exceeds this multiple of
    /// the initial maximum slope.
    pub slope_factor: f64,
    /// Half-width of the computational interval; chosen from the support
    /// and the characteristic reach when `None`.
    pub half_width: Option<f64>,
    pub snapshot_times: Vec<f64>,
    pub stop_at_blowup: bool,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            nx: 4096,
            scheme: Scheme::Muscl,
            cfl: 0.45,
            slope_factor: 10.0,
            half_width: None,
            snapshot_times: Vec::new(),
            stop_at_blowup: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRecord {
    pub t: f64,
    pub sup_v: f64,
    pub max_slope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSnapshot {
    pub t: f64,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSolution {
    pub x: Vec<f64>,
    pub dx: f64,
    pub series: Vec<GridRecord>,
    pub snapshots: Vec<GridSnapshot>,
    pub final_state: GridSnapshot,
    pub blowup_time: Option<f64>,
}

fn godunov_flux(vl: f64, vr: f64) -> f64 {
    let f = |v: f64| 0.5 * v * v;
    if vl <= vr {
        if vl > 0.0 {
            f(vl)
        } else if vr < 0.0 {
            f(vr)
        } else {
            0.0
        }
    } else {
        f(vl).max(f(vr))
    }
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Writes `-∂ₓ(v²/2)` discretised by `scheme` into `out`; zero data outside.
fn transport_rate(v: &[f64], dx: f64, scheme: Scheme, flux: &mut [f64], out: &mut [f64]) {
    let nx = v.len();
    let at = |i: isize| if i < 0 || i >= nx as isize { 0.0 } else { v[i as usize] };
    for (k, f) in flux.iter_mut().enumerate() {
        // interface between cells k-1 and k
        let (l, r) = (k as isize - 1, k as isize);
        let (vl, vr) = match scheme {
            Scheme::Godunov => (at(l), at(r)),
            Scheme::Muscl => {
                let sl = minmod(at(l) - at(l - 1), at(l + 1) - at(l));
                let sr = minmod(at(r) - at(r - 1), at(r + 1) - at(r));
                (at(l) + 0.5 * sl, at(r) - 0.5 * sr)
            }
        };
        *f = godunov_flux(vl, vr);
    }
    for i in 0..nx {
        out[i] = -(flux[i + 1] - flux[i]) / dx;
    }
}

fn max_slope(v: &[f64], dx: f64) -> f64 {
    v.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max) / dx
}

/// First-order Godunov scheme for `∂ₜv + ∂ₓ(v²/2) = 0` with the damping
/// applied exactly per step through the factor `Ξ(tₙ)/Ξ(tₙ₊₁)`.
pub fn grid_solve(
    profile: &InitialProfile,
    eps: f64,
    law: &DampingLaw,
    t_end: f64,
    opts: &GridOptions,
) -> Result<GridSolution> {
    if opts.nx < 64 {
        return Err(Error::param("nx", format!("need at least 64 cells, got {}", opts.nx)));
    }
    if !(opts.cfl > 0.0 && opts.cfl <= 1.0) {
        return Err(Error::param("cfl", format!("must lie in (0, 1], got {}", opts.cfl)));
    }
    let reach = eps * profile.max_abs() * xi_inverse_integral(law, t_end)?.min(1e6);
    let half = opts.half_width.unwrap_or(profile.support + reach + 0.5);
    let nx = opts.nx;
    let dx = 2.0 * half / nx as f64;
    let x: Vec<f64> = (0..nx).map(|i| -half + (i as f64 + 0.5) * dx).collect();
    let mut v: Vec<f64> = x.iter().map(|&x| eps * profile.eval(x).0).collect();
    let slope0 = max_slope(&v, dx);
    let threshold = opts.slope_factor * slope0;

    let mut pending: Vec<f64> = opts.snapshot_times.iter().copied().filter(|&s| s <= t_end).collect();
    pending.sort_by(f64::total_cmp);
    pending.reverse();

    let mut t = 0.0;
    let mut series = vec![GridRecord {
        t,
        sup_v: v.iter().fold(0.0f64, |a, b| a.max(b.abs())),
        max_slope: slope0,
    }];
    let mut snapshots = Vec::new();
    while pending.last() == Some(&0.0) {
        pending.pop();
        snapshots.push(GridSnapshot { t, v: v.clone() });
    }
    let mut blowup_time = None;
    let mut flux = vec![0.0; nx + 1];
    let mut rate = vec![0.0; nx];
    let mut stage = vec![0.0; nx];
    while t < t_end {
        let vmax = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let mut dt = if vmax > 0.0 { opts.cfl * dx / vmax } else { t_end - t };
        dt = dt.min(t_end - t);
        if let Some(&next) = pending.last() {
            dt = dt.min(next - t);
        }
        let t_next = if pending.last().is_some_and(|&p| p - t <= dt) {
            pending[pending.len() - 1]
        } else if t_end - t <= dt {
            t_end
        } else {
            t + dt
        };
        let decay = (law.ln_xi(t) - law.ln_xi(t_next)).exp();
        let h = t_next - t;
        transport_rate(&v, dx, opts.scheme, &mut flux, &mut rate);
        match opts.scheme {
            Scheme::Godunov => {
                for i in 0..nx {
                    v[i] += h * rate[i];
                }
            }
            Scheme::Muscl => {
                for i in 0..nx {
                    stage[i] = v[i] + h * rate[i];
                }
                transport_rate(&stage, dx, opts.scheme, &mut flux, &mut rate);
                for i in 0..nx {
                    v[i] = 0.5 * (v[i] + stage[i] + h * rate[i]);
                }
            }
        }
        for vi in v.iter_mut() {
            *vi *= decay;
        }
        t = t_next;
        let sup_v = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if !sup_v.is_finite() {
            return Err(Error::Diverged {
                t,
                reason: "non-finite velocity".into(),
            });
        }
        let slope = max_slope(&v, dx);
        series.push(GridRecord {
            t,
            sup_v,
            max_slope: slope,
        });
        while pending.last().is_some_and(|&p| p <= t) {
            pending.pop();
            snapshots.push(GridSnapshot { t, v: v.clone() });
        }
        if blowup_time.is_none() && slope > threshold {
            blowup_time = Some(t);
            if opts.stop_at_blowup {
                break;
            }
        }
    }
    Ok(GridSolution {
        x,
        dx,
        series,
        snapshots,
        final_state: GridSnapshot { t, v },
        blowup_time,
    })
}
