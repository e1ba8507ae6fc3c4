//! Hypergeometric series `Ψ(a,b,c;z)` with `a+b = 1`, the bound-window
//! search for `δ₀`, characteristic coordinates, the Riemann function of the
//! one-dimensional damped wave operator and the `P(t,l)` lower bound.

use serde::Serialize;

use crate::damping::{ln_xi_log1p, DampingLaw};
use crate::error::{Error, Result};
use crate::numeric::{integrate_2d, QuadOptions};

const SERIES_REL_TOL: f64 = 1e-14;
const SERIES_MAX_TERMS: usize = 100_000;
const SERIES_QUIET_RUN: usize = 3;

/// Real invariants `a+b`, `ab` of a conjugate or real parameter pair, plus `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperParams {
    pub sum_ab: f64,
    pub prod_ab: f64,
    pub c: f64,
}

impl HyperParams {
    pub fn new(prod_ab: f64, c: f64) -> Result<Self> {
        if !prod_ab.is_finite() {
            return Err(Error::param("prod_ab", "must be finite"));
        }
        if !(c > 0.0) {
            return Err(Error::param("c", format!("must be positive, got {c}")));
        }
        Ok(Self {
            sum_ab: 1.0,
            prod_ab,
            c,
        })
    }

    pub fn from_law(law: &DampingLaw, c: f64) -> Result<Self> {
        Self::new(prod_ab(law)?, c)
    }
}

/// `ab = μλ/2` for `λ > 1` and `(μ/2)(1-μ/2)` for `λ = 1`.
pub fn prod_ab(law: &DampingLaw) -> Result<f64> {
    let (mu, lambda) = (law.mu(), law.lambda());
    if lambda == 1.0 {
        Ok(0.5 * mu * (1.0 - 0.5 * mu))
    } else if lambda > 1.0 {
        Ok(0.5 * mu * lambda)
    } else {
        Err(Error::param("lambda", format!("the parameter map needs lambda >= 1, got {lambda}")))
    }
}

fn factor(p: &HyperParams, k: f64) -> f64 {
    k * k + k * p.sum_ab + p.prod_ab
}

/// `(a)ₙ(b)ₙ = ∏_{k<n} (k² + k(a+b) + ab)`.
pub fn pochhammer_product(params: &HyperParams, n: usize) -> f64 {
    (0..n).map(|k| factor(params, k as f64)).product()
}

/// `Ψ(a,b,c;z)` for `-1 < z ≤ 0`.
pub fn psi(params: &HyperParams, z: f64) -> Result<f64> {
    sum_series(params, z, 0.0)
}

/// `Ψ(a+1,b+1,c+1;z)`; with `c = 1` this is `Ψ(a+1,b+1,2;z)`.
pub fn psi_shifted(params: &HyperParams, z: f64) -> Result<f64> {
    sum_series(params, z, 1.0)
}

fn sum_series(params: &HyperParams, z: f64, shift: f64) -> Result<f64> {
    if !(z > -1.0 && z <= 0.0) {
        return Err(Error::Domain(format!("Psi needs -1 < z <= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let c = params.c + shift;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut quiet = 0;
    for n in 0..SERIES_MAX_TERMS {
        let nf = n as f64;
        term *= factor(params, nf + shift) / ((nf + 1.0) * (c + nf)) * z;
        sum += term;
        if term.abs() < SERIES_REL_TOL * sum.abs() {
            quiet += 1;
            if quiet == SERIES_QUIET_RUN {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::SeriesDivergence {
        terms: SERIES_MAX_TERMS,
        partial: sum,
    })
}

pub const DELTA0_RESOLUTION_LOG2: u32 = 12;
pub const DELTA0_SAMPLES: usize = 256;

fn in_window(v: f64) -> bool {
    (0.5..=1.5).contains(&v)
}

/// Checks that `Ψ(a,b,1;z)` and `Ψ(a+1,b+1,2;z)` lie in `[1/2, 3/2]` at
/// `samples` equispaced points of `[-δ₀/2, 0]`.
pub fn window_holds(law: &DampingLaw, delta0: f64, samples: usize) -> Result<bool> {
    let params = HyperParams::from_law(law, 1.0)?;
    let samples = samples.max(2);
    for i in 0..samples {
        // endpoint first: it is the most likely to fail
        let z = -0.5 * delta0 * (1.0 - i as f64 / (samples - 1) as f64);
        if !in_window(psi(&params, z)?) || !in_window(psi_shifted(&params, z)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest `δ₀ = k·2⁻¹²` in `(0,1)` for which the bound window holds.
pub fn delta0_search(law: &DampingLaw) -> Result<f64> {
    prod_ab(law)?;
    let steps = 1u32 << DELTA0_RESOLUTION_LOG2;
    for k in (1..steps).rev() {
        let delta0 = k as f64 / steps as f64;
        if window_holds(law, delta0, DELTA0_SAMPLES)? {
            return Ok(delta0);
        }
    }
    Err(Error::NoDelta0)
}

/// Characteristic coordinates `ξ = 1+t-l`, `ζ = 1+t+l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharPoint {
    pub xi: f64,
    pub zeta: f64,
}

impl CharPoint {
    pub fn new(xi: f64, zeta: f64) -> Self {
        Self { xi, zeta }
    }
}

pub fn to_characteristic(t: f64, l: f64) -> CharPoint {
    CharPoint {
        xi: 1.0 + t - l,
        zeta: 1.0 + t + l,
    }
}

/// Inverse of [`to_characteristic`], returning `(t, l)`.
pub fn from_characteristic(p: CharPoint) -> (f64, f64) {
    (0.5 * (p.xi + p.zeta) - 1.0, 0.5 * (p.zeta - p.xi))
}

pub fn riemann_z(p: CharPoint, pa: CharPoint) -> Result<f64> {
    let s = p.xi + p.zeta;
    let sa = pa.xi + pa.zeta;
    if !(s > 0.0 && sa > 0.0) {
        return Err(Error::Domain(format!(
            "z needs xi+zeta > 0 at both points, got {s} and {sa}"
        )));
    }
    Ok(-((pa.xi - p.xi) * (pa.zeta - p.zeta)) / (sa * s))
}

fn exponent_2pow(lambda: f64, shift: f64) -> f64 {
    (lambda + shift).exp2()
}

/// `𝓡(ξ,ζ;ξ_A,ζ_A) = [Ξ(ξ+ζ-1)/Ξ(ξ_A+ζ_A-1)]^{2^{λ-2}} Ψ(a,b,1;z)`.
pub fn riemann_r(p: CharPoint, pa: CharPoint, law: &DampingLaw) -> Result<f64> {
    let z = riemann_z(p, pa)?;
    let params = HyperParams::from_law(law, 1.0)?;
    let ln_ratio = ln_xi_log1p(law, (p.xi + p.zeta).ln()) - ln_xi_log1p(law, (pa.xi + pa.zeta).ln());
    Ok((exponent_2pow(law.lambda(), -2.0) * ln_ratio).exp() * psi(&params, z)?)
}

/// Applies the adjoint operator
/// `𝓛*𝓡 = 𝓡_{ξζ} - 2^{λ-2}μ/(ξ+ζ)^λ (𝓡_ξ + 𝓡_ζ) + 2^{λ-1}μλ/(ξ+ζ)^{λ+1} 𝓡`
/// to any function of `(ξ, ζ)` using central differences of step `h`.
pub fn adjoint_operator_fd<F>(r: F, p: CharPoint, law: &DampingLaw, h: f64) -> Result<f64>
where
    F: Fn(CharPoint) -> Result<f64>,
{
    let at = |dx: f64, dz: f64| r(CharPoint::new(p.xi + dx, p.zeta + dz));
    let r0 = at(0.0, 0.0)?;
    let r_xi = (at(h, 0.0)? - at(-h, 0.0)?) / (2.0 * h);
    let r_zeta = (at(0.0, h)? - at(0.0, -h)?) / (2.0 * h);
    let r_mixed = (at(h, h)? - at(h, -h)? - at(-h, h)? + at(-h, -h)?) / (4.0 * h * h);
    let (mu, lambda) = (law.mu(), law.lambda());
    let s = p.xi + p.zeta;
    Ok(r_mixed - exponent_2pow(lambda, -2.0) * mu / s.powf(lambda) * (r_xi + r_zeta)
        + exponent_2pow(lambda, -1.0) * mu * lambda / s.powf(lambda + 1.0) * r0)
}

/// The bracket `2^{λ-2}μλ/s^{λ+1} - ab/s² - 4^{λ-2}μ²/s^{2λ}` with `s = ξ+ζ`.
///
/// At `λ = 1` all three powers of `s` coincide and the coefficients of `μ`
/// and `μ²` are grouped before summing, so the cancellation is exact.
pub fn adjoint_bracket(law: &DampingLaw, s: f64) -> Result<f64> {
    let (mu, lambda) = (law.mu(), law.lambda());
    let ab = prod_ab(law)?;
    if lambda == 1.0 {
        let c_mu = exponent_2pow(lambda, -2.0) * lambda - 0.5;
        let c_mu2 = 0.25 - exponent_2pow(2.0 * lambda, -4.0);
        return Ok((c_mu * mu + c_mu2 * mu * mu) / (s * s));
    }
    Ok(exponent_2pow(lambda, -2.0) * mu * lambda / s.powf(lambda + 1.0)
        - ab / (s * s)
        - exponent_2pow(2.0 * lambda, -4.0) * mu * mu / s.powf(2.0 * lambda))
}

/// Finite-difference `𝓛*𝓡` minus the closed-form right side `bracket·𝓡`.
pub fn adjoint_residual(p: CharPoint, pa: CharPoint, law: &DampingLaw, h: f64) -> Result<f64> {
    let lhs = adjoint_operator_fd(|q| riemann_r(q, pa, law), p, law, h)?;
    let rhs = adjoint_bracket(law, p.xi + p.zeta)? * riemann_r(p, pa, law)?;
    Ok(lhs - rhs)
}

/// Right side of the lower bound
/// `P(t,l) ≥ ¼Ξ(t)^{-½}q₀(l-t) + ¼∫₀ᵗ∫_{l-t+τ}^{l+t-τ} (Ξ(τ)/Ξ(t))^{½} f(τ,y) dy dτ`.
pub fn p_lower_bound<Q, F>(t: f64, l: f64, q0: Q, f: F, law: &DampingLaw) -> Result<f64>
where
    Q: Fn(f64) -> f64,
    F: Fn(f64, f64) -> f64,
{
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be >= 0, got {t}")));
    }
    let ln_xi_t = law.ln_xi(t);
    let head = 0.25 * (-0.5 * ln_xi_t).exp() * q0(l - t);
    if t == 0.0 {
        return Ok(head);
    }
    let opts = QuadOptions::default().with_rel_tol(1e-8);
    let body = integrate_2d(
        |tau, y| (0.5 * (law.ln_xi(tau) - ln_xi_t)).exp() * f(tau, y),
        0.0,
        t,
        |tau| l - t + tau,
        |tau| l + t - tau,
        opts,
    )?;
    Ok(head + 0.25 * body.value)
}
