//! Damping law `α(t) = μ/(1+t)^λ`, its integrating factor `Ξ`, the
//! integral `I(t) = ∫₀ᵗ ds/Ξ(s)`, the case classifier and the gas law.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{integrate, QuadOptions};

/// Value of `ln Ξ` beyond which the remaining part of `∫ e^{-w}…` is treated as a tail.
const LN_XI_CUTOFF: f64 = 36.841_361_487_904_734; // ln(1e16)

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingLaw {
    mu: f64,
    lambda: f64,
}

impl DampingLaw {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::param("mu", format!("must be positive and finite, got {mu}")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", format!("must be non-negative and finite, got {lambda}")));
        }
        Ok(Self { mu, lambda })
    }

    /// Builds a law from decimal strings as they appear in configs.
    pub fn from_decimal(mu: &str, lambda: &str) -> Result<Self> {
        let m = mu
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::param("mu", format!("`{mu}`: {e}")))?;
        let l = lambda
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::param("lambda", format!("`{lambda}`: {e}")))?;
        Self::new(m, l)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn is_critical_power(&self) -> bool {
        self.lambda == 1.0
    }

    pub fn alpha(&self, t: f64) -> f64 {
        alpha(self, t)
    }

    pub fn xi(&self, t: f64) -> f64 {
        xi(self, t)
    }

    pub fn ln_xi(&self, t: f64) -> f64 {
        ln_xi_log1p(self, t.ln_1p())
    }

    /// `sup_t Ξ(t)`, finite only for `λ > 1`.
    pub fn xi_sup(&self) -> f64 {
        if self.lambda > 1.0 {
            (self.mu / (self.lambda - 1.0)).exp()
        } else {
            f64::INFINITY
        }
    }
}

impl fmt::Display for DampingLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mu={} lambda={}", self.mu, self.lambda)
    }
}

pub fn alpha(law: &DampingLaw, t: f64) -> f64 {
    if law.lambda == 0.0 {
        return law.mu;
    }
    law.mu * (-law.lambda * t.ln_1p()).exp()
}

pub fn xi(law: &DampingLaw, t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    ln_xi_log1p(law, t.ln_1p()).exp()
}

/// `ln Ξ` as a function of `s = ln(1+t)`; finite even where `t` itself overflows.
pub fn ln_xi_log1p(law: &DampingLaw, s: f64) -> f64 {
    let DampingLaw { mu, lambda } = *law;
    if lambda == 1.0 {
        mu * s
    } else if lambda == 0.0 && s < 700.0 {
        mu * s.exp_m1()
    } else {
        let k = 1.0 - lambda;
        mu / k * (k * s).exp_m1()
    }
}

/// `I(t) = ∫₀ᵗ ds/Ξ(s)`; `t = +∞` is accepted.
pub fn xi_inverse_integral(law: &DampingLaw, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("I(t) needs t >= 0, got {t}")));
    }
    let DampingLaw { mu, lambda } = *law;
    if lambda == 0.0 {
        return Ok(-(-mu * t).exp_m1() / mu);
    }
    if t.is_infinite() {
        return xi_inverse_integral_log1p(law, f64::INFINITY);
    }
    if lambda == 1.0 {
        return Ok(critical_integral(mu, t.ln_1p()));
    }
    xi_inverse_integral_log1p(law, t.ln_1p())
}

/// `I` as a function of `s = ln(1+t)`. Used by root finders that must reach
/// times far beyond the range of `f64`.
pub fn xi_inverse_integral_log1p(law: &DampingLaw, s: f64) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::Domain(format!("ln(1+t) must be >= 0, got {s}")));
    }
    let DampingLaw { mu, lambda } = *law;
    if lambda == 1.0 {
        return Ok(critical_integral(mu, s));
    }
    if lambda == 0.0 {
        return Ok(if s < 700.0 {
            -(-mu * s.exp_m1()).exp_m1() / mu
        } else {
            1.0 / mu
        });
    }
    if lambda < 1.0 {
        return subcritical_integral(mu, lambda, ln_xi_log1p(law, s)).map(|(v, _)| v);
    }
    if s.is_infinite() {
        return Ok(f64::INFINITY);
    }
    // λ > 1: in u = ln(1+s) the integrand is e^{u - ln Ξ}.
    let opts = QuadOptions::default();
    let span = s.max(1.0);
    let mut total = 0.0;
    let mut a = 0.0;
    while a < s {
        let b = (a + span.min(8.0)).min(s);
        match integrate(|u| (u - ln_xi_log1p(law, u)).exp(), a, b, opts) {
            Ok(r) => total += r.value,
            Err(Error::Quadrature { estimate, .. }) if estimate == f64::INFINITY => {
                return Ok(f64::INFINITY)
            }
            Err(e) => return Err(e),
        }
        if total.is_infinite() {
            return Ok(total);
        }
        a = b;
    }
    Ok(total)
}

fn critical_integral(mu: f64, s: f64) -> f64 {
    if mu == 1.0 {
        s
    } else {
        let k = 1.0 - mu;
        (k * s).exp_m1() / k
    }
}

/// `λ ∈ (0,1)` via `w = ln Ξ`: `I = (1/μ) ∫₀^φ e^{-w} (1+κw)^p dw` with
/// `κ = (1-λ)/μ`, `p = λ/(1-λ)`. Returns the value and a certified bound on
/// the neglected tail.
fn subcritical_integral(mu: f64, lambda: f64, phi: f64) -> Result<(f64, f64)> {
    let kappa = (1.0 - lambda) / mu;
    let p = lambda / (1.0 - lambda);
    let f = |w: f64| (-w + p * (kappa * w).ln_1p()).exp();
    let tail = |w: f64| {
        let ratio = p * kappa / (1.0 + kappa * w);
        if ratio >= 1.0 {
            f64::INFINITY
        } else {
            f(w) / (1.0 - ratio)
        }
    };
    let opts = QuadOptions::default();
    // The integrand peaks near w = p - 1/κ; integrate piecewise so the
    // adaptive rule sees the bump.
    let mut cut = LN_XI_CUTOFF.max(2.0 * (p - 1.0 / kappa));
    let mut value = 0.0;
    let mut a = 0.0;
    loop {
        let b = cut.min(phi);
        if b > a {
            value += integrate(f, a, b, opts)?.value;
            a = b;
        }
        if phi <= cut {
            return Ok((value / mu, 0.0));
        }
        let t = tail(cut);
        if t <= 1e-13 * value {
            return Ok((value / mu, t / mu));
        }
        cut *= 2.0;
    }
}

/// Whether `I(+∞)` is finite.
pub fn integral_is_finite(law: &DampingLaw) -> bool {
    law.lambda < 1.0 || (law.lambda == 1.0 && law.mu > 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    Case1,
    Case2,
    Case3,
    Case4,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::Case1 => "Case1",
            Case::Case2 => "Case2",
            Case::Case3 => "Case3",
            Case::Case4 => "Case4",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseLabel {
    pub case: Case,
    pub dimension: u32,
}

impl CaseLabel {
    /// Cases 1 and 2 are the global-existence regimes.
    pub fn expects_global(&self) -> bool {
        matches!(self.case, Case::Case1 | Case::Case2)
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.case.fmt(f)
    }
}

pub fn classify_case(law: &DampingLaw, d: u32) -> Result<CaseLabel> {
    if d != 2 && d != 3 {
        return Err(Error::param("d", format!("dimension must be 2 or 3, got {d}")));
    }
    let critical_mu = 3.0 - d as f64;
    let case = if law.lambda < 1.0 {
        Case::Case1
    } else if law.lambda > 1.0 {
        Case::Case4
    } else if law.mu > critical_mu {
        Case::Case2
    } else {
        // μ > 0 = 3 - d rules this branch out for d = 3.
        Case::Case3
    };
    Ok(CaseLabel { case, dimension: d })
}

/// Polytropic gas `p = Aρ^γ` normalised so that the sound speed at `ρ̄` is one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasLaw {
    gamma: f64,
    rho_bar: f64,
    a: f64,
}

impl GasLaw {
    pub fn new(gamma: f64, rho_bar: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::param("gamma", format!("must exceed 1, got {gamma}")));
        }
        if !(rho_bar > 0.0 && rho_bar.is_finite()) {
            return Err(Error::param("rho_bar", format!("must be positive, got {rho_bar}")));
        }
        let a = 1.0 / (gamma * rho_bar.powf(gamma - 1.0));
        Ok(Self { gamma, rho_bar, a })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho_bar(&self) -> f64 {
        self.rho_bar
    }

    pub fn pressure_constant(&self) -> f64 {
        self.a
    }

    pub fn theta_from_rho(&self, rho: f64) -> f64 {
        let g1 = self.gamma - 1.0;
        if g1 == 1.0 {
            return rho / self.rho_bar - 1.0;
        }
        (g1 * (rho / self.rho_bar).ln()).exp_m1() / g1
    }

    pub fn rho_from_theta(&self, theta: f64) -> Result<f64> {
        let g1 = self.gamma - 1.0;
        let c2 = 1.0 + g1 * theta;
        if !(c2 > 0.0) {
            return Err(Error::Domain(format!("1+(gamma-1)theta = {c2} is not positive")));
        }
        if g1 == 1.0 {
            return Ok(self.rho_bar * c2);
        }
        Ok(self.rho_bar * ((g1 * theta).ln_1p() / g1).exp())
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        self.a * rho.powf(self.gamma)
    }

    /// Squared sound speed `1 + (γ-1)θ`.
    pub fn sound_speed_sq(&self, theta: f64) -> f64 {
        1.0 + (self.gamma - 1.0) * theta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn law(mu: f64, lambda: f64) -> DampingLaw {
        DampingLaw::new(mu, lambda).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(&law(2.0, 1.0), 1.0), 1.0);
        assert_eq!(alpha(&law(3.0, 0.0), 7.0), 3.0);
        assert!((alpha(&law(1.0, 2.0), 3.0) - 0.0625).abs() < 1e-16);
    }

    #[test]
    fn xi_examples() {
        assert!(rel(xi(&law(2.0, 1.0), 3.0), 16.0) < 1e-15);
        assert!(rel(xi(&law(2.0, 0.0), 1.0), 2f64.exp()) < 1e-15);
        assert!(rel(xi(&law(1.0, 2.0), 1.0), 0.5f64.exp()) < 1e-15);
    }

    #[test]
    fn integral_examples() {
        assert!(rel(xi_inverse_integral(&law(2.0, 1.0), f64::INFINITY).unwrap(), 1.0) < 1e-15);
        let e1 = std::f64::consts::E - 1.0;
        assert!(rel(xi_inverse_integral(&law(1.0, 1.0), e1).unwrap(), 1.0) < 1e-15);
        assert_eq!(xi_inverse_integral(&law(1.0, 2.0), f64::INFINITY).unwrap(), f64::INFINITY);
        assert_eq!(xi_inverse_integral(&law(1.0, 1.0), f64::INFINITY).unwrap(), f64::INFINITY);
        assert_eq!(xi_inverse_integral(&law(0.5, 1.0), f64::INFINITY).unwrap(), f64::INFINITY);
    }

    #[test]
    fn integral_against_extended_precision() {
        // Frozen from 30-digit adaptive quadrature of ∫ ds/Ξ.
        let cases = [
            (1.0, 0.5, 10.0, 1.462_890_530_947_100_2),
            (1.0, 0.5, f64::INFINITY, 1.5),
            (0.3, 0.9, f64::INFINITY, 1_232.976_680_384_089_6),
            (1.0, 2.0, 10.0, 4.764_539_728_936_448),
            (2.0, 1.5, 7.0, 1.314_512_679_432_904_6),
            (3.0, 0.25, 2.0, 0.354_983_925_423_038_74),
        ];
        for (mu, lambda, t, want) in cases {
            let got = xi_inverse_integral(&law(mu, lambda), t).unwrap();
            assert!(rel(got, want) < 1e-10, "mu={mu} lambda={lambda} t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn log1p_variant_survives_overflowing_times() {
        let l = law(1.0, 1.0);
        assert_eq!(xi_inverse_integral_log1p(&l, 1000.0).unwrap(), 1000.0);
        let l = law(1.0, 0.5);
        assert!(rel(xi_inverse_integral_log1p(&l, 800.0).unwrap(), 1.5) < 1e-12);
        let l = law(1.0, 2.0);
        assert!(xi_inverse_integral_log1p(&l, 800.0).unwrap() > 1e300);
        assert!(xi_inverse_integral_log1p(&l, 600.0).unwrap().is_finite());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_case(&law(0.8, 1.0), 2).unwrap().case, Case::Case3);
        assert_eq!(classify_case(&law(5.0, 0.5), 3).unwrap().case, Case::Case1);
        assert_eq!(classify_case(&law(1.0, 1.0), 3).unwrap().case, Case::Case2);
        assert_eq!(classify_case(&law(1.0, 1.0), 2).unwrap().case, Case::Case3);
        assert_eq!(classify_case(&law(1.0, 1.5), 2).unwrap().case, Case::Case4);
        assert!(classify_case(&law(1.0, 1.0), 4).is_err());
    }

    #[test]
    fn decimal_parse_is_exact_at_one() {
        assert!(DampingLaw::from_decimal("1", "1.0").unwrap().is_critical_power());
        assert!(!DampingLaw::from_decimal("1", "1.0000000000000002").unwrap().is_critical_power());
        assert!(DampingLaw::from_decimal("0", "1").is_err());
        assert!(DampingLaw::from_decimal("1", "-0.5").is_err());
    }

    #[test]
    fn gas_law_normalisation_and_round_trip() {
        for gamma in [1.4, 2.0, 3.0] {
            let gas = GasLaw::new(gamma, 1.7).unwrap();
            let c2 = gas.pressure_constant() * gamma * 1.7f64.powf(gamma - 1.0);
            assert!((c2 - 1.0).abs() < 1e-15);
            for theta in [-0.3, 0.0, 0.2, 1.5] {
                let rho = gas.rho_from_theta(theta).unwrap();
                assert!((gas.theta_from_rho(rho) - theta).abs() < 1e-12);
            }
        }
        let gas = GasLaw::new(2.0, 1.0).unwrap();
        assert!(gas.rho_from_theta(-1.0).is_err());
    }

    fn arb_law() -> impl Strategy<Value = DampingLaw> {
        (0.1f64..5.0, prop_oneof![Just(0.0), Just(1.0), 0.0f64..3.0]).prop_map(|(m, l)| law(m, l))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn xi_solves_its_ode(l in arb_law()) {
            prop_assert_eq!(xi(&l, 0.0), 1.0);
            for t in [0.5f64, 1.0, 5.0, 50.0] {
                let h = 1e-5 * (1.0 + t).min(1.0 / alpha(&l, t));
                let d = (l.ln_xi(t + h) - l.ln_xi(t - h)) / (2.0 * h);
                let fd = (xi(&l, t + h) - xi(&l, t - h)) / (2.0 * h);
                let want = alpha(&l, t) * xi(&l, t);
                if want.is_finite() && want > 1e-300 && fd.is_finite() {
                    prop_assert!(rel(fd, want) < 1e-6, "t={} fd={} want={}", t, fd, want);
                }
                prop_assert!(rel(d, alpha(&l, t)) < 1e-6);
            }
        }

        #[test]
        fn integral_monotone_and_concave(l in arb_law()) {
            let ts: Vec<f64> = (0..40).map(|k| 0.5 * k as f64).collect();
            let vals: Vec<f64> = ts.iter().map(|&t| xi_inverse_integral(&l, t).unwrap()).collect();
            for w in vals.windows(3) {
                prop_assert!(w[1] >= w[0]);
                prop_assert!(w[2] - w[1] <= (w[1] - w[0]) * (1.0 + 1e-9) + 1e-15);
            }
            for w in ts.windows(2) {
                prop_assert!(xi(&l, w[1]) >= xi(&l, w[0]));
            }
        }

        #[test]
        fn classification_is_a_partition(l in arb_law(), d in 2u32..=3) {
            let c = classify_case(&l, d).unwrap();
            let hits = [
                l.lambda() < 1.0,
                l.lambda() == 1.0 && l.mu() > 3.0 - d as f64,
                l.lambda() == 1.0 && l.mu() <= 3.0 - d as f64 && d == 2,
                l.lambda() > 1.0,
            ];
            prop_assert_eq!(hits.iter().filter(|&&h| h).count(), 1);
            let idx = hits.iter().position(|&h| h).unwrap();
            prop_assert_eq!(c.case, [Case::Case1, Case::Case2, Case::Case3, Case::Case4][idx]);
        }

        #[test]
        fn critical_integral_limit(mu in 1.01f64..6.0) {
            let got = xi_inverse_integral(&law(mu, 1.0), f64::INFINITY).unwrap();
            prop_assert!(rel(got, 1.0 / (mu - 1.0)) < 1e-10);
        }

        #[test]
        fn closed_forms_agree_with_quadrature(mu in 0.2f64..4.0, t in 0.0f64..30.0) {
            for lambda in [0.0, 1.0] {
                let l = law(mu, lambda);
                let q = integrate(|s| 1.0 / xi(&l, s), 0.0, t, QuadOptions::default()).unwrap().value;
                let c = xi_inverse_integral(&l, t).unwrap();
                prop_assert!((q - c).abs() <= 1e-10 * c.max(1e-300));
            }
        }
    }
}
