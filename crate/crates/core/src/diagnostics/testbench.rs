//! Inequality test-bench on analytic fields: the div-curl bound, the
//! Klainerman–Sobolev bound and the two σ₋-weighted bounds, each reported
//! as `(lhs, rhs)` with the empirical constant `lhs / rhs`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::energy::sigma_minus;
use super::zfields::PointJet;
use crate::error::{Error, Result};
use crate::euler2d::stencil::{d1, row_sums, Axis};
use crate::euler2d::Grid2D;
use crate::numeric::quadrature::gauss_legendre;
use crate::numeric::Jet2;

/// Cells between the support and the boundary required by the stencils.
pub const SUPPORT_MARGIN: usize = 4;

/// Relative spread of the empirical constant tolerated across times.
pub const STABILITY_TOL: f64 = 0.2;

/// A smooth function of `(t, x)` whose second-order jets are exact.
pub trait SpaceTimeFunction: Sync {
    fn jet(&self, t: f64, x1: f64, x2: f64) -> PointJet;
    /// Radii `(r₀, r₁)` of an annulus containing the support at time `t`.
    fn support(&self, t: f64) -> (f64, f64);

    fn value(&self, t: f64, x1: f64, x2: f64) -> f64 {
        self.jet(t, x1, x2).v
    }
}

fn zero_jet(p: [f64; 3]) -> PointJet {
    PointJet {
        p,
        v: 0.0,
        g: [0.0; 3],
        h: [[0.0; 3]; 3],
    }
}

fn to_point(p: [f64; 3], j: Jet2) -> PointJet {
    PointJet { p, v: j.v, g: j.g, h: j.h }
}

pub struct ZeroFunction;

impl SpaceTimeFunction for ZeroFunction {
    fn jet(&self, t: f64, x1: f64, x2: f64) -> PointJet {
        zero_jet([t, x1, x2])
    }

    fn support(&self, _t: f64) -> (f64, f64) {
        (0.0, 1.0)
    }
}

/// Static `exp(-|x - x₀|²/s²)`, truncated where it falls below `1e-300`.
pub struct GaussianBump {
    pub center: [f64; 2],
    pub scale: f64,
}

impl SpaceTimeFunction for GaussianBump {
    fn jet(&self, t: f64, x1: f64, x2: f64) -> PointJet {
        let [_, x, y] = Jet2::vars(t, x1, x2);
        let dx = x + (-self.center[0]);
        let dy = y + (-self.center[1]);
        let q = (dx * dx + dy * dy).scale(-1.0 / (self.scale * self.scale));
        to_point([t, x1, x2], q.exp())
    }

    fn support(&self, _t: f64) -> (f64, f64) {
        let c = self.center[0].hypot(self.center[1]);
        (0.0, c + 26.3 * self.scale)
    }
}

/// Outgoing wave `A(φ)·B((r - t - c)/w)·(1+t+r)^{-1/2}` with angular factor
/// `A = 1 + a·cos(mφ)` and profile `B(s) = exp(1 - 1/(1-s²))` or `s·B(s)`.
/// Supported in `t + c - w ≤ r ≤ t + c + w`, so `M = c + w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutgoingWave {
    pub amplitude: f64,
    pub mode: u32,
    pub mode_weight: f64,
    pub center: f64,
    pub width: f64,
    pub odd: bool,
}

impl OutgoingWave {
    pub fn support_radius(&self) -> f64 {
        self.center + self.width
    }

    pub fn id(&self) -> String {
        format!(
            "wave_m{}_a{}_c{}_w{}_{}",
            self.mode,
            self.mode_weight,
            self.center,
            self.width,
            if self.odd { "odd" } else { "even" }
        )
    }
}

/// `exp(1 - 1/(1-s²))` with its first two derivatives.
fn smooth_bump(s: f64) -> (f64, f64, f64) {
    let q = 1.0 - s * s;
    let b = (1.0 - 1.0 / q).exp();
    // g = 1 - 1/q, g' = -2s/q², g'' = -2/q² - 8s²/q³
    let g1 = -2.0 * s / (q * q);
    let g2 = -2.0 / (q * q) - 8.0 * s * s / (q * q * q);
    (b, b * g1, b * (g2 + g1 * g1))
}

impl SpaceTimeFunction for OutgoingWave {
    fn jet(&self, t: f64, x1: f64, x2: f64) -> PointJet {
        let p = [t, x1, x2];
        let r0 = x1.hypot(x2);
        let s0 = (r0 - t - self.center) / self.width;
        if s0.abs() >= 1.0 {
            return zero_jet(p);
        }
        let [tj, x, y] = Jet2::vars(t, x1, x2);
        let r = (x * x + y * y).sqrt();
        let s = (r - tj + (-self.center)).scale(1.0 / self.width);
        let (b0, b1, b2) = smooth_bump(s0);
        let mut profile = s.chain(b0, b1, b2);
        if self.odd {
            profile = profile * s;
        }
        let (c, sn) = (x / r, y / r);
        let angular = match self.mode {
            0 => Jet2::constant(1.0),
            1 => c,
            2 => c * c - sn * sn,
            _ => c * (c * c).scale(4.0) + c.scale(-3.0),
        };
        let a = angular.scale(self.mode_weight) + 1.0;
        let decay = (tj + r + 1.0).powf(-0.5);
        to_point(p, (a * profile * decay).scale(self.amplitude))
    }

    fn support(&self, t: f64) -> (f64, f64) {
        ((t + self.center - self.width).max(0.0), t + self.center + self.width)
    }
}

/// The ten-function analytic catalog: outgoing waves with angular modes
/// 0 to 3, even and odd profiles, and a range of widths and offsets.
pub fn catalog() -> Vec<OutgoingWave> {
    let w = |mode, mode_weight, center, width, odd| OutgoingWave {
        amplitude: 1.0,
        mode,
        mode_weight,
        center,
        width,
        odd,
    };
    vec![
        w(0, 0.0, 3.0, 1.0, false),
        w(0, 0.0, 4.0, 2.0, false),
        w(0, 0.0, 3.0, 1.5, true),
        w(1, 0.5, 3.0, 1.0, false),
        w(1, 0.8, 4.0, 1.5, true),
        w(2, 0.5, 3.5, 1.0, false),
        w(2, 0.9, 3.0, 2.0, true),
        w(3, 0.5, 4.0, 1.0, false),
        w(3, 0.7, 3.5, 1.5, true),
        w(1, 0.3, 5.0, 2.5, false),
    ]
}

/// Tensor rule on an annulus: Gauss–Legendre panels in `r`, trapezoid in φ.
struct PolarRule {
    nodes: Vec<(f64, f64, f64)>,
}

impl PolarRule {
    fn new(r0: f64, r1: f64) -> Self {
        let (gx, gw) = gauss_legendre(8);
        let panels = ((r1 - r0) / 0.25).ceil().max(1.0) as usize;
        let n_phi = ((2.0 * PI * r1 / 0.04).ceil() as usize).max(256);
        let dphi = 2.0 * PI / n_phi as f64;
        let pw = (r1 - r0) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * 8 * n_phi);
        for k in 0..panels {
            let a = r0 + k as f64 * pw;
            for (x, w) in gx.iter().zip(&gw) {
                let r = a + 0.5 * pw * (x + 1.0);
                let wr = 0.5 * pw * w * r * dphi;
                for m in 0..n_phi {
                    let phi = m as f64 * dphi;
                    nodes.push((r * phi.cos(), r * phi.sin(), wr));
                }
            }
        }
        Self { nodes }
    }

    /// `(max g₁, ∫ g₂)` of the pointwise pair `g(x) = (g₁, g₂)`.
    fn sup_and_integral<G: Fn(f64, f64) -> (f64, f64) + Sync>(&self, g: G) -> (f64, f64) {
        let parts: Vec<(f64, f64)> = self
            .nodes
            .par_chunks(4096)
            .map(|chunk| {
                chunk.iter().fold((0.0f64, 0.0), |(s, i), &(x, y, w)| {
                    let (a, b) = g(x, y);
                    (s.max(a), i + w * b)
                })
            })
            .collect();
        parts.iter().fold((0.0f64, 0.0), |(s, i), &(a, b)| (s.max(a), i + b))
    }
}

/// Two sides of an inequality and the empirical constant `lhs / rhs`
/// (`None` when both sides vanish).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
}

impl Sides {
    pub fn constant(&self) -> Option<f64> {
        (self.rhs > 0.0).then(|| self.lhs / self.rhs)
    }
}

fn outer_support_margin(f: &[f64], grid: &Grid2D) -> usize {
    let n = grid.n;
    let mut margin = n;
    for (k, v) in f.iter().enumerate() {
        if *v != 0.0 {
            let (i, j) = (k % n, k / n);
            margin = margin.min(i).min(j).min(n - 1 - i).min(n - 1 - j);
        }
    }
    margin
}

/// `‖∇U‖` and `‖curl U‖ + ‖div U‖` for `U = (u₁, u₂)` with fourth-order
/// stencils. The support must stay `SUPPORT_MARGIN` cells from the boundary.
pub fn testbench_divcurl(u1: &[f64], u2: &[f64], grid: &Grid2D) -> Result<Sides> {
    if u1.len() != grid.len() || u2.len() != grid.len() {
        return Err(Error::param("U", "field length does not match the grid"));
    }
    let margin = outer_support_margin(u1, grid).min(outer_support_margin(u2, grid));
    if margin < SUPPORT_MARGIN {
        return Err(Error::SupportViolation {
            margin,
            needed: SUPPORT_MARGIN,
        });
    }
    let d = [
        d1(u1, grid, Axis::X1),
        d1(u1, grid, Axis::X2),
        d1(u2, grid, Axis::X1),
        d1(u2, grid, Axis::X2),
    ];
    let sq = |f: &[f64]| grid.cell_area() * row_sums(f, grid.n, |v| v * v);
    let grad = d.iter().map(|f| sq(f)).sum::<f64>().sqrt();
    let div: Vec<f64> = d[0].iter().zip(&d[3]).map(|(a, b)| a + b).collect();
    let curl: Vec<f64> = d[2].iter().zip(&d[1]).map(|(a, b)| a - b).collect();
    Ok(Sides {
        lhs: grad,
        rhs: sq(&div).sqrt() + sq(&curl).sqrt(),
    })
}

/// `sup_x (1+t+r)σ₋|Φ|²` against `Σ_{|α|≤2} ‖Z^αΦ‖²`: the squared form of
/// the two-dimensional Klainerman–Sobolev bound, homogeneous in `Φ`.
pub fn testbench_klainerman<F: SpaceTimeFunction + ?Sized>(f: &F, t: f64) -> Sides {
    let (r0, r1) = f.support(t);
    let rule = PolarRule::new(r0, r1);
    let (lhs, rhs) = rule.sup_and_integral(|x, y| {
        let j = f.jet(t, x, y);
        let r = x.hypot(y);
        ((1.0 + t + r) * sigma_minus(t, &[x, y]) * j.v * j.v, j.z_sum_sq())
    });
    Sides { lhs, rhs }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum WeightedForm {
    /// `|σ₋^{ν-1}Φ|_∞ ≤ C|σ₋^ν∇Φ|_∞`, `ν < 1`.
    Pointwise { nu: f64 },
    /// `‖σ₋^{-ℓ}Φ‖ ≤ C(t+M)^{(1-ℓ)₊}‖∇Φ‖`, `ℓ ≠ 1`.
    L2 { ell: f64 },
}

/// Both sides of a σ₋-weighted bound for `Φ` supported in `|x| ≤ t + M`.
pub fn testbench_weighted<F: SpaceTimeFunction + ?Sized>(f: &F, t: f64, m: f64, form: WeightedForm) -> Result<Sides> {
    match form {
        WeightedForm::Pointwise { nu } if !(nu < 1.0) => {
            return Err(Error::param("nu", format!("must be below 1, got {nu}")));
        }
        WeightedForm::L2 { ell } if ell == 1.0 || !ell.is_finite() => {
            return Err(Error::param("ell", format!("must be finite and differ from 1, got {ell}")));
        }
        _ => {}
    }
    let (r0, r1) = f.support(t);
    if !(m > 0.0) || r1 > t + m * (1.0 + 1e-12) {
        return Err(Error::param("M", format!("support radius {r1} exceeds t + M = {}", t + m)));
    }
    let rule = PolarRule::new(r0, r1);
    let grad_sq = |j: &PointJet| j.g[1] * j.g[1] + j.g[2] * j.g[2];
    Ok(match form {
        WeightedForm::Pointwise { nu } => {
            let (lhs, _) = rule.sup_and_integral(|x, y| {
                let j = f.jet(t, x, y);
                (sigma_minus(t, &[x, y]).powf(nu - 1.0) * j.v.abs(), 0.0)
            });
            let (rhs, _) = rule.sup_and_integral(|x, y| {
                let j = f.jet(t, x, y);
                (sigma_minus(t, &[x, y]).powf(nu) * grad_sq(&j).sqrt(), 0.0)
            });
            Sides { lhs, rhs }
        }
        WeightedForm::L2 { ell } => {
            let (_, lhs) = rule.sup_and_integral(|x, y| {
                let j = f.jet(t, x, y);
                (0.0, sigma_minus(t, &[x, y]).powf(-2.0 * ell) * j.v * j.v)
            });
            let (_, grad) = rule.sup_and_integral(|x, y| (0.0, grad_sq(&f.jet(t, x, y))));
            Sides {
                lhs: lhs.sqrt(),
                rhs: (t + m).powf((1.0 - ell).max(0.0)) * grad.sqrt(),
            }
        }
    })
}

/// Grid for the div-curl check at time `t`: spacing `h`, support kept at
/// least one unit from the boundary.
pub fn divcurl_grid(r_max: f64, h: f64) -> Result<Grid2D> {
    let half = r_max + 1.0;
    Grid2D::new(half, (2.0 * half / h).ceil() as usize)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityRow {
    pub inequality: &'static str,
    pub function: String,
    pub t: f64,
    /// `ν` or `ℓ` for the weighted bounds, zero otherwise.
    pub param: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
}

/// Grid spacing of the div-curl check on the catalog.
pub const DIVCURL_SPACING: f64 = 0.05;

/// Weighted forms evaluated on the catalog. `ℓ = 0` is recorded but its
/// constant decays like `1/(t+M)` by construction, so it is excluded from
/// the stability check.
pub const WEIGHTED_FORMS: [WeightedForm; 4] = [
    WeightedForm::Pointwise { nu: 0.5 },
    WeightedForm::L2 { ell: 1.5 },
    WeightedForm::L2 { ell: 2.0 },
    WeightedForm::L2 { ell: 0.0 },
];

fn form_name(form: WeightedForm) -> (&'static str, f64) {
    match form {
        WeightedForm::Pointwise { nu } => ("weighted_sup", nu),
        WeightedForm::L2 { ell } => ("weighted_l2", ell),
    }
}

/// Every inequality on every catalog function at every time in `times`.
pub fn run_catalog(times: &[f64]) -> Result<Vec<InequalityRow>> {
    let cat = catalog();
    let mut rows = Vec::new();
    let row = |inequality, f: &OutgoingWave, t, param, s: Sides| InequalityRow {
        inequality,
        function: f.id(),
        t,
        param,
        lhs: s.lhs,
        rhs: s.rhs,
        constant: s.constant().unwrap_or(f64::NAN),
    };
    for &t in times {
        for (k, f) in cat.iter().enumerate() {
            let g = &cat[(k + 1) % cat.len()];
            let grid = divcurl_grid(f.support(t).1.max(g.support(t).1), DIVCURL_SPACING)?;
            let u1 = grid.sample(|x, y| f.value(t, x, y));
            let u2 = grid.sample(|x, y| g.value(t, x, y));
            rows.push(row("divcurl", f, t, 0.0, testbench_divcurl(&u1, &u2, &grid)?));
            rows.push(row("klainerman", f, t, 0.0, testbench_klainerman(f, t)));
            for form in WEIGHTED_FORMS {
                let (name, param) = form_name(form);
                rows.push(row(name, f, t, param, testbench_weighted(f, t, f.support_radius(), form)?));
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityRow {
    pub inequality: &'static str,
    pub function: String,
    pub param: f64,
    pub min_constant: f64,
    pub max_constant: f64,
    /// `max |C(t) - mean| / mean` over the sampled times.
    pub spread: f64,
    /// Constants are positive and finite at every time.
    pub holds: bool,
    /// `holds` and `spread ≤ STABILITY_TOL`; `None` where stability is not
    /// expected.
    pub stable: Option<bool>,
}

/// Groups rows by inequality, function and parameter and measures how much
/// the empirical constant moves across time.
pub fn stability(rows: &[InequalityRow]) -> Vec<StabilityRow> {
    let mut keys: Vec<(&'static str, String, f64)> = Vec::new();
    for r in rows {
        let key = (r.inequality, r.function.clone(), r.param);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(inequality, function, param)| {
            let cs: Vec<f64> = rows
                .iter()
                .filter(|r| r.inequality == inequality && r.function == function && r.param == param)
                .map(|r| r.constant)
                .collect();
            let holds = cs.iter().all(|c| c.is_finite() && *c > 0.0);
            let mean = cs.iter().sum::<f64>() / cs.len() as f64;
            let spread = cs.iter().map(|c| (c - mean).abs() / mean).fold(0.0, f64::max);
            let poincare = inequality == "weighted_l2" && param < 1.0;
            StabilityRow {
                inequality,
                param,
                min_constant: cs.iter().copied().fold(f64::INFINITY, f64::min),
                max_constant: cs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                spread,
                holds,
                stable: (!poincare).then_some(holds && spread <= STABILITY_TOL),
                function,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_function_gives_zero_sides() {
        let z = ZeroFunction;
        let s = testbench_klainerman(&z, 0.0);
        assert_eq!((s.lhs, s.rhs), (0.0, 0.0));
        assert!(s.constant().is_none());
        for form in WEIGHTED_FORMS {
            let s = testbench_weighted(&z, 0.0, 1.0, form).unwrap();
            assert_eq!((s.lhs, s.rhs), (0.0, 0.0));
        }
        let g = Grid2D::new(2.0, 32).unwrap();
        let s = testbench_divcurl(&vec![0.0; g.len()], &vec![0.0; g.len()], &g).unwrap();
        assert_eq!((s.lhs, s.rhs), (0.0, 0.0));
    }

    #[test]
    fn weighted_parameters_are_validated() {
        let f = catalog()[0];
        assert!(testbench_weighted(&f, 0.0, 4.0, WeightedForm::Pointwise { nu: 1.0 }).is_err());
        assert!(testbench_weighted(&f, 0.0, 4.0, WeightedForm::L2 { ell: 1.0 }).is_err());
        assert!(testbench_weighted(&f, 0.0, 3.0, WeightedForm::L2 { ell: 2.0 }).is_err());
    }

    #[test]
    fn wave_jets_match_finite_differences() {
        let f = catalog()[8];
        let (t, x, y) = (1.0, 3.1, -2.2);
        let j = f.jet(t, x, y);
        let h = 1e-5;
        let num = [
            (f.value(t + h, x, y) - f.value(t - h, x, y)) / (2.0 * h),
            (f.value(t, x + h, y) - f.value(t, x - h, y)) / (2.0 * h),
            (f.value(t, x, y + h) - f.value(t, x, y - h)) / (2.0 * h),
        ];
        for a in 0..3 {
            assert!((num[a] - j.g[a]).abs() < 1e-7, "{a}: {} {}", num[a], j.g[a]);
        }
        let hx = (f.jet(t, x + h, y).g[2] - f.jet(t, x - h, y).g[2]) / (2.0 * h);
        assert!((hx - j.h[1][2]).abs() < 1e-6);
    }

    #[test]
    fn translated_gaussian_has_a_finite_positive_constant() {
        let g = GaussianBump {
            center: [1.5, -0.5],
            scale: 0.8,
        };
        let c = testbench_klainerman(&g, 0.0).constant().unwrap();
        assert!(c.is_finite() && c > 0.0, "{c}");
    }

    #[test]
    fn polar_rule_integrates_the_wave_energy() {
        // ∫ B(s)² dx over the annulus for a radial wave at t=0, against 1-D
        // adaptive quadrature of 2πr·B²/(1+r).
        let f = catalog()[0];
        let rule = PolarRule::new(f.support(0.0).0, f.support(0.0).1);
        let (_, i) = rule.sup_and_integral(|x, y| (0.0, f.value(0.0, x, y).powi(2)));
        let exact = crate::numeric::integrate(
            |r| {
                let s = (r - f.center) / f.width;
                2.0 * PI * r * smooth_bump(s).0.powi(2) / (1.0 + r)
            },
            f.center - f.width + 1e-12,
            f.center + f.width - 1e-12,
            crate::numeric::QuadOptions::default(),
        )
        .unwrap()
        .value;
        assert!((i - exact).abs() < 1e-7 * exact, "{i} {exact}");
    }

    #[test]
    fn gradient_fields_satisfy_the_divcurl_identity() {
        // U = ∇φ is curl-free, so ‖∇U‖ equals ‖div U‖ up to stencil error.
        let g = Grid2D::new(4.0, 160).unwrap();
        let phi = |x: f64, y: f64| {
            let s = (x * x + y * y).sqrt() / 2.5;
            if s < 1.0 {
                smooth_bump(s).0
            } else {
                0.0
            }
        };
        let p = g.sample(phi);
        let u1 = d1(&p, &g, Axis::X1);
        let u2 = d1(&p, &g, Axis::X2);
        let s = testbench_divcurl(&u1, &u2, &g).unwrap();
        assert!((s.lhs - s.rhs).abs() < 1e-3 * s.rhs, "{:?}", s);
        let wide = Grid2D::new(2.6, 104).unwrap();
        let q = wide.sample(phi);
        assert!(matches!(
            testbench_divcurl(&q, &q, &wide),
            Err(Error::SupportViolation { .. })
        ));
    }
}
