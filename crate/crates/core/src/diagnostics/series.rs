//! Time series of diagnostics collected while a 2-D run advances, and the
//! blowup suite evaluated on it afterwards.

use serde::Serialize;

use super::energy::{energy_cal_e, energy_e};
use super::functional::{f_functional, monitor_ode_inequalities, strip_grid, FSeries, OdeReport, StripSample, STRIP_INTERVALS};
use super::halfplane::{density, p_functional, q0};
use crate::damping::{CaseLabel, DampingLaw, GasLaw};
use crate::error::Result;
use crate::euler2d::stencil::{l2_norm, row_sums, sup_norm};
use crate::euler2d::{vorticity, FlowState2D, Grid2D, Observation};

/// Half-plane radii `M₀ < M` of the strip `[t+M₀, t+M]` on which `P` is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StripSpec {
    pub m0: f64,
    pub m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SeriesOptions {
    /// Record `𝓔₂` and `E₂` at every sample.
    pub energies: bool,
    pub strip: Option<StripSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRecord {
    pub t: f64,
    pub xi: f64,
    pub sup_theta: f64,
    pub sup_u: f64,
    /// `‖w‖` with `w = ∂₁u₂ - ∂₂u₁`.
    pub vorticity: f64,
    /// `∫ (ρ - ρ̄) dx`.
    pub mass: f64,
    pub cal_e2: Option<f64>,
    pub e2: Option<f64>,
    pub strip: Option<StripSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticSeries {
    pub label: CaseLabel,
    pub records: Vec<SeriesRecord>,
}

/// Builds a [`DiagnosticSeries`] from the observations of one run.
pub struct SeriesCollector {
    pub options: SeriesOptions,
    pub series: DiagnosticSeries,
    law: DampingLaw,
    gas: GasLaw,
    grid: Grid2D,
}

impl SeriesCollector {
    pub fn new(options: SeriesOptions, label: CaseLabel, law: DampingLaw, gas: GasLaw, grid: Grid2D) -> Self {
        Self {
            options,
            series: DiagnosticSeries {
                label,
                records: Vec::new(),
            },
            law,
            gas,
            grid,
        }
    }

    pub fn observe(&mut self, o: &Observation) -> Result<()> {
        let (cal_e2, e2) = if self.options.energies {
            (
                Some(energy_cal_e(o.history, o.center, 2, &self.law, &self.grid)?),
                Some(energy_e(o.history, o.center, 2, &self.grid)?),
            )
        } else {
            (None, None)
        };
        self.record(o.state(), cal_e2, e2)
    }

    /// Records a single stored level. Energies need neighbouring levels and
    /// are left empty.
    pub fn observe_level(&mut self, s: &FlowState2D) -> Result<()> {
        self.record(s, None, None)
    }

    fn record(&mut self, s: &FlowState2D, cal_e2: Option<f64>, e2: Option<f64>) -> Result<()> {
        let g = &self.grid;
        let rho = density(s, &self.gas)?;
        let rho_bar = self.gas.rho_bar();
        let mass = g.cell_area() * row_sums(&rho, g.n, |r| r - rho_bar);
        let strip = match self.options.strip {
            Some(StripSpec { m0, m }) => {
                let l = strip_grid(s.t, m0, m, STRIP_INTERVALS);
                let p = p_functional(s, &l, &self.gas, g)?;
                Some(StripSample { t: s.t, l, p })
            }
            None => None,
        };
        self.series.records.push(SeriesRecord {
            t: s.t,
            xi: self.law.xi(s.t),
            sup_theta: sup_norm(&s.theta),
            sup_u: sup_norm(&s.u1).max(sup_norm(&s.u2)),
            vorticity: l2_norm(&vorticity(s, g), g),
            mass,
            cal_e2,
            e2,
            strip,
        });
        Ok(())
    }
}

/// One comparison `P(t, t+l̄) ≥ ¼Ξ(t)^{-1/2}q₀(l̄)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundRow {
    pub t: f64,
    pub l_bar: f64,
    pub p: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupSuite {
    pub lower_bound: Vec<LowerBoundRow>,
    /// Smallest `P / bound` over the checked rows.
    pub lower_bound_min_ratio: f64,
    pub f: FSeries,
    pub ode: OdeReport,
    /// End of the checked window: `0.9·t_blowup`, or the last sample.
    pub t_stop: f64,
}

impl BlowupSuite {
    pub fn lower_bound_holds(&self) -> bool {
        !self.lower_bound.is_empty() && self.lower_bound.iter().all(|r| r.p >= r.bound)
    }
}

/// Evaluates the `P` lower bound, `F` and its inequality ratios on a series
/// that recorded strips. `rho0` is the initial density field.
#[allow(clippy::too_many_arguments)]
pub fn blowup_suite(
    series: &DiagnosticSeries,
    strip: StripSpec,
    rho0: &[f64],
    rho_bar: f64,
    grid: &Grid2D,
    law: &DampingLaw,
    eps: f64,
    gamma: f64,
    t_blowup: Option<f64>,
) -> Result<BlowupSuite> {
    let samples: Vec<StripSample> = series.records.iter().filter_map(|r| r.strip.clone()).collect();
    let last = samples.last().map_or(0.0, |s| s.t);
    let t_stop = t_blowup.map_or(last, |tb| 0.9 * tb);
    let l_bars: Vec<f64> = strip_grid(0.0, strip.m0, strip.m, STRIP_INTERVALS);
    let q0s: Vec<f64> = l_bars.iter().map(|&l| q0(rho0, grid, l, rho_bar)).collect();
    let mut lower_bound = Vec::new();
    for s in samples.iter().filter(|s| s.t <= t_stop) {
        let w = 0.25 / law.xi(s.t).sqrt();
        for (k, (&l_bar, &q)) in l_bars.iter().zip(&q0s).enumerate() {
            if q > 0.0 {
                lower_bound.push(LowerBoundRow {
                    t: s.t,
                    l_bar,
                    p: s.p[k],
                    bound: w * q,
                });
            }
        }
    }
    let lower_bound_min_ratio = lower_bound.iter().map(|r| r.p / r.bound).fold(f64::INFINITY, f64::min);
    let f = f_functional(&samples, strip.m0, strip.m)?;
    let ode = monitor_ode_inequalities(&f, eps, strip.m, gamma, series.label, t_stop)?;
    Ok(BlowupSuite {
        lower_bound,
        lower_bound_min_ratio,
        f,
        ode,
        t_stop,
    })
}
