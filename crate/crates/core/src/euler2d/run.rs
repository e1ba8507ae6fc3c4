//! Time-stepping driver: advances a [`Solver`], keeps the last three levels
//! for time derivatives, lands exactly on sample times and watches for
//! blowup.

use serde::{Deserialize, Serialize};

use super::blowup::{detect_blowup, max_gradient, BlowupKind, BlowupMonitor, BlowupReport, DEFAULT_GRADIENT_FACTOR};
use super::solver::Solver;
use super::state::FlowState2D;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeStep {
    /// `dt = cfl·h / max(|u|+c)` recomputed every step.
    Cfl,
    /// Constant `dt`; the run fails if it ever exceeds the CFL limit.
    Fixed { dt: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub t_end: f64,
    pub step: TimeStep,
    /// Spacing of observation times `0, Δ, 2Δ, …, t_end`.
    pub sample_interval: f64,
    /// Gradient factor whose first crossing is reported as blowup.
    pub gradient_factor: f64,
    /// The run stops once the gradient exceeds this factor (or on a
    /// non-finite value or loss of positivity). Defaults to
    /// `gradient_factor`; larger values let one run report several
    /// thresholds.
    pub stop_factor: Option<f64>,
}

impl RunOptions {
    pub fn new(t_end: f64, sample_interval: f64) -> Self {
        Self {
            t_end,
            step: TimeStep::Cfl,
            sample_interval,
            gradient_factor: DEFAULT_GRADIENT_FACTOR,
            stop_factor: None,
        }
    }
}

/// Three consecutive levels around an observation time. The observed level
/// is `history[center]`: the middle one, except at the initial time where
/// no earlier level exists.
pub struct Observation<'a> {
    pub history: &'a [FlowState2D],
    pub center: usize,
    pub solver: &'a Solver,
}

impl Observation<'_> {
    pub fn state(&self) -> &FlowState2D {
        &self.history[self.center]
    }

    pub fn t(&self) -> f64 {
        self.history[self.center].t
    }
}

/// Maximal gradient relative to its initial value after each step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientRecord {
    pub t: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub final_state: FlowState2D,
    pub blowup: Option<BlowupReport>,
    /// First non-finite value or loss of positivity, if any.
    pub breakdown: Option<BlowupReport>,
    pub gradients: Vec<GradientRecord>,
    pub steps: usize,
}

impl RunOutcome {
    /// First time the gradient ratio exceeds `factor`, or the breakdown time
    /// if that comes first.
    pub fn detection_time(&self, factor: f64) -> Option<f64> {
        let crossing = self.gradients.iter().find(|r| r.ratio > factor).map(|r| r.t);
        match (crossing, self.breakdown.map(|b| b.t)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// Advances `initial` to `t_end` (plus one step, so the last observation is
/// centred). `observe` is called at every sample time reached before the run
/// stops.
pub fn evolve<F>(solver: &mut Solver, initial: FlowState2D, opts: &RunOptions, mut observe: F) -> Result<RunOutcome>
where
    F: FnMut(&Observation) -> Result<()>,
{
    if !(opts.t_end > initial.t && opts.sample_interval > 0.0) {
        return Err(Error::param("t_end", "must exceed the initial time, with a positive sample interval"));
    }
    let grid = solver.grid;
    let monitor = BlowupMonitor::new(&initial, &grid, opts.gradient_factor);
    let stop_factor = opts.stop_factor.unwrap_or(opts.gradient_factor).max(opts.gradient_factor);
    let n_samples = ((opts.t_end - initial.t) / opts.sample_interval + 1e-9).floor() as usize;
    let t0 = initial.t;
    let sample_time = |k: usize| t0 + k as f64 * opts.sample_interval;

    let mut outcome = RunOutcome {
        final_state: initial.clone(),
        blowup: None,
        breakdown: None,
        gradients: Vec::new(),
        steps: 0,
    };
    let mut history: Vec<FlowState2D> = vec![initial];
    let mut initial_observed = false;
    let mut next_sample = 1usize;
    // Set when the newest level sits on a sample time; it is observed after
    // one more step.
    let mut landed = false;
    loop {
        let current = history.last().expect("history is never empty");
        let mut dt = match opts.step {
            TimeStep::Cfl => solver.stable_dt(current),
            TimeStep::Fixed { dt } => dt,
        };
        if !dt.is_finite() || dt <= 0.0 {
            let report = detect_blowup(current, &solver.gas, &grid, &monitor).unwrap_or(BlowupReport {
                t: current.t,
                kind: BlowupKind::NonFinite,
                x1: 0.0,
                x2: 0.0,
                value: dt,
            });
            outcome.breakdown = Some(report);
            outcome.blowup.get_or_insert(report);
            break;
        }
        let observe_after = landed;
        landed = false;
        if next_sample <= n_samples {
            let target = sample_time(next_sample);
            if current.t + dt >= target - 1e-12 * target.abs().max(1.0) {
                dt = target - current.t;
                next_sample += 1;
                landed = true;
            }
        }
        let next = solver.step(current, dt)?;
        outcome.steps += 1;
        let (g, _) = max_gradient(&next, &grid);
        let ratio = if monitor.initial_gradient > 0.0 {
            g / monitor.initial_gradient
        } else if g == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        outcome.gradients.push(GradientRecord { t: next.t, ratio });
        if let Some(report) = detect_blowup(&next, &solver.gas, &grid, &monitor) {
            if report.kind != BlowupKind::Gradient {
                outcome.breakdown = Some(report);
            }
            outcome.blowup.get_or_insert(report);
        }
        let stop = outcome.breakdown.is_some() || ratio.is_nan() || ratio > stop_factor;
        if history.len() == 3 {
            history.remove(0);
        }
        history.push(next);
        if stop {
            break;
        }
        if !initial_observed && history.len() == 3 {
            observe(&Observation {
                history: &history,
                center: 0,
                solver,
            })?;
            initial_observed = true;
        }
        if observe_after && history.len() == 3 {
            observe(&Observation {
                history: &history,
                center: 1,
                solver,
            })?;
        }
        if initial_observed && !landed && next_sample > n_samples {
            break;
        }
    }
    outcome.final_state = history.pop().expect("history is never empty");
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::damping::{DampingLaw, GasLaw};
    use crate::euler2d::{Grid2D, SolverConfig};

    fn k_is_initial(o: &Observation) -> bool {
        o.t() == 0.0
    }

    #[test]
    fn observations_land_on_sample_times() {
        let g = Grid2D::new(4.0, 32).unwrap();
        let law = DampingLaw::new(1.0, 0.5).unwrap();
        let gas = GasLaw::new(2.0, 1.0).unwrap();
        let mut s = Solver::new(g, law, gas, SolverConfig::default()).unwrap();
        let mut init = FlowState2D::zeros(&g);
        init.theta = g.sample(|x, y| 0.01 * (-(x * x + y * y)).exp());
        let mut seen = Vec::new();
        let out = evolve(&mut s, init, &RunOptions::new(1.0, 0.25), |o| {
            seen.push(o.t());
            if k_is_initial(o) {
                assert_eq!(o.center, 0);
            } else {
                assert!(o.history[0].t < o.t() && o.t() < o.history[2].t);
            }
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 5);
        for (k, t) in seen.iter().enumerate() {
            assert!((t - 0.25 * k as f64).abs() < 1e-12, "{t}");
        }
        assert!(out.blowup.is_none());
        assert!(out.final_state.t > 1.0);
    }
}
