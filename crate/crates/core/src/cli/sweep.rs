//! Phase-diagram sweep over `(λ, μ, ε)` cells. Cells run in parallel with
//! no shared state and are collected in grid order, so the table does not
//! depend on scheduling. A failing cell is recorded and the sweep goes on.

use rayon::prelude::*;

use super::config::{ExperimentConfig, LawSpec, SweepKind, SweepSpec};
use super::output::{num, opt, OutputDir, Table};
use super::pipelines::{burgers_profile, simulate};
use crate::burgers::{lifespan, Lifespan};
use crate::damping::classify_case;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CellRow {
    pub lambda: String,
    pub mu: String,
    pub eps: f64,
    /// Empty when the law itself is rejected.
    pub case: String,
    /// `global`, `global_to_t_end`, `blowup` or `failed`.
    pub outcome: String,
    pub t_blowup: Option<f64>,
    /// `ln(1+T)` for finite Burgers lifespans, which may overflow `T`.
    pub lifespan_log1p: Option<f64>,
    pub detail: String,
}

fn run_cell(cfg: &ExperimentConfig, kind: SweepKind, lambda: &str, mu: &str, eps: f64) -> Result<CellRow> {
    let law = LawSpec::new(mu, lambda).law("sweep")?;
    let case = classify_case(&law, 2)?.to_string();
    let row = |outcome: &str, t_blowup, lifespan_log1p| CellRow {
        lambda: lambda.into(),
        mu: mu.into(),
        eps,
        case: case.clone(),
        outcome: outcome.into(),
        t_blowup,
        lifespan_log1p,
        detail: String::new(),
    };
    match kind {
        SweepKind::Burgers => {
            let spec = cfg.burgers.as_ref().ok_or_else(|| Error::config("burgers", "required by the burgers sweep"))?;
            let profile = burgers_profile(spec, cfg.m)?;
            Ok(match lifespan(&profile, eps, &law)? {
                Lifespan::Global => row("global", None, None),
                life @ Lifespan::Finite { log1p } => row("blowup", Some(life.time()), Some(log1p)),
            })
        }
        SweepKind::Euler2d => {
            let spec = cfg.euler2d.as_ref().ok_or_else(|| Error::config("euler2d", "required by the euler2d sweep"))?;
            let spec = crate::cli::config::Euler2dSpec {
                strip: None,
                snapshot_every: None,
                ..spec.clone()
            };
            let sim = simulate(cfg, &spec, law, eps)?;
            Ok(match sim.blowup_time {
                Some(t) => row("blowup", Some(t), None),
                None => row("global_to_t_end", None, None),
            })
        }
    }
}

/// One row per cell, `λ` outermost, then `μ`, then `ε`.
pub fn phase_diagram(cfg: &ExperimentConfig, sweep: &SweepSpec) -> Result<Vec<CellRow>> {
    if sweep.cells() == 0 {
        return Err(Error::config("sweep", "empty sweep: lambdas, mus and eps must all be non-empty"));
    }
    if sweep.cells() > sweep.budget {
        return Err(Error::config("sweep.budget", format!("{} cells exceed the budget of {}", sweep.cells(), sweep.budget)));
    }
    let mut cells = Vec::with_capacity(sweep.cells());
    for l in &sweep.lambdas {
        for m in &sweep.mus {
            for &e in &sweep.eps {
                cells.push((l.as_str(), m.as_str(), e));
            }
        }
    }
    Ok(cells
        .par_iter()
        .map(|&(l, m, e)| {
            run_cell(cfg, sweep.kind, l, m, e).unwrap_or_else(|err| CellRow {
                lambda: l.into(),
                mu: m.into(),
                eps: e,
                case: LawSpec::new(m, l)
                    .law("sweep")
                    .and_then(|law| classify_case(&law, 2))
                    .map(|c| c.to_string())
                    .unwrap_or_default(),
                outcome: "failed".into(),
                t_blowup: None,
                lifespan_log1p: None,
                detail: err.to_string(),
            })
        })
        .collect())
}

pub fn phase_table(rows: &[CellRow]) -> Table {
    let mut t = Table::new(
        "phase_diagram",
        &["lambda", "mu", "eps", "case", "outcome", "t_blowup", "lifespan_log1p", "detail"],
    );
    for r in rows {
        t.push(vec![
            r.lambda.clone(),
            r.mu.clone(),
            num(r.eps),
            r.case.clone(),
            r.outcome.clone(),
            opt(r.t_blowup),
            opt(r.lifespan_log1p),
            r.detail.clone(),
        ]);
    }
    t
}

pub fn run_sweep(cfg: &ExperimentConfig, sweep: &SweepSpec, out: &mut OutputDir) -> Result<()> {
    out.write_table(&phase_table(&phase_diagram(cfg, sweep)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::Mode;

    #[test]
    fn failed_cells_are_recorded_and_the_sweep_continues() {
        let mut cfg = ExperimentConfig::default_for(Mode::Sweep);
        let s = cfg.sweep.as_mut().unwrap();
        s.lambdas = vec!["1".into(), "-1".into()];
        s.mus = vec!["0.5".into()];
        let sweep = s.clone();
        let rows = phase_diagram(&cfg, &sweep).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].outcome, "blowup");
        assert_eq!(rows[0].case, "Case3");
        assert_eq!(rows[1].outcome, "failed");
        assert!(rows[1].detail.contains("lambda"), "{}", rows[1].detail);
    }

    #[test]
    fn empty_and_over_budget_sweeps_are_usage_errors() {
        let cfg = ExperimentConfig::default_for(Mode::Sweep);
        let mut s = cfg.sweep.clone().unwrap();
        s.mus.clear();
        assert!(matches!(phase_diagram(&cfg, &s), Err(Error::Config { .. })));
        let mut s = cfg.sweep.clone().unwrap();
        s.budget = 3;
        assert!(matches!(phase_diagram(&cfg, &s), Err(Error::Config { .. })));
    }
}
