//! Experiment orchestration behind the `damped-euler` binary: configs,
//! pipelines, the phase-diagram sweep, reproducible outputs and post-hoc
//! verification.

pub mod config;
pub mod output;
pub mod pipelines;
pub mod sweep;
pub mod verify;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, Mode};
pub use output::{Manifest, OutputDir};
pub use verify::{verify, Check};

use crate::error::{Error, Result};

/// Output directory: the explicit one, else the config's, else `out/<mode>`.
pub fn output_dir(cfg: &ExperimentConfig, explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(cfg.mode.name()))
}

/// Runs `cfg` into `dir` and writes the manifest. The config is stored as
/// `config.json` next to the tables.
pub fn run(cfg: &ExperimentConfig, dir: &Path) -> Result<Manifest> {
    cfg.validate()?;
    let mut out = OutputDir::create(dir, cfg.mode.name(), &cfg.hash())?;
    let mut json = cfg.to_json();
    json.push('\n');
    out.write_bytes("config.json", json.as_bytes())?;
    let missing = |s: &str| Error::config(s, "section missing");
    match cfg.mode {
        Mode::Burgers => pipelines::run_burgers(cfg, cfg.burgers.as_ref().ok_or_else(|| missing("burgers"))?, &mut out)?,
        Mode::Euler2d => pipelines::run_euler2d(cfg, cfg.euler2d.as_ref().ok_or_else(|| missing("euler2d"))?, &mut out)?,
        Mode::Diagnose => pipelines::run_diagnose(cfg, cfg.diagnose.as_ref().ok_or_else(|| missing("diagnose"))?, &mut out)?,
        Mode::Testbench => pipelines::run_testbench(cfg.testbench.as_ref().ok_or_else(|| missing("testbench"))?, &mut out)?,
        Mode::SpecfunCheck => pipelines::run_specfun(cfg, cfg.specfun.as_ref().ok_or_else(|| missing("specfun"))?, &mut out)?,
        Mode::Sweep => sweep::run_sweep(cfg, cfg.sweep.as_ref().ok_or_else(|| missing("sweep"))?, &mut out)?,
    }
    out.finish()
}
