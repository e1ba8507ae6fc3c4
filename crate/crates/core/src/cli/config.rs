//! Experiment configuration: JSON with decimal strings for `λ` and `μ`,
//! validated field by field and hashed for the output headers.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::burgers::{ProfileFamily, Scheme};
use crate::damping::{DampingLaw, GasLaw};
use crate::error::{Error, Result};
use crate::euler2d::data::DataFamily;
use crate::euler2d::{SolverConfig, TimeStep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Burgers,
    Euler2d,
    Diagnose,
    Testbench,
    SpecfunCheck,
    Sweep,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Burgers => "burgers",
            Mode::Euler2d => "euler2d",
            Mode::Diagnose => "diagnose",
            Mode::Testbench => "testbench",
            Mode::SpecfunCheck => "specfun-check",
            Mode::Sweep => "sweep",
        }
    }
}

/// `α(t) = μ/(1+t)^λ` with both parameters as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSpec {
    pub mu: String,
    pub lambda: String,
}

impl LawSpec {
    pub fn new(mu: &str, lambda: &str) -> Self {
        Self {
            mu: mu.into(),
            lambda: lambda.into(),
        }
    }

    pub fn law(&self, path: &str) -> Result<DampingLaw> {
        DampingLaw::from_decimal(&self.mu, &self.lambda).map_err(|e| Error::config(path, e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSpec {
    pub gamma: f64,
    pub rho_bar: f64,
}

impl GasSpec {
    pub fn gas(&self, path: &str) -> Result<GasLaw> {
        GasLaw::new(self.gamma, self.rho_bar).map_err(|e| Error::config(path, e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BurgersGridSpec {
    pub nx: usize,
    pub scheme: Scheme,
    pub cfl: f64,
    pub slope_factor: f64,
    /// Times at which the grid solution is compared with the exact one.
    pub compare_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BurgersSpec {
    pub profile: ProfileFamily,
    /// Rescales the profile so that `min v₀' = min_slope`.
    pub min_slope: Option<f64>,
    pub samples: usize,
    pub grid: Option<BurgersGridSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripConfig {
    pub m0: f64,
    pub m_tilde: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Euler2dSpec {
    pub family: DataFamily,
    pub n: usize,
    /// Half-width `L` of `[-L, L]²`; `t_end + M + 2` when absent.
    pub half_width: Option<f64>,
    pub sample_interval: f64,
    pub cfl: f64,
    pub sigma: f64,
    pub step: TimeStep,
    pub gradient_factor: f64,
    /// Keep running past the first crossing until this factor.
    pub stop_factor: Option<f64>,
    /// Factors whose first crossing times are reported.
    pub thresholds: Vec<f64>,
    pub energies: bool,
    /// Strip radii for `P` and `F`; requires outgoing-momentum data.
    pub strip: Option<StripConfig>,
    /// Write a DEL1 snapshot every this many samples; none when absent.
    pub snapshot_every: Option<usize>,
}

impl Euler2dSpec {
    pub fn solver_config(&self, m: f64) -> SolverConfig {
        SolverConfig {
            cfl: self.cfl,
            sigma: self.sigma,
            support_radius: Some(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseSpec {
    /// Directory of DEL1 snapshots, read in time order.
    pub snapshots: PathBuf,
    pub strip: Option<StripConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestbenchSpec {
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecfunSpec {
    /// Random `(law, z)` samples for the series checks.
    pub samples: usize,
    /// Laws for `δ₀` and the adjoint identity.
    pub laws: Vec<LawSpec>,
    /// Interior points per law for the adjoint identity.
    pub adjoint_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Burgers,
    Euler2d,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub lambdas: Vec<String>,
    pub mus: Vec<String>,
    pub eps: Vec<f64>,
    /// Largest number of cells the sweep may run.
    pub budget: usize,
}

impl SweepSpec {
    pub fn cells(&self) -> usize {
        self.lambdas.len() * self.mus.len() * self.eps.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub law: LawSpec,
    pub gas: GasSpec,
    pub eps: f64,
    /// Support radius `M` of the initial data.
    pub m: f64,
    pub t_end: f64,
    pub seed: u64,
    /// Output directory; the `--out` flag takes precedence.
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burgers: Option<BurgersSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler2d: Option<Euler2dSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnose: Option<DiagnoseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub testbench: Option<TestbenchSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specfun: Option<SpecfunSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

pub fn default_burgers() -> BurgersSpec {
    BurgersSpec {
        profile: ProfileFamily::Bump { amplitude: 1.0 },
        min_slope: Some(-1.0),
        samples: 2001,
        grid: Some(BurgersGridSpec {
            nx: 4096,
            scheme: Scheme::Muscl,
            cfl: 0.45,
            slope_factor: 10.0,
            compare_times: vec![30.0],
        }),
    }
}

pub fn default_euler2d() -> Euler2dSpec {
    Euler2dSpec {
        family: DataFamily::DensityVortex { density: 1.0, swirl: 1.0 },
        n: 256,
        half_width: None,
        sample_interval: 1.0,
        cfl: 0.4,
        sigma: 0.01,
        step: TimeStep::Cfl,
        gradient_factor: 1e3,
        stop_factor: None,
        thresholds: vec![1e2, 1e3, 1e4],
        energies: true,
        strip: None,
        snapshot_every: None,
    }
}

impl ExperimentConfig {
    /// A runnable configuration for `mode`: the Burgers exact-vs-grid
    /// probe, the subcritical vortex run, the inequality catalog, the
    /// series checks or the 18-cell Burgers phase diagram.
    pub fn default_for(mode: Mode) -> Self {
        let mut c = ExperimentConfig {
            mode,
            law: LawSpec::new("1", "0.5"),
            gas: GasSpec { gamma: 2.0, rho_bar: 1.0 },
            eps: 0.05,
            m: 4.0,
            t_end: 40.0,
            seed: 0,
            out: None,
            burgers: None,
            euler2d: None,
            diagnose: None,
            testbench: None,
            specfun: None,
            sweep: None,
        };
        match mode {
            Mode::Burgers => {
                c.law = LawSpec::new("0.5", "1");
                c.eps = 0.1;
                c.m = 1.0;
                c.t_end = 60.0;
                c.burgers = Some(default_burgers());
            }
            Mode::Euler2d => c.euler2d = Some(default_euler2d()),
            Mode::Diagnose => {
                c.diagnose = Some(DiagnoseSpec {
                    snapshots: PathBuf::from("snapshots"),
                    strip: None,
                })
            }
            Mode::Testbench => c.testbench = Some(TestbenchSpec { times: vec![0.0, 5.0, 20.0] }),
            Mode::SpecfunCheck => {
                c.specfun = Some(SpecfunSpec {
                    samples: 100,
                    laws: vec![LawSpec::new("1", "1"), LawSpec::new("1", "1.5"), LawSpec::new("1", "2")],
                    adjoint_points: 20,
                })
            }
            Mode::Sweep => {
                c.eps = 1e-3;
                c.m = 1.0;
                c.burgers = Some(BurgersSpec {
                    grid: None,
                    ..default_burgers()
                });
                c.sweep = Some(SweepSpec {
                    kind: SweepKind::Burgers,
                    lambdas: ["0", "0.5", "0.9", "1", "1.1", "2"].map(String::from).to_vec(),
                    mus: ["0.5", "1", "2"].map(String::from).to_vec(),
                    eps: vec![1e-3],
                    budget: 64,
                });
            }
        }
        c
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
            let path = if e.line() > 0 {
                format!("line {} column {}", e.line(), e.column())
            } else {
                "<root>".into()
            };
            Error::config(path, e.to_string())
        })?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical JSON, lower-case hex. The output directory
    /// is left out so that moving a run does not change its files.
    pub fn hash(&self) -> String {
        let canonical = ExperimentConfig { out: None, ..self.clone() };
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        format!("{:x}", Sha256::digest(bytes))
    }

    pub fn damping(&self) -> Result<DampingLaw> {
        self.law.law("law")
    }

    pub fn gas_law(&self) -> Result<GasLaw> {
        self.gas.gas("gas")
    }

    /// Checks every physical parameter and that the section for `mode` is
    /// present; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        self.damping()?;
        self.gas_law()?;
        let positive = |path: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(path, format!("must be positive and finite, got {v}")))
            }
        };
        positive("eps", self.eps)?;
        positive("m", self.m)?;
        positive("t_end", self.t_end)?;
        let missing = |section: &str| Error::config(section, format!("section is required for mode `{}`", self.mode.name()));
        match self.mode {
            Mode::Burgers => {
                let b = self.burgers.as_ref().ok_or_else(|| missing("burgers"))?;
                validate_burgers(b)?;
            }
            Mode::Euler2d => {
                let e = self.euler2d.as_ref().ok_or_else(|| missing("euler2d"))?;
                positive("euler2d.sample_interval", e.sample_interval)?;
                positive("euler2d.gradient_factor", e.gradient_factor)?;
                if e.n < crate::euler2d::grid::MIN_CELLS {
                    return Err(Error::config("euler2d.n", format!("need at least {} cells", crate::euler2d::grid::MIN_CELLS)));
                }
                if !(e.cfl > 0.0 && e.cfl <= 1.0) {
                    return Err(Error::config("euler2d.cfl", format!("must lie in (0, 1], got {}", e.cfl)));
                }
                if !(e.sigma >= 0.0) {
                    return Err(Error::config("euler2d.sigma", format!("must be non-negative, got {}", e.sigma)));
                }
                if let Some(h) = e.half_width {
                    if !(h > self.m) {
                        return Err(Error::config("euler2d.half_width", format!("must exceed M = {}, got {h}", self.m)));
                    }
                }
                if let TimeStep::Fixed { dt } = e.step {
                    positive("euler2d.step.dt", dt)?;
                }
                if e.thresholds.iter().any(|f| !(*f > 0.0)) {
                    return Err(Error::config("euler2d.thresholds", "factors must be positive"));
                }
                if let Some(s) = e.strip {
                    validate_strip("euler2d.strip", s, self.m)?;
                    if !matches!(e.family, DataFamily::OutgoingMomentum { .. }) {
                        return Err(Error::config("euler2d.strip", "blowup diagnostics need the outgoing_momentum family"));
                    }
                    if crate::damping::classify_case(&self.damping()?, 2)?.expects_global() {
                        return Err(Error::config("euler2d.strip", "blowup diagnostics need a Case 3 or Case 4 law"));
                    }
                }
                if e.snapshot_every == Some(0) {
                    return Err(Error::config("euler2d.snapshot_every", "must be at least 1"));
                }
            }
            Mode::Diagnose => {
                let d = self.diagnose.as_ref().ok_or_else(|| missing("diagnose"))?;
                if let Some(s) = d.strip {
                    validate_strip("diagnose.strip", s, self.m)?;
                }
            }
            Mode::Testbench => {
                let t = self.testbench.as_ref().ok_or_else(|| missing("testbench"))?;
                if t.times.is_empty() || t.times.iter().any(|t| !(*t >= 0.0)) {
                    return Err(Error::config("testbench.times", "need at least one non-negative time"));
                }
            }
            Mode::SpecfunCheck => {
                let s = self.specfun.as_ref().ok_or_else(|| missing("specfun"))?;
                for (k, l) in s.laws.iter().enumerate() {
                    let path = format!("specfun.laws[{k}]");
                    crate::specfun::prod_ab(&l.law(&path)?).map_err(|e| Error::config(path, e.to_string()))?;
                }
            }
            Mode::Sweep => {
                let s = self.sweep.as_ref().ok_or_else(|| missing("sweep"))?;
                if s.cells() == 0 {
                    return Err(Error::config("sweep", "empty sweep: lambdas, mus and eps must all be non-empty"));
                }
                if s.cells() > s.budget {
                    return Err(Error::config("sweep.budget", format!("{} cells exceed the budget of {}", s.cells(), s.budget)));
                }
                for (k, l) in s.lambdas.iter().enumerate() {
                    for (j, m) in s.mus.iter().enumerate() {
                        LawSpec::new(m, l).law(&format!("sweep.lambdas[{k}] / sweep.mus[{j}]"))?;
                    }
                }
                for (k, e) in s.eps.iter().enumerate() {
                    positive(&format!("sweep.eps[{k}]"), *e)?;
                }
                match s.kind {
                    SweepKind::Burgers => validate_burgers(self.burgers.as_ref().ok_or_else(|| missing("burgers"))?)?,
                    SweepKind::Euler2d => {
                        self.euler2d.as_ref().ok_or_else(|| missing("euler2d"))?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn validate_burgers(b: &BurgersSpec) -> Result<()> {
    if b.samples < 3 {
        return Err(Error::config("burgers.samples", "need at least 3 samples"));
    }
    if let Some(m) = b.min_slope {
        if !(m < 0.0) {
            return Err(Error::config("burgers.min_slope", format!("must be negative, got {m}")));
        }
    }
    if let Some(g) = &b.grid {
        if g.nx < 8 {
            return Err(Error::config("burgers.grid.nx", "need at least 8 cells"));
        }
        if !(g.cfl > 0.0 && g.cfl <= 1.0) {
            return Err(Error::config("burgers.grid.cfl", format!("must lie in (0, 1], got {}", g.cfl)));
        }
        if !(g.slope_factor > 1.0) {
            return Err(Error::config("burgers.grid.slope_factor", "must exceed 1"));
        }
    }
    Ok(())
}

fn validate_strip(path: &str, s: StripConfig, m: f64) -> Result<()> {
    if !(0.0 <= s.m_tilde && s.m_tilde < m) {
        return Err(Error::config(format!("{path}.m_tilde"), format!("need 0 <= m_tilde < M = {m}")));
    }
    if !(0.0 < s.m0 && s.m0 < m) {
        return Err(Error::config(format!("{path}.m0"), format!("need 0 < m0 < M = {m}")));
    }
    Ok(())
}
