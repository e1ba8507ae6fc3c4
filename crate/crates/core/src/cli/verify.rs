//! Post-hoc checks on an output directory: manifest hashes, CSV headers and
//! the invariants of the mode that produced it.

use std::fs;
use std::path::Path;

use super::config::{ExperimentConfig, Mode};
use super::output::{parse_csv, sha256_hex, Manifest, ParsedCsv, TOOL, VERSION};
use super::pipelines::{ADJOINT_STEP, PSI_FD_STEP};
use crate::damping::classify_case;
use crate::cli::config::LawSpec;
use crate::error::{Error, Result};

/// Tolerance of the derivative identity under central differences.
pub const DERIVATIVE_TOL: f64 = 1e-6;
/// Accepted Richardson ratio band for a second-order residual.
pub const RICHARDSON_BAND: (f64, f64) = (3.5, 4.5);
/// Largest relative drift of `∫(ρ-ρ̄)` over a run.
pub const MASS_DRIFT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn table(dir: &Path, name: &str) -> Result<ParsedCsv> {
    let path = dir.join(format!("{name}.csv"));
    parse_csv(&fs::read(&path)?, &path)
}

fn floats(t: &ParsedCsv, col: &str) -> Result<Vec<f64>> {
    Ok(t.floats(col)?.into_iter().flatten().collect())
}

fn value<'a>(t: &'a ParsedCsv, key: &str) -> Option<&'a str> {
    t.rows.iter().find(|r| r[0] == key).map(|r| r[1].as_str())
}

/// Runs every check that applies to `dir`.
pub fn verify(dir: &Path) -> Result<Vec<Check>> {
    let manifest = Manifest::load(dir)?;
    let cfg = ExperimentConfig::load(&dir.join("config.json"))?;
    let mut checks = Vec::new();

    let mut bad = Vec::new();
    for f in &manifest.files {
        match fs::read(dir.join(&f.path)) {
            Ok(bytes) if sha256_hex(&bytes) == f.sha256 && bytes.len() as u64 == f.bytes => {}
            Ok(_) => bad.push(format!("{} changed", f.path)),
            Err(e) => bad.push(format!("{}: {e}", f.path)),
        }
    }
    checks.push(Check::new("manifest_hashes", bad.is_empty(), if bad.is_empty() { format!("{} files", manifest.files.len()) } else { bad.join("; ") }));
    checks.push(Check::new(
        "config_hash",
        cfg.hash() == manifest.config_sha256,
        format!("manifest {} config.json {}", manifest.config_sha256, cfg.hash()),
    ));

    let mut bad = Vec::new();
    let first = format!("# {TOOL} {VERSION}");
    for f in manifest.files.iter().filter(|f| f.path.ends_with(".csv")) {
        let path = dir.join(&f.path);
        match fs::read(&path).map_err(Error::from).and_then(|b| parse_csv(&b, &path)) {
            Ok(t) if t.comments.first() == Some(&first) && t.config_hash() == Some(manifest.config_sha256.as_str()) && !t.columns.is_empty() => {}
            Ok(_) => bad.push(format!("{}: comment block does not match", f.path)),
            Err(e) => bad.push(e.to_string()),
        }
    }
    checks.push(Check::new("csv_headers", bad.is_empty(), bad.join("; ")));

    match cfg.mode {
        Mode::Burgers => burgers_checks(dir, &mut checks)?,
        Mode::Euler2d | Mode::Diagnose => series_checks(dir, &mut checks)?,
        Mode::Testbench => {
            let t = table(dir, "stability")?;
            let holds = t.column("holds").expect("holds column");
            let n = t.rows.iter().filter(|r| r[holds] != "1").count();
            checks.push(Check::new("testbench_positive_constants", n == 0, format!("{n} groups with a non-positive constant")));
        }
        Mode::SpecfunCheck => specfun_checks(dir, &mut checks)?,
        Mode::Sweep => sweep_checks(dir, &cfg, &mut checks)?,
    }
    Ok(checks)
}

fn burgers_checks(dir: &Path, checks: &mut Vec<Check>) -> Result<()> {
    let life = table(dir, "lifespan")?;
    let fin = floats(&life, "integral_finite")?;
    let glob = floats(&life, "global")?;
    // A global lifespan needs a finite integral.
    let ok = fin.iter().zip(&glob).all(|(f, g)| *g == 0.0 || *f == 1.0);
    checks.push(Check::new("lifespan_consistent", ok, "global implies a finite damping integral"));
    if dir.join("burgers_summary.csv").exists() {
        let s = table(dir, "burgers_summary")?;
        if let Some(rel) = value(&s, "relative_error").and_then(|v| v.parse::<f64>().ok()) {
            checks.push(Check::new("grid_detection_within_5pct", rel.abs() <= 0.05, format!("relative error {rel}")));
        }
        let c = table(dir, "burgers_compare")?;
        let errs = floats(&c, "sup_error")?;
        let finite = errs.iter().all(|e| e.is_finite());
        checks.push(Check::new("grid_comparison_finite", finite, format!("{} comparison times", errs.len())));
    }
    Ok(())
}

fn series_checks(dir: &Path, checks: &mut Vec<Check>) -> Result<()> {
    let s = table(dir, "series")?;
    let mut finite = true;
    for col in ["t", "xi", "sup_theta", "sup_u", "vorticity", "mass"] {
        finite &= floats(&s, col)?.iter().all(|v| v.is_finite());
    }
    checks.push(Check::new("series_finite", finite, format!("{} records", s.rows.len())));
    let mass = floats(&s, "mass")?;
    if let Some(&m0) = mass.first() {
        if m0.abs() > 0.0 {
            let drift = mass.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max) / m0.abs();
            checks.push(Check::new("mass_conservation", drift < MASS_DRIFT_TOL, format!("relative drift {drift:e}")));
        }
    }
    Ok(())
}

fn specfun_checks(dir: &Path, checks: &mut Vec<Check>) -> Result<()> {
    let psi = table(dir, "psi")?;
    let worst = floats(&psi, "relative_error")?.into_iter().fold(0.0, f64::max);
    checks.push(Check::new(
        "psi_derivative_identity",
        worst <= DERIVATIVE_TOL,
        format!("worst relative error {worst:e} at h = {PSI_FD_STEP}"),
    ));
    let d = table(dir, "delta0")?;
    let holds = floats(&d, "window_holds")?;
    checks.push(Check::new("delta0_window", holds.iter().all(|h| *h == 1.0), format!("{} laws", holds.len())));
    let r = table(dir, "riemann")?;
    let ratios = floats(&r, "ratio")?;
    let lambdas = floats(&r, "lambda")?;
    let brackets = floats(&r, "bracket")?;
    let (lo, hi) = RICHARDSON_BAND;
    let outside = ratios.iter().filter(|q| !(lo..=hi).contains(*q)).count();
    checks.push(Check::new(
        "adjoint_second_order",
        outside == 0,
        format!("{outside} of {} ratios outside [{lo}, {hi}] at h = {ADJOINT_STEP}", ratios.len()),
    ));
    let nonzero = lambdas.iter().zip(&brackets).filter(|(l, b)| **l == 1.0 && **b != 0.0).count();
    checks.push(Check::new("bracket_zero_at_lambda_1", nonzero == 0, format!("{nonzero} nonzero brackets")));
    Ok(())
}

fn sweep_checks(dir: &Path, cfg: &ExperimentConfig, checks: &mut Vec<Check>) -> Result<()> {
    let t = table(dir, "phase_diagram")?;
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::config("sweep", "missing"))?;
    checks.push(Check::new(
        "one_row_per_cell",
        t.rows.len() == sweep.cells(),
        format!("{} rows for {} cells", t.rows.len(), sweep.cells()),
    ));
    let col = |n: &str| t.column(n).expect("phase_diagram column");
    let (lc, mc, ec, cc, oc) = (col("lambda"), col("mu"), col("eps"), col("case"), col("outcome"));
    let mut mislabeled = 0;
    let mut failed = 0;
    let mut dichotomy = 0;
    for r in &t.rows {
        let law = LawSpec::new(&r[mc], &r[lc]).law("phase_diagram")?;
        if classify_case(&law, 2)?.to_string() != r[cc] {
            mislabeled += 1;
        }
        if r[oc] == "failed" {
            failed += 1;
        }
        let eps: f64 = r[ec].parse().map_err(|e| Error::config("phase_diagram.eps", format!("{e}")))?;
        if matches!(sweep.kind, super::config::SweepKind::Burgers) && eps <= 1e-3 {
            let global = law.lambda() < 1.0 || (law.lambda() == 1.0 && law.mu() > 1.0);
            if global != (r[oc] == "global") {
                dichotomy += 1;
            }
        }
    }
    checks.push(Check::new("case_labels", mislabeled == 0, format!("{mislabeled} mismatches")));
    checks.push(Check::new("no_failed_cells", failed == 0, format!("{failed} failed")));
    if matches!(sweep.kind, super::config::SweepKind::Burgers) {
        checks.push(Check::new("burgers_dichotomy", dichotomy == 0, format!("{dichotomy} cells disagree at eps <= 1e-3")));
    }
    Ok(())
}
