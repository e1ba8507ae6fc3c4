//! One pipeline per subcommand. Each turns a validated config into tables
//! and snapshots in an [`OutputDir`].

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{BurgersSpec, DiagnoseSpec, Euler2dSpec, ExperimentConfig, LawSpec, SpecfunSpec, StripConfig, TestbenchSpec};
use super::output::{flag, num, opt, OutputDir, Table};
use crate::burgers::{exact_value, grid_solve, lifespan, GridOptions, InitialProfile, Lifespan};
use crate::damping::{classify_case, integral_is_finite, CaseLabel, DampingLaw, GasLaw};
use crate::diagnostics::testbench::{run_catalog, stability};
use crate::diagnostics::{
    blowup_suite, density, f_functional, BlowupData, BlowupSuite, ConditionReport, DiagnosticSeries, FSeries, SeriesCollector,
    SeriesOptions, StripSpec,
};
use crate::error::{Error, Result};
use crate::euler2d::data::{sample, DataFamily};
use crate::euler2d::{evolve, init_state, snapshot, FlowState2D, Grid2D, RunOptions, RunOutcome, Solver};
use crate::specfun::{
    adjoint_bracket, adjoint_residual, delta0_search, prod_ab, psi, psi_shifted, window_holds, CharPoint, HyperParams, DELTA0_SAMPLES,
};

/// Finite-difference step of the derivative identity check.
pub const PSI_FD_STEP: f64 = 1e-4;
/// Coarse step of the adjoint Richardson check; the fine step is half.
pub const ADJOINT_STEP: f64 = 1e-2;
/// Verification resolution of the bound window relative to the search.
pub const WINDOW_REFINEMENT: usize = 10;
/// Interior points per interval for the initial-data conditions.
const CONDITION_SAMPLES: usize = 64;

fn label_of(law: &DampingLaw) -> Result<CaseLabel> {
    classify_case(law, 2)
}

fn key_value(name: &str, pairs: Vec<(&str, String)>) -> Table {
    let mut t = Table::new(name, &["key", "value"]);
    for (k, v) in pairs {
        t.push(vec![k.into(), v]);
    }
    t
}

fn lifespan_cells(life: Lifespan) -> (String, String) {
    match life {
        Lifespan::Global => (String::new(), num(f64::INFINITY)),
        Lifespan::Finite { log1p } => (num(log1p), num(life.time())),
    }
}

pub fn burgers_profile(spec: &BurgersSpec, m: f64) -> Result<InitialProfile> {
    match spec.min_slope {
        Some(slope) => InitialProfile::slope_normalized(spec.profile, m, slope, spec.samples),
        None => InitialProfile::new(spec.profile, m, spec.samples),
    }
}

/// Lifespan table and, when configured, the grid run checked against the
/// characteristic solution.
pub fn run_burgers(cfg: &ExperimentConfig, spec: &BurgersSpec, out: &mut OutputDir) -> Result<()> {
    let law = cfg.damping()?;
    let profile = burgers_profile(spec, cfg.m)?;
    let life = lifespan(&profile, cfg.eps, &law)?;
    let (log1p, time) = lifespan_cells(life);
    let mut t = Table::new(
        "lifespan",
        &["mu", "lambda", "eps", "support", "min_slope", "integral_finite", "global", "lifespan_log1p", "lifespan"],
    );
    t.push(vec![
        cfg.law.mu.clone(),
        cfg.law.lambda.clone(),
        num(cfg.eps),
        num(cfg.m),
        num(profile.min_slope()),
        flag(integral_is_finite(&law)),
        flag(life.is_global()),
        log1p,
        time,
    ]);
    out.write_table(&t)?;

    let Some(g) = &spec.grid else { return Ok(()) };
    let opts = GridOptions {
        nx: g.nx,
        scheme: g.scheme,
        cfl: g.cfl,
        slope_factor: g.slope_factor,
        half_width: None,
        snapshot_times: g.compare_times.clone(),
        stop_at_blowup: true,
    };
    let sol = grid_solve(&profile, cfg.eps, &law, cfg.t_end, &opts)?;
    let predicted = life.time();
    let mut series = Table::new("burgers_series", &["t", "sup_v", "max_slope", "lifespan_prediction"]);
    for r in &sol.series {
        series.push(vec![num(r.t), num(r.sup_v), num(r.max_slope), num(predicted)]);
    }
    out.write_table(&series)?;

    let exact_at = |t: f64| -> Result<Option<Vec<f64>>> {
        if !life.exceeds(t) {
            return Ok(None);
        }
        sol.x.par_iter().map(|&x| exact_value(&profile, cfg.eps, &law, t, x)).collect::<Result<Vec<f64>>>().map(Some)
    };
    let mut fin = Table::new("burgers_final", &["x", "v", "v_exact"]);
    let exact = exact_at(sol.final_state.t)?;
    for (k, (&x, &v)) in sol.x.iter().zip(&sol.final_state.v).enumerate() {
        fin.push(vec![num(x), num(v), opt(exact.as_ref().map(|e| e[k]))]);
    }
    out.write_table(&fin)?;

    let mut cmp = Table::new("burgers_compare", &["t", "sup_error", "sup_exact"]);
    for s in &sol.snapshots {
        if let Some(e) = exact_at(s.t)? {
            let err = s.v.iter().zip(&e).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let sup = e.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            cmp.push(vec![num(s.t), num(err), num(sup)]);
        }
    }
    out.write_table(&cmp)?;

    let rel = sol.blowup_time.filter(|_| predicted.is_finite()).map(|tb| (tb - predicted) / predicted);
    out.write_table(&key_value(
        "burgers_summary",
        vec![
            ("predicted_lifespan", num(predicted)),
            ("detected_blowup_time", opt(sol.blowup_time)),
            ("relative_error", opt(rel)),
            ("final_t", num(sol.final_state.t)),
            ("nx", g.nx.to_string()),
            ("slope_factor", num(g.slope_factor)),
        ],
    ))
}

/// Everything one 2-D run produces.
pub struct Simulation {
    pub grid: Grid2D,
    pub label: CaseLabel,
    pub series: DiagnosticSeries,
    pub outcome: RunOutcome,
    /// Detection time at the configured gradient factor.
    pub blowup_time: Option<f64>,
    pub suite: Option<BlowupSuite>,
    pub conditions: Option<DataConditions>,
    pub snapshots: Vec<FlowState2D>,
}

/// Admissibility of outgoing-momentum data.
pub struct DataConditions {
    pub delta0: f64,
    /// `Err` carries the violated parameter constraint.
    pub admissible: std::result::Result<(), String>,
    pub report: ConditionReport,
}

pub fn half_width(cfg: &ExperimentConfig, spec: &Euler2dSpec) -> f64 {
    spec.half_width.unwrap_or(cfg.t_end + cfg.m + 2.0)
}

/// Runs the 2-D solver for `law` and `eps` with the remaining parameters
/// from `cfg` and `spec`.
pub fn simulate(cfg: &ExperimentConfig, spec: &Euler2dSpec, law: DampingLaw, eps: f64) -> Result<Simulation> {
    let gas = cfg.gas_law()?;
    let grid = Grid2D::new(half_width(cfg, spec), spec.n)?;
    let label = label_of(&law)?;
    let data = sample(&spec.family, cfg.m, &gas, &grid)?;
    let initial = init_state(&gas, eps, &data.rho0, (&data.u1, &data.u2), &grid)?;
    let rho_init = density(&initial, &gas)?;
    let strip = spec.strip.map(|s| StripSpec { m0: s.m0, m: cfg.m });
    let conditions = match (spec.family, spec.strip) {
        (DataFamily::OutgoingMomentum { lambda_cap }, Some(s)) => Some(data_conditions(&law, &gas, &grid, &initial, &rho_init, cfg.m, s, lambda_cap)?),
        _ => None,
    };
    let mut solver = Solver::new(grid, law, gas, spec.solver_config(cfg.m))?;
    let mut collector = SeriesCollector::new(
        SeriesOptions {
            energies: spec.energies,
            strip,
        },
        label,
        law,
        gas,
        grid,
    );
    let max_threshold = spec.thresholds.iter().copied().fold(spec.gradient_factor, f64::max);
    let opts = RunOptions {
        t_end: cfg.t_end,
        step: spec.step,
        sample_interval: spec.sample_interval,
        gradient_factor: spec.gradient_factor,
        stop_factor: Some(spec.stop_factor.unwrap_or(spec.gradient_factor).max(max_threshold)),
    };
    let mut snapshots = Vec::new();
    let mut seen = 0usize;
    let outcome = evolve(&mut solver, initial, &opts, |o| {
        if let Some(every) = spec.snapshot_every {
            if seen % every == 0 {
                snapshots.push(o.state().clone());
            }
        }
        seen += 1;
        collector.observe(o)
    })?;
    let blowup_time = outcome.detection_time(spec.gradient_factor);
    let suite = match strip {
        Some(s) if !label.expects_global() => Some(blowup_suite(
            &collector.series,
            s,
            &rho_init,
            gas.rho_bar(),
            &grid,
            &law,
            eps,
            gas.gamma(),
            blowup_time,
        )?),
        _ => None,
    };
    Ok(Simulation {
        grid,
        label,
        series: collector.series,
        outcome,
        blowup_time,
        suite,
        conditions,
        snapshots,
    })
}

#[allow(clippy::too_many_arguments)]
fn data_conditions(
    law: &DampingLaw,
    gas: &GasLaw,
    grid: &Grid2D,
    initial: &FlowState2D,
    rho: &[f64],
    m: f64,
    strip: StripConfig,
    lambda_cap: f64,
) -> Result<DataConditions> {
    let delta0 = delta0_search(law)?;
    let data = BlowupData {
        m,
        m_tilde: strip.m_tilde,
        m0: strip.m0,
        lambda_cap,
        delta0,
    };
    let admissible = data.validate(prod_ab(law)?).map_err(|e| e.to_string());
    let momentum: Vec<f64> = rho.iter().zip(&initial.u1).map(|(r, u)| r * u).collect();
    let report = data.check_conditions(rho, &momentum, gas.rho_bar(), grid, CONDITION_SAMPLES);
    Ok(DataConditions {
        delta0,
        admissible,
        report,
    })
}

fn series_table(series: &DiagnosticSeries, blowup_time: Option<f64>) -> Table {
    let mut t = Table::new(
        "series",
        &["t", "xi", "sup_theta", "sup_u", "vorticity", "vorticity_xi13", "mass", "cal_e2", "e2", "blowup"],
    );
    for r in &series.records {
        t.push(vec![
            num(r.t),
            num(r.xi),
            num(r.sup_theta),
            num(r.sup_u),
            num(r.vorticity),
            num(r.vorticity * r.xi.cbrt()),
            num(r.mass),
            opt(r.cal_e2),
            opt(r.e2),
            flag(blowup_time.is_some_and(|tb| r.t >= tb)),
        ]);
    }
    t
}

fn strip_tables(series: &DiagnosticSeries, f: Option<&FSeries>, suite: Option<&BlowupSuite>) -> Vec<Table> {
    let mut tables = Vec::new();
    if series.records.iter().all(|r| r.strip.is_none()) {
        return tables;
    }
    let mut strips = Table::new("strips", &["t", "l", "p"]);
    for s in series.records.iter().filter_map(|r| r.strip.as_ref()) {
        for (l, p) in s.l.iter().zip(&s.p) {
            strips.push(vec![num(s.t), num(*l), num(*p)]);
        }
    }
    tables.push(strips);
    let f = suite.map(|s| &s.f).or(f);
    if let Some(f) = f {
        let mut ft = Table::new("functional", &["t", "f", "f1", "f2", "linear", "quadratic", "power", "in_window"]);
        for k in 0..f.t.len() {
            let row = suite.map(|s| s.ode.rows[k]);
            ft.push(vec![
                num(f.t[k]),
                num(f.f[k]),
                num(f.f1[k]),
                num(f.f2[k]),
                opt(row.map(|r| r.linear)),
                opt(row.and_then(|r| r.quadratic)),
                opt(row.and_then(|r| r.power)),
                row.map(|r| flag(r.in_window)).unwrap_or_default(),
            ]);
        }
        tables.push(ft);
    }
    if let Some(s) = suite {
        let mut lb = Table::new("lower_bound", &["t", "l_bar", "p", "bound", "holds"]);
        for r in &s.lower_bound {
            lb.push(vec![num(r.t), num(r.l_bar), num(r.p), num(r.bound), flag(r.p >= r.bound)]);
        }
        tables.push(lb);
    }
    tables
}

pub fn snapshot_name(k: usize) -> String {
    format!("snapshots/snap_{k:05}.del1")
}

pub fn run_euler2d(cfg: &ExperimentConfig, spec: &Euler2dSpec, out: &mut OutputDir) -> Result<()> {
    let sim = simulate(cfg, spec, cfg.damping()?, cfg.eps)?;
    out.write_table(&series_table(&sim.series, sim.blowup_time))?;
    let mut grads = Table::new("gradients", &["t", "ratio"]);
    for g in &sim.outcome.gradients {
        grads.push(vec![num(g.t), num(g.ratio)]);
    }
    out.write_table(&grads)?;
    let mut thr = Table::new("thresholds", &["factor", "detection_time"]);
    for &f in &spec.thresholds {
        thr.push(vec![num(f), opt(sim.outcome.detection_time(f))]);
    }
    out.write_table(&thr)?;
    for t in strip_tables(&sim.series, None, sim.suite.as_ref()) {
        out.write_table(&t)?;
    }
    for (k, s) in sim.snapshots.iter().enumerate() {
        out.write_bytes(&snapshot_name(k), &snapshot::encode(s, &sim.grid))?;
    }

    let blowup = sim.outcome.blowup;
    let mut pairs = vec![
        ("case", sim.label.to_string()),
        ("outcome", if sim.blowup_time.is_some() { "blowup" } else { "global_to_t_end" }.to_string()),
        ("blowup_time", opt(sim.blowup_time)),
        ("blowup_kind", blowup.map(|b| format!("{:?}", b.kind).to_lowercase()).unwrap_or_default()),
        ("blowup_x1", opt(blowup.map(|b| b.x1))),
        ("blowup_x2", opt(blowup.map(|b| b.x2))),
        ("breakdown_time", opt(sim.outcome.breakdown.map(|b| b.t))),
        ("steps", sim.outcome.steps.to_string()),
        ("final_t", num(sim.outcome.final_state.t)),
        ("n", spec.n.to_string()),
        ("half_width", num(sim.grid.half_width)),
    ];
    if let Some(c) = &sim.conditions {
        pairs.push(("delta0", num(c.delta0)));
        pairs.push(("data_admissible", c.admissible.clone().err().unwrap_or_else(|| "yes".into())));
        pairs.push(("min_q0", num(c.report.min_q0)));
        pairs.push(("min_momentum_margin", num(c.report.min_momentum_margin)));
    }
    if let Some(s) = &sim.suite {
        pairs.push(("t_stop", num(s.t_stop)));
        pairs.push(("lower_bound_min_ratio", num(s.lower_bound_min_ratio)));
        pairs.push(("lower_bound_holds", flag(s.lower_bound_holds())));
        pairs.push(("ode_window_start", num(s.ode.window.0)));
        pairs.push(("ode_window_end", num(s.ode.window.1)));
        pairs.push(("linear_inf", num(s.ode.linear_inf)));
        pairs.push(("nonlinear_inf", num(s.ode.nonlinear_inf)));
    }
    out.write_table(&key_value("summary", pairs))
}

/// Loads every `*.del1` file in `dir`, ordered by time.
pub fn load_snapshots(dir: &Path) -> Result<(Vec<FlowState2D>, Grid2D)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<PathBuf>>>()?
        .into_iter()
        .filter(|p| p.extension().is_some_and(|e| e == "del1"))
        .collect();
    paths.sort();
    let loaded: Vec<(FlowState2D, Grid2D)> = paths.par_iter().map(|p| snapshot::read(p)).collect::<Result<_>>()?;
    let Some((_, grid)) = loaded.first() else {
        return Err(Error::config("diagnose.snapshots", format!("no .del1 files in {}", dir.display())));
    };
    let grid = *grid;
    if let Some((k, _)) = loaded.iter().enumerate().find(|(_, (_, g))| *g != grid) {
        return Err(Error::Snapshot {
            path: paths[k].clone(),
            reason: "grid differs from the first snapshot".into(),
        });
    }
    let mut states: Vec<FlowState2D> = loaded.into_iter().map(|(s, _)| s).collect();
    states.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok((states, grid))
}

/// Level diagnostics of stored snapshots, plus strips and `F` when a strip
/// is configured. Energies need consecutive solver levels and stay empty.
pub fn run_diagnose(cfg: &ExperimentConfig, spec: &DiagnoseSpec, out: &mut OutputDir) -> Result<()> {
    let law = cfg.damping()?;
    let gas = cfg.gas_law()?;
    let label = label_of(&law)?;
    let (states, grid) = load_snapshots(&spec.snapshots)?;
    let strip = spec.strip.map(|s| StripSpec { m0: s.m0, m: cfg.m });
    let mut collector = SeriesCollector::new(SeriesOptions { energies: false, strip }, label, law, gas, grid);
    for s in &states {
        collector.observe_level(s)?;
    }
    out.write_table(&series_table(&collector.series, None))?;
    if let Some(s) = strip {
        let (suite, f) = if label.expects_global() {
            let samples: Vec<_> = collector.series.records.iter().filter_map(|r| r.strip.clone()).collect();
            (None, Some(f_functional(&samples, s.m0, s.m)?))
        } else {
            let rho0 = density(&states[0], &gas)?;
            (Some(blowup_suite(&collector.series, s, &rho0, gas.rho_bar(), &grid, &law, cfg.eps, gas.gamma(), None)?), None)
        };
        for t in strip_tables(&collector.series, f.as_ref(), suite.as_ref()) {
            out.write_table(&t)?;
        }
    }
    out.write_table(&key_value(
        "diagnose_summary",
        vec![
            ("case", label.to_string()),
            ("snapshots", states.len().to_string()),
            ("n", grid.n.to_string()),
            ("half_width", num(grid.half_width)),
            ("first_t", num(states[0].t)),
            ("last_t", num(states[states.len() - 1].t)),
        ],
    ))
}

pub fn run_testbench(spec: &TestbenchSpec, out: &mut OutputDir) -> Result<()> {
    let rows = run_catalog(&spec.times)?;
    let mut t = Table::new("testbench", &["inequality", "function", "t", "param", "lhs", "rhs", "constant"]);
    for r in &rows {
        t.push(vec![
            r.inequality.into(),
            r.function.clone(),
            num(r.t),
            num(r.param),
            num(r.lhs),
            num(r.rhs),
            num(r.constant),
        ]);
    }
    out.write_table(&t)?;
    let mut s = Table::new(
        "stability",
        &["inequality", "function", "param", "min_constant", "max_constant", "spread", "holds", "stable"],
    );
    for r in stability(&rows) {
        s.push(vec![
            r.inequality.into(),
            r.function,
            num(r.param),
            num(r.min_constant),
            num(r.max_constant),
            num(r.spread),
            flag(r.holds),
            r.stable.map(flag).unwrap_or_default(),
        ]);
    }
    out.write_table(&s)
}

/// A random law with `λ = 1` or `λ ∈ (1, 3)` and `μ ∈ (0.2, 3)`, and
/// `z ∈ (-0.5, 0]`.
pub fn random_psi_sample(rng: &mut ChaCha8Rng) -> Result<(DampingLaw, f64)> {
    let mu = rng.gen_range(0.2..3.0);
    let lambda = if rng.gen_bool(1.0 / 3.0) { 1.0 } else { rng.gen_range(1.0..3.0) };
    let z = -rng.gen_range(0.0..0.5);
    Ok((DampingLaw::new(mu, lambda)?, z))
}

/// `Ψ′` by central differences, switching to the second-order backward
/// formula where the forward point would leave `z ≤ 0`.
pub fn psi_derivative_fd(params: &HyperParams, z: f64, h: f64) -> Result<f64> {
    if z + h <= 0.0 {
        Ok((psi(params, z + h)? - psi(params, z - h)?) / (2.0 * h))
    } else {
        Ok((3.0 * psi(params, z)? - 4.0 * psi(params, z - h)? + psi(params, z - 2.0 * h)?) / (2.0 * h))
    }
}

/// A point `P` below `P_A` in both characteristic coordinates, with `|z| ≤ 1/8`.
pub fn random_char_pair(rng: &mut ChaCha8Rng) -> (CharPoint, CharPoint) {
    let pa = CharPoint::new(rng.gen_range(1.5..3.0), rng.gen_range(4.0..6.0));
    let p = CharPoint::new(pa.xi - rng.gen_range(0.1..0.5 * pa.xi), pa.zeta - rng.gen_range(0.1..0.5 * pa.zeta));
    (p, pa)
}

pub fn run_specfun(cfg: &ExperimentConfig, spec: &SpecfunSpec, out: &mut OutputDir) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut t = Table::new(
        "psi",
        &["sample", "mu", "lambda", "prod_ab", "z", "psi", "psi_shifted", "derivative_fd", "derivative_identity", "relative_error"],
    );
    for k in 0..spec.samples {
        let (law, z) = random_psi_sample(&mut rng)?;
        let params = HyperParams::from_law(&law, 1.0)?;
        let value = psi(&params, z)?;
        let shifted = psi_shifted(&params, z)?;
        let fd = psi_derivative_fd(&params, z, PSI_FD_STEP)?;
        let identity = params.prod_ab / params.c * shifted;
        let rel = (fd - identity).abs() / identity.abs().max(f64::MIN_POSITIVE);
        t.push(vec![
            k.to_string(),
            num(law.mu()),
            num(law.lambda()),
            num(params.prod_ab),
            num(z),
            num(value),
            num(shifted),
            num(fd),
            num(identity),
            num(rel),
        ]);
    }
    out.write_table(&t)?;

    let laws: Vec<(LawSpec, DampingLaw)> = spec
        .laws
        .iter()
        .enumerate()
        .map(|(k, l)| l.law(&format!("specfun.laws[{k}]")).map(|d| (l.clone(), d)))
        .collect::<Result<_>>()?;
    let mut d = Table::new("delta0", &["mu", "lambda", "prod_ab", "delta0", "window_samples", "window_holds"]);
    for (ls, law) in &laws {
        let delta0 = delta0_search(law)?;
        let samples = WINDOW_REFINEMENT * DELTA0_SAMPLES;
        d.push(vec![
            ls.mu.clone(),
            ls.lambda.clone(),
            num(prod_ab(law)?),
            num(delta0),
            samples.to_string(),
            flag(window_holds(law, delta0, samples)?),
        ]);
    }
    out.write_table(&d)?;

    let mut r = Table::new(
        "riemann",
        &["mu", "lambda", "point", "xi", "zeta", "xi_a", "zeta_a", "residual_h", "residual_h2", "ratio", "bracket"],
    );
    for (ls, law) in &laws {
        for k in 0..spec.adjoint_points {
            let (p, pa) = random_char_pair(&mut rng);
            let r1 = adjoint_residual(p, pa, law, ADJOINT_STEP)?;
            let r2 = adjoint_residual(p, pa, law, 0.5 * ADJOINT_STEP)?;
            r.push(vec![
                ls.mu.clone(),
                ls.lambda.clone(),
                k.to_string(),
                num(p.xi),
                num(p.zeta),
                num(pa.xi),
                num(pa.zeta),
                num(r1),
                num(r2),
                num(r1 / r2),
                num(adjoint_bracket(law, p.xi + p.zeta)?),
            ]);
        }
    }
    out.write_table(&r)
}
