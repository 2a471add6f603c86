//! The `analyze`, `solve`, `enumerate`, `growth` and `verify` pipeline.
//!
//! Each command returns a [`RunReport`]; when an output directory is given it
//! also writes `<command>_report.json` plus its CSV/plot files there.
//! A command "fails" (exit 3) when any entry of `report.checks` failed.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::catalog::{
    conjugacy_check, enumerate_with_base, growth_rate_table, topological_entropy, translate_residual, CountRow,
    GrowthReport, SolverSettings, System, DISTINCTNESS_THRESHOLD,
};
use crate::circle::degree_from_samples;
use crate::config::{load_config, parse_config, SystemConfig};
use crate::error::{Error, Result};
use crate::linalg::{classify_hyperbolic, eigen_split, Hyperbolicity};
use crate::output::{write_catalog_csv, write_growth_csv, write_plot_data, write_torus_csv};
use crate::periodic::fixed_points;
use crate::torus::{build_base_torus, lower_degree_witnesses, minimal_degree_m, residual_profile, torus_degree, TorusSolution};

/// Overrides from the command line; `None` keeps the config value.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub budget: Option<u64>,
}

/// A loaded, validated configuration ready to run.
#[derive(Clone, Debug)]
pub struct Session {
    pub config: SystemConfig,
    pub system: System,
    pub settings: SolverSettings,
    pub warnings: Vec<String>,
}

impl Session {
    pub fn from_text(text: &str, base_dir: &Path, overrides: Overrides) -> Result<Self> {
        let parsed = parse_config(text)?;
        Self::assemble(parsed.config, parsed.warnings, base_dir, overrides)
    }

    pub fn from_path(path: &Path, overrides: Overrides) -> Result<Self> {
        let parsed = load_config(path)?;
        let base_dir = path.parent().unwrap_or(Path::new("."));
        Self::assemble(parsed.config, parsed.warnings, base_dir, overrides)
    }

    fn assemble(mut config: SystemConfig, warnings: Vec<String>, base_dir: &Path, o: Overrides) -> Result<Self> {
        if let Some(g) = o.grid {
            config.solver.grid = g;
        }
        if let Some(t) = o.tol {
            config.solver.tol = t;
        }
        if let Some(b) = o.budget {
            config.solver.budget = b;
        }
        let system = config.build(base_dir)?;
        Ok(Session { settings: config.solver, config, system, warnings })
    }
}

/// One named pass/fail item.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, threshold, passed: value <= threshold, detail: String::new() }
    }

    fn flag(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), value: passed as u8 as f64, threshold: 1.0, passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Residuals {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cocycle_truncation_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cocycle_interpolation_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugacy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_descriptor: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config: SystemConfig,
    pub alpha: f64,
    pub classification: Hyperbolicity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deg_g: Option<[i64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_top: Option<f64>,
    /// `m' (I − A)⁻¹ deg h` for each `m' < m`, none of them integral.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lower_degree_witnesses: Vec<String>,
    pub residuals: Residuals,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub counts: Vec<CountRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    pub outputs: Vec<PathBuf>,
    pub timing_ms: f64,
}

impl RunReport {
    fn new(command: &str, session: &Session) -> Self {
        RunReport {
            command: command.into(),
            config: session.config.clone(),
            alpha: session.system.alpha,
            classification: classify_hyperbolic(&session.system.a),
            m: None,
            deg_g: None,
            lambda_u: None,
            h_top: None,
            lower_degree_witnesses: Vec::new(),
            residuals: Residuals::default(),
            counts: Vec::new(),
            growth: None,
            checks: Vec::new(),
            warnings: session.warnings.clone(),
            notes: Vec::new(),
            outputs: Vec::new(),
            timing_ms: 0.0,
        }
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// 0 when every check passed, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            3
        }
    }

    /// `Err(Verification)` naming the failed checks.
    pub fn into_result(self) -> Result<RunReport> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::Verification(self.failed_checks().into_iter().map(String::from).collect()))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    fn finish(mut self, start: Instant, out: Option<&Path>) -> Result<RunReport> {
        self.timing_ms = start.elapsed().as_secs_f64() * 1e3;
        if let Some(dir) = out {
            let path = dir.join(format!("{}_report.json", self.command));
            self.outputs.push(path.clone());
            std::fs::write(&path, self.to_json() + "\n")?;
        }
        Ok(self)
    }
}

fn create(out: &Path, name: &str, report: &mut RunReport) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(out)?;
    let path = out.join(name);
    report.outputs.push(path.clone());
    Ok(BufWriter::new(File::create(path)?))
}

fn degree_data(sys: &System, report: &mut RunReport) -> Result<u64> {
    let split = eigen_split(&sys.a)?;
    let m = minimal_degree_m(&sys.a, sys.force.degree)?;
    report.m = Some(m);
    report.deg_g = Some(torus_degree(&sys.a, sys.force.degree, m)?);
    report.lambda_u = Some(split.lambda_u);
    report.h_top = Some(topological_entropy(&sys.a)?);
    report.lower_degree_witnesses = lower_degree_witnesses(&sys.a, sys.force.degree)?
        .into_iter()
        .map(|(mp, v)| format!("m' = {mp}: ({}, {})", v.0[0], v.0[1]))
        .collect();
    Ok(m)
}

fn base_torus(session: &Session, m: u64) -> Result<TorusSolution> {
    let s = &session.settings;
    let sys = &session.system;
    build_base_torus(&sys.a, sys.alpha, &sys.force, m, s.grid, s.tol)
}

fn record_base(report: &mut RunReport, base: &TorusSolution) {
    report.residuals.base = Some(base.residual_sup);
    if let Some(eta) = &base.eta {
        report.residuals.cocycle = Some(eta.residual);
        report.residuals.cocycle_truncation_bound = Some(eta.trunc_bound);
        report.residuals.cocycle_interpolation_estimate = Some(eta.interp_estimate);
    }
}

fn count_note(report: &mut RunReport) {
    report.notes.push("torus counts depend only on A: the force h enters the base torus, not the counts".into());
}

/// Classification, `m`, `deg g` and `h_top`; no torus solve.
pub fn cmd_analyze(session: &Session, out: Option<&Path>) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("analyze", session);
    match report.classification {
        Hyperbolicity::Hyperbolic => {}
        c => return Err(Error::NotHyperbolic(format!("A = {} is {c}", session.system.a))),
    }
    degree_data(&session.system, &mut report)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
    }
    report.finish(start, out)
}

/// Build the base torus; writes `torus.csv`. Fails when the residual
/// exceeds `solver.residual_ceiling`.
pub fn cmd_solve(session: &Session, out: Option<&Path>) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("solve", session);
    let m = degree_data(&session.system, &mut report)?;
    let base = base_torus(session, m)?;
    record_base(&mut report, &base);
    report.checks.push(Check::at_most("base_residual", base.residual_sup, session.settings.residual_ceiling));
    if let Some(dir) = out {
        let sys = &session.system;
        let profile = residual_profile(&base, &sys.a, sys.alpha, &sys.force, m, base.grid_size());
        write_torus_csv(create(dir, "torus.csv", &mut report)?, &base, &profile)?;
    }
    report.finish(start, out)
}

/// Base torus plus its translates by every periodic point of period ≤ `n`;
/// writes `catalog.csv`.
pub fn cmd_enumerate(session: &Session, n: usize, out: Option<&Path>) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("enumerate", session);
    let m = degree_data(&session.system, &mut report)?;
    let base = Arc::new(base_torus(session, m)?);
    record_base(&mut report, &base);
    let catalog = enumerate_with_base(&session.system, base, n, &session.settings)?;
    report.counts = catalog.counts.clone();
    if catalog.exact {
        report.residuals.max_descriptor = Some(catalog.max_descriptor_residual());
        let failed = catalog.descriptors.iter().filter(|d| !d.passed).count();
        report.checks.push(Check::flag("descriptors", failed == 0, format!("{failed} of {} failed", catalog.descriptors.len())));
    } else {
        report.warnings.push(format!("enumeration budget {} exceeded; counts are bounds only", session.settings.budget));
    }
    count_note(&mut report);
    if let Some(dir) = out {
        write_catalog_csv(create(dir, "catalog.csv", &mut report)?, &catalog)?;
    }
    report.finish(start, out)
}

/// Counts and rates for `n = 1..=n_max`; writes `growth.csv` and `growth_plot.dat`.
pub fn cmd_growth(session: &Session, n_max: usize, out: Option<&Path>) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("growth", session);
    if n_max == 0 {
        return Err(Error::Parse("--nmax must be at least 1".into()));
    }
    degree_data(&session.system, &mut report)?;
    let growth = growth_rate_table(&session.system.a, n_max, session.settings.budget)?;
    if let Some(dir) = out {
        write_growth_csv(create(dir, "growth.csv", &mut report)?, &growth)?;
        write_plot_data(create(dir, "growth_plot.dat", &mut report)?, &growth)?;
    }
    report.growth = Some(growth);
    count_note(&mut report);
    report.finish(start, out)
}

/// Deliberate corruption for exercising the failure path of `verify`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Shift the mean mode `a_0` by `10⁻³` in the first component.
    CorruptMode,
}

/// Conjugacy tolerance multiplier for `n` steps: `max(30, Σ_{j<n} ‖A‖ʲ)`.
pub fn conjugacy_factor(sys: &System, n: usize) -> f64 {
    let norm = sys.a.norm_inf().to_string().parse::<f64>().unwrap_or(f64::INFINITY);
    let growth: f64 = (0..n).map(|j| norm.powi(j as i32)).sum();
    growth.max(30.0)
}

/// Fibers used by the conjugacy check in `verify`.
pub const VERIFY_CONJUGACY_GRID: usize = 256;

/// Run every verification suite; the report lists each check.
pub fn cmd_verify(session: &Session, n: usize, fault: Option<Fault>, out: Option<&Path>) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("verify", session);
    let sys = &session.system;
    let settings = &session.settings;
    let m = degree_data(sys, &mut report)?;
    let mut base = base_torus(session, m)?;
    if fault == Some(Fault::CorruptMode) {
        base = base.with_perturbed_mode(0, [Complex64::new(1e-3, 0.0), Complex64::new(0.0, 0.0)], &sys.a, &sys.force);
        report.warnings.push("fault injected: a_0 shifted by 1e-3".into());
    }
    record_base(&mut report, &base);
    let res = base.residual_sup;
    let checks = &mut report.checks;
    checks.push(Check::at_most("base_residual", res, settings.residual_ceiling));

    let conj = conjugacy_check(sys, &base, n, VERIFY_CONJUGACY_GRID.min(base.grid_size()));
    report.residuals.conjugacy = Some(conj);
    checks.push(Check::at_most("conjugacy", conj, conjugacy_factor(sys, n) * res + 1e-12));

    let fixed = fixed_points(&sys.a, 1, settings.budget)?;
    let translate_gap = fixed
        .points
        .iter()
        .map(|p| (translate_residual(sys, &base, p.point.to_f64()) - res).abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("translate_invariance", translate_gap, 1e-12));

    let c = base.mode_cutoff as i64;
    let stray = (-c..=c)
        .filter(|j| j.rem_euclid(m as i64) != 0)
        .filter(|&j| base.mode(j).iter().any(|z| *z != Complex64::new(0.0, 0.0)))
        .count();
    checks.push(Check::flag("mode_support", stray == 0, format!("{stray} nonzero modes off multiples of m = {m}")));

    let separation = base.branch_separation();
    let distinct = m == 1 || separation > DISTINCTNESS_THRESHOLD;
    checks.push(Check {
        name: "distinctness".into(),
        value: separation,
        threshold: DISTINCTNESS_THRESHOLD,
        passed: distinct,
        detail: if m == 1 { "m = 1: single branch".into() } else { String::new() },
    });

    let mut closed = base.grid.clone();
    let g0 = closed[0];
    let deg_g = report.deg_g.expect("set by degree_data");
    closed.push([g0[0] + deg_g[0] as f64, g0[1] + deg_g[1] as f64]);
    let (ok, detail) = match degree_from_samples(&closed) {
        Ok(d) => (d.degree == deg_g, format!("measured {:?}, expected {deg_g:?}", d.degree)),
        Err(e) => (false, e.to_string()),
    };
    checks.push(Check::flag("degree_consistency", ok, detail));
    checks.push(Check::flag(
        "degree_minimality",
        report.lower_degree_witnesses.len() as u64 == m - 1,
        format!("{} non-integral witnesses below m = {m}", report.lower_degree_witnesses.len()),
    ));

    if distinct {
        let catalog = enumerate_with_base(sys, Arc::new(base), n, settings)?;
        report.counts = catalog.counts.clone();
        if catalog.exact {
            report.residuals.max_descriptor = Some(catalog.max_descriptor_residual());
            let failed = catalog.descriptors.iter().filter(|d| !d.passed).count();
            report.checks.push(Check::flag("descriptors", failed == 0, format!("{failed} of {} failed", catalog.descriptors.len())));

            let points: BTreeSet<_> = catalog.descriptors.iter().map(|d| d.descriptor.translate).collect();
            let am = sys.a.to_i64()?;
            let closure = catalog.descriptors.iter().all(|d| {
                let mut p = d.descriptor.translate;
                let mut orbit = BTreeSet::new();
                for _ in 0..d.descriptor.period {
                    orbit.insert(p);
                    p = p.apply(&am);
                }
                p == d.descriptor.translate && orbit.len() == d.descriptor.period && orbit.is_subset(&points)
            });
            report.checks.push(Check::flag("orbit_closure", closure, ""));

            let counts_ok = catalog.counts.iter().all(|row| {
                row.exact.is_some_and(|c| {
                    let c = num_bigint::BigInt::from(c);
                    row.bounds.lower <= c && c <= row.bounds.upper
                })
            }) && catalog.count(n) == Some(catalog.descriptors.len() as u64);
            report.checks.push(Check::flag("count_identity", counts_ok, ""));
        } else {
            report.warnings.push(format!("enumeration budget {} exceeded; descriptor checks skipped", settings.budget));
        }
    } else {
        report.checks.push(Check::flag("descriptors", false, "skipped: branches collide"));
    }

    if sys.force.is_zero() {
        report.notes.push("constant tori: h = 0, so every invariant torus is a constant section at a periodic point of A".into());
    }
    count_note(&mut report);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
    }
    report.finish(start, out)
}
