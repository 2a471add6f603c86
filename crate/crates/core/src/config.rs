//! System configuration files.
//!
//! The on-disk form is TOML:
//!
//! ```toml
//! matrix = [2, 1, 1, 1]          # row-major A
//! alpha = "sqrt2-1"              # or "golden", "pi-3", or a decimal
//!
//! [force]
//! degree = [1, 0]
//! modes = [
//!     { component = 1, k = 1, re = 0.05, im = 0.0 },
//! ]
//!
//! [force.remainder]              # optional
//! waveform = "triangle"          # or "sawtooth-smoothed"
//! amplitude = 0.01
//! grid = 1024
//! # path = "samples.txt"         # alternatively: samples of the full force
//!
//! [solver]                       # all optional
//! grid = 4096
//! mode_cutoff = 64
//! tol = 1e-9
//! budget = 5000000
//! residual_ceiling = 1e-5
//! ```
//!
//! A `path` remainder names a text file with one sample of the full force
//! `h(j/N)` per line (two numbers, lift or mod-1 values, `#` comments
//! allowed). Its degree is measured and must match `force.degree`; the
//! degree-0 part is split into Fourier modes up to `mode_cutoff` plus a
//! sampled remainder, so `modes` must be empty in that case.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::catalog::{SolverSettings, System};
use crate::circle::{degree_from_samples, fit_modes, wrap_centered, ForceMap, SampledMap, TrigPoly, Vec2, Waveform};
use crate::error::{Error, Result, Violation};
use crate::linalg::IntMatrix2;

/// Named irrational rotation numbers accepted for `alpha`.
pub const NAMED_ALPHAS: [&str; 3] = ["sqrt2-1", "golden", "pi-3"];

pub const DEFAULT_REMAINDER_GRID: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub matrix: Vec<i64>,
    pub alpha: String,
    #[serde(default)]
    pub force: ForceConfig,
    #[serde(default)]
    pub solver: SolverSettings,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceConfig {
    #[serde(default)]
    pub degree: [i64; 2],
    #[serde(default)]
    pub modes: Vec<ModeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remainder: Option<RemainderConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub component: u8,
    pub k: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RemainderConfig {
    Waveform {
        waveform: Waveform,
        amplitude: f64,
        #[serde(default = "default_remainder_grid")]
        grid: usize,
    },
    File {
        path: PathBuf,
    },
}

fn default_remainder_grid() -> usize {
    DEFAULT_REMAINDER_GRID
}

/// A validated configuration plus the non-fatal warnings it raised.
#[derive(Clone, Debug)]
pub struct ParsedConfig {
    pub config: SystemConfig,
    pub alpha: f64,
    pub warnings: Vec<String>,
}

/// Resolve `alpha`; the flag is true when the value came from a decimal.
pub fn resolve_alpha(s: &str) -> std::result::Result<(f64, bool), String> {
    let named = match s.trim() {
        "sqrt2-1" => Some(std::f64::consts::SQRT_2 - 1.0),
        "golden" => Some((5f64.sqrt() - 1.0) / 2.0),
        "pi-3" => Some(std::f64::consts::PI - 3.0),
        _ => None,
    };
    let (value, decimal) = match named {
        Some(v) => (v, false),
        None => (
            s.trim().parse::<f64>().map_err(|_| {
                format!("'{s}' is neither a decimal nor one of {}", NAMED_ALPHAS.join(", "))
            })?,
            true,
        ),
    };
    if !(value > 0.0 && value < 1.0) {
        return Err(format!("alpha = {value} must lie in (0, 1)"));
    }
    Ok((value, decimal))
}

impl SystemConfig {
    pub fn matrix(&self) -> IntMatrix2 {
        let m = &self.matrix;
        IntMatrix2::from_rows([[m[0], m[1]], [m[2], m[3]]])
    }

    /// Every rule violation, with field paths.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.matrix.len() != 4 {
            out.push(Violation::new("matrix", format!("expected 4 integers, got {}", self.matrix.len())));
        } else {
            let det = self.matrix().det();
            if !det.abs().is_one() {
                out.push(Violation::new("matrix", format!("det = {det} not in {{+1, -1}}")));
            }
        }
        if let Err(e) = resolve_alpha(&self.alpha) {
            out.push(Violation::new("alpha", e));
        }

        let s = &self.solver;
        if s.grid < 2 {
            out.push(Violation::new("solver.grid", "must be at least 2"));
        }
        if s.tol.is_nan() || s.tol <= 0.0 {
            out.push(Violation::new("solver.tol", "must be positive"));
        }
        if s.budget == 0 {
            out.push(Violation::new("solver.budget", "must be positive"));
        }
        if s.residual_ceiling.is_nan() || s.residual_ceiling <= 0.0 {
            out.push(Violation::new("solver.residual_ceiling", "must be positive"));
        }

        for (i, md) in self.force.modes.iter().enumerate() {
            let path = format!("force.modes[{i}]");
            if !(1..=2).contains(&md.component) {
                out.push(Violation::new(format!("{path}.component"), "must be 1 or 2"));
            }
            if md.k.unsigned_abs() as usize > s.mode_cutoff {
                out.push(Violation::new(format!("{path}.k"), format!("|k| exceeds solver.mode_cutoff = {}", s.mode_cutoff)));
            }
            if !md.re.is_finite() || !md.im.is_finite() {
                out.push(Violation::new(path.clone(), "coefficients must be finite"));
            }
        }
        for comp in 1..=2u8 {
            if let Err(e) = self.component_poly(comp) {
                out.push(Violation::new("force.modes", format!("component {comp}: {e}")));
            }
        }

        match &self.force.remainder {
            Some(RemainderConfig::Waveform { amplitude, grid, .. }) => {
                if !amplitude.is_finite() || amplitude.abs() >= 1.0 {
                    out.push(Violation::new("force.remainder.amplitude", "sup-norm must be < 1"));
                }
                if *grid < 2 {
                    out.push(Violation::new("force.remainder.grid", "must be at least 2"));
                }
            }
            Some(RemainderConfig::File { path }) => {
                if path.as_os_str().is_empty() {
                    out.push(Violation::new("force.remainder.path", "must not be empty"));
                }
                if !self.force.modes.is_empty() {
                    out.push(Violation::new("force.modes", "must be empty when the force is read from a sample file"));
                }
            }
            None => {}
        }
        out
    }

    fn component_poly(&self, comp: u8) -> std::result::Result<TrigPoly, String> {
        let modes: Vec<(i64, Complex64)> = self
            .force
            .modes
            .iter()
            .filter(|m| m.component == comp)
            .map(|m| (m.k, Complex64::new(m.re, m.im)))
            .collect();
        let cutoff = modes.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
        TrigPoly::from_modes(cutoff, &modes)
    }

    /// Build the dynamical system. Relative sample-file paths resolve
    /// against `base_dir`.
    pub fn build(&self, base_dir: &Path) -> Result<System> {
        let violations = self.violations();
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        let (alpha, _) = resolve_alpha(&self.alpha).map_err(Error::Parse)?;
        let poly = |c| self.component_poly(c).map_err(Error::Parse);
        let mut force = ForceMap::trig(self.force.degree, poly(1)?, poly(2)?);
        match &self.force.remainder {
            Some(RemainderConfig::Waveform { waveform, amplitude, grid }) => {
                force = force.with_remainder(waveform.sample(*amplitude, *grid));
            }
            Some(RemainderConfig::File { path }) => {
                let full = if path.is_absolute() { path.clone() } else { base_dir.join(path) };
                let text = std::fs::read_to_string(&full)?;
                let samples = parse_samples(&text)?;
                force = force_from_samples(&samples, self.force.degree, self.solver.mode_cutoff)?;
            }
            None => {}
        }
        Ok(System { a: self.matrix(), alpha, force })
    }

    pub fn emit(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Parse and validate a configuration.
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let config: SystemConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let violations = config.violations();
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    let (alpha, decimal) = resolve_alpha(&config.alpha).map_err(Error::Parse)?;
    let mut warnings = Vec::new();
    if decimal {
        warnings.push(format!(
            "IrrationalityWarning: alpha = {} was given as a decimal and is rational at double precision; \
             the irrational-rotation hypothesis holds only as a modeling statement",
            config.alpha
        ));
    }
    Ok(ParsedConfig { config, alpha, warnings })
}

pub fn load_config(path: &Path) -> Result<ParsedConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// One `h(j/N)` sample per non-empty, non-comment line: two numbers
/// separated by whitespace or a comma.
pub fn parse_samples(text: &str) -> Result<Vec<Vec2>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("sample line {}: {e}", lineno + 1)))?;
        if nums.len() != 2 {
            return Err(Error::Parse(format!("sample line {}: expected 2 values, got {}", lineno + 1, nums.len())));
        }
        out.push([nums[0], nums[1]]);
    }
    if out.len() < 4 {
        return Err(Error::Parse(format!("need at least 4 samples, got {}", out.len())));
    }
    Ok(out)
}

/// Turn samples of a full force `h(j/N)` into degree + modes + remainder.
/// The measured degree must equal `declared`.
pub fn force_from_samples(samples: &[Vec2], declared: [i64; 2], mode_cutoff: usize) -> Result<ForceMap> {
    let n = samples.len();
    let mut closed = samples.to_vec();
    closed.push(samples[0]);
    let measured = degree_from_samples(&closed)?.degree;
    if measured != declared {
        return Err(Error::Validation(vec![Violation::new(
            "force.degree",
            format!("declared {declared:?} but the samples wind {measured:?}"),
        )]));
    }
    // Unwrap to a continuous lift, then remove the linear part.
    let mut lift = vec![samples[0]; n];
    for j in 1..n {
        for c in 0..2 {
            lift[j][c] = lift[j - 1][c] + wrap_centered(samples[j][c] - samples[j - 1][c]);
        }
    }
    let periodic: Vec<Vec2> = lift
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let w = j as f64 / n as f64;
            [v[0] - declared[0] as f64 * w, v[1] - declared[1] as f64 * w]
        })
        .collect();
    let cutoff = mode_cutoff.min((n - 2) / 2);
    let fit1 = fit_modes(&periodic.iter().map(|v| v[0]).collect::<Vec<_>>(), cutoff)?;
    let fit2 = fit_modes(&periodic.iter().map(|v| v[1]).collect::<Vec<_>>(), cutoff)?;
    let remainder: Vec<Vec2> = periodic
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let w = j as f64 / n as f64;
            [v[0] - fit1.poly.eval(w), v[1] - fit2.poly.eval(w)]
        })
        .collect();
    let remainder = SampledMap::new(remainder);
    let mut force = ForceMap::trig(declared, fit1.poly, fit2.poly);
    if crate::circle::PeriodicMap::sup_norm(&remainder) > 0.0 {
        force = force.with_remainder(remainder);
    }
    Ok(force)
}
