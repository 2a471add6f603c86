//! CSV and plot-data writers. Reals are printed with 17 significant digits.

use std::io::Write;

use crate::catalog::{GrowthReport, TorusCatalog};
use crate::circle::wrap01;
use crate::error::Result;
use crate::periodic::RationalPoint2;
use crate::torus::TorusSolution;

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn fraction_fields(p: &RationalPoint2) -> [String; 4] {
    [p.x.numer().to_string(), p.x.denom().to_string(), p.y.numer().to_string(), p.y.denom().to_string()]
}

/// Rows `omega_prime, g1_lift, g2_lift, g1_mod1, g2_mod1, residual` on the
/// solution grid; `residuals[j]` belongs to row `j`.
pub fn write_torus_csv<W: Write>(w: W, sol: &TorusSolution, residuals: &[f64]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["omega_prime", "g1_lift", "g2_lift", "g1_mod1", "g2_mod1", "residual"])?;
    let n = sol.grid_size();
    for (j, g) in sol.grid.iter().enumerate() {
        out.write_record([
            fmt_real(j as f64 / n as f64),
            fmt_real(g[0]),
            fmt_real(g[1]),
            fmt_real(wrap01(g[0])),
            fmt_real(wrap01(g[1])),
            fmt_real(residuals[j]),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One row per descriptor: translate as fractions, least period, residual.
pub fn write_catalog_csv<W: Write>(w: W, catalog: &TorusCatalog) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["num1", "den1", "num2", "den2", "least_period", "residual"])?;
    for d in &catalog.descriptors {
        let [a, b, c, e] = fraction_fields(&d.descriptor.translate);
        out.write_record([a, b, c, e, d.descriptor.period.to_string(), fmt_real(d.residual)])?;
    }
    out.flush()?;
    Ok(())
}

/// Columns `n, lower, exact, upper, rate_lower, rate_upper, h_top`; `exact`
/// is empty past the enumeration budget.
pub fn write_growth_csv<W: Write>(w: W, report: &GrowthReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["n", "lower", "exact", "upper", "rate_lower", "rate_upper", "h_top"])?;
    for r in &report.rows {
        out.write_record([
            r.n.to_string(),
            r.lower.to_string(),
            r.exact.map(|e| e.to_string()).unwrap_or_default(),
            r.upper.to_string(),
            fmt_real(r.rate_lower),
            fmt_real(r.rate_upper),
            fmt_real(r.h_top),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Two whitespace-separated columns `n rate` with a `#` header line.
pub fn write_plot_data<W: Write>(mut w: W, report: &GrowthReport) -> Result<()> {
    writeln!(w, "# n rate")?;
    for r in &report.rows {
        writeln!(w, "{} {}", r.n, fmt_real(r.rate()))?;
    }
    Ok(())
}
