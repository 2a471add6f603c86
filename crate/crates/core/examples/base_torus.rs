//! Build the base invariant torus of a configured system and report its
//! residuals, with and without the sampled remainder.
//!
//! cargo run --example base_torus -- crates/core/configs/acceptance1.toml

use std::path::PathBuf;

use anosov_tori::commands::{Overrides, Session};
use anosov_tori::{build_base_torus, invariance_residual, minimal_degree_m};

fn main() -> anosov_tori::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/acceptance1.toml")));
    let session = Session::from_path(&path, Overrides::default())?;
    let sys = &session.system;
    let s = &session.settings;
    let m = minimal_degree_m(&sys.a, sys.force.degree)?;

    let start = std::time::Instant::now();
    let base = build_base_torus(&sys.a, sys.alpha, &sys.force, m, s.grid, s.tol)?;
    println!("m = {m}, deg g = {:?}, grid = {}", base.deg_g, s.grid);
    println!("residual (full force)      = {:.3e}  [{:.0} ms]", base.residual_sup, start.elapsed().as_secs_f64() * 1e3);
    if let Some(eta) = &base.eta {
        println!(
            "cocycle: {} terms, tail bound {:.1e}, interpolation estimate {:.1e}, grid residual {:.1e}",
            eta.terms, eta.trunc_bound, eta.interp_estimate, eta.residual
        );
    }

    let trig = sys.force.trig_part();
    let smooth = build_base_torus(&sys.a, sys.alpha, &trig, m, s.grid, s.tol)?;
    println!("residual (remainder dropped) = {:.3e}", smooth.residual_sup);
    println!("off-grid check (3x finer)    = {:.3e}", invariance_residual(&base, &sys.a, sys.alpha, &sys.force, m, 3 * s.grid + 1));
    println!("g(0) = {:?}", base.eval_torus(0.0).0);
    Ok(())
}
