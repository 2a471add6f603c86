//! Solve η(ω + α) = Aη(ω) + r(ω) for a kinked degree-0 force.
//!
//! cargo run --example cocycle

use anosov_tori::circle::{SampledMap, Waveform};
use anosov_tori::{solve_twisted_cocycle, truncation_length, IntMatrix2};

fn main() -> anosov_tori::Result<()> {
    let a = IntMatrix2::cat_map();
    let alpha = 2f64.sqrt() - 1.0;
    println!("series length for |r| = 1, rho = 0.382, tol = 1e-9: {}", truncation_length(1.0, 0.382, 1e-9));

    let tri = Waveform::Triangle.sample(0.05, 512);
    let saw = Waveform::SawtoothSmoothed.sample(0.02, 512);
    let r = SampledMap::new(tri.values().iter().zip(saw.values()).map(|(t, s)| [t[0], s[1]]).collect());
    for grid in [256, 1024, 4096] {
        let sol = solve_twisted_cocycle(&a, alpha, &r, grid, 1e-10)?;
        println!(
            "grid {grid:>5}: {} terms, residual {:.2e}, interpolation estimate {:.2e}, eta(0) = {:?}",
            sol.terms,
            sol.residual,
            sol.interp_estimate,
            sol.eval(0.0)
        );
    }
    Ok(())
}
