//! Separated-set entropy estimate for the cat map next to log |λ_u|.
//!
//! cargo run --release --example entropy_estimate -- [eps] [grid]

use anosov_tori::catalog::estimate_entropy_separated_ratio;
use anosov_tori::{estimate_entropy_separated, topological_entropy, IntMatrix2};

fn main() -> anosov_tori::Result<()> {
    let mut args = std::env::args().skip(1);
    let eps: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let grid: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(256);
    let a = IntMatrix2::cat_map();
    let h = topological_entropy(&a)?;
    println!("h_top = {h:.6}, eps = {eps}, grid = {grid}");
    println!("{:>2} {:>8} {:>10} {:>10}", "n", "|S_n|", "raw", "ratio");
    for n in 1..=6 {
        let t = std::time::Instant::now();
        let raw = estimate_entropy_separated(&a, n, eps, grid)?;
        let size = (raw * n as f64).exp();
        let ratio = if n > 1 { estimate_entropy_separated_ratio(&a, n, eps, grid)? } else { f64::NAN };
        println!("{n:>2} {size:>8.0} {raw:>10.6} {ratio:>10.6}  [{:.0} ms]", t.elapsed().as_secs_f64() * 1e3);
    }
    Ok(())
}
