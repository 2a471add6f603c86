//! Exact periodic points of the cat map and their counts.
//!
//! cargo run --example periodic_points -- [n]

use anosov_tori::{count_bounds, count_fixed, fixed_points, periodic_points_up_to, IntMatrix2};

fn main() -> anosov_tori::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let a = IntMatrix2::cat_map();
    println!("Fix(A^2):");
    for p in &fixed_points(&a, 2, 1000)?.points {
        println!("    ({}, {})  least period {}", p.point.x, p.point.y, p.period);
    }
    println!("{:>3} {:>10} {:>10} {:>10} {:>10}", "n", "|Fix(A^n)|", "lower", "|P(A;n)|", "upper");
    for k in 1..=n {
        let b = count_bounds(&a, k);
        let exact = periodic_points_up_to(&a, k, 5_000_000)?;
        let shown = if exact.exact { exact.len().to_string() } else { "-".into() };
        println!("{k:>3} {:>10} {:>10} {shown:>10} {:>10}", count_fixed(&a, k), b.lower, b.upper);
    }
    Ok(())
}
