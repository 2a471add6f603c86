//! Growth of the torus count against log |λ_u|.
//!
//! cargo run --release --example growth -- [n_max]

use anosov_tori::{growth_rate_table, IntMatrix2};

fn main() -> anosov_tori::Result<()> {
    let n_max: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(14);
    let rep = growth_rate_table(&IntMatrix2::cat_map(), n_max, 5_000_000)?;
    println!("h_top = {:.6}", rep.summary.h_top);
    println!("{:>3} {:>10} {:>10} {:>10} {:>9} {:>9}", "n", "lower", "exact", "upper", "rate", "gap");
    for r in &rep.rows {
        let exact = r.exact.map(|e| e.to_string()).unwrap_or_else(|| "-".into());
        println!("{:>3} {:>10} {exact:>10} {:>10} {:>9.5} {:>9.5}", r.n, r.lower, r.upper, r.rate(), (r.rate() - r.h_top).abs());
    }
    println!("final gap {:.4}, last exact n = {:?}", rep.summary.final_gap, rep.summary.last_exact_n);
    Ok(())
}
