//! Enumerate the invariant tori of period at most n and verify each one.
//!
//! cargo run --release --example catalog -- [config] [n]

use std::path::PathBuf;

use anosov_tori::commands::{Overrides, Session};
use anosov_tori::enumerate_tori;

fn main() -> anosov_tori::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/degree_two.toml")));
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let session = Session::from_path(&path, Overrides::default())?;
    let catalog = enumerate_tori(&session.system, n, &session.settings)?;
    println!("m = {}, base residual {:.2e}, branch separation {:.3}", catalog.m, catalog.base_residual, catalog.branch_separation);
    for row in &catalog.counts {
        println!("period <= {}: {:?} tori (bounds {}..{})", row.n, row.exact, row.bounds.lower, row.bounds.upper);
    }
    for d in catalog.descriptors.iter().take(12) {
        let p = d.descriptor.translate;
        println!(
            "    g + ({}, {})  period {}  residual {:.2e} / tol {:.2e}  {}",
            p.x,
            p.y,
            d.descriptor.period,
            d.residual,
            d.tolerance,
            if d.passed { "ok" } else { "FAILED" }
        );
    }
    if catalog.descriptors.len() > 12 {
        println!("    ... {} more", catalog.descriptors.len() - 12);
    }
    Ok(())
}
