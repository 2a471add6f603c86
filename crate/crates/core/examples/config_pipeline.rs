//! Parse a configuration, echo its canonical form and run every command
//! into a scratch directory.
//!
//! cargo run --release --example config_pipeline -- [config] [out-dir]

use std::path::PathBuf;

use anosov_tori::commands::{cmd_analyze, cmd_enumerate, cmd_growth, cmd_solve, cmd_verify, Overrides, Session};

fn main() -> anosov_tori::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/acceptance1.toml")));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("anosov-tori-pipeline"));
    let session = Session::from_path(&path, Overrides::default())?;
    println!("{}", session.config.emit());

    let reports = [
        cmd_analyze(&session, Some(&out))?,
        cmd_solve(&session, Some(&out))?,
        cmd_enumerate(&session, 3, Some(&out))?,
        cmd_growth(&session, 10, Some(&out))?,
        cmd_verify(&session, 3, None, Some(&out))?,
    ];
    for r in &reports {
        let failed = r.failed_checks();
        println!("{:<9} {:>8.1} ms  {}", r.command, r.timing_ms, if failed.is_empty() { "ok".to_string() } else { format!("failed: {failed:?}") });
    }
    println!("outputs in {}", out.display());
    Ok(())
}
