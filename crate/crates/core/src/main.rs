use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use anosov_tori::commands::{cmd_analyze, cmd_enumerate, cmd_growth, cmd_solve, cmd_verify, Fault, Overrides, RunReport, Session};
use anosov_tori::Result;

/// Invariant tori of quasi-periodically forced hyperbolic toral automorphisms.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    /// System configuration (TOML).
    #[arg(long, global = true, default_value = "system.toml")]
    config: PathBuf,
    /// Directory for reports, CSV and plot data.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override solver.grid.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Override solver.tol.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Override solver.budget.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify A, compute m, deg g and h_top.
    Analyze,
    /// Build the base invariant torus.
    Solve,
    /// List every invariant torus of period at most N.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Count growth against the topological entropy.
    Growth {
        #[arg(long)]
        nmax: usize,
    },
    /// Run all verification checks.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FaultArg {
    CorruptMode,
}

fn run(cli: &Cli) -> Result<RunReport> {
    let overrides = Overrides { grid: cli.grid, tol: cli.tol, budget: cli.budget };
    let session = Session::from_path(&cli.config, overrides)?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Analyze => cmd_analyze(&session, out),
        Command::Solve => cmd_solve(&session, out),
        Command::Enumerate { n } => cmd_enumerate(&session, *n, out),
        Command::Growth { nmax } => cmd_growth(&session, *nmax, out),
        Command::Verify { n, inject_fault } => {
            cmd_verify(&session, *n, inject_fault.map(|FaultArg::CorruptMode| Fault::CorruptMode), out)
        }
    }
}

fn print_summary(r: &RunReport) {
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    println!("command: {}", r.command);
    println!("A: {} ({})", r.config.matrix(), r.classification);
    if let (Some(m), Some(d)) = (r.m, r.deg_g) {
        println!("m = {m}, deg g = ({}, {})", d[0], d[1]);
    }
    if let Some(h) = r.h_top {
        println!("h_top = {h:.10}");
    }
    if let Some(res) = r.residuals.base {
        println!("base residual = {res:.3e}");
    }
    if let Some(row) = r.counts.last() {
        match row.exact {
            Some(c) => println!("tori with period <= {}: {c}", row.n),
            None => println!("tori with period <= {}: between {} and {}", row.n, row.bounds.lower, row.bounds.upper),
        }
    }
    if let Some(g) = &r.growth {
        println!("rate({}) = {:.6}, gap = {:.6}", g.rows.len(), g.rows.last().map_or(0.0, |r| r.rate()), g.summary.final_gap);
    }
    for c in &r.checks {
        println!("{} {} (value {:.3e}, threshold {:.3e}) {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold, c.detail);
    }
    for n in &r.notes {
        println!("note: {n}");
    }
    for p in &r.outputs {
        println!("wrote {}", p.display());
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(report) => {
            print_summary(&report);
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
