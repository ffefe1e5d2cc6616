use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hweno_sn::harness::output::{oracle_csv, stop_label, table_csv};
use hweno_sn::harness::{run_study, write_outputs, Overrides, ReferenceChoice, RunConfig, StudyKind};
use hweno_sn::hweno::Mode;

/// Discrete-ordinates transport with Hermite-WENO reconstruction and fast sweeping.
#[derive(Parser)]
#[command(name = "hweno-sn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem on one or more meshes.
    Solve(Common),
    /// Mesh refinement study with observed orders.
    Refine(Common),
    /// Sweep over ε at fixed meshes.
    EpsSweep(Common),
    /// Compare sweeping with a direct solve of the assembled linear system.
    OracleCheck(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Hybrid,
    AlwaysNonlinear,
    AlwaysLinear,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReferenceArg {
    Auto,
    None,
    FineMesh,
}

#[derive(Args)]
struct Common {
    /// TOML configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Catalog problem id (1-10).
    #[arg(long)]
    problem: Option<u32>,
    /// ε, or a comma-separated list for eps-sweep.
    #[arg(long, value_delimiter = ',')]
    epsilon: Vec<f64>,
    /// Cells per axis, comma-separated.
    #[arg(long, value_delimiter = ',')]
    mesh: Vec<usize>,
    /// Gauss-Legendre order.
    #[arg(long)]
    quad: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Relaxation factor of 2D iterations.
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    eps_tilde: Option<f64>,
    /// Wall-clock limit per solve in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    #[arg(long, value_enum)]
    reference: Option<ReferenceArg>,
    /// Write "-" instead of wall-clock seconds so repeated runs give identical files.
    #[arg(long)]
    no_timing: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(study: StudyKind, a: &Common) -> Result<RunConfig> {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    let overrides = Overrides {
        study: Some(study),
        problem: a.problem,
        epsilon: a.epsilon.clone(),
        mesh: a.mesh.clone(),
        quad: a.quad,
        mode: a.mode.map(|m| match m {
            ModeArg::Hybrid => Mode::Hybrid,
            ModeArg::AlwaysNonlinear => Mode::AlwaysNonlinear,
            ModeArg::AlwaysLinear => Mode::AlwaysLinear,
        }),
        tol: a.tol,
        max_iter: a.max_iter,
        omega: a.omega,
        eps_tilde: a.eps_tilde,
        time_budget: a.time_budget,
        out: a.out.clone(),
    };
    cfg.apply(&overrides)?;
    if let Some(r) = a.reference {
        cfg.reference = match r {
            ReferenceArg::Auto => ReferenceChoice::Auto,
            ReferenceArg::None => ReferenceChoice::None,
            ReferenceArg::FineMesh => ReferenceChoice::FineMesh,
        };
    }
    if a.no_timing {
        cfg.timing = false;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    let (study, args) = match &cli.command {
        Command::Solve(a) => (StudyKind::Solve, a),
        Command::Refine(a) => (StudyKind::Refine, a),
        Command::EpsSweep(a) => (StudyKind::EpsSweep, a),
        Command::OracleCheck(a) => (StudyKind::OracleCheck, a),
    };
    let cfg = build_config(study, args)?;
    let outcome = run_study(&cfg)?;
    print!("{}", table_csv(&outcome, cfg.timing));
    if !outcome.oracle.is_empty() {
        print!("{}", oracle_csv(&outcome.oracle));
    }
    for r in outcome.runs.iter().filter(|r| !r.row.converged) {
        eprintln!(
            "N={} epsilon={}: stopped at {} after {} iterations (delta {:e})",
            r.row.cells,
            r.row.epsilon,
            stop_label(r.row.stop),
            r.row.iterations,
            r.report.final_delta()
        );
    }
    if let Some(dir) = &cfg.out {
        write_outputs(dir, &outcome, &cfg).with_context(|| format!("writing results to {}", dir.display()))?;
    }
    Ok(outcome.success())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
