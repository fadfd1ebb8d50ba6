//! `eave` — mesh generation, single solves, refinement studies, `ε`-sweeps
//! and monotonicity audits from the command line.
//!
//! Exit status: 0 on success, 2 when any run produced a FAILED row,
//! 3 on invalid arguments or configuration, 1 on other errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eave_core::harness::{MeshFamily, Problem};
use eave_core::schemes::SchemeKind;
use eave_core::vem::StabChoice;

pub const EXIT_FAILED_ROW: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "eave", version, about = "Edge-averaged virtual element experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a mesh and write it in the plain-text mesh format.
    MeshGen(MeshGenArgs),
    /// Solve one problem on a mesh file.
    Solve(SolveArgs),
    /// Run a refinement study described by a TOML config.
    Convergence(ConvergenceArgs),
    /// M-matrix and maximum-principle audit of schemes on one mesh.
    Audit(AuditArgs),
    /// L∞ error of the boundary-layer problem against ε at fixed h.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct MeshGenArgs {
    /// tri, tri-equilateral, hexa-dual, voro-dual, voro, opti or ncvx.
    #[arg(long)]
    family: MeshFamily,
    /// Generator size: subdivisions for tri/ncvx/hexa-dual, cell count for the Voronoi families.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// fe, supg, eafe, eave, meave.
    #[arg(long)]
    scheme: SchemeKind,
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    epsilon: f64,
    /// Stabilization for eave: sv or se.
    #[arg(long)]
    stab: Option<StabChoice>,
    /// boundary-layer or poisson-sine.
    #[arg(long, default_value_t = Problem::BoundaryLayer)]
    problem: Problem,
    /// Writes `<PREFIX>.solution.csv` (and `<PREFIX>.matrix.txt` with --dump-matrix).
    #[arg(long)]
    out: PathBuf,
    /// Also dump the reduced matrix as `i j value` lines (0-based).
    #[arg(long)]
    dump_matrix: bool,
}

#[derive(Debug, Args)]
struct ConvergenceArgs {
    #[arg(long)]
    config: PathBuf,
    /// Directory for gnuplot-ready `.dat` files.
    #[arg(long)]
    plots: Option<PathBuf>,
    /// Record wall-clock times (makes the CSV non-reproducible).
    #[arg(long)]
    timings: bool,
    /// Overrides `output_dir` of the config.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// Comma-separated schemes.
    #[arg(long, value_delimiter = ',', required = true)]
    scheme: Vec<SchemeKind>,
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 1e-6])]
    epsilons: Vec<f64>,
    #[arg(long, default_value_t = Problem::BoundaryLayer)]
    problem: Problem,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6])]
    epsilons: Vec<f64>,
    /// Nominal 1/h.
    #[arg(long, default_value_t = 8)]
    resolution: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// gnuplot-ready table, one column per scheme and mesh.
    #[arg(long)]
    plot: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::MeshGen(a) => commands::mesh_gen(a),
        Command::Solve(a) => commands::solve(a),
        Command::Convergence(a) => commands::convergence(a),
        Command::Audit(a) => commands::audit(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}
