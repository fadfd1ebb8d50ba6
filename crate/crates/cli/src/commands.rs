use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use eave_core::harness::{
    emit_plots, emit_sweep_plot, run_convergence, run_epsilon_sweep, run_monotonicity_audit, scheme_a_norm,
    ExperimentConfig, HarnessError, SweepConfig,
};
use eave_core::linalg::m_matrix_check;
use eave_core::mesh::{read_mesh_file, write_mesh_file, MeshFile};
use eave_core::schemes::{assemble, solve as solve_system, SchemeError, SchemeKind};
use eave_core::vem::StabChoice;
use thiserror::Error;

use crate::{AuditArgs, ConvergenceArgs, MeshGenArgs, SolveArgs, SweepArgs, EXIT_CONFIG, EXIT_FAILED_ROW};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Other(_) => 1,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(m) => CliError::Config(m),
            other => CliError::Other(other.into()),
        }
    }
}

/// Scheme/mesh mismatches are configuration errors; the rest are runtime failures.
fn scheme_error(e: SchemeError) -> CliError {
    match e {
        SchemeError::NotTriangular { .. } | SchemeError::NeedsDualMesh => CliError::Config(e.to_string()),
        other => CliError::Other(other.into()),
    }
}

/// Success, or at least one FAILED row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        match s {
            Status::Ok => ExitCode::SUCCESS,
            Status::Failed => ExitCode::from(EXIT_FAILED_ROW),
        }
    }
}

fn status(failed: bool) -> Status {
    if failed {
        Status::Failed
    } else {
        Status::Ok
    }
}

fn check_epsilons(eps: &[f64]) -> Result<(), CliError> {
    if eps.is_empty() || eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(CliError::Config(format!("epsilons must be positive, got {eps:?}")));
    }
    Ok(())
}

fn load_mesh(path: &Path) -> Result<MeshFile, CliError> {
    Ok(read_mesh_file(path).with_context(|| format!("reading mesh {}", path.display()))?)
}

/// `<prefix><suffix>`, keeping any dots already in the prefix.
fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn mesh_gen(a: MeshGenArgs) -> Result<Status, CliError> {
    let file = a.family.generate(a.n, a.seed).map_err(|e| CliError::Config(format!("{}: {e}", a.family)))?;
    write_mesh_file(&a.out, &file).with_context(|| format!("writing {}", a.out.display()))?;
    let m = file.mesh();
    eprintln!("{}: {} cells, {} vertices, h = {:.4e}", a.family, m.num_cells(), m.num_vertices(), m.h());
    Ok(Status::Ok)
}

pub fn solve(a: SolveArgs) -> Result<Status, CliError> {
    check_epsilons(&[a.epsilon])?;
    let scheme = match (a.scheme, a.stab) {
        (_, Some(StabChoice::None)) => return Err(CliError::Config("--stab must be sv or se".into())),
        (SchemeKind::Eave(_), Some(s)) => SchemeKind::Eave(s),
        (other, _) => other,
    };
    let mesh = load_mesh(&a.mesh)?;
    let system = assemble(scheme, &mesh, &a.problem.spec(a.epsilon)).map_err(scheme_error)?;
    let sol = solve_system(&system).map_err(scheme_error)?;
    let exact = a.problem.exact(a.epsilon);
    let m = mesh.mesh();
    let u_i = m.interpolate(|p| exact(p));
    let err: Vec<f64> = u_i.iter().zip(&sol.u).map(|(x, y)| x - y).collect();
    let err_a = scheme_a_norm(scheme, &mesh, &err).context("A-norm")?;
    let err_inf = err.iter().fold(0.0f64, |acc, e| acc.max(e.abs()));

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["vertex", "x", "y", "u_h", "u_I"]).context("csv")?;
    for (i, p) in m.vertices().iter().enumerate() {
        w.write_record([
            i.to_string(),
            format!("{:.16e}", p.x),
            format!("{:.16e}", p.y),
            format!("{:.16e}", sol.u[i]),
            format!("{:.16e}", u_i[i]),
        ])
        .context("csv")?;
    }
    let csv_path = suffixed(&a.out, ".solution.csv");
    fs::write(&csv_path, w.into_inner().context("csv")?).with_context(|| format!("writing {}", csv_path.display()))?;
    if a.dump_matrix {
        let path = suffixed(&a.out, ".matrix.txt");
        fs::write(&path, system.matrix.to_coordinate_text()).with_context(|| format!("writing {}", path.display()))?;
    }
    let mm = m_matrix_check(&system.matrix, None);
    println!(
        "scheme={scheme} problem={} epsilon={:e} dofs={} err_A={err_a:.6e} err_inf={err_inf:.6e} m_matrix={} solver={:?} residual={:.2e}",
        a.problem,
        a.epsilon,
        system.num_dofs(),
        mm.is_m_matrix,
        sol.solve.method,
        sol.solve.residual
    );
    Ok(Status::Ok)
}

pub fn convergence(a: ConvergenceArgs) -> Result<Status, CliError> {
    let mut cfg = ExperimentConfig::from_file(&a.config)?;
    cfg.timings |= a.timings;
    if a.output_dir.is_some() {
        cfg.output_dir = a.output_dir;
    }
    let reports = run_convergence(&cfg)?;
    for r in &reports {
        println!("# {}", r.label);
        if cfg.output_dir.is_some() {
            println!("{}", r.to_table());
        } else {
            print!("{}", r.to_csv_string());
        }
    }
    if let Some(dir) = &a.plots {
        emit_plots(&reports, dir).with_context(|| format!("writing plots to {}", dir.display()))?;
    }
    Ok(status(reports.iter().any(|r| r.has_failures())))
}

pub fn audit(a: AuditArgs) -> Result<Status, CliError> {
    check_epsilons(&a.epsilons)?;
    let mesh = load_mesh(&a.mesh)?;
    let report = run_monotonicity_audit(&mesh, &a.scheme, &a.epsilons, a.problem);
    write_output(a.out.as_deref(), &report.to_csv_string())?;
    for r in report.rows.iter().filter(|r| !r.consistent()) {
        eprintln!("warning: {} at ε = {:e} is an M-matrix but violates the maximum principle", r.scheme, r.epsilon);
    }
    for r in report.rows.iter().filter_map(|r| r.failure.as_ref().map(|f| (r, f))) {
        eprintln!("{} at ε = {:e}: {}", r.0.scheme, r.0.epsilon, r.1);
    }
    Ok(status(report.has_failures()))
}

pub fn sweep(a: SweepArgs) -> Result<Status, CliError> {
    check_epsilons(&a.epsilons)?;
    if a.resolution < 2 {
        return Err(CliError::Config(format!("resolution must be at least 2, got {}", a.resolution)));
    }
    let cfg = SweepConfig { epsilons: a.epsilons, resolution: a.resolution, seed: a.seed, ..SweepConfig::boundary_layer_default() };
    let report = run_epsilon_sweep(&cfg);
    write_output(a.out.as_deref(), &report.to_csv_string())?;
    if let Some(p) = &a.plot {
        emit_sweep_plot(&report, p).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(status(report.has_failures()))
}
