//! Refinement studies, `ε`-sweeps and monotonicity audits.

use std::fs;
use std::time::Instant;

use super::config::{ExperimentConfig, MeshFamily};
use super::norms::{inf_norm, projection_error, scheme_a_norm};
use super::problems::Problem;
use super::report::{ConvergenceReport, LevelOutcome, LevelStats, SweepPoint, SweepReport};
use super::HarnessError;
use crate::linalg::{m_matrix_check, MMatrixReport};
use crate::mesh::MeshFile;
use crate::schemes::{assemble, solve, LinearSystem, SchemeError, SchemeKind};
use crate::vem::StabChoice;

/// Solution of one scheme on one mesh, with the interpolation error.
#[derive(Debug, Clone)]
pub struct SolvedLevel {
    pub system: LinearSystem,
    pub u_h: Vec<f64>,
    /// `u_I − u_h` on all vertices.
    pub error: Vec<f64>,
    pub err_a: f64,
    pub err_inf: f64,
    pub assemble_ms: f64,
    pub solve_ms: f64,
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Assembles and solves `kind` for `problem` on `mesh` and measures
/// `e_h = u_I − u_h`.
pub fn solve_level(kind: SchemeKind, mesh: &MeshFile, problem: Problem, epsilon: f64) -> Result<SolvedLevel, SchemeError> {
    let spec = problem.spec(epsilon);
    let t0 = Instant::now();
    let system = assemble(kind, mesh, &spec)?;
    let assemble_ms = ms_since(t0);
    let t1 = Instant::now();
    let sol = solve(&system)?;
    let solve_ms = ms_since(t1);
    let exact = problem.exact(epsilon);
    let u_i = mesh.mesh().interpolate(|p| exact(p));
    let error: Vec<f64> = u_i.iter().zip(&sol.u).map(|(a, b)| a - b).collect();
    let err_a = scheme_a_norm(kind, mesh, &error)?;
    let err_inf = inf_norm(&error);
    Ok(SolvedLevel { system, u_h: sol.u, error, err_a, err_inf, assemble_ms, solve_ms })
}

pub fn report_label(scheme: SchemeKind, family: MeshFamily, epsilon: f64, seed: u64) -> String {
    format!("{scheme}_{family}_eps{epsilon:e}_seed{seed}")
}

/// One refinement study for a single `ε`. Failed levels are recorded and
/// the remaining levels still run.
pub fn run_refinement(config: &ExperimentConfig, epsilon: f64) -> ConvergenceReport {
    let mut report = ConvergenceReport::new(
        report_label(config.scheme, config.family, epsilon, config.seed),
        config.scheme.to_string(),
        config.family.name(),
        epsilon,
        config.seed,
    );
    for &r in &config.resolutions {
        let h = 1.0 / r as f64;
        report.push(h, run_level(config, r, epsilon));
    }
    report
}

fn run_level(config: &ExperimentConfig, resolution: usize, epsilon: f64) -> LevelOutcome {
    let mesh = match config.family.at_resolution(resolution, config.seed) {
        Ok(m) => m,
        Err(e) => return LevelOutcome::Failed(format!("mesh: {e}")),
    };
    let lvl = match solve_level(config.scheme, &mesh, config.problem, epsilon) {
        Ok(l) => l,
        Err(e) => return LevelOutcome::Failed(e.to_string()),
    };
    let projection = if config.projection_error {
        let grad = config.problem.gradient(epsilon);
        match projection_error(&lvl.u_h, mesh.mesh(), &|p| grad(p)) {
            Ok(v) => Some(v),
            Err(e) => return LevelOutcome::Failed(e.to_string()),
        }
    } else {
        None
    };
    let (assemble_ms, solve_ms) = if config.timings { (lvl.assemble_ms, lvl.solve_ms) } else { (0.0, 0.0) };
    LevelOutcome::Solved(LevelStats {
        dofs: lvl.system.num_dofs(),
        h_measured: mesh.mesh().h(),
        err_a: lvl.err_a,
        err_inf: lvl.err_inf,
        assemble_ms,
        solve_ms,
        m_matrix: m_matrix_check(&lvl.system.matrix, None).is_m_matrix,
        projection_error: projection,
    })
}

/// Runs every `ε` of the config; when an output directory is set, each
/// report is written to `<label>.csv` there.
pub fn run_convergence(config: &ExperimentConfig) -> Result<Vec<ConvergenceReport>, HarnessError> {
    config.validate()?;
    let reports: Vec<ConvergenceReport> = config.epsilons.iter().map(|&e| run_refinement(config, e)).collect();
    if let Some(dir) = &config.output_dir {
        fs::create_dir_all(dir)?;
        for r in &reports {
            fs::write(dir.join(format!("{}.csv", r.label)), r.to_csv_string())?;
        }
    }
    Ok(reports)
}

/// Schemes and meshes compared across `ε` at a fixed resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub entries: Vec<(SchemeKind, MeshFamily)>,
    pub resolution: usize,
    pub epsilons: Vec<f64>,
    pub seed: u64,
}

impl SweepConfig {
    /// P1 schemes on right triangles and the edge-averaged virtual element
    /// schemes on the hexagonal dual mesh, `h = 2⁻³`, `ε = 10⁻²..10⁻⁶`.
    /// EAFE is nodally exact for the layer solution on right triangles (the
    /// diagonals carry no weight), so it is also run on near-equilateral
    /// triangles where its error is visible.
    pub fn boundary_layer_default() -> Self {
        Self {
            entries: vec![
                (SchemeKind::Fe, MeshFamily::Tri),
                (SchemeKind::Supg, MeshFamily::Tri),
                (SchemeKind::Eafe, MeshFamily::Tri),
                (SchemeKind::Eafe, MeshFamily::TriEquilateral),
                (SchemeKind::Eave(StabChoice::DofScalar), MeshFamily::HexaDual),
                (SchemeKind::Meave, MeshFamily::HexaDual),
            ],
            resolution: 8,
            epsilons: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            seed: 0,
        }
    }
}

/// `L∞` (and A-norm) error of the boundary-layer problem for every
/// `(scheme, ε)`, in entry-major order.
pub fn run_epsilon_sweep(config: &SweepConfig) -> SweepReport {
    let mut points = Vec::new();
    for &(scheme, family) in &config.entries {
        let mesh = family.at_resolution(config.resolution, config.seed);
        for &eps in &config.epsilons {
            let lvl = mesh.as_ref().ok().and_then(|m| solve_level(scheme, m, Problem::BoundaryLayer, eps).ok());
            points.push(SweepPoint {
                scheme: scheme.to_string(),
                family: family.name().to_string(),
                epsilon: eps,
                dofs: lvl.as_ref().map_or(0, |l| l.system.num_dofs()),
                err_inf: lvl.as_ref().map(|l| l.err_inf),
                err_a: lvl.as_ref().map(|l| l.err_a),
            });
        }
    }
    SweepReport { h: 1.0 / config.resolution as f64, points }
}

/// Discrete maximum principle check against the range of the boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct DmpCheck {
    pub u_min: f64,
    pub u_max: f64,
    pub g_min: f64,
    pub g_max: f64,
    pub holds: bool,
}

/// Absolute slack allowed by the maximum-principle check.
pub const DMP_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct AuditRow {
    pub scheme: SchemeKind,
    pub epsilon: f64,
    pub m_matrix: MMatrixReport,
    /// Only for source-free problems; `None` also when the solve failed.
    pub dmp: Option<DmpCheck>,
    pub failure: Option<String>,
}

impl AuditRow {
    /// An M-matrix must come with a maximum principle.
    pub fn consistent(&self) -> bool {
        !self.m_matrix.is_m_matrix || self.dmp.as_ref().is_none_or(|d| d.holds)
    }
}

#[derive(Debug, Clone, Default)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
}

impl AuditReport {
    pub fn has_failures(&self) -> bool {
        self.rows.iter().any(|r| r.failure.is_some())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = csv::Writer::from_writer(Vec::new());
        out.write_record(["scheme", "epsilon", "m_matrix", "offending", "min_col_sum", "u_min", "u_max", "dmp"])
            .expect("in-memory write");
        for r in &self.rows {
            let (umin, umax, dmp) = match &r.dmp {
                Some(d) => (format!("{:.6e}", d.u_min), format!("{:.6e}", d.u_max), d.holds.to_string()),
                None => (String::new(), String::new(), r.failure.as_ref().map_or("n/a", |_| "FAILED").to_string()),
            };
            out.write_record([
                r.scheme.to_string(),
                format!("{:e}", r.epsilon),
                r.m_matrix.is_m_matrix.to_string(),
                r.m_matrix.offending_entries().len().to_string(),
                format!("{:.6e}", r.m_matrix.min_column_sum),
                umin,
                umax,
                dmp,
            ])
            .expect("in-memory write");
        }
        String::from_utf8(out.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}

/// Assembles each scheme for each `ε`, runs the M-matrix check on the
/// reduced system and, for the source-free boundary-layer problem,
/// checks `min g − tol ≤ u_h ≤ max g + tol`.
pub fn run_monotonicity_audit(mesh: &MeshFile, schemes: &[SchemeKind], epsilons: &[f64], problem: Problem) -> AuditReport {
    let mut rows = Vec::new();
    for &scheme in schemes {
        for &eps in epsilons {
            let spec = problem.spec(eps);
            let system = match assemble(scheme, mesh, &spec) {
                Ok(s) => s,
                Err(e) => {
                    rows.push(AuditRow {
                        scheme,
                        epsilon: eps,
                        m_matrix: m_matrix_check(&crate::linalg::CsrMatrix::identity(0), None),
                        dmp: None,
                        failure: Some(e.to_string()),
                    });
                    continue;
                }
            };
            let m = m_matrix_check(&system.matrix, None);
            let (dmp, failure) = match solve(&system) {
                Ok(sol) if problem == Problem::BoundaryLayer => (Some(dmp_check(&sol.u, &system)), None),
                Ok(_) => (None, None),
                Err(e) => (None, Some(e.to_string())),
            };
            rows.push(AuditRow { scheme, epsilon: eps, m_matrix: m, dmp, failure });
        }
    }
    AuditReport { rows }
}

fn dmp_check(u: &[f64], system: &LinearSystem) -> DmpCheck {
    let is_free: Vec<bool> = system.dof_of_vertex.iter().map(Option::is_some).collect();
    let g: Vec<f64> = (0..u.len()).filter(|&v| !is_free[v]).map(|v| system.boundary_values[v]).collect();
    let g_min = g.iter().copied().fold(f64::INFINITY, f64::min);
    let g_max = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let u_min = u.iter().copied().fold(f64::INFINITY, f64::min);
    let u_max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    DmpCheck { u_min, u_max, g_min, g_max, holds: u_min >= g_min - DMP_TOL && u_max <= g_max + DMP_TOL }
}
