//! Global assembly of the discretizations, right-hand sides and Dirichlet
//! elimination.
//!
//! Every scheme first builds a full vertex-indexed operator; boundary
//! vertices are then eliminated by moving their columns to the right-hand
//! side. All forms follow the weak form of `−∇·(α∇u + βu) = f` tested with
//! `v`, i.e. `∫ (α∇u + βu)·∇v = ∫ f v`.

mod edge_averaged;
mod rhs;
mod triangle;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::flux::{EdgeAveraging, FluxError};
use crate::linalg::{solve_sparse, CsrMatrix, Solution, SolverError, SolverOptions};
use crate::mesh::{DualMeshPair, MeshError, MeshFile, Point2, PolygonalMesh};
use crate::vem::{StabChoice, VemError};

pub use edge_averaged::{assemble_eave, assemble_fvm_poisson, assemble_meave, assemble_vem_poisson};
pub use rhs::{rhs_fh, rhs_meave};
pub use triangle::{assemble_eafe, assemble_fe, assemble_supg, supg_parameter};

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("scheme {scheme} needs a triangle mesh, cell {cell} has {count} vertices")]
    NotTriangular { scheme: &'static str, cell: usize, count: usize },
    #[error("M-EAVE needs a Voronoi mesh with its dual triangulation")]
    NeedsDualMesh,
    #[error("assembled entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },
    #[error(transparent)]
    Vem(#[from] VemError),
    #[error(transparent)]
    Flux(#[from] FluxError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

pub type ScalarFn = Arc<dyn Fn(Point2) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point2) -> Point2 + Send + Sync>;

/// Coefficients and data of `−∇·(α∇u + βu) = f` in the unit square, `u = g`
/// on the boundary.
#[derive(Clone)]
pub struct ProblemSpec {
    pub alpha: ScalarFn,
    pub beta: VectorFn,
    pub f: ScalarFn,
    pub g: ScalarFn,
    /// Set when `α ≡ ε`.
    pub epsilon: Option<f64>,
    /// How `α`, `β` are frozen on an edge for the exponentially fitted schemes.
    pub averaging: EdgeAveraging,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("epsilon", &self.epsilon)
            .field("averaging", &self.averaging)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn new(
        alpha: impl Fn(Point2) -> f64 + Send + Sync + 'static,
        beta: impl Fn(Point2) -> Point2 + Send + Sync + 'static,
        f: impl Fn(Point2) -> f64 + Send + Sync + 'static,
        g: impl Fn(Point2) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            alpha: Arc::new(alpha),
            beta: Arc::new(beta),
            f: Arc::new(f),
            g: Arc::new(g),
            epsilon: None,
            averaging: EdgeAveraging::Endpoints,
        }
    }

    /// Constant diffusion `ε` and constant velocity.
    pub fn constant(
        epsilon: f64,
        beta: Point2,
        f: impl Fn(Point2) -> f64 + Send + Sync + 'static,
        g: impl Fn(Point2) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { epsilon: Some(epsilon), ..Self::new(move |_| epsilon, move |_| beta, f, g) }
    }

    /// `−Δu = f`, `u = g`.
    pub fn poisson(
        f: impl Fn(Point2) -> f64 + Send + Sync + 'static,
        g: impl Fn(Point2) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::constant(1.0, Point2::ZERO, f, g)
    }

    pub fn with_averaging(mut self, averaging: EdgeAveraging) -> Self {
        self.averaging = averaging;
        self
    }

    pub fn alpha_at(&self, x: Point2) -> f64 {
        (self.alpha)(x)
    }

    pub fn beta_at(&self, x: Point2) -> Point2 {
        (self.beta)(x)
    }

    pub fn f_at(&self, x: Point2) -> f64 {
        (self.f)(x)
    }

    pub fn g_at(&self, x: Point2) -> f64 {
        (self.g)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Fe,
    Supg,
    Eafe,
    Eave(StabChoice),
    Meave,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Fe => "fe",
            SchemeKind::Supg => "supg",
            SchemeKind::Eafe => "eafe",
            SchemeKind::Eave(_) => "eave",
            SchemeKind::Meave => "meave",
        }
    }

    pub fn requires_triangles(&self) -> bool {
        matches!(self, SchemeKind::Fe | SchemeKind::Supg | SchemeKind::Eafe)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeKind::Eave(s) => write!(f, "eave-{s}"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for SchemeKind {
    type Err = String;
    /// Accepts `fe`, `supg`, `eafe`, `meave`, `eave` (S_V), `eave-sv`, `eave-se`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.to_ascii_lowercase().replace('_', "-");
        match s.as_str() {
            "fe" => Ok(SchemeKind::Fe),
            "supg" => Ok(SchemeKind::Supg),
            "eafe" => Ok(SchemeKind::Eafe),
            "meave" | "m-eave" => Ok(SchemeKind::Meave),
            "eave" => Ok(SchemeKind::Eave(StabChoice::DofScalar)),
            _ => match s.strip_prefix("eave-") {
                Some(stab) => match stab.parse::<StabChoice>()? {
                    StabChoice::None => Err("EAVE needs a stabilization (sv or se)".into()),
                    st => Ok(SchemeKind::Eave(st)),
                },
                None => Err(format!("unknown scheme '{s}'")),
            },
        }
    }
}

/// Vertex-indexed operator and load vector before boundary elimination.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledOperator {
    pub matrix: CsrMatrix,
    pub load: Vec<f64>,
}

/// Square system over the interior vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Free index → mesh vertex.
    pub free_dofs: Vec<usize>,
    /// Mesh vertex → free index.
    pub dof_of_vertex: Vec<Option<usize>>,
    /// `g` at boundary vertices, zero elsewhere.
    pub boundary_values: Vec<f64>,
    /// The operator before elimination.
    pub full: AssembledOperator,
}

impl LinearSystem {
    pub fn num_dofs(&self) -> usize {
        self.free_dofs.len()
    }

    /// Full vertex vector from free values and the boundary data.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut u = self.boundary_values.clone();
        for (k, &v) in self.free_dofs.iter().enumerate() {
            u[v] = x[k];
        }
        u
    }
}

/// Eliminates boundary vertices: `b_free = F_free − A_fb g`.
pub fn apply_dirichlet(op: AssembledOperator, mesh: &PolygonalMesh, g: &dyn Fn(Point2) -> f64) -> LinearSystem {
    let nv = mesh.num_vertices();
    let free_dofs = mesh.interior_vertices();
    let mut dof_of_vertex = vec![None; nv];
    for (k, &v) in free_dofs.iter().enumerate() {
        dof_of_vertex[v] = Some(k);
    }
    let boundary_values: Vec<f64> =
        (0..nv).map(|v| if mesh.is_boundary_vertex(v) { g(mesh.vertex(v)) } else { 0.0 }).collect();
    let boundary: Vec<usize> = (0..nv).filter(|&v| mesh.is_boundary_vertex(v)).collect();
    let matrix = op.matrix.submatrix(&free_dofs, &free_dofs);
    let coupling = op.matrix.submatrix(&free_dofs, &boundary);
    let gb: Vec<f64> = boundary.iter().map(|&v| boundary_values[v]).collect();
    let lift = coupling.spmv(&gb);
    let rhs = free_dofs.iter().zip(&lift).map(|(&v, l)| op.load[v] - l).collect();
    LinearSystem { matrix, rhs, free_dofs, dof_of_vertex, boundary_values, full: op }
}

pub(crate) fn check_finite(a: &CsrMatrix) -> Result<(), SchemeError> {
    match a.iter().find(|(_, _, v)| !v.is_finite()) {
        Some((row, col, _)) => Err(SchemeError::NonFiniteEntry { row, col }),
        None => Ok(()),
    }
}

/// Assembles `kind` on the given mesh and eliminates the Dirichlet data.
pub fn assemble(kind: SchemeKind, mesh: &MeshFile, spec: &ProblemSpec) -> Result<LinearSystem, SchemeError> {
    match kind {
        SchemeKind::Fe => assemble_fe(mesh.mesh(), spec),
        SchemeKind::Supg => assemble_supg(mesh.mesh(), spec),
        SchemeKind::Eafe => assemble_eafe(mesh.mesh(), spec),
        SchemeKind::Eave(stab) => assemble_eave(mesh.mesh(), spec, stab),
        SchemeKind::Meave => assemble_meave(mesh.dual().ok_or(SchemeError::NeedsDualMesh)?, spec),
    }
}

/// Discrete solution on all vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    pub u: Vec<f64>,
    pub solve: Solution,
}

pub fn solve(system: &LinearSystem) -> Result<DiscreteSolution, SchemeError> {
    solve_with(system, &SolverOptions::default())
}

pub fn solve_with(system: &LinearSystem, opts: &SolverOptions) -> Result<DiscreteSolution, SchemeError> {
    let solve = solve_sparse(&system.matrix, &system.rhs, opts)?;
    Ok(DiscreteSolution { u: system.expand(&solve.x), solve })
}

/// Convenience for [`assemble`] on a dual pair.
pub fn assemble_on_pair(kind: SchemeKind, pair: &DualMeshPair, spec: &ProblemSpec) -> Result<LinearSystem, SchemeError> {
    match kind {
        SchemeKind::Meave => assemble_meave(pair, spec),
        other => assemble(other, &MeshFile::Plain(pair.primary().clone()), spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_triangle_mesh, TriangleMeshKind};

    #[test]
    fn scheme_names_round_trip() {
        for k in [
            SchemeKind::Fe,
            SchemeKind::Supg,
            SchemeKind::Eafe,
            SchemeKind::Meave,
            SchemeKind::Eave(StabChoice::DofScalar),
            SchemeKind::Eave(StabChoice::EdgeDiff),
        ] {
            assert_eq!(k.to_string().parse::<SchemeKind>().unwrap(), k);
        }
        assert!("eave-none".parse::<SchemeKind>().is_err());
        assert!("fd".parse::<SchemeKind>().is_err());
    }

    #[test]
    fn constant_boundary_data_reproduced() {
        let mesh = generate_triangle_mesh(6, TriangleMeshKind::UniformRight).unwrap();
        let spec = ProblemSpec::poisson(|_| 0.0, |_| 1.0);
        for kind in [SchemeKind::Fe, SchemeKind::Eafe, SchemeKind::Eave(StabChoice::DofScalar)] {
            let sys = assemble(kind, &MeshFile::Plain(mesh.clone()), &spec).unwrap();
            let sol = solve(&sys).unwrap();
            let err = sol.u.iter().map(|u| (u - 1.0).abs()).fold(0.0, f64::max);
            assert!(err < 1e-12, "{kind}: {err:e} {:?}", sol.solve.method);
        }
    }

    #[test]
    fn zero_boundary_data_leaves_load() {
        let mesh = generate_triangle_mesh(3, TriangleMeshKind::UniformRight).unwrap();
        let spec = ProblemSpec::poisson(|_| 1.0, |_| 0.0);
        let sys = assemble_fe(&mesh, &spec).unwrap();
        for (k, &v) in sys.free_dofs.iter().enumerate() {
            assert_eq!(sys.rhs[k], sys.full.load[v]);
        }
    }
}
