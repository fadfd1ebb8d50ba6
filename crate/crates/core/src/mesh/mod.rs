//! Polygonal meshes of the unit square, mesh generators and the
//! primal/dual pairing used by the box-type scheme.

mod dual;
mod io;
mod point;
mod polygonal;
mod structured;
pub mod voronoi;

use thiserror::Error;

pub use dual::{build_dual_pairing, generate_hexa_dual, generate_voro_dual, generate_voro_dual_with, hexa_cell_count, DualMeshPair, EdgePatch, VoroDualOptions};
pub use io::{read_mesh, read_mesh_file, write_mesh, write_mesh_file, MeshFile};
pub use point::{circumcenter, cot_at, diameter, interior_angle, polygon_centroid, signed_area, triangle_angles, Point2};
pub use polygonal::{Edge, PolygonalMesh};
pub use structured::{generate_ncvx, generate_ncvx_with, generate_triangle_mesh, TriangleMeshKind, NCVX_DENT_DEPTH};
pub use voronoi::generate_voronoi;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("vertex {vertex} has non-finite coordinates")]
    NonFiniteVertex { vertex: usize },
    #[error("cell {cell} has {count} vertices (need at least 3)")]
    TooFewVertices { cell: usize, count: usize },
    #[error("cell {cell} references vertex {vertex} which does not exist")]
    VertexOutOfRange { cell: usize, vertex: usize },
    #[error("cell {cell} repeats a vertex")]
    RepeatedVertex { cell: usize },
    #[error("cell {cell} is not counterclockwise (signed area {signed_area:e})")]
    NonCcwCell { cell: usize, signed_area: f64 },
    #[error("directed edge {a} -> {b} is used by more than one cell")]
    NonManifoldEdge { a: usize, b: usize },
    #[error("boundary edge {edge} does not lie on the domain boundary")]
    NonConforming { edge: usize },
    #[error("cell areas sum to {total}, expected {expected}")]
    TilingMismatch { total: f64, expected: f64 },
    #[error("dual pairing violated ({kind}) at {index}: {detail}")]
    DualityViolation { kind: &'static str, index: usize, detail: String },
    #[error("could not produce an acute dual triangulation after {attempts} attempts")]
    AcutenessFailure { attempts: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mesh generation failed: {0}")]
    Generator(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
