//! Shared inputs for the assembly and solve benchmarks in `benches/`.

use eave_core::harness::{MeshFamily, Problem};
use eave_core::mesh::MeshFile;
use eave_core::schemes::ProblemSpec;

/// Meshes at nominal `h = 1/resolution` for the benchmarked schemes.
pub struct Fixture {
    pub resolution: usize,
    pub triangles: MeshFile,
    pub hexa_dual: MeshFile,
    pub voronoi: MeshFile,
    pub spec: ProblemSpec,
}

impl Fixture {
    /// Boundary-layer problem at `ε = 1e-4`.
    pub fn new(resolution: usize) -> Self {
        let mesh = |f: MeshFamily| f.at_resolution(resolution, 1).expect("benchmark mesh");
        Self {
            resolution,
            triangles: mesh(MeshFamily::Tri),
            hexa_dual: mesh(MeshFamily::HexaDual),
            voronoi: mesh(MeshFamily::Voro),
            spec: Problem::BoundaryLayer.spec(1e-4),
        }
    }
}
