//! Edge-averaged virtual element schemes and their Poisson counterparts.

use super::{apply_dirichlet, check_finite, rhs_fh, rhs_meave, AssembledOperator, LinearSystem, ProblemSpec, SchemeError};
use crate::flux::{edge_average_coefficients, edge_coefficients, EdgeCoefficients};
use crate::linalg::{CsrMatrix, TripletBuilder};
use crate::mesh::{DualMeshPair, Point2, PolygonalMesh};
use crate::vem::{fvm_poisson_local, poisson_local, LocalElement, StabChoice};

/// Exponentially fitted coefficients for the pair `(x_a, x_b)`, `τ = x_b − x_a`.
pub(crate) fn pair_coefficients(spec: &ProblemSpec, xa: Point2, xb: Point2) -> Result<EdgeCoefficients, SchemeError> {
    let e = edge_average_coefficients(&*spec.alpha, &*spec.beta, xa, xb, spec.averaging)?;
    Ok(edge_coefficients(&e))
}

/// Adds `w (c_ab u_b − c_ba u_a)(v_b − v_a)` to the rows of `a` and `b`.
pub(crate) fn add_pair(tb: &mut TripletBuilder, a: usize, b: usize, w: f64, c: &EdgeCoefficients) {
    tb.push(a, a, w * c.c_ji);
    tb.push(a, b, -w * c.c_ij);
    tb.push(b, b, w * c.c_ij);
    tb.push(b, a, -w * c.c_ji);
}

fn local_pairs(cell: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    let n = cell.len();
    (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
}

/// General EAVE: every vertex pair of every cell, weighted by
/// `ω_ij^K = −a_h^K(φ_i, φ_j)`. Pairs with `ω = 0` are skipped.
pub fn assemble_eave(mesh: &PolygonalMesh, spec: &ProblemSpec, stab: StabChoice) -> Result<LinearSystem, SchemeError> {
    let nv = mesh.num_vertices();
    let mut tb = TripletBuilder::new(nv, nv);
    for k in 0..mesh.num_cells() {
        let cell = mesh.cell(k);
        let a = poisson_local(&LocalElement::from_mesh(mesh, k)?, stab)?;
        for (i, j) in local_pairs(cell) {
            let w = -a[(i, j)];
            if w == 0.0 {
                continue;
            }
            let (ga, gb) = (cell[i].min(cell[j]), cell[i].max(cell[j]));
            let c = pair_coefficients(spec, mesh.vertex(ga), mesh.vertex(gb))?;
            add_pair(&mut tb, ga, gb, w, &c);
        }
    }
    let matrix = tb.build();
    check_finite(&matrix)?;
    let op = AssembledOperator { matrix, load: rhs_fh(mesh, &*spec.f) };
    Ok(apply_dirichlet(op, mesh, &*spec.g))
}

/// Monotone EAVE on a Voronoi/Delaunay pair.
///
/// The row of interior vertex `v` is the balance over the dual triangle
/// around `v`; since `δ_E` of that triangle's indicator equals `δ_E(φ_v)`,
/// rows are stored under the vertex index.
pub fn assemble_meave(pair: &DualMeshPair, spec: &ProblemSpec) -> Result<LinearSystem, SchemeError> {
    let mesh = pair.primary();
    let nv = mesh.num_vertices();
    let mut tb = TripletBuilder::with_capacity(nv, nv, 8 * mesh.edges().len());
    for k in 0..mesh.num_cells() {
        for &e in mesh.cell_edges(k) {
            let [a, b] = mesh.edges()[e].v;
            let c = pair_coefficients(spec, mesh.vertex(a), mesh.vertex(b))?;
            add_pair(&mut tb, a, b, pair.omega(e), &c);
        }
    }
    let matrix = tb.build();
    check_finite(&matrix)?;
    let op = AssembledOperator { matrix, load: rhs_meave(pair, &*spec.f) };
    Ok(apply_dirichlet(op, mesh, &*spec.g))
}

/// Global stabilized VEM Poisson matrix over all vertices.
pub fn assemble_vem_poisson(mesh: &PolygonalMesh, stab: StabChoice) -> Result<CsrMatrix, SchemeError> {
    let nv = mesh.num_vertices();
    let mut tb = TripletBuilder::new(nv, nv);
    for k in 0..mesh.num_cells() {
        let cell = mesh.cell(k);
        let a = poisson_local(&LocalElement::from_mesh(mesh, k)?, stab)?;
        for (i, &gi) in cell.iter().enumerate() {
            for (j, &gj) in cell.iter().enumerate() {
                tb.push(gi, gj, a[(i, j)]);
            }
        }
    }
    Ok(tb.build())
}

/// Global finite-volume Poisson matrix over all vertices.
pub fn assemble_fvm_poisson(pair: &DualMeshPair) -> Result<CsrMatrix, SchemeError> {
    let mesh = pair.primary();
    let nv = mesh.num_vertices();
    let mut tb = TripletBuilder::new(nv, nv);
    for k in 0..mesh.num_cells() {
        let cell = mesh.cell(k);
        let a = fvm_poisson_local(pair, k)?;
        for (i, &gi) in cell.iter().enumerate() {
            for (j, &gj) in cell.iter().enumerate() {
                tb.push(gi, gj, a[(i, j)]);
            }
        }
    }
    Ok(tb.build())
}
