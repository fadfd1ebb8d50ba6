//! The stabilization-free finite-volume form on Voronoi/Delaunay pairs.

use nalgebra::DMatrix;

use super::{LocalMatrix, VemError, MIN_CELL_AREA};
use crate::mesh::DualMeshPair;

/// `Σ_{E⊂∂K} ω_E^K δ_E(u) δ_E(v)` for cell `k`, in local vertex order.
pub fn fvm_poisson_local(pair: &DualMeshPair, k: usize) -> Result<LocalMatrix, VemError> {
    let mesh = pair.primary();
    let area = mesh.cell_area(k);
    if !(area >= MIN_CELL_AREA) {
        return Err(VemError::DegeneratePolygon { cell: k, area });
    }
    let n = mesh.cell(k).len();
    let mut a = DMatrix::zeros(n, n);
    for (l, &e) in mesh.cell_edges(k).iter().enumerate() {
        if pair.patches().get(e).is_none() {
            return Err(VemError::MissingPairing { edge: e });
        }
        let w = pair.omega(e);
        let (i, j) = (l, (l + 1) % n);
        a[(i, i)] += w;
        a[(j, j)] += w;
        a[(i, j)] -= w;
        a[(j, i)] -= w;
    }
    Ok(a)
}

/// Discrete normal flux `𝒢_n = δ_E(u)/|E|` on every edge patch, with
/// `δ_E` following the global edge orientation.
pub fn fvm_flux(u: &[f64], pair: &DualMeshPair) -> Vec<f64> {
    let mesh = pair.primary();
    mesh.edges()
        .iter()
        .enumerate()
        .map(|(id, e)| (u[e.v[1]] - u[e.v[0]]) / mesh.edge_length(id))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_hexa_dual;

    #[test]
    fn local_matrix_structure() {
        let pair = generate_hexa_dual(6).unwrap();
        let mesh = pair.primary();
        for k in 0..mesh.num_cells() {
            let a = fvm_poisson_local(&pair, k).unwrap();
            let n = a.nrows();
            for i in 0..n {
                assert!(a.row(i).sum().abs() < 1e-12);
                let j = (i + 1) % n;
                let e = mesh.cell_edges(k)[i];
                assert!((a[(i, j)] + pair.omega(e)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn flux_of_linear_function() {
        let pair = generate_hexa_dual(5).unwrap();
        let mesh = pair.primary();
        let u: Vec<f64> = mesh.vertices().iter().map(|p| p.x).collect();
        let g = fvm_flux(&u, &pair);
        for (e, gn) in g.iter().enumerate() {
            let t = mesh.edge_tangent(e);
            assert!((gn - t.x / t.norm()).abs() < 1e-12);
        }
        assert!(fvm_flux(&vec![2.0; mesh.num_vertices()], &pair).iter().all(|&v| v == 0.0));
    }
}
