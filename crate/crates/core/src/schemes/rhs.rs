use crate::mesh::{DualMeshPair, Point2, PolygonalMesh};

/// `F_h(φ_i) = Σ_K |K| f(c_K) / N_V^K` over the cells containing vertex `i`,
/// with `c_K` the cell centroid.
pub fn rhs_fh(mesh: &PolygonalMesh, f: &dyn Fn(Point2) -> f64) -> Vec<f64> {
    let mut b = vec![0.0; mesh.num_vertices()];
    for (k, cell) in mesh.cells().iter().enumerate() {
        let share = mesh.cell_area(k) * f(mesh.cell_centroid(k)) / cell.len() as f64;
        for &v in cell {
            b[v] += share;
        }
    }
    b
}

/// Lumped dual-cell load `|T|/3 · Σ f(x*_K)` over the seeds of the triangle
/// around each interior vertex; zero on boundary vertices.
pub fn rhs_meave(pair: &DualMeshPair, f: &dyn Fn(Point2) -> f64) -> Vec<f64> {
    let seeds = pair.seeds();
    let fk: Vec<f64> = seeds.iter().map(|&s| f(s)).collect();
    let mut b = vec![0.0; pair.primary().num_vertices()];
    for (t, tri) in pair.triangles().iter().enumerate() {
        b[pair.vertex_of_triangle(t)] = pair.triangle_area(t) / 3.0 * tri.iter().map(|&i| fk[i]).sum::<f64>();
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_hexa_dual, generate_ncvx};

    #[test]
    fn unit_load_partitions_area() {
        let m = generate_ncvx(3).unwrap();
        let b = rhs_fh(&m, &|_| 1.0);
        assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        assert!(rhs_fh(&m, &|_| 0.0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn square_cell_quarters() {
        let v = vec![Point2::new(0., 0.), Point2::new(1., 0.), Point2::new(1., 1.), Point2::new(0., 1.)];
        let m = PolygonalMesh::new(v, vec![vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(rhs_fh(&m, &|_| 1.0), vec![0.25; 4]);
    }

    #[test]
    fn dual_load_covers_triangles() {
        let pair = generate_hexa_dual(6).unwrap();
        let b = rhs_meave(&pair, &|_| 1.0);
        let total: f64 = (0..pair.triangles().len()).map(|t| pair.triangle_area(t)).sum();
        assert!((b.iter().sum::<f64>() - total).abs() < 1e-13);
    }
}
