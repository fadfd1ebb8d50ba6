//! Structured triangle meshes and the non-convex chevron mesh.

use std::fmt;
use std::str::FromStr;

use super::point::Point2;
use super::{MeshError, PolygonalMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleMeshKind {
    /// Each grid square split along its `(0,0)–(1,1)` diagonal.
    UniformRight,
    /// Rows of near-equilateral triangles, closed by half-triangles at the walls.
    Equilateral,
}

impl fmt::Display for TriangleMeshKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriangleMeshKind::UniformRight => "uniform-right",
            TriangleMeshKind::Equilateral => "equilateral",
        })
    }
}

impl FromStr for TriangleMeshKind {
    type Err = MeshError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform-right" => Ok(TriangleMeshKind::UniformRight),
            "equilateral" => Ok(TriangleMeshKind::Equilateral),
            _ => Err(MeshError::InvalidParameter(format!("unknown triangle mesh kind '{s}'"))),
        }
    }
}

/// Triangulation of the unit square with `n` subdivisions per side.
pub fn generate_triangle_mesh(n: usize, kind: TriangleMeshKind) -> Result<PolygonalMesh, MeshError> {
    if n == 0 {
        return Err(MeshError::InvalidParameter("triangle mesh needs n >= 1".into()));
    }
    match kind {
        TriangleMeshKind::UniformRight => uniform_right(n),
        TriangleMeshKind::Equilateral => equilateral(n),
    }
}

fn uniform_right(n: usize) -> Result<PolygonalMesh, MeshError> {
    let hn = 1.0 / n as f64;
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Point2::new(coord(i, n, hn), coord(j, n, hn)));
        }
    }
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            cells.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    PolygonalMesh::new(vertices, cells)
}

/// `i/n`, exact at both ends.
fn coord(i: usize, n: usize, hn: f64) -> f64 {
    if i == n {
        1.0
    } else {
        i as f64 * hn
    }
}

fn equilateral(n: usize) -> Result<PolygonalMesh, MeshError> {
    let m = ((2.0 * n as f64) / 3f64.sqrt()).round().max(1.0) as usize;
    let hn = 1.0 / n as f64;
    let mut vertices = Vec::new();
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let y = coord(k, m, 1.0 / m as f64);
        let mut xs = Vec::with_capacity(n + 2);
        if k % 2 == 0 {
            xs.extend((0..=n).map(|i| coord(i, n, hn)));
        } else {
            xs.push(0.0);
            xs.extend((0..n).map(|i| (i as f64 + 0.5) * hn));
            xs.push(1.0);
        }
        let row = xs
            .into_iter()
            .map(|x| {
                vertices.push(Point2::new(x, y));
                vertices.len() - 1
            })
            .collect();
        rows.push(row);
    }
    let mut cells = Vec::new();
    for k in 0..m {
        let (lo, up) = (&rows[k], &rows[k + 1]);
        let (mut i, mut j) = (0, 0);
        while i + 1 < lo.len() || j + 1 < up.len() {
            let advance_lower = if i + 1 == lo.len() {
                false
            } else if j + 1 == up.len() {
                true
            } else {
                vertices[lo[i + 1]].x <= vertices[up[j + 1]].x
            };
            if advance_lower {
                cells.push(vec![lo[i], lo[i + 1], up[j]]);
                i += 1;
            } else {
                cells.push(vec![lo[i], up[j + 1], up[j]]);
                j += 1;
            }
        }
    }
    PolygonalMesh::new(vertices, cells)
}

/// Depth of the notch of [`generate_ncvx`] as a fraction of the macro-cell size.
pub const NCVX_DENT_DEPTH: f64 = 0.5;

/// `n × n` macro-cells of size `H = 1/n`, each split into a non-convex
/// octagon and two triangles.
///
/// The right-edge midpoint of each macro-cell is pushed left by
/// [`NCVX_DENT_DEPTH`]` · H`, giving a chevron octagon with a reflex vertex
/// there; the notch is filled by two triangles sharing the original
/// midpoint. Every vertex lies on a horizontal line `y = k/(2n)`; with the
/// default depth the vertices form the full lattice `{k/(2n)}²`.
///
/// The notch sits in a vertical edge on purpose: a notch in a horizontal
/// edge makes every vertex patch mirror-symmetric in `x`, which turns
/// discretizations of solutions of the form `x·φ(y)` nodally exact.
pub fn generate_ncvx(n: usize) -> Result<PolygonalMesh, MeshError> {
    generate_ncvx_with(n, NCVX_DENT_DEPTH)
}

/// [`generate_ncvx`] with a custom notch depth in `(0, 1)`.
pub fn generate_ncvx_with(n: usize, depth: f64) -> Result<PolygonalMesh, MeshError> {
    if n == 0 {
        return Err(MeshError::InvalidParameter("ncvx needs n >= 1".into()));
    }
    if !(depth > 0.0 && depth < 1.0) {
        return Err(MeshError::InvalidParameter(format!("ncvx notch depth must lie in (0, 1), got {depth}")));
    }
    let l = 2 * n;
    let hl = 1.0 / l as f64;
    let id = |i: usize, j: usize| j * (l + 1) + i;
    let mut vertices = Vec::with_capacity((l + 1) * (l + 1) + n * n);
    for j in 0..=l {
        for i in 0..=l {
            if i % 2 == 1 && j % 2 == 1 {
                // cell centres are replaced by the dents below
                vertices.push(Point2::new(f64::NAN, f64::NAN));
                continue;
            }
            vertices.push(Point2::new(coord(i, l, hl), coord(j, l, hl)));
        }
    }
    let big = 1.0 / n as f64;
    let mut cells = Vec::with_capacity(3 * n * n);
    for bj in 0..n {
        for bi in 0..n {
            let (i0, j0) = (2 * bi, 2 * bj);
            let c00 = id(i0, j0);
            let mb = id(i0 + 1, j0);
            let c10 = id(i0 + 2, j0);
            let mr = id(i0 + 2, j0 + 1);
            let c11 = id(i0 + 2, j0 + 2);
            let mt = id(i0 + 1, j0 + 2);
            let c01 = id(i0, j0 + 2);
            let ml = id(i0, j0 + 1);
            let dent = id(i0 + 1, j0 + 1);
            vertices[dent] = Point2::new((bi as f64 + 1.0 - depth) * big, coord(j0 + 1, l, hl));
            cells.push(vec![c00, mb, c10, dent, c11, mt, c01, ml]);
            cells.push(vec![c10, mr, dent]);
            cells.push(vec![dent, mr, c11]);
        }
    }
    PolygonalMesh::new(vertices, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::point::{interior_angle, triangle_angles};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn uniform_right_counts() {
        let m = generate_triangle_mesh(1, TriangleMeshKind::UniformRight).unwrap();
        assert_eq!((m.num_cells(), m.num_vertices()), (2, 4));
        let m = generate_triangle_mesh(2, TriangleMeshKind::UniformRight).unwrap();
        assert_eq!((m.num_cells(), m.num_vertices()), (8, 9));
        m.check_tiling(1.0, 1e-14).unwrap();
    }

    #[test]
    fn equilateral_interior_triangles_acute() {
        for n in [2, 5, 8, 16] {
            let m = generate_triangle_mesh(n, TriangleMeshKind::Equilateral).unwrap();
            m.check_tiling(1.0, 1e-12).unwrap();
            for (k, c) in m.cells().iter().enumerate() {
                if c.iter().any(|&v| m.is_boundary_vertex(v)) {
                    continue;
                }
                let p = m.cell_points(k);
                let a = triangle_angles(p[0], p[1], p[2]);
                assert!(a.iter().all(|&t| t < FRAC_PI_2), "n={n} cell {k}: {a:?}");
            }
        }
    }

    #[test]
    fn ncvx_structure() {
        let m = generate_ncvx(4).unwrap();
        assert_eq!(m.num_cells(), 48);
        m.check_tiling(1.0, 1e-12).unwrap();
        let reflex = m
            .cells()
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let p = m.cell_points(*k);
                (0..p.len()).any(|i| interior_angle(&p, i) > std::f64::consts::PI + 1e-12)
            })
            .count();
        assert_eq!(reflex, 16);
        for p in m.vertices() {
            assert_eq!((p.y * 8.0).round() / 8.0, p.y);
            assert_eq!((p.x * 8.0).round() / 8.0, p.x);
        }
    }

    #[test]
    fn ncvx_custom_depth_keeps_rows() {
        let m = generate_ncvx_with(3, 0.3).unwrap();
        m.check_tiling(1.0, 1e-12).unwrap();
        assert!(m.vertices().iter().all(|p| (p.y * 6.0 - (p.y * 6.0).round()).abs() < 1e-12));
        assert!(generate_ncvx_with(3, 1.0).is_err());
    }
}
