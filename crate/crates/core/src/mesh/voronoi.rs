//! Voronoi tessellations of the unit square.
//!
//! Cells are obtained by clipping the square against the bisectors of each
//! seed's Delaunay neighbours; vertices computed independently in adjacent
//! cells are then merged so the result is a conforming polygonal mesh.

use std::collections::HashMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spade::{DelaunayTriangulation, Triangulation};

use super::point::{polygon_centroid, signed_area, Point2};
use super::{MeshError, PolygonalMesh};

/// Distance below which two computed Voronoi vertices are identified.
pub const MERGE_TOL: f64 = 1e-10;

/// Delaunay triangulation of a seed set, by seed index.
#[derive(Debug, Clone)]
pub struct Delaunay {
    pub neighbors: Vec<Vec<usize>>,
    /// Counterclockwise triangles.
    pub triangles: Vec<[usize; 3]>,
}

pub fn delaunay(seeds: &[Point2]) -> Result<Delaunay, MeshError> {
    let pts: Vec<spade::Point2<f64>> = seeds.iter().map(|p| spade::Point2::new(p.x, p.y)).collect();
    let t = DelaunayTriangulation::<spade::Point2<f64>>::bulk_load_stable(pts)
        .map_err(|e| MeshError::Generator(format!("delaunay insertion failed: {e:?}")))?;
    if t.num_vertices() != seeds.len() {
        return Err(MeshError::Generator(format!(
            "{} duplicate seeds",
            seeds.len() - t.num_vertices()
        )));
    }
    let mut neighbors = vec![Vec::new(); seeds.len()];
    for v in t.vertices() {
        let i = v.fix().index();
        for e in v.out_edges() {
            neighbors[i].push(e.to().fix().index());
        }
        neighbors[i].sort_unstable();
    }
    let mut triangles = Vec::with_capacity(t.num_inner_faces());
    for f in t.inner_faces() {
        let [a, b, c] = f.vertices().map(|v| v.fix().index());
        let tri = if (seeds[b] - seeds[a]).cross(seeds[c] - seeds[a]) > 0.0 { [a, b, c] } else { [a, c, b] };
        triangles.push(tri);
    }
    // canonical order: rotate smallest index first, then sort
    for t in &mut triangles {
        let k = (0..3).min_by_key(|&k| t[k]).unwrap();
        t.rotate_left(k);
    }
    triangles.sort_unstable();
    Ok(Delaunay { neighbors, triangles })
}

fn unit_square() -> Vec<Point2> {
    vec![Point2::new(0., 0.), Point2::new(1., 0.), Point2::new(1., 1.), Point2::new(0., 1.)]
}

/// Keeps the part of a convex polygon with `(x − m)·d ≤ 0`.
fn clip_half_plane(poly: &[Point2], m: Point2, d: Point2) -> Vec<Point2> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let sp = (p - m).dot(d);
        let sq = (q - m).dot(d);
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let t = sp / (sp - sq);
            let mut x = p + (q - p) * t;
            // keep wall intersections exactly on the wall
            if p.x == q.x {
                x.x = p.x;
            }
            if p.y == q.y {
                x.y = p.y;
            }
            out.push(x);
        }
    }
    out
}

/// Clipped Voronoi cell of `seeds[i]` as a CCW polygon.
pub fn voronoi_cell(seeds: &[Point2], i: usize, neighbors: &[usize]) -> Vec<Point2> {
    let s = seeds[i];
    let mut poly = unit_square();
    for &j in neighbors {
        let q = seeds[j];
        poly = clip_half_plane(&poly, s.midpoint(q), q - s);
        if poly.is_empty() {
            break;
        }
    }
    poly
}

pub fn voronoi_cells(seeds: &[Point2], dt: &Delaunay) -> Vec<Vec<Point2>> {
    (0..seeds.len()).map(|i| voronoi_cell(seeds, i, &dt.neighbors[i])).collect()
}

/// Merges nearly coincident vertices across polygons and builds a mesh.
pub fn assemble_polygons(polys: &[Vec<Point2>], tol: f64) -> Result<PolygonalMesh, MeshError> {
    let inv = 1.0 / tol;
    let key = |p: Point2| ((p.x * inv).floor() as i64, (p.y * inv).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut vertices: Vec<Point2> = Vec::new();
    let mut cells = Vec::with_capacity(polys.len());
    for (k, poly) in polys.iter().enumerate() {
        let mut cell: Vec<usize> = Vec::with_capacity(poly.len());
        for &p in poly {
            let (kx, ky) = key(p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = buckets.get(&(kx + dx, ky + dy)) {
                        for &v in list {
                            if vertices[v].dist(p) <= tol {
                                found = Some(v);
                                break 'search;
                            }
                        }
                    }
                }
            }
            let id = found.unwrap_or_else(|| {
                vertices.push(p);
                buckets.entry((kx, ky)).or_default().push(vertices.len() - 1);
                vertices.len() - 1
            });
            if cell.last() != Some(&id) {
                cell.push(id);
            }
        }
        while cell.len() > 1 && cell.first() == cell.last() {
            cell.pop();
        }
        if cell.len() < 3 {
            return Err(MeshError::Generator(format!("cell {k} collapsed during vertex merging")));
        }
        cells.push(cell);
    }
    let mesh = PolygonalMesh::new(vertices, cells)?;
    check_boundary_on_walls(&mesh)?;
    Ok(mesh)
}

/// Every boundary edge of a conforming tiling of the unit square lies on a wall.
pub(crate) fn check_boundary_on_walls(mesh: &PolygonalMesh) -> Result<(), MeshError> {
    let on_wall = |p: Point2, q: Point2| {
        (p.x == 0.0 && q.x == 0.0) || (p.x == 1.0 && q.x == 1.0) || (p.y == 0.0 && q.y == 0.0) || (p.y == 1.0 && q.y == 1.0)
    };
    for (id, e) in mesh.edges().iter().enumerate() {
        if e.is_boundary() && !on_wall(mesh.vertex(e.v[0]), mesh.vertex(e.v[1])) {
            return Err(MeshError::NonConforming { edge: id });
        }
    }
    Ok(())
}

/// Moves every seed to the centroid of its clipped Voronoi cell.
pub fn lloyd_step(seeds: &[Point2]) -> Result<Vec<Point2>, MeshError> {
    let dt = delaunay(seeds)?;
    Ok(voronoi_cells(seeds, &dt).iter().map(|c| polygon_centroid(c)).collect())
}

/// Coefficient of variation (std / mean) of the Voronoi cell areas.
pub fn cell_area_variation(seeds: &[Point2]) -> Result<f64, MeshError> {
    let dt = delaunay(seeds)?;
    let areas: Vec<f64> = voronoi_cells(seeds, &dt).iter().map(|c| signed_area(c)).collect();
    let n = areas.len() as f64;
    let mean = areas.iter().sum::<f64>() / n;
    let var = areas.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    Ok(var.sqrt() / mean)
}

/// `n` seeds drawn uniformly in the open unit square.
pub fn random_seeds(n: usize, seed: u64) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Point2::new(rng.random::<f64>(), rng.random::<f64>())).collect()
}

pub fn voronoi_from_seeds(seeds: &[Point2]) -> Result<PolygonalMesh, MeshError> {
    let dt = delaunay(seeds)?;
    assemble_polygons(&voronoi_cells(seeds, &dt), MERGE_TOL)
}

/// Voronoi tessellation of `n` random seeds, optionally relaxed by Lloyd
/// iterations (`0` gives the raw tessellation).
pub fn generate_voronoi(n: usize, lloyd_iters: usize, seed: u64) -> Result<PolygonalMesh, MeshError> {
    if n == 0 {
        return Err(MeshError::InvalidParameter("voronoi needs at least one seed".into()));
    }
    let mut seeds = random_seeds(n, seed);
    for _ in 0..lloyd_iters {
        seeds = lloyd_step(&seeds)?;
    }
    voronoi_from_seeds(&seeds)
}
