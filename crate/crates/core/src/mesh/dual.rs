//! Voronoi meshes bound to their dual Delaunay triangulation.
//!
//! Each Voronoi cell `K` owns one seed `x*_K`; each interior Voronoi vertex
//! is the circumcenter of exactly one (acute) Delaunay triangle. Interior
//! edges `E` are paired with the dual edge `E*` joining the two seeds, and
//! `D_E` is the kite spanned by `E` and both seeds. On a boundary edge `E*`
//! is the perpendicular from the seed to the wall and `D_E` the single
//! sub-triangle `(x*_K, E)`.

use std::collections::HashMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::point::{circumcenter, Point2};
use super::voronoi::{assemble_polygons, delaunay, voronoi_cells, MERGE_TOL};
use super::{MeshError, PolygonalMesh};

/// Absolute tolerance of the pairing checks (the domain is the unit square).
pub const DUALITY_TOL: f64 = 1e-10;

/// Dual data attached to one primary edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePatch {
    pub edge: usize,
    /// `|D_E|`.
    pub area: f64,
    /// `|E*|`.
    pub dual_length: f64,
    /// `E ∩ E*`: the midpoint of `E*` on interior edges, the foot of the
    /// perpendicular on boundary edges.
    pub dual_midpoint: Point2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualMeshPair {
    primary: PolygonalMesh,
    seeds: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
    triangle_vertex: Vec<usize>,
    vertex_triangle: Vec<Option<usize>>,
    patches: Vec<EdgePatch>,
}

impl DualMeshPair {
    pub fn primary(&self) -> &PolygonalMesh {
        &self.primary
    }

    /// Seed `x*_K` of every primary cell.
    pub fn seeds(&self) -> &[Point2] {
        &self.seeds
    }

    /// Dual triangles over seed indices, counterclockwise.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Interior primary vertex at the circumcenter of triangle `t`.
    pub fn vertex_of_triangle(&self, t: usize) -> usize {
        self.triangle_vertex[t]
    }

    /// Dual triangle around primary vertex `v` (`None` on the boundary).
    pub fn triangle_of_vertex(&self, v: usize) -> Option<usize> {
        self.vertex_triangle[v]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * (self.seeds[b] - self.seeds[a]).cross(self.seeds[c] - self.seeds[a])
    }

    pub fn patches(&self) -> &[EdgePatch] {
        &self.patches
    }

    pub fn patch(&self, e: usize) -> &EdgePatch {
        &self.patches[e]
    }

    /// Finite-volume edge weight `ω_E^K`: `|E*|/(2|E|)` on interior edges and
    /// `|E*|/|E|` on boundary edges — in both cases `dist(x*_K, E)/|E|`.
    pub fn omega(&self, e: usize) -> f64 {
        let p = &self.patches[e];
        let len = self.primary.edge_length(e);
        if self.primary.edges()[e].is_boundary() {
            p.dual_length / len
        } else {
            p.dual_length / (2.0 * len)
        }
    }

    /// Consumes the pair, returning its parts for serialization.
    pub fn into_parts(self) -> (PolygonalMesh, Vec<Point2>, Vec<[usize; 3]>) {
        (self.primary, self.seeds, self.triangles)
    }
}

fn violation(kind: &'static str, index: usize, detail: String) -> MeshError {
    MeshError::DualityViolation { kind, index, detail }
}

/// Builds and verifies the primal/dual pairing.
///
/// `seeds[k]` must lie inside cell `k`, and `triangles` must be exactly the
/// Delaunay triangles whose circumcenters are the interior primary vertices.
/// Every invariant is checked; the first failure is reported.
pub fn build_dual_pairing(
    primary: PolygonalMesh,
    seeds: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
) -> Result<DualMeshPair, MeshError> {
    if seeds.len() != primary.num_cells() {
        return Err(violation(
            "seed count",
            seeds.len(),
            format!("{} seeds for {} cells", seeds.len(), primary.num_cells()),
        ));
    }
    for (k, &s) in seeds.iter().enumerate() {
        let pts = primary.cell_points(k);
        let inside = (0..pts.len()).all(|l| (pts[(l + 1) % pts.len()] - pts[l]).cross(s - pts[l]) > 0.0);
        if !inside {
            return Err(violation("seed outside cell", k, format!("seed {s:?}")));
        }
    }

    let mut patches = Vec::with_capacity(primary.edges().len());
    for (id, e) in primary.edges().iter().enumerate() {
        let a = primary.vertex(e.v[0]);
        let b = primary.vertex(e.v[1]);
        let tau = b - a;
        let len = tau.norm();
        let sl = seeds[e.left];
        let patch = match e.right {
            Some(r) => {
                let sr = seeds[r];
                let tau_star = sr - sl;
                let dual_length = tau_star.norm();
                if tau.dot(tau_star).abs() >= DUALITY_TOL * len * dual_length {
                    return Err(violation(
                        "orthogonality",
                        id,
                        format!("|τ_E·τ_E*| = {:e}", tau.dot(tau_star).abs()),
                    ));
                }
                let m = sl.midpoint(sr);
                let off_line = tau.cross(m - a).abs() / len;
                let t = tau.dot(m - a) / (len * len);
                if off_line > DUALITY_TOL || !(-DUALITY_TOL..=1.0 + DUALITY_TOL).contains(&t) {
                    return Err(violation(
                        "midpoint",
                        id,
                        format!("midpoint of E* at distance {off_line:e}, parameter {t}"),
                    ));
                }
                let area = 0.5 * (tau.cross(sl - a).abs() + tau.cross(sr - a).abs());
                EdgePatch { edge: id, area, dual_length, dual_midpoint: m }
            }
            None => {
                let t = tau.dot(sl - a) / (len * len);
                let foot = a + tau * t;
                let area = 0.5 * tau.cross(sl - a).abs();
                EdgePatch { edge: id, area, dual_length: sl.dist(foot), dual_midpoint: foot }
            }
        };
        patches.push(patch);
    }

    // locate interior vertices by circumcenter through a coarse grid hash
    let inv = 1.0 / (1e3 * DUALITY_TOL);
    let key = |p: Point2| ((p.x * inv).floor() as i64, (p.y * inv).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for v in primary.interior_vertices() {
        grid.entry(key(primary.vertex(v))).or_default().push(v);
    }
    let mut vertex_triangle = vec![None; primary.num_vertices()];
    let mut triangle_vertex = Vec::with_capacity(triangles.len());
    for (t, tri) in triangles.iter().enumerate() {
        if tri.iter().any(|&i| i >= seeds.len()) {
            return Err(violation("triangle index", t, format!("{tri:?}")));
        }
        let [p, q, r] = tri.map(|i| seeds[i]);
        if (q - p).cross(r - p) <= 0.0 {
            return Err(violation("triangle orientation", t, format!("{tri:?}")));
        }
        for (x, y, z) in [(p, q, r), (q, r, p), (r, p, q)] {
            if (y - x).dot(z - x) <= 0.0 {
                return Err(violation("acuteness", t, format!("non-acute angle in triangle {tri:?}")));
            }
        }
        let c = circumcenter(p, q, r).ok_or_else(|| violation("circumcenter", t, "degenerate".into()))?;
        let (kx, ky) = key(c);
        let mut found = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = grid.get(&(kx + dx, ky + dy)) {
                    found.extend(list.iter().copied().filter(|&v| primary.vertex(v).dist(c) <= DUALITY_TOL));
                }
            }
        }
        let v = match found.as_slice() {
            [v] => *v,
            [] => return Err(violation("circumcenter", t, format!("no interior vertex at {c:?}"))),
            _ => return Err(violation("circumcenter", t, format!("{} vertices at {c:?}", found.len()))),
        };
        if let Some(other) = vertex_triangle[v] {
            return Err(violation("bijection", t, format!("vertex {v} already paired with triangle {other}")));
        }
        vertex_triangle[v] = Some(t);
        triangle_vertex.push(v);
    }
    if let Some(v) = primary.interior_vertices().into_iter().find(|&v| vertex_triangle[v].is_none()) {
        return Err(violation("bijection", v, format!("interior vertex {v} has no dual triangle")));
    }

    Ok(DualMeshPair { primary, seeds, triangles, triangle_vertex, vertex_triangle, patches })
}

/// How a seed may move while keeping the hull of the seed set fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SeedFreedom {
    Free,
    /// Moves along a vertical line (boundary columns).
    Vertical,
    /// Moves along a horizontal line (bottom and top rows).
    Horizontal,
}

struct Lattice {
    seeds: Vec<Point2>,
    freedom: Vec<SeedFreedom>,
    spacing: f64,
}

/// Equilateral seed lattice for resolution `n`.
///
/// Rows are `dy = s√3/2` apart with spacing `s = 1/(n + ½)`, alternately
/// offset by `s/2`, and centred vertically. Boundary columns sit at
/// `x = s/4` and `x = 1 − s/4` halfway between rows, so the hull triangles
/// stay acute and the Voronoi edges between column seeds run straight into
/// the walls.
fn hexa_lattice(n: usize) -> Lattice {
    let s = 1.0 / (n as f64 + 0.5);
    let dy = s * 3f64.sqrt() / 2.0;
    let m = ((1.0 / dy).round() as usize).max(2);
    let b = 0.5 * (1.0 - (m - 1) as f64 * dy);
    let row_y = |k: usize| b + k as f64 * dy;
    let mut seeds = Vec::new();
    let mut freedom = Vec::new();
    for k in 0..m {
        let edge_row = k == 0 || k == m - 1;
        let (x0, count) = if k % 2 == 0 { (0.75 * s, n) } else { (1.25 * s, n - 1) };
        for i in 0..count {
            seeds.push(Point2::new(x0 + i as f64 * s, row_y(k)));
            freedom.push(if edge_row { SeedFreedom::Horizontal } else { SeedFreedom::Free });
        }
    }
    for x in [0.25 * s, 1.0 - 0.25 * s] {
        for k in 0..m - 1 {
            seeds.push(Point2::new(x, row_y(k) + 0.5 * dy));
            freedom.push(SeedFreedom::Vertical);
        }
    }
    Lattice { seeds, freedom, spacing: s }
}

fn pair_from_seeds(seeds: Vec<Point2>) -> Result<DualMeshPair, MeshError> {
    let dt = delaunay(&seeds)?;
    let mesh = assemble_polygons(&voronoi_cells(&seeds, &dt), MERGE_TOL)?;
    build_dual_pairing(mesh, seeds, dt.triangles)
}

/// Structured hexagonal Voronoi mesh with an acute dual triangulation;
/// `n` seeds per row, so `h ≈ 1/n`.
pub fn generate_hexa_dual(n: usize) -> Result<DualMeshPair, MeshError> {
    if n < 2 {
        return Err(MeshError::InvalidParameter("hexa-dual needs n >= 2".into()));
    }
    pair_from_seeds(hexa_lattice(n).seeds)
}

/// Number of cells of `generate_hexa_dual(n)`.
/// Number of cells of `generate_hexa_dual(n)`.
pub fn hexa_cell_count(n: usize) -> usize {
    let s = 1.0 / (n as f64 + 0.5);
    let m = ((1.0 / (s * 3f64.sqrt() / 2.0)).round() as usize).max(2);
    let even = m.div_ceil(2);
    even * n + (m - even) * (n - 1) + 2 * (m - 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoroDualOptions {
    /// Initial seed perturbation as a fraction of the lattice spacing.
    pub jitter: f64,
    /// Lloyd sweeps applied after perturbing.
    pub lloyd_iters: usize,
    /// Every dual angle must stay below `π/2 − margin`.
    pub angle_margin: f64,
    /// Rounds of pulling offending seeds back towards the lattice.
    pub repair_rounds: usize,
    /// Full restarts (with smaller jitter) before giving up.
    pub max_attempts: usize,
}

impl Default for VoroDualOptions {
    fn default() -> Self {
        Self { jitter: 0.15, lloyd_iters: 3, angle_margin: 0.05, repair_rounds: 60, max_attempts: 20 }
    }
}

/// Unstructured Voronoi mesh of about `n` cells whose dual triangles are
/// all acute.
///
/// Starts from the hexagonal lattice closest to `n` cells, perturbs the
/// seeds (hull seeds only along the hull), smooths with a few constrained
/// Lloyd sweeps and then repeatedly halves the perturbation of seeds that
/// belong to a triangle violating the angle margin.
pub fn generate_voro_dual(n: usize, seed: u64) -> Result<DualMeshPair, MeshError> {
    generate_voro_dual_with(n, seed, &VoroDualOptions::default())
}

pub fn generate_voro_dual_with(n: usize, seed: u64, opts: &VoroDualOptions) -> Result<DualMeshPair, MeshError> {
    if n < 4 {
        return Err(MeshError::InvalidParameter("voro-dual needs n >= 4".into()));
    }
    let res = (2..)
        .take_while(|&r| r == 2 || hexa_cell_count(r) <= 2 * n)
        .min_by_key(|&r| hexa_cell_count(r).abs_diff(n))
        .unwrap_or(2);
    let lattice = hexa_lattice(res);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amp = opts.jitter;
    for _ in 0..opts.max_attempts {
        if let Some(seeds) = perturbed_acute_seeds(&lattice, amp, opts, &mut rng)? {
            return pair_from_seeds(seeds);
        }
        amp *= 0.7;
    }
    Err(MeshError::AcutenessFailure { attempts: opts.max_attempts })
}

fn constrain(p: Point2, base: Point2, freedom: SeedFreedom) -> Point2 {
    match freedom {
        SeedFreedom::Free => p,
        SeedFreedom::Vertical => Point2::new(base.x, p.y),
        SeedFreedom::Horizontal => Point2::new(p.x, base.y),
    }
}

fn perturbed_acute_seeds(
    lattice: &Lattice,
    amp: f64,
    opts: &VoroDualOptions,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Vec<Point2>>, MeshError> {
    let base = &lattice.seeds;
    let r = amp * lattice.spacing;
    let mut seeds: Vec<Point2> = base
        .iter()
        .zip(&lattice.freedom)
        .map(|(&p, &f)| {
            let d = Point2::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0) * r;
            constrain(p + d, p, f)
        })
        .collect();
    for _ in 0..opts.lloyd_iters {
        let dt = delaunay(&seeds)?;
        let cells = voronoi_cells(&seeds, &dt);
        for (i, c) in cells.iter().enumerate() {
            seeds[i] = constrain(super::point::polygon_centroid(c), base[i], lattice.freedom[i]);
        }
    }
    let limit = std::f64::consts::FRAC_PI_2 - opts.angle_margin;
    let cos_limit = limit.cos();
    for _ in 0..=opts.repair_rounds {
        let dt = delaunay(&seeds)?;
        let mut bad = vec![false; seeds.len()];
        let mut any = false;
        for tri in &dt.triangles {
            let [p, q, r] = tri.map(|i| seeds[i]);
            let ok = [(p, q, r), (q, r, p), (r, p, q)].iter().all(|&(x, y, z)| {
                let (u, v) = (y - x, z - x);
                u.dot(v) > cos_limit * u.norm() * v.norm()
            });
            if !ok {
                any = true;
                for &i in tri {
                    bad[i] = true;
                }
            }
        }
        if !any {
            return Ok(Some(seeds));
        }
        for i in 0..seeds.len() {
            if bad[i] {
                seeds[i] = base[i] + (seeds[i] - base[i]) * 0.5;
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::point::triangle_angles;

    #[test]
    fn hexa_dual_invariants() {
        for n in [2, 3, 8, 13] {
            let pair = generate_hexa_dual(n).unwrap();
            let mesh = pair.primary();
            assert_eq!(mesh.num_cells(), hexa_cell_count(n));
            mesh.check_tiling(1.0, 1e-10).unwrap();
            for (e, edge) in mesh.edges().iter().enumerate() {
                if !edge.is_boundary() {
                    let p = pair.patch(e);
                    let lhs = p.dual_length * mesh.edge_length(e);
                    assert!((lhs - 2.0 * p.area).abs() <= 1e-12 * lhs, "edge {e}");
                }
            }
            assert_eq!(pair.triangles().len(), mesh.num_interior_vertices());
        }
    }

    #[test]
    fn hexa_interior_is_regular() {
        let pair = generate_hexa_dual(8).unwrap();
        let mesh = pair.primary();
        let mut hexagons = 0;
        for (k, c) in mesh.cells().iter().enumerate() {
            let s = pair.seeds()[k];
            if s.x > 0.25 && s.x < 0.75 && s.y > 0.25 && s.y < 0.75 {
                assert_eq!(c.len(), 6, "cell {k}");
                hexagons += 1;
                for &e in mesh.cell_edges(k) {
                    assert!((pair.omega(e) - 3f64.sqrt() / 2.0).abs() < 1e-12);
                }
            }
        }
        assert!(hexagons > 0);
        let s = pair.seeds();
        for tri in pair.triangles() {
            let [a, b, c] = tri.map(|i| s[i]);
            let interior = [a, b, c].iter().all(|p| p.x > 0.3 && p.x < 0.7 && p.y > 0.3 && p.y < 0.7);
            if interior {
                for t in triangle_angles(a, b, c) {
                    assert!((t - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn perturbed_vertex_rejected() {
        let pair = generate_hexa_dual(8).unwrap();
        let (mesh, seeds, tris) = pair.into_parts();
        let v = mesh.interior_vertices()[5];
        let mut verts = mesh.vertices().to_vec();
        verts[v].x += 1e-3;
        let moved = PolygonalMesh::new(verts, mesh.cells().to_vec()).unwrap();
        let err = build_dual_pairing(moved, seeds, tris).unwrap_err();
        assert!(matches!(err, MeshError::DualityViolation { .. }), "{err}");
    }

    #[test]
    fn voro_dual_is_acute_and_deterministic() {
        let a = generate_voro_dual(200, 5).unwrap();
        let b = generate_voro_dual(200, 5).unwrap();
        assert_eq!(a, b);
        let c = generate_voro_dual(200, 6).unwrap();
        assert_ne!(a.seeds(), c.seeds());
        a.primary().check_tiling(1.0, 1e-10).unwrap();
    }
}
