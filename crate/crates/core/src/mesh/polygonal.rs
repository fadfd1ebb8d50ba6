use std::collections::HashMap;

use super::point::{diameter, polygon_centroid, signed_area, Point2};
use super::MeshError;

/// A mesh edge. `v[1] − v[0]` is the global tangent `τ_E`.
///
/// `left` is the cell that traverses the edge from `v[0]` to `v[1]` in its
/// counterclockwise vertex cycle; `right` is the neighbour on the other side
/// or `None` on the boundary. Interior edges satisfy `v[0] < v[1]`; boundary
/// edges follow their single cell's orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub v: [usize; 2],
    pub left: usize,
    pub right: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

/// Polygonal mesh with counterclockwise cells and a global edge table.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalMesh {
    vertices: Vec<Point2>,
    cells: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    /// `cell_edges[k][l]` is the edge between local vertices `l` and `l + 1`.
    cell_edges: Vec<Vec<usize>>,
    boundary: Vec<bool>,
    h: f64,
}

impl PolygonalMesh {
    /// Builds the edge table and validates orientation and conformity.
    pub fn new(vertices: Vec<Point2>, cells: Vec<Vec<usize>>) -> Result<Self, MeshError> {
        if let Some(v) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(MeshError::NonFiniteVertex { vertex: v });
        }
        let nv = vertices.len();
        let mut h: f64 = 0.0;
        for (k, cell) in cells.iter().enumerate() {
            if cell.len() < 3 {
                return Err(MeshError::TooFewVertices { cell: k, count: cell.len() });
            }
            if let Some(&v) = cell.iter().find(|&&v| v >= nv) {
                return Err(MeshError::VertexOutOfRange { cell: k, vertex: v });
            }
            let mut sorted = cell.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(MeshError::RepeatedVertex { cell: k });
            }
            let pts: Vec<Point2> = cell.iter().map(|&v| vertices[v]).collect();
            let area = signed_area(&pts);
            if !(area > 0.0) {
                return Err(MeshError::NonCcwCell { cell: k, signed_area: area });
            }
            h = h.max(diameter(&pts));
        }

        // directed half-edge (a, b) -> owning cell
        let mut half: HashMap<(usize, usize), usize> = HashMap::with_capacity(cells.iter().map(Vec::len).sum());
        for (k, cell) in cells.iter().enumerate() {
            for l in 0..cell.len() {
                let (a, b) = (cell[l], cell[(l + 1) % cell.len()]);
                if half.insert((a, b), k).is_some() {
                    return Err(MeshError::NonManifoldEdge { a, b });
                }
            }
        }

        let mut edges = Vec::new();
        let mut edge_id: HashMap<(usize, usize), usize> = HashMap::with_capacity(half.len());
        let mut cell_edges = Vec::with_capacity(cells.len());
        for (k, cell) in cells.iter().enumerate() {
            let mut local = Vec::with_capacity(cell.len());
            for l in 0..cell.len() {
                let (a, b) = (cell[l], cell[(l + 1) % cell.len()]);
                let key = (a.min(b), a.max(b));
                let id = match edge_id.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = edges.len();
                        let edge = match half.get(&(b, a)) {
                            Some(&other) => {
                                let (left, right) = if a < b { (k, other) } else { (other, k) };
                                Edge { v: [key.0, key.1], left, right: Some(right) }
                            }
                            None => Edge { v: [a, b], left: k, right: None },
                        };
                        edges.push(edge);
                        edge_id.insert(key, id);
                        id
                    }
                };
                local.push(id);
            }
            cell_edges.push(local);
        }

        let mut boundary = vec![false; nv];
        for e in edges.iter().filter(|e| e.is_boundary()) {
            boundary[e.v[0]] = true;
            boundary[e.v[1]] = true;
        }
        Ok(Self { vertices, cells, edges, cell_edges, boundary, h })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Point2 {
        self.vertices[i]
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell(&self, k: usize) -> &[usize] {
        &self.cells[k]
    }

    pub fn cell_points(&self, k: usize) -> Vec<Point2> {
        self.cells[k].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn cell_edges(&self, k: usize) -> &[usize] {
        &self.cell_edges[k]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn is_boundary_vertex(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_interior_vertices(&self) -> usize {
        self.boundary.iter().filter(|b| !**b).count()
    }

    /// Maximum cell diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn cell_area(&self, k: usize) -> f64 {
        signed_area(&self.cell_points(k))
    }

    pub fn cell_centroid(&self, k: usize) -> Point2 {
        polygon_centroid(&self.cell_points(k))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_cells()).map(|k| self.cell_area(k)).sum()
    }

    pub fn edge_tangent(&self, e: usize) -> Point2 {
        let [a, b] = self.edges[e].v;
        self.vertices[b] - self.vertices[a]
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        self.edge_tangent(e).norm()
    }

    pub fn is_triangular(&self) -> bool {
        self.cells.iter().all(|c| c.len() == 3)
    }

    /// Checks `Σ|K| = area` within `tol`.
    pub fn check_tiling(&self, area: f64, tol: f64) -> Result<(), MeshError> {
        let total = self.total_area();
        if (total - area).abs() > tol {
            return Err(MeshError::TilingMismatch { total, expected: area });
        }
        Ok(())
    }

    /// Interior vertices in ascending order.
    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.num_vertices()).filter(|&i| !self.boundary[i]).collect()
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate<F: Fn(Point2) -> f64>(&self, f: F) -> Vec<f64> {
        self.vertices.iter().map(|&p| f(p)).collect()
    }
}
