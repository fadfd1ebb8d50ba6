//! Lowest-order nodal virtual elements: the elliptic projection Π∇, the
//! stabilizations and the local Poisson forms.

mod fvm;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::mesh::{diameter, polygon_centroid, signed_area, Point2, PolygonalMesh};

pub use fvm::{fvm_flux, fvm_poisson_local};

/// Cells smaller than this are rejected.
pub const MIN_CELL_AREA: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VemError {
    #[error("cell {cell} is degenerate (area {area:e})")]
    DegeneratePolygon { cell: usize, area: f64 },
    #[error("edge {edge} has no dual edge")]
    MissingPairing { edge: usize },
    #[error("the finite-volume form has no stabilization to choose")]
    NoStabilization,
}

/// Dense local matrix indexed by the vertex DoFs of one cell.
pub type LocalMatrix = DMatrix<f64>;

/// Geometry of one polygon in counterclockwise order.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalElement {
    pub cell: usize,
    pub vertices: Vec<Point2>,
    /// `τ_j = x_{j+1} − x_j`.
    pub tangents: Vec<Point2>,
    pub area: f64,
    pub centroid: Point2,
    pub diameter: f64,
}

impl LocalElement {
    pub fn new(cell: usize, vertices: Vec<Point2>) -> Result<Self, VemError> {
        let area = signed_area(&vertices);
        if !(area >= MIN_CELL_AREA) || vertices.len() < 3 {
            return Err(VemError::DegeneratePolygon { cell, area });
        }
        let n = vertices.len();
        let tangents = (0..n).map(|j| vertices[(j + 1) % n] - vertices[j]).collect();
        let centroid = polygon_centroid(&vertices);
        let diameter = diameter(&vertices);
        Ok(Self { cell, vertices, tangents, area, centroid, diameter })
    }

    pub fn from_mesh(mesh: &PolygonalMesh, k: usize) -> Result<Self, VemError> {
        Self::new(k, mesh.cell_points(k))
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// `N × 3` values of the scaled monomials `{1, (x−x_c)/h, (y−y_c)/h}` at the vertices.
    pub fn monomial_dofs(&self) -> DMatrix<f64> {
        let h = self.diameter;
        DMatrix::from_fn(self.num_vertices(), 3, |i, a| match a {
            0 => 1.0,
            1 => (self.vertices[i].x - self.centroid.x) / h,
            _ => (self.vertices[i].y - self.centroid.y) / h,
        })
    }

    /// `3 × N` right-hand side of the projection: the vertex mean for the
    /// constant, and `∫_∂K φ_i ∇m_α·n` (trapezoid rule, exact) otherwise.
    fn projection_rhs(&self) -> DMatrix<f64> {
        let n = self.num_vertices();
        let h = self.diameter;
        DMatrix::from_fn(3, n, |a, i| {
            let next = self.vertices[(i + 1) % n];
            let prev = self.vertices[(i + n - 1) % n];
            match a {
                0 => 1.0 / n as f64,
                1 => (next.y - prev.y) / (2.0 * h),
                _ => -(next.x - prev.x) / (2.0 * h),
            }
        })
    }
}

/// Π∇ in the scaled monomial basis: a `3 × N` matrix mapping vertex values
/// to the coefficients of the projected linear polynomial.
pub fn pi_nabla(k: &LocalElement) -> LocalMatrix {
    let b = k.projection_rhs();
    let g = &b * k.monomial_dofs();
    let g_inv = g.try_inverse().expect("projection matrix of a non-degenerate polygon is invertible");
    g_inv * b
}

/// Π∇ expressed back in vertex values (`N × N`).
pub fn pi_nabla_dofs(k: &LocalElement) -> LocalMatrix {
    k.monomial_dofs() * pi_nabla(k)
}

/// Gradient of `Π∇v` for the DoF vector `v` (in unscaled coordinates).
pub fn projected_gradient(k: &LocalElement, v: &[f64]) -> Point2 {
    let c = pi_nabla(k) * nalgebra::DVector::from_column_slice(v);
    Point2::new(c[1] / k.diameter, c[2] / k.diameter)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StabChoice {
    /// Sum of products of vertex values.
    #[default]
    DofScalar,
    /// Sum of products of edge differences.
    EdgeDiff,
    /// No stabilization (finite-volume form).
    None,
}

impl fmt::Display for StabChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StabChoice::DofScalar => "sv",
            StabChoice::EdgeDiff => "se",
            StabChoice::None => "none",
        })
    }
}

impl FromStr for StabChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sv" | "dof" | "dofscalar" => Ok(StabChoice::DofScalar),
            "se" | "edge" | "edgediff" => Ok(StabChoice::EdgeDiff),
            "none" => Ok(StabChoice::None),
            _ => Err(format!("unknown stabilization '{s}' (expected sv or se)")),
        }
    }
}

/// `S^K(φ_i − Π∇φ_i, φ_j − Π∇φ_j)`.
pub fn stab_matrix(k: &LocalElement, choice: StabChoice) -> LocalMatrix {
    let n = k.num_vertices();
    let r = DMatrix::identity(n, n) - pi_nabla_dofs(k);
    match choice {
        StabChoice::DofScalar => r.transpose() * &r,
        StabChoice::EdgeDiff => {
            let de = DMatrix::from_fn(n, n, |e, i| {
                if i == (e + 1) % n {
                    1.0
                } else if i == e {
                    -1.0
                } else {
                    0.0
                }
            });
            let dr = de * r;
            dr.transpose() * dr
        }
        StabChoice::None => DMatrix::zeros(n, n),
    }
}

/// Consistency part `∫_K ∇Π∇φ_j · ∇Π∇φ_i`.
pub fn consistency_matrix(k: &LocalElement) -> LocalMatrix {
    let p = pi_nabla(k);
    let scale = k.area / (k.diameter * k.diameter);
    let grad = p.rows(1, 2);
    grad.transpose() * grad * scale
}

/// Local stabilized Poisson matrix `a_h^K`.
pub fn poisson_local(k: &LocalElement, choice: StabChoice) -> Result<LocalMatrix, VemError> {
    if choice == StabChoice::None {
        return Err(VemError::NoStabilization);
    }
    Ok(consistency_matrix(k) + stab_matrix(k, choice))
}
