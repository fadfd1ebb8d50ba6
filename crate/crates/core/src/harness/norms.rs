//! Discrete norms, observed orders and the dual-patch flux error.

use nalgebra::DVector;

use crate::mesh::{DualMeshPair, MeshFile, Point2, PolygonalMesh};
use crate::schemes::SchemeKind;
use crate::vem::{fvm_flux, fvm_poisson_local, poisson_local, projected_gradient, LocalElement, StabChoice, VemError};

/// `max_i |v_i|`.
pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn local_values(cell: &[usize], v: &[f64]) -> DVector<f64> {
    DVector::from_iterator(cell.len(), cell.iter().map(|&i| v[i]))
}

/// `(Σ_K a_h^K(v, v))^{1/2}` over the full vertex vector.
pub fn a_norm(v: &[f64], mesh: &PolygonalMesh, stab: StabChoice) -> Result<f64, VemError> {
    let mut sum = 0.0;
    for k in 0..mesh.num_cells() {
        let a = poisson_local(&LocalElement::from_mesh(mesh, k)?, stab)?;
        let x = local_values(mesh.cell(k), v);
        sum += x.dot(&(&a * &x));
    }
    Ok(sum.max(0.0).sqrt())
}

/// A-norm in the stabilization-free finite-volume form.
pub fn fvm_a_norm(v: &[f64], pair: &DualMeshPair) -> Result<f64, VemError> {
    let mesh = pair.primary();
    let mut sum = 0.0;
    for k in 0..mesh.num_cells() {
        let a = fvm_poisson_local(pair, k)?;
        let x = local_values(mesh.cell(k), v);
        sum += x.dot(&(&a * &x));
    }
    Ok(sum.max(0.0).sqrt())
}

/// Each scheme measured in its own energy: M-EAVE in the finite-volume
/// form, EAVE with its stabilization, P1 schemes in the P1 stiffness
/// (on triangles the projection is exact and no stabilization enters).
pub fn scheme_a_norm(kind: SchemeKind, mesh: &MeshFile, v: &[f64]) -> Result<f64, VemError> {
    match (kind, mesh.dual()) {
        (SchemeKind::Meave, Some(pair)) => fvm_a_norm(v, pair),
        (SchemeKind::Eave(stab), _) => a_norm(v, mesh.mesh(), stab),
        _ => a_norm(v, mesh.mesh(), StabChoice::DofScalar),
    }
}

/// `log(e₁/e₂) / log(h₁/h₂)`.
pub fn observed_order(h1: f64, e1: f64, h2: f64, e2: f64) -> f64 {
    (e1 / e2).ln() / (h1 / h2).ln()
}

/// Edge-midpoint rule on the triangle `(a, b, c)`; exact for quadratics.
fn triangle_quadrature(a: Point2, b: Point2, c: Point2, f: &dyn Fn(Point2) -> f64) -> f64 {
    let area = 0.5 * (b - a).cross(c - a);
    area / 3.0 * (f(a.midpoint(b)) + f(b.midpoint(c)) + f(c.midpoint(a)))
}

/// `(Σ_E ‖∇u·n_{E*} − 𝒢_n(u_h)‖²_{L²(D_E)})^{1/2}` with `n_{E*} = τ_E/|E|`;
/// `D_E` is split into the triangles spanned by `E` and each adjacent seed.
pub fn flux_error(u_h: &[f64], pair: &DualMeshPair, grad: &dyn Fn(Point2) -> Point2) -> f64 {
    let mesh = pair.primary();
    let g = fvm_flux(u_h, pair);
    let mut sum = 0.0;
    for (id, e) in mesh.edges().iter().enumerate() {
        let (a, b) = (mesh.vertex(e.v[0]), mesh.vertex(e.v[1]));
        let n = (b - a) * (1.0 / mesh.edge_length(id));
        let gn = g[id];
        let sq = |p: Point2| {
            let d = grad(p).dot(n) - gn;
            d * d
        };
        for k in std::iter::once(e.left).chain(e.right) {
            let s = pair.seeds()[k];
            sum += triangle_quadrature(a, b, s, &sq).abs();
        }
    }
    sum.sqrt()
}

/// Broken `‖∇u − ∇Π∇u_h‖` over the cells, integrated on the signed fan
/// from each centroid (valid for non-convex cells as well).
pub fn projection_error(u_h: &[f64], mesh: &PolygonalMesh, grad: &dyn Fn(Point2) -> Point2) -> Result<f64, VemError> {
    let mut sum = 0.0;
    for k in 0..mesh.num_cells() {
        let el = LocalElement::from_mesh(mesh, k)?;
        let cell = mesh.cell(k);
        let vals: Vec<f64> = cell.iter().map(|&i| u_h[i]).collect();
        let gh = projected_gradient(&el, &vals);
        let c = mesh.cell_centroid(k);
        let sq = |p: Point2| (grad(p) - gh).norm_sq();
        let n = cell.len();
        for i in 0..n {
            sum += triangle_quadrature(c, mesh.vertex(cell[i]), mesh.vertex(cell[(i + 1) % n]), &sq);
        }
    }
    Ok(sum.max(0.0).sqrt())
}
