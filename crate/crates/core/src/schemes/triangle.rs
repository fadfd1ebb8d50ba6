//! Linear finite elements on triangles: plain Galerkin, SUPG and EAFE.

use super::edge_averaged::{add_pair, pair_coefficients};
use super::{apply_dirichlet, check_finite, rhs_fh, AssembledOperator, LinearSystem, ProblemSpec, SchemeError};
use crate::linalg::TripletBuilder;
use crate::mesh::{cot_at, Point2, PolygonalMesh};

struct P1Triangle {
    v: [usize; 3],
    p: [Point2; 3],
    area: f64,
    /// Gradients of the barycentric coordinates.
    grad: [Point2; 3],
    centroid: Point2,
}

fn p1_triangle(mesh: &PolygonalMesh, k: usize, scheme: &'static str) -> Result<P1Triangle, SchemeError> {
    let cell = mesh.cell(k);
    if cell.len() != 3 {
        return Err(SchemeError::NotTriangular { scheme, cell: k, count: cell.len() });
    }
    let v = [cell[0], cell[1], cell[2]];
    let p = v.map(|i| mesh.vertex(i));
    let area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]);
    let grad = [0, 1, 2].map(|i| {
        let (a, b) = (p[(i + 1) % 3], p[(i + 2) % 3]);
        Point2::new(a.y - b.y, b.x - a.x) * (1.0 / (2.0 * area))
    });
    let centroid = Point2::new((p[0].x + p[1].x + p[2].x) / 3.0, (p[0].y + p[1].y + p[2].y) / 3.0);
    Ok(P1Triangle { v, p, area, grad, centroid })
}

/// SUPG parameter `s = 0.25 h²/(ε P_e) (1 − 1/P_e)`, `P_e = β_T h/(2ε)`,
/// clamped to zero for `P_e ≤ 1`.
pub fn supg_parameter(beta_t: f64, h_t: f64, epsilon: f64) -> f64 {
    let pe = beta_t * h_t / (2.0 * epsilon);
    if pe <= 1.0 {
        return 0.0;
    }
    (0.25 * h_t * h_t / (epsilon * pe) * (1.0 - 1.0 / pe)).max(0.0)
}

fn galerkin(mesh: &PolygonalMesh, spec: &ProblemSpec, streamline: bool) -> Result<AssembledOperator, SchemeError> {
    let scheme = if streamline { "supg" } else { "fe" };
    let nv = mesh.num_vertices();
    let mut tb = TripletBuilder::with_capacity(nv, nv, 9 * mesh.num_cells());
    let mut load = rhs_fh(mesh, &*spec.f);
    for k in 0..mesh.num_cells() {
        let t = p1_triangle(mesh, k, scheme)?;
        let alpha = spec.alpha_at(t.centroid);
        let beta = spec.beta_at(t.centroid);
        let s = if streamline {
            let beta_t = t.p.iter().chain(std::iter::once(&t.centroid)).map(|&x| spec.beta_at(x).norm()).fold(0.0, f64::max);
            supg_parameter(beta_t, t.area.sqrt(), alpha)
        } else {
            0.0
        };
        for i in 0..3 {
            let bgi = beta.dot(t.grad[i]);
            for j in 0..3 {
                let mut a = alpha * t.area * t.grad[j].dot(t.grad[i]) + t.area / 3.0 * bgi;
                if s > 0.0 {
                    a += s * t.area * beta.dot(t.grad[j]) * bgi;
                }
                tb.push(t.v[i], t.v[j], a);
            }
            if s > 0.0 {
                // streamline direction of the transport operator is −β
                load[t.v[i]] -= s * spec.f_at(t.centroid) * t.area * bgi;
            }
        }
    }
    let matrix = tb.build();
    check_finite(&matrix)?;
    Ok(AssembledOperator { matrix, load })
}

/// Galerkin P1 with coefficients frozen at the element centroid.
pub fn assemble_fe(mesh: &PolygonalMesh, spec: &ProblemSpec) -> Result<LinearSystem, SchemeError> {
    Ok(apply_dirichlet(galerkin(mesh, spec, false)?, mesh, &*spec.g))
}

/// P1 with streamline-upwind Petrov–Galerkin stabilization.
pub fn assemble_supg(mesh: &PolygonalMesh, spec: &ProblemSpec) -> Result<LinearSystem, SchemeError> {
    Ok(apply_dirichlet(galerkin(mesh, spec, true)?, mesh, &*spec.g))
}

/// Edge-averaged finite elements with weights `½ cot θ_E^T`.
pub fn assemble_eafe(mesh: &PolygonalMesh, spec: &ProblemSpec) -> Result<LinearSystem, SchemeError> {
    let nv = mesh.num_vertices();
    let mut tb = TripletBuilder::with_capacity(nv, nv, 12 * mesh.num_cells());
    for k in 0..mesh.num_cells() {
        let t = p1_triangle(mesh, k, "eafe")?;
        for l in 0..3 {
            let (i, j, o) = (l, (l + 1) % 3, (l + 2) % 3);
            let w = 0.5 * cot_at(t.p[o], t.p[i], t.p[j]);
            let (a, b) = (t.v[i].min(t.v[j]), t.v[i].max(t.v[j]));
            let c = pair_coefficients(spec, mesh.vertex(a), mesh.vertex(b))?;
            add_pair(&mut tb, a, b, w, &c);
        }
    }
    let matrix = tb.build();
    check_finite(&matrix)?;
    let op = AssembledOperator { matrix, load: rhs_fh(mesh, &*spec.f) };
    Ok(apply_dirichlet(op, mesh, &*spec.g))
}
