//! Model problems with closed-form solutions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::mesh::Point2;
use crate::schemes::ProblemSpec;

/// Boundary-layer solution of `−∇·(ε∇u + βu) = 0`, `β = (0, −1)`:
/// `u = x (1 − e^{(y−1)/ε}) / (1 − e^{−2/ε})`.
///
/// Both exponentials have nonpositive arguments, so nothing overflows and
/// the denominator tends to 1 as `ε → 0`.
pub fn exact_solution_ex1(epsilon: f64, p: Point2) -> f64 {
    p.x * layer_profile(epsilon, p.y)
}

fn layer_profile(epsilon: f64, y: f64) -> f64 {
    let arg = ((y - 1.0) / epsilon).min(0.0);
    (-arg.exp_m1()) / (-(-2.0 / epsilon).exp_m1())
}

/// `∇u` of [`exact_solution_ex1`].
pub fn exact_gradient_ex1(epsilon: f64, p: Point2) -> Point2 {
    let den = -(-2.0 / epsilon).exp_m1();
    let e = ((p.y - 1.0) / epsilon).min(0.0).exp();
    Point2::new((1.0 - e) / den, -p.x * e / (epsilon * den))
}

/// Problems the harness knows how to set up and measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Problem {
    /// Boundary layer at `y = 1`, driven by Dirichlet data only.
    #[default]
    BoundaryLayer,
    /// `−Δu = 2π² sin(πx) sin(πy)`, homogeneous data; `ε` is ignored.
    PoissonSine,
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::BoundaryLayer => "boundary-layer",
            Problem::PoissonSine => "poisson-sine",
        }
    }

    pub fn spec(&self, epsilon: f64) -> ProblemSpec {
        match *self {
            Problem::BoundaryLayer => ProblemSpec::constant(
                epsilon,
                Point2::new(0.0, -1.0),
                |_| 0.0,
                move |p| exact_solution_ex1(epsilon, p),
            ),
            Problem::PoissonSine => ProblemSpec::poisson(|p| 2.0 * PI * PI * sine(p), |_| 0.0),
        }
    }

    pub fn exact(&self, epsilon: f64) -> Arc<dyn Fn(Point2) -> f64 + Send + Sync> {
        match *self {
            Problem::BoundaryLayer => Arc::new(move |p| exact_solution_ex1(epsilon, p)),
            Problem::PoissonSine => Arc::new(sine),
        }
    }

    pub fn gradient(&self, epsilon: f64) -> Arc<dyn Fn(Point2) -> Point2 + Send + Sync> {
        match *self {
            Problem::BoundaryLayer => Arc::new(move |p| exact_gradient_ex1(epsilon, p)),
            Problem::PoissonSine => Arc::new(sine_gradient),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "boundary-layer" => Ok(Problem::BoundaryLayer),
            "poisson-sine" => Ok(Problem::PoissonSine),
            _ => Err(format!("unknown problem '{s}'")),
        }
    }
}

pub fn sine(p: Point2) -> f64 {
    (PI * p.x).sin() * (PI * p.y).sin()
}

pub fn sine_gradient(p: Point2) -> Point2 {
    Point2::new(PI * (PI * p.x).cos() * (PI * p.y).sin(), PI * (PI * p.x).sin() * (PI * p.y).cos())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_values() {
        for eps in [1e-2, 1e-6] {
            for t in [0.0, 0.3, 1.0] {
                assert_eq!(exact_solution_ex1(eps, Point2::new(t, 1.0)), 0.0);
                assert_eq!(exact_solution_ex1(eps, Point2::new(0.0, t)), 0.0);
            }
        }
        let v = exact_solution_ex1(1e-6, Point2::new(1.0, 0.0));
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_differences() {
        let eps = 0.05;
        let p = Point2::new(0.4, 0.93);
        let d = 1e-6;
        let g = exact_gradient_ex1(eps, p);
        let fx = (exact_solution_ex1(eps, Point2::new(p.x + d, p.y)) - exact_solution_ex1(eps, Point2::new(p.x - d, p.y))) / (2.0 * d);
        let fy = (exact_solution_ex1(eps, Point2::new(p.x, p.y + d)) - exact_solution_ex1(eps, Point2::new(p.x, p.y - d))) / (2.0 * d);
        assert!((g.x - fx).abs() < 1e-7 && (g.y - fy).abs() < 1e-5 * fy.abs());
    }

    #[test]
    fn residual_of_layer_vanishes() {
        // −ε u_yy + u_y = 0 away from x-dependence
        let eps = 0.1;
        let (y, d) = (0.8, 1e-4);
        let u = |y| layer_profile(eps, y);
        let uyy = (u(y + d) - 2.0 * u(y) + u(y - d)) / (d * d);
        let uy = (u(y + d) - u(y - d)) / (2.0 * d);
        assert!((-eps * uyy + uy).abs() < 1e-5);
    }
}
