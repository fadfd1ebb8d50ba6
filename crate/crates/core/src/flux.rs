//! Exponential fitting along edges.
//!
//! On an edge `E = [x_i, x_j]` with constant diffusion `α_E` and velocity
//! `β_E`, the flux `J(u)·τ_E = (α∇u + βu)·τ_E` is rewritten as a weighted
//! difference of `e^{ψ_E} u` with the linear potential `ψ_E = α_E⁻¹ β_E·x`.
//! Taking the harmonic average of `κ_E = α_E e^{-ψ_E}` along the edge gives
//! the two-point flux
//!
//! ```text
//! κ̄_E δ_E(e^{ψ_E} u) = α_E 𝔹(α_E⁻¹β_E·(x_i − x_j)) u(x_j) − α_E 𝔹(α_E⁻¹β_E·(x_j − x_i)) u(x_i)
//! ```
//!
//! with the Bernoulli function `𝔹(z) = z / (e^z − 1)`.

use thiserror::Error;

use crate::mesh::Point2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FluxError {
    #[error("nonpositive edge diffusion {value} on edge ({xi:?}, {xj:?})")]
    NonpositiveDiffusion { value: f64, xi: Point2, xj: Point2 },
}

/// Below this magnitude the Bernoulli function uses its Taylor series.
pub const BERNOULLI_SERIES_THRESHOLD: f64 = 1e-4;
/// Above this argument `e^z` is avoided entirely.
pub const BERNOULLI_LARGE_ARGUMENT: f64 = 700.0;

/// Bernoulli function `𝔹(z) = z / (e^z − 1)`, `𝔹(0) = 1`.
///
/// Positive for all finite `z`. Uses the series `1 − z/2 + z²/12 − z⁴/720`
/// near zero and `z e^{−z} / (1 − e^{−z})` for large positive arguments, so
/// it neither loses precision nor overflows. Underflows to `0` beyond
/// `z ≈ 745`.
pub fn bernoulli(z: f64) -> f64 {
    if z.abs() < BERNOULLI_SERIES_THRESHOLD {
        let z2 = z * z;
        1.0 - 0.5 * z + z2 / 12.0 - z2 * z2 / 720.0
    } else if z > BERNOULLI_LARGE_ARGUMENT {
        let e = (-z).exp();
        z * e / (-(-z).exp_m1())
    } else {
        z / z.exp_m1()
    }
}

/// Which points the edge-constant coefficients are sampled at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeAveraging {
    /// `(c(x_i) + c(x_j)) / 2`
    #[default]
    Endpoints,
    /// `c((x_i + x_j) / 2)`
    Midpoint,
}

/// Edge geometry with constant coefficients. `τ_E = x_j − x_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeData {
    pub xi: Point2,
    pub xj: Point2,
    pub alpha: f64,
    pub beta: Point2,
}

impl EdgeData {
    pub fn new(xi: Point2, xj: Point2, alpha: f64, beta: Point2) -> Self {
        debug_assert!(alpha > 0.0);
        Self { xi, xj, alpha, beta }
    }

    pub fn tangent(&self) -> Point2 {
        self.xj - self.xi
    }

    pub fn length(&self) -> f64 {
        self.tangent().norm()
    }

    /// `α_E⁻¹ β_E · τ_E`, the potential drop from `x_i` to `x_j`.
    pub fn potential_drop(&self) -> f64 {
        self.beta.dot(self.tangent()) / self.alpha
    }
}

/// Affine potential `ψ(x) = g·x + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePotential {
    pub gradient: Point2,
    pub offset: f64,
}

impl EdgePotential {
    pub fn eval(&self, x: Point2) -> f64 {
        self.gradient.dot(x) + self.offset
    }

    pub fn shifted(self, c: f64) -> Self {
        Self { offset: self.offset + c, ..self }
    }
}

/// `ψ_E(x) = α_E⁻¹ β_E · x`, defined up to an additive constant.
pub fn edge_potential(e: &EdgeData) -> EdgePotential {
    EdgePotential { gradient: e.beta * (1.0 / e.alpha), offset: 0.0 }
}

/// Harmonic average of `κ_E = α_E e^{−ψ_E}` along the edge, with `ψ_E`
/// normalized to vanish at `x_i`: `κ̄_E = α_E 𝔹(α_E⁻¹β_E·τ_E)`.
pub fn harmonic_average(e: &EdgeData) -> f64 {
    e.alpha * bernoulli(e.potential_drop())
}

/// Harmonic average for an arbitrary gauge of the potential.
///
/// `κ̄ = α 𝔹(b) e^{−ψ(x_i)}`. Overflows for large `|ψ|`; meant for checking
/// gauge invariance rather than assembly.
pub fn harmonic_average_with(e: &EdgeData, psi: &EdgePotential) -> f64 {
    harmonic_average(e) * (-psi.eval(e.xi)).exp()
}

/// Two-point flux multipliers: `κ̄_E δ_E(e^{ψ_E}u) = c_ij u(x_j) − c_ji u(x_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCoefficients {
    /// Multiplies `u(x_j)`.
    pub c_ij: f64,
    /// Multiplies `u(x_i)`.
    pub c_ji: f64,
}

impl EdgeCoefficients {
    /// Evaluates the flux for endpoint values `u_i`, `u_j`.
    pub fn flux(&self, u_i: f64, u_j: f64) -> f64 {
        self.c_ij * u_j - self.c_ji * u_i
    }
}

pub fn edge_coefficients(e: &EdgeData) -> EdgeCoefficients {
    let b = e.potential_drop();
    EdgeCoefficients { c_ij: e.alpha * bernoulli(-b), c_ji: e.alpha * bernoulli(b) }
}

/// Coefficients computed literally from `κ̄_E` and `e^{ψ_E}` in the given gauge.
pub fn edge_coefficients_with(e: &EdgeData, psi: &EdgePotential) -> EdgeCoefficients {
    let kappa = harmonic_average_with(e, psi);
    EdgeCoefficients { c_ij: kappa * psi.eval(e.xj).exp(), c_ji: kappa * psi.eval(e.xi).exp() }
}

/// Freezes `α`, `β` to constants on the edge `[x_i, x_j]`.
pub fn edge_average_coefficients<A, B>(
    alpha: A,
    beta: B,
    xi: Point2,
    xj: Point2,
    rule: EdgeAveraging,
) -> Result<EdgeData, FluxError>
where
    A: Fn(Point2) -> f64,
    B: Fn(Point2) -> Point2,
{
    let (a, b) = match rule {
        EdgeAveraging::Endpoints => (0.5 * (alpha(xi) + alpha(xj)), (beta(xi) + beta(xj)) * 0.5),
        EdgeAveraging::Midpoint => {
            let m = xi.midpoint(xj);
            (alpha(m), beta(m))
        }
    };
    if !(a > 0.0) {
        return Err(FluxError::NonpositiveDiffusion { value: a, xi, xj });
    }
    Ok(EdgeData { xi, xj, alpha: a, beta: b })
}
