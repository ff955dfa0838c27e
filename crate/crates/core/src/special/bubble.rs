//! The Aubin-Talenti bubble `U(x) = c(N) (1 + |x|²)^{-(N-2)/2}`, a positive solution of
//! `ΔU + U^{p_S} = 0` in `R^N`, and its rescalings `U_λ(x) = λ^{-2/(p_S-1)} U(x/λ)`.

use serde::Serialize;
use statrs::function::beta::beta;

use crate::core::Grid;
use crate::error::{Error, Result};
use crate::numerics::{integrate_cells, signed_pow, sphere_area};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BubbleSpec {
    pub dim: usize,
    pub lambda: f64,
}

impl BubbleSpec {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if dim < 3 {
            return Err(Error::Domain(format!("the bubble needs N >= 3 (got {dim})")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("bubble scale must be positive (got {lambda})")));
        }
        Ok(Self { dim, lambda })
    }

    /// `c(N) = (N(N-2))^{(N-2)/4}`.
    pub fn normalization(&self) -> f64 {
        let n = self.dim as f64;
        (n * (n - 2.0)).powf((n - 2.0) / 4.0)
    }

    /// The Sobolev exponent `(N+2)/(N-2)`.
    pub fn exponent(&self) -> f64 {
        let n = self.dim as f64;
        (n + 2.0) / (n - 2.0)
    }

    /// Critical Lebesgue exponent `2N/(N-2)`.
    pub fn q_star(&self) -> f64 {
        let n = self.dim as f64;
        2.0 * n / (n - 2.0)
    }

    /// `∫ U_λ^{q*} dx = c(N)^{q*} ω_{N-1} B(N/2, N/2) / 2`, the same for every `λ`.
    pub fn critical_norm_closed_form(&self) -> f64 {
        let h = self.dim as f64 / 2.0;
        self.normalization().powf(self.q_star()) * sphere_area(self.dim) * beta(h, h) / 2.0
    }

    pub fn value(&self, r: f64) -> f64 {
        self.value_with_exponent(r, self.exponent())
    }

    /// `λ^{-2/(p-1)} U(r/λ)` for an arbitrary amplitude exponent `p`.
    pub fn value_with_exponent(&self, r: f64, p: f64) -> f64 {
        let n = self.dim as f64;
        let y = r / self.lambda;
        self.lambda.powf(-2.0 / (p - 1.0)) * self.normalization() * (1.0 + y * y).powf(-(n - 2.0) / 2.0)
    }
}

pub fn bubble_value(spec: &BubbleSpec, x: f64) -> f64 {
    spec.value(x.abs())
}

/// `max |ΔU_λ + U_λ^{p_S}|` over the grid nodes, excluding the two outermost.
///
/// The Laplacian is evaluated with fourth-order central differences on the closed-form values
/// (ghost values at `r < 0` come from evenness), so the residual measures how well `U_λ` solves
/// the equation rather than the truncation error of the solver's second-order stencil.
pub fn bubble_residual(spec: &BubbleSpec, grid: &Grid) -> Result<f64> {
    if !grid.is_symmetric() {
        return Err(Error::Domain("bubble residual needs a radial grid".into()));
    }
    let h = grid.h;
    let n = grid.len();
    if n < 5 {
        return Err(Error::Domain("bubble residual needs at least 5 nodes".into()));
    }
    let u = |i: isize| spec.value((i as f64 * h).abs());
    let p = spec.exponent();
    let dim = spec.dim as f64;
    let mut worst: f64 = 0.0;
    for i in 0..(n as isize - 2) {
        let (um2, um1, u0, up1, up2) = (u(i - 2), u(i - 1), u(i), u(i + 1), u(i + 2));
        let second = (-up2 + 16.0 * up1 - 30.0 * u0 + 16.0 * um1 - um2) / (12.0 * h * h);
        let lap = if i == 0 {
            dim * second
        } else {
            let first = (-up2 + 8.0 * up1 - 8.0 * um1 + um2) / (12.0 * h);
            second + (dim - 1.0) * first / (i as f64 * h)
        };
        worst = worst.max((lap + signed_pow(u0, p)).abs());
    }
    Ok(worst)
}

/// Radial quadrature of the bubble's critical integral: composite Gauss-Legendre on
/// `|y| <= cutoff` (in units of `λ`) plus the analytic tail beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BubbleQuadrature {
    pub cutoff: f64,
    pub cell: f64,
}

impl Default for BubbleQuadrature {
    fn default() -> Self {
        Self { cutoff: 40.0, cell: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BubbleNorm {
    /// `∫_{R^N} |U_λ|^{q*} dx`.
    pub integral: f64,
    /// Contribution of `|x| > cutoff λ`, included in `integral`.
    pub tail: f64,
    pub q_star: f64,
}

/// `∫_{R^N} y^{N-1} (1+y²)^{-N} dy` over `y > r` via the binomial series in `1/y²` (`r > 1`).
fn tail_integral(dim: usize, r: f64) -> f64 {
    let n = dim as f64;
    let mut total = 0.0;
    let mut binom = 1.0;
    for k in 0..200 {
        let kf = k as f64;
        let term = binom * r.powf(-n - 2.0 * kf) / (n + 2.0 * kf);
        total += term;
        if term.abs() < 1e-18 * total.abs() {
            break;
        }
        binom *= -(n + kf) / (kf + 1.0);
    }
    total
}

pub fn bubble_critical_norm(spec: &BubbleSpec, quad: &BubbleQuadrature) -> Result<BubbleNorm> {
    if quad.cutoff <= 1.0 || quad.cell <= 0.0 {
        return Err(Error::Config("bubble quadrature needs cutoff > 1 and cell > 0".into()));
    }
    let q = spec.q_star();
    let dim = spec.dim;
    let lambda = spec.lambda;
    let omega = sphere_area(dim);
    let core = integrate_cells(0.0, quad.cutoff * lambda, 0.0, quad.cell * lambda, |x| {
        spec.value(x).powf(q) * x.powi(dim as i32 - 1)
    });
    let tail = spec.normalization().powf(q) * tail_integral(dim, quad.cutoff);
    Ok(BubbleNorm { integral: omega * (core + tail), tail: omega * tail, q_star: q })
}
