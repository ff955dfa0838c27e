use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Exponents attached to a dimension `N` and nonlinearity `p`.
///
/// Thresholds that do not exist in low dimension are stored as `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedExponents {
    pub dim: usize,
    pub p: f64,
    /// `1/(p-1)`, the ODE blow-up rate.
    pub beta: f64,
    /// Scale-invariant Lebesgue exponent `N(p-1)/2`; may be below 1.
    pub q_star: f64,
    #[serde(serialize_with = "finite_or_inf")]
    pub p_sobolev: f64,
    #[serde(serialize_with = "finite_or_inf")]
    pub p_jl: f64,
    #[serde(serialize_with = "finite_or_inf")]
    pub p_lepin: f64,
    /// `beta^beta`, the positive constant self-similar profile.
    pub kappa: f64,
}

fn finite_or_inf<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

pub fn derive_exponents(dim: usize, p: f64) -> Result<DerivedExponents> {
    if dim == 0 {
        return Err(Error::Domain("dimension N must be at least 1".into()));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("p must exceed 1 (got {p})")));
    }
    let n = dim as f64;
    let beta = 1.0 / (p - 1.0);
    let p_sobolev = if dim >= 3 { (n + 2.0) / (n - 2.0) } else { f64::INFINITY };
    let (p_jl, p_lepin) = if dim > 10 {
        (1.0 + 4.0 * (n - 4.0 + 2.0 * (n - 1.0).sqrt()) / ((n - 2.0) * (n - 10.0)), 1.0 + 6.0 / (n - 10.0))
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(DerivedExponents { dim, p, beta, q_star: n * (p - 1.0) / 2.0, p_sobolev, p_jl, p_lepin, kappa: beta.powf(beta) })
}
