//! Small numerical building blocks shared by the solver modules.

mod fit;
mod interp;
mod ode;
mod quad;

pub use fit::{linear_fit, LinearFit};
pub use interp::{Extension, Sampler};
pub use ode::{Dopri5, OdeEvent, OdeOptions, OdeTrajectory};
pub use quad::{gauss_legendre, integrate_cells, sphere_area};

/// `|u|^{p-1} u`, using integer powers when `p` is integral.
#[inline]
pub fn signed_pow(u: f64, p: f64) -> f64 {
    if p == p.trunc() && p.abs() < 64.0 {
        let k = p as i32;
        if k % 2 == 1 {
            u.powi(k)
        } else {
            u.abs().powi(k - 1) * u
        }
    } else {
        u.abs().powf(p - 1.0) * u
    }
}

/// `|u|^q`, using integer powers when `q` is integral.
#[inline]
pub fn abs_pow(u: f64, q: f64) -> f64 {
    if q == 1.0 {
        u.abs()
    } else if q == q.trunc() && q.abs() < 64.0 {
        u.abs().powi(q as i32)
    } else {
        u.abs().powf(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_pow_matches_powf() {
        for &p in &[2.0, 3.0, 7.0, 2.5, 5.0 / 3.0] {
            for &u in &[-2.3f64, -0.4, 0.0, 0.7, 3.1] {
                let expect = u.abs().powf(p - 1.0) * u;
                assert!((signed_pow(u, p) - expect).abs() <= 1e-12 * expect.abs().max(1.0));
            }
        }
    }
}
