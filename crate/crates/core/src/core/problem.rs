use serde::Serialize;

use crate::error::{Error, Result};

/// Spatial domain. All geometries are represented on the radial half-line `[0, R]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Geometry {
    /// `(-R, R)` in one dimension, with even data stored on `[0, R]`.
    Interval { half_length: f64 },
    /// Ball of radius `R` in `R^N`, radial data.
    Ball { radius: f64 },
    /// `R^N` truncated at radius `R` with a zero Dirichlet condition there.
    WholeSpace { radius: f64 },
}

impl Geometry {
    pub fn radius(&self) -> f64 {
        match *self {
            Geometry::Interval { half_length } => half_length,
            Geometry::Ball { radius } | Geometry::WholeSpace { radius } => radius,
        }
    }

    pub fn code(&self) -> u8 {
        match self {
            Geometry::Interval { .. } => 0,
            Geometry::Ball { .. } => 1,
            Geometry::WholeSpace { .. } => 2,
        }
    }

    pub fn from_code(code: u8, radius: f64) -> Option<Self> {
        Some(match code {
            0 => Geometry::Interval { half_length: radius },
            1 => Geometry::Ball { radius },
            2 => Geometry::WholeSpace { radius },
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    DirichletZero,
    NeumannZero,
    /// Spatially constant solution; the Laplacian vanishes identically.
    Homogeneous,
}

impl Boundary {
    pub fn code(self) -> u8 {
        match self {
            Boundary::DirichletZero => 0,
            Boundary::NeumannZero => 1,
            Boundary::Homogeneous => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => Boundary::DirichletZero,
            1 => Boundary::NeumannZero,
            2 => Boundary::Homogeneous,
            _ => return None,
        })
    }
}

/// Closed-form initial data families, functions of the radius `r = |x|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialData {
    Constant {
        value: f64,
    },
    /// `A exp(-r^2 / (2 width^2))`.
    Gaussian {
        amplitude: f64,
        width: f64,
    },
    /// Aubin-Talenti bubble `U_lambda`; requires `N >= 3`.
    Bubble {
        lambda: f64,
    },
    /// Piecewise-linear table in `r`, held constant past the last entry.
    Table {
        radii: Vec<f64>,
        values: Vec<f64>,
    },
}

impl InitialData {
    pub fn eval(&self, r: f64, dim: usize, p: f64) -> f64 {
        match self {
            InitialData::Constant { value } => *value,
            InitialData::Gaussian { amplitude, width } => amplitude * (-r * r / (2.0 * width * width)).exp(),
            InitialData::Bubble { lambda } => {
                crate::special::BubbleSpec { dim, lambda: *lambda }.value_with_exponent(r, p)
            }
            InitialData::Table { radii, values } => {
                let i = radii.partition_point(|&x| x <= r);
                if i == 0 {
                    values[0]
                } else if i == radii.len() {
                    values[radii.len() - 1]
                } else {
                    let t = (r - radii[i - 1]) / (radii[i] - radii[i - 1]);
                    (1.0 - t) * values[i - 1] + t * values[i]
                }
            }
        }
    }

    /// True when the data is nonnegative everywhere.
    pub fn is_nonnegative(&self) -> bool {
        match self {
            InitialData::Constant { value } => *value >= 0.0,
            InitialData::Gaussian { amplitude, .. } => *amplitude >= 0.0,
            InitialData::Bubble { .. } => true,
            InitialData::Table { values, .. } => values.iter().all(|&v| v >= 0.0),
        }
    }
}

/// One instance of `u_t = Δu + |u|^{p-1}u` with its domain, boundary condition and data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemSpec {
    pub dim: usize,
    pub p: f64,
    pub geometry: Geometry,
    pub boundary: Boundary,
    pub initial: InitialData,
}

impl ProblemSpec {
    pub fn new(dim: usize, p: f64, geometry: Geometry, boundary: Boundary, initial: InitialData) -> Result<Self> {
        let spec = Self { dim, p, geometry, boundary, initial };
        spec.validate()?;
        Ok(spec)
    }

    pub fn radius(&self) -> f64 {
        self.geometry.radius()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Domain("dimension N must be at least 1".into()));
        }
        if !(self.p > 1.0) || !self.p.is_finite() {
            return Err(Error::Domain(format!("p must exceed 1 (got {})", self.p)));
        }
        let r = self.radius();
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("domain radius must be positive (got {r})")));
        }
        if matches!(self.geometry, Geometry::Interval { .. }) && self.dim != 1 {
            return Err(Error::Domain("interval geometry requires N = 1".into()));
        }
        if matches!(self.geometry, Geometry::WholeSpace { .. }) && self.boundary != Boundary::DirichletZero {
            return Err(Error::Domain("truncated whole-space geometry uses the zero Dirichlet condition".into()));
        }
        match &self.initial {
            InitialData::Constant { value } if !value.is_finite() => {
                return Err(Error::Domain("constant initial value must be finite".into()))
            }
            InitialData::Gaussian { amplitude, width } if !amplitude.is_finite() || !(*width > 0.0) => {
                return Err(Error::Domain("gaussian data needs finite amplitude and positive width".into()))
            }
            InitialData::Bubble { lambda } => {
                if self.dim < 3 {
                    return Err(Error::Domain("bubble data requires N >= 3".into()));
                }
                if !(*lambda > 0.0) {
                    return Err(Error::Domain("bubble scale must be positive".into()));
                }
            }
            InitialData::Table { radii, values } => {
                if radii.is_empty() || radii.len() != values.len() {
                    return Err(Error::Domain("table needs matching, nonempty radii and values".into()));
                }
                if radii.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Domain("table radii must be strictly increasing".into()));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Domain("table values must be finite".into()));
                }
            }
            _ => {}
        }
        if self.boundary == Boundary::Homogeneous && !matches!(self.initial, InitialData::Constant { .. }) {
            return Err(Error::Domain("homogeneous problems require constant initial data".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian() -> InitialData {
        InitialData::Gaussian { amplitude: 5.0, width: 1.0 }
    }

    #[test]
    fn accepts_reference_problem() {
        let spec =
            ProblemSpec::new(1, 3.0, Geometry::Interval { half_length: 4.0 }, Boundary::DirichletZero, gaussian());
        assert!(spec.is_ok());
    }

    #[test]
    fn rejects_invalid_problems() {
        let ball = Geometry::Ball { radius: 1.0 };
        let d = Boundary::DirichletZero;
        assert!(ProblemSpec::new(1, 1.0, ball, d, gaussian()).is_err());
        assert!(ProblemSpec::new(0, 3.0, ball, d, gaussian()).is_err());
        assert!(ProblemSpec::new(1, 3.0, Geometry::Ball { radius: 0.0 }, d, gaussian()).is_err());
        assert!(ProblemSpec::new(2, 3.0, Geometry::Interval { half_length: 1.0 }, d, gaussian()).is_err());
        assert!(ProblemSpec::new(1, 3.0, ball, Boundary::Homogeneous, gaussian()).is_err());
        assert!(ProblemSpec::new(2, 3.0, ball, d, InitialData::Bubble { lambda: 1.0 }).is_err());
        assert!(
            ProblemSpec::new(1, 3.0, Geometry::WholeSpace { radius: 5.0 }, Boundary::NeumannZero, gaussian()).is_err()
        );
    }

    #[test]
    fn table_interpolates_linearly() {
        let t = InitialData::Table { radii: vec![0.0, 1.0, 2.0], values: vec![1.0, 3.0, 0.0] };
        assert_eq!(t.eval(0.5, 1, 3.0), 2.0);
        assert_eq!(t.eval(1.5, 1, 3.0), 1.5);
        assert_eq!(t.eval(5.0, 1, 3.0), 0.0);
    }
}
