/// How a sampled field continues beyond its nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// Radial or even field on `[0, end]`: `f(-x) = f(x)`, zero for `|x| > end`.
    Even,
    /// Field on `[start, end]`, zero outside.
    Zero,
}

/// Local cubic (four-point Lagrange) interpolation on a uniform grid.
///
/// Reproduces cubic polynomials exactly away from the extension boundary.
#[derive(Debug, Clone, Copy)]
pub struct Sampler<'a> {
    start: f64,
    h: f64,
    values: &'a [f64],
    ext: Extension,
}

impl<'a> Sampler<'a> {
    pub fn new(start: f64, h: f64, values: &'a [f64], ext: Extension) -> Self {
        debug_assert!(values.len() >= 2);
        Self { start, h, values, ext }
    }

    pub fn end(&self) -> f64 {
        self.start + self.h * (self.values.len() - 1) as f64
    }

    #[inline]
    fn node(&self, j: isize) -> f64 {
        match self.ext {
            Extension::Even => self.values[j.unsigned_abs()],
            Extension::Zero => self.values[j as usize],
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = match self.ext {
            Extension::Even => x.abs(),
            Extension::Zero => x,
        };
        let n = self.values.len();
        let slack = 1e-12 * self.h;
        if x < self.start - slack || x > self.end() + slack {
            return 0.0;
        }
        let xi = ((x - self.start) / self.h).clamp(0.0, (n - 1) as f64);
        let cell = (xi.floor() as isize).min(n as isize - 2);
        if n < 4 {
            let t = xi - cell as f64;
            return (1.0 - t) * self.node(cell) + t * self.node(cell + 1);
        }
        let lowest = match self.ext {
            Extension::Even => -1,
            Extension::Zero => 0,
        };
        let j0 = (cell - 1).clamp(lowest, n as isize - 4);
        let t = xi - j0 as f64;
        let (t1, t2, t3) = (t - 1.0, t - 2.0, t - 3.0);
        let l0 = -t1 * t2 * t3 / 6.0;
        let l1 = t * t2 * t3 / 2.0;
        let l2 = -t * t1 * t3 / 2.0;
        let l3 = t * t1 * t2 / 6.0;
        l0 * self.node(j0) + l1 * self.node(j0 + 1) + l2 * self.node(j0 + 2) + l3 * self.node(j0 + 3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_on_zero_extension() {
        let h = 0.25;
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x - 0.1 * x * x * x;
        let values: Vec<f64> = (0..17).map(|i| f(-2.0 + h * i as f64)).collect();
        let s = Sampler::new(-2.0, h, &values, Extension::Zero);
        for k in 0..=160 {
            let x = -2.0 + 4.0 * k as f64 / 160.0;
            assert!((s.eval(x) - f(x)).abs() < 1e-12, "x = {x}");
        }
        assert_eq!(s.eval(2.5), 0.0);
        assert_eq!(s.eval(-2.1), 0.0);
    }

    #[test]
    fn even_extension_mirrors() {
        let h = 0.1;
        let values: Vec<f64> = (0..11).map(|i| (h * i as f64).powi(2)).collect();
        let s = Sampler::new(0.0, h, &values, Extension::Even);
        for &x in &[0.0, 0.05, 0.33, 0.71, 0.99] {
            assert!((s.eval(x) - x * x).abs() < 1e-13);
            assert!((s.eval(-x) - x * x).abs() < 1e-13);
        }
        assert_eq!(s.eval(1.2), 0.0);
    }
}
