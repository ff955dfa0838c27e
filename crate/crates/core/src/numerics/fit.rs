/// Ordinary least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Pearson correlation of the samples; 1 for an exact line with positive slope.
    pub correlation: f64,
    pub points: usize,
}

impl LinearFit {
    /// Abscissa where the fitted line crosses zero.
    pub fn zero_crossing(&self) -> f64 {
        -self.intercept / self.slope
    }
}

/// Fits a line through `(x, y)`; `None` with fewer than two points or constant `x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let correlation = if syy == 0.0 { 1.0 } else { sxy / (sxx * syy).sqrt() };
    Some(LinearFit { slope, intercept: my - slope * mx, correlation, points: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-15);
        assert!((fit.zero_crossing() - 4.0).abs() < 1e-14);
        assert!((fit.correlation + 1.0).abs() < 1e-15);
    }
}
