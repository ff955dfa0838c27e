use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::linear_fit;

/// Which tail of a sup-norm series feeds the blow-up time fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitWindow {
    /// Use the trailing entries whose sup-norm is at least this fraction of the last one.
    pub sup_fraction: f64,
    /// Entries with sup-norm at or below this value are ignored.
    pub fit_threshold: f64,
    pub min_points: usize,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self { sup_fraction: 0.25, fit_threshold: 0.0, min_points: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupFit {
    pub t_hat: f64,
    /// Slope of `‖u‖_∞^{-1/β}` against `t`; negative for blow-up.
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
    pub t_first: f64,
    pub t_last: f64,
}

/// Extrapolates the blow-up time from `(t, ‖u(t)‖_∞)` pairs.
///
/// Under the ODE rate `‖u‖_∞ ~ C (T-t)^{-β}` the quantity `‖u‖_∞^{-1/β}` is linear in `t` and
/// vanishes at `T`; a least-squares line through the trailing window is extrapolated to zero.
pub fn estimate_blowup_time(series: &[(f64, f64)], beta: f64, window: FitWindow) -> Result<BlowupFit> {
    let usable: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(t, s)| t.is_finite() && s.is_finite() && s > window.fit_threshold && s > 0.0)
        .collect();
    let min_points = window.min_points.max(5);
    if usable.len() < min_points {
        return Err(Error::Estimation(format!(
            "need at least {min_points} usable sup-norm entries, got {}",
            usable.len()
        )));
    }
    let last = usable[usable.len() - 1].1;
    let in_window = usable.iter().rev().take_while(|&&(_, s)| s >= window.sup_fraction * last).count();
    let take = in_window.max(min_points);
    let tail = &usable[usable.len() - take..];
    let ts: Vec<f64> = tail.iter().map(|&(t, _)| t).collect();
    let ys: Vec<f64> = tail.iter().map(|&(_, s)| s.powf(-1.0 / beta)).collect();
    let fit = linear_fit(&ts, &ys).ok_or_else(|| Error::Estimation("degenerate time samples".into()))?;
    if !(fit.slope < 0.0) {
        return Err(Error::Estimation(format!(
            "sup-norm is not growing at the ODE rate (fitted slope {:e} is nonnegative)",
            fit.slope
        )));
    }
    Ok(BlowupFit {
        t_hat: fit.zero_crossing(),
        slope: fit.slope,
        intercept: fit.intercept,
        points: take,
        t_first: ts[0],
        t_last: ts[ts.len() - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let beta: f64 = 0.5;
        let kappa = beta.powf(beta);
        let series: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let t = 1.0 - 0.5f64.powf(i as f64 / 10.0);
                (t, kappa * (1.0 - t).powf(-beta))
            })
            .collect();
        let fit = estimate_blowup_time(&series, beta, FitWindow::default()).unwrap();
        assert!((fit.t_hat - 1.0).abs() < 1e-10, "{}", fit.t_hat);
    }

    #[test]
    fn decaying_series_refused() {
        let series: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, (-(i as f64)).exp())).collect();
        assert!(matches!(estimate_blowup_time(&series, 0.5, FitWindow::default()), Err(Error::Estimation(_))));
    }

    #[test]
    fn too_few_points() {
        let series = [(0.0, 1.0), (0.1, 2.0), (0.2, 3.0), (0.3, 4.0)];
        assert!(estimate_blowup_time(&series, 1.0, FitWindow::default()).is_err());
    }
}
