use serde::Serialize;

use super::series::DiagnosticsSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyWindow {
    /// The window covers the last `decades` decades of `T - t` that were resolved.
    pub decades: f64,
    /// Largest admissible `C2/C1` for type I, and the growth of `m` that flags type II.
    pub ratio: f64,
    pub min_records: usize,
    /// Records with `‖u‖_∞` at or below this value are ignored.
    pub sup_threshold: f64,
}

impl Default for ClassifyWindow {
    fn default() -> Self {
        Self { decades: 2.0, ratio: 10.0, min_records: 10, sup_threshold: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BlowupType {
    TypeI {
        c1: f64,
        c2: f64,
    },
    /// `m(t)` grew by more than the configured ratio across the window. Type II cannot be
    /// certified numerically, only suspected.
    TypeIiSuspected {
        growth: f64,
    },
    Undetermined {
        reason: String,
    },
}

impl BlowupType {
    pub fn label(&self) -> &'static str {
        match self {
            BlowupType::TypeI { .. } => "type-I",
            BlowupType::TypeIiSuspected { .. } => "type-II-suspected",
            BlowupType::Undetermined { .. } => "undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupClassification {
    pub kind: BlowupType,
    /// Range of `T - t` covered by the window.
    pub tau_min: f64,
    pub tau_max: f64,
    pub records: usize,
    /// `m(t)` at the start and the end of the window.
    pub m_first: f64,
    pub m_last: f64,
}

pub fn classify_blowup_type(series: &DiagnosticsSeries, window: &ClassifyWindow) -> BlowupClassification {
    let usable: Vec<_> =
        series.records.iter().filter(|r| r.sup_norm > window.sup_threshold && r.m > 0.0 && r.m.is_finite()).collect();
    let undetermined = |reason: String| BlowupClassification {
        kind: BlowupType::Undetermined { reason },
        tau_min: f64::NAN,
        tau_max: f64::NAN,
        records: 0,
        m_first: f64::NAN,
        m_last: f64::NAN,
    };
    let Some(tau_min) = usable.iter().map(|r| series.t_hat - r.t).reduce(f64::min) else {
        return undetermined("no records above the sup-norm threshold".into());
    };
    let tau_max = tau_min * 10f64.powf(window.decades);
    let inside: Vec<_> = usable.into_iter().filter(|r| series.t_hat - r.t <= tau_max).collect();
    if inside.len() < window.min_records {
        return undetermined(format!("{} records in the window, need {}", inside.len(), window.min_records));
    }
    let c1 = inside.iter().map(|r| r.m).fold(f64::INFINITY, f64::min);
    let c2 = inside.iter().map(|r| r.m).fold(0.0, f64::max);
    let m_first = inside[0].m;
    let m_last = inside[inside.len() - 1].m;
    let growth = m_last / m_first;
    let kind = if c2 / c1 < window.ratio {
        BlowupType::TypeI { c1, c2 }
    } else if growth > window.ratio {
        BlowupType::TypeIiSuspected { growth }
    } else {
        BlowupType::Undetermined { reason: format!("m varies by {:.3e} without a monotone trend", c2 / c1) }
    };
    let tau_first = series.t_hat - inside[0].t;
    BlowupClassification { kind, tau_min, tau_max: tau_first, records: inside.len(), m_first, m_last }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ode_series(p: f64, t_hat: f64, n: usize) -> Vec<(f64, f64)> {
        let beta = 1.0 / (p - 1.0);
        let kappa = f64::powf(beta, beta);
        (0..n)
            .map(|i| {
                let tau = t_hat * 10f64.powf(-6.0 * i as f64 / n as f64);
                (t_hat - tau, kappa * tau.powf(-beta))
            })
            .collect()
    }

    #[test]
    fn exact_ode_series_is_type_one_with_kappa() {
        let p = 3.0;
        let s = DiagnosticsSeries::from_sup_series(&ode_series(p, 1.0, 400), 1.0, p, 1);
        let c = classify_blowup_type(&s, &ClassifyWindow::default());
        let kappa = f64::sqrt(0.5);
        match c.kind {
            BlowupType::TypeI { c1, c2 } => {
                assert!((c1 - kappa).abs() < 1e-6 && (c2 - kappa).abs() < 1e-6);
                for r in &s.records {
                    if 1.0 - r.t <= c.tau_max {
                        assert!(c1 <= r.m && r.m <= c2);
                    }
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn logarithmic_excess_is_type_two_suspected() {
        // ‖u‖_∞ = τ^{-β} log(1/τ) over fourteen decades; only a wide window sees the growth
        let beta = 0.5;
        let series: Vec<(f64, f64)> = (1..=700)
            .map(|i| {
                let tau = 10f64.powf(-14.0 * i as f64 / 700.0);
                (1.0 - tau, tau.powf(-beta) * (1.0 / tau).ln())
            })
            .collect();
        let s = DiagnosticsSeries::from_sup_series(&series, 1.0, 3.0, 1);
        let wide = ClassifyWindow { decades: 14.0, ..Default::default() };
        assert_eq!(classify_blowup_type(&s, &wide).kind.label(), "type-II-suspected");
    }

    #[test]
    fn too_few_records() {
        let s = DiagnosticsSeries::from_sup_series(&ode_series(3.0, 1.0, 5), 1.0, 3.0, 1);
        let c = classify_blowup_type(&s, &ClassifyWindow::default());
        assert_eq!(c.kind.label(), "undetermined");
    }
}
