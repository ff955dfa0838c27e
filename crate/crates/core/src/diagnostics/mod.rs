//! Post-processing of runs: type-I/II classification, critical and concentration integrals,
//! decay away from the blow-up set, far-field bounds and blow-up point location.
//!
//! Infinite limits are only checked through finite-resolution surrogates: growth and plateau
//! behaviour over the resolved range of `T - t`.

mod classify;
mod epsilon;
mod integrals;
mod points;
mod series;

pub use classify::{classify_blowup_type, BlowupClassification, BlowupType, ClassifyWindow};
pub use epsilon::{epsilon_regularity_check, EpsilonOptions, EpsilonReport};
pub use integrals::{concentration_integral, critical_norm, CriticalNorm, Region};
pub use points::{far_field_bound_check, locate_blowup_points, BlowupPoint, BlowupPointSet, FarFieldReport};
pub use series::{diagnostics_series, rescale_run, DiagnosticsSeries, SeriesConfig, SnapshotRecord, TypeRecord};
