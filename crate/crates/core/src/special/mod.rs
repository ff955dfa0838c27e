//! Explicit and shooting-computed special solutions: self-similar profiles and the bubble.

mod bubble;
mod profile;

pub use bubble::{bubble_critical_norm, bubble_residual, bubble_value, BubbleNorm, BubbleQuadrature, BubbleSpec};
pub use profile::{
    critical_norm_ladder, find_profile, profile_critical_norm_growth, profile_rhs, profile_scan, search_profiles,
    shoot_profile, FindOptions, NormGrowth, ProfileClass, ProfileSample, ProfileSearch, ProfileSolution, ScanPoint,
    ShootOptions,
};
