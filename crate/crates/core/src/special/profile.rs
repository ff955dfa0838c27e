//! Radial profiles `φ'' + ((N-1)/r - r/2)φ' + |φ|^{p-1}φ - βφ = 0`, `φ'(0) = 0`, by shooting on
//! `α = φ(0)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, linear_fit, signed_pow, sphere_area, Dopri5, OdeEvent, OdeOptions};

/// `φ''` from the profile equation; at `r = 0` the limit `(βφ - |φ|^{p-1}φ)/N`.
pub fn profile_rhs(r: f64, phi: f64, dphi: f64, dim: usize, p: f64) -> f64 {
    let beta = 1.0 / (p - 1.0);
    let reaction = signed_pow(phi, p) - beta * phi;
    if r == 0.0 {
        return -reaction / dim as f64;
    }
    -((dim as f64 - 1.0) / r - 0.5 * r) * dphi - reaction
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileClass {
    /// `α = 0`: the zero solution.
    Trivial,
    ConstantKappa,
    SignCrossing,
    /// A positive local minimum (the profile turns up again), or `|φ| > G_max α`.
    GrowsUnbounded,
    /// Reached the end of the integration range with `|φ(R)| < |φ(R/2)|`.
    DecayingCandidate,
}

impl ProfileClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ProfileClass::Trivial => "trivial",
            ProfileClass::ConstantKappa => "constant-kappa",
            ProfileClass::SignCrossing => "sign-crossing",
            ProfileClass::GrowsUnbounded => "grows-unbounded",
            ProfileClass::DecayingCandidate => "decaying-candidate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootOptions {
    pub r_max: f64,
    pub g_max: f64,
    /// Tolerance for `α = κ` to be treated as the constant solution, relative to `κ`.
    pub kappa_tolerance: f64,
    #[serde(skip)]
    pub ode: OdeOptions,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self { r_max: 30.0, g_max: 1e3, kappa_tolerance: 1e-14, ode: OdeOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub r: f64,
    pub phi: f64,
    pub dphi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSolution {
    pub dim: usize,
    pub p: f64,
    pub alpha: f64,
    pub samples: Vec<ProfileSample>,
    pub classification: ProfileClass,
    /// Slope of `log|φ|` against `log r` on `[R_max/2, R_max]`; decaying candidates only.
    pub tail_exponent: Option<f64>,
    /// End of the trustworthy part of the profile.
    pub r_max: f64,
    /// Shooting bracket the profile was bisected from, if any.
    pub bracket: Option<(f64, f64)>,
}

impl ProfileSolution {
    pub fn beta(&self) -> f64 {
        1.0 / (self.p - 1.0)
    }

    /// Cubic Hermite interpolation of `φ` between the accepted steps.
    pub fn eval(&self, r: f64) -> f64 {
        let s = &self.samples;
        let n = s.len();
        if r <= s[0].r {
            return s[0].phi;
        }
        if r >= s[n - 1].r {
            return s[n - 1].phi;
        }
        let i = s.partition_point(|x| x.r <= r) - 1;
        let (a, b) = (&s[i], &s[i + 1]);
        let h = b.r - a.r;
        let t = (r - a.r) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * a.phi
            + (t3 - 2.0 * t2 + t) * h * a.dphi
            + (-2.0 * t3 + 3.0 * t2) * b.phi
            + (t3 - t2) * h * b.dphi
    }

    /// `φ(R_max) R_max^{2β}`: the constant `c` of the tail model `φ ~ c r^{-2β}`.
    pub fn tail_constant(&self) -> f64 {
        self.eval(self.r_max) * self.r_max.powf(2.0 * self.beta())
    }

    fn fit_tail(&mut self) {
        let (lo, hi) = (0.5 * self.r_max, self.r_max);
        let pts: Vec<(f64, f64)> =
            (0..=200).map(|k| lo + (hi - lo) * k as f64 / 200.0).map(|r| (r.ln(), self.eval(r).abs().ln())).collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        self.tail_exponent = linear_fit(&xs, &ys).map(|f| f.slope);
    }
}

fn kappa(p: f64) -> f64 {
    let beta = 1.0 / (p - 1.0);
    beta.powf(beta)
}

fn validate(dim: usize, p: f64) -> Result<()> {
    if dim == 0 || !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("profile equation needs N >= 1 and p > 1 (got N = {dim}, p = {p})")));
    }
    Ok(())
}

/// Integrates from `r = 0` with `φ(0) = α`, `φ'(0) = 0` and classifies by the first event.
pub fn shoot_profile(alpha: f64, dim: usize, p: f64, options: &ShootOptions) -> Result<ProfileSolution> {
    validate(dim, p)?;
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("shooting value must be non-negative (got {alpha})")));
    }
    let mut sol = ProfileSolution {
        dim,
        p,
        alpha,
        samples: Vec::new(),
        classification: ProfileClass::Trivial,
        tail_exponent: None,
        r_max: options.r_max,
        bracket: None,
    };
    if alpha == 0.0 {
        sol.samples = vec![
            ProfileSample { r: 0.0, phi: 0.0, dphi: 0.0 },
            ProfileSample { r: options.r_max, phi: 0.0, dphi: 0.0 },
        ];
        return Ok(sol);
    }
    if ((alpha - kappa(p)) / kappa(p)).abs() <= options.kappa_tolerance {
        // exact equilibrium; integrating it only amplifies rounding along the unstable directions
        sol.classification = ProfileClass::ConstantKappa;
        let count = (options.r_max / 0.5).ceil() as usize;
        sol.samples = (0..=count)
            .map(|k| ProfileSample { r: (0.5 * k as f64).min(options.r_max), phi: alpha, dphi: 0.0 })
            .collect();
        return Ok(sol);
    }
    let ode = Dopri5::new(|r, y: [f64; 2]| [y[1], profile_rhs(r, y[0], y[1], dim, p)], options.ode);
    let cap = options.g_max * alpha;
    let mut prev_dphi = 0.0f64;
    let traj = ode.integrate(0.0, [alpha, 0.0], options.r_max, |_, y| {
        let event = if y[0] <= 0.0 {
            OdeEvent::Stop(ProfileClass::SignCrossing)
        } else if y[0].abs() > cap || (prev_dphi < 0.0 && y[1] > 0.0) {
            OdeEvent::Stop(ProfileClass::GrowsUnbounded)
        } else {
            OdeEvent::Continue
        };
        prev_dphi = y[1];
        event
    })?;
    sol.samples = traj.r.iter().zip(&traj.y).map(|(&r, y)| ProfileSample { r, phi: y[0], dphi: y[1] }).collect();
    sol.classification = match traj.event {
        Some(ev) => {
            sol.r_max = traj.last_r();
            ev
        }
        None if sol.eval(options.r_max).abs() < sol.eval(0.5 * options.r_max).abs() => ProfileClass::DecayingCandidate,
        None => ProfileClass::GrowsUnbounded,
    };
    if sol.classification == ProfileClass::DecayingCandidate {
        sol.fit_tail();
    }
    Ok(sol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FindOptions {
    pub shoot: ShootOptions,
    /// Stop when the bracket is narrower than this (never below a few ulps of `α`).
    pub bisection_tolerance: f64,
    /// The profile is trusted up to the first radius where the two bracket solutions differ by
    /// more than this relative amount.
    pub divergence_tolerance: f64,
}

impl Default for FindOptions {
    fn default() -> Self {
        Self { shoot: ShootOptions::default(), bisection_tolerance: 1e-13, divergence_tolerance: 1e-3 }
    }
}

fn is_bracket_pair(a: ProfileClass, b: ProfileClass) -> bool {
    matches!(
        (a, b),
        (ProfileClass::SignCrossing, ProfileClass::GrowsUnbounded)
            | (ProfileClass::GrowsUnbounded, ProfileClass::SignCrossing)
    )
}

/// Bisects on `α` between a sign-crossing and a grows-unbounded shot. The returned profile is the
/// lower bracket solution truncated where the two bracket solutions separate.
pub fn find_profile(dim: usize, p: f64, bracket: (f64, f64), options: &FindOptions) -> Result<ProfileSolution> {
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 { bracket } else { (bracket.1, bracket.0) };
    let s = &options.shoot;
    let class_lo = shoot_profile(lo, dim, p, s)?.classification;
    let class_hi = shoot_profile(hi, dim, p, s)?.classification;
    if !is_bracket_pair(class_lo, class_hi) {
        return Err(Error::Bracketing { lo, hi, class: format!("{} / {}", class_lo.as_str(), class_hi.as_str()) });
    }
    while hi - lo > options.bisection_tolerance.max(4.0 * f64::EPSILON * hi) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if shoot_profile(mid, dim, p, s)?.classification == class_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = shoot_profile(lo, dim, p, s)?;
    let b = shoot_profile(hi, dim, p, s)?;
    let reach = a.samples.last().unwrap().r.min(b.samples.last().unwrap().r);
    let step = 1e-2;
    let mut r_eff = reach;
    let mut r = step;
    while r <= reach {
        let (fa, fb) = (a.eval(r), b.eval(r));
        if (fa - fb).abs() > options.divergence_tolerance * fa.abs() {
            r_eff = r;
            break;
        }
        r += step;
    }
    let mut sol = a;
    // cut at r_eff, closing the last Hermite cell with the interpolated value and slope
    let h = 1e-6;
    let end = ProfileSample { r: r_eff, phi: sol.eval(r_eff), dphi: (sol.eval(r_eff) - sol.eval(r_eff - h)) / h };
    sol.samples.retain(|x| x.r < r_eff);
    sol.samples.push(end);
    sol.r_max = r_eff;
    sol.bracket = Some((lo, hi));
    sol.tail_exponent = None;
    sol.classification = if sol.eval(r_eff).abs() < sol.eval(0.5 * r_eff).abs() && sol.eval(r_eff) > 0.0 {
        ProfileClass::DecayingCandidate
    } else {
        class_lo
    };
    if sol.classification == ProfileClass::DecayingCandidate {
        sol.fit_tail();
    }
    Ok(sol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub alpha: f64,
    pub classification: ProfileClass,
}

/// Classifies shots at every `α` in parallel; results are in input order.
pub fn profile_scan(dim: usize, p: f64, alphas: &[f64], options: &ShootOptions) -> Result<Vec<ScanPoint>> {
    alphas
        .par_iter()
        .map(|&alpha| {
            shoot_profile(alpha, dim, p, options).map(|s| ScanPoint { alpha, classification: s.classification })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSearch {
    pub dim: usize,
    pub p: f64,
    pub scan: Vec<ScanPoint>,
    /// Neighbouring scan points that form a sign-crossing / grows-unbounded bracket not containing `κ`.
    pub brackets: Vec<(f64, f64)>,
    pub profiles: Vec<ProfileSolution>,
}

/// Scans `α` over `[alpha_min, alpha_max]` with the given step and bisects every bracket away
/// from `κ`; brackets that do not end in a decaying candidate are dropped.
pub fn search_profiles(
    dim: usize,
    p: f64,
    alpha_min: f64,
    alpha_max: f64,
    step: f64,
    options: &FindOptions,
) -> Result<ProfileSearch> {
    validate(dim, p)?;
    if !(alpha_min > 0.0 && alpha_max > alpha_min && step > 0.0) {
        return Err(Error::Config(format!("bad scan range [{alpha_min}, {alpha_max}] step {step}")));
    }
    let count = ((alpha_max - alpha_min) / step).floor() as usize + 1;
    let alphas: Vec<f64> = (0..count).map(|k| alpha_min + step * k as f64).collect();
    let scan = profile_scan(dim, p, &alphas, &options.shoot)?;
    let k = kappa(p);
    let brackets: Vec<(f64, f64)> = scan
        .windows(2)
        .filter(|w| is_bracket_pair(w[0].classification, w[1].classification))
        .map(|w| (w[0].alpha, w[1].alpha))
        .filter(|&(a, b)| !(a <= k && k <= b))
        .collect();
    let found: Vec<Result<ProfileSolution>> = brackets.par_iter().map(|&b| find_profile(dim, p, b, options)).collect();
    let mut profiles = Vec::new();
    for f in found {
        let f = f?;
        if f.classification == ProfileClass::DecayingCandidate {
            profiles.push(f);
        }
    }
    Ok(ProfileSearch { dim, p, scan, brackets, profiles })
}

/// Least-squares fit of `I(R) = ∫_{1<=|y|<=R} |φ|^q dy` against `log R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormGrowth {
    pub slope: f64,
    pub intercept: f64,
    pub correlation: f64,
    pub points: usize,
    /// `correlation > 0.99`: the logarithmic model describes the growth.
    pub log_model_accepted: bool,
}

/// `I(R)` on a 16-point geometric ladder over `[1, r_max]`, fitted against `log R`.
pub fn critical_norm_ladder(dim: usize, q: f64, r_max: f64, phi: impl Fn(f64) -> f64) -> Result<NormGrowth> {
    if !(r_max > 1.0) {
        return Err(Error::InsufficientData(format!("ladder needs r_max > 1 (got {r_max})")));
    }
    let rungs = 16usize;
    let ratio = r_max.ln() / (rungs - 1) as f64;
    let radii: Vec<f64> = (0..rungs).map(|k| (ratio * k as f64).exp()).collect();
    let gl = gauss_legendre();
    let omega = sphere_area(dim);
    let f = |r: f64| omega * phi(r).abs().powf(q) * r.powi(dim as i32 - 1);
    let mut acc = 0.0;
    let mut values = vec![0.0];
    for w in radii.windows(2) {
        let cells = ((w[1] - w[0]) / 0.02).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / cells as f64;
        for c in 0..cells {
            let mid = w[0] + h * (c as f64 + 0.5);
            acc += 0.5 * h * gl.iter().map(|&(x, wt)| wt * f(mid + 0.5 * h * x)).sum::<f64>();
        }
        values.push(acc);
    }
    let logs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let fit =
        linear_fit(&logs, &values).ok_or_else(|| Error::InsufficientData("degenerate critical-norm ladder".into()))?;
    Ok(NormGrowth {
        slope: fit.slope,
        intercept: fit.intercept,
        correlation: fit.correlation,
        points: fit.points,
        log_model_accepted: fit.correlation > 0.99,
    })
}

/// Logarithmic divergence of `∫|φ|^{q*}` for a decaying candidate.
pub fn profile_critical_norm_growth(profile: &ProfileSolution, q_star: f64) -> Result<NormGrowth> {
    if profile.classification != ProfileClass::DecayingCandidate {
        return Err(Error::Precondition(format!(
            "critical-norm growth needs a decaying candidate (got {})",
            profile.classification.as_str()
        )));
    }
    critical_norm_ladder(profile.dim, q_star, profile.r_max, |r| profile.eval(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_is_an_equilibrium_of_the_rhs() {
        for (dim, p) in [(1, 2.0), (3, 7.0), (3, 5.0), (11, 9.0), (2, 1.5)] {
            let k = kappa(p);
            for r in [0.0, 0.5, 3.0, 20.0] {
                assert!(profile_rhs(r, k, 0.0, dim, p).abs() < 1e-15, "N = {dim}, p = {p}");
            }
            assert_eq!(profile_rhs(1.0, 0.0, 0.0, dim, p), 0.0);
        }
    }

    #[test]
    fn power_tail_residual_vanishes_relative_to_the_leading_terms() {
        // φ = c r^{-2β}: -(r/2)φ' - βφ cancels exactly, the remainder is O(r^{-2β-2}) and c^p r^{-2βp}
        let (dim, p, c) = (3usize, 7.0, 0.6);
        let beta: f64 = 1.0 / (p - 1.0);
        let a = 2.0 * beta;
        let mut prev = f64::INFINITY;
        for r in [10.0f64, 20.0, 40.0, 80.0] {
            let phi = c * r.powf(-a);
            let d1 = -a * c * r.powf(-a - 1.0);
            let d2 = a * (a + 1.0) * c * r.powf(-a - 2.0);
            let residual = d2 - profile_rhs(r, phi, d1, dim, p);
            let leading = (0.5 * r * d1).abs();
            let rel = residual.abs() / leading;
            assert!(rel < prev, "r = {r}");
            prev = rel;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn trivial_and_constant_shots() {
        let o = ShootOptions::default();
        let zero = shoot_profile(0.0, 3, 7.0, &o).unwrap();
        assert_eq!(zero.classification, ProfileClass::Trivial);
        assert!(zero.samples.iter().all(|s| s.phi == 0.0));
        let k = kappa(7.0);
        let c = shoot_profile(k, 3, 7.0, &o).unwrap();
        assert_eq!(c.classification, ProfileClass::ConstantKappa);
        assert!(c.samples.iter().all(|s| (s.phi - k).abs() < 1e-12));
        assert!(shoot_profile(-1.0, 3, 7.0, &o).is_err());
    }

    #[test]
    fn supercritical_classes_in_three_dimensions() {
        let o = ShootOptions::default();
        assert_eq!(shoot_profile(1.5, 3, 7.0, &o).unwrap().classification, ProfileClass::SignCrossing);
        assert_eq!(shoot_profile(3.0, 3, 7.0, &o).unwrap().classification, ProfileClass::GrowsUnbounded);
    }

    #[test]
    fn same_class_bracket_is_rejected() {
        let err = find_profile(3, 7.0, (1.2, 1.5), &FindOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Bracketing { .. }));
    }

    #[test]
    fn synthetic_power_tail_grows_logarithmically() {
        let (dim, p, c) = (3usize, 7.0, 0.7);
        let beta = 1.0 / (p - 1.0);
        let q = dim as f64 * (p - 1.0) / 2.0;
        let g = critical_norm_ladder(dim, q, 40.0, |r| c * r.powf(-2.0 * beta)).unwrap();
        let expect = sphere_area(dim) * c.powf(q);
        assert!((g.slope / expect - 1.0).abs() < 1e-10, "{} {}", g.slope, expect);
        assert!((g.correlation - 1.0).abs() < 1e-12 && g.log_model_accepted);
    }

    #[test]
    fn constants_fail_the_logarithmic_model() {
        let g = critical_norm_ladder(3, 9.0, 30.0, |_| kappa(7.0)).unwrap();
        assert!(!g.log_model_accepted, "{}", g.correlation);
    }
}
