use bulb_core::core::Grid;
use bulb_core::similarity::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn frame(values: impl Fn(f64) -> f64) -> SimilarityFrame {
    let grid = Grid::line(12.0, 2401).unwrap();
    let values = grid.nodes().iter().map(|&y| values(y)).collect();
    SimilarityFrame {
        center: 0.0,
        s: 0.0,
        s0: 0.0,
        t_hat: 1.0,
        dim: 1,
        p: 3.0,
        domain_radius: f64::INFINITY,
        grid,
        values,
        source: FrameSource::NativeWSolve,
    }
}

/// Sum of six cosines with frequencies below 3.
fn band_limited(rng: &mut ChaCha8Rng) -> SimilarityFrame {
    let modes: Vec<(f64, f64, f64)> = (0..6)
        .map(|_| {
            (rng.random_range(-1.0..1.0), rng.random_range(0.0..3.0), rng.random_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    frame(|y| modes.iter().map(|&(a, w, th)| a * (w * y + th).cos()).sum())
}

#[test]
fn contraction_on_random_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let quad = RhoQuadrature { rule: RhoRule::GaussHermite { nodes: 96 }, y_max: 12.0 };
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let phi = band_limited(&mut rng);
        for q in [1.0, 2.0, 4.0] {
            for s in [0.1, 1.0, 5.0] {
                let r = contraction_check(&phi, s, q, &quad).unwrap();
                assert!(!r.violated, "{r:?}");
                worst = worst.min(r.margin);
            }
        }
    }
    assert!(worst >= -1e-6, "{worst}");
}

#[test]
fn semigroup_law_on_random_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let quad = RhoQuadrature { rule: RhoRule::GaussHermite { nodes: 96 }, y_max: 12.0 };
    for _ in 0..10 {
        let phi = band_limited(&mut rng);
        let (s1, s2) = (rng.random_range(0.05..1.0), rng.random_range(0.05..2.0));
        let two = mehler_apply(&mehler_apply(&phi, s1, &quad).unwrap(), s2, &quad).unwrap();
        let one = mehler_apply(&phi, s1 + s2, &quad).unwrap();
        let err = one
            .grid
            .nodes()
            .iter()
            .zip(one.values.iter().zip(&two.values))
            .filter(|(y, _)| y.abs() <= 6.0)
            .map(|(_, (a, b))| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }
}

#[test]
fn hypercontractive_threshold_cross_check() {
    // L² -> L⁴ smoothing starts near s = ln 3; the finite-range scan is only a loose check
    let config =
        SmoothingScanConfig { q: 4.0, m: 2.0, s_values: vec![0.3, 0.6, 0.9, 1.2, 1.5, 2.0, 3.0], ..Default::default() };
    let scan = delayed_smoothing_scan(&config, &RhoQuadrature::default()).unwrap();
    let s_star = scan.s_star.unwrap();
    assert!((0.6..=1.5).contains(&s_star), "{s_star}: {:?}", scan.summaries);
}
