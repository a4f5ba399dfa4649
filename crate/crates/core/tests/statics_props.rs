use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vinelock_core::statics::moment_residual;
use vinelock_core::*;

fn fastener_strategy() -> impl Strategy<Value = FastenerParams> {
    (5.0..60.0f64, 0.5..6.0f64, 5.0..200.0f64, 5.0..200.0f64, 0.0..20.0f64).prop_map(|(w, t, s, u, d)| {
        FastenerParams { width: w, thickness: t, sigma_star: s, tau_star: u, pinch_offset: d, calibrated: true }
    })
}

/// Largest tension meeting the elliptical criterion, by bisection on the
/// stress state rather than the closed form.
fn oracle_max_tension(theta: f64, f: &FastenerParams) -> f64 {
    let alpha = (PI - theta) / 2.0;
    let area = 8.0 * f.width * f.thickness * 1e-6;
    let fails = |t: f64| {
        let normal = t * alpha.sin() / area;
        let shear = t * alpha.cos() / area;
        (normal / (f.sigma_star * 1e3)).powi(2) + (shear / (f.tau_star * 1e3)).powi(2) > 1.0
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while !fails(hi) {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if fails(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Pressure at which holding the bend needs exactly `t_max`, by bisection on
/// the moment balance.
fn oracle_separation_pressure(theta: f64, r: f64, f: &FastenerParams) -> f64 {
    let t_max = oracle_max_tension(theta, f);
    let (mut lo, mut hi) = (0.0, 1.0);
    while moment_residual(hi, t_max, theta, r, f).unwrap() < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if moment_residual(mid, t_max, theta, r, f).unwrap() > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

proptest! {
    #[test]
    fn torque_is_linear_in_pressure(p in 0.0..50.0f64, k in 0.0..10.0f64, r in 5.0..200.0f64, theta in 0.0..3.1f64) {
        let base = resistance_torque(p, r, theta).unwrap();
        let scaled = resistance_torque(k * p, r, theta).unwrap();
        prop_assert!((scaled - k * base).abs() <= 1e-12 * scaled.abs().max(1e-12));
    }

    #[test]
    fn max_tension_between_strength_bounds(theta in 0.01..3.13f64, f in fastener_strategy()) {
        let t = max_fastener_tension(theta, &f);
        let area = f.stressed_area();
        let lo = f.sigma_star.min(f.tau_star) * 1e3 * area;
        let hi = f.sigma_star.max(f.tau_star) * 1e3 * area;
        prop_assert!(t >= lo * (1.0 - 1e-12) && t <= hi * (1.0 + 1e-12));
        let oracle = oracle_max_tension(theta, &f);
        prop_assert!((t - oracle).abs() <= 1e-9 * oracle);
    }

    #[test]
    fn separation_pressure_matches_bisection(theta in 0.05..3.0f64, r in 10.0..150.0f64, f in fastener_strategy()) {
        let p = separation_pressure(theta, r, &f).unwrap();
        let oracle = oracle_separation_pressure(theta, r, &f);
        prop_assert!((p - oracle).abs() <= 1e-8 * oracle.max(1e-9));
        let residual = moment_residual(p, max_fastener_tension(theta, &f), theta, r, &f).unwrap();
        prop_assert!(residual.abs() < 1e-9);
    }

    #[test]
    fn separation_pressure_decreases_with_angle(a in 0.05..3.0f64, b in 0.05..3.0f64, r in 10.0..150.0f64, f in fastener_strategy()) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(separation_pressure(hi, r, &f).unwrap() < separation_pressure(lo, r, &f).unwrap());
    }

    #[test]
    fn separation_pressure_scales_inverse_square_in_radius_without_offset(theta in 0.1..3.0f64, r in 10.0..150.0f64, k in 0.5..4.0f64, f in fastener_strategy()) {
        let f = FastenerParams { pinch_offset: 0.0, ..f };
        let p1 = separation_pressure(theta, r, &f).unwrap();
        let p2 = separation_pressure(theta, k * r, &f).unwrap();
        prop_assert!((p2 * k * k - p1).abs() <= 1e-9 * p1);
    }
}

#[test]
fn worked_example_pressure() {
    let f = FastenerParams::default();
    let p = separation_pressure(PI / 2.0, 40.0, &f).unwrap();
    assert!((p - 4.484).abs() < 5e-3, "{p}");
    assert!((p - oracle_separation_pressure(PI / 2.0, 40.0, &f)).abs() < 1e-9);
}

#[test]
fn sweep_is_strictly_decreasing() {
    let f = FastenerParams::default();
    let ps: Vec<f64> = (0..100)
        .map(|i| 0.1 + 2.9 * i as f64 / 99.0)
        .map(|t| separation_pressure(t, 54.0, &f).unwrap())
        .collect();
    assert!(ps.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn stiffness_defaults_reproduce_measurements() {
    let s = StiffnessParams::default();
    assert!((beam_tip_force(0.1, Regime::Unlocked, &s) - 15.2).abs() < 1e-12);
    assert!((beam_tip_force(0.1, Regime::Locked, &s) - 19.9).abs() < 1e-12);
    assert_eq!(tip_deflection(10.0, Regime::Locked, &s, None), 10.0);
    assert_eq!(tip_deflection(10.0, Regime::Unlocked, &s, Some(90.0)), 90.0);
    assert_eq!(tip_deflection(20.0, Regime::Unlocked, &s, Some(90.0)), 90.0);
}

fn truth() -> FastenerParams {
    FastenerParams { width: 25.0, thickness: 3.0, sigma_star: 38.0, tau_star: 66.0, pinch_offset: 7.5, calibrated: true }
}

fn synthetic(truth: &FastenerParams, r: f64, noise: Option<&mut ChaCha8Rng>) -> Vec<CalibrationSample> {
    let mut noise = noise;
    (0..18)
        .map(|i| {
            let theta = 0.3 + 2.5 * i as f64 / 17.0;
            let mut p = separation_pressure(theta, r, truth).unwrap();
            if let Some(rng) = noise.as_deref_mut() {
                p += rng.gen_range(-1.0..1.0);
            }
            CalibrationSample { theta, p_sep: p.max(1e-3) }
        })
        .collect()
}

#[test]
fn calibration_recovers_noise_free_parameters() {
    let truth = truth();
    let samples = synthetic(&truth, 40.0, None);
    let fit = calibrate_fastener(&samples, 40.0, &FastenerParams::default(), true).unwrap();
    for (got, want) in [
        (fit.params.sigma_star, truth.sigma_star),
        (fit.params.tau_star, truth.tau_star),
        (fit.params.pinch_offset, truth.pinch_offset),
    ] {
        assert!((got - want).abs() <= 0.01 * want, "{got} vs {want}");
    }
    assert!(fit.rmse < 1e-6, "{}", fit.rmse);
    assert!(fit.params.calibrated);
}

#[test]
fn calibration_rmse_under_noise() {
    let truth = truth();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let samples = synthetic(&truth, 40.0, Some(&mut rng));
        let fit = calibrate_fastener(&samples, 40.0, &FastenerParams::default(), true).unwrap();
        assert!(fit.rmse <= 1.5, "{}", fit.rmse);
        // the fit can never be worse than the generating parameters
        let truth_rmse = (samples
            .iter()
            .map(|s| (separation_pressure(s.theta, 40.0, &truth).unwrap() - s.p_sep).powi(2))
            .sum::<f64>()
            / samples.len() as f64)
            .sqrt();
        assert!(fit.rmse <= truth_rmse + 1e-9);
    }
}

#[test]
fn calibration_rejects_two_samples() {
    let samples = [
        CalibrationSample { theta: 1.0, p_sep: 5.0 },
        CalibrationSample { theta: 2.0, p_sep: 3.0 },
    ];
    assert!(matches!(
        calibrate_fastener(&samples, 54.0, &FastenerParams::default(), false),
        Err(StaticsError::InsufficientSamples { .. })
    ));
}
