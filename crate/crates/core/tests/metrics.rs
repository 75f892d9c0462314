use std::f64::consts::PI;

use proptest::prelude::*;

use padestep::metrics::*;
use padestep::models::SdofCase;
use padestep::studies::{peae_point, sdof_error, sdof_spectral_radius, SDOF_T_END};
use padestep::{Method, Signal};

fn cos_series(dt: f64, n: usize, w: f64) -> Vec<f64> {
    (0..=n).map(|i| (w * i as f64 * dt).cos()).collect()
}

#[test]
fn l2_trivial_cases() {
    let r = cos_series(0.01, 400, 2.0 * PI);
    assert_eq!(l2_error(&r, &r).unwrap(), 0.0);
    let zero = vec![0.0; r.len()];
    for form in [L2Form::Root, L2Form::Squared] {
        assert!((l2_error_with(&zero, &r, form).unwrap() - 100.0).abs() <= 1e-12);
    }
    assert!(l2_error(&r, &zero).is_err());
    assert!(l2_error(&r[..10], &r).is_err());
    let e = l2_error_fn(&r, 0.01, |t| (2.0 * PI * t).cos()).unwrap();
    assert!(e <= 1e-12);
}

#[test]
fn root_form_is_the_square_root_of_the_squared_form() {
    let r = cos_series(0.01, 300, 3.0);
    let u: Vec<f64> = r.iter().map(|v| 0.97 * v + 0.01).collect();
    let root = l2_error_with(&u, &r, L2Form::Root).unwrap();
    let sq = l2_error_with(&u, &r, L2Form::Squared).unwrap();
    assert!((root * root / 100.0 - sq).abs() <= 1e-12 * sq);
}

#[test]
fn trapezoidal_pade_one_error_matches_newmark() {
    let case = SdofCase::table(1).unwrap();
    let dt = case.period() / 100.0;
    let p = sdof_error(&case, Method::Pade(1), dt, SDOF_T_END, L2Form::Root).unwrap();
    let n = sdof_error(&case, Method::Newmark, dt, SDOF_T_END, L2Form::Root).unwrap();
    assert!(p / n <= 2.0 && n / p <= 2.0);
}

#[test]
fn slope_of_synthetic_data() {
    let pts: Vec<(f64, f64)> = (0..8).map(|k| {
        let dt = 0.1 * 0.5f64.powi(k);
        (dt, dt * dt)
    }).collect();
    let fit = convergence_slope(&pts).unwrap();
    assert!((fit.slope - 2.0).abs() <= 1e-6);
    assert!(!fit.plateau_reached);

    // Sixth order, then a plateau at 1e-10 %.
    let pts: Vec<(f64, f64)> = (0..10).map(|k| {
        let dt = 0.1 * 0.5f64.powi(k);
        (dt, (1e4 * dt.powi(6)).max(1e-10))
    }).collect();
    let fit = convergence_slope(&pts).unwrap();
    assert!(fit.plateau_reached);
    assert!(fit.used.iter().all(|p| p.1 >= PLATEAU_PCT));
    assert!((fit.slope - 6.0).abs() <= 1e-6);
    assert!(convergence_slope(&pts[..2]).is_err());
}

#[test]
fn upper_cap_drops_coarse_points() {
    let pts = [(1.0, 80.0), (0.5, 5.0), (0.25, 1.25), (0.125, 0.3125)];
    let fit = convergence_slope_in(&pts, PLATEAU_PCT, 10.0).unwrap();
    assert_eq!(fit.used.len(), 3);
    assert!((fit.slope - 2.0).abs() <= 1e-12);
}

#[test]
fn crossing_interpolates_in_log_space() {
    let pts = [(1e-1, 100.0), (1e-2, 1e-2), (1e-3, 1e-6)];
    let c = crossing_dt(&pts, 1.0).unwrap();
    assert!((c / 10f64.powf(-1.5) - 1.0).abs() <= 1e-12);
    assert_eq!(crossing_dt(&[(1e-2, 0.5), (1e-3, 0.1)], 1.0), Some(1e-2));
    assert_eq!(crossing_dt(&[(1e-2, 5.0), (1e-3, 2.0)], 1.0), None);
}

#[test]
fn spline_interpolates_nodes_and_smooth_functions() {
    let h = 0.05;
    let y: Vec<f64> = (0..40).map(|i| (i as f64 * h).sin()).collect();
    let s = CubicSpline::new(0.0, h, &y).unwrap();
    for (i, v) in y.iter().enumerate() {
        assert!((s.eval(i as f64 * h) - v).abs() <= 1e-15);
    }
    // Natural end conditions cost O(h^2) at the boundary; the effect decays
    // geometrically, leaving the interior bound 5 h^4 / 384 for sin.
    let bound = 5.0 * h.powi(4) / 384.0;
    for i in 50..146 {
        let t = i as f64 * 0.01;
        assert!((s.eval(t) - t.sin()).abs() <= bound, "t = {t}");
    }
    assert!(CubicSpline::new(0.0, h, &[1.0]).is_err());
}

fn exact_cos_errors(n_per: f64) -> (f64, f64) {
    let w = 2.0 * PI;
    let dt = 1.0 / n_per;
    let periods = 50;
    let u = cos_series(dt, ((periods + 2) as f64 * n_per) as usize + 40, w);
    let ae = amplitude_error(&u, dt, w, periods, |t| (w * t).cos()).unwrap();
    let pe = period_elongation(&u, dt, w, periods);
    assert!(!pe.partial);
    (ae, pe.pe_pct)
}

#[test]
fn amplitude_and_period_errors_vanish_on_grid() {
    for n_per in [8.0, 9.0, 13.0, 20.0, 100.0] {
        let (ae, pe) = exact_cos_errors(n_per);
        assert!(ae <= 1e-6 * 100.0, "dt = T/{n_per}: AE {ae}");
        assert!(pe.abs() <= 1e-6 * 100.0, "dt = T/{n_per}: PE {pe}");
    }
    let w = 2.0 * PI;
    assert!(amplitude_error(&[1.0, 0.0], 0.1, w, 5, |t| (w * t).cos()).is_err());
}

#[test]
fn off_grid_errors_follow_interpolation_bounds() {
    for n_per in [8.5, 10.3, 20.7, 37.7] {
        let (ae, _) = exact_cos_errors(n_per);
        let wh = 2.0 * PI / n_per;
        assert!(ae <= 100.0 * 5.0 * wh.powi(4) / 384.0, "dt = T/{n_per}: AE {ae}");
    }
    // Fine enough steps bring both below 1e-6 relative.
    let fine: Vec<(f64, f64, f64)> = [80.3, 160.3, 320.3]
        .iter()
        .map(|&n| {
            let (ae, pe) = exact_cos_errors(n);
            (n, ae, pe)
        })
        .collect();
    for &(n, ae, pe) in &fine {
        assert!(ae <= 1e-4 && pe.abs() <= 1e-4, "dt = T/{n}: AE {ae} PE {pe}");
    }
    for &(n, ae, _) in &fine {
        let wh = 2.0 * PI / n;
        assert!(ae <= 100.0 * 5.0 * wh.powi(4) / 384.0, "dt = T/{n}: AE {ae}");
    }
    // The three-point parabola leaves a third-order peak-time bias.
    for w in fine.windows(2) {
        let rate = (w[0].2.abs() / w[1].2.abs()).ln() / (w[1].0 / w[0].0).ln();
        assert!(rate >= 2.5, "PE rate {rate}");
    }
}

#[test]
fn period_elongation_of_a_slower_oscillation() {
    let w = 2.0 * PI;
    let dt = 0.01;
    let u = cos_series(dt, 5000, w / 1.02);
    let pe = period_elongation(&u, dt, w, 40);
    assert!((pe.pe_pct - 2.0).abs() <= 1e-3, "{}", pe.pe_pct);
    let short = period_elongation(&u[..300], dt, w, 40);
    assert!(short.partial);
}

#[test]
fn fine_steps_have_small_period_elongation() {
    for m in 1..=4 {
        let p = peae_point(Method::Pade(m), 0.005, 200).unwrap();
        assert!(p.pe_pct.abs() < 0.05, "M = {m}: {}", p.pe_pct);
    }
}

#[test]
fn amplitude_error_decreases_with_order() {
    let ae: Vec<f64> = (1..=4).map(|m| peae_point(Method::Pade(m), 0.05, 100).unwrap().ae_pct).collect();
    assert!(ae.windows(2).all(|w| w[1] < w[0]), "{ae:?}");
}

#[test]
fn spectral_radius_of_undamped_schemes_is_one() {
    let w = 2.0 * PI;
    for method in [Method::Pade(1), Method::Pade(2), Method::Pade(3), Method::Pade(4), Method::Newmark] {
        for ratio in [0.1, 1.0, 10.0] {
            let rho = sdof_spectral_radius(method, w, 0.0, ratio).unwrap();
            assert!((rho - 1.0).abs() <= 1e-12, "{method:?} at {ratio}: {rho}");
        }
        let damped = sdof_spectral_radius(method, w, 0.05, 0.1).unwrap();
        assert!(damped < 1.0);
    }
}

#[test]
fn spectral_radius_2x2_examples() {
    assert_eq!(spectral_radius_2x2([[2.0, 0.0], [0.0, -3.0]]), 3.0);
    let (s, c) = 0.3f64.sin_cos();
    assert!((spectral_radius_2x2([[c, -s], [s, c]]) - 1.0).abs() <= 1e-15);
}

#[test]
fn fmax_of_a_pure_tone() {
    let fs = 1000.0;
    let x: Vec<f64> = (0..8000).map(|i| (2.0 * PI * 40.0 * i as f64 / fs).sin()).collect();
    let f = fmax_from_spectrum(&x, fs, 8000, 0.01).unwrap();
    assert!((f - 40.0).abs() <= 2.0 * fs / 8000.0 * 4.0, "{f}");
    assert!(fmax_from_spectrum(&[0.0; 16], fs, 16, 0.01).is_err());
    assert!(fmax_from_spectrum(&x, fs, 100, 0.01).is_err());
}

#[test]
fn fmax_of_the_sine_burst() {
    let (fs, t_sim) = (8000.0, 1.0);
    let n = (fs * t_sim) as usize;
    let sig = Signal::sine_burst();
    let x: Vec<f64> = (0..n).map(|i| sig.eval(i as f64 / fs)).collect();
    let n_fft = 8 * n;
    let bin = fs / n_fft as f64;
    let f = fmax_from_spectrum(&x, fs, n_fft, 0.01).unwrap();
    assert!((f - 74.125).abs() <= bin, "{f}");
}

proptest! {
    #[test]
    fn l2_is_scale_invariant(scale in 1e-3f64..1e3, shift in -0.5f64..0.5) {
        let r = cos_series(0.02, 200, 2.0);
        let u: Vec<f64> = r.iter().map(|v| v + shift * 0.1).collect();
        let e1 = l2_error(&u, &r).unwrap();
        let us: Vec<f64> = u.iter().map(|v| v * scale).collect();
        let rs: Vec<f64> = r.iter().map(|v| v * scale).collect();
        let e2 = l2_error(&us, &rs).unwrap();
        prop_assert!((e1 - e2).abs() <= 1e-10 * e1.max(1e-12));
    }

    #[test]
    fn slope_recovers_power_laws(p in 0.5f64..10.0, c in 1e-3f64..1e3) {
        let pts: Vec<(f64, f64)> = (0..6).map(|k| {
            let dt = 0.1 * 0.7f64.powi(k);
            (dt, c * (dt / 0.1).powf(p))
        }).collect();
        prop_assume!(pts.iter().filter(|q| q.1 >= PLATEAU_PCT).count() >= 3);
        let fit = convergence_slope(&pts).unwrap();
        prop_assert!((fit.slope - p).abs() <= 1e-9);
    }
}
