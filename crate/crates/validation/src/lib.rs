//! Acceptance checks for the integrators and studies, one function per
//! criterion. Each returns a one-line report, `Ok` when the criterion holds.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num::complex::Complex64;
use num::{BigInt, BigRational};

use padestep::baselines::{ExactStepper, Newmark};
use padestep::forcing::Signal;
use padestep::metrics::{self, convergence_slope_in, crossing_dt, fmax_from_spectrum, L2Form, PLATEAU_PCT};
use padestep::models::{build_rod, random_system, sdof_system, SdofCase};
use padestep::pade::{ck_polynomials, pade_coefficients, phat_coefficients, q_roots};
use padestep::stepper::{displacement_series, Integrator};
use padestep::studies::{
    make_integrator, peae_point, peae_sweep, rod_convergence, rod_history, sdof_convergence,
    sdof_energy_drift, sdof_spectral_radius, step_count, time_method, Method, SDOF_STEPS_PER_PERIOD,
    SDOF_T_END,
};
use padestep::system::{Force, SecondOrderSystem};

/// Convergence fits ignore points above this error (pre-asymptotic regime).
const FIT_CAP_PCT: f64 = 10.0;

pub type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ints(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| rat(x, 1)).collect()
}

pub fn scheme_tables() -> Outcome {
    let mut bad = Vec::new();
    let p_want: [&[i128]; 4] = [&[2, 1], &[12, 6, 1], &[120, 60, 12, 1], &[1680, 840, 180, 20, 1]];
    for (i, p) in p_want.iter().enumerate() {
        let m = i + 1;
        let poly = pade_coefficients(m).map_err(|e| e.to_string())?;
        let q: Vec<i128> = p.iter().enumerate().map(|(j, c)| if j % 2 == 0 { *c } else { -c }).collect();
        if poly.p != *p || poly.q != q {
            bad.push(format!("P/Q for M={m}"));
        }
    }

    let roots: [(Vec<f64>, Vec<Complex64>); 4] = [
        (vec![2.0], vec![]),
        (vec![], vec![Complex64::new(3.0, 3f64.sqrt())]),
        (vec![4.644_370_709_252_17], vec![Complex64::new(3.677_814_645_373_91, 3.508761919567443)]),
        (
            vec![],
            vec![
                Complex64::new(4.207578794359259, 5.314836083713504),
                Complex64::new(5.792421205640749, 1.734468257869007),
            ],
        ),
    ];
    let mut worst_root = 0.0f64;
    for (i, (real, pairs)) in roots.iter().enumerate() {
        let got = q_roots(i + 1).map_err(|e| e.to_string())?;
        if got.real.len() != real.len() || got.pairs.len() != pairs.len() {
            bad.push(format!("root count for M={}", i + 1));
            continue;
        }
        for w in real {
            let d = got.real.iter().map(|g| (g - w).abs()).fold(f64::INFINITY, f64::min);
            worst_root = worst_root.max(d);
        }
        for w in pairs {
            let d = got.pairs.iter().map(|g| (g - w).norm()).fold(f64::INFINITY, f64::min);
            worst_root = worst_root.max(d);
        }
    }
    if worst_root > 1e-12 {
        bad.push(format!("roots off by {worst_root:e}"));
    }

    let ck_want: [Vec<Vec<BigRational>>; 4] = [
        vec![ints(&[2]), ints(&[0])],
        vec![ints(&[12, 0]), ints(&[0, -1]), ints(&[1, 0])],
        vec![
            ints(&[120, 0, 2]),
            ints(&[0, -10, 0]),
            vec![rat(10, 1), rat(0, 1), rat(1, 2)],
            vec![rat(0, 1), rat(-3, 2), rat(0, 1)],
        ],
        vec![
            ints(&[1680, 0, 40, 0]),
            ints(&[0, -140, 0, -1]),
            ints(&[140, 0, 8, 0]),
            vec![rat(0, 1), rat(-21, 1), rat(0, 1), rat(-1, 4)],
            vec![rat(21, 1), rat(0, 1), rat(3, 2), rat(0, 1)],
        ],
    ];
    for (i, want) in ck_want.iter().enumerate() {
        let m = i + 1;
        let ck = ck_polynomials(m, m).map_err(|e| e.to_string())?;
        if ck.polys != *want {
            bad.push(format!("C_k for M={m}"));
        }
    }

    let phat_want: [&[i128]; 4] = [&[4], &[0, 12], &[240, 0, 24], &[0, 1680, 0, 40]];
    for (i, want) in phat_want.iter().enumerate() {
        if phat_coefficients(i + 1).map_err(|e| e.to_string())? != *want {
            bad.push(format!("parity numerator for M={}", i + 1));
        }
    }
    check(bad.is_empty(), if bad.is_empty() {
        format!("P, Q, C_k, P-hat exact for M=1..4; max root deviation {worst_root:.1e}")
    } else {
        format!("mismatches: {}", bad.join(", "))
    })
}

/// Largest state gap between two integrators over `steps` steps, relative to
/// the largest state entry of the second one over the same run.
fn lockstep_gap(a: &mut dyn Integrator, b: &mut dyn Integrator, steps: usize) -> Result<f64, String> {
    let (mut gap, mut scale) = (0.0f64, 0.0f64);
    for _ in 0..steps {
        a.advance().map_err(|e| e.to_string())?;
        b.advance().map_err(|e| e.to_string())?;
        let (av, au) = a.state();
        let (bv, bu) = b.state();
        for (x, y) in av.iter().chain(au).zip(bv.iter().chain(bu)) {
            gap = gap.max((x - y).abs());
            scale = scale.max(y.abs());
        }
    }
    Ok(gap / scale)
}

pub fn newmark_equivalence() -> Outcome {
    let steps = 10_000;
    let case = SdofCase::table(1).map_err(|e| e.to_string())?;
    let sdof = sdof_system(&case).map_err(|e| e.to_string())?;
    let mut rnd = random_system(10, true, 2024).map_err(|e| e.to_string())?;
    rnd.force = Force::Separable { load: (0..10).map(|i| 1.0 - 0.15 * i as f64).collect(), signal: Signal::f1() };
    let mut gaps = Vec::new();
    for (sys, dt) in [(&sdof, case.period() / 20.0), (&rnd, 0.05)] {
        let mut nm = Newmark::new(sys, dt).map_err(|e| e.to_string())?;
        let mut pd = make_integrator(sys, Method::Pade(1), dt, None).map_err(|e| e.to_string())?;
        gaps.push(lockstep_gap(&mut nm, pd.as_mut(), steps)?);
    }
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    check(
        worst <= 1e-12,
        format!("max relative gap over {steps} steps: SDOF {:.1e}, 10-dof {:.1e}", gaps[0], gaps[1]),
    )
}

pub fn sdof_slopes() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for case in SdofCase::all() {
        let dts: Vec<f64> = SDOF_STEPS_PER_PERIOD.iter().map(|&n| case.period() / n as f64).collect();
        let mut row = Vec::new();
        for m in 1..=4 {
            let pts = sdof_convergence(&case, Method::Pade(m), &dts, SDOF_T_END, L2Form::Root)
                .map_err(|e| e.to_string())?;
            let pairs: Vec<(f64, f64)> = pts.iter().map(|p| (p.dt, p.error)).collect();
            let fit = convergence_slope_in(&pairs, PLATEAU_PCT, FIT_CAP_PCT).map_err(|e| e.to_string())?;
            let floor = pairs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            let good = (fit.slope - 2.0 * m as f64).abs() <= 0.3 && (!fit.plateau_reached || floor <= PLATEAU_PCT);
            ok &= good;
            row.push(format!("{:.2}{}", fit.slope, if good { "" } else { "!" }));
        }
        lines.push(format!("#{} [{}]", case.id, row.join(" ")));
    }
    check(ok, format!("slopes M=1..4: {}", lines.join(" ")))
}

pub fn stability() -> Outcome {
    let w = 2.0 * PI;
    let period = 1.0;
    let mut worst_rho = 0.0f64;
    let mut worst_drift = 0.0f64;
    for m in 1..=4 {
        for ratio in [0.1, 1.0, 10.0, 100.0] {
            let dt = ratio * period;
            let rho = sdof_spectral_radius(Method::Pade(m), w, 0.0, dt).map_err(|e| e.to_string())?;
            worst_rho = worst_rho.max((rho - 1.0).abs());
            let drift = sdof_energy_drift(Method::Pade(m), w, dt, 100_000).map_err(|e| e.to_string())?;
            worst_drift = worst_drift.max(drift);
        }
    }
    check(
        worst_rho <= 1e-12 && worst_drift < 1e-9,
        format!("max |rho - 1| = {worst_rho:.1e}, max 1e5-step energy drift = {worst_drift:.1e}"),
    )
}

/// PE/AE targets over `periods` natural periods: (failed checks, report).
fn pe_ae_checks(periods: usize) -> Result<(Vec<String>, Vec<String>), String> {
    let mut bad = Vec::new();
    let mut parts = Vec::new();
    let half: Vec<_> = (1..=4)
        .map(|m| peae_point(Method::Pade(m), 0.5, periods).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    for (p, target) in half[..3].iter().zip([56.5, 7.7, 0.5]) {
        let m = match p.method {
            Method::Pade(m) => m,
            _ => unreachable!(),
        };
        parts.push(format!("PE order {} = {:.4}% (want {target}%)", 2 * m, p.pe_pct));
        if (p.pe_pct / target - 1.0).abs() > 0.2 || p.pe_partial {
            bad.push(format!("PE order {}", 2 * m));
        }
    }
    parts.push(format!("PE order 8 = {:.2e}%", half[3].pe_pct));
    if half[3].pe_pct.abs() > 1e-3 || half[3].pe_partial {
        bad.push("PE order 8".into());
    }
    parts.push(format!("AE order 8 = {:.3}%", half[3].ae_pct));
    if half[3].ae_pct > 1.0 {
        bad.push("AE order 8".into());
    }

    let ratios: Vec<f64> = (1..=10).map(|k| 0.5f64.powi(k)).collect();
    let ae = peae_sweep(&[Method::Pade(1)], &ratios, periods).map_err(|e| e.to_string())?;
    let pairs: Vec<(f64, f64)> = ae.iter().map(|p| (p.dt_over_t, p.ae_pct)).collect();
    match crossing_dt(&pairs, 1.0) {
        Some(c) => {
            parts.push(format!("order-2 AE=1% at dt = T/{:.1} (want T/85)", 1.0 / c));
            if (c * 85.0 - 1.0).abs() > 0.3 {
                bad.push("order-2 AE crossing".into());
            }
        }
        None => {
            parts.push("order-2 AE never reaches 1% on the ladder".into());
            bad.push("order-2 AE crossing".into());
        }
    }
    Ok((bad, parts))
}

pub fn pe_ae() -> Outcome {
    let (bad, parts) = pe_ae_checks(10_000)?;
    if bad.is_empty() {
        return Ok(parts.join("; "));
    }
    // Diagnostic only: the verdict above stands whatever this shows.
    let (short_bad, _) = pe_ae_checks(100)?;
    let note = if short_bad.is_empty() {
        "all targets are met over 100 periods".to_string()
    } else {
        format!("over 100 periods still failing: {}", short_bad.join(", "))
    };
    Err(format!("{}; failing: {}; note: {note}", parts.join("; "), bad.join(", ")))
}

pub fn rod_study() -> Outcome {
    let model = build_rod(80, 16).map_err(|e| e.to_string())?;
    let free = model.n_free();
    if free != 2737 || model.n_dof_total() != 2754 {
        return Err(format!("unexpected mesh size: {} total, {free} free", model.n_dof_total()));
    }
    let t_sim = 1.0;
    let dts: Vec<f64> = (0..=8).map(|k| 1e-2 * 0.5f64.powi(k)).collect();
    let ref_dt = 1e-2 * 0.5f64.powi(10);
    let reference = rod_history(&model, Method::Pade(4), ref_dt, t_sim).map_err(|e| e.to_string())?;
    let targets = [8.4e-5, 1.4e-3, 4.1e-3, 7.6e-3];
    let mut crossings = Vec::new();
    let mut ok = true;
    for m in 1..=4 {
        // Higher orders cross early; finer steps only add runtime.
        let ladder = if m == 1 { &dts[..] } else { &dts[..=7] };
        let pts = rod_convergence(&model, Method::Pade(m), ladder, t_sim, &reference, ref_dt, L2Form::Root)
            .map_err(|e| e.to_string())?;
        let pairs: Vec<(f64, f64)> = pts.iter().map(|p| (p.dt, p.error)).collect();
        let c = crossing_dt(&pairs, 1.0);
        ok &= c.is_some_and(|c| (c / targets[m - 1] - 1.0).abs() <= 0.25);
        crossings.push(c.unwrap_or(f64::NAN));
    }
    let gains: Vec<f64> = crossings[1..].iter().map(|c| c / crossings[0]).collect();
    ok &= gains.iter().zip([10.0, 30.0, 60.0]).all(|(g, min)| *g >= min);
    check(
        ok,
        format!(
            "1% crossings {} s; gains over order 2: {}",
            crossings.iter().map(|c| format!("{c:.3e}")).collect::<Vec<_>>().join(", "),
            gains.iter().map(|g| format!("{g:.1}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn oracle_system(n: usize, seed: u64, coeffs: Vec<f64>) -> Result<SecondOrderSystem, String> {
    let mut sys = random_system(n, seed.is_multiple_of(2), seed).map_err(|e| e.to_string())?;
    let load = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -0.5 }).collect();
    sys.force = Force::Separable { load, signal: Signal::Polynomial(coeffs) };
    Ok(sys)
}

/// Physical state `(u', u)` stacked, sampled every `stride` steps.
fn exact_samples(sys: &SecondOrderSystem, dt: f64, pf: usize, steps: usize, stride: usize) -> Result<Vec<Vec<f64>>, String> {
    let mut st = ExactStepper::new(sys, dt, pf).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for i in 1..=steps {
        st.advance().map_err(|e| e.to_string())?;
        if i % stride == 0 {
            let (v, u) = st.state();
            out.push(v.iter().map(|x| x / dt).chain(u.iter().copied()).collect());
        }
    }
    Ok(out)
}

/// Shortest undamped period, from the generalized eigenproblem `K x = w^2 M x`.
fn shortest_period(sys: &SecondOrderSystem) -> f64 {
    let n = sys.dim();
    let m = DMatrix::from_row_slice(n, n, &sys.m.to_dense());
    let k = DMatrix::from_row_slice(n, n, &sys.k.to_dense());
    let l = m.cholesky().expect("mass matrix is SPD").l();
    let li = l.try_inverse().expect("Cholesky factor is invertible");
    let sym = &li * k * li.transpose();
    let w2 = sym.symmetric_eigenvalues().max();
    2.0 * PI / w2.sqrt()
}

pub fn exact_oracle() -> Outcome {
    let t_end = 4.0;
    let mut worst_indep = 0.0f64;
    for (n, seed) in [(1, 3), (2, 4), (3, 5), (4, 6), (5, 7), (6, 8)] {
        let sys = oracle_system(n, seed, vec![0.4, -1.0, 0.3, 0.05])?;
        let coarse = exact_samples(&sys, 0.4, 3, 10, 1)?;
        let fine = exact_samples(&sys, 0.05, 3, 80, 8)?;
        let scale = fine.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        for (a, b) in coarse.iter().zip(&fine) {
            for (x, y) in a.iter().zip(b) {
                worst_indep = worst_indep.max((x - y).abs() / scale);
            }
        }
    }

    // Quadratic loads are captured exactly by p_f = 2 for every order.
    let mut slopes = Vec::new();
    let mut slopes_ok = true;
    for (n, seed) in [(3, 11), (6, 12)] {
        let sys = oracle_system(n, seed, vec![1.0, 0.5, -0.2])?;
        let t_min = shortest_period(&sys);
        let dts: Vec<f64> = (0..16).map(|k| t_min / 4.0 * 0.5f64.sqrt().powi(k)).collect();
        let mut row = Vec::new();
        for m in 1..=4 {
            let mut pairs = Vec::new();
            for &dt in &dts {
                let steps = step_count(t_end, dt);
                let mut ex = ExactStepper::new(&sys, dt, 2).map_err(|e| e.to_string())?;
                let want = displacement_series(&mut ex, steps, 0).map_err(|e| e.to_string())?;
                let mut pd = make_integrator(&sys, Method::Pade(m), dt, Some(2)).map_err(|e| e.to_string())?;
                let got = displacement_series(pd.as_mut(), steps, 0).map_err(|e| e.to_string())?;
                pairs.push((dt, metrics::l2_error(&got, &want).map_err(|e| e.to_string())?));
            }
            let fit = convergence_slope_in(&pairs, PLATEAU_PCT, FIT_CAP_PCT).map_err(|e| e.to_string())?;
            slopes_ok &= (fit.slope - 2.0 * m as f64).abs() <= 0.3;
            row.push(format!("{:.2}", fit.slope));
        }
        slopes.push(format!("n={n} [{}]", row.join(" ")));
    }
    check(
        worst_indep <= 1e-10 && slopes_ok,
        format!("step-size independence {worst_indep:.1e}; Pade slopes M=1..4 {}", slopes.join(" ")),
    )
}

pub fn signal_fmax() -> Outcome {
    let (fs, t_sim) = (8000.0, 1.0);
    let n = (fs * t_sim) as usize;
    let n_fft = 8 * n;
    let bin = fs / n_fft as f64;
    let mut got = Vec::new();
    let mut ok = true;
    for (sig, want) in [(Signal::sine_burst(), 74.125), (Signal::ricker(), 34.54)] {
        let x: Vec<f64> = (0..n).map(|i| sig.eval(i as f64 / fs)).collect();
        let f = fmax_from_spectrum(&x, fs, n_fft, 0.01).map_err(|e| e.to_string())?;
        ok &= (f - want).abs() <= bin;
        got.push(format!("{f} Hz (want {want})"));
    }
    check(ok, format!("{}; bin {bin} Hz", got.join(", ")))
}

pub fn timing() -> Outcome {
    let model = build_rod(80, 16).map_err(|e| e.to_string())?;
    let per_step: Vec<f64> = (1..=4)
        .map(|m| time_method(&model.sys, Method::Pade(m), 1e-4, 200, 7).map(|t| t.per_step_s))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let rel: Vec<f64> = per_step.iter().map(|t| t / per_step[0]).collect();
    let monotone = per_step.windows(2).all(|w| w[1] >= w[0]);
    check(
        monotone && rel.iter().all(|r| *r <= 8.0),
        format!(
            "per-step cost relative to M=1: {} (M=1 {:.3} ms)",
            rel.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(", "),
            per_step[0] * 1e3
        ),
    )
}

/// Criteria in order, numbered from 1.
pub const CRITERIA: [(&str, fn() -> Outcome); 9] = [
    ("scheme tables", scheme_tables),
    ("Newmark equivalence", newmark_equivalence),
    ("SDOF convergence slopes", sdof_slopes),
    ("unconditional stability", stability),
    ("period elongation and amplitude error", pe_ae),
    ("rod convergence", rod_study),
    ("exact-propagator oracle", exact_oracle),
    ("signal fmax", signal_fmax),
    ("timing properties", timing),
];
