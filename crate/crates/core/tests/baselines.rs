use nalgebra::{DMatrix, DVector};

use padestep::baselines::*;
use padestep::forcing::{fit_force, Signal};
use padestep::linalg::SparseMatrix;
use padestep::models::{random_system, sdof_system, SdofCase};
use padestep::stepper::{displacement_series, Integrator, PadeStepper, StateBlockPair};
use padestep::system::{state_from_ic, Force, SecondOrderSystem};
use padestep::PadeScheme;

#[test]
fn exponential_matches_closed_form_rotation() {
    let case = SdofCase::table(1).unwrap();
    let sys = sdof_system(&case).unwrap();
    let dt = 0.13;
    let p = exact_propagator(&sys, dt, 1).unwrap();
    let w = case.omega;
    let (s, c) = (w * dt).sin_cos();
    // Scaled state [dt u'; u]: the velocity row carries an extra dt.
    let want = DMatrix::from_row_slice(2, 2, &[c, -w * dt * s, s / (w * dt), c]);
    assert!((&p.expa - want).amax() <= 1e-12);
}

#[test]
fn b0_satisfies_its_defining_identity() {
    let sys = random_system(3, true, 4).unwrap();
    let p = exact_propagator(&sys, 0.2, 3).unwrap();
    let id = DMatrix::<f64>::identity(6, 6);
    assert!((&p.a * &p.b[0] - (&p.expa - id)).amax() <= 1e-10);
}

#[test]
fn b0_is_identity_for_vanishing_operator() {
    // K = C = 0 makes A nilpotent; then B_0 = I + A/2.
    let sys = SecondOrderSystem::new(
        SparseMatrix::identity(1),
        SparseMatrix::zeros(1),
        SparseMatrix::zeros(1),
        Force::None,
        vec![0.0],
        vec![0.0],
    )
    .unwrap();
    let p = exact_propagator(&sys, 1.0, 2).unwrap();
    let want = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.5, 1.0]);
    assert!((&p.b[0] - want).amax() <= 1e-14);
    // B_k for k >= 1 are the moments of (s - 1/2)^k.
    assert!((p.b[1][(0, 0)]).abs() <= 1e-14);
    assert!((p.b[2][(0, 0)] - 1.0 / 12.0).abs() <= 1e-14);
}

#[test]
fn recurrence_agrees_with_augmented_exponential() {
    let sys = random_system(2, true, 9).unwrap();
    let p = exact_propagator(&sys, 0.8, 4).unwrap();
    let rec = b_matrices_recurrence(&p.a, &p.expa, 4).unwrap();
    for (k, (a, b)) in rec.iter().zip(&p.b).enumerate() {
        assert!((a - b).amax() <= 1e-9 * b.amax().max(1.0), "B_{k}");
    }
}

#[test]
fn exact_stepping_is_step_size_independent() {
    // Damped 2-dof system under a cubic load, p_f = 3 captures it exactly.
    let mut sys = random_system(2, true, 12).unwrap();
    sys.force = Force::Separable { load: vec![1.0, -0.5], signal: Signal::Polynomial(vec![0.3, -1.0, 0.4, 0.2]) };
    let t_end = 2.0;
    let final_state = |n: usize| {
        let mut st = ExactStepper::new(&sys, t_end / n as f64, 3).unwrap();
        for _ in 0..n {
            st.advance().unwrap();
        }
        let (v, u) = st.state();
        let dt = st.dt();
        let mut z: Vec<f64> = v.iter().map(|x| x / dt).collect();
        z.extend_from_slice(u);
        DVector::from_vec(z)
    };
    let (a, b) = (final_state(10), final_state(100));
    assert!((&a - &b).amax() <= 1e-11 * b.amax());
}

#[test]
fn exact_step_rejects_excess_force_order() {
    let sys = random_system(2, false, 1).unwrap();
    let p = exact_propagator(&sys, 0.1, 1).unwrap();
    let fp = fit_force(&sys, 0.0, 0.1, 3, 1).unwrap();
    let z = StateBlockPair::zeros(2);
    assert!(p.exact_step(&z, Some(&fp)).is_err());
    assert!(exact_propagator(&random_system(65, false, 1).unwrap(), 0.1, 1).is_err());
}

#[test]
fn newmark_at_rest_stays_at_rest() {
    let mut sys = random_system(3, false, 2).unwrap();
    sys.u0 = vec![0.0; 3];
    sys.v0 = vec![0.0; 3];
    let mut nm = Newmark::new(&sys, 0.1).unwrap();
    for _ in 0..10 {
        nm.advance().unwrap();
    }
    assert!(nm.state.u.iter().chain(&nm.state.ud).all(|v| *v == 0.0));
}

#[test]
fn newmark_lengthens_the_period() {
    let case = SdofCase::table(1).unwrap();
    let sys = sdof_system(&case).unwrap();
    let dt = case.period() / 20.0;
    let mut nm = Newmark::new(&sys, dt).unwrap();
    let u = displacement_series(&mut nm, 20, 0).unwrap();
    // Exact solution returns to 1 at t = T; the lagging numerical one is
    // still rising, so its last sample is below its neighbour's peak.
    assert!(u[20] < 1.0);
    assert!(u[19] < u[20]);
}

#[test]
fn newmark_acceleration_is_consistent() {
    let mut sys = random_system(4, true, 3).unwrap();
    sys.force = Force::Separable { load: vec![1.0, 0.0, 2.0, -1.0], signal: Signal::f1() };
    let dt = 0.05;
    let mut nm = Newmark::new(&sys, dt).unwrap();
    for _ in 0..30 {
        nm.advance().unwrap();
    }
    // M udd + dt C ud + dt^2 K u = dt^2 f in step-local time.
    let t = 30.0 * dt;
    let s = &nm.state;
    let f = sys.eval_force(t);
    let mu = sys.m.spmv(&s.udd).unwrap();
    let cu = sys.c.spmv(&s.ud).unwrap();
    let ku = sys.k.spmv(&s.u).unwrap();
    for i in 0..4 {
        let r = mu[i] + dt * cu[i] + dt * dt * ku[i] - dt * dt * f[i];
        assert!(r.abs() <= 1e-10 * (dt * dt * f[i]).abs().max(mu[i].abs()).max(1e-3));
    }
}

#[test]
fn newmark_matches_pade_one_on_forced_system() {
    let mut sys = random_system(10, true, 17).unwrap();
    sys.force = Force::Separable { load: (0..10).map(|i| i as f64 * 0.1).collect(), signal: Signal::Polynomial(vec![1.0, 0.5]) };
    let dt = 0.03;
    let mut nm = Newmark::new(&sys, dt).unwrap();
    let mut pd = PadeStepper::new(&sys, PadeScheme::new(1, 1).unwrap(), dt).unwrap();
    for _ in 0..500 {
        nm.advance().unwrap();
        pd.advance().unwrap();
        let (a, b) = (nm.state().1, pd.state().1);
        let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= 1e-12 * scale);
        }
    }
}

#[test]
fn exact_stepper_tracks_closed_form_sdof() {
    let case = SdofCase::table(3).unwrap();
    let sys = sdof_system(&case).unwrap();
    let dt = 0.37;
    let mut ex = ExactStepper::new(&sys, dt, 1).unwrap();
    for n in 1..=50 {
        ex.advance().unwrap();
        let want = padestep::models::sdof_analytic(&case, n as f64 * dt).0;
        assert!((ex.state().1[0] - want).abs() <= 1e-12);
    }
    let z = state_from_ic(&sys, dt).unwrap();
    assert_eq!(z.u, vec![1.0]);
}
