use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use padestep::baselines::ExactStepper;
use padestep::linalg::Factorization;
use padestep::models::*;
use padestep::stepper::Integrator;

fn dense(a: &padestep::linalg::SparseRealMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.dim(), a.dim(), &a.to_dense())
}

#[test]
fn sdof_table_rows() {
    let s1 = sdof_system(&SdofCase::table(1).unwrap()).unwrap();
    assert_eq!((s1.m.get(0, 0), s1.c.get(0, 0), s1.u0[0], s1.v0[0]), (1.0, 0.0, 1.0, 0.0));
    assert!((s1.k.get(0, 0) - 4.0 * PI * PI).abs() <= 1e-12);
    let s3 = sdof_system(&SdofCase::table(3).unwrap()).unwrap();
    assert!((s3.c.get(0, 0) - 0.2 * PI).abs() <= 1e-15);
    let c5 = SdofCase::table(5).unwrap();
    assert_eq!(c5.load, SdofLoad::F1);
    assert_eq!((c5.u0, c5.v0), (2.0, PI / 3.0));
    assert!(SdofCase::table(7).is_err());
    assert_eq!(SdofCase::all().len(), 6);
}

#[test]
fn analytic_values_at_known_instants() {
    let c1 = SdofCase::table(1).unwrap();
    assert_eq!(sdof_analytic(&c1, 0.0), (1.0, 0.0));
    let c2 = SdofCase::table(2).unwrap();
    let (u, v) = sdof_analytic(&c2, 0.25);
    assert!((u - 1.0).abs() <= 1e-15 && v.abs() <= 1e-14);
    assert!((sdof_analytic(&SdofCase::table(5).unwrap(), 0.0).0 - 2.0).abs() <= 1e-15);
    assert_eq!(sdof_case6_reference(0.0).0, 2.0);
}

#[test]
fn analytic_solutions_satisfy_the_ode() {
    let h = 1e-5;
    for case in SdofCase::all() {
        let sig = case.signal();
        let (w, z) = (case.omega, case.zeta);
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 1..400 {
            let t = i as f64 * 0.0123;
            if case.id == 6 && [0.25, 0.75, 1.0].iter().any(|k| (t - k).abs() < 2.0 * h) {
                continue;
            }
            let (u, v) = sdof_analytic(&case, t);
            let acc = (sdof_analytic(&case, t + h).1 - sdof_analytic(&case, t - h).1) / (2.0 * h);
            let p = sig.as_ref().map_or(0.0, |s| s.eval(t));
            worst = worst.max((acc + 2.0 * z * w * v + w * w * u - p).abs());
            scale = scale.max(p.abs()).max(w * w * u.abs());
        }
        assert!(worst <= 1e-6 * scale, "case {}: residual {worst}", case.id);
    }
}

#[test]
fn case6_is_smooth_across_the_kinks_and_free_afterwards() {
    for k in [0.25, 0.75, 1.0] {
        let (a, b) = (sdof_case6_reference(k - 1e-13), sdof_case6_reference(k + 1e-13));
        assert!((a.0 - b.0).abs() <= 1e-10 && (a.1 - b.1).abs() <= 1e-10);
    }
    // For t > 1 the motion is A cos(wt) + B sin(wt).
    let w = 2.0 * PI;
    let ts: Vec<f64> = (0..200).map(|i| 1.0 + i as f64 * 0.01).collect();
    let x = DMatrix::from_fn(ts.len(), 2, |i, j| if j == 0 { (w * ts[i]).cos() } else { (w * ts[i]).sin() });
    let y = DVector::from_iterator(ts.len(), ts.iter().map(|&t| sdof_case6_reference(t).0));
    let coef = x.clone().svd(true, true).solve(&y, 1e-14).unwrap();
    assert!((x * coef - y).amax() <= 1e-9);
}

#[test]
fn case6_agrees_with_exact_stepping_on_aligned_steps() {
    let case = SdofCase::table(6).unwrap();
    let sys = sdof_system(&case).unwrap();
    let dt = 1e-3;
    let mut ex = ExactStepper::new(&sys, dt, 1).unwrap();
    for n in 1..=1500 {
        ex.advance().unwrap();
        let want = sdof_case6_reference(n as f64 * dt).0;
        assert!((ex.state().1[0] - want).abs() <= 1e-10, "step {n}");
    }
}

#[test]
fn random_systems_are_reproducible_and_spd() {
    let a = random_system(6, true, 99).unwrap();
    let b = random_system(6, true, 99).unwrap();
    assert_eq!(a.m.triplets(), b.m.triplets());
    assert_eq!(a.u0, b.u0);
    for m in [&a.m, &a.k] {
        let e = SymmetricEigen::new(dense(m)).eigenvalues;
        assert!(e.min() > 0.0);
    }
    assert!(random_system(0, false, 1).is_err());
}

#[test]
fn element_has_three_rigid_modes_and_correct_mass() {
    let nodes = [[0.0, 0.0], [0.3, 0.0], [0.35, 0.25], [0.0, 0.2]];
    for nu in [0.0, 0.3] {
        let mat = Material { e: 70.0, nu, rho: 2.5, plane: Plane::Stress, thickness: 1.0 };
        let el = quad_element(nodes, &mat);
        let k = DMatrix::from_row_slice(8, 8, &el.stiffness);
        assert!((&k - k.transpose()).amax() <= 1e-12 * k.amax());
        let ev = SymmetricEigen::new(k.clone()).eigenvalues;
        let top = ev.amax();
        let zeros = ev.iter().filter(|v| v.abs() <= 1e-9 * top).count();
        assert_eq!(zeros, 3, "nu = {nu}: {ev}");
        assert!(ev.min() >= -1e-9 * top);
        let m = DMatrix::from_row_slice(8, 8, &el.mass);
        assert!(SymmetricEigen::new(m.clone()).eigenvalues.min() > 0.0);
        // Area of the quad by the shoelace formula.
        let area = 0.5
            * (0..4)
                .map(|i| nodes[i][0] * nodes[(i + 1) % 4][1] - nodes[(i + 1) % 4][0] * nodes[i][1])
                .sum::<f64>();
        for dir in 0..2 {
            let s: f64 = (0..4).flat_map(|a| (0..4).map(move |b| (a, b))).map(|(a, b)| m[(2 * a + dir, 2 * b + dir)]).sum();
            assert!((s - mat.rho * area).abs() <= 1e-12);
        }
    }
}

#[test]
fn patch_test_uniform_axial_strain() {
    let mat = RodModel::material();
    let h = 0.1;
    let el = quad_element([[0.0, 0.0], [h, 0.0], [h, h], [0.0, h]], &mat);
    let eps = 1e-3;
    let u: Vec<f64> = el.nodes.iter().flat_map(|p| [eps * p[0], 0.0]).collect();
    let k = DMatrix::from_row_slice(8, 8, &el.stiffness);
    let f = k * DVector::from_vec(u);
    // Constant stress E eps on the right edge, split between its two nodes.
    let half = 0.5 * mat.e * eps * h;
    let want = [-half, 0.0, half, 0.0, half, 0.0, -half, 0.0];
    for (a, b) in f.iter().zip(want) {
        assert!((a - b).abs() <= 1e-10 * half);
    }
}

#[test]
fn rod_dof_counts_and_mesh_checks() {
    let fe = build_rod(10, 2).unwrap();
    assert_eq!(fe.n_dof_total(), 66);
    assert_eq!(fe.n_free(), 63);
    assert!(build_rod(10, 3).is_err());
    let (dof, at) = fe.nearest_dof(ROD_OBSERVATION[0], ROD_OBSERVATION[1], 0).unwrap();
    assert_eq!(at, [0.5, 0.1]);
    assert_eq!(fe.free_index[2 * fe.node(5, 1)], Some(dof));
    assert!(fe.nearest_dof(0.0, 0.1, 0).is_err());
    let load: f64 = match &fe.sys.force {
        padestep::Force::Separable { load, .. } => load.iter().sum(),
        _ => panic!("rod must be loaded"),
    };
    assert!((load - 1.0).abs() <= 1e-14);
}

#[test]
fn fine_rod_has_2754_dofs() {
    let fe = build_rod(80, 16).unwrap();
    assert_eq!(fe.n_dof_total(), 2754);
    assert_eq!(fe.n_free(), 2754 - 17);
}

#[test]
fn uniform_vertical_translation_is_stress_free() {
    let fe = build_rod(10, 2).unwrap();
    let mut u = vec![0.0; fe.n_free()];
    for node in 0..fe.nodes.len() {
        if let Some(i) = fe.free_index[2 * node + 1] {
            u[i] = 1.0;
        }
    }
    let f = fe.sys.k.spmv(&u).unwrap();
    assert!(f.iter().all(|v| v.abs() <= 1e-9));
}

#[test]
fn static_tip_displacement_matches_bar_theory() {
    // F L / (E A) with a unit resultant.
    let want = 1.0 * ROD_LENGTH / (RodModel::material().e * ROD_HEIGHT);
    for (nx, ny) in [(40, 8), (80, 16)] {
        let mut rod = RodModel::new(nx, ny).unwrap();
        rod.anchor_y = true;
        let fe = rod.build().unwrap();
        let load = rod.edge_load();
        let f: Vec<f64> = (0..load.len()).filter_map(|g| fe.free_index[g].map(|_| load[g])).collect();
        let u = Factorization::new(&fe.sys.k).unwrap().solve(&f).unwrap();
        let (tip, _) = fe.nearest_dof(ROD_LENGTH, 0.5 * ROD_HEIGHT, 0).unwrap();
        assert!(((u[tip] - want) / want).abs() <= 0.01, "{nx}x{ny}: {} vs {want}", u[tip]);
    }
}

/// Axial frequencies of a rod mesh (Hz), ascending, picked by the share of
/// kinetic energy in horizontal motion.
fn axial_frequencies(nx: usize, ny: usize, count: usize) -> Vec<f64> {
    let fe = build_rod(nx, ny).unwrap();
    let m = dense(&fe.sys.m);
    let k = dense(&fe.sys.k);
    let l = m.clone().cholesky().unwrap();
    let linv = l.l().try_inverse().unwrap();
    let eig = SymmetricEigen::new(&linv * k * linv.transpose());
    let mut is_x = vec![false; fe.n_free()];
    for node in 0..fe.nodes.len() {
        if let Some(i) = fe.free_index[2 * node] {
            is_x[i] = true;
        }
    }
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    for j in order {
        let phi = linv.transpose() * eig.eigenvectors.column(j);
        let mphi = &m * &phi;
        let total: f64 = phi.dot(&mphi);
        let x_share: f64 = (0..phi.len()).filter(|&i| is_x[i]).map(|i| phi[i] * mphi[i]).sum::<f64>() / total;
        if x_share > 0.9 && eig.eigenvalues[j] > 1e-6 {
            out.push(eig.eigenvalues[j].sqrt() / (2.0 * PI));
            if out.len() == count {
                break;
            }
        }
    }
    out
}

#[test]
fn rod_axial_frequencies() {
    let bar = |k: usize| (2 * k - 1) as f64 * ROD_WAVE_SPEED / (4.0 * ROD_LENGTH);
    let coarse = axial_frequencies(10, 2, 3);
    for k in 1..=2 {
        let rel = coarse[k - 1] / bar(k) - 1.0;
        assert!(rel.abs() <= 0.02, "mode {k}: {rel}");
    }
    // Consistent-mass bilinear elements overestimate by about (kh)^2 / 24,
    // 2.57 % for the third mode at h = 0.1.
    let kh = 5.0 * PI / 2.0 * 0.1;
    let rel3 = coarse[2] / bar(3) - 1.0;
    assert!((rel3 - kh * kh / 24.0).abs() <= 0.005, "mode 3: {rel3}");
    let fine = axial_frequencies(20, 4, 3);
    for k in 1..=3 {
        assert!((fine[k - 1] / bar(k) - 1.0).abs() <= 0.02);
    }
}

#[test]
fn cfl_examples() {
    assert!((cfl_number(10.0, 0.01, 0.1) - 1.0).abs() <= 1e-15);
    assert!((cfl_number(10.0, 1.5625e-4, 0.1) - 0.015625).abs() <= 1e-15);
    assert_eq!(cfl_number(10.0, 0.01, f64::INFINITY), 0.0);
}

#[test]
fn reduced_half_space_builds() {
    let fe = build_lamb_reduced(8).unwrap();
    assert!(fe.sys.k.is_symmetric(1e-6 * fe.sys.k.max_abs()));
    assert!(fe.nearest_dof(0.0, fe.ly, 1).is_ok());
    assert!(build_lamb_reduced(0).is_err());
}
