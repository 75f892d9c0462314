use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use proptest::prelude::*;

use padestep::linalg::*;
use padestep::models::build_rod;

fn random_sparse(n: usize, seed: u64, diag: f64) -> SparseRealMatrix {
    // Banded-plus-scatter pattern with a dominant diagonal.
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, diag + next().abs()));
        for j in [i + 1, i + 3, (i * 7 + 5) % n] {
            if j < n && j != i {
                t.push((i, j, next()));
            }
        }
    }
    SparseMatrix::from_triplets(n, &t).unwrap()
}

fn dense_of(a: &SparseRealMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.dim(), a.dim(), &a.to_dense())
}

#[test]
fn triplets_sum_duplicates_and_reject_out_of_range() {
    let a = SparseMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.5), (1, 0, -1.0)]).unwrap();
    assert_eq!(a.get(0, 0), 3.5);
    assert_eq!(a.get(1, 0), -1.0);
    assert_eq!(a.get(0, 1), 0.0);
    assert!(SparseMatrix::from_triplets(2, &[(2, 0, 1.0)]).is_err());
}

#[test]
fn spmv_matches_dense_product() {
    let a = random_sparse(40, 3, 4.0);
    let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
    let y = a.spmv(&x).unwrap();
    let want = dense_of(&a) * DVector::from_vec(x);
    for (yi, wi) in y.iter().zip(want.iter()) {
        assert!((yi - wi).abs() <= 1e-13 * (1.0 + wi.abs()));
    }
    assert!(a.spmv(&[1.0]).is_err());
}

#[test]
fn dense_and_band_solves_have_small_residuals() {
    for n in [5, 64, 150] {
        let a = random_sparse(n, n as u64, 6.0);
        let b: Vec<f64> = (0..n).map(|i| 1.0 + (i % 5) as f64).collect();
        for method in [Method::Dense, Method::Band] {
            let f = Factorization::with_method(&a, method).unwrap();
            let x = f.solve(&b).unwrap();
            let r = a.spmv(&x).unwrap();
            let res = r.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            assert!(res <= 1e-11, "n = {n}, {method:?}: residual {res}");
        }
    }
}

#[test]
fn band_solve_agrees_with_nalgebra_on_rod_stiffness() {
    let fe = build_rod(10, 2).unwrap();
    let a = SparseMatrix::combine(&[(1.0, &fe.sys.m), (1e-3, &fe.sys.k)]).unwrap();
    let b: Vec<f64> = (0..a.dim()).map(|i| (i as f64).cos()).collect();
    let x = Factorization::with_method(&a, Method::Band).unwrap().solve(&b).unwrap();
    let want = dense_of(&a).lu().solve(&DVector::from_vec(b)).unwrap();
    let err = x.iter().zip(want.iter()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-10 * want.amax());
}

#[test]
fn complex_effective_matrix_solves() {
    let fe = build_rod(10, 2).unwrap();
    let r = Complex64::new(3.0, 3f64.sqrt());
    let dt = 1e-3;
    let EffectiveMatrix::Complex(a) = assemble_effective(&fe.sys.m, &fe.sys.c, &fe.sys.k, r, dt).unwrap() else {
        panic!("complex shift must give a complex matrix");
    };
    let b: Vec<Complex64> = (0..a.dim()).map(|i| Complex64::new(i as f64, 1.0)).collect();
    for method in [Method::Dense, Method::Band] {
        let x = Factorization::with_method(&a, method).unwrap().solve(&b).unwrap();
        let ax = a.spmv(&x).unwrap();
        let res = ax.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(res <= 1e-9, "{method:?}: {res}");
    }
}

#[test]
fn real_shift_gives_real_effective_matrix() {
    let m = SparseMatrix::identity(3);
    let k = SparseMatrix::identity(3).scaled(4.0);
    let c = SparseMatrix::zeros(3);
    let e = assemble_effective(&m, &c, &k, Complex64::new(2.0, 0.0), 0.5).unwrap();
    let EffectiveMatrix::Real(a) = e else { panic!("expected real") };
    assert_eq!(a.get(1, 1), 4.0 + 0.25 * 4.0);
    assert!(assemble_effective(&m, &c, &k, Complex64::new(2.0, 0.0), 0.0).is_err());
}

#[test]
fn singular_matrix_is_reported() {
    let a = SparseMatrix::from_triplets(3, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
    assert!(Factorization::with_method(&a, Method::Dense).is_err());
    assert!(Factorization::with_method(&a, Method::Band).is_err());
}

#[test]
fn reordering_keeps_the_band_narrow() {
    let fe = build_rod(20, 4).unwrap();
    let lu = BandLu::new(&fe.sys.k).unwrap();
    let (kl, ku) = lu.bandwidths();
    // Node numbering runs column by column, 2 (ny + 1) dofs per column.
    assert!(kl <= 2 * 6 + 3 && ku <= 2 * 6 + 3, "band ({kl}, {ku})");
}

#[test]
fn rcm_returns_a_permutation() {
    let adj = vec![vec![1, 4], vec![0, 2], vec![1, 3], vec![2], vec![0]];
    let mut p = reverse_cuthill_mckee(&adj);
    p.sort_unstable();
    assert_eq!(p, vec![0, 1, 2, 3, 4]);
}

#[test]
fn matrix_market_roundtrip_is_exact() {
    let a = random_sparse(12, 9, 2.0);
    let mut buf = Vec::new();
    write_matrix_market(&a, &mut buf).unwrap();
    let b = read_matrix_market(buf.as_slice()).unwrap();
    assert_eq!(a.triplets(), b.triplets());
}

#[test]
fn matrix_market_symmetric_storage_is_expanded() {
    let text = "%%MatrixMarket matrix coordinate real symmetric\n% c\n2 2 2\n1 1 4.0\n2 1 -1.5\n";
    let a = read_matrix_market(text.as_bytes()).unwrap();
    assert_eq!(a.get(0, 1), -1.5);
    assert_eq!(a.get(1, 0), -1.5);
    assert!(read_matrix_market("not a header\n".as_bytes()).is_err());
}

#[test]
fn symmetry_check() {
    let fe = build_rod(10, 2).unwrap();
    assert!(fe.sys.k.is_symmetric(1e-12));
    assert!(fe.sys.m.is_symmetric(1e-12));
    let a = SparseMatrix::from_triplets(2, &[(0, 1, 1.0)]).unwrap();
    assert!(!a.is_symmetric(1e-12));
}

proptest! {
    #[test]
    fn solves_invert_spmv(n in 2usize..90, seed in 0u64..1000) {
        let a = random_sparse(n, seed, 5.0);
        let x: Vec<f64> = (0..n).map(|i| ((i as u64 + seed) % 7) as f64 - 3.0).collect();
        let b = a.spmv(&x).unwrap();
        let got = Factorization::new(&a).unwrap().solve(&b).unwrap();
        let err = got.iter().zip(&x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-10);
    }

    #[test]
    fn combine_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let m = random_sparse(10, 1, 1.0);
        let k = random_sparse(10, 2, 1.0);
        let s: SparseRealMatrix = SparseMatrix::combine(&[(a, &m), (b, &k)]).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let want = a * m.get(i, j) + b * k.get(i, j);
                prop_assert!((s.get(i, j) - want).abs() <= 1e-14 * (1.0 + want.abs()));
            }
        }
    }
}
