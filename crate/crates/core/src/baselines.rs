//! Reference integrators: Newmark's trapezoidal rule and the dense exact
//! propagator built from the matrix exponential.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forcing::{ForceFitter, ForcePolynomial};
use crate::linalg::{Factorization, SparseMatrix, SparseRealMatrix};
use crate::stepper::{Integrator, StateBlockPair};
use crate::system::{state_from_ic, SecondOrderSystem};

/// Newmark state in step-local time: `ud = dt u'`, `udd = dt^2 u''`.
#[derive(Debug, Clone, PartialEq)]
pub struct NewmarkState {
    pub u: Vec<f64>,
    pub ud: Vec<f64>,
    pub udd: Vec<f64>,
    pub dt: f64,
}

/// Constant average acceleration (`gamma = 1/2`, `beta = 1/4`).
pub struct Newmark {
    sys: SecondOrderSystem,
    eff: Factorization<f64>,
    pub state: NewmarkState,
    step: usize,
    f: Vec<f64>,
    tmp: Vec<f64>,
    rhs: Vec<f64>,
}

impl Newmark {
    pub fn new(sys: &SecondOrderSystem, dt: f64) -> Result<Self> {
        let z = state_from_ic(sys, dt)?;
        let n = sys.dim();
        let eff_m: SparseRealMatrix =
            SparseMatrix::combine(&[(1.0, &sys.m), (0.5 * dt, &sys.c), (0.25 * dt * dt, &sys.k)])?;
        let eff = Factorization::new(&eff_m)?;
        let mass = Factorization::new(&sys.m)?;
        // Initial acceleration from the equation of motion.
        let f0 = sys.eval_force(0.0);
        let ku = sys.k.spmv(&z.u)?;
        let cv = sys.c.spmv(&z.v)?;
        let mut udd: Vec<f64> = (0..n).map(|i| dt * dt * (f0[i] - ku[i]) - dt * cv[i]).collect();
        mass.solve_in_place(&mut udd);
        Ok(Self {
            sys: sys.clone(),
            eff,
            state: NewmarkState { u: z.u, ud: z.v, udd, dt },
            step: 0,
            f: vec![0.0; n],
            tmp: vec![0.0; n],
            rhs: vec![0.0; n],
        })
    }

    /// One step with the load `f_n` at the end of the step.
    pub fn newmark_step(&mut self, f_n: &[f64]) -> Result<()> {
        let n = self.sys.dim();
        if f_n.len() != n {
            return Err(Error::Dimension(format!("load of {} for n = {n}", f_n.len())));
        }
        let s = &mut self.state;
        let dt = s.dt;
        for i in 0..n {
            self.tmp[i] = s.ud[i] + 0.5 * s.udd[i];
        }
        self.sys.c.spmv_into(&self.tmp, &mut self.rhs);
        for i in 0..n {
            self.rhs[i] = dt * dt * f_n[i] - dt * self.rhs[i];
            self.tmp[i] = s.u[i] + s.ud[i] + 0.25 * s.udd[i];
        }
        let mut ku = std::mem::take(&mut self.f);
        self.sys.k.spmv_into(&self.tmp, &mut ku);
        for i in 0..n {
            self.rhs[i] -= dt * dt * ku[i];
        }
        self.f = ku;
        self.eff.solve_in_place(&mut self.rhs);
        for i in 0..n {
            let a_new = self.rhs[i];
            s.u[i] += s.ud[i] + 0.25 * (s.udd[i] + a_new);
            s.ud[i] += 0.5 * (s.udd[i] + a_new);
            s.udd[i] = a_new;
        }
        self.step += 1;
        if !s.u.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite state at step {}", self.step)));
        }
        Ok(())
    }
}

impl Integrator for Newmark {
    fn name(&self) -> String {
        "newmark".into()
    }

    fn dt(&self) -> f64 {
        self.state.dt
    }

    fn steps_taken(&self) -> usize {
        self.step
    }

    fn state(&self) -> (&[f64], &[f64]) {
        (&self.state.ud, &self.state.u)
    }

    fn advance(&mut self) -> Result<()> {
        let t = (self.step + 1) as f64 * self.state.dt;
        let f = self.sys.eval_force(t);
        self.newmark_step(&f)
    }
}

/// Largest system accepted by the dense oracle.
pub const EXACT_MAX_DOF: usize = 64;

fn dense(m: &SparseRealMatrix) -> DMatrix<f64> {
    let n = m.dim();
    DMatrix::from_row_slice(n, n, &m.to_dense())
}

/// Explicit `A = [[-dt M^{-1} C, -dt^2 M^{-1} K], [I, 0]]`.
pub fn dense_a(sys: &SecondOrderSystem, dt: f64) -> Result<DMatrix<f64>> {
    let n = sys.dim();
    let minv = dense(&sys.m)
        .try_inverse()
        .ok_or_else(|| Error::Singular("mass matrix".into()))?;
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    a.view_mut((0, 0), (n, n)).copy_from(&(&minv * dense(&sys.c) * (-dt)));
    a.view_mut((0, n), (n, n)).copy_from(&(&minv * dense(&sys.k) * (-dt * dt)));
    a.view_mut((n, 0), (n, n)).fill_with_identity();
    Ok(a)
}

/// Dense `e^A` and `B_k = int_0^1 e^{A(1-s)} (s - 1/2)^k ds` for `k = 0..=p_f`.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    pub dt: f64,
    pub pf: usize,
    pub a: DMatrix<f64>,
    pub expa: DMatrix<f64>,
    pub b: Vec<DMatrix<f64>>,
    /// `B_k [dt^2 M^{-1}; 0]`, mapping force coefficients to state increments.
    force_maps: Vec<DMatrix<f64>>,
}

/// `phi_j(A) = int_0^1 e^{A(1-s)} s^{j-1}/(j-1)! ds` for `j = 0..=p`, read off
/// the exponential of an augmented block matrix.
pub fn phi_functions(a: &DMatrix<f64>, p: usize) -> Vec<DMatrix<f64>> {
    let m = a.nrows();
    let blocks = p + 1;
    let mut w = DMatrix::zeros(m * blocks, m * blocks);
    w.view_mut((0, 0), (m, m)).copy_from(a);
    for b in 0..blocks - 1 {
        w.view_mut((b * m, (b + 1) * m), (m, m)).fill_with_identity();
    }
    let e = w.exp();
    (0..blocks).map(|b| e.view((0, b * m), (m, m)).into_owned()).collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `B_k` via the recurrence `B_k = A^{-1}(k B_{k-1} + (-1/2)^k (e^A - (-1)^k I))`;
/// requires `A` nonsingular and loses accuracy for small `||A||`.
pub fn b_matrices_recurrence(a: &DMatrix<f64>, expa: &DMatrix<f64>, pf: usize) -> Result<Vec<DMatrix<f64>>> {
    let m = a.nrows();
    let lu = a.clone().lu();
    let id = DMatrix::<f64>::identity(m, m);
    let mut out: Vec<DMatrix<f64>> = Vec::with_capacity(pf + 1);
    for k in 0..=pf {
        let w = (-0.5f64).powi(k as i32);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut rhs = (expa - &id * sign) * w;
        if k > 0 {
            rhs += &out[k - 1] * k as f64;
        }
        let bk = lu.solve(&rhs).ok_or_else(|| Error::Singular("A in the B_k recurrence".into()))?;
        out.push(bk);
    }
    Ok(out)
}

pub fn exact_propagator(sys: &SecondOrderSystem, dt: f64, pf: usize) -> Result<ExactPropagator> {
    let n = sys.dim();
    if n > EXACT_MAX_DOF {
        return Err(Error::Invalid(format!(
            "dense exact propagator limited to {EXACT_MAX_DOF} dofs, got {n}"
        )));
    }
    let a = dense_a(sys, dt)?;
    let phis = phi_functions(&a, pf + 1);
    let expa = phis[0].clone();
    let mut b = Vec::with_capacity(pf + 1);
    let mut fact = vec![1.0; pf + 1];
    for j in 1..=pf {
        fact[j] = fact[j - 1] * j as f64;
    }
    for k in 0..=pf {
        let mut bk = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..=k {
            let c = binomial(k, j) * (-0.5f64).powi((k - j) as i32) * fact[j];
            bk += &phis[j + 1] * c;
        }
        b.push(bk);
    }
    let minv = dense(&sys.m)
        .try_inverse()
        .ok_or_else(|| Error::Singular("mass matrix".into()))?;
    let mut g = DMatrix::zeros(2 * n, n);
    g.view_mut((0, 0), (n, n)).copy_from(&(minv * (dt * dt)));
    let force_maps = b.iter().map(|bk| bk * &g).collect();
    Ok(ExactPropagator { dt, pf, a, expa, b, force_maps })
}

impl ExactPropagator {
    /// `z_n = e^A z_{n-1} + sum_k B_k F_k`.
    pub fn exact_step(&self, z: &StateBlockPair, fp: Option<&ForcePolynomial>) -> Result<StateBlockPair> {
        let zv = DVector::from_vec(z.stacked());
        if zv.len() != self.expa.nrows() {
            return Err(Error::Dimension(format!("state of {} for {}", zv.len(), self.expa.nrows())));
        }
        let mut out = &self.expa * zv;
        if let Some(fp) = fp {
            if fp.coeffs.len() > self.pf + 1 {
                return Err(Error::Dimension(format!(
                    "force order {} exceeds p_f = {}",
                    fp.coeffs.len() - 1,
                    self.pf
                )));
            }
            for (k, c) in fp.coeffs.iter().enumerate() {
                out += &self.force_maps[k] * DVector::from_column_slice(c);
            }
        }
        Ok(StateBlockPair::from_stacked(out.as_slice()))
    }
}

/// Integrator wrapper around [`ExactPropagator`].
pub struct ExactStepper {
    sys: SecondOrderSystem,
    pub prop: ExactPropagator,
    z: StateBlockPair,
    fitter: Option<ForceFitter>,
    coeffs: Vec<Vec<f64>>,
    step: usize,
}

impl ExactStepper {
    pub fn new(sys: &SecondOrderSystem, dt: f64, pf: usize) -> Result<Self> {
        let prop = exact_propagator(sys, dt, pf)?;
        let z = StateBlockPair::from_state(&state_from_ic(sys, dt)?);
        let fitter = if sys.force.is_none() { None } else { Some(ForceFitter::new(pf.max(1), sys.dim())?) };
        let coeffs = vec![vec![0.0; sys.dim()]; pf.max(1) + 1];
        if pf == 0 && fitter.is_some() {
            return Err(Error::Invalid("forced exact stepping needs p_f >= 1".into()));
        }
        Ok(Self { sys: sys.clone(), prop, z, fitter, coeffs, step: 0 })
    }
}

impl Integrator for ExactStepper {
    fn name(&self) -> String {
        "exact".into()
    }

    fn dt(&self) -> f64 {
        self.prop.dt
    }

    fn steps_taken(&self) -> usize {
        self.step
    }

    fn state(&self) -> (&[f64], &[f64]) {
        (&self.z.top, &self.z.bottom)
    }

    fn advance(&mut self) -> Result<()> {
        let fp = match self.fitter.as_mut() {
            Some(f) => {
                let t0 = self.step as f64 * self.prop.dt;
                f.fit_into(&self.sys, t0, self.prop.dt, &mut self.coeffs);
                Some(ForcePolynomial { pf: self.prop.pf, coeffs: self.coeffs.clone(), step_index: self.step + 1 })
            }
            None => None,
        };
        self.z = self.prop.exact_step(&self.z, fp.as_ref())?;
        self.step += 1;
        Ok(())
    }
}
