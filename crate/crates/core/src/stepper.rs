//! The order-2M Padé stepper. `A` and `M^{-1}` are never formed: products with
//! `A` cost one mass solve, and the successive root solves also deliver the
//! powers `A^j z_n` that the next right-hand side needs.

use std::io::Write;

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::forcing::{ForceFitter, ForcePolynomial, Signal};
use crate::linalg::{EffectiveFactorization, Factorization, ShiftedFactor};
use crate::pade::PadeScheme;
use crate::system::{state_from_ic, Force, SecondOrderSystem, StateVector};

/// Real `2n` vector split into its velocity-like top and displacement bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct StateBlockPair {
    pub top: Vec<f64>,
    pub bottom: Vec<f64>,
}

/// Complex counterpart of [`StateBlockPair`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexBlockPair {
    pub top: Vec<Complex64>,
    pub bottom: Vec<Complex64>,
}

impl StateBlockPair {
    pub fn zeros(n: usize) -> Self {
        Self { top: vec![0.0; n], bottom: vec![0.0; n] }
    }

    pub fn new(top: Vec<f64>, bottom: Vec<f64>) -> Result<Self> {
        if top.len() != bottom.len() {
            return Err(Error::Dimension(format!("{} vs {}", top.len(), bottom.len())));
        }
        Ok(Self { top, bottom })
    }

    pub fn from_state(z: &StateVector) -> Self {
        Self { top: z.v.clone(), bottom: z.u.clone() }
    }

    pub fn dim(&self) -> usize {
        self.top.len()
    }

    pub fn stacked(&self) -> Vec<f64> {
        let mut s = self.top.clone();
        s.extend_from_slice(&self.bottom);
        s
    }

    pub fn from_stacked(z: &[f64]) -> Self {
        let n = z.len() / 2;
        Self { top: z[..n].to_vec(), bottom: z[n..].to_vec() }
    }

    pub fn norm(&self) -> f64 {
        self.top.iter().chain(&self.bottom).map(|v| v * v).sum::<f64>().sqrt()
    }

    fn fill(&mut self, v: f64) {
        self.top.iter_mut().for_each(|x| *x = v);
        self.bottom.iter_mut().for_each(|x| *x = v);
    }

    /// `self += a * x`.
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, xi) in self.top.iter_mut().zip(&x.top) {
            *s += a * xi;
        }
        for (s, xi) in self.bottom.iter_mut().zip(&x.bottom) {
            *s += a * xi;
        }
    }
}

/// `A`, its shifted inverses and the force vectors for one system and step size.
#[derive(Debug, Clone)]
pub struct StateOperator {
    pub sys: SecondOrderSystem,
    pub dt: f64,
    mass: Factorization<f64>,
}

struct Scratch {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<Complex64>,
    d: Vec<Complex64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self { a: vec![0.0; n], b: vec![0.0; n], c: vec![z; n], d: vec![z; n] }
    }
}

impl StateOperator {
    pub fn new(sys: &SecondOrderSystem, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Invalid(format!("time step must be positive, got {dt}")));
        }
        let mass = Factorization::new(&sys.m)?;
        Ok(Self { sys: sys.clone(), dt, mass })
    }

    pub fn dim(&self) -> usize {
        self.sys.dim()
    }

    /// Factorization of `r^2 M + r dt C + dt^2 K`.
    pub fn factorize_shift(&self, r: Complex64) -> Result<EffectiveFactorization> {
        EffectiveFactorization::new(&self.sys.m, &self.sys.c, &self.sys.k, r, self.dt)
    }

    /// `y = A x` via `M y_top = -dt C x_top - dt^2 K x_bottom`, `y_bottom = x_top`.
    pub fn apply_a(&self, x: &StateBlockPair) -> StateBlockPair {
        let mut y = StateBlockPair::zeros(x.dim());
        let mut s = Scratch::new(x.dim());
        self.apply_a_into(x, &mut y, &mut s);
        y
    }

    fn apply_a_into(&self, x: &StateBlockPair, y: &mut StateBlockPair, s: &mut Scratch) {
        self.stiffness_damping_rhs(&x.top, &x.bottom, &mut y.top, s);
        self.mass.solve_in_place(&mut y.top);
        y.bottom.copy_from_slice(&x.top);
    }

    /// `out = -dt C a - dt^2 K b`.
    fn stiffness_damping_rhs(&self, a: &[f64], b: &[f64], out: &mut [f64], s: &mut Scratch) {
        let dt = self.dt;
        self.sys.k.spmv_into(b, out);
        out.iter_mut().for_each(|v| *v *= -dt * dt);
        if self.sys.c.nnz() > 0 {
            self.sys.c.spmv_into(a, &mut s.a);
            for (o, ci) in out.iter_mut().zip(&s.a) {
                *o -= dt * ci;
            }
        }
    }

    /// Solves `(r I - A) x = g` for a real root `r`.
    pub fn solve_real_block(
        &self,
        fact: &EffectiveFactorization,
        g: &StateBlockPair,
    ) -> Result<StateBlockPair> {
        let mut x = StateBlockPair::zeros(g.dim());
        let mut s = Scratch::new(g.dim());
        self.solve_real_into(fact, g, &mut x, &mut s)?;
        Ok(x)
    }

    fn solve_real_into(
        &self,
        fact: &EffectiveFactorization,
        g: &StateBlockPair,
        x: &mut StateBlockPair,
        s: &mut Scratch,
    ) -> Result<()> {
        let ShiftedFactor::Real(f) = &fact.kind else {
            return Err(Error::Invalid("real block needs a real shift".into()));
        };
        let r = fact.shift.re;
        let dt2 = self.dt * self.dt;
        self.sys.m.spmv_into(&g.top, &mut x.top);
        self.sys.k.spmv_into(&g.bottom, &mut s.a);
        for (xi, ki) in x.top.iter_mut().zip(&s.a) {
            *xi = r * *xi - dt2 * ki;
        }
        f.solve_in_place(&mut x.top);
        for ((xb, xt), gb) in x.bottom.iter_mut().zip(&x.top).zip(&g.bottom) {
            *xb = (xt + gb) / r;
        }
        Ok(())
    }

    /// Solves `(r I - A)(conj(r) I - A) x = g` for real `g`; also returns
    /// `y = (r I - A)^{-1} g`.
    pub fn solve_complex_pair(
        &self,
        fact: &EffectiveFactorization,
        g: &StateBlockPair,
    ) -> Result<(StateBlockPair, ComplexBlockPair)> {
        let n = g.dim();
        let mut s = Scratch::new(n);
        self.solve_pair_y(fact, g, &mut s)?;
        let r = fact.shift;
        let y = ComplexBlockPair { top: s.c.clone(), bottom: s.d.clone() };
        let x = StateBlockPair {
            top: y.top.iter().map(|v| -v.im / r.im).collect(),
            bottom: y.bottom.iter().map(|v| -v.im / r.im).collect(),
        };
        Ok((x, y))
    }

    /// Leaves `y_top` in `s.c` and `y_bottom` in `s.d`.
    fn solve_pair_y(
        &self,
        fact: &EffectiveFactorization,
        g: &StateBlockPair,
        s: &mut Scratch,
    ) -> Result<()> {
        let ShiftedFactor::Complex(f) = &fact.kind else {
            return Err(Error::Invalid("pair block needs a complex shift".into()));
        };
        let r = fact.shift;
        let dt2 = self.dt * self.dt;
        self.sys.m.spmv_into(&g.top, &mut s.a);
        self.sys.k.spmv_into(&g.bottom, &mut s.b);
        for ((c, mg), kg) in s.c.iter_mut().zip(&s.a).zip(&s.b) {
            *c = r * *mg - dt2 * kg;
        }
        f.solve_in_place(&mut s.c);
        let rinv = 1.0 / r;
        for ((d, yt), gb) in s.d.iter_mut().zip(&s.c).zip(&g.bottom) {
            *d = (yt + gb) * rinv;
        }
        Ok(())
    }

    /// Force block `[dt^2 M^{-1} f; 0]`.
    pub fn force_vector(&self, f: &[f64]) -> StateBlockPair {
        let dt2 = self.dt * self.dt;
        let mut top: Vec<f64> = f.iter().map(|v| dt2 * v).collect();
        self.mass.solve_in_place(&mut top);
        StateBlockPair { top, bottom: vec![0.0; f.len()] }
    }
}

/// `A x = -Im(r y)/Im(r)` and `A^2 x = g + 2 Re(r) A x - |r|^2 x` from a pair solve.
pub fn products_from_pair(
    r: Complex64,
    y: &ComplexBlockPair,
    g: &StateBlockPair,
    x: &StateBlockPair,
) -> (StateBlockPair, StateBlockPair) {
    let ax = StateBlockPair {
        top: y.top.iter().map(|v| -(r * v).im / r.im).collect(),
        bottom: y.bottom.iter().map(|v| -(r * v).im / r.im).collect(),
    };
    let mut a2x = g.clone();
    a2x.axpy(2.0 * r.re, &ax);
    a2x.axpy(-r.norm_sqr(), x);
    (ax, a2x)
}

/// Order-8 update of the cached `A^3 z`:
/// `A^3 z_n = A^3 z_{n-1} + conj(r1) z2 - z1 - (|r2|^2 A - 2 Re(r2) A^2)(z_n - z_{n-1})`.
/// `z1 = (r1 I - A)^{-1} b` and `z2 = ((r1 I - A)(conj(r1) I - A))^{-1} b` come
/// from the first pair solve; `a_dz`, `a2_dz` are `A` and `A^2` applied to
/// `z_n - z_{n-1}`.
pub fn a3z_update(
    r1_conj: Complex64,
    z1: &ComplexBlockPair,
    z2: &StateBlockPair,
    a_dz: &StateBlockPair,
    a2_dz: &StateBlockPair,
    r2: Complex64,
    a3z_prev: &StateBlockPair,
) -> StateBlockPair {
    let mix = |p: &[f64], q1: &[Complex64], q2: &[f64], a: &[f64], a2: &[f64]| -> Vec<f64> {
        (0..p.len())
            .map(|i| {
                let az2 = (r1_conj * q2[i] - q1[i]).re;
                p[i] + az2 - (r2.norm_sqr() * a[i] - 2.0 * r2.re * a2[i])
            })
            .collect()
    };
    StateBlockPair {
        top: mix(&a3z_prev.top, &z1.top, &z2.top, &a_dz.top, &a2_dz.top),
        bottom: mix(&a3z_prev.bottom, &z1.bottom, &z2.bottom, &a_dz.bottom, &a2_dz.bottom),
    }
}

/// A time integrator advancing a scaled state `[dt u'; u]`.
pub trait Integrator {
    fn name(&self) -> String;
    fn dt(&self) -> f64;
    fn steps_taken(&self) -> usize;
    /// Current `(v, u)` with `v = dt u'`.
    fn state(&self) -> (&[f64], &[f64]);
    fn advance(&mut self) -> Result<()>;

    fn time(&self) -> f64 {
        self.steps_taken() as f64 * self.dt()
    }
}

#[derive(Debug, Clone, Copy)]
enum Block {
    Real(usize),
    Pair(usize),
}

/// Padé stepper with factorizations prepared once for a fixed step size.
pub struct PadeStepper {
    pub scheme: PadeScheme,
    op: StateOperator,
    factors: Vec<EffectiveFactorization>,
    blocks: Vec<Block>,
    order_of_blocks: Vec<usize>,
    /// `cache[j] = A^j z_n`, `j = 0..M`.
    cache: Vec<StateBlockPair>,
    cur: Vec<StateBlockPair>,
    next: Vec<StateBlockPair>,
    horner: StateBlockPair,
    horner_tmp: StateBlockPair,
    fitter: Option<ForceFitter>,
    ftilde: Vec<Vec<f64>>,
    grouped: Vec<Vec<f64>>,
    scratch: Scratch,
    step: usize,
    /// Steps after which the cache is recomputed from scratch in debug builds.
    debug_check_steps: usize,
    separable: Option<SeparablePath>,
    use_separable: bool,
}

/// For `f(t) = load * p(t)` the force enters only through
/// `w_j = A^j [dt^2 M^{-1} load; 0]`, computed once.
struct SeparablePath {
    signal: Signal,
    basis: Vec<StateBlockPair>,
    coeffs: Vec<f64>,
}

impl PadeStepper {
    /// Prepares factorizations and seeds the cache from the initial conditions.
    pub fn new(sys: &SecondOrderSystem, scheme: PadeScheme, dt: f64) -> Result<Self> {
        let z0 = state_from_ic(sys, dt)?;
        Self::with_state(sys, scheme, &z0)
    }

    pub fn with_state(sys: &SecondOrderSystem, scheme: PadeScheme, z0: &StateVector) -> Result<Self> {
        let dt = z0.dt;
        let op = StateOperator::new(sys, dt)?;
        let n = sys.dim();
        if z0.u.len() != n {
            return Err(Error::Dimension(format!("state of {} for n = {n}", z0.u.len())));
        }
        let mut factors = Vec::new();
        let mut blocks = Vec::new();
        for &r in &scheme.roots.real {
            blocks.push(Block::Real(factors.len()));
            factors.push(op.factorize_shift(Complex64::new(r, 0.0))?);
        }
        for &r in &scheme.roots.pairs {
            blocks.push(Block::Pair(factors.len()));
            factors.push(op.factorize_shift(r)?);
        }
        let m = scheme.order;
        let mut scratch = Scratch::new(n);
        let mut cache = vec![StateBlockPair::zeros(n); m];
        cache[0] = StateBlockPair::from_state(z0);
        for j in 1..m {
            let (lo, hi) = cache.split_at_mut(j);
            op.apply_a_into(&lo[j - 1], &mut hi[0], &mut scratch);
        }
        let (fitter, ftilde, grouped) = match (sys.force.is_none(), scheme.force_degree()) {
            (false, Some(d)) => (
                Some(ForceFitter::new(scheme.pf, n)?),
                vec![vec![0.0; n]; scheme.pf + 1],
                vec![vec![0.0; n]; d + 1],
            ),
            _ => (None, Vec::new(), Vec::new()),
        };
        let separable = match (&sys.force, scheme.force_degree()) {
            (Force::Separable { load, signal }, Some(d)) => {
                let mut basis = vec![op.force_vector(load)];
                for j in 1..=d {
                    let next = op.apply_a(&basis[j - 1]);
                    basis.push(next);
                }
                Some(SeparablePath { signal: signal.clone(), basis, coeffs: vec![0.0; scheme.pf + 1] })
            }
            _ => None,
        };
        Ok(Self {
            order_of_blocks: (0..blocks.len()).collect(),
            scheme,
            op,
            factors,
            blocks,
            cache,
            cur: vec![StateBlockPair::zeros(n); m + 1],
            next: vec![StateBlockPair::zeros(n); m + 1],
            horner: StateBlockPair::zeros(n),
            horner_tmp: StateBlockPair::zeros(n),
            fitter,
            ftilde,
            grouped,
            scratch,
            step: 0,
            debug_check_steps: 32,
            use_separable: separable.is_some(),
            separable,
        })
    }

    /// Processes the root blocks in the given order (a permutation of
    /// `0..block_count`, real roots first in the default order).
    pub fn set_block_order(&mut self, order: Vec<usize>) -> Result<()> {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (0..self.blocks.len()).collect::<Vec<_>>() {
            return Err(Error::Invalid(format!("{order:?} is not a block permutation")));
        }
        self.order_of_blocks = order;
        Ok(())
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn factorizations(&self) -> &[EffectiveFactorization] {
        &self.factors
    }

    pub fn operator(&self) -> &StateOperator {
        &self.op
    }

    /// Cached `A^j z_n` for `j = 0..M`.
    pub fn cached_powers(&self) -> &[StateBlockPair] {
        &self.cache
    }

    pub fn current(&self) -> StateVector {
        StateVector { v: self.cache[0].top.clone(), u: self.cache[0].bottom.clone(), dt: self.op.dt }
    }

    /// Fits the force on the upcoming step.
    pub fn fit_next_force(&mut self) -> Option<ForcePolynomial> {
        let fitter = self.fitter.as_mut()?;
        let t0 = self.step as f64 * self.op.dt;
        fitter.fit_into(&self.op.sys, t0, self.op.dt, &mut self.ftilde);
        Some(ForcePolynomial { pf: self.scheme.pf, coeffs: self.ftilde.clone(), step_index: self.step + 1 })
    }

    /// `b_n = Phat z_{n-1} + sum_k C_k F_k` from the cached powers and a
    /// force fit (or no force).
    pub fn build_rhs(&mut self, fp: Option<&ForcePolynomial>) -> Result<StateBlockPair> {
        let mut b = StateBlockPair::zeros(self.op.dim());
        if let Some(fp) = fp {
            if fp.coeffs.len() != self.scheme.pf + 1 {
                return Err(Error::Dimension(format!(
                    "force fit of order {} for p_f = {}",
                    fp.coeffs.len().saturating_sub(1),
                    self.scheme.pf
                )));
            }
            self.ftilde.clone_from(&fp.coeffs);
            if self.grouped.is_empty() {
                if let Some(d) = self.scheme.force_degree() {
                    self.grouped = vec![vec![0.0; self.op.dim()]; d + 1];
                }
            }
        }
        self.rhs_into(fp.is_some(), &mut b);
        Ok(b)
    }

    fn rhs_into(&mut self, with_force: bool, b: &mut StateBlockPair) {
        rhs_homogeneous(&self.scheme.phat, &self.cache, b);
        if !with_force || self.grouped.is_empty() {
            return;
        }
        for (j, g) in self.grouped.iter_mut().enumerate() {
            g.iter_mut().for_each(|v| *v = 0.0);
            for (k, fk) in self.ftilde.iter().enumerate() {
                let c = self.scheme.ck[k][j];
                if c != 0.0 {
                    for (gi, fi) in g.iter_mut().zip(fk) {
                        *gi += c * fi;
                    }
                }
            }
        }
        // Horner over powers of A; each stage costs one mass solve.
        let dt2 = self.op.dt * self.op.dt;
        let d = self.grouped.len() - 1;
        for (h, g) in self.horner.top.iter_mut().zip(&self.grouped[d]) {
            *h = dt2 * g;
        }
        self.op.mass.solve_in_place(&mut self.horner.top);
        self.horner.bottom.iter_mut().for_each(|v| *v = 0.0);
        for j in (0..d).rev() {
            let h = &self.horner;
            let t = &mut self.horner_tmp;
            self.op.stiffness_damping_rhs(&h.top, &h.bottom, &mut t.top, &mut self.scratch);
            for (ti, gi) in t.top.iter_mut().zip(&self.grouped[j]) {
                *ti += dt2 * gi;
            }
            self.op.mass.solve_in_place(&mut t.top);
            t.bottom.copy_from_slice(&h.top);
            std::mem::swap(&mut self.horner, &mut self.horner_tmp);
        }
        b.axpy(1.0, &self.horner);
    }

    /// Advances one step.
    pub fn step(&mut self) -> Result<()> {
        let t0 = self.step as f64 * self.op.dt;
        let mut b = std::mem::replace(&mut self.cur[0], StateBlockPair::zeros(0));
        if let (true, Some(sp), Some(fitter)) =
            (self.use_separable, self.separable.as_mut(), self.fitter.as_ref())
        {
            rhs_homogeneous(&self.scheme.phat, &self.cache, &mut b);
            let signal = &sp.signal;
            fitter.fit_scalar(|t| signal.eval(t), t0, self.op.dt, &mut sp.coeffs);
            for (j, w) in sp.basis.iter().enumerate() {
                let sj: f64 = sp.coeffs.iter().enumerate().map(|(k, c)| self.scheme.ck[k][j] * c).sum();
                if sj != 0.0 {
                    b.axpy(sj, w);
                }
            }
        } else {
            if let Some(fitter) = self.fitter.as_mut() {
                fitter.fit_into(&self.op.sys, t0, self.op.dt, &mut self.ftilde);
            }
            self.rhs_into(self.fitter.is_some(), &mut b);
        }
        self.cur[0] = b;
        self.solve_chain()?;
        let sign = if self.scheme.is_odd() { -1.0 } else { 1.0 };
        for (c, zh) in self.cache.iter_mut().zip(&self.cur) {
            for (ci, zi) in c.top.iter_mut().zip(&zh.top) {
                *ci = zi + sign * *ci;
            }
            for (ci, zi) in c.bottom.iter_mut().zip(&zh.bottom) {
                *ci = zi + sign * *ci;
            }
        }
        self.step += 1;
        if !self.cache[0].top.iter().chain(&self.cache[0].bottom).all(|v| v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite state at step {}", self.step)));
        }
        #[cfg(debug_assertions)]
        if self.op.dim() <= 8 && self.step <= self.debug_check_steps {
            self.check_cache();
        }
        Ok(())
    }

    /// Applies `Q^{-1}` to `cur[0]`, leaving `A^j Q^{-1} cur[0]` in `cur[j]`
    /// for `j = 0..M`.
    fn solve_chain(&mut self) -> Result<()> {
        let need = self.scheme.order - 1;
        let mut have = 0usize;
        for bi in 0..self.order_of_blocks.len() {
            let block = self.blocks[self.order_of_blocks[bi]];
            match block {
                Block::Real(fi) => {
                    let fact = &self.factors[fi];
                    let r = fact.shift.re;
                    self.op.solve_real_into(fact, &self.cur[0], &mut self.next[0], &mut self.scratch)?;
                    let top = (have + 1).min(need);
                    for j in 0..top {
                        let (lo, hi) = self.next.split_at_mut(j + 1);
                        let (xj, xj1, gj) = (&lo[j], &mut hi[0], &self.cur[j]);
                        for ((o, x), g) in xj1.top.iter_mut().zip(&xj.top).zip(&gj.top) {
                            *o = r * x - g;
                        }
                        for ((o, x), g) in xj1.bottom.iter_mut().zip(&xj.bottom).zip(&gj.bottom) {
                            *o = r * x - g;
                        }
                    }
                    have = top;
                }
                Block::Pair(fi) => {
                    let fact = &self.factors[fi];
                    let r = fact.shift;
                    self.op.solve_pair_y(fact, &self.cur[0], &mut self.scratch)?;
                    let s = -1.0 / r.im;
                    let x0 = &mut self.next[0];
                    for (o, y) in x0.top.iter_mut().zip(&self.scratch.c) {
                        *o = s * y.im;
                    }
                    for (o, y) in x0.bottom.iter_mut().zip(&self.scratch.d) {
                        *o = s * y.im;
                    }
                    let top = (have + 2).min(need);
                    if top >= 1 {
                        let x1 = &mut self.next[1];
                        for (o, y) in x1.top.iter_mut().zip(&self.scratch.c) {
                            *o = s * (r * y).im;
                        }
                        for (o, y) in x1.bottom.iter_mut().zip(&self.scratch.d) {
                            *o = s * (r * y).im;
                        }
                    }
                    let (two_re, abs2) = (2.0 * r.re, r.norm_sqr());
                    for j in 0..top.saturating_sub(1) {
                        let (lo, hi) = self.next.split_at_mut(j + 2);
                        let (xj, xj1, out, gj) = (&lo[j], &lo[j + 1], &mut hi[0], &self.cur[j]);
                        for i in 0..out.top.len() {
                            out.top[i] = gj.top[i] + two_re * xj1.top[i] - abs2 * xj.top[i];
                            out.bottom[i] = gj.bottom[i] + two_re * xj1.bottom[i] - abs2 * xj.bottom[i];
                        }
                    }
                    have = top;
                }
            }
            std::mem::swap(&mut self.cur, &mut self.next);
        }
        debug_assert_eq!(have, need);
        Ok(())
    }

    /// Recomputes the cached powers with explicit products and checks them.
    /// Round-off in the recurrence grows with the per-power growth of the
    /// cache, roughly the norm of `A` along the current state.
    #[cfg(debug_assertions)]
    fn check_cache(&mut self) {
        let mut fresh = self.cache[0].clone();
        let norms: Vec<f64> = self.cache.iter().map(|c| c.norm()).collect();
        let growth = norms
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .fold(1.0, f64::max);
        let scale = norms.iter().copied().fold(0.0, f64::max) * growth;
        for j in 1..self.cache.len() {
            fresh = self.op.apply_a(&fresh);
            let mut d = fresh.clone();
            d.axpy(-1.0, &self.cache[j]);
            assert!(
                d.norm() <= 1e-10 * scale.max(f64::MIN_POSITIVE),
                "cached A^{j} z drifted by {} at step {}",
                d.norm(),
                self.step
            );
        }
    }

    /// Routes separable loads through the generic per-step fit instead of the
    /// precomputed force vectors; both give the same step up to round-off.
    pub fn set_separable_fast_path(&mut self, on: bool) {
        self.use_separable = on && self.separable.is_some();
    }

    pub fn set_debug_check_steps(&mut self, steps: usize) {
        self.debug_check_steps = steps;
    }
}

/// `b = Phat z_{n-1}` from the cached powers.
fn rhs_homogeneous(phat: &[f64], cache: &[StateBlockPair], b: &mut StateBlockPair) {
    b.fill(0.0);
    for (c, z) in phat.iter().zip(cache) {
        if *c != 0.0 {
            b.axpy(*c, z);
        }
    }
}

impl Integrator for PadeStepper {
    fn name(&self) -> String {
        format!("pade{}", self.scheme.order)
    }

    fn dt(&self) -> f64 {
        self.op.dt
    }

    fn steps_taken(&self) -> usize {
        self.step
    }

    fn state(&self) -> (&[f64], &[f64]) {
        (&self.cache[0].top, &self.cache[0].bottom)
    }

    fn advance(&mut self) -> Result<()> {
        self.step()
    }
}

/// Sampled trajectory at selected degrees of freedom, including step 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeHistory {
    pub dt: f64,
    pub dofs: Vec<usize>,
    pub t: Vec<f64>,
    /// Row-major `[step][dof]`.
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub meta: Vec<(String, String)>,
}

impl TimeHistory {
    pub fn steps(&self) -> usize {
        self.t.len()
    }

    pub fn u_series(&self, k: usize) -> Vec<f64> {
        self.u.iter().skip(k).step_by(self.dofs.len()).copied().collect()
    }

    pub fn v_series(&self, k: usize) -> Vec<f64> {
        self.v.iter().skip(k).step_by(self.dofs.len()).copied().collect()
    }

    /// CSV `step,t,dof_id,u,v` for steps `1..`; the initial state is not written.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "step,t,dof_id,u,v")?;
        let nd = self.dofs.len();
        for s in 1..self.t.len() {
            for (k, d) in self.dofs.iter().enumerate() {
                writeln!(
                    w,
                    "{},{:?},{},{:?},{:?}",
                    s,
                    self.t[s],
                    d,
                    self.u[s * nd + k],
                    self.v[s * nd + k]
                )?;
            }
        }
        Ok(())
    }
}

/// Runs `n_steps` steps, recording `u` and `u'` at `dofs`.
pub fn run(integ: &mut dyn Integrator, n_steps: usize, dofs: &[usize]) -> Result<TimeHistory> {
    let (v0, _) = integ.state();
    let n = v0.len();
    if let Some(&d) = dofs.iter().find(|&&d| d >= n) {
        return Err(Error::Invalid(format!("dof {d} out of range for n = {n}")));
    }
    let dt = integ.dt();
    let mut h = TimeHistory {
        dt,
        dofs: dofs.to_vec(),
        t: Vec::with_capacity(n_steps + 1),
        u: Vec::with_capacity((n_steps + 1) * dofs.len()),
        v: Vec::with_capacity((n_steps + 1) * dofs.len()),
        meta: vec![("integrator".into(), integ.name()), ("dt".into(), format!("{dt:?}"))],
    };
    let record = |h: &mut TimeHistory, integ: &dyn Integrator| {
        let (v, u) = integ.state();
        h.t.push(integ.time());
        for &d in dofs {
            h.u.push(u[d]);
            h.v.push(v[d] / dt);
        }
    };
    record(&mut h, integ);
    for _ in 0..n_steps {
        integ.advance()?;
        record(&mut h, integ);
    }
    Ok(h)
}

/// Displacement history of one dof over `n_steps`, including step 0.
pub fn displacement_series(integ: &mut dyn Integrator, n_steps: usize, dof: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(integ.state().1[dof]);
    for _ in 0..n_steps {
        integ.advance()?;
        out.push(integ.state().1[dof]);
    }
    Ok(out)
}
