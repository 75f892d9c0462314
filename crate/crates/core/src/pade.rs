//! Order-dependent scheme data: diagonal Padé numerator and denominator,
//! denominator roots, the parity-adjusted right-hand side polynomial and the
//! force convolution polynomials `C_k`, all as polynomials in `A`.

use nalgebra::DMatrix;
use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest order whose coefficients are produced exactly in `i128`.
pub const MAX_ORDER: usize = 16;

/// Backward-error bound accepted for numerically computed roots.
pub const ROOT_TOL: f64 = 1e-10;

/// Coefficients of `P_M` and `Q_M` in ascending powers of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadePolynomials {
    pub order: usize,
    pub p: Vec<i128>,
    pub q: Vec<i128>,
}

impl PadePolynomials {
    pub fn eval_p(&self, x: Complex64) -> Complex64 {
        horner_i(&self.p, x)
    }

    pub fn eval_q(&self, x: Complex64) -> Complex64 {
        horner_i(&self.q, x)
    }

    /// `P(x)/Q(x)`, the rational approximation of `exp(x)`.
    pub fn ratio(&self, x: Complex64) -> Complex64 {
        self.eval_p(x) / self.eval_q(x)
    }

    /// `|Q(r)| / sum_m |q_m| |r|^m`, the relative backward error of a root.
    pub fn backward_error(&self, r: Complex64) -> f64 {
        let scale: f64 = self
            .q
            .iter()
            .enumerate()
            .map(|(m, &c)| (c as f64).abs() * r.norm().powi(m as i32))
            .sum();
        self.eval_q(r).norm() / scale
    }

    /// `|Q(r)| / ||q||_1`.
    pub fn coefficient_residual(&self, r: Complex64) -> f64 {
        let l1: f64 = self.q.iter().map(|&c| (c as f64).abs()).sum();
        self.eval_q(r).norm() / l1
    }

    fn eval_q_and_derivative(&self, x: Complex64) -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for &c in self.q.iter().rev() {
            d = d * x + v;
            v = v * x + c as f64;
        }
        (v, d)
    }
}

fn horner_i(c: &[i128], x: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a as f64)
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn check_order(m: usize) -> Result<()> {
    if m == 0 || m > MAX_ORDER {
        return Err(Error::Invalid(format!(
            "order M must satisfy 1 <= M <= {MAX_ORDER}, got {m}"
        )));
    }
    Ok(())
}

/// Exact integer coefficients `p_m = (2M-m)! / (m! (M-m)!)`, `q_m = (-1)^m p_m`.
pub fn pade_coefficients(m: usize) -> Result<PadePolynomials> {
    check_order(m)?;
    let mut p = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let v = factorial(2 * m - k) / (factorial(k) * factorial(m - k));
        let v = v.to_i128().ok_or_else(|| {
            Error::Invalid(format!("coefficient overflow for order {m} (bound {MAX_ORDER})"))
        })?;
        p.push(v);
    }
    let q = p
        .iter()
        .enumerate()
        .map(|(k, &c)| if k % 2 == 0 { c } else { -c })
        .collect();
    Ok(PadePolynomials { order: m, p, q })
}

/// Roots of `Q_M`: real roots plus one representative (Im > 0) per conjugate pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub order: usize,
    pub real: Vec<f64>,
    pub pairs: Vec<Complex64>,
}

impl RootSet {
    /// Number of successive solves: one per real root plus one per pair.
    pub fn block_count(&self) -> usize {
        self.real.len() + self.pairs.len()
    }

    /// All `M` roots including conjugates.
    pub fn all(&self) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = self.real.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        for &r in &self.pairs {
            v.push(r);
            v.push(r.conj());
        }
        v
    }

    /// Largest backward error over all roots.
    pub fn max_backward_error(&self, poly: &PadePolynomials) -> f64 {
        self.all()
            .into_iter()
            .map(|r| poly.backward_error(r))
            .fold(0.0, f64::max)
    }
}

/// Roots of `Q_M`. Orders up to 4 use tabulated 16-digit values; higher orders
/// are computed with [`compute_q_roots`].
pub fn q_roots(m: usize) -> Result<RootSet> {
    check_order(m)?;
    let c = Complex64::new;
    let (real, pairs) = match m {
        1 => (vec![2.0], vec![]),
        2 => (vec![], vec![c(3.0, 3f64.sqrt())]),
        3 => (
            vec![4.644_370_709_252_17],
            vec![c(3.677_814_645_373_91, 3.508761919567443)],
        ),
        4 => (
            vec![],
            vec![
                c(5.792421205640749, 1.734468257869007),
                c(4.207578794359259, 5.314836083713504),
            ],
        ),
        _ => return compute_q_roots(m),
    };
    Ok(RootSet { order: m, real, pairs })
}

/// Roots of `Q_M` from the companion-matrix eigenvalues, refined by Newton
/// iterations and validated by their backward error.
pub fn compute_q_roots(m: usize) -> Result<RootSet> {
    let poly = pade_coefficients(m)?;
    let lead = poly.q[m] as f64;
    let mut comp = DMatrix::<f64>::zeros(m, m);
    for i in 1..m {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..m {
        comp[(i, m - 1)] = -(poly.q[i] as f64) / lead;
    }
    let eig = comp.complex_eigenvalues();
    let mut roots: Vec<Complex64> = eig.iter().map(|e| Complex64::new(e.re, e.im)).collect();
    for r in roots.iter_mut() {
        for _ in 0..20 {
            let (v, d) = poly.eval_q_and_derivative(*r);
            if d.norm() == 0.0 {
                break;
            }
            let step = v / d;
            *r -= step;
            if step.norm() <= 1e-16 * r.norm() {
                break;
            }
        }
    }

    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = 0usize;
    for r in &roots {
        if r.im.abs() <= 1e-8 * r.norm() {
            real.push(r.re);
        } else if r.im > 0.0 {
            upper.push(*r);
        } else {
            lower += 1;
        }
    }
    if upper.len() != lower || real.len() + 2 * upper.len() != m {
        return Err(Error::RootFailure { order: m, residual: f64::INFINITY });
    }
    // Use the conjugate of the matching lower root to symmetrize the pair.
    for u in upper.iter_mut() {
        let partner = roots
            .iter()
            .filter(|r| r.im < 0.0)
            .min_by(|a, b| (a.conj() - *u).norm().total_cmp(&(b.conj() - *u).norm()))
            .copied()
            .unwrap();
        *u = (*u + partner.conj()) * 0.5;
    }
    real.sort_by(f64::total_cmp);
    upper.sort_by(|a, b| a.im.total_cmp(&b.im));
    let set = RootSet { order: m, real, pairs: upper };
    let res = set.max_backward_error(&poly);
    if !(res < ROOT_TOL) {
        return Err(Error::RootFailure { order: m, residual: res });
    }
    Ok(set)
}

/// `C_k` for `k = 0..=p_f` as exact rational polynomials in `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct CkTable {
    pub order: usize,
    pub pf: usize,
    /// `polys[k][j]` is the coefficient of `A^j` in `C_k`; each has length `M`.
    pub polys: Vec<Vec<BigRational>>,
}

impl CkTable {
    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.polys
            .iter()
            .map(|c| c.iter().map(rational_to_f64).collect())
            .collect()
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn rat(v: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Evaluates `C_k = A^{-1}(k C_{k-1} + (-1/2)^k (P - (-1)^k Q))`, starting
/// from `C_0 = A^{-1}(P - Q)`, with exact division by the monomial `A`.
pub fn ck_polynomials(m: usize, pf: usize) -> Result<CkTable> {
    let poly = pade_coefficients(m)?;
    let p: Vec<BigRational> = poly.p.iter().map(|&v| rat(v)).collect();
    let q: Vec<BigRational> = poly.q.iter().map(|&v| rat(v)).collect();
    let half = BigRational::new(BigInt::from(-1), BigInt::from(2));
    let mut polys: Vec<Vec<BigRational>> = Vec::with_capacity(pf + 1);
    let mut weight = BigRational::one();
    for k in 0..=pf {
        let sign = if k % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        let mut dividend: Vec<BigRational> = (0..=m)
            .map(|j| &weight * (&p[j] - &sign * &q[j]))
            .collect();
        if k > 0 {
            let kk = rat(k as i128);
            for (j, c) in polys[k - 1].iter().enumerate() {
                dividend[j] += &kk * c;
            }
        }
        if !dividend[0].is_zero() {
            return Err(Error::InexactDivision(k));
        }
        polys.push(dividend[1..].to_vec());
        weight *= &half;
    }
    Ok(CkTable { order: m, pf, polys })
}

/// `P + Q` for odd `M`, `P - Q` for even `M`, truncated to its `M` lowest
/// coefficients (the `A^M` terms cancel).
pub fn phat_coefficients(m: usize) -> Result<Vec<i128>> {
    let poly = pade_coefficients(m)?;
    let odd = m % 2 == 1;
    let full: Vec<i128> = poly
        .p
        .iter()
        .zip(&poly.q)
        .map(|(&a, &b)| if odd { a + b } else { a - b })
        .collect();
    debug_assert_eq!(full[m], 0);
    Ok(full[..m].to_vec())
}

/// Everything the stepper needs for one order, in floating point.
#[derive(Debug, Clone)]
pub struct PadeScheme {
    pub order: usize,
    pub pf: usize,
    pub poly: PadePolynomials,
    pub roots: RootSet,
    pub phat: Vec<f64>,
    /// `ck[k][j]`: coefficient of `A^j` in `C_k`.
    pub ck: Vec<Vec<f64>>,
}

impl PadeScheme {
    pub fn new(m: usize, pf: usize) -> Result<Self> {
        let poly = pade_coefficients(m)?;
        let roots = q_roots(m)?;
        let phat = phat_coefficients(m)?.into_iter().map(|v| v as f64).collect();
        let ck = ck_polynomials(m, pf)?.to_f64();
        Ok(Self { order: m, pf, poly, roots, phat, ck })
    }

    /// Scheme with the recommended force order `p_f = M`.
    pub fn with_default_pf(m: usize) -> Result<Self> {
        Self::new(m, m)
    }

    pub fn is_odd(&self) -> bool {
        self.order % 2 == 1
    }

    /// Highest power of `A` with a nonzero coefficient in any `C_k`, or `None`
    /// when every `C_k` vanishes.
    pub fn force_degree(&self) -> Option<usize> {
        self.ck
            .iter()
            .filter_map(|c| c.iter().rposition(|&v| v != 0.0))
            .max()
    }
}

/// Rational entries formatted as `a` or `a/b`.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else if r.is_negative() {
        format!("-{}/{}", r.numer().abs(), r.denom())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
