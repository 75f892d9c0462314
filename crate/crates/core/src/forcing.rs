//! Per-step polynomial fits of the excitation on Gauss-Lobatto-Legendre nodes
//! and the registry of named load signals.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::DenseLu;
use crate::system::SecondOrderSystem;

/// Scalar load amplitude as a function of time.
#[derive(Debug, Clone, PartialEq)]
pub enum Signal {
    Zero,
    Constant(f64),
    /// `a1 cos(w1 t) + a2 sin(w2 t)`.
    Harmonic { a1: f64, w1: f64, a2: f64, w2: f64 },
    /// Triangular pulse with breakpoints 0.25, 0.75 and 1 s.
    Triangle,
    /// `p0 sin(2 pi f t) exp(-((t - 4T) / T)^2 / 2)` with `T = 1/f`.
    SineBurst { f_ex: f64, p0: f64 },
    /// `f0 (1 - psi) exp(-psi / 2)`, `psi = 2 (pi f (t - t0))^2`.
    Ricker { f_ex: f64, f0: f64, t0: f64 },
    /// `sum_k a_k t^k`.
    Polynomial(Vec<f64>),
}

/// Names accepted by [`Signal::by_name`].
pub const SIGNAL_NAMES: [&str; 4] = ["f1", "f2", "sine_burst", "ricker"];

impl Signal {
    pub fn f1() -> Self {
        Signal::Harmonic { a1: 10.0, w1: 2.0 * 5f64.sqrt() / 5.0, a2: 70.0, w2: 2.0 * 10f64.sqrt() }
    }

    pub fn sine_burst() -> Self {
        Signal::SineBurst { f_ex: 50.0, p0: 1.0 }
    }

    pub fn ricker() -> Self {
        Signal::Ricker { f_ex: 12.5, f0: 100.0, t0: 2.0 / 12.5 }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "f1" => Ok(Self::f1()),
            "f2" => Ok(Signal::Triangle),
            "sine_burst" => Ok(Self::sine_burst()),
            "ricker" => Ok(Self::ricker()),
            "none" | "zero" => Ok(Signal::Zero),
            _ => Err(Error::Invalid(format!(
                "unknown signal '{name}', expected one of {}",
                SIGNAL_NAMES.join(", ")
            ))),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Signal::Zero => 0.0,
            Signal::Constant(c) => *c,
            Signal::Harmonic { a1, w1, a2, w2 } => a1 * (w1 * t).cos() + a2 * (w2 * t).sin(),
            Signal::Triangle => {
                if t < 0.0 {
                    0.0
                } else if t < 0.25 {
                    4.0 * t
                } else if t < 0.75 {
                    -4.0 * t + 2.0
                } else if t < 1.0 {
                    4.0 * t - 4.0
                } else {
                    0.0
                }
            }
            Signal::SineBurst { f_ex, p0 } => {
                let tau = 1.0 / f_ex;
                let t0 = 4.0 * tau;
                let a = (t - t0) / tau;
                p0 * (2.0 * PI * f_ex * t).sin() * (-0.5 * a * a).exp()
            }
            Signal::Ricker { f_ex, f0, t0 } => {
                let x = PI * f_ex * (t - t0);
                let psi = 2.0 * x * x;
                f0 * (1.0 - psi) * (-0.5 * psi).exp()
            }
            Signal::Polynomial(a) => a.iter().rev().fold(0.0, |acc, c| acc * t + c),
        }
    }
}

/// Legendre polynomial values `(P_p(x), P_{p-1}(x))`.
fn legendre_pair(p: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (1.0, x);
    if p == 0 {
        return (1.0, 0.0);
    }
    for k in 1..p {
        let next = ((2 * k + 1) as f64 * x * cur - k as f64 * prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Derivative of the Legendre polynomial `P_p` at `x` (interior points).
pub fn legendre_derivative(p: usize, x: f64) -> f64 {
    let (pp, pm) = legendre_pair(p, x);
    p as f64 * (pm - x * pp) / (1.0 - x * x)
}

/// The `p + 1` Gauss-Lobatto-Legendre nodes on `[-1, 1]`, ascending.
pub fn gll_nodes(p: usize) -> Result<Vec<f64>> {
    if p < 1 {
        return Err(Error::Invalid("GLL order must be at least 1".into()));
    }
    let mut x: Vec<f64> = (0..=p).map(|k| -(PI * k as f64 / p as f64).cos()).collect();
    for xi in x.iter_mut().take(p).skip(1) {
        for _ in 0..100 {
            let (pp, pm) = legendre_pair(p, *xi);
            let dx = (*xi * pp - pm) / ((p + 1) as f64 * pp);
            *xi -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
    }
    x[0] = -1.0;
    x[p] = 1.0;
    let sym: Vec<f64> = (0..=p).map(|i| 0.5 * (x[i] - x[p - i])).collect();
    Ok(sym)
}

/// Lagrange basis polynomial `l` of `nodes`, evaluated at `xi`.
pub fn lagrange_basis(nodes: &[f64], l: usize, xi: f64) -> Result<f64> {
    if l >= nodes.len() {
        return Err(Error::Invalid(format!("basis index {l} out of {}", nodes.len())));
    }
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if nodes[i] == nodes[j] {
                return Err(Error::Invalid(format!("duplicate node {}", nodes[i])));
            }
        }
    }
    Ok(nodes
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != l)
        .map(|(_, &xk)| (xi - xk) / (nodes[l] - xk))
        .product())
}

/// Coefficients `F_k` of `f(t_start + s dt) ~ sum_k F_k (s - 1/2)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcePolynomial {
    pub pf: usize,
    pub coeffs: Vec<Vec<f64>>,
    pub step_index: usize,
}

impl ForcePolynomial {
    pub fn eval(&self, s: f64) -> Vec<f64> {
        let n = self.coeffs.first().map_or(0, |c| c.len());
        let mut out = vec![0.0; n];
        for c in self.coeffs.iter().rev() {
            for (o, ci) in out.iter_mut().zip(c) {
                *o = *o * (s - 0.5) + ci;
            }
        }
        out
    }
}

/// Precomputed interpolation on the mapped GLL nodes of one step.
#[derive(Debug, Clone)]
pub struct ForceFitter {
    pub pf: usize,
    /// Nodes mapped to `s` in `[0, 1]`.
    pub s_nodes: Vec<f64>,
    /// `weights[k][j]`: contribution of sample `j` to coefficient `k`.
    pub weights: Vec<Vec<f64>>,
    samples: Vec<Vec<f64>>,
}

impl ForceFitter {
    pub fn new(pf: usize, n: usize) -> Result<Self> {
        let xi = gll_nodes(pf)?;
        let s_nodes: Vec<f64> = xi.iter().map(|x| 0.5 * (x + 1.0)).collect();
        let np = pf + 1;
        let mut v = vec![0.0; np * np];
        for (j, &s) in s_nodes.iter().enumerate() {
            for k in 0..np {
                v[j * np + k] = (s - 0.5).powi(k as i32);
            }
        }
        let lu = DenseLu::new(np, v)?;
        let mut weights = vec![vec![0.0; np]; np];
        for j in 0..np {
            let mut e = vec![0.0; np];
            e[j] = 1.0;
            lu.solve_in_place(&mut e);
            for k in 0..np {
                weights[k][j] = e[k];
            }
        }
        Ok(Self { pf, s_nodes, weights, samples: vec![vec![0.0; n]; np] })
    }

    /// Fits `sys.force` on `[t_start, t_start + dt]` into `out[k]`.
    pub fn fit_into(&mut self, sys: &SecondOrderSystem, t_start: f64, dt: f64, out: &mut [Vec<f64>]) {
        for (j, &s) in self.s_nodes.iter().enumerate() {
            sys.force.eval(t_start + s * dt, &mut self.samples[j]);
        }
        for (k, o) in out.iter_mut().enumerate() {
            o.iter_mut().for_each(|v| *v = 0.0);
            for (j, smp) in self.samples.iter().enumerate() {
                let w = self.weights[k][j];
                for (oi, si) in o.iter_mut().zip(smp) {
                    *oi += w * si;
                }
            }
        }
    }
}

impl ForceFitter {
    /// Fits a scalar signal on `[t_start, t_start + dt]` into `out[k]`.
    pub fn fit_scalar<F: Fn(f64) -> f64>(&self, f: F, t_start: f64, dt: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (j, &s) in self.s_nodes.iter().enumerate() {
            let v = f(t_start + s * dt);
            for (k, o) in out.iter_mut().enumerate() {
                *o += self.weights[k][j] * v;
            }
        }
    }
}

pub fn fit_force(
    sys: &SecondOrderSystem,
    t_start: f64,
    dt: f64,
    pf: usize,
    step_index: usize,
) -> Result<ForcePolynomial> {
    let mut fitter = ForceFitter::new(pf, sys.dim())?;
    let mut coeffs = vec![vec![0.0; sys.dim()]; pf + 1];
    fitter.fit_into(sys, t_start, dt, &mut coeffs);
    Ok(ForcePolynomial { pf, coeffs, step_index })
}
