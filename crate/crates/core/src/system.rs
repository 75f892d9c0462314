//! Problem definition `M u'' + C u' + K u = f(t)` and the scaled state vector.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forcing::Signal;
use crate::linalg::SparseRealMatrix;

/// Force callback: writes `f(t)` into the output slice.
pub type ForceFn = Arc<dyn Fn(f64, &mut [f64]) + Send + Sync>;

/// Time-dependent load.
#[derive(Clone)]
pub enum Force {
    None,
    /// Fixed spatial distribution scaled by a scalar signal.
    Separable { load: Vec<f64>, signal: Signal },
    Custom(ForceFn),
}

impl Force {
    pub fn eval(&self, t: f64, out: &mut [f64]) {
        match self {
            Force::None => out.iter_mut().for_each(|v| *v = 0.0),
            Force::Separable { load, signal } => {
                let s = signal.eval(t);
                for (o, l) in out.iter_mut().zip(load) {
                    *o = l * s;
                }
            }
            Force::Custom(f) => f(t, out),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Force::None)
    }

    pub fn custom<F: Fn(f64, &mut [f64]) + Send + Sync + 'static>(f: F) -> Self {
        Force::Custom(Arc::new(f))
    }
}

impl fmt::Debug for Force {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Force::None => write!(f, "None"),
            Force::Separable { signal, .. } => write!(f, "Separable({signal:?})"),
            Force::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Linear time-invariant second-order system with initial conditions.
#[derive(Debug, Clone)]
pub struct SecondOrderSystem {
    pub m: SparseRealMatrix,
    pub c: SparseRealMatrix,
    pub k: SparseRealMatrix,
    pub force: Force,
    pub u0: Vec<f64>,
    pub v0: Vec<f64>,
}

impl SecondOrderSystem {
    pub fn new(
        m: SparseRealMatrix,
        c: SparseRealMatrix,
        k: SparseRealMatrix,
        force: Force,
        u0: Vec<f64>,
        v0: Vec<f64>,
    ) -> Result<Self> {
        let n = m.dim();
        for (name, d) in [("C", c.dim()), ("K", k.dim()), ("u0", u0.len()), ("v0", v0.len())] {
            if d != n {
                return Err(Error::Dimension(format!("{name} has size {d}, M has {n}")));
            }
        }
        if let Force::Separable { load, .. } = &force {
            if load.len() != n {
                return Err(Error::Dimension(format!("load has size {}, M has {n}", load.len())));
            }
        }
        Ok(Self { m, c, k, force, u0, v0 })
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn eval_force(&self, t: f64) -> Vec<f64> {
        let mut f = vec![0.0; self.dim()];
        self.force.eval(t, &mut f);
        f
    }
}

/// `z = [v; u]` with `v = dt * u'`, the derivative in step-local time.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub dt: f64,
}

impl StateVector {
    pub fn new(v: Vec<f64>, u: Vec<f64>, dt: f64) -> Result<Self> {
        if v.len() != u.len() {
            return Err(Error::Dimension(format!("{} vs {}", v.len(), u.len())));
        }
        if !(dt > 0.0) {
            return Err(Error::Invalid(format!("time step must be positive, got {dt}")));
        }
        Ok(Self { v, u, dt })
    }

    /// Same physical state expressed for another step size.
    pub fn rescaled(&self, dt: f64) -> Result<Self> {
        let (u, v) = physical_from_state(self);
        state_from_physical(&u, &v, dt)
    }

    /// Concatenated `[v; u]`.
    pub fn stacked(&self) -> Vec<f64> {
        let mut z = self.v.clone();
        z.extend_from_slice(&self.u);
        z
    }
}

pub fn state_from_physical(u: &[f64], v: &[f64], dt: f64) -> Result<StateVector> {
    StateVector::new(v.iter().map(|x| x * dt).collect(), u.to_vec(), dt)
}

pub fn state_from_ic(sys: &SecondOrderSystem, dt: f64) -> Result<StateVector> {
    state_from_physical(&sys.u0, &sys.v0, dt)
}

/// Returns `(u, u')`.
pub fn physical_from_state(z: &StateVector) -> (Vec<f64>, Vec<f64>) {
    (z.u.clone(), z.v.iter().map(|x| x / z.dt).collect())
}
