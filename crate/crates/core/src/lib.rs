//! High-order implicit time stepping for linear structural dynamics
//! `M u'' + C u' + K u = f(t)`, built on diagonal Padé approximants of the
//! matrix exponential and factored into one shifted solve per root block.
//!
//! The state is kept as `z = [dt u'; u]`; the first-order operator is never
//! assembled. Newmark's trapezoidal rule and a dense exact propagator serve as
//! reference integrators.

pub mod baselines;
pub mod error;
pub mod exec;
pub mod forcing;
pub mod linalg;
pub mod metrics;
pub mod models;
pub mod pade;
pub mod stepper;
pub mod studies;
pub mod system;

pub use error::{Error, Result};
pub use forcing::Signal;
pub use pade::PadeScheme;
pub use stepper::{Integrator, PadeStepper, TimeHistory};
pub use studies::Method;
pub use system::{Force, SecondOrderSystem, StateVector};
