//! Sweep drivers behind the command-line studies: SDOF convergence ladders,
//! amplitude/period error at long times, rod convergence and per-step cost.
//! Independent sweep points run through [`exec::map`]; results always come
//! back in ladder order.

use std::time::Instant;

use crate::baselines::{ExactStepper, Newmark};
use crate::error::{Error, Result};
use crate::exec;
use crate::metrics::{self, AmplitudeTracker, L2Form, PeakTracker};
use crate::linalg::SparseMatrix;
use crate::metrics::spectral_radius_2x2;
use crate::models::{sdof_analytic, sdof_system, FeModel, SdofCase, ROD_OBSERVATION};
use crate::pade::PadeScheme;
use crate::stepper::{displacement_series, Integrator, PadeStepper};
use crate::system::{Force, SecondOrderSystem};

/// Time integrator selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Pade(usize),
    Newmark,
    Exact,
}

impl Method {
    /// Parses `newmark`, `exact`, `pade<M>` or a bare Padé index `M`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "newmark" | "trapezoidal" => Ok(Self::Newmark),
            "exact" => Ok(Self::Exact),
            _ => {
                let digits = s.strip_prefix("pade").unwrap_or(&s);
                let m: usize = digits
                    .parse()
                    .map_err(|_| Error::Parse(format!("unknown integrator '{s}'")))?;
                if m == 0 {
                    return Err(Error::Invalid("Padé index must be at least 1".into()));
                }
                Ok(Self::Pade(m))
            }
        }
    }

    /// Accuracy order: `2M` for Padé, 2 for Newmark, 0 for the exact scheme.
    pub fn accuracy_order(&self) -> usize {
        match self {
            Self::Pade(m) => 2 * m,
            Self::Newmark => 2,
            Self::Exact => 0,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Pade(m) => format!("pade{m}"),
            Self::Newmark => "newmark".into(),
            Self::Exact => "exact".into(),
        }
    }
}

/// Builds an integrator; `pf` overrides the force-polynomial degree.
pub fn make_integrator(
    sys: &SecondOrderSystem,
    method: Method,
    dt: f64,
    pf: Option<usize>,
) -> Result<Box<dyn Integrator>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Invalid(format!("time step must be positive, got {dt}")));
    }
    Ok(match method {
        Method::Pade(m) => {
            let scheme = match pf {
                Some(p) => PadeScheme::new(m, p)?,
                None => PadeScheme::with_default_pf(m)?,
            };
            Box::new(PadeStepper::new(sys, scheme, dt)?)
        }
        Method::Newmark => Box::new(Newmark::new(sys, dt)?),
        Method::Exact => Box::new(ExactStepper::new(sys, dt, pf.unwrap_or(4))?),
    })
}

/// Number of steps covering `t_end`, rounded up.
pub fn step_count(t_end: f64, dt: f64) -> usize {
    let r = t_end / dt;
    let n = r.round();
    if (r - n).abs() <= 1e-9 * r.max(1.0) {
        n as usize
    } else {
        r.ceil() as usize
    }
}

/// Ladder `dt_k = start * factor^k`, strictly decreasing.
pub fn geometric_ladder(start: f64, factor: f64, count: usize) -> Result<Vec<f64>> {
    if !(start > 0.0) || !(factor > 0.0 && factor < 1.0) || count == 0 {
        return Err(Error::Invalid(format!(
            "ladder needs start > 0, 0 < factor < 1, count > 0 (got {start}, {factor}, {count})"
        )));
    }
    Ok((0..count).map(|k| start * factor.powi(k as i32)).collect())
}

/// Steps per period for SDOF ladders, multiples of four so the kinks of the
/// triangular load fall on step boundaries.
pub const SDOF_STEPS_PER_PERIOD: [usize; 12] = [8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256, 384];

/// Simulated time for SDOF convergence runs.
pub const SDOF_T_END: f64 = 10.0;

/// One ladder point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub dt: f64,
    pub error: f64,
}

/// `epsilon_L2` of one SDOF run against the closed-form solution.
pub fn sdof_error(case: &SdofCase, method: Method, dt: f64, t_end: f64, form: L2Form) -> Result<f64> {
    let sys = sdof_system(case)?;
    let mut integ = make_integrator(&sys, method, dt, None)?;
    let n = step_count(t_end, dt);
    let u = displacement_series(integ.as_mut(), n, 0)?;
    let r: Vec<f64> = (0..u.len()).map(|i| sdof_analytic(case, i as f64 * dt).0).collect();
    metrics::l2_error_with(&u, &r, form)
}

pub fn sdof_convergence(
    case: &SdofCase,
    method: Method,
    dts: &[f64],
    t_end: f64,
    form: L2Form,
) -> Result<Vec<SweepPoint>> {
    exec::map(dts, |&dt| sdof_error(case, method, dt, t_end, form).map(|error| SweepPoint { dt, error }))
        .into_iter()
        .collect()
}

/// Amplitude error and period elongation for SDOF case 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeAePoint {
    pub method: Method,
    pub dt_over_t: f64,
    pub ae_pct: f64,
    pub pe_pct: f64,
    pub pe_partial: bool,
}

/// Runs SDOF case 1 for `n_periods` natural periods, streaming the samples
/// into both trackers so nothing of size `steps` is stored.
pub fn peae_point(method: Method, dt_over_t: f64, n_periods: usize) -> Result<PeAePoint> {
    let case = SdofCase::table(1)?;
    let sys = sdof_system(&case)?;
    let period = case.period();
    let dt = dt_over_t * period;
    let mut integ = make_integrator(&sys, method, dt, None)?;
    let u0 = case.u0;
    let omega = case.omega;
    let mut ae = AmplitudeTracker::new(dt, period, n_periods, move |t| u0 * (omega * t).cos());
    let mut pe = PeakTracker::new(dt, period, n_periods);
    // Peaks of a strongly dispersive scheme arrive late; allow 4x the nominal span.
    let max_steps = 4 * ae.steps_needed();
    ae.push(integ.state().1[0]);
    pe.push(integ.state().1[0]);
    for _ in 0..max_steps {
        if ae.done() && pe.done() {
            break;
        }
        integ.advance()?;
        let u = integ.state().1[0];
        ae.push(u);
        pe.push(u);
    }
    let ae_pct = ae
        .result()
        .ok_or_else(|| Error::Numerical("amplitude tracker did not complete".into()))?;
    let pr = pe.result();
    Ok(PeAePoint { method, dt_over_t, ae_pct, pe_pct: pr.pe_pct, pe_partial: pr.partial })
}

pub fn peae_sweep(methods: &[Method], ratios: &[f64], n_periods: usize) -> Result<Vec<PeAePoint>> {
    let jobs: Vec<(Method, f64)> =
        methods.iter().flat_map(|&m| ratios.iter().map(move |&r| (m, r))).collect();
    exec::map(&jobs, |&(m, r)| peae_point(m, r, n_periods)).into_iter().collect()
}

/// Unforced unit-mass oscillator starting from `u0`, `u0'`.
pub fn free_oscillator(omega: f64, zeta: f64, u0: f64, v0: f64) -> Result<SecondOrderSystem> {
    let m = SparseMatrix::from_triplets(1, &[(0, 0, 1.0)])?;
    let c = SparseMatrix::from_triplets(1, &[(0, 0, 2.0 * zeta * omega)])?;
    let k = SparseMatrix::from_triplets(1, &[(0, 0, omega * omega)])?;
    SecondOrderSystem::new(m, c, k, Force::None, vec![u0], vec![v0])
}

/// One-step amplification matrix of `method` on the scaled state `[dt u'; u]`,
/// assembled column by column from the basis states `[1; 0]` and `[0; 1]`.
pub fn sdof_amplification(method: Method, omega: f64, zeta: f64, dt: f64) -> Result<[[f64; 2]; 2]> {
    let mut a = [[0.0; 2]; 2];
    for (col, (u0, v0)) in [(0.0, 1.0 / dt), (1.0, 0.0)].into_iter().enumerate() {
        let sys = free_oscillator(omega, zeta, u0, v0)?;
        let mut integ = make_integrator(&sys, method, dt, None)?;
        integ.advance()?;
        let (v, u) = integ.state();
        a[0][col] = v[0];
        a[1][col] = u[0];
    }
    Ok(a)
}

/// Spectral radius of [`sdof_amplification`].
pub fn sdof_spectral_radius(method: Method, omega: f64, zeta: f64, dt: f64) -> Result<f64> {
    Ok(spectral_radius_2x2(sdof_amplification(method, omega, zeta, dt)?))
}

/// Largest relative change of `(u'^2 + omega^2 u^2) / 2` over `steps` steps
/// of the free undamped oscillator started at `u = 1`.
pub fn sdof_energy_drift(method: Method, omega: f64, dt: f64, steps: usize) -> Result<f64> {
    let sys = free_oscillator(omega, 0.0, 1.0, 0.0)?;
    let mut integ = make_integrator(&sys, method, dt, None)?;
    let energy = |v: f64, u: f64| 0.5 * ((v / dt).powi(2) + omega * omega * u * u);
    let (v, u) = integ.state();
    let e0 = energy(v[0], u[0]);
    let mut worst = 0.0f64;
    for _ in 0..steps {
        integ.advance()?;
        let (v, u) = integ.state();
        worst = worst.max((energy(v[0], u[0]) - e0).abs() / e0);
    }
    Ok(worst)
}

/// Rod displacement history at the observation dof.
pub fn rod_history(model: &FeModel, method: Method, dt: f64, t_sim: f64) -> Result<Vec<f64>> {
    let (dof, _) = model.nearest_dof(ROD_OBSERVATION[0], ROD_OBSERVATION[1], 0)?;
    let mut integ = make_integrator(&model.sys, method, dt, None)?;
    displacement_series(integ.as_mut(), step_count(t_sim, dt), dof)
}

/// Reference history sampled on a coarser grid whose step is an integer
/// multiple of the reference step.
pub fn subsample(reference: &[f64], ref_dt: f64, dt: f64) -> Result<Vec<f64>> {
    let ratio = dt / ref_dt;
    let k = ratio.round();
    if k < 1.0 || (ratio - k).abs() > 1e-9 * ratio {
        return Err(Error::Invalid(format!(
            "step {dt} is not an integer multiple of the reference step {ref_dt}"
        )));
    }
    Ok(reference.iter().step_by(k as usize).copied().collect())
}

/// Rod convergence of one method against a stored reference history.
pub fn rod_convergence(
    model: &FeModel,
    method: Method,
    dts: &[f64],
    t_sim: f64,
    reference: &[f64],
    ref_dt: f64,
    form: L2Form,
) -> Result<Vec<SweepPoint>> {
    exec::map(dts, |&dt| {
        let u = rod_history(model, method, dt, t_sim)?;
        let r = subsample(reference, ref_dt, dt)?;
        if r.len() != u.len() {
            return Err(Error::Dimension(format!(
                "reference has {} samples on the grid of {dt}, run has {}",
                r.len(),
                u.len()
            )));
        }
        metrics::l2_error_with(&u, &r, form).map(|error| SweepPoint { dt, error })
    })
    .into_iter()
    .collect()
}

/// Wall-clock split between setup (factorizations) and stepping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub method: Method,
    pub setup_s: f64,
    pub per_step_s: f64,
    pub steps: usize,
}

/// Median of `repeats` timed runs of `steps` steps each. Runs sequentially so
/// timings are not disturbed by other sweep points.
pub fn time_method(sys: &SecondOrderSystem, method: Method, dt: f64, steps: usize, repeats: usize) -> Result<Timing> {
    if steps == 0 || repeats == 0 {
        return Err(Error::Invalid("timing needs steps > 0 and repeats > 0".into()));
    }
    let mut setup = Vec::with_capacity(repeats);
    let mut stepping = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let t0 = Instant::now();
        let mut integ = make_integrator(sys, method, dt, None)?;
        let t1 = Instant::now();
        for _ in 0..steps {
            integ.advance()?;
        }
        let t2 = Instant::now();
        setup.push((t1 - t0).as_secs_f64());
        stepping.push((t2 - t1).as_secs_f64() / steps as f64);
    }
    Ok(Timing { method, setup_s: median(&mut setup), per_step_s: median(&mut stepping), steps })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
