//! Error measures and characterization of integrators: relative L2 error,
//! amplitude error, period elongation, convergence slopes, SDOF spectral
//! radius and the bandwidth of a sampled signal.

use std::collections::VecDeque;

use num::complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Flavor of the L2 error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L2Form {
    /// `100 * sqrt(int e^2 / int u_ref^2)`, which scales like the norm of the error.
    Root,
    /// `100 * int e^2 / int u_ref^2` without the square root.
    Squared,
}

/// Errors below this level (in percent) are treated as the round-off plateau.
pub const PLATEAU_PCT: f64 = 1e-8;

fn trapezoid_ratio(num: &[f64], refr: &[f64]) -> Result<f64> {
    if num.len() != refr.len() || num.len() < 2 {
        return Err(Error::Dimension(format!(
            "series of {} and {} samples",
            num.len(),
            refr.len()
        )));
    }
    let w = |i: usize| if i == 0 || i + 1 == num.len() { 0.5 } else { 1.0 };
    let mut e2 = 0.0;
    let mut r2 = 0.0;
    for i in 0..num.len() {
        let d = refr[i] - num[i];
        e2 += w(i) * d * d;
        r2 += w(i) * refr[i] * refr[i];
    }
    if !(r2 > 0.0) {
        return Err(Error::Invalid("reference signal has zero energy".into()));
    }
    Ok(e2 / r2)
}

/// Relative L2 error in percent between two series on a common uniform grid,
/// integrated with the composite trapezoid rule.
pub fn l2_error(u_num: &[f64], u_ref: &[f64]) -> Result<f64> {
    l2_error_with(u_num, u_ref, L2Form::Root)
}

pub fn l2_error_with(u_num: &[f64], u_ref: &[f64], form: L2Form) -> Result<f64> {
    let r = trapezoid_ratio(u_num, u_ref)?;
    Ok(match form {
        L2Form::Root => 100.0 * r.sqrt(),
        L2Form::Squared => 100.0 * r,
    })
}

/// L2 error against a reference evaluated at `t_i = i dt`.
pub fn l2_error_fn<F: Fn(f64) -> f64>(u_num: &[f64], dt: f64, u_ref: F) -> Result<f64> {
    let r: Vec<f64> = (0..u_num.len()).map(|i| u_ref(i as f64 * dt)).collect();
    l2_error(u_num, &r)
}

/// Natural cubic spline through uniformly spaced samples.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    t0: f64,
    h: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(t0: f64, h: f64, y: &[f64]) -> Result<Self> {
        let n = y.len();
        if n < 2 {
            return Err(Error::Invalid("spline needs at least two samples".into()));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal system for interior second derivatives (Thomas algorithm).
            let k = n - 2;
            let mut c = vec![0.0; k];
            let mut d = vec![0.0; k];
            for i in 0..k {
                let rhs = 6.0 * (y[i + 2] - 2.0 * y[i + 1] + y[i]) / (h * h);
                let diag = if i == 0 { 4.0 } else { 4.0 - c[i - 1] };
                c[i] = 1.0 / diag;
                d[i] = if i == 0 { rhs / diag } else { (rhs - d[i - 1]) / diag };
            }
            m[k] = d[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = d[i] - c[i] * m[i + 2];
            }
        }
        Ok(Self { t0, h, y: y.to_vec(), m })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.y.len();
        let x = ((t - self.t0) / self.h).clamp(0.0, (n - 1) as f64);
        let i = (x.floor() as usize).min(n - 2);
        let a = (i + 1) as f64 - x;
        let b = x - i as f64;
        let h2 = self.h * self.h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h2 / 6.0
    }
}

const AE_WINDOW: usize = 20;

/// Streaming amplitude error: mean over `k = 1..=N` of
/// `|u_ref(kT) - u_num(kT)| / |u_ref(kT)|` in percent. Off-grid instants are
/// read from a natural cubic spline through the neighbouring samples.
#[derive(Debug, Clone)]
pub struct AmplitudeTracker<F: Fn(f64) -> f64> {
    dt: f64,
    period: f64,
    n_periods: usize,
    u_ref: F,
    window: VecDeque<f64>,
    first_index: usize,
    next_k: usize,
    sum: f64,
    count: usize,
}

impl<F: Fn(f64) -> f64> AmplitudeTracker<F> {
    pub fn new(dt: f64, period: f64, n_periods: usize, u_ref: F) -> Self {
        Self {
            dt,
            period,
            n_periods,
            u_ref,
            window: VecDeque::with_capacity(AE_WINDOW + 1),
            first_index: 0,
            next_k: 1,
            sum: 0.0,
            count: 0,
        }
    }

    /// Steps needed to cover all `N` periods, plus spline margin.
    pub fn steps_needed(&self) -> usize {
        (self.n_periods as f64 * self.period / self.dt).ceil() as usize + AE_WINDOW
    }

    pub fn done(&self) -> bool {
        self.count >= self.n_periods
    }

    /// Feeds sample `u_i = u(i dt)`; samples must arrive in order from `i = 0`.
    pub fn push(&mut self, u: f64) {
        self.window.push_back(u);
        if self.window.len() > AE_WINDOW {
            self.window.pop_front();
            self.first_index += 1;
        }
        while !self.done() {
            let tk = self.next_k as f64 * self.period;
            let x = tk / self.dt;
            let last = self.first_index + self.window.len() - 1;
            let r = x.round();
            let on_grid = (x - r).abs() <= 1e-9 * x.max(1.0);
            let val = if on_grid {
                let idx = r as usize;
                if idx > last {
                    return;
                }
                if idx < self.first_index {
                    f64::NAN
                } else {
                    self.window[idx - self.first_index]
                }
            } else {
                // Wait until the instant is centered in the window.
                if x + (AE_WINDOW / 2) as f64 > last as f64 {
                    return;
                }
                let ys: Vec<f64> = self.window.iter().copied().collect();
                match CubicSpline::new(self.first_index as f64 * self.dt, self.dt, &ys) {
                    Ok(s) => s.eval(tk),
                    Err(_) => f64::NAN,
                }
            };
            let r = (self.u_ref)(tk);
            self.sum += ((r - val) / r).abs();
            self.count += 1;
            self.next_k += 1;
        }
    }

    /// Mean relative error in percent; `None` until all periods are seen.
    pub fn result(&self) -> Option<f64> {
        if self.done() {
            Some(100.0 * self.sum / self.count as f64)
        } else {
            None
        }
    }
}

/// Amplitude error of a stored series sampled at `t_i = i dt`.
pub fn amplitude_error<F: Fn(f64) -> f64>(
    u_num: &[f64],
    dt: f64,
    omega: f64,
    n_periods: usize,
    u_ref: F,
) -> Result<f64> {
    let mut tr = AmplitudeTracker::new(dt, 2.0 * std::f64::consts::PI / omega, n_periods, u_ref);
    for &u in u_num {
        tr.push(u);
    }
    tr.result()
        .ok_or_else(|| Error::Invalid(format!("series too short for {n_periods} periods")))
}

/// Outcome of a period-elongation measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodElongation {
    pub pe_pct: f64,
    pub peaks: usize,
    /// Fewer peaks than requested periods were found.
    pub partial: bool,
}

/// Streaming peak detector: positive local maxima refined by a parabola
/// through three samples; the `k`-th peak is compared against `kT`.
#[derive(Debug, Clone)]
pub struct PeakTracker {
    dt: f64,
    period: f64,
    n_periods: usize,
    prev: [f64; 2],
    seen: usize,
    peaks: usize,
    sum: f64,
}

impl PeakTracker {
    pub fn new(dt: f64, period: f64, n_periods: usize) -> Self {
        Self { dt, period, n_periods, prev: [f64::NAN; 2], seen: 0, peaks: 0, sum: 0.0 }
    }

    pub fn done(&self) -> bool {
        self.peaks >= self.n_periods
    }

    pub fn push(&mut self, u: f64) {
        let [y0, y1] = self.prev;
        if self.seen >= 2 && y1 > y0 && y1 >= u && y1 > 0.0 && !self.done() {
            let denom = y0 - 2.0 * y1 + u;
            let off = if denom != 0.0 { 0.5 * (y0 - u) / denom } else { 0.0 };
            let t = ((self.seen - 1) as f64 + off) * self.dt;
            self.peaks += 1;
            let tk = self.peaks as f64 * self.period;
            self.sum += (t - tk) / tk;
        }
        self.prev = [y1, u];
        self.seen += 1;
    }

    pub fn result(&self) -> PeriodElongation {
        let pe = if self.peaks > 0 { 100.0 * self.sum / self.peaks as f64 } else { f64::NAN };
        PeriodElongation { pe_pct: pe, peaks: self.peaks, partial: self.peaks < self.n_periods }
    }
}

/// Period elongation of a stored series whose peaks sit at `kT` when exact.
pub fn period_elongation(u_num: &[f64], dt: f64, omega: f64, n_periods: usize) -> PeriodElongation {
    let mut tr = PeakTracker::new(dt, 2.0 * std::f64::consts::PI / omega, n_periods);
    for &u in u_num {
        tr.push(u);
    }
    tr.result()
}

/// Least-squares slope of `log(error)` against `log(dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub used: Vec<(f64, f64)>,
    pub plateau_reached: bool,
}

/// Fits on points with `plateau <= error <= upper`; `upper` excludes the
/// pre-asymptotic regime at coarse steps.
pub fn convergence_slope_in(points: &[(f64, f64)], plateau: f64, upper: f64) -> Result<SlopeFit> {
    let used: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(dt, e)| dt > 0.0 && e.is_finite() && e >= plateau && e <= upper)
        .collect();
    let plateau_reached = points.iter().any(|&(_, e)| e < plateau);
    if used.len() < 3 {
        return Err(Error::Invalid(format!(
            "need at least 3 pre-plateau points, have {}",
            used.len()
        )));
    }
    let n = used.len() as f64;
    let xs: Vec<f64> = used.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("all step sizes are equal".into()));
    }
    Ok(SlopeFit { slope: sxy / sxx, used, plateau_reached })
}

pub fn convergence_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    convergence_slope_in(points, PLATEAU_PCT, f64::INFINITY)
}

/// Step size at which an error curve first drops to `level`, by log-log
/// interpolation between the bracketing ladder points (largest `dt` first).
pub fn crossing_dt(points: &[(f64, f64)], level: f64) -> Option<f64> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| b.0.total_cmp(&a.0));
    for w in p.windows(2) {
        let ((d0, e0), (d1, e1)) = (w[0], w[1]);
        if e0 > level && e1 <= level {
            let f = (level.ln() - e0.ln()) / (e1.ln() - e0.ln());
            return Some((d0.ln() + f * (d1.ln() - d0.ln())).exp());
        }
    }
    p.first().filter(|q| q.1 <= level).map(|q| q.0)
}

/// Largest modulus of the eigenvalues of a real 2x2 matrix (row-major).
pub fn spectral_radius_2x2(a: [[f64; 2]; 2]) -> f64 {
    let tr = a[0][0] + a[1][1];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let disc = Complex64::new(tr * tr / 4.0 - det, 0.0).sqrt();
    let l1 = Complex64::new(tr / 2.0, 0.0) + disc;
    let l2 = Complex64::new(tr / 2.0, 0.0) - disc;
    l1.norm().max(l2.norm())
}

/// Magnitude spectrum of `samples` zero-padded to `n_fft` points; returns the
/// frequency of the last bin whose magnitude reaches `threshold * max`.
pub fn fmax_from_spectrum(samples: &[f64], fs: f64, n_fft: usize, threshold: f64) -> Result<f64> {
    if samples.is_empty() || n_fft < samples.len() {
        return Err(Error::Invalid(format!(
            "need 0 < samples ({}) <= n_fft ({n_fft})",
            samples.len()
        )));
    }
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(n_fft, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n_fft).process(&mut buf);
    let half = n_fft / 2 + 1;
    let mags: Vec<f64> = buf[..half].iter().map(|c| c.norm()).collect();
    let max = mags.iter().copied().fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(Error::Invalid("signal is identically zero".into()));
    }
    let last = mags.iter().rposition(|&m| m >= threshold * max).unwrap_or(0);
    Ok(last as f64 * fs / n_fft as f64)
}
