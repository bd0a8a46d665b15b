//! Explicit Runge–Kutta integration of complex ODE systems `y' = f(t, y)`.
//!
//! The adaptive method is Dormand–Prince 5(4) with FSAL, a PI step-size
//! controller and the usual fourth-order continuous extension for sampling
//! between steps. The step sequence is a pure function of the inputs.

use alloc::{vec, vec::Vec};

// Needed for sqrt/powf when std is not linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{error::Error, C64};

/// Right-hand side of an ODE system.
pub trait Rhs {
    fn dim(&self) -> usize;
    fn eval(&mut self, t: f64, y: &[C64], dy: &mut [C64]);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Adaptive Dormand–Prince 5(4).
    Dopri5,
    /// Classical fourth-order Runge–Kutta with a fixed step count.
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Step count for [`Method::Rk4`].
    pub n_steps: usize,
    /// Hard cap on attempted adaptive steps.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Dopri5,
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            n_steps: 20_000,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    /// Relaxed tolerances used inside optimisation loops.
    pub fn search() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            ..Self::default()
        }
    }

    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn rk4(n_steps: usize) -> Self {
        Self {
            method: Method::Rk4,
            n_steps,
            ..Self::default()
        }
    }

    /// Tolerances halved (adaptive) or steps doubled (fixed).
    pub fn refined(&self) -> Self {
        Self {
            rel_tol: self.rel_tol / 2.0,
            abs_tol: self.abs_tol / 2.0,
            n_steps: self.n_steps * 2,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        match self.method {
            Method::Dopri5 => {
                if !(self.rel_tol >= 1e-13 && self.rel_tol < 1.0) {
                    return Err(Error::InvalidConfig("rel_tol must lie in [1e-13, 1)"));
                }
                if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
                    return Err(Error::InvalidConfig("abs_tol must be positive"));
                }
                if self.max_steps == 0 {
                    return Err(Error::InvalidConfig("max_steps must be positive"));
                }
            }
            Method::Rk4 => {
                if self.n_steps < 1000 {
                    return Err(Error::InvalidConfig("n_steps must be at least 1000"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub final_state: Vec<C64>,
    /// States at the requested sample times, in order.
    pub samples: Vec<Vec<C64>>,
    pub stats: Stats,
}

/// Integrate from `t0` to `t1 > t0`, returning the state at `t1` and at every
/// `sample_times` entry (sorted, within `[t0, t1]`).
pub fn integrate<R: Rhs>(
    rhs: &mut R,
    t0: f64,
    t1: f64,
    y0: &[C64],
    cfg: &IntegratorConfig,
    sample_times: &[f64],
) -> Result<Solution, Error> {
    cfg.validate()?;
    if y0.len() != rhs.dim() {
        return Err(Error::DimensionMismatch {
            expected: rhs.dim(),
            got: y0.len(),
        });
    }
    if !(t1 > t0) {
        return Err(Error::InvalidInput(
            "integration interval must have t1 > t0",
        ));
    }
    if sample_times.windows(2).any(|w| w[1] < w[0])
        || sample_times.iter().any(|&s| s < t0 || s > t1)
    {
        return Err(Error::InvalidInput(
            "sample times must be sorted and within [t0, t1]",
        ));
    }
    match cfg.method {
        Method::Dopri5 => dopri5(rhs, t0, t1, y0, cfg, sample_times),
        Method::Rk4 => rk4(rhs, t0, t1, y0, cfg.n_steps, sample_times),
    }
}

#[inline]
fn axpy_into(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for i in 0..out.len() {
        let mut acc = C64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        out[i] = y[i] + acc * h;
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// continuous extension
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

fn err_norm(y: &[C64], y_new: &[C64], err: &[C64], rtol: f64, atol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..y.len() {
        let sr = atol + rtol * y[i].re.abs().max(y_new[i].re.abs());
        let si = atol + rtol * y[i].im.abs().max(y_new[i].im.abs());
        acc += (err[i].re / sr).powi(2) + (err[i].im / si).powi(2);
    }
    (acc / (2 * y.len()) as f64).sqrt()
}

fn initial_step<R: Rhs>(
    rhs: &mut R,
    t0: f64,
    y0: &[C64],
    f0: &[C64],
    span: f64,
    rtol: f64,
    atol: f64,
) -> f64 {
    let n = y0.len();
    let scale = |z: &C64| (atol + rtol * z.re.abs(), atol + rtol * z.im.abs());
    let norm = |v: &[C64]| {
        let s: f64 = v
            .iter()
            .zip(y0)
            .map(|(x, y)| {
                let (sr, si) = scale(y);
                (x.re / sr).powi(2) + (x.im / si).powi(2)
            })
            .sum();
        (s / (2 * n) as f64).sqrt()
    };
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span);
    let y1: Vec<C64> = y0.iter().zip(f0).map(|(y, f)| y + f * h0).collect();
    let mut f1 = vec![C64::new(0.0, 0.0); n];
    rhs.eval(t0 + h0, &y1, &mut f1);
    let df: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&df) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1).min(span)
}

fn dopri5<R: Rhs>(
    rhs: &mut R,
    t0: f64,
    t1: f64,
    y0: &[C64],
    cfg: &IntegratorConfig,
    sample_times: &[f64],
) -> Result<Solution, Error> {
    let n = y0.len();
    let z = C64::new(0.0, 0.0);
    let (rtol, atol) = (cfg.rel_tol, cfg.abs_tol);
    let mut stats = Stats::default();
    let mut samples = Vec::with_capacity(sample_times.len());
    let mut next_sample = 0;
    while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
        samples.push(y0.to_vec());
        next_sample += 1;
    }

    let mut y = y0.to_vec();
    let mut k1 = vec![z; n];
    let mut k2 = vec![z; n];
    let mut k3 = vec![z; n];
    let mut k4 = vec![z; n];
    let mut k5 = vec![z; n];
    let mut k6 = vec![z; n];
    let mut k7 = vec![z; n];
    let mut ytmp = vec![z; n];
    let mut ynew = vec![z; n];
    let mut err = vec![z; n];

    rhs.eval(t0, &y, &mut k1);
    stats.rhs_evals += 1;
    let span = t1 - t0;
    let mut h = initial_step(rhs, t0, &y, &k1, span, rtol, atol);
    stats.rhs_evals += 1;
    let mut t = t0;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;
    let mut attempts = 0usize;

    loop {
        if attempts >= cfg.max_steps {
            return Err(Error::TooManySteps {
                t,
                max_steps: cfg.max_steps,
            });
        }
        attempts += 1;
        let last = t + h * 1.01 >= t1;
        if last {
            h = t1 - t;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(span) {
            return Err(Error::StepUnderflow { t, h });
        }

        axpy_into(&mut ytmp, &y, h, &[(A21, &k1)]);
        rhs.eval(t + C2 * h, &ytmp, &mut k2);
        axpy_into(&mut ytmp, &y, h, &[(A31, &k1), (A32, &k2)]);
        rhs.eval(t + C3 * h, &ytmp, &mut k3);
        axpy_into(&mut ytmp, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        rhs.eval(t + C4 * h, &ytmp, &mut k4);
        axpy_into(
            &mut ytmp,
            &y,
            h,
            &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
        );
        rhs.eval(t + C5 * h, &ytmp, &mut k5);
        axpy_into(
            &mut ytmp,
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let t_new = if last { t1 } else { t + h };
        rhs.eval(t_new, &ytmp, &mut k6);
        axpy_into(
            &mut ynew,
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        rhs.eval(t_new, &ynew, &mut k7);
        stats.rhs_evals += 6;

        for i in 0..n {
            err[i] =
                (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
        }
        let e = err_norm(&y, &ynew, &err, rtol, atol);
        if !e.is_finite() {
            return Err(Error::NonFinite { t });
        }

        let fac11 = e.powf(0.2 - BETA * 0.75);
        if e <= 1.0 {
            stats.accepted += 1;
            // dense output for samples inside (t, t_new]
            if next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
                let mut cont = Dense::new(n);
                cont.build(&y, &ynew, &k1, &k3, &k4, &k5, &k6, &k7, h);
                while next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
                    let ts = sample_times[next_sample];
                    if ts == t_new {
                        samples.push(ynew.clone());
                    } else {
                        samples.push(cont.eval((ts - t) / h));
                    }
                    next_sample += 1;
                }
            }
            core::mem::swap(&mut y, &mut ynew);
            core::mem::swap(&mut k1, &mut k7);
            t = t_new;
            if last {
                break;
            }
            let mut fac = fac11 / fac_old.powf(BETA);
            fac_old = e.max(1e-4);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new;
        } else {
            stats.rejected += 1;
            last_rejected = true;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
        }
    }

    Ok(Solution {
        final_state: y,
        samples,
        stats,
    })
}

struct Dense {
    r: [Vec<C64>; 5],
}

impl Dense {
    fn new(n: usize) -> Self {
        let z = C64::new(0.0, 0.0);
        Self {
            r: [vec![z; n], vec![z; n], vec![z; n], vec![z; n], vec![z; n]],
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        &mut self,
        y: &[C64],
        ynew: &[C64],
        k1: &[C64],
        k3: &[C64],
        k4: &[C64],
        k5: &[C64],
        k6: &[C64],
        k7: &[C64],
        h: f64,
    ) {
        for i in 0..y.len() {
            let dy = ynew[i] - y[i];
            let bspl = k1[i] * h - dy;
            self.r[0][i] = y[i];
            self.r[1][i] = dy;
            self.r[2][i] = bspl;
            self.r[3][i] = dy - k7[i] * h - bspl;
            self.r[4][i] =
                (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h;
        }
    }

    fn eval(&self, theta: f64) -> Vec<C64> {
        let th1 = 1.0 - theta;
        let [r0, r1, r2, r3, r4] = &self.r;
        (0..r0.len())
            .map(|i| r0[i] + (r1[i] + (r2[i] + (r3[i] + r4[i] * th1) * theta) * th1) * theta)
            .collect()
    }
}

fn rk4<R: Rhs>(
    rhs: &mut R,
    t0: f64,
    t1: f64,
    y0: &[C64],
    n_steps: usize,
    sample_times: &[f64],
) -> Result<Solution, Error> {
    let n = y0.len();
    let z = C64::new(0.0, 0.0);
    let h = (t1 - t0) / n_steps as f64;
    let mut stats = Stats::default();
    let mut y = y0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![z; n], vec![z; n], vec![z; n], vec![z; n]);
    let mut tmp = vec![z; n];
    let mut samples = Vec::with_capacity(sample_times.len());
    let mut next_sample = 0;
    while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
        samples.push(y0.to_vec());
        next_sample += 1;
    }
    for step in 0..n_steps {
        let t = t0 + step as f64 * h;
        let t_next = if step + 1 == n_steps {
            t1
        } else {
            t0 + (step + 1) as f64 * h
        };
        let y_old = y.clone();
        rhs.eval(t, &y, &mut k1);
        axpy_into(&mut tmp, &y, h, &[(0.5, &k1)]);
        rhs.eval(t + 0.5 * h, &tmp, &mut k2);
        axpy_into(&mut tmp, &y, h, &[(0.5, &k2)]);
        rhs.eval(t + 0.5 * h, &tmp, &mut k3);
        axpy_into(&mut tmp, &y, h, &[(1.0, &k3)]);
        rhs.eval(t_next, &tmp, &mut k4);
        for i in 0..n {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
        stats.accepted += 1;
        stats.rhs_evals += 4;
        if !y.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite { t: t_next });
        }
        // linear interpolation between fixed steps; steps are fine enough for plotting
        while next_sample < sample_times.len() && sample_times[next_sample] <= t_next {
            let theta = (sample_times[next_sample] - t) / h;
            samples.push(
                y_old
                    .iter()
                    .zip(&y)
                    .map(|(a, b)| a + (b - a) * theta)
                    .collect(),
            );
            next_sample += 1;
        }
    }
    Ok(Solution {
        final_state: y,
        samples,
        stats,
    })
}
