//! Fourier-series modulation waveforms.
//!
//! A series `[a_0, a_1, ..., a_N]` (MHz) denotes the real function
//!
//! ```text
//! f(t) = 2π · (a_0 + Σ_{n=1..N} [a_n e^{2πint/τ} + a_n* e^{-2πint/τ}]) / (2N+1)
//! ```
//!
//! evaluated in rad/μs.

use alloc::vec::Vec;

use crate::{error::Error, C64, TWO_PI};

/// Default gate duration / reference period in μs.
pub const DEFAULT_TAU: f64 = 0.25;

/// Number of grid points used to locate waveform and slope peaks.
pub const PEAK_GRID: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    coeffs: Vec<C64>,
}

impl FourierSeries {
    /// Coefficients in MHz. `a_0` must be real.
    pub fn new(coeffs: Vec<C64>) -> Result<Self, Error> {
        match coeffs.first() {
            None => Err(Error::InvalidInput("Fourier series needs at least a_0")),
            Some(a0) if a0.im != 0.0 => Err(Error::InvalidInput("a_0 must be real")),
            Some(_)
                if coeffs
                    .iter()
                    .any(|c| !c.re.is_finite() || !c.im.is_finite()) =>
            {
                Err(Error::InvalidInput("non-finite Fourier coefficient"))
            }
            Some(_) => Ok(Self { coeffs }),
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self, Error> {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Single-term series, i.e. a constant of `value_mhz` × 2π rad/μs.
    pub fn constant(value_mhz: f64) -> Self {
        Self {
            coeffs: alloc::vec![C64::new(value_mhz, 0.0)],
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// N + 1.
    pub fn n_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Highest harmonic N.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    fn norm_factor(&self) -> f64 {
        TWO_PI / (2 * self.order() + 1) as f64
    }

    /// Value in rad/μs.
    pub fn eval(&self, t: f64, tau: f64) -> f64 {
        let mut acc = self.coeffs[0].re;
        if self.coeffs.len() > 1 {
            let z = C64::from_polar(1.0, TWO_PI * t / tau);
            let mut zn = C64::new(1.0, 0.0);
            for a in &self.coeffs[1..] {
                zn *= z;
                acc += 2.0 * (a * zn).re;
            }
        }
        self.norm_factor() * acc
    }

    /// Time derivative in rad/μs².
    pub fn derivative(&self, t: f64, tau: f64) -> f64 {
        if self.coeffs.len() == 1 {
            return 0.0;
        }
        let w = TWO_PI / tau;
        let z = C64::from_polar(1.0, w * t);
        let mut zn = C64::new(1.0, 0.0);
        let mut acc = 0.0;
        for (n, a) in self.coeffs[1..].iter().enumerate() {
            zn *= z;
            let k = (n + 1) as f64 * w;
            // d/dt 2Re(a e^{ikt}) = 2Re(i k a e^{ikt}) = -2k Im(a e^{ikt})
            acc -= 2.0 * k * (a * zn).im;
        }
        self.norm_factor() * acc
    }

    /// `∫_0^t f(s) ds` in rad.
    pub fn integral(&self, t: f64, tau: f64) -> f64 {
        let mut acc = self.coeffs[0].re * t;
        if self.coeffs.len() > 1 {
            let w = TWO_PI / tau;
            let z = C64::from_polar(1.0, w * t);
            let mut zn = C64::new(1.0, 0.0);
            for (n, a) in self.coeffs[1..].iter().enumerate() {
                zn *= z;
                let k = (n + 1) as f64 * w;
                // 2Re(a (e^{ikt} - 1) / (ik))
                let term = a * (zn - 1.0) / C64::new(0.0, k);
                acc += 2.0 * term.re;
            }
        }
        self.norm_factor() * acc
    }

    /// Largest |f| over a uniform grid of `points` samples spanning [0, τ].
    pub fn peak_abs(&self, tau: f64, points: usize) -> f64 {
        grid_max(points, tau, |t| self.eval(t, tau).abs())
    }

    /// Largest |f'| over a uniform grid of `points` samples spanning [0, τ].
    pub fn peak_slope(&self, tau: f64, points: usize) -> f64 {
        grid_max(points, tau, |t| self.derivative(t, tau).abs())
    }

    /// Multiply the whole waveform by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Add a constant `offset` (rad/μs) to the waveform, through `a_0`.
    pub fn offset(&self, offset: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0].re += offset / self.norm_factor();
        Self { coeffs }
    }

    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }

    /// The series of the pointwise product `f(t)·g(t)`, exact (order adds).
    pub fn product(&self, other: &Self) -> Self {
        let na = self.order() as isize;
        let nb = other.order() as isize;
        let n = na + nb;
        let full = |s: &Self, k: isize| -> C64 {
            if k >= 0 {
                s.coeffs[k as usize]
            } else {
                s.coeffs[(-k) as usize].conj()
            }
        };
        let scale = TWO_PI * (2 * n + 1) as f64 / ((2 * na + 1) * (2 * nb + 1)) as f64;
        let mut coeffs = Vec::with_capacity(n as usize + 1);
        for k in 0..=n {
            let mut d = C64::new(0.0, 0.0);
            for m in -na..=na {
                let j = k - m;
                if (-nb..=nb).contains(&j) {
                    d += full(self, m) * full(other, j);
                }
            }
            coeffs.push(d * scale);
        }
        coeffs[0].im = 0.0;
        Self { coeffs }
    }
}

fn grid_max(points: usize, tau: f64, f: impl Fn(f64) -> f64) -> f64 {
    let points = points.max(2);
    (0..points)
        .map(|k| f(tau * k as f64 / (points - 1) as f64))
        .fold(0.0, f64::max)
}

/// How the rotating-frame phase Φ(t) on the mixed-laser triplet couplings is
/// formed from the detuning waveforms.
///
/// The two conventions coincide for constant detunings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// Φ(t) = ∫₀ᵗ (Δ0 − Δ1) ds. Gauge-consistent with the two-atom product
    /// basis for arbitrary modulation.
    #[default]
    Integrated,
    /// Φ(t) = (Δ0(t) − Δ1(t))·t, the constant-detuning expression evaluated
    /// with instantaneous detunings. Needed to reproduce waveforms that were
    /// designed against it; has no product-basis counterpart when the
    /// detunings vary in time.
    Instantaneous,
}

impl PhaseConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseConvention::Integrated => "integrated",
            PhaseConvention::Instantaneous => "instantaneous",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "integrated" => Some(PhaseConvention::Integrated),
            "instantaneous" => Some(PhaseConvention::Instantaneous),
            _ => None,
        }
    }
}

/// The complete pulse program: two Rabi frequencies, two detunings
/// (ω_transition − ω_laser) and the gate duration.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformSet {
    pub omega0: FourierSeries,
    pub omega1: FourierSeries,
    pub delta0: FourierSeries,
    pub delta1: FourierSeries,
    /// Gate duration and Fourier period, μs.
    pub tau: f64,
    pub phase_convention: PhaseConvention,
}

/// All drive quantities at one instant, rad/μs (phase in rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drive {
    pub omega0: f64,
    pub omega1: f64,
    pub delta0: f64,
    pub delta1: f64,
    /// Φ(t) multiplying the mixed-laser triplet couplings.
    pub phase: f64,
    /// dΦ/dt.
    pub phase_rate: f64,
}

impl WaveformSet {
    pub fn new(
        omega0: FourierSeries,
        omega1: FourierSeries,
        delta0: FourierSeries,
        delta1: FourierSeries,
        tau: f64,
    ) -> Result<Self, Error> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidInput("tau must be positive and finite"));
        }
        Ok(Self {
            omega0,
            omega1,
            delta0,
            delta1,
            tau,
            phase_convention: PhaseConvention::default(),
        })
    }

    pub fn with_phase_convention(mut self, convention: PhaseConvention) -> Self {
        self.phase_convention = convention;
        self
    }

    /// Waveforms with every drive switched off.
    pub fn idle(tau: f64) -> Self {
        let z = FourierSeries::zero();
        Self {
            omega0: z.clone(),
            omega1: z.clone(),
            delta0: z.clone(),
            delta1: z,
            tau,
            phase_convention: PhaseConvention::default(),
        }
    }

    pub fn detunings_constant(&self) -> bool {
        self.delta0.is_constant() && self.delta1.is_constant()
    }

    /// Φ(t) under this set's phase convention.
    pub fn detuning_phase(&self, t: f64) -> f64 {
        match self.phase_convention {
            PhaseConvention::Integrated => {
                self.delta0.integral(t, self.tau) - self.delta1.integral(t, self.tau)
            }
            PhaseConvention::Instantaneous => {
                (self.delta0.eval(t, self.tau) - self.delta1.eval(t, self.tau)) * t
            }
        }
    }

    pub fn drive(&self, t: f64) -> Drive {
        let tau = self.tau;
        let delta0 = self.delta0.eval(t, tau);
        let delta1 = self.delta1.eval(t, tau);
        let (phase, phase_rate) = match self.phase_convention {
            PhaseConvention::Integrated => (
                self.delta0.integral(t, tau) - self.delta1.integral(t, tau),
                delta0 - delta1,
            ),
            PhaseConvention::Instantaneous => {
                let slope = self.delta0.derivative(t, tau) - self.delta1.derivative(t, tau);
                ((delta0 - delta1) * t, (delta0 - delta1) + slope * t)
            }
        };
        Drive {
            omega0: self.omega0.eval(t, tau),
            omega1: self.omega1.eval(t, tau),
            delta0,
            delta1,
            phase,
            phase_rate,
        }
    }

    /// Scale the Rabi waveforms independently; detunings untouched.
    pub fn with_rabi_scale(&self, k0: f64, k1: f64) -> Self {
        Self {
            omega0: self.omega0.scaled(k0),
            omega1: self.omega1.scaled(k1),
            ..self.clone()
        }
    }

    /// Add constant offsets (rad/μs) to the detunings.
    pub fn with_detuning_offset(&self, d0: f64, d1: f64) -> Self {
        Self {
            delta0: self.delta0.offset(d0),
            delta1: self.delta1.offset(d1),
            ..self.clone()
        }
    }
}

/// Boundary residuals of one Rabi waveform, as fractions of its peak value and
/// peak slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResiduals {
    pub start_value: f64,
    pub end_value: f64,
    pub start_slope: f64,
    pub end_slope: f64,
    pub peak_value: f64,
    pub peak_slope: f64,
}

impl BoundaryResiduals {
    pub fn of(series: &FourierSeries, tau: f64) -> Self {
        let peak_value = series.peak_abs(tau, PEAK_GRID);
        let peak_slope = series.peak_slope(tau, PEAK_GRID);
        let frac = |x: f64, peak: f64| if peak > 0.0 { x.abs() / peak } else { 0.0 };
        Self {
            start_value: frac(series.eval(0.0, tau), peak_value),
            end_value: frac(series.eval(tau, tau), peak_value),
            start_slope: frac(series.derivative(0.0, tau), peak_slope),
            end_slope: frac(series.derivative(tau, tau), peak_slope),
            peak_value,
            peak_slope,
        }
    }

    pub fn worst(&self) -> f64 {
        self.start_value
            .max(self.end_value)
            .max(self.start_slope)
            .max(self.end_slope)
    }

    pub fn sum(&self) -> f64 {
        self.start_value + self.end_value + self.start_slope + self.end_slope
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryReport {
    pub passes: bool,
    pub tol_frac: f64,
    pub omega0: BoundaryResiduals,
    pub omega1: BoundaryResiduals,
}

/// Check that both Rabi waveforms start and end at zero with zero slope, to
/// within `tol_frac` of their peak value / peak slope. Detunings are exempt.
pub fn boundary_check(ws: &WaveformSet, tol_frac: f64) -> BoundaryReport {
    let omega0 = BoundaryResiduals::of(&ws.omega0, ws.tau);
    let omega1 = BoundaryResiduals::of(&ws.omega1, ws.tau);
    BoundaryReport {
        passes: omega0.worst() <= tol_frac && omega1.worst() <= tol_frac,
        tol_frac,
        omega0,
        omega1,
    }
}
