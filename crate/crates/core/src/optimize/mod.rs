//! Multi-start derivative-free search over Fourier coefficients.
//!
//! A [`SearchSpec`] decides which coefficients are free and how the four
//! drive waveforms are tied together; the parameter vector is the
//! concatenation of the free coefficients (`a0`, then `Re a_n` and, for
//! complex slots, `Im a_n`), all in MHz.

mod nelder_mead;

pub use nelder_mead::{minimize, Minimum, NelderMeadConfig};

use alloc::{vec, vec::Vec};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{
    dynamics::{BlockadeModel, IntegratorConfig},
    error::Error,
    gate::{gate_map, TargetChoice, TargetGate, TargetKind},
    mhz,
    waveform::{FourierSeries, PhaseConvention, WaveformSet, DEFAULT_TAU},
    C64,
};

/// Objective value reported when a candidate cannot be integrated.
pub const FAILURE_SENTINEL: f64 = 1e3;

/// Grid used for peak values inside the objective.
const PENALTY_GRID: usize = 512;

/// Lower/upper bound (MHz) on one coefficient; applies to both real and
/// imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub lower: f64,
    pub upper: f64,
}

impl Bound {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn around(center: f64, half_width: f64) -> Self {
        Self {
            lower: center - half_width,
            upper: center + half_width,
        }
    }
}

/// How one of Ω0, Ω1, Δ0, Δ1 is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Slot {
    Fixed(FourierSeries),
    /// `bounds` holds either one bound for all coefficients or one per
    /// coefficient (`n_terms` of them).
    Free {
        n_terms: usize,
        complex: bool,
        bounds: Vec<Bound>,
    },
    /// Every coefficient of `base` free within `half_width` (MHz) of its base
    /// value, real and imaginary parts separately. Harmonics are complex iff
    /// any coefficient of `base` is.
    Around {
        base: FourierSeries,
        half_width: f64,
    },
}

impl Slot {
    pub fn free(n_terms: usize, complex: bool, bound: Bound) -> Self {
        Slot::Free {
            n_terms,
            complex,
            bounds: vec![bound],
        }
    }

    /// `(n_terms, complex)` of a free slot.
    fn shape(&self) -> Option<(usize, bool)> {
        match self {
            Slot::Fixed(_) => None,
            Slot::Free {
                n_terms, complex, ..
            } => Some((*n_terms, *complex)),
            Slot::Around { base, .. } => {
                Some((base.n_terms(), base.coeffs().iter().any(|c| c.im != 0.0)))
            }
        }
    }

    /// `pinned`: a0 is not a parameter but solved from `f(0) = 0`.
    fn n_params(&self, pinned: bool) -> usize {
        match self.shape() {
            None => 0,
            Some((n, true)) => 2 * n - 1 - pinned as usize,
            Some((n, false)) => n - pinned as usize,
        }
    }

    /// Bounds of the real and imaginary parts of coefficient `k`.
    fn bound(&self, k: usize) -> (Bound, Bound) {
        match self {
            Slot::Free { bounds, .. } if bounds.len() == 1 => (bounds[0], bounds[0]),
            Slot::Free { bounds, .. } => (bounds[k], bounds[k]),
            Slot::Around { base, half_width } => {
                let c = base.coeffs()[k];
                (
                    Bound::around(c.re, *half_width),
                    Bound::around(c.im, *half_width),
                )
            }
            Slot::Fixed(_) => unreachable!("fixed slots have no parameters"),
        }
    }

    fn push_bounds(&self, pinned: bool, out: &mut Vec<(f64, f64)>) {
        if let Some((n_terms, complex)) = self.shape() {
            for k in 0..n_terms {
                let (re, im) = self.bound(k);
                if !(pinned && k == 0) {
                    out.push((re.lower, re.upper));
                }
                if complex && k > 0 {
                    out.push((im.lower, im.upper));
                }
            }
        }
    }

    fn decode(&self, pinned: bool, x: &[f64]) -> FourierSeries {
        let Some((n_terms, complex)) = self.shape() else {
            let Slot::Fixed(s) = self else { unreachable!() };
            return s.clone();
        };
        let mut coeffs = Vec::with_capacity(n_terms);
        let mut i = if pinned { 0 } else { 1 };
        coeffs.push(C64::new(if pinned { 0.0 } else { x[0] }, 0.0));
        for _ in 1..n_terms {
            if complex {
                coeffs.push(C64::new(x[i], x[i + 1]));
                i += 2;
            } else {
                coeffs.push(C64::new(x[i], 0.0));
                i += 1;
            }
        }
        if pinned {
            coeffs[0].re = -2.0 * coeffs[1..].iter().map(|c| c.re).sum::<f64>();
        }
        FourierSeries::new(coeffs).expect("decoded coefficients are finite")
    }

    fn encode(&self, pinned: bool, s: &FourierSeries, out: &mut Vec<f64>) -> Result<(), Error> {
        let Some((n_terms, complex)) = self.shape() else {
            return Ok(());
        };
        let c = s.coeffs();
        if c.len() > n_terms {
            return Err(Error::InvalidSearch(
                "waveform has more terms than its slot",
            ));
        }
        for k in 0..n_terms {
            let a = c.get(k).copied().unwrap_or_default();
            if !(pinned && k == 0) {
                out.push(a.re);
            }
            if k > 0 {
                if complex {
                    out.push(a.im);
                } else if a.im != 0.0 {
                    return Err(Error::InvalidSearch("complex coefficient in a real slot"));
                }
            }
        }
        Ok(())
    }
}

/// Structural relations between the four waveforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Constraints {
    /// Ω1 ≡ Ω0; the Ω1 slot is ignored.
    pub tie_rabi: bool,
    /// Δ1 ≡ −Δ0; the Δ1 slot is ignored.
    pub antisymmetric_detuning: bool,
    /// Free detuning slots must be single constants.
    pub constant_detuning: bool,
    /// Δ0 ≡ Δ1 ≡ 0; both detuning slots are ignored.
    pub resonant: bool,
    /// a0 of each free Rabi slot is solved so that Ω(0) = Ω(τ) = 0 exactly,
    /// and is not a search parameter.
    pub pin_rabi_start: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyWeights {
    /// Multiplies the summed boundary residual fractions of Ω0 and Ω1.
    pub boundary: f64,
    /// Per rad/μs of peak Rabi frequency above `rabi_cap`.
    pub peak_rabi: f64,
    /// rad/μs.
    pub rabi_cap: f64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        Self {
            boundary: 1e2,
            peak_rabi: 1e-3,
            rabi_cap: mhz(300.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpec {
    pub omega0: Slot,
    pub omega1: Slot,
    pub delta0: Slot,
    pub delta1: Slot,
    pub constraints: Constraints,
    pub target: TargetChoice,
    pub blockade: BlockadeModel,
    pub penalty: PenaltyWeights,
    pub tau: f64,
    pub phase_convention: PhaseConvention,
    /// Objective evaluations per restart.
    pub budget: usize,
    pub restarts: usize,
    pub rng_seed: u64,
    /// A restart stops early once its objective reaches this value.
    pub target_error: Option<f64>,
    /// Restart 0 starts here instead of at a random point.
    pub initial: Option<WaveformSet>,
    /// Used for every objective evaluation.
    pub search_integrator: IntegratorConfig,
    /// Used to re-score the returned waveform.
    pub final_integrator: IntegratorConfig,
    pub simplex: NelderMeadConfig,
}

impl SearchSpec {
    /// Amplitude-only family: `n_terms` real coefficients per Rabi waveform
    /// (independent), constant free detunings, ideal blockade, auto target.
    pub fn amplitude_only(n_terms: usize) -> Self {
        let harmonic = Bound::new(-80.0, 80.0);
        let mut omega_bounds = vec![harmonic; n_terms];
        omega_bounds[0] = Bound::new(0.0, 300.0);
        let omega = Slot::Free {
            n_terms,
            complex: false,
            bounds: omega_bounds,
        };
        let delta = Slot::free(1, false, Bound::new(-30.0, 30.0));
        Self {
            omega0: omega.clone(),
            omega1: omega,
            delta0: delta.clone(),
            delta1: delta,
            constraints: Constraints {
                constant_detuning: true,
                pin_rabi_start: true,
                ..Default::default()
            },
            target: TargetChoice::Auto,
            blockade: BlockadeModel::Ideal,
            penalty: PenaltyWeights::default(),
            tau: DEFAULT_TAU,
            phase_convention: PhaseConvention::Integrated,
            budget: 200_000,
            restarts: 8,
            rng_seed: 0,
            target_error: None,
            initial: None,
            search_integrator: IntegratorConfig::search(),
            final_integrator: IntegratorConfig::default(),
            simplex: NelderMeadConfig::default(),
        }
    }

    /// Slots that carry parameters, in parameter order, with their pin flag.
    fn active_slots(&self) -> [Option<(&Slot, bool)>; 4] {
        let c = &self.constraints;
        let pin = c.pin_rabi_start;
        [
            Some((&self.omega0, pin)),
            (!c.tie_rabi).then_some((&self.omega1, pin)),
            (!c.resonant).then_some((&self.delta0, false)),
            (!c.resonant && !c.antisymmetric_detuning).then_some((&self.delta1, false)),
        ]
    }

    pub fn n_params(&self) -> usize {
        self.active_slots()
            .iter()
            .flatten()
            .map(|(s, pin)| s.n_params(*pin))
            .sum()
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.budget < 1 {
            return Err(Error::InvalidSearch("budget must be >= 1"));
        }
        if self.restarts < 1 {
            return Err(Error::InvalidSearch("restarts must be >= 1"));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidSearch("tau must be > 0"));
        }
        self.search_integrator.validate()?;
        self.final_integrator.validate()?;
        if self.n_params() == 0 {
            return Err(Error::InvalidSearch("no free parameters"));
        }
        for (i, slot) in self.active_slots().iter().enumerate() {
            let slot = slot.map(|(s, _)| s);
            if let Some(Slot::Around { base, half_width }) = slot {
                if !(*half_width >= 0.0 && half_width.is_finite()) {
                    return Err(Error::InvalidSearch("window must be finite and >= 0"));
                }
                if i >= 2 && self.constraints.constant_detuning && !base.is_constant() {
                    return Err(Error::InvalidSearch(
                        "constant detuning requires single-term detuning slots",
                    ));
                }
                continue;
            }
            let Some(Slot::Free {
                n_terms, bounds, ..
            }) = slot
            else {
                continue;
            };
            if *n_terms == 0 {
                return Err(Error::InvalidSearch("free slot needs at least one term"));
            }
            if bounds.len() != 1 && bounds.len() != *n_terms {
                return Err(Error::InvalidSearch("bounds must have length 1 or n_terms"));
            }
            if bounds
                .iter()
                .any(|b| !(b.lower.is_finite() && b.upper.is_finite() && b.lower <= b.upper))
            {
                return Err(Error::InvalidSearch(
                    "bounds must be finite with lower <= upper",
                ));
            }
            if i >= 2 && self.constraints.constant_detuning && *n_terms != 1 {
                return Err(Error::InvalidSearch(
                    "constant detuning requires single-term detuning slots",
                ));
            }
        }
        if let TargetChoice::Fixed(t) = &self.target {
            if t.matrix().rows() != 4 {
                return Err(Error::InvalidSearch("target must be 4x4"));
            }
        }
        Ok(())
    }

    /// Box bounds of the parameter vector.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.n_params());
        for (s, pin) in self.active_slots().into_iter().flatten() {
            s.push_bounds(pin, &mut out);
        }
        out
    }

    /// Build the waveform set a parameter vector stands for.
    pub fn decode(&self, x: &[f64]) -> WaveformSet {
        let mut off = 0;
        let mut take = |s: &Slot, pin: bool| {
            let n = s.n_params(pin);
            let series = s.decode(pin, &x[off..off + n]);
            off += n;
            series
        };
        let c = &self.constraints;
        let pin = c.pin_rabi_start;
        let omega0 = take(&self.omega0, pin);
        let omega1 = if c.tie_rabi {
            omega0.clone()
        } else {
            take(&self.omega1, pin)
        };
        let (delta0, delta1) = if c.resonant {
            (FourierSeries::zero(), FourierSeries::zero())
        } else {
            let d0 = take(&self.delta0, false);
            let d1 = if c.antisymmetric_detuning {
                d0.negated()
            } else {
                take(&self.delta1, false)
            };
            (d0, d1)
        };
        WaveformSet::new(omega0, omega1, delta0, delta1, self.tau)
            .expect("validated tau")
            .with_phase_convention(self.phase_convention)
    }

    /// Inverse of [`decode`](Self::decode) for waveforms that fit the slots.
    pub fn encode(&self, ws: &WaveformSet) -> Result<Vec<f64>, Error> {
        let mut out = Vec::with_capacity(self.n_params());
        let c = &self.constraints;
        let pin = c.pin_rabi_start;
        self.omega0.encode(pin, &ws.omega0, &mut out)?;
        if !c.tie_rabi {
            self.omega1.encode(pin, &ws.omega1, &mut out)?;
        }
        if !c.resonant {
            self.delta0.encode(false, &ws.delta0, &mut out)?;
            if !c.antisymmetric_detuning {
                self.delta1.encode(false, &ws.delta1, &mut out)?;
            }
        }
        Ok(out)
    }

    /// Gate error plus penalties for parameter vector `x`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        let ws = self.decode(x);
        self.objective_of(&ws)
    }

    pub fn objective_of(&self, ws: &WaveformSet) -> f64 {
        match gate_map(ws, &self.blockade, &self.search_integrator) {
            Ok(map) => {
                let err = map.score_choice(&self.target).gate_error;
                err + self.penalty_of(ws)
            }
            Err(_) => FAILURE_SENTINEL,
        }
    }

    fn penalty_of(&self, ws: &WaveformSet) -> f64 {
        let mut p = 0.0;
        for s in [&ws.omega0, &ws.omega1] {
            let (peak, slope) = peak_and_slope(s, ws.tau);
            let frac = |v: f64, peak: f64| if peak > 0.0 { v.abs() / peak } else { 0.0 };
            let residual = frac(s.eval(0.0, ws.tau), peak)
                + frac(s.eval(ws.tau, ws.tau), peak)
                + frac(s.derivative(0.0, ws.tau), slope)
                + frac(s.derivative(ws.tau, ws.tau), slope);
            p += self.penalty.boundary * residual;
            p += self.penalty.peak_rabi * (peak - self.penalty.rabi_cap).max(0.0);
        }
        p
    }

    /// Uniform point within the bounds, conditioned on every free Rabi
    /// waveform starting at zero: a0 is solved for, and harmonics are redrawn
    /// until that a0 lies within its bound (clamped after `MAX_DRAWS`). With
    /// pinned Rabi starts the uniform draw is already feasible.
    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        const MAX_DRAWS: usize = 1000;
        let bounds = self.bounds();
        let mut x: Vec<f64> = bounds
            .iter()
            .map(|&(lo, hi)| {
                if hi > lo {
                    rng.random_range(lo..=hi)
                } else {
                    lo
                }
            })
            .collect();
        if self.constraints.pin_rabi_start {
            return x;
        }
        let mut off = 0;
        let rabi = [
            Some(&self.omega0),
            (!self.constraints.tie_rabi).then_some(&self.omega1),
        ];
        for slot in rabi.into_iter().flatten() {
            let n = slot.n_params(false);
            if let Some((n_terms, complex)) = slot.shape() {
                let stride = if complex { 2 } else { 1 };
                let (lo, hi) = bounds[off];
                for draw in 0..MAX_DRAWS {
                    let harmonics: f64 = (1..n_terms).map(|k| x[off + 1 + (k - 1) * stride]).sum();
                    let a0 = -2.0 * harmonics;
                    if (lo..=hi).contains(&a0) || draw + 1 == MAX_DRAWS {
                        x[off] = a0.clamp(lo, hi);
                        break;
                    }
                    for i in off + 1..off + n {
                        let (l, h) = bounds[i];
                        x[i] = if h > l { rng.random_range(l..=h) } else { l };
                    }
                }
            }
            off += n;
        }
        x
    }

    /// Initial parameter vector of restart `restart`.
    pub fn start_point(&self, restart: usize) -> Result<Vec<f64>, Error> {
        if restart == 0 {
            if let Some(ws) = &self.initial {
                let x = self.encode(ws)?;
                let b = self.bounds();
                if x.iter().zip(&b).any(|(v, &(lo, hi))| *v < lo || *v > hi) {
                    return Err(Error::InvalidSearch(
                        "initial waveform lies outside the bounds",
                    ));
                }
                return Ok(x);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(restart as u64);
        Ok(self.random_start(&mut rng))
    }
}

/// Peak |f| and peak |f'| on a uniform grid over one period.
fn peak_and_slope(s: &FourierSeries, tau: f64) -> (f64, f64) {
    if s.is_constant() {
        return (s.eval(0.0, tau).abs(), 0.0);
    }
    let mut peak = 0.0f64;
    let mut slope = 0.0f64;
    for k in 0..PENALTY_GRID {
        let t = tau * k as f64 / PENALTY_GRID as f64;
        peak = peak.max(s.eval(t, tau).abs());
        slope = slope.max(s.derivative(t, tau).abs());
    }
    (peak, slope)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub index: usize,
    pub start: Vec<f64>,
    pub initial_objective: f64,
    pub best: Vec<f64>,
    pub best_objective: f64,
    pub evaluations: usize,
    /// (evaluation, best objective) at each improvement.
    pub history: Vec<(usize, f64)>,
    pub budget_exhausted: bool,
    pub reached_target: bool,
}

/// Run one restart. Depends only on `(spec, index)`.
pub fn run_restart(spec: &SearchSpec, index: usize) -> Result<RestartOutcome, Error> {
    spec.validate()?;
    if index >= spec.restarts {
        return Err(Error::InvalidSearch("restart index out of range"));
    }
    let start = spec.start_point(index)?;
    let bounds = spec.bounds();
    let target = spec.target_error.unwrap_or(f64::NEG_INFINITY);
    let m = minimize(
        |x| spec.objective(x),
        &start,
        &bounds,
        spec.budget,
        target,
        &spec.simplex,
    );
    let initial_objective = m.improvements.first().map_or(f64::INFINITY, |&(_, v)| v);
    Ok(RestartOutcome {
        index,
        start,
        initial_objective,
        best: m.x,
        best_objective: m.value,
        evaluations: m.evaluations,
        budget_exhausted: !m.reached_target && m.evaluations >= spec.budget,
        reached_target: m.reached_target,
        history: m.improvements,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry {
    pub restart: usize,
    /// 1-based evaluation count within the restart.
    pub evaluation: usize,
    pub best_objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_waveform: WaveformSet,
    /// Gate error of `best_waveform` at the final integrator tolerance.
    pub best_error: f64,
    /// Search objective of `best_waveform` (relaxed tolerance, penalties in).
    pub best_objective: f64,
    pub best_restart: usize,
    pub best_parameters: Vec<f64>,
    pub resolved_target: TargetKind,
    pub evaluations_used: usize,
    /// Every restart used its whole budget without reaching the target.
    pub budget_exhausted: bool,
    pub restarts: Vec<RestartOutcome>,
    /// Best-so-far objective per restart, restart-major.
    pub history: Vec<HistoryEntry>,
}

/// Pick the best restart (ties go to the lower index) and re-score it.
pub fn combine(
    spec: &SearchSpec,
    mut outcomes: Vec<RestartOutcome>,
) -> Result<SearchResult, Error> {
    if outcomes.is_empty() {
        return Err(Error::InvalidSearch("no restart outcomes"));
    }
    outcomes.sort_by_key(|o| o.index);
    let best = outcomes
        .iter()
        .min_by(|a, b| {
            a.best_objective
                .total_cmp(&b.best_objective)
                .then(a.index.cmp(&b.index))
        })
        .expect("non-empty");
    let ws = spec.decode(&best.best);
    let outcome = gate_map(&ws, &spec.blockade, &spec.final_integrator)?.score_choice(&spec.target);
    let history = outcomes
        .iter()
        .flat_map(|o| {
            o.history
                .iter()
                .map(move |&(evaluation, best_objective)| HistoryEntry {
                    restart: o.index,
                    evaluation,
                    best_objective,
                })
        })
        .collect();
    Ok(SearchResult {
        best_waveform: ws,
        best_error: outcome.gate_error,
        best_objective: best.best_objective,
        best_restart: best.index,
        best_parameters: best.best.clone(),
        resolved_target: outcome.target,
        evaluations_used: outcomes.iter().map(|o| o.evaluations).sum(),
        budget_exhausted: outcomes.iter().all(|o| o.budget_exhausted),
        history,
        restarts: outcomes,
    })
}

/// All restarts in sequence. The `rydswap` crate runs them concurrently with
/// identical results.
pub fn search(spec: &SearchSpec) -> Result<SearchResult, Error> {
    spec.validate()?;
    let outcomes = (0..spec.restarts)
        .map(|i| run_restart(spec, i))
        .collect::<Result<Vec<_>, _>>()?;
    combine(spec, outcomes)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefitOptions {
    /// Half-width (MHz) of the box around every base coefficient.
    pub window_mhz: f64,
    pub budget: usize,
    pub target: TargetChoice,
    pub target_error: Option<f64>,
    pub penalty: PenaltyWeights,
    pub search_integrator: IntegratorConfig,
    pub final_integrator: IntegratorConfig,
    pub simplex: NelderMeadConfig,
    pub pin_rabi_start: bool,
}

impl Default for RefitOptions {
    fn default() -> Self {
        Self {
            window_mhz: 4.0,
            budget: 20_000,
            target: TargetChoice::Auto,
            target_error: None,
            penalty: PenaltyWeights::default(),
            search_integrator: IntegratorConfig::search(),
            final_integrator: IntegratorConfig::default(),
            simplex: NelderMeadConfig::default(),
            pin_rabi_start: true,
        }
    }
}

/// Search spec for a single warm-started restart around `base`: every
/// coefficient of every waveform is free within `window_mhz` of its base
/// value, and the objective uses `blockade`.
pub fn refit_spec(
    base: &WaveformSet,
    blockade: BlockadeModel,
    opts: &RefitOptions,
) -> Result<SearchSpec, Error> {
    if !(opts.window_mhz > 0.0 && opts.window_mhz.is_finite()) {
        return Err(Error::InvalidSearch("refit window must be > 0"));
    }
    let slot = |s: &FourierSeries| Slot::Around {
        base: s.clone(),
        half_width: opts.window_mhz,
    };
    let spec = SearchSpec {
        omega0: slot(&base.omega0),
        omega1: slot(&base.omega1),
        delta0: slot(&base.delta0),
        delta1: slot(&base.delta1),
        constraints: Constraints {
            pin_rabi_start: opts.pin_rabi_start,
            ..Default::default()
        },
        target: opts.target.clone(),
        blockade,
        penalty: opts.penalty,
        tau: base.tau,
        phase_convention: base.phase_convention,
        budget: opts.budget,
        restarts: 1,
        rng_seed: 0,
        target_error: opts.target_error,
        initial: Some(base.clone()),
        search_integrator: opts.search_integrator,
        final_integrator: opts.final_integrator,
        simplex: opts.simplex,
    };
    spec.validate()?;
    Ok(spec)
}

/// Warm-started search from `base` under a different blockade model.
pub fn refit_for_blockade(
    base: &WaveformSet,
    blockade: BlockadeModel,
    opts: &RefitOptions,
) -> Result<SearchResult, Error> {
    search(&refit_spec(base, blockade, opts)?)
}

/// Largest coefficient displacement (MHz) between two waveform sets with the
/// same structure, over real and imaginary parts of every coefficient.
pub fn coefficient_displacement(a: &WaveformSet, b: &WaveformSet) -> f64 {
    let pairs = [
        (&a.omega0, &b.omega0),
        (&a.omega1, &b.omega1),
        (&a.delta0, &b.delta0),
        (&a.delta1, &b.delta1),
    ];
    let mut d = 0.0f64;
    for (x, y) in pairs {
        let n = x.n_terms().max(y.n_terms());
        for k in 0..n {
            let p = x.coeffs().get(k).copied().unwrap_or_default();
            let q = y.coeffs().get(k).copied().unwrap_or_default();
            d = d.max((p.re - q.re).abs()).max((p.im - q.im).abs());
        }
    }
    d
}

/// Fixed-target convenience used by callers that already resolved a format.
pub fn fixed_target(kind: TargetKind) -> Option<TargetChoice> {
    TargetGate::from_kind(kind).map(TargetChoice::Fixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{self, PresetId};

    fn tiny_spec() -> SearchSpec {
        SearchSpec {
            budget: 40,
            restarts: 2,
            ..SearchSpec::amplitude_only(3)
        }
    }

    #[test]
    fn encode_decode_round_trip() {
        let p = presets::lookup(PresetId::Fig2Hybrid);
        let ws = &p.waveforms;
        let spec = SearchSpec {
            omega0: Slot::free(6, false, Bound::new(-100.0, 100.0)),
            delta0: Slot::free(6, true, Bound::new(-100.0, 100.0)),
            delta1: Slot::free(6, true, Bound::new(-100.0, 100.0)),
            constraints: Constraints {
                tie_rabi: true,
                ..Default::default()
            },
            phase_convention: PhaseConvention::Instantaneous,
            ..SearchSpec::amplitude_only(6)
        };
        spec.validate().unwrap();
        assert_eq!(spec.n_params(), 6 + 11 + 11);
        let x = spec.encode(ws).unwrap();
        assert_eq!(&spec.decode(&x), ws);
    }

    #[test]
    fn preset_objective_is_small() {
        let p = presets::lookup(PresetId::Fig2Hybrid);
        let spec = SearchSpec {
            omega0: Slot::free(6, false, Bound::new(-100.0, 100.0)),
            delta0: Slot::free(6, true, Bound::new(-100.0, 100.0)),
            delta1: Slot::free(6, true, Bound::new(-100.0, 100.0)),
            constraints: Constraints {
                tie_rabi: true,
                ..Default::default()
            },
            phase_convention: PhaseConvention::Instantaneous,
            target: TargetChoice::Fixed(TargetGate::standard_swap()),
            ..SearchSpec::amplitude_only(6)
        };
        let x = spec.encode(&p.waveforms).unwrap();
        assert!(spec.objective(&x) < 5e-4);
    }

    #[test]
    fn zero_candidate_scores_identity() {
        let spec = SearchSpec {
            target: TargetChoice::Fixed(TargetGate::standard_swap()),
            omega0: Slot::free(3, false, Bound::new(-80.0, 80.0)),
            omega1: Slot::free(3, false, Bound::new(-80.0, 80.0)),
            ..SearchSpec::amplitude_only(3)
        };
        let v = spec.objective(&vec![0.0; spec.n_params()]);
        assert!((v - 0.6).abs() < 1e-12, "{v}");
    }

    #[test]
    fn boundary_violation_adds_penalty() {
        let spec = SearchSpec {
            target: TargetChoice::Fixed(TargetGate::standard_swap()),
            constraints: Constraints {
                constant_detuning: true,
                ..Default::default()
            },
            ..tiny_spec()
        };
        // Ω = 2π·(60 + 2·(-20) cos + 2·(-10) cos 2)/5 starts at zero.
        let good = [60.0, -20.0, -10.0, 60.0, -20.0, -10.0, 5.0, -5.0];
        let mut bad = good;
        bad[0] = 70.0;
        let ws = spec.decode(&bad);
        let penalty_free = gate_map(&ws, &spec.blockade, &spec.search_integrator)
            .unwrap()
            .score_choice(&spec.target)
            .gate_error;
        assert!(spec.objective(&bad) > penalty_free + 1.0);
        assert!(spec.penalty_of(&spec.decode(&good)) < 1e-12);
    }

    #[test]
    fn pinned_slots_start_at_zero() {
        let spec = tiny_spec();
        assert_eq!(spec.n_params(), 6);
        let ws = spec.decode(&[-20.0, -10.0, 30.0, 5.0, 5.0, -5.0]);
        assert_eq!(ws.omega0.coeffs()[0].re, 60.0);
        assert!(ws.omega1.eval(0.0, ws.tau).abs() < 1e-12);
        assert_eq!(
            spec.encode(&ws).unwrap(),
            [-20.0, -10.0, 30.0, 5.0, 5.0, -5.0]
        );
    }

    #[test]
    fn random_starts_are_feasible_and_reproducible() {
        for pin in [true, false] {
            let mut spec = SearchSpec::amplitude_only(9);
            spec.constraints.pin_rabi_start = pin;
            let a = spec.start_point(3).unwrap();
            assert_eq!(a, spec.start_point(3).unwrap());
            assert_ne!(a, spec.start_point(4).unwrap());
            let ws = spec.decode(&a);
            let b = spec.bounds();
            assert!(a.iter().zip(&b).all(|(v, &(lo, hi))| lo <= *v && *v <= hi));
            for o in [&ws.omega0, &ws.omega1] {
                assert!(o.eval(0.0, ws.tau).abs() < 1e-9 * o.peak_abs(ws.tau, 256).max(1.0));
            }
        }
    }

    #[test]
    fn validation() {
        assert!(SearchSpec {
            budget: 0,
            ..tiny_spec()
        }
        .validate()
        .is_err());
        let none = SearchSpec {
            constraints: Constraints {
                tie_rabi: true,
                resonant: true,
                ..Default::default()
            },
            omega0: Slot::Fixed(FourierSeries::zero()),
            ..tiny_spec()
        };
        assert!(none.validate().is_err());
        let wide = SearchSpec {
            delta0: Slot::free(3, false, Bound::new(-1.0, 1.0)),
            ..tiny_spec()
        };
        assert!(wide.validate().is_err());
        let inf = SearchSpec {
            delta0: Slot::free(1, false, Bound::new(-f64::INFINITY, 1.0)),
            ..tiny_spec()
        };
        assert!(inf.validate().is_err());
    }

    #[test]
    fn search_is_deterministic_and_history_monotone() {
        let spec = tiny_spec();
        let a = search(&spec).unwrap();
        let b = search(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evaluations_used, 80);
        assert!(a.budget_exhausted);
        for r in &a.restarts {
            for w in r.history.windows(2) {
                assert!(w[1].1 <= w[0].1);
            }
        }
    }

    #[test]
    fn restart_order_does_not_matter() {
        let spec = tiny_spec();
        let fwd: Vec<_> = (0..2).map(|i| run_restart(&spec, i).unwrap()).collect();
        let rev: Vec<_> = (0..2)
            .rev()
            .map(|i| run_restart(&spec, i).unwrap())
            .collect();
        assert_eq!(combine(&spec, fwd).unwrap(), combine(&spec, rev).unwrap());
    }

    #[test]
    fn warm_start_never_worsens() {
        let p = presets::lookup(PresetId::FigA2Resonant);
        let opts = RefitOptions {
            budget: 30,
            window_mhz: 0.01,
            ..Default::default()
        };
        let spec = refit_spec(&p.waveforms, BlockadeModel::Ideal, &opts).unwrap();
        let start = spec.objective_of(&p.waveforms);
        let r = refit_for_blockade(&p.waveforms, BlockadeModel::Ideal, &opts).unwrap();
        assert!(r.best_objective <= start);
        assert!(coefficient_displacement(&r.best_waveform, &p.waveforms) <= 0.01 + 1e-12);
        let rescored = gate_map(
            &r.best_waveform,
            &BlockadeModel::Ideal,
            &IntegratorConfig::default(),
        )
        .unwrap()
        .score_auto();
        assert_eq!(rescored.gate_error, r.best_error);
    }
}
