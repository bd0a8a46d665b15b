use alloc::{vec, vec::Vec};

use super::{
    hamiltonian::{self as ham, SINGLET_DIM},
    integrator::{integrate, IntegratorConfig, Rhs, Stats},
    BlockadeModel,
};
use crate::{error::Error, linalg::CMat, waveform::WaveformSet, C64};

/// Which Schrödinger equation to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Singlet,
    /// Triplet with explicit `e^{±iΦ}` coupling phases.
    Triplet,
    /// Triplet with the phases absorbed into the diagonal.
    TripletDiagonalGauge,
    /// Ten-level (eight under ideal blockade) product basis, interaction
    /// picture. Always uses the integrated detuning phases.
    Full,
}

impl Channel {
    pub fn dim(self, bm: &BlockadeModel) -> usize {
        match self {
            Channel::Singlet => SINGLET_DIM,
            Channel::Triplet | Channel::TripletDiagonalGauge => ham::triplet_dim(bm),
            Channel::Full => ham::full_dim(bm),
        }
    }

    /// Index of the first non-computational basis state.
    pub fn rydberg_start(self) -> usize {
        match self {
            Channel::Singlet => 1,
            Channel::Triplet | Channel::TripletDiagonalGauge => 3,
            Channel::Full => 4,
        }
    }

    pub fn labels(self, bm: &BlockadeModel) -> &'static [&'static str] {
        let n = self.dim(bm);
        match self {
            Channel::Singlet => &ham::SINGLET_LABELS[..n],
            Channel::Triplet | Channel::TripletDiagonalGauge => &ham::TRIPLET_LABELS[..n],
            Channel::Full => &ham::FULL_LABELS[..n],
        }
    }
}

/// Schrödinger right-hand side augmented with one extra component that
/// accumulates the Rydberg population integral ∫ P_ryd dt.
struct Schrodinger<'a> {
    ws: &'a WaveformSet,
    bm: &'a BlockadeModel,
    channel: Channel,
    n: usize,
    h: CMat,
}

impl Rhs for Schrodinger<'_> {
    fn dim(&self) -> usize {
        self.n + 1
    }

    fn eval(&mut self, t: f64, y: &[C64], dy: &mut [C64]) {
        match self.channel {
            Channel::Singlet => ham::fill_singlet(&self.ws.drive(t), &mut self.h),
            Channel::Triplet => ham::fill_triplet(&self.ws.drive(t), self.bm, &mut self.h),
            Channel::TripletDiagonalGauge => {
                ham::fill_triplet_diagonal_gauge(&self.ws.drive(t), self.bm, &mut self.h)
            }
            Channel::Full => ham::fill_full(self.ws, self.bm, t, &mut self.h),
        }
        let n = self.n;
        self.h.mul_vec_into(&y[..n], &mut dy[..n]);
        for d in dy[..n].iter_mut() {
            // -i (a + ib) = b - ia
            *d = C64::new(d.im, -d.re);
        }
        let p: f64 = y[self.channel.rydberg_start()..n]
            .iter()
            .map(|c| c.norm_sqr())
            .sum();
        dy[n] = C64::new(p, 0.0);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    pub final_state: Vec<C64>,
    /// ∫₀^τ (population outside the computational states) dt, μs.
    pub rydberg_integral: f64,
    pub stats: Stats,
}

impl Trajectory {
    pub fn final_norm(&self) -> f64 {
        crate::linalg::vec_norm(&self.final_state)
    }
}

/// Integrate `channel` from `psi0` at t = 0 to t = τ, sampling at
/// `sample_times` (which may be empty).
pub fn evolve(
    ws: &WaveformSet,
    bm: &BlockadeModel,
    channel: Channel,
    psi0: &[C64],
    cfg: &IntegratorConfig,
    sample_times: &[f64],
) -> Result<Trajectory, Error> {
    let n = channel.dim(bm);
    if psi0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: psi0.len(),
        });
    }
    let norm = crate::linalg::vec_norm(psi0);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput("initial state must be normalized"));
    }
    let mut rhs = Schrodinger {
        ws,
        bm,
        channel,
        n,
        h: CMat::zeros(n, n),
    };
    let mut y0 = psi0.to_vec();
    y0.push(C64::new(0.0, 0.0));
    let sol = integrate(&mut rhs, 0.0, ws.tau, &y0, cfg, sample_times)?;
    let mut final_state = sol.final_state;
    let rydberg_integral = final_state.pop().map_or(0.0, |c| c.re);
    let states = sol
        .samples
        .into_iter()
        .map(|mut s| {
            s.pop();
            s
        })
        .collect();
    Ok(Trajectory {
        times: sample_times.to_vec(),
        states,
        final_state,
        rydberg_integral,
        stats: sol.stats,
    })
}

pub(crate) fn basis_vector(n: usize, k: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[k] = C64::new(1.0, 0.0);
    v
}

/// Evolve each computational product state (|00⟩, |01⟩, |10⟩, |11⟩) in the
/// full product basis and return the 4×4 block of final computational
/// amplitudes (column k = evolution of input k).
pub fn evolve_full_computational(
    ws: &WaveformSet,
    bm: &BlockadeModel,
    cfg: &IntegratorConfig,
) -> Result<CMat, Error> {
    let n = Channel::Full.dim(bm);
    let mut m = CMat::zeros(4, 4);
    for k in 0..4 {
        let tr = evolve(ws, bm, Channel::Full, &basis_vector(n, k), cfg, &[])?;
        m.set_col(k, &tr.final_state[..4]);
    }
    Ok(m)
}

/// Evolve an arbitrary superposition of |00⟩, |01⟩, |10⟩, |11⟩ through the
/// singlet and triplet channels and report the state in the product basis
/// (labels from [`FULL_LABELS`](ham::FULL_LABELS)). Unlike [`Channel::Full`]
/// this honours the waveform's phase convention.
pub fn evolve_computational(
    ws: &WaveformSet,
    bm: &BlockadeModel,
    input: [C64; 4],
    cfg: &IntegratorConfig,
    sample_times: &[f64],
) -> Result<Trajectory, Error> {
    let norm = crate::linalg::vec_norm(&input);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput("initial state must be normalized"));
    }
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let nt = ham::triplet_dim(bm);
    let mut singlet0 = vec![C64::new(0.0, 0.0); SINGLET_DIM];
    singlet0[0] = (input[1] - input[2]) * s;
    let mut triplet0 = vec![C64::new(0.0, 0.0); nt];
    triplet0[0] = input[0];
    triplet0[1] = (input[1] + input[2]) * s;
    triplet0[2] = input[3];

    let singlet = evolve_scaled(ws, bm, Channel::Singlet, &singlet0, cfg, sample_times)?;
    let triplet = evolve_scaled(ws, bm, Channel::Triplet, &triplet0, cfg, sample_times)?;
    let w = ham::channel_basis(bm);
    let to_product = |a: &[C64], b: &[C64]| {
        let mut channel = a.to_vec();
        channel.extend_from_slice(b);
        w.mul_vec(&channel)
    };
    let states = singlet
        .states
        .iter()
        .zip(&triplet.states)
        .map(|(a, b)| to_product(a, b))
        .collect();
    let mut stats = singlet.stats;
    stats.accepted += triplet.stats.accepted;
    stats.rejected += triplet.stats.rejected;
    stats.rhs_evals += triplet.stats.rhs_evals;
    Ok(Trajectory {
        times: sample_times.to_vec(),
        states,
        final_state: to_product(&singlet.final_state, &triplet.final_state),
        rydberg_integral: singlet.rydberg_integral + triplet.rydberg_integral,
        stats,
    })
}

/// [`evolve`] for a sub-normalized initial vector: the normalized direction
/// is integrated and the result rescaled. A zero vector yields zeros.
fn evolve_scaled(
    ws: &WaveformSet,
    bm: &BlockadeModel,
    channel: Channel,
    psi0: &[C64],
    cfg: &IntegratorConfig,
    sample_times: &[f64],
) -> Result<Trajectory, Error> {
    let n = psi0.len();
    let weight = crate::linalg::vec_norm(psi0);
    if weight == 0.0 {
        let zeros = vec![C64::new(0.0, 0.0); n];
        return Ok(Trajectory {
            times: sample_times.to_vec(),
            states: vec![zeros.clone(); sample_times.len()],
            final_state: zeros,
            rydberg_integral: 0.0,
            stats: Stats::default(),
        });
    }
    let unit: Vec<C64> = psi0.iter().map(|c| c / weight).collect();
    let mut tr = evolve(ws, bm, channel, &unit, cfg, sample_times)?;
    let scale = |v: &mut Vec<C64>| v.iter_mut().for_each(|c| *c *= weight);
    tr.states.iter_mut().for_each(scale);
    scale(&mut tr.final_state);
    tr.rydberg_integral *= weight * weight;
    Ok(tr)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeReport {
    /// Largest deviation over the computational amplitudes of the three
    /// triplet runs (initial C0, C1+, C2).
    pub max_deviation: f64,
    pub explicit: CMat,
    pub diagonal: CMat,
}

/// Evolve the triplet in the explicit-phase gauge and in the
/// diagonal-detuning gauge, map the latter back with `e^{-iφ_s(τ)}`, and
/// compare computational amplitudes.
pub fn gauge_transform_check(
    ws: &WaveformSet,
    bm: &BlockadeModel,
    cfg: &IntegratorConfig,
    tol: f64,
) -> Result<GaugeReport, Error> {
    let n = ham::triplet_dim(bm);
    let phase_end = ws.detuning_phase(ws.tau);
    let phases = ham::diagonal_gauge_phases(phase_end, n);
    let mut explicit = CMat::zeros(3, 3);
    let mut diagonal = CMat::zeros(3, 3);
    for k in 0..3 {
        let psi0 = basis_vector(n, k);
        let a = evolve(ws, bm, Channel::Triplet, &psi0, cfg, &[])?;
        let b = evolve(ws, bm, Channel::TripletDiagonalGauge, &psi0, cfg, &[])?;
        for s in 0..3 {
            explicit[(s, k)] = a.final_state[s];
            diagonal[(s, k)] = b.final_state[s] * C64::from_polar(1.0, -phases[s]);
        }
    }
    let max_deviation = explicit.max_abs_diff(&diagonal);
    if max_deviation > tol {
        return Err(Error::GaugeInconsistency {
            deviation: max_deviation,
        });
    }
    Ok(GaugeReport {
        max_deviation,
        explicit,
        diagonal,
    })
}
