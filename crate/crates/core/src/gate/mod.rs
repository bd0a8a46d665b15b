//! Target gates, assembly of the computational-basis map from the singlet and
//! triplet evolutions, and fidelity scoring.

mod two_photon;

pub use two_photon::{split_two_photon, two_photon_reduce, TwoPhotonReduction};

use core::f64::consts::FRAC_1_SQRT_2;

use crate::{
    dynamics::{evolve, BlockadeModel, Channel, IntegratorConfig},
    error::Error,
    linalg::CMat,
    waveform::WaveformSet,
    C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetKind {
    /// |01⟩ ↔ |10⟩, |00⟩ and |11⟩ fixed.
    Standard,
    /// |00⟩ ↔ |11⟩, |01⟩ and |10⟩ fixed.
    Opposite,
    Custom,
}

impl TargetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TargetKind::Standard => "standard",
            TargetKind::Opposite => "opposite",
            TargetKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "standard" => Some(TargetKind::Standard),
            "opposite" => Some(TargetKind::Opposite),
            "custom" => Some(TargetKind::Custom),
            _ => None,
        }
    }
}

/// A 4×4 unitary over (|00⟩, |01⟩, |10⟩, |11⟩).
#[derive(Debug, Clone, PartialEq)]
pub struct TargetGate {
    kind: TargetKind,
    matrix: CMat,
}

impl TargetGate {
    pub fn standard_swap() -> Self {
        Self {
            kind: TargetKind::Standard,
            matrix: CMat::from_real_rows(&[
                &[1.0, 0.0, 0.0, 0.0],
                &[0.0, 0.0, 1.0, 0.0],
                &[0.0, 1.0, 0.0, 0.0],
                &[0.0, 0.0, 0.0, 1.0],
            ]),
        }
    }

    pub fn opposite_swap() -> Self {
        Self {
            kind: TargetKind::Opposite,
            matrix: CMat::from_real_rows(&[
                &[0.0, 0.0, 0.0, 1.0],
                &[0.0, 1.0, 0.0, 0.0],
                &[0.0, 0.0, 1.0, 0.0],
                &[1.0, 0.0, 0.0, 0.0],
            ]),
        }
    }

    pub fn custom(matrix: CMat) -> Result<Self, Error> {
        if matrix.rows() != 4 || matrix.cols() != 4 {
            return Err(Error::InvalidInput("target gate must be 4x4"));
        }
        if (&matrix.adjoint() * &matrix).max_abs_diff(&CMat::identity(4)) > 1e-12 {
            return Err(Error::InvalidInput("target gate must be unitary"));
        }
        Ok(Self {
            kind: TargetKind::Custom,
            matrix,
        })
    }

    pub fn from_kind(kind: TargetKind) -> Option<Self> {
        match kind {
            TargetKind::Standard => Some(Self::standard_swap()),
            TargetKind::Opposite => Some(Self::opposite_swap()),
            TargetKind::Custom => None,
        }
    }

    pub fn kind(&self) -> TargetKind {
        self.kind
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }
}

/// Either a fixed target or "score both SWAP formats and keep the better".
#[derive(Debug, Clone, PartialEq)]
pub enum TargetChoice {
    Fixed(TargetGate),
    Auto,
}

/// Basis change from `(C0, C1+, C2, C1-)` to `(|00⟩, |01⟩, |10⟩, |11⟩)`.
fn symmetric_basis() -> CMat {
    let s = FRAC_1_SQRT_2;
    CMat::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, s, 0.0, s],
        &[0.0, s, 0.0, -s],
        &[0.0, 0.0, 1.0, 0.0],
    ])
}

/// Combine the singlet amplitude `s` (final C1- from C1- = 1) and the 3×3
/// triplet block (column k = final (C0, C1+, C2) from initial state k) into
/// the 4×4 computational map.
pub fn assemble_gate_matrix(singlet: C64, triplet: &CMat) -> CMat {
    assert_eq!((triplet.rows(), triplet.cols()), (3, 3));
    let mut block = CMat::zeros(4, 4);
    for i in 0..3 {
        for j in 0..3 {
            block[(i, j)] = triplet[(i, j)];
        }
    }
    block[(3, 3)] = singlet;
    let q = symmetric_basis();
    &(&q * &block) * &q.adjoint()
}

/// Average-gate-fidelity trace formula `[Tr(MM†) + |Tr M|²] / (n(n+1))`,
/// `M = target† · actual`. Leakage enters through a non-unitary `actual`.
pub fn fidelity(actual: &CMat, target: &TargetGate) -> f64 {
    let m = &target.matrix.adjoint() * actual;
    let n = m.rows() as f64;
    let tr_mm = m.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>();
    (tr_mm + m.trace().norm_sqr()) / (n * (n + 1.0))
}

/// Computational map plus the population bookkeeping from one gate run.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMap {
    pub actual_map: CMat,
    /// ∫ P_ryd dt averaged over |00⟩, |01⟩, |10⟩, |11⟩ (equivalently over
    /// the C0, C1+, C2, C1- runs), μs.
    pub integrated_rydberg_population: f64,
}

impl GateMap {
    /// `1 − Tr(A†A)/4`: the mean population not returned to the computational
    /// subspace.
    pub fn leakage(&self) -> f64 {
        let kept = self
            .actual_map
            .as_slice()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            / 4.0;
        1.0 - kept
    }

    pub fn score(&self, target: &TargetGate) -> GateOutcome {
        let f = fidelity(&self.actual_map, target).clamp(0.0, 1.0);
        GateOutcome {
            actual_map: self.actual_map.clone(),
            fidelity: f,
            gate_error: 1.0 - f,
            leakage: self.leakage(),
            integrated_rydberg_population: self.integrated_rydberg_population,
            target: target.kind(),
        }
    }

    /// Score against both SWAP formats and return the better (standard wins
    /// ties).
    pub fn score_auto(&self) -> GateOutcome {
        let std_ = self.score(&TargetGate::standard_swap());
        let opp = self.score(&TargetGate::opposite_swap());
        if opp.fidelity > std_.fidelity {
            opp
        } else {
            std_
        }
    }

    pub fn score_choice(&self, choice: &TargetChoice) -> GateOutcome {
        match choice {
            TargetChoice::Fixed(t) => self.score(t),
            TargetChoice::Auto => self.score_auto(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOutcome {
    /// Column k = final computational amplitudes for computational input k.
    pub actual_map: CMat,
    pub fidelity: f64,
    pub gate_error: f64,
    pub leakage: f64,
    pub integrated_rydberg_population: f64,
    pub target: TargetKind,
}

/// One singlet and three triplet integrations, assembled into the 4×4 map.
pub fn gate_map(
    ws: &WaveformSet,
    bm: &BlockadeModel,
    cfg: &IntegratorConfig,
) -> Result<GateMap, Error> {
    let s0 = crate::dynamics::evolve::basis_vector(3, 0);
    let singlet = evolve(ws, bm, Channel::Singlet, &s0, cfg, &[])?;
    let n = Channel::Triplet.dim(bm);
    let mut triplet = CMat::zeros(3, 3);
    let mut ryd = singlet.rydberg_integral;
    for k in 0..3 {
        let tr = evolve(
            ws,
            bm,
            Channel::Triplet,
            &crate::dynamics::evolve::basis_vector(n, k),
            cfg,
            &[],
        )?;
        triplet.set_col(k, &tr.final_state[..3]);
        ryd += tr.rydberg_integral;
    }
    Ok(GateMap {
        actual_map: assemble_gate_matrix(singlet.final_state[0], &triplet),
        integrated_rydberg_population: ryd / 4.0,
    })
}

pub fn evaluate_gate(
    ws: &WaveformSet,
    bm: &BlockadeModel,
    target: &TargetGate,
    cfg: &IntegratorConfig,
) -> Result<GateOutcome, Error> {
    Ok(gate_map(ws, bm, cfg)?.score(target))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEstimate {
    /// μs⁻¹.
    pub gamma_r: f64,
    /// 0.5 γ_r τ.
    pub coarse_error: f64,
    /// γ_r ⟨∫ P_ryd dt⟩.
    pub integrated_error: f64,
}

/// Rydberg spontaneous-emission error estimates for a gate of duration `tau`.
pub fn decay_estimate(
    outcome: &GateOutcome,
    gamma_r: f64,
    tau: f64,
) -> Result<DecayEstimate, Error> {
    if !(gamma_r >= 0.0 && gamma_r.is_finite()) {
        return Err(Error::InvalidInput("gamma_r must be finite and >= 0"));
    }
    Ok(DecayEstimate {
        gamma_r,
        coarse_error: 0.5 * gamma_r * tau,
        integrated_error: gamma_r * outcome.integrated_rydberg_population.max(0.0),
    })
}
