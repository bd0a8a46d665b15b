//! Two-atom Hamiltonians and time-dependent Schrödinger integration.

pub(crate) mod evolve;
pub mod hamiltonian;
pub mod integrator;

pub use evolve::{
    evolve, evolve_computational, evolve_full_computational, gauge_transform_check, Channel,
    GaugeReport, Trajectory,
};
pub use hamiltonian::{
    h_full, h_singlet, h_triplet, h_triplet_diagonal_gauge, h_triplet_with_phase,
};
pub use integrator::{IntegratorConfig, Method};

use crate::error::Error;

/// Rydberg pair interaction: a Förster-resonance coupling `B` between |rr⟩ and
/// a pair state |qq'⟩ offset by `δ_q`, or the ideal-blockade limit B → ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockadeModel {
    /// Doubly excited states are removed from the state space.
    Ideal,
    /// `b`, `delta_q` in rad/μs.
    Finite { b: f64, delta_q: f64 },
}

impl BlockadeModel {
    pub fn finite(b: f64, delta_q: f64) -> Result<Self, Error> {
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::InvalidInput(
                "blockade strength B must be real and >= 0",
            ));
        }
        if !delta_q.is_finite() {
            return Err(Error::InvalidInput("delta_q must be finite"));
        }
        Ok(BlockadeModel::Finite { b, delta_q })
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self, BlockadeModel::Ideal)
    }
}
