//! Effective single-photon drive for a two-photon ground–Rydberg transition
//! through a far-detuned intermediate level (second-order adiabatic
//! elimination). This is the textbook approximation layer, not an exact map.

use crate::{error::Error, waveform::FourierSeries, TWO_PI};

/// Below this ratio of |Δ_e| to the peak leg Rabi frequency the elimination is
/// flagged as unreliable.
pub const MIN_DETUNING_RATIO: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonReduction {
    /// Ω_a Ω_b / (2Δ_e).
    pub omega_eff: FourierSeries,
    /// |Ω_a|² / (4Δ_e), light shift of the lower level.
    pub shift_a: FourierSeries,
    /// |Ω_b|² / (4Δ_e), light shift of the Rydberg level.
    pub shift_b: FourierSeries,
    /// |Δ_e| / max peak |Ω| < [`MIN_DETUNING_RATIO`].
    pub weak_elimination: bool,
}

/// Reduce two real leg waveforms with intermediate detuning `delta_e`
/// (rad/μs) to the effective drive and light shifts.
pub fn two_photon_reduce(
    omega_a: &FourierSeries,
    omega_b: &FourierSeries,
    delta_e: f64,
    tau: f64,
) -> Result<TwoPhotonReduction, Error> {
    if delta_e == 0.0 {
        return Err(Error::SingularElimination);
    }
    if !delta_e.is_finite() {
        return Err(Error::InvalidInput("delta_e must be finite"));
    }
    let peak = omega_a
        .peak_abs(tau, crate::waveform::PEAK_GRID)
        .max(omega_b.peak_abs(tau, crate::waveform::PEAK_GRID));
    Ok(TwoPhotonReduction {
        omega_eff: omega_a.product(omega_b).scaled(1.0 / (2.0 * delta_e)),
        shift_a: omega_a.product(omega_a).scaled(1.0 / (4.0 * delta_e)),
        shift_b: omega_b.product(omega_b).scaled(1.0 / (4.0 * delta_e)),
        weak_elimination: delta_e.abs() < MIN_DETUNING_RATIO * peak,
    })
}

/// Inverse map: realize `omega_eff` with an unmodulated second leg of
/// `leg_b_mhz` (MHz) and a modulated first leg. Returns `(Ω_a, Ω_b)`.
pub fn split_two_photon(
    omega_eff: &FourierSeries,
    delta_e: f64,
    leg_b_mhz: f64,
) -> Result<(FourierSeries, FourierSeries), Error> {
    if delta_e == 0.0 {
        return Err(Error::SingularElimination);
    }
    if leg_b_mhz == 0.0 || !leg_b_mhz.is_finite() {
        return Err(Error::InvalidInput(
            "constant leg must be finite and nonzero",
        ));
    }
    let leg_b = FourierSeries::constant(leg_b_mhz);
    let leg_a = omega_eff.scaled(2.0 * delta_e / (TWO_PI * leg_b_mhz));
    Ok((leg_a, leg_b))
}
