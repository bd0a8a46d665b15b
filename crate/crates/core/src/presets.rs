//! Published waveform sets, stored verbatim (MHz, two decimals as printed).

use alloc::{string::ToString, vec::Vec};
use core::{fmt, str::FromStr};

use crate::{
    dynamics::BlockadeModel,
    error::Error,
    gate::TargetKind,
    mhz,
    waveform::{FourierSeries, PhaseConvention, WaveformSet, DEFAULT_TAU},
    C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PresetId {
    /// Hybrid amplitude + frequency modulation, Ω0 = Ω1, ideal blockade.
    Fig2Hybrid,
    /// Amplitude-only, off-resonant constant detunings, ideal blockade.
    Fig3AmplitudeOffres,
    /// Variant of the above tailored to B = 2π×125 MHz, δ_q = 0.
    Fig3VariantB125,
    /// Amplitude-only with resonant drives (Δ0 = Δ1 = 0), ideal blockade.
    FigA2Resonant,
    /// Ω0 = Ω1 and Δ0 + Δ1 = 0, tailored to B = 2π×100 MHz, δ_q = 0.
    FigA3SymmetricB100,
}

impl PresetId {
    pub const ALL: [PresetId; 5] = [
        PresetId::Fig2Hybrid,
        PresetId::Fig3AmplitudeOffres,
        PresetId::Fig3VariantB125,
        PresetId::FigA2Resonant,
        PresetId::FigA3SymmetricB100,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetId::Fig2Hybrid => "fig2_hybrid",
            PresetId::Fig3AmplitudeOffres => "fig3_amplitude_offres",
            PresetId::Fig3VariantB125 => "fig3_variant_B125",
            PresetId::FigA2Resonant => "figA2_resonant",
            PresetId::FigA3SymmetricB100 => "figA3_symmetric_B100",
        }
    }
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        PresetId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub id: PresetId,
    pub waveforms: WaveformSet,
    pub blockade: BlockadeModel,
    /// SWAP format the waveforms realize. For the two appendix sets this is
    /// the winner of scoring against both formats; `gate` tests re-derive it.
    pub target: TargetKind,
}

fn real(c: &[f64]) -> FourierSeries {
    FourierSeries::from_real(c).expect("preset coefficients are valid")
}

fn complex(c: &[(f64, f64)]) -> FourierSeries {
    FourierSeries::new(
        c.iter()
            .map(|&(re, im)| C64::new(re, im))
            .collect::<Vec<_>>(),
    )
    .expect("preset coefficients are valid")
}

fn set(o0: FourierSeries, o1: FourierSeries, d0: FourierSeries, d1: FourierSeries) -> WaveformSet {
    WaveformSet::new(o0, o1, d0, d1, DEFAULT_TAU).expect("default tau is valid")
}

pub fn lookup(id: PresetId) -> Preset {
    match id {
        PresetId::Fig2Hybrid => {
            let omega = real(&[66.26, -20.40, -4.41, -12.61, -1.47, 5.76]);
            let delta0 = complex(&[
                (-13.37, 0.0),
                (-21.68, -19.43),
                (-10.79, -19.20),
                (-25.28, -33.11),
                (-45.53, -20.21),
                (-8.44, 1.27),
            ]);
            let delta1 = complex(&[
                (54.53, 0.0),
                (-9.77, -16.65),
                (-12.84, -11.28),
                (46.29, -34.26),
                (-11.51, -31.76),
                (-4.05, 2.88),
            ]);
            Preset {
                id,
                waveforms: set(omega.clone(), omega, delta0, delta1)
                    .with_phase_convention(PhaseConvention::Instantaneous),
                blockade: BlockadeModel::Ideal,
                target: TargetKind::Standard,
            }
        }
        PresetId::Fig3AmplitudeOffres => Preset {
            id,
            waveforms: set(
                real(&[
                    199.45, -59.56, -34.98, 32.30, 6.86, -11.85, -6.17, -17.72, -8.61,
                ]),
                real(&[
                    206.49, -55.67, -48.16, 27.76, 11.52, -3.03, -2.06, -25.43, -8.19,
                ]),
                real(&[9.05]),
                real(&[-9.34]),
            ),
            blockade: BlockadeModel::Ideal,
            target: TargetKind::Standard,
        },
        PresetId::Fig3VariantB125 => Preset {
            id,
            waveforms: set(
                real(&[
                    201.72, -60.68, -35.18, 33.33, 6.14, -11.66, -6.12, -18.53, -8.16,
                ]),
                real(&[
                    208.18, -57.17, -47.92, 28.42, 11.19, -3.41, -1.91, -24.41, -8.89,
                ]),
                real(&[9.07]),
                real(&[-9.38]),
            ),
            blockade: BlockadeModel::Finite {
                b: mhz(125.0),
                delta_q: 0.0,
            },
            target: TargetKind::Standard,
        },
        PresetId::FigA2Resonant => Preset {
            id,
            waveforms: set(
                real(&[
                    250.95, -51.38, -51.18, 25.85, -32.11, -12.74, 24.64, -21.83, 11.38, -18.10,
                ]),
                real(&[
                    286.47, -20.74, -13.46, -55.45, 30.51, -27.91, 12.23, -49.65, -43.50, 24.74,
                ]),
                real(&[0.0]),
                real(&[0.0]),
            ),
            blockade: BlockadeModel::Ideal,
            target: TargetKind::Opposite,
        },
        PresetId::FigA3SymmetricB100 => {
            let omega = real(&[191.04, -89.66, -18.38, 37.37, -22.13, 4.32, 4.10, -11.15]);
            Preset {
                id,
                waveforms: set(omega.clone(), omega, real(&[-12.48]), real(&[12.48])),
                blockade: BlockadeModel::Finite {
                    b: mhz(100.0),
                    delta_q: 0.0,
                },
                target: TargetKind::Standard,
            }
        }
    }
}

pub fn all() -> Vec<Preset> {
    PresetId::ALL.into_iter().map(lookup).collect()
}
