//! Singlet/triplet assembly against brute-force product-basis evolution.

mod oracle;

use rydswap_core::{
    dynamics::evolve_full_computational,
    gate::gate_map,
    presets::{self, PresetId},
    IntegratorConfig, PhaseConvention, WaveformSet,
};

const STEPS: usize = 40_000;

fn max_deviation(ws: &WaveformSet, bm: &rydswap_core::BlockadeModel) -> f64 {
    let cfg = IntegratorConfig::default();
    let assembled = gate_map(ws, bm, &cfg).unwrap().actual_map;
    let reference = oracle::computational_map(&oracle::Setup::new(ws, bm), STEPS);
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((assembled[(i, j)] - reference[i][j]).norm());
        }
    }
    worst
}

/// The product basis only exists for integrated detuning phases.
fn integrated(ws: &WaveformSet) -> WaveformSet {
    ws.clone()
        .with_phase_convention(PhaseConvention::Integrated)
}

#[test]
fn oracle_resolves_itself() {
    let (ws, bm) = oracle::random_case(1);
    let setup = oracle::Setup::new(&ws, &bm);
    let coarse = oracle::computational_map(&setup, STEPS);
    let fine = oracle::computational_map(&setup, 2 * STEPS);
    for i in 0..4 {
        for j in 0..4 {
            assert!((coarse[i][j] - fine[i][j]).norm() < 1e-10);
        }
    }
}

#[test]
fn presets_match_product_basis() {
    for p in presets::all() {
        let d = max_deviation(&integrated(&p.waveforms), &p.blockade);
        assert!(d < 1e-8, "{}: {d:e}", p.id);
    }
}

#[test]
fn random_sets_match_product_basis() {
    for seed in 0..20 {
        let (ws, bm) = oracle::random_case(seed);
        let d = max_deviation(&ws, &bm);
        assert!(d < 1e-8, "seed {seed}: {d:e}");
    }
}

#[test]
fn crate_product_basis_channel_matches_oracle() {
    let cfg = IntegratorConfig::default();
    for seed in [2, 7] {
        let (ws, bm) = oracle::random_case(seed);
        let m = evolve_full_computational(&ws, &bm, &cfg).unwrap();
        let reference = oracle::computational_map(&oracle::Setup::new(&ws, &bm), STEPS);
        for i in 0..4 {
            for j in 0..4 {
                assert!((m[(i, j)] - reference[i][j]).norm() < 1e-8, "seed {seed}");
            }
        }
    }
}

#[test]
fn oracle_fidelity_agrees_with_crate_scoring() {
    let p = presets::lookup(PresetId::FigA3SymmetricB100);
    let reference =
        oracle::computational_map(&oracle::Setup::new(&p.waveforms, &p.blockade), STEPS);
    let outcome = gate_map(&p.waveforms, &p.blockade, &IntegratorConfig::default())
        .unwrap()
        .score_auto();
    let standard = 1.0 - oracle::fidelity(&reference, &oracle::swap(false));
    let opposite = 1.0 - oracle::fidelity(&reference, &oracle::swap(true));
    assert!((outcome.gate_error - standard.min(opposite)).abs() < 1e-8);
    assert!(standard < 5e-4 && opposite > 0.1);
}
