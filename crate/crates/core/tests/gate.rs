//! Fidelity contract, leakage bookkeeping and decay estimates.

mod oracle;

use proptest::prelude::*;
use rydswap_core::{
    gate::{decay_estimate, fidelity, gate_map, GateMap},
    linalg::CMat,
    presets, IntegratorConfig, TargetGate, C64,
};

fn to_cmat(m: &[[C64; 4]; 4]) -> CMat {
    let rows: Vec<&[C64]> = m.iter().map(|r| r.as_slice()).collect();
    CMat::from_rows(&rows)
}

fn random_matrix(entries: &[(f64, f64)]) -> [[C64; 4]; 4] {
    let mut m = [[C64::new(0.0, 0.0); 4]; 4];
    for (k, &(re, im)) in entries.iter().enumerate() {
        m[k / 4][k % 4] = C64::new(re, im);
    }
    m
}

/// Gram-Schmidt on the columns.
fn unitary_from(m: [[C64; 4]; 4]) -> [[C64; 4]; 4] {
    let mut cols: Vec<[C64; 4]> = (0..4)
        .map(|j| [m[0][j], m[1][j], m[2][j], m[3][j]])
        .collect();
    for j in 0..4 {
        for k in 0..j {
            let dot: C64 = (0..4).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..4 {
                let sub = dot * cols[k][i];
                cols[j][i] -= sub;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    let mut u = [[C64::new(0.0, 0.0); 4]; 4];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..4 {
            u[i][j] = col[i];
        }
    }
    u
}

fn entries() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 16)
}

#[test]
fn fidelity_fixed_points() {
    for target in [TargetGate::standard_swap(), TargetGate::opposite_swap()] {
        assert!((fidelity(target.matrix(), &target) - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&CMat::zeros(4, 4), &target), 0.0);
    }
    let cz = CMat::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 0.0, 0.0, -1.0],
    ]);
    assert!((fidelity(&cz, &TargetGate::standard_swap()) - 0.2).abs() < 1e-15);
}

#[test]
fn non_unitary_custom_target_is_rejected() {
    assert!(TargetGate::custom(CMat::zeros(4, 4)).is_err());
    assert!(TargetGate::custom(CMat::identity(3)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn global_phase_leaves_fidelity_unchanged(e in entries(), phi in 0.0..6.3f64, opposite: bool) {
        let u = to_cmat(&unitary_from(random_matrix(&e)));
        let target = if opposite { TargetGate::opposite_swap() } else { TargetGate::standard_swap() };
        let rotated = u.scale(C64::from_polar(1.0, phi));
        prop_assert!((fidelity(&u, &target) - fidelity(&rotated, &target)).abs() < 1e-12);
    }

    #[test]
    fn unitary_scored_against_itself_is_perfect(e in entries()) {
        let u = to_cmat(&unitary_from(random_matrix(&e)));
        let target = TargetGate::custom(u.clone()).unwrap();
        prop_assert!((fidelity(&u, &target) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_matches_longhand_formula(e in entries(), opposite: bool) {
        let m = random_matrix(&e);
        let target = if opposite { TargetGate::opposite_swap() } else { TargetGate::standard_swap() };
        let got = fidelity(&to_cmat(&m), &target);
        let want = oracle::fidelity(&m, &oracle::swap(opposite));
        prop_assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn gate_error_bounds_leakage(e in entries(), keep in 0.0..1.0f64) {
        let u = to_cmat(&unitary_from(random_matrix(&e)));
        let map = GateMap { actual_map: u.scale(C64::new(keep.sqrt(), 0.0)), integrated_rydberg_population: 0.0 };
        prop_assert!((map.leakage() - (1.0 - keep)).abs() < 1e-12);
        let outcome = map.score_auto();
        prop_assert!(outcome.gate_error >= outcome.leakage - 1e-12);
        prop_assert!((0.0..=1.0).contains(&outcome.fidelity));
    }
}

#[test]
fn preset_leakage_is_consistent() {
    for p in presets::all() {
        let outcome = gate_map(&p.waveforms, &p.blockade, &IntegratorConfig::default())
            .unwrap()
            .score_auto();
        assert!(outcome.leakage >= -1e-12, "{}", p.id);
        assert!(outcome.gate_error >= outcome.leakage - 1e-12, "{}", p.id);
    }
}

#[test]
fn decay_estimates_for_presets() {
    let gamma = 1.0 / 150.0;
    for p in presets::all() {
        let outcome = gate_map(&p.waveforms, &p.blockade, &IntegratorConfig::default())
            .unwrap()
            .score_auto();
        let tau = p.waveforms.tau;
        let d = decay_estimate(&outcome, gamma, tau).unwrap();
        assert_eq!(d.coarse_error, 0.5 * gamma * tau);
        assert!(
            (0.0..=gamma * tau).contains(&d.integrated_error),
            "{}: {}",
            p.id,
            d.integrated_error
        );
    }
    let p = &presets::all()[0];
    let o = gate_map(&p.waveforms, &p.blockade, &IntegratorConfig::default())
        .unwrap()
        .score_auto();
    assert!(decay_estimate(&o, -1.0, 0.25).is_err());
    assert!(decay_estimate(&o, f64::NAN, 0.25).is_err());
}
