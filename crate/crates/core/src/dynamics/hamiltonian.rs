//! Rotating-frame Hamiltonians, ħ = 1.
//!
//! Channel bases:
//!
//! * singlet `[C1-, C0r, C1r]`: `C1- = (|01⟩ − |10⟩)/√2` with the partner
//!   reached by laser 0 (detuning Δ0) at index 1 and the partner reached by
//!   laser 1 (Δ1) at index 2;
//! * triplet `[C0, C1+, C2, Cr0, Cr1, Crr, Cqq']` with `C0 = |00⟩`,
//!   `C1+ = (|01⟩ + |10⟩)/√2`, `C2 = |11⟩`, `Cr0 = (|0r⟩ + |r0⟩)/√2`,
//!   `Cr1 = (|r1⟩ + |1r⟩)/√2`; the last two are dropped under ideal blockade.
//!
//! Computational states carry no rotating phase. The mixed-laser couplings of
//! the triplet carry `e^{±iΦ(t)}`, see [`PhaseConvention`](crate::waveform::PhaseConvention).

use core::f64::consts::FRAC_1_SQRT_2;

use crate::{
    dynamics::BlockadeModel,
    linalg::CMat,
    waveform::{Drive, WaveformSet},
    C64,
};

pub const SINGLET_DIM: usize = 3;
pub const TRIPLET_DIM_FINITE: usize = 7;
pub const TRIPLET_DIM_IDEAL: usize = 5;
pub const FULL_DIM_FINITE: usize = 10;
pub const FULL_DIM_IDEAL: usize = 8;

/// Product basis order: |00⟩ |01⟩ |10⟩ |11⟩ |0r⟩ |r0⟩ |1r⟩ |r1⟩ |rr⟩ |qq'⟩.
pub const FULL_LABELS: [&str; 10] = ["00", "01", "10", "11", "0r", "r0", "1r", "r1", "rr", "qq"];
pub const SINGLET_LABELS: [&str; 3] = ["C1-", "C0r", "C1r"];
pub const TRIPLET_LABELS: [&str; 7] = ["C0", "C1+", "C2", "Cr0", "Cr1", "Crr", "Cqq"];

pub fn triplet_dim(bm: &BlockadeModel) -> usize {
    match bm {
        BlockadeModel::Ideal => TRIPLET_DIM_IDEAL,
        BlockadeModel::Finite { .. } => TRIPLET_DIM_FINITE,
    }
}

pub fn full_dim(bm: &BlockadeModel) -> usize {
    match bm {
        BlockadeModel::Ideal => FULL_DIM_IDEAL,
        BlockadeModel::Finite { .. } => FULL_DIM_FINITE,
    }
}

#[inline]
fn set_pair(h: &mut CMat, i: usize, j: usize, v: C64) {
    h[(i, j)] = v;
    h[(j, i)] = v.conj();
}

#[inline]
fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn fill_singlet(d: &Drive, h: &mut CMat) {
    debug_assert_eq!(h.rows(), SINGLET_DIM);
    set_pair(h, 0, 1, re(0.5 * d.omega0));
    set_pair(h, 0, 2, re(0.5 * d.omega1));
    set_pair(h, 1, 2, re(0.0));
    h[(0, 0)] = re(0.0);
    h[(1, 1)] = re(d.delta0);
    h[(2, 2)] = re(d.delta1);
}

/// Triplet Hamiltonian with explicit phase factors `e^{±iΦ}`.
pub fn fill_triplet(d: &Drive, bm: &BlockadeModel, h: &mut CMat) {
    let n = triplet_dim(bm);
    debug_assert_eq!(h.rows(), n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    let s = FRAC_1_SQRT_2; // √2 / 2
    let e = C64::from_polar(1.0, d.phase);
    set_pair(h, 0, 3, re(s * d.omega0));
    set_pair(h, 1, 3, e * (0.5 * d.omega1));
    set_pair(h, 1, 4, e.conj() * (0.5 * d.omega0));
    set_pair(h, 2, 4, re(s * d.omega1));
    h[(3, 3)] = re(d.delta0);
    h[(4, 4)] = re(d.delta1);
    if let BlockadeModel::Finite { b, delta_q } = *bm {
        set_pair(h, 3, 5, e.conj() * (s * d.omega0));
        set_pair(h, 4, 5, e * (s * d.omega1));
        h[(5, 5)] = re(d.delta0 + d.delta1);
        h[(6, 6)] = re(d.delta0 + d.delta1 + delta_q);
        set_pair(h, 5, 6, re(b));
    }
}

/// Triplet Hamiltonian in the diagonal-detuning gauge: the explicit phases are
/// absorbed by `c_s = c̃_s e^{-iφ_s}` with
/// `φ = [0, −Φ, −2Φ, 0, −2Φ, −Φ, −Φ]`, which shifts the diagonal by `−φ̇_s`.
pub fn fill_triplet_diagonal_gauge(d: &Drive, bm: &BlockadeModel, h: &mut CMat) {
    let frozen = Drive { phase: 0.0, ..*d };
    fill_triplet(&frozen, bm, h);
    let r = d.phase_rate;
    h[(1, 1)] = re(r);
    h[(2, 2)] = re(2.0 * r);
    h[(4, 4)] = re(d.delta1 + 2.0 * r);
    if let BlockadeModel::Finite { delta_q, .. } = *bm {
        h[(5, 5)] = re(d.delta0 + d.delta1 + r);
        h[(6, 6)] = re(d.delta0 + d.delta1 + delta_q + r);
    }
}

/// Gauge phases `φ_s(t)` relating [`fill_triplet`] (`c`) and
/// [`fill_triplet_diagonal_gauge`] (`c̃`): `c_s = c̃_s e^{-iφ_s}`.
pub fn diagonal_gauge_phases(phase: f64, dim: usize) -> [f64; TRIPLET_DIM_FINITE] {
    let mut p = [0.0, -phase, -2.0 * phase, 0.0, -2.0 * phase, -phase, -phase];
    for x in p.iter_mut().skip(dim) {
        *x = 0.0;
    }
    p
}

/// Index of a product state in [`FULL_LABELS`] order; levels 0, 1, 2 = r.
fn product_index(a: usize, b: usize) -> Option<usize> {
    match (a, b) {
        (0, 0) => Some(0),
        (0, 1) => Some(1),
        (1, 0) => Some(2),
        (1, 1) => Some(3),
        (0, 2) => Some(4),
        (2, 0) => Some(5),
        (1, 2) => Some(6),
        (2, 1) => Some(7),
        (2, 2) => Some(8),
        _ => None,
    }
}

/// Two-atom Hamiltonian in the product basis, interaction picture with respect
/// to the bare level energies: `H_a ⊗ 1 + 1 ⊗ H_a + H_q` where
/// `⟨k|H_a|r⟩ = ½ Ω_k e^{−iθ_k}` and `θ_k = ∫₀ᵗ Δ_k`.
pub fn fill_full(ws: &WaveformSet, bm: &BlockadeModel, t: f64, h: &mut CMat) {
    let theta0 = ws.delta0.integral(t, ws.tau);
    let theta1 = ws.delta1.integral(t, ws.tau);
    let omega0 = ws.omega0.eval(t, ws.tau);
    let omega1 = ws.omega1.eval(t, ws.tau);
    fill_full_with_phases(omega0, omega1, theta0, theta1, bm, h);
}

pub fn fill_full_with_phases(
    omega0: f64,
    omega1: f64,
    theta0: f64,
    theta1: f64,
    bm: &BlockadeModel,
    h: &mut CMat,
) {
    let n = full_dim(bm);
    debug_assert_eq!(h.rows(), n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    // single-atom couplings ⟨k|h|r⟩
    let g = [
        C64::from_polar(0.5 * omega0, -theta0),
        C64::from_polar(0.5 * omega1, -theta1),
    ];
    for other in 0..3 {
        for k in 0..2 {
            // atom 1 flips k -> r, atom 2 spectator
            if let (Some(i), Some(j)) = (product_index(k, other), product_index(2, other)) {
                if j < n && i < n {
                    set_pair(h, i, j, g[k]);
                }
            }
            // atom 2 flips k -> r, atom 1 spectator
            if let (Some(i), Some(j)) = (product_index(other, k), product_index(other, 2)) {
                if j < n && i < n {
                    set_pair(h, i, j, g[k]);
                }
            }
        }
    }
    if let BlockadeModel::Finite { b, delta_q } = *bm {
        set_pair(h, 8, 9, re(b));
        h[(9, 9)] = re(delta_q);
    }
}

/// Columns are the channel basis vectors `[C1-, C0r, C1r, C0, C1+, C2, Cr0,
/// Cr1, (Crr, Cqq')]` expressed in the product basis.
pub fn channel_basis(bm: &BlockadeModel) -> CMat {
    let n = full_dim(bm);
    let mut w = CMat::zeros(n, n);
    let s = FRAC_1_SQRT_2;
    let mut col = 0;
    let mut put = |entries: &[(usize, f64)]| {
        for &(i, v) in entries {
            w[(i, col)] = re(v);
        }
        col += 1;
    };
    // singlet
    put(&[(1, s), (2, -s)]); // (|01⟩ − |10⟩)/√2
    put(&[(7, s), (6, -s)]); // (|r1⟩ − |1r⟩)/√2, laser-0 partner
    put(&[(4, s), (5, -s)]); // (|0r⟩ − |r0⟩)/√2, laser-1 partner
                             // triplet
    put(&[(0, 1.0)]);
    put(&[(1, s), (2, s)]);
    put(&[(3, 1.0)]);
    put(&[(4, s), (5, s)]);
    put(&[(7, s), (6, s)]);
    if n == FULL_DIM_FINITE {
        put(&[(8, 1.0)]);
        put(&[(9, 1.0)]);
    }
    w
}

pub fn h_singlet(ws: &WaveformSet, t: f64) -> CMat {
    let mut h = CMat::zeros(SINGLET_DIM, SINGLET_DIM);
    fill_singlet(&ws.drive(t), &mut h);
    h
}

pub fn h_triplet(ws: &WaveformSet, bm: &BlockadeModel, t: f64) -> CMat {
    let n = triplet_dim(bm);
    let mut h = CMat::zeros(n, n);
    fill_triplet(&ws.drive(t), bm, &mut h);
    h
}

/// Triplet Hamiltonian with a caller-supplied phase Φ.
pub fn h_triplet_with_phase(ws: &WaveformSet, bm: &BlockadeModel, t: f64, phase: f64) -> CMat {
    let n = triplet_dim(bm);
    let mut h = CMat::zeros(n, n);
    fill_triplet(
        &Drive {
            phase,
            ..ws.drive(t)
        },
        bm,
        &mut h,
    );
    h
}

pub fn h_triplet_diagonal_gauge(ws: &WaveformSet, bm: &BlockadeModel, t: f64) -> CMat {
    let n = triplet_dim(bm);
    let mut h = CMat::zeros(n, n);
    fill_triplet_diagonal_gauge(&ws.drive(t), bm, &mut h);
    h
}

pub fn h_full(ws: &WaveformSet, bm: &BlockadeModel, t: f64) -> CMat {
    let n = full_dim(bm);
    let mut h = CMat::zeros(n, n);
    fill_full(ws, bm, t, &mut h);
    h
}
