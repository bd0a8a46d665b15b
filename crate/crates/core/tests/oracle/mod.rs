//! Brute-force reference model: two three-level atoms in the full product
//! basis, integrated with fixed-step RK4. Nothing here calls into the crate
//! except to read raw Fourier coefficients.

#![allow(dead_code)]

use rydswap_core::{BlockadeModel, WaveformSet, C64};
use std::f64::consts::TAU as TWO_PI;

/// Levels per atom: 0, 1 and the Rydberg state r = 2. Product state (a, b)
/// sits at `3a + b`; index 9 is the Förster pair state.
const DIM: usize = 10;
const RR: usize = 8;
const QQ: usize = 9;

/// Computational inputs |00⟩ |01⟩ |10⟩ |11⟩ in product indices.
pub const COMPUTATIONAL: [usize; 4] = [0, 1, 3, 4];

#[derive(Debug, Clone)]
pub struct Setup {
    pub omega: [Vec<C64>; 2],
    pub delta: [Vec<C64>; 2],
    pub tau: f64,
    /// `(B, δ_q)` in rad/μs; `None` removes |rr⟩ and the pair state.
    pub pair: Option<(f64, f64)>,
}

impl Setup {
    pub fn new(ws: &WaveformSet, bm: &BlockadeModel) -> Self {
        Self {
            omega: [ws.omega0.coeffs().to_vec(), ws.omega1.coeffs().to_vec()],
            delta: [ws.delta0.coeffs().to_vec(), ws.delta1.coeffs().to_vec()],
            tau: ws.tau,
            pair: match *bm {
                BlockadeModel::Ideal => None,
                BlockadeModel::Finite { b, delta_q } => Some((b, delta_q)),
            },
        }
    }
}

/// `2π (a_0 + Σ 2 Re[a_n e^{2πint/τ}]) / (2N+1)`.
pub fn fourier(c: &[C64], tau: f64, t: f64) -> f64 {
    let w = TWO_PI / tau;
    let mut s = c[0].re;
    for (n, a) in c.iter().enumerate().skip(1) {
        s += 2.0 * (a * C64::from_polar(1.0, w * n as f64 * t)).re;
    }
    TWO_PI * s / (2 * c.len() - 1) as f64
}

/// ∫₀ᵗ of [`fourier`].
pub fn fourier_integral(c: &[C64], tau: f64, t: f64) -> f64 {
    let w = TWO_PI / tau;
    let mut s = c[0].re * t;
    for (n, a) in c.iter().enumerate().skip(1) {
        let k = w * n as f64;
        let e = C64::from_polar(1.0, k * t) - 1.0;
        s += 2.0 * (a * e / C64::new(0.0, k)).re;
    }
    TWO_PI * s / (2 * c.len() - 1) as f64
}

/// Interaction-picture Hamiltonian: each atom has `⟨r|h|k⟩ = ½Ω_k e^{iθ_k}`
/// with `θ_k = ∫Δ_k`, and |rr⟩ couples to the pair state with strength B.
fn hamiltonian(s: &Setup, t: f64) -> [[C64; DIM]; DIM] {
    let mut h = [[C64::new(0.0, 0.0); DIM]; DIM];
    let couple = |k: usize| {
        let amp = 0.5 * fourier(&s.omega[k], s.tau, t);
        C64::from_polar(amp, fourier_integral(&s.delta[k], s.tau, t))
    };
    let g = [couple(0), couple(1)];
    for spectator in 0..3 {
        for (k, gk) in g.iter().enumerate() {
            for (from, to) in [
                (3 * k + spectator, 3 * 2 + spectator),
                (3 * spectator + k, 3 * spectator + 2),
            ] {
                if to == RR && s.pair.is_none() {
                    continue;
                }
                h[to][from] = *gk;
                h[from][to] = gk.conj();
            }
        }
    }
    if let Some((b, dq)) = s.pair {
        h[RR][QQ] = C64::new(b, 0.0);
        h[QQ][RR] = C64::new(b, 0.0);
        h[QQ][QQ] = C64::new(dq, 0.0);
    }
    h
}

type State = [[C64; 4]; DIM];

fn derivative(s: &Setup, t: f64, y: &State) -> State {
    let h = hamiltonian(s, t);
    let mut dy = [[C64::new(0.0, 0.0); 4]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            if h[i][j] == C64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..4 {
                dy[i][c] += h[i][j] * y[j][c];
            }
        }
        for c in 0..4 {
            dy[i][c] *= C64::new(0.0, -1.0);
        }
    }
    dy
}

fn axpy(y: &State, a: f64, k: &State) -> State {
    let mut out = *y;
    for i in 0..DIM {
        for c in 0..4 {
            out[i][c] += k[i][c] * a;
        }
    }
    out
}

/// Final product-basis states of the four computational inputs (column
/// `c` evolves input `c`).
pub fn evolve_inputs(s: &Setup, steps: usize) -> State {
    let mut y = [[C64::new(0.0, 0.0); 4]; DIM];
    for (c, &i) in COMPUTATIONAL.iter().enumerate() {
        y[i][c] = C64::new(1.0, 0.0);
    }
    let h = s.tau / steps as f64;
    for n in 0..steps {
        let t = n as f64 * h;
        let k1 = derivative(s, t, &y);
        let k2 = derivative(s, t + 0.5 * h, &axpy(&y, 0.5 * h, &k1));
        let k3 = derivative(s, t + 0.5 * h, &axpy(&y, 0.5 * h, &k2));
        let k4 = derivative(s, t + h, &axpy(&y, h, &k3));
        for i in 0..DIM {
            for c in 0..4 {
                y[i][c] += (k1[i][c] + k2[i][c] * 2.0 + k3[i][c] * 2.0 + k4[i][c]) * (h / 6.0);
            }
        }
    }
    y
}

/// 4×4 computational block, `m[out][in]`.
pub fn computational_map(s: &Setup, steps: usize) -> [[C64; 4]; 4] {
    let y = evolve_inputs(s, steps);
    let mut m = [[C64::new(0.0, 0.0); 4]; 4];
    for (r, &i) in COMPUTATIONAL.iter().enumerate() {
        m[r] = y[i];
    }
    m
}

/// Standard SWAP exchanges |01⟩ and |10⟩; the opposite format exchanges
/// |00⟩ and |11⟩. Basis order |00⟩ |01⟩ |10⟩ |11⟩.
pub fn swap(opposite: bool) -> [[C64; 4]; 4] {
    let (a, b) = if opposite { (0, 3) } else { (1, 2) };
    let mut m = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        let j = if i == a {
            b
        } else if i == b {
            a
        } else {
            i
        };
        m[i][j] = C64::new(1.0, 0.0);
    }
    m
}

/// `[Tr(MM†) + |Tr M|²] / 20` with `M = U†A`, written out longhand.
pub fn fidelity(actual: &[[C64; 4]; 4], target: &[[C64; 4]; 4]) -> f64 {
    let mut m = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                m[i][j] += target[k][i].conj() * actual[k][j];
            }
        }
    }
    let frob: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
    let trace: C64 = (0..4).map(|i| m[i][i]).sum();
    (frob + trace.norm_sqr()) / 20.0
}

/// Seeded random waveform set with time-dependent complex detunings and,
/// for odd seeds, a finite blockade with nonzero δ_q.
pub fn random_case(seed: u64) -> (WaveformSet, BlockadeModel) {
    use rand::{Rng, SeedableRng};
    use rydswap_core::FourierSeries;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut series = |terms: usize, a0: (f64, f64), spread: f64, complex: bool| {
        let mut c = vec![C64::new(rng.random_range(a0.0..a0.1), 0.0)];
        for _ in 1..terms {
            let im = if complex {
                rng.random_range(-spread..spread)
            } else {
                0.0
            };
            c.push(C64::new(rng.random_range(-spread..spread), im));
        }
        FourierSeries::new(c).unwrap()
    };
    let n = 3 + (seed % 5) as usize;
    let omega0 = series(n, (20.0, 80.0), 15.0, false);
    let omega1 = series(n, (20.0, 80.0), 15.0, seed.is_multiple_of(3));
    let delta0 = series(1 + (seed % 4) as usize, (-20.0, 20.0), 10.0, true);
    let delta1 = series(1 + (seed % 3) as usize, (-20.0, 20.0), 10.0, true);
    let ws = WaveformSet::new(omega0, omega1, delta0, delta1, 0.25).unwrap();
    let bm = if seed % 2 == 1 {
        BlockadeModel::finite(
            TWO_PI * rng.random_range(50.0..300.0),
            TWO_PI * rng.random_range(-10.0..10.0),
        )
        .unwrap()
    } else {
        BlockadeModel::Ideal
    };
    (ws, bm)
}
