//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Tolerances are fixed here and nowhere else.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rydswap_core::{
    dynamics::{evolve, gauge_transform_check, Channel},
    gate::{decay_estimate, fidelity, gate_map, TargetChoice},
    linalg::{vec_norm, CMat},
    mhz,
    optimize::{
        coefficient_displacement, refit_for_blockade, run_restart, RefitOptions, SearchSpec,
    },
    presets::{self, PresetId},
    scan::{
        scan_blockade, scan_detuning_offset, scan_rabi_ratio, DetuningTarget, Grid, RabiTarget,
    },
    waveform::boundary_check,
    BlockadeModel, FourierSeries, IntegratorConfig, PhaseConvention, TargetGate, WaveformSet, C64,
};

const REPRODUCTION_BOUND: f64 = 5e-4;
const REPRODUCTION_SECONDS: f64 = 5.0;
const ORACLE_BOUND: f64 = 1e-8;
const ORACLE_STEPS: usize = 40_000;
const RANDOM_SETS: u64 = 20;
const GAUGE_BOUND: f64 = 1e-8;
const NORM_BOUND: f64 = 1e-9;
const HALVING_BOUND: f64 = 1e-7;
const RABI_BOUND: f64 = 1e-9;
const BOUNDARY_FRACTION: f64 = 1e-3;
const SCAN_POINTS: usize = 21;
const FAR_BLOCKADE_MHZ: f64 = 1e4;
const IDEAL_LIMIT_BOUND: f64 = 1e-4;
const SEARCH_RESTARTS: usize = 8;
const SEARCH_BUDGET: usize = 200_000;
const SEARCH_STOP: f64 = 5e-4;
const SEARCH_BOUND: f64 = 1e-3;
const SEARCH_MINUTES: f64 = 30.0;
const REFIT_BOUND: f64 = 1e-3;
const REFIT_DISPLACEMENT_MHZ: f64 = 5.0;
const PHASE_BOUND: f64 = 1e-12;
const GAMMA_R: f64 = 1.0 / 150.0;

type Verdict = Result<String, String>;
type Check = fn() -> Verdict;

fn ensure(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn preset_reproduction() -> Verdict {
    let mut worst = (0.0f64, String::new());
    let mut slowest = 0.0f64;
    for p in presets::all() {
        let start = Instant::now();
        let outcome = gate_map(&p.waveforms, &p.blockade, &IntegratorConfig::default())
            .map_err(fail)?
            .score_auto();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        if outcome.target != p.target {
            return Err(format!("{} resolves to {}", p.id, outcome.target.as_str()));
        }
        if outcome.gate_error > worst.0 {
            worst = (outcome.gate_error, p.id.to_string());
        }
    }
    ensure(
        worst.0 < REPRODUCTION_BOUND && slowest < REPRODUCTION_SECONDS,
        format!(
            "worst error {:.2e} ({}), slowest {slowest:.2} s",
            worst.0, worst.1
        ),
    )
}

fn oracle_deviation(ws: &WaveformSet, bm: &BlockadeModel) -> Result<f64, String> {
    let assembled = gate_map(ws, bm, &IntegratorConfig::default())
        .map_err(fail)?
        .actual_map;
    let reference = oracle::computational_map(&oracle::Setup::new(ws, bm), ORACLE_STEPS);
    let mut worst = 0.0f64;
    for (i, row) in reference.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            worst = worst.max((assembled[(i, j)] - z).norm());
        }
    }
    Ok(worst)
}

fn decomposition_oracle() -> Verdict {
    let mut worst = 0.0f64;
    for p in presets::all() {
        let ws = p
            .waveforms
            .with_phase_convention(PhaseConvention::Integrated);
        worst = worst.max(oracle_deviation(&ws, &p.blockade)?);
    }
    for seed in 0..RANDOM_SETS {
        let (ws, bm) = oracle::random_case(seed);
        worst = worst.max(oracle_deviation(&ws, &bm)?);
    }
    ensure(
        worst < ORACLE_BOUND,
        format!("max entry deviation {worst:.2e} over 5 presets + {RANDOM_SETS} random sets"),
    )
}

fn gauge_equivalence() -> Verdict {
    let cfg = IntegratorConfig::default();
    let mut worst = 0.0f64;
    for p in presets::all() {
        let r = gauge_transform_check(&p.waveforms, &p.blockade, &cfg, 1.0).map_err(fail)?;
        worst = worst.max(r.max_deviation);
    }
    ensure(
        worst < GAUGE_BOUND,
        format!("max amplitude deviation {worst:.2e}"),
    )
}

fn unit(n: usize, k: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[k] = C64::new(1.0, 0.0);
    v
}

fn rabi_deviation() -> Result<f64, String> {
    let (omega_mhz, delta_mhz) = (17.0, 6.5);
    let ws = WaveformSet::new(
        FourierSeries::constant(omega_mhz),
        FourierSeries::zero(),
        FourierSeries::constant(delta_mhz),
        FourierSeries::zero(),
        0.25,
    )
    .map_err(fail)?;
    let times: Vec<f64> = (0..=100).map(|k| 0.0025 * k as f64).collect();
    let tr = evolve(
        &ws,
        &BlockadeModel::Ideal,
        Channel::Singlet,
        &unit(3, 0),
        &IntegratorConfig::default(),
        &times,
    )
    .map_err(fail)?;
    let (w, d) = (mhz(omega_mhz), mhz(delta_mhz));
    let g = (w * w + d * d).sqrt();
    let mut worst = 0.0f64;
    for (t, state) in times.iter().zip(&tr.states) {
        let phase = C64::from_polar(1.0, -d * t / 2.0);
        let (s, c) = (g * t / 2.0).sin_cos();
        let ground = C64::new(c, d / g * s) * phase;
        let excited = C64::new(0.0, -w / g * s) * phase;
        worst = worst
            .max((state[0] - ground).norm())
            .max((state[1] - excited).norm());
    }
    Ok(worst)
}

fn numerical_hygiene() -> Verdict {
    let cfg = IntegratorConfig::default();
    let mut drift = 0.0f64;
    let mut shift = 0.0f64;
    for p in presets::all() {
        for channel in [
            Channel::Singlet,
            Channel::Triplet,
            Channel::TripletDiagonalGauge,
        ] {
            let n = channel.dim(&p.blockade);
            for k in 0..n {
                let tr = evolve(&p.waveforms, &p.blockade, channel, &unit(n, k), &cfg, &[])
                    .map_err(fail)?;
                drift = drift.max((vec_norm(&tr.final_state) - 1.0).abs());
            }
        }
        let coarse = gate_map(&p.waveforms, &p.blockade, &cfg)
            .map_err(fail)?
            .score_auto();
        let fine = gate_map(&p.waveforms, &p.blockade, &cfg.refined())
            .map_err(fail)?
            .score_auto();
        shift = shift.max((coarse.gate_error - fine.gate_error).abs());
    }
    let rabi = rabi_deviation()?;
    ensure(
        drift < NORM_BOUND && shift < HALVING_BOUND && rabi < RABI_BOUND,
        format!(
            "norm drift {drift:.2e}, halving shift {shift:.2e}, two-level deviation {rabi:.2e}"
        ),
    )
}

fn boundary_criteria() -> Verdict {
    let mut worst = 0.0f64;
    for p in presets::all() {
        let r = boundary_check(&p.waveforms, BOUNDARY_FRACTION);
        worst = worst.max(r.omega0.worst()).max(r.omega1.worst());
    }
    ensure(
        worst <= BOUNDARY_FRACTION,
        format!("worst residual {worst:.2e} of peak"),
    )
}

fn robustness_shape() -> Verdict {
    let cfg = IntegratorConfig::default();
    let nominal = SCAN_POINTS / 2;
    let hybrid = presets::lookup(PresetId::Fig2Hybrid);
    let ratio = scan_rabi_ratio(
        &hybrid.waveforms,
        hybrid.blockade,
        TargetChoice::Auto,
        RabiTarget::Both,
        Grid::new(0.99, 1.01, SCAN_POINTS),
        cfg,
    )
    .map_err(fail)?;
    let offset = scan_detuning_offset(
        &hybrid.waveforms,
        hybrid.blockade,
        TargetChoice::Auto,
        DetuningTarget::Both,
        Grid::new(mhz(-1.0), mhz(1.0), SCAN_POINTS),
        cfg,
    )
    .map_err(fail)?;
    for (label, r) in [("rabi ratio", &ratio), ("detuning offset", &offset)] {
        let e = r.gate_errors();
        let best = r.argmin().ok_or("empty scan")?;
        if best.abs_diff(nominal) > 1 || e[0] <= e[nominal] || e[SCAN_POINTS - 1] <= e[nominal] {
            return Err(format!(
                "{label}: minimum at index {best}, endpoints {:.2e}/{:.2e}, nominal {:.2e}",
                e[0],
                e[SCAN_POINTS - 1],
                e[nominal]
            ));
        }
    }

    let variant = presets::lookup(PresetId::Fig3VariantB125);
    let b_scan = scan_blockade(
        &variant.waveforms,
        variant.blockade,
        TargetChoice::Auto,
        Grid::new(mhz(75.0), mhz(175.0), SCAN_POINTS),
        cfg,
    )
    .map_err(fail)?;
    let best = b_scan.argmin().ok_or("empty scan")?;
    let best_mhz = b_scan.coords(best)[0] / mhz(1.0);
    let b125 = BlockadeModel::finite(mhz(125.0), 0.0).map_err(fail)?;
    let score = |ws: &WaveformSet| -> Result<f64, String> {
        Ok(gate_map(ws, &b125, &cfg)
            .map_err(fail)?
            .score_auto()
            .gate_error)
    };
    let generic = score(&presets::lookup(PresetId::Fig3AmplitudeOffres).waveforms)?;
    let tailored = score(&variant.waveforms)?;
    ensure(
        best.abs_diff(nominal) <= 1 && generic > tailored,
        format!(
            "hybrid minima at nominal; B minimum at {best_mhz:.0} MHz; at 125 MHz generic {generic:.2e} vs tailored {tailored:.2e}"
        ),
    )
}

fn ideal_limit() -> Verdict {
    let cfg = IntegratorConfig::default();
    let far = BlockadeModel::finite(mhz(FAR_BLOCKADE_MHZ), 0.0).map_err(fail)?;
    let mut worst = 0.0f64;
    for p in presets::all() {
        let target = TargetGate::from_kind(p.target).ok_or("preset without SWAP format")?;
        let ideal = gate_map(&p.waveforms, &BlockadeModel::Ideal, &cfg).map_err(fail)?;
        let finite = gate_map(&p.waveforms, &far, &cfg).map_err(fail)?;
        worst =
            worst.max((ideal.score(&target).gate_error - finite.score(&target).gate_error).abs());
    }
    ensure(
        worst < IDEAL_LIMIT_BOUND,
        format!("max gate-error difference {worst:.2e}"),
    )
}

fn optimizer_rederivation() -> Verdict {
    let spec = SearchSpec {
        budget: SEARCH_BUDGET,
        restarts: SEARCH_RESTARTS,
        target_error: Some(SEARCH_STOP),
        ..SearchSpec::amplitude_only(9)
    };
    let start = Instant::now();
    let mut found = None;
    for index in 0..SEARCH_RESTARTS {
        let r = run_restart(&spec, index).map_err(fail)?;
        let error = gate_map(
            &spec.decode(&r.best),
            &spec.blockade,
            &IntegratorConfig::default(),
        )
        .map_err(fail)?
        .score_choice(&spec.target)
        .gate_error;
        if error < SEARCH_BOUND {
            found = Some((index, error, r.evaluations));
            break;
        }
    }
    let minutes = start.elapsed().as_secs_f64() / 60.0;
    let Some((index, error, evaluations)) = found else {
        return Err(format!(
            "no restart below {SEARCH_BOUND:e} in {minutes:.1} min"
        ));
    };

    let base = presets::lookup(PresetId::Fig3AmplitudeOffres).waveforms;
    let b125 = BlockadeModel::finite(mhz(125.0), 0.0).map_err(fail)?;
    let refit = refit_for_blockade(
        &base,
        b125,
        &RefitOptions {
            target_error: Some(1e-4),
            ..Default::default()
        },
    )
    .map_err(fail)?;
    let displacement = coefficient_displacement(&refit.best_waveform, &base);
    ensure(
        minutes < SEARCH_MINUTES
            && refit.best_error < REFIT_BOUND
            && displacement < REFIT_DISPLACEMENT_MHZ,
        format!(
            "restart {index} reached {error:.2e} after {evaluations} evaluations ({minutes:.2} min, 1 core); \
             refit to 125 MHz {:.2e} with displacement {displacement:.2} MHz",
            refit.best_error
        ),
    )
}

fn random_unitary(rng: &mut ChaCha8Rng) -> CMat {
    let mut cols: Vec<Vec<C64>> = (0..4)
        .map(|_| {
            (0..4)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    for j in 0..4 {
        for k in 0..j {
            let dot: C64 = (0..4).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..4 {
                let sub = dot * cols[k][i];
                cols[j][i] -= sub;
            }
        }
        let norm = vec_norm(&cols[j]);
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }
    let mut u = CMat::zeros(4, 4);
    for (j, col) in cols.iter().enumerate() {
        u.set_col(j, col);
    }
    u
}

fn fidelity_contract() -> Verdict {
    let targets = [TargetGate::standard_swap(), TargetGate::opposite_swap()];
    let mut worst = 0.0f64;
    for t in &targets {
        worst = worst
            .max((fidelity(t.matrix(), t) - 1.0).abs())
            .max(fidelity(&CMat::zeros(4, 4), t).abs());
    }
    let cz = CMat::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 0.0, 0.0, -1.0],
    ]);
    worst = worst.max((fidelity(&cz, &targets[0]) - 0.2).abs());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut phase = 0.0f64;
    for _ in 0..200 {
        let u = random_unitary(&mut rng);
        let rotated = u.scale(C64::from_polar(
            1.0,
            rng.random_range(0.0..std::f64::consts::TAU),
        ));
        for t in &targets {
            phase = phase.max((fidelity(&u, t) - fidelity(&rotated, t)).abs());
        }
    }
    ensure(
        worst < 1e-15 && phase < PHASE_BOUND,
        format!(
            "fixed points within {worst:.1e}, global phase within {phase:.1e} over 200 unitaries"
        ),
    )
}

fn decay_estimates() -> Verdict {
    let mut widest = 0.0f64;
    for p in presets::all() {
        let outcome = gate_map(&p.waveforms, &p.blockade, &IntegratorConfig::default())
            .map_err(fail)?
            .score_auto();
        let tau = p.waveforms.tau;
        let d = decay_estimate(&outcome, GAMMA_R, tau).map_err(fail)?;
        if d.coarse_error != 0.5 * GAMMA_R * tau {
            return Err(format!("{}: coarse {}", p.id, d.coarse_error));
        }
        if !(0.0..=GAMMA_R * tau).contains(&d.integrated_error) {
            return Err(format!("{}: integrated {}", p.id, d.integrated_error));
        }
        widest = widest.max(d.integrated_error / (GAMMA_R * tau));
    }
    Ok(format!(
        "coarse exact; integrated at most {widest:.3} of gamma_r tau"
    ))
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("preset reproduction", preset_reproduction),
        ("decomposition oracle", decomposition_oracle),
        ("gauge equivalence", gauge_equivalence),
        ("numerical hygiene", numerical_hygiene),
        ("boundary criteria", boundary_criteria),
        ("robustness shape", robustness_shape),
        ("ideal-limit consistency", ideal_limit),
        ("optimizer re-derivation", optimizer_rederivation),
        ("fidelity unit contract", fidelity_contract),
        ("decay estimate", decay_estimates),
    ];
    let mut failures = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = check();
        let seconds = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{seconds:.1} s]", n + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{seconds:.1} s]", n + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
