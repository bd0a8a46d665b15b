//! Concurrent drivers for grid scans and restart searches. Results are
//! assembled by index, so they match the sequential core routines bitwise.

use rayon::prelude::*;
use rydswap_core::{
    optimize::{combine, run_restart, RestartOutcome, SearchResult, SearchSpec},
    scan::{evaluate_point, ScanResult, ScanSpec},
    Error,
};

pub fn run_scan(spec: &ScanSpec) -> Result<ScanResult, Error> {
    spec.validate()?;
    let points = (0..spec.n_points())
        .into_par_iter()
        .map(|i| evaluate_point(spec, i))
        .collect();
    ScanResult::from_points(spec, points)
}

pub fn run_restarts(spec: &SearchSpec) -> Result<Vec<RestartOutcome>, Error> {
    spec.validate()?;
    (0..spec.restarts)
        .into_par_iter()
        .map(|i| run_restart(spec, i))
        .collect()
}

pub fn search(spec: &SearchSpec) -> Result<SearchResult, Error> {
    combine(spec, run_restarts(spec)?)
}

/// Run `f` on a pool of `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(
    threads: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, rayon::ThreadPoolBuildError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    Ok(pool.install(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rydswap_core::{
        gate::TargetChoice,
        mhz,
        presets::{self, PresetId},
        scan::{self, Axis, AxisKind, DetuningTarget, Grid, RabiTarget},
        IntegratorConfig,
    };

    #[test]
    fn parallel_scan_matches_sequential() {
        let p = presets::lookup(PresetId::FigA2Resonant);
        let spec = ScanSpec {
            waveforms: p.waveforms,
            blockade: p.blockade,
            target: TargetChoice::Auto,
            axes: vec![
                Axis {
                    kind: AxisKind::RabiRatio(RabiTarget::Both),
                    grid: Grid::new(0.98, 1.02, 3),
                },
                Axis {
                    kind: AxisKind::DetuningOffset(DetuningTarget::Both),
                    grid: Grid::new(mhz(-1.0), mhz(1.0), 3),
                },
            ],
            integrator: IntegratorConfig::search(),
        };
        let par = with_threads(3, || run_scan(&spec)).unwrap().unwrap();
        let seq = scan::run_scan(&spec).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn parallel_search_matches_sequential() {
        let mut spec = SearchSpec::amplitude_only(3);
        spec.budget = 40;
        spec.restarts = 3;
        spec.rng_seed = 5;
        let par = with_threads(3, || search(&spec)).unwrap().unwrap();
        let seq = rydswap_core::optimize::search(&spec).unwrap();
        assert_eq!(par, seq);
    }
}
