//! Robustness grids: gate error and leakage versus Rabi-amplitude ratio,
//! constant detuning offset and blockade strength.

use alloc::{vec, vec::Vec};

use crate::{
    dynamics::{BlockadeModel, IntegratorConfig},
    error::Error,
    gate::{gate_map, TargetChoice},
    waveform::WaveformSet,
};

/// Which waveforms a Rabi-ratio axis scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RabiTarget {
    Both,
    Omega0,
    Omega1,
}

/// Which detunings a detuning-offset axis shifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetuningTarget {
    Both,
    Delta0,
    Delta1,
    /// `+d` on Δ0 and `−d` on Δ1, which keeps Δ0 + Δ1 fixed.
    Antisymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisKind {
    /// Dimensionless multiplier on the Rabi waveforms.
    RabiRatio(RabiTarget),
    /// Constant offset in rad/μs.
    DetuningOffset(DetuningTarget),
    /// Blockade strength B in rad/μs; δ_q is taken from the base model.
    Blockade,
}

impl AxisKind {
    pub fn name(self) -> &'static str {
        match self {
            AxisKind::RabiRatio(RabiTarget::Both) => "rabi_ratio",
            AxisKind::RabiRatio(RabiTarget::Omega0) => "rabi_ratio_0",
            AxisKind::RabiRatio(RabiTarget::Omega1) => "rabi_ratio_1",
            AxisKind::DetuningOffset(DetuningTarget::Both) => "detuning_offset",
            AxisKind::DetuningOffset(DetuningTarget::Delta0) => "detuning_offset_0",
            AxisKind::DetuningOffset(DetuningTarget::Delta1) => "detuning_offset_1",
            AxisKind::DetuningOffset(DetuningTarget::Antisymmetric) => "detuning_offset_antisym",
            AxisKind::Blockade => "blockade_b",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        use AxisKind::*;
        Some(match s {
            "rabi_ratio" => RabiRatio(RabiTarget::Both),
            "rabi_ratio_0" => RabiRatio(RabiTarget::Omega0),
            "rabi_ratio_1" => RabiRatio(RabiTarget::Omega1),
            "detuning_offset" => DetuningOffset(DetuningTarget::Both),
            "detuning_offset_0" => DetuningOffset(DetuningTarget::Delta0),
            "detuning_offset_1" => DetuningOffset(DetuningTarget::Delta1),
            "detuning_offset_antisym" => DetuningOffset(DetuningTarget::Antisymmetric),
            "blockade_b" => Blockade,
            _ => return None,
        })
    }

    /// Parameter value at which the axis leaves the base setup untouched.
    /// `None` for the blockade axis, whose identity depends on the base model.
    pub fn identity(self) -> Option<f64> {
        match self {
            AxisKind::RabiRatio(_) => Some(1.0),
            AxisKind::DetuningOffset(_) => Some(0.0),
            AxisKind::Blockade => None,
        }
    }

    fn family(self) -> u8 {
        match self {
            AxisKind::RabiRatio(_) => 0,
            AxisKind::DetuningOffset(_) => 1,
            AxisKind::Blockade => 2,
        }
    }
}

/// `points` evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points }
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.max
                } else {
                    self.min + (self.max - self.min) * (i as f64 / last)
                }
            })
            .collect()
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub kind: AxisKind,
    pub grid: Grid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub waveforms: WaveformSet,
    pub blockade: BlockadeModel,
    pub target: TargetChoice,
    /// One or two axes; the first varies slowest.
    pub axes: Vec<Axis>,
    pub integrator: IntegratorConfig,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<(), Error> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidScan("a scan needs one or two axes"));
        }
        if self.axes.len() == 2 && self.axes[0].kind.family() == self.axes[1].kind.family() {
            return Err(Error::InvalidScan("scan axes must be distinct"));
        }
        for a in &self.axes {
            let g = a.grid;
            if g.points < 2 {
                return Err(Error::InvalidScan("each axis needs at least 2 points"));
            }
            if !(g.min.is_finite() && g.max.is_finite()) || g.min > g.max {
                return Err(Error::InvalidScan(
                    "axis range must be finite with min <= max",
                ));
            }
            if a.kind == AxisKind::Blockade && g.min <= 0.0 {
                return Err(Error::InvalidScan("blockade values must be > 0"));
            }
        }
        self.integrator.validate()?;
        Ok(())
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.grid.points).collect()
    }

    pub fn n_points(&self) -> usize {
        self.shape().iter().product()
    }

    /// Axis values of flat (row-major) point `index`.
    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut rem = index;
        let mut out = vec![0.0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            let n = a.grid.points;
            out[k] = a.grid.values()[rem % n];
            rem /= n;
        }
        out
    }

    /// The waveforms and blockade model at one grid point.
    pub fn perturbed(&self, values: &[f64]) -> (WaveformSet, BlockadeModel) {
        let mut ws = self.waveforms.clone();
        let mut bm = self.blockade;
        for (a, &v) in self.axes.iter().zip(values) {
            // Identity values keep the base objects untouched so that the
            // nominal point is bit-for-bit the unperturbed evaluation.
            if a.kind.identity() == Some(v) {
                continue;
            }
            match a.kind {
                AxisKind::RabiRatio(t) => {
                    let (k0, k1) = match t {
                        RabiTarget::Both => (v, v),
                        RabiTarget::Omega0 => (v, 1.0),
                        RabiTarget::Omega1 => (1.0, v),
                    };
                    ws = ws.with_rabi_scale(k0, k1);
                }
                AxisKind::DetuningOffset(t) => {
                    let (d0, d1) = match t {
                        DetuningTarget::Both => (v, v),
                        DetuningTarget::Delta0 => (v, 0.0),
                        DetuningTarget::Delta1 => (0.0, v),
                        DetuningTarget::Antisymmetric => (v, -v),
                    };
                    ws = ws.with_detuning_offset(d0, d1);
                }
                AxisKind::Blockade => {
                    let delta_q = match bm {
                        BlockadeModel::Finite { delta_q, .. } => delta_q,
                        BlockadeModel::Ideal => 0.0,
                    };
                    bm = BlockadeModel::Finite { b: v, delta_q };
                }
            }
        }
        (ws, bm)
    }
}

/// One grid cell; NaN marks a point whose integration failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub gate_error: f64,
    pub leakage: f64,
}

impl ScanPoint {
    pub const FAILED: ScanPoint = ScanPoint {
        gate_error: f64::NAN,
        leakage: f64::NAN,
    };

    pub fn is_failed(&self) -> bool {
        self.gate_error.is_nan()
    }
}

/// Evaluate flat point `index` of `spec`.
pub fn evaluate_point(spec: &ScanSpec, index: usize) -> ScanPoint {
    let (ws, bm) = spec.perturbed(&spec.point(index));
    match gate_map(&ws, &bm, &spec.integrator) {
        Ok(map) => {
            let o = map.score_choice(&spec.target);
            ScanPoint {
                gate_error: o.gate_error,
                leakage: o.leakage,
            }
        }
        Err(_) => ScanPoint::FAILED,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub axes: Vec<Axis>,
    /// Values along each axis.
    pub axis_values: Vec<Vec<f64>>,
    /// Row-major over `axes`, first axis slowest.
    pub points: Vec<ScanPoint>,
    pub failed: usize,
}

impl ScanResult {
    /// Assemble from per-point results given in flat index order.
    pub fn from_points(spec: &ScanSpec, points: Vec<ScanPoint>) -> Result<Self, Error> {
        if points.len() != spec.n_points() {
            return Err(Error::DimensionMismatch {
                expected: spec.n_points(),
                got: points.len(),
            });
        }
        Ok(Self {
            axes: spec.axes.clone(),
            axis_values: spec.axes.iter().map(|a| a.grid.values()).collect(),
            failed: points.iter().filter(|p| p.is_failed()).count(),
            points,
        })
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axis_values.iter().map(Vec::len).collect()
    }

    pub fn gate_errors(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.gate_error).collect()
    }

    /// Flat index of the smallest finite gate error.
    pub fn argmin(&self) -> Option<usize> {
        self.points
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_failed())
            .min_by(|a, b| a.1.gate_error.total_cmp(&b.1.gate_error))
            .map(|(i, _)| i)
    }

    /// Per-axis grid indices of flat index `index`.
    pub fn grid_indices(&self, index: usize) -> Vec<usize> {
        let mut rem = index;
        let mut out = vec![0; self.axis_values.len()];
        for (k, vals) in self.axis_values.iter().enumerate().rev() {
            out[k] = rem % vals.len();
            rem /= vals.len();
        }
        out
    }

    /// Axis values of flat index `index`.
    pub fn coords(&self, index: usize) -> Vec<f64> {
        self.grid_indices(index)
            .iter()
            .zip(&self.axis_values)
            .map(|(&i, vals)| vals[i])
            .collect()
    }
}

/// Evaluate every grid point in order.
pub fn run_scan(spec: &ScanSpec) -> Result<ScanResult, Error> {
    spec.validate()?;
    let points = (0..spec.n_points())
        .map(|i| evaluate_point(spec, i))
        .collect();
    ScanResult::from_points(spec, points)
}

fn single_axis(
    waveforms: &WaveformSet,
    blockade: BlockadeModel,
    target: TargetChoice,
    axis: Axis,
    integrator: IntegratorConfig,
) -> ScanSpec {
    ScanSpec {
        waveforms: waveforms.clone(),
        blockade,
        target,
        axes: vec![axis],
        integrator,
    }
}

pub fn scan_rabi_ratio(
    waveforms: &WaveformSet,
    blockade: BlockadeModel,
    target: TargetChoice,
    which: RabiTarget,
    grid: Grid,
    integrator: IntegratorConfig,
) -> Result<ScanResult, Error> {
    let axis = Axis {
        kind: AxisKind::RabiRatio(which),
        grid,
    };
    run_scan(&single_axis(waveforms, blockade, target, axis, integrator))
}

/// `grid` in rad/μs.
pub fn scan_detuning_offset(
    waveforms: &WaveformSet,
    blockade: BlockadeModel,
    target: TargetChoice,
    which: DetuningTarget,
    grid: Grid,
    integrator: IntegratorConfig,
) -> Result<ScanResult, Error> {
    let axis = Axis {
        kind: AxisKind::DetuningOffset(which),
        grid,
    };
    run_scan(&single_axis(waveforms, blockade, target, axis, integrator))
}

/// `grid` in rad/μs. `blockade` supplies δ_q.
pub fn scan_blockade(
    waveforms: &WaveformSet,
    blockade: BlockadeModel,
    target: TargetChoice,
    grid: Grid,
    integrator: IntegratorConfig,
) -> Result<ScanResult, Error> {
    let axis = Axis {
        kind: AxisKind::Blockade,
        grid,
    };
    run_scan(&single_axis(waveforms, blockade, target, axis, integrator))
}
