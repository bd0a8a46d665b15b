//! JSON and CSV file formats plus parsing of CLI value syntaxes.
//!
//! Every angular frequency crosses this boundary in MHz and is converted to
//! rad/μs exactly once, with [`mhz`].

use std::{io::Write, path::Path};

use rydswap_core::{
    dynamics::{BlockadeModel, IntegratorConfig, Method, Trajectory},
    gate::{DecayEstimate, GateOutcome, TargetChoice, TargetGate, TargetKind},
    mhz,
    optimize::{Bound, Constraints, NelderMeadConfig, PenaltyWeights, SearchSpec, Slot},
    presets::Preset,
    scan::{Axis, Grid, ScanResult},
    FourierSeries, PhaseConvention, WaveformSet, C64, TWO_PI,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Convert rad/μs back to MHz. Among the neighbours of `x / 2π` that map
/// back to `x` bitwise, the one with the shortest decimal form wins.
pub fn to_mhz(x: f64) -> f64 {
    let m = x / TWO_PI;
    [m, m.next_down(), m.next_up()]
        .into_iter()
        .filter(|&c| mhz(c) == x)
        .min_by_key(|c| c.to_string().len())
        .unwrap_or(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesFile {
    /// `[re, im]` pairs in MHz, `a_0` first.
    pub coeffs: Vec<[f64; 2]>,
}

impl SeriesFile {
    pub fn from_series(s: &FourierSeries) -> Self {
        Self {
            coeffs: s.coeffs().iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn to_series(&self) -> Result<FourierSeries, CliError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        FourierSeries::new(coeffs).map_err(CliError::from)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum BlockadeFile {
    Ideal,
    Finite { b_mhz: f64, delta_q_mhz: f64 },
}

impl BlockadeFile {
    pub fn from_model(bm: &BlockadeModel) -> Self {
        match *bm {
            BlockadeModel::Ideal => BlockadeFile::Ideal,
            BlockadeModel::Finite { b, delta_q } => BlockadeFile::Finite {
                b_mhz: to_mhz(b),
                delta_q_mhz: to_mhz(delta_q),
            },
        }
    }

    pub fn to_model(self) -> Result<BlockadeModel, CliError> {
        match self {
            BlockadeFile::Ideal => Ok(BlockadeModel::Ideal),
            BlockadeFile::Finite { b_mhz, delta_q_mhz } => {
                Ok(BlockadeModel::finite(mhz(b_mhz), mhz(delta_q_mhz))?)
            }
        }
    }
}

/// Waveform file: four Fourier series, the gate duration and optional
/// metadata describing the setup the waveforms were designed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveformFile {
    pub tau_us: f64,
    pub omega0: SeriesFile,
    pub omega1: SeriesFile,
    pub delta0: SeriesFile,
    pub delta1: SeriesFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_convention: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blockade: Option<BlockadeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

impl WaveformFile {
    pub fn from_set(ws: &WaveformSet) -> Self {
        Self {
            tau_us: ws.tau,
            omega0: SeriesFile::from_series(&ws.omega0),
            omega1: SeriesFile::from_series(&ws.omega1),
            delta0: SeriesFile::from_series(&ws.delta0),
            delta1: SeriesFile::from_series(&ws.delta1),
            phase_convention: Some(ws.phase_convention.as_str().to_string()),
            blockade: None,
            target: None,
        }
    }

    pub fn from_preset(p: &Preset) -> Self {
        Self {
            blockade: Some(BlockadeFile::from_model(&p.blockade)),
            target: Some(p.target.as_str().to_string()),
            ..Self::from_set(&p.waveforms)
        }
    }

    pub fn to_set(&self) -> Result<WaveformSet, CliError> {
        let convention = match &self.phase_convention {
            None => PhaseConvention::default(),
            Some(s) => PhaseConvention::parse(s)
                .ok_or_else(|| CliError::input(format!("unknown phase_convention `{s}`")))?,
        };
        Ok(WaveformSet::new(
            self.omega0.to_series()?,
            self.omega1.to_series()?,
            self.delta0.to_series()?,
            self.delta1.to_series()?,
            self.tau_us,
        )?
        .with_phase_convention(convention))
    }

    pub fn blockade_model(&self) -> Result<Option<BlockadeModel>, CliError> {
        self.blockade.map(BlockadeFile::to_model).transpose()
    }

    pub fn target_choice(&self) -> Result<Option<TargetChoice>, CliError> {
        self.target.as_deref().map(parse_target).transpose()
    }
}

/// Deserialize `text`, reporting the location of syntax errors.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    serde_json::from_str(text)
        .map_err(|e| CliError::input(format!("{origin}:{}:{}: {e}", e.line(), e.column())))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

/// `ideal` or `B_MHz[,deltaq_MHz]`.
pub fn parse_blockade(s: &str) -> Result<BlockadeModel, CliError> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("ideal") {
        return Ok(BlockadeModel::Ideal);
    }
    let bad = || {
        CliError::input(format!(
            "invalid blockade `{s}`: expected ideal or B_MHz[,deltaq_MHz]"
        ))
    };
    let mut parts = s.split(',');
    let b: f64 = parts
        .next()
        .ok_or_else(bad)?
        .trim()
        .parse()
        .map_err(|_| bad())?;
    let dq: f64 = match parts.next() {
        Some(p) => p.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    if !(b > 0.0) {
        return Err(CliError::input(format!(
            "blockade strength must be > 0, got {b}"
        )));
    }
    Ok(BlockadeModel::finite(mhz(b), mhz(dq))?)
}

/// `standard`, `opposite` or `auto`.
pub fn parse_target(s: &str) -> Result<TargetChoice, CliError> {
    if s == "auto" {
        return Ok(TargetChoice::Auto);
    }
    match TargetKind::parse(s).and_then(TargetGate::from_kind) {
        Some(t) => Ok(TargetChoice::Fixed(t)),
        None => Err(CliError::input(format!(
            "invalid target `{s}`: expected standard, opposite or auto"
        ))),
    }
}

pub fn target_label(choice: &TargetChoice) -> &'static str {
    match choice {
        TargetChoice::Auto => "auto",
        TargetChoice::Fixed(t) => t.kind().as_str(),
    }
}

/// `min:max:points`.
pub fn parse_range(s: &str) -> Result<(f64, f64, usize), CliError> {
    let bad = || CliError::input(format!("invalid range `{s}`: expected min:max:points"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(bad());
    };
    Ok((
        lo.trim().parse().map_err(|_| bad())?,
        hi.trim().parse().map_err(|_| bad())?,
        n.trim().parse().map_err(|_| bad())?,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayJson {
    pub gamma_r_per_us: f64,
    pub coarse_error: f64,
    pub integrated_error: f64,
}

impl From<DecayEstimate> for DecayJson {
    fn from(d: DecayEstimate) -> Self {
        Self {
            gamma_r_per_us: d.gamma_r,
            coarse_error: d.coarse_error,
            integrated_error: d.integrated_error,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeJson {
    pub target: &'static str,
    pub fidelity: f64,
    pub gate_error: f64,
    pub leakage: f64,
    pub integrated_rydberg_population_us: f64,
    /// Rows of `[re, im]` pairs in the |00⟩ |01⟩ |10⟩ |11⟩ basis.
    pub actual_map: Vec<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay: Option<DecayJson>,
}

impl OutcomeJson {
    pub fn new(o: &GateOutcome, decay: Option<DecayEstimate>) -> Self {
        let m = &o.actual_map;
        Self {
            target: o.target.as_str(),
            fidelity: o.fidelity,
            gate_error: o.gate_error,
            leakage: o.leakage,
            integrated_rydberg_population_us: o.integrated_rydberg_population,
            actual_map: (0..m.rows())
                .map(|i| m.row(i).iter().map(|c| [c.re, c.im]).collect())
                .collect(),
            decay: decay.map(DecayJson::from),
        }
    }
}

/// `t_us`, then `pop_<label>` and `phase_<label>` for every basis state.
pub fn write_trajectory_csv<W: Write>(
    out: W,
    labels: &[&str],
    tr: &Trajectory,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t_us".to_string()];
    for l in labels {
        header.push(format!("pop_{l}"));
        header.push(format!("phase_{l}"));
    }
    w.write_record(&header).map_err(csv_error)?;
    for (t, state) in tr.times.iter().zip(&tr.states) {
        let mut row = vec![t.to_string()];
        for c in state {
            row.push(c.norm_sqr().to_string());
            row.push(c.arg().to_string());
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()
        .map_err(|e| CliError::input(format!("cannot write CSV: {e}")))
}

/// CLI-facing column name and unit conversion of a scan axis.
pub fn axis_column(axis: &Axis) -> (String, fn(f64) -> f64) {
    use rydswap_core::scan::AxisKind;
    match axis.kind {
        AxisKind::RabiRatio(_) => (axis.kind.name().to_string(), |x| x),
        AxisKind::DetuningOffset(_) | AxisKind::Blockade => {
            (format!("{}_mhz", axis.kind.name()), to_mhz)
        }
    }
}

/// One row per grid point: axis values (CLI units), gate_error, leakage.
/// Axis values come from the grid rebuilt in CLI units, so `50:500:46`
/// prints 50, 60, ... rather than their round-tripped rad/μs images.
pub fn write_scan_csv<W: Write>(out: W, result: &ScanResult) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let columns: Vec<_> = result.axes.iter().map(axis_column).collect();
    let display: Vec<Vec<f64>> = result
        .axes
        .iter()
        .zip(&columns)
        .map(|(a, (_, conv))| Grid::new(conv(a.grid.min), conv(a.grid.max), a.grid.points).values())
        .collect();
    let mut header: Vec<String> = columns.iter().map(|(n, _)| n.clone()).collect();
    header.push("gate_error".into());
    header.push("leakage".into());
    w.write_record(&header).map_err(csv_error)?;
    for (i, p) in result.points.iter().enumerate() {
        let mut row: Vec<String> = result
            .grid_indices(i)
            .iter()
            .zip(&display)
            .map(|(&k, vals)| vals[k].to_string())
            .collect();
        row.push(p.gate_error.to_string());
        row.push(p.leakage.to_string());
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()
        .map_err(|e| CliError::input(format!("cannot write CSV: {e}")))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::input(format!("cannot write CSV: {e}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorFile {
    pub method: String,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub n_steps: usize,
    pub max_steps: usize,
}

impl IntegratorFile {
    pub fn from_config(c: &IntegratorConfig) -> Self {
        Self {
            method: match c.method {
                Method::Dopri5 => "dopri5",
                Method::Rk4 => "rk4",
            }
            .to_string(),
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            n_steps: c.n_steps,
            max_steps: c.max_steps,
        }
    }

    pub fn to_config(&self) -> Result<IntegratorConfig, CliError> {
        let method = match self.method.as_str() {
            "dopri5" => Method::Dopri5,
            "rk4" => Method::Rk4,
            m => return Err(CliError::input(format!("unknown integrator method `{m}`"))),
        };
        let c = IntegratorConfig {
            method,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            n_steps: self.n_steps,
            max_steps: self.max_steps,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SlotFile {
    Fixed(SeriesFile),
    Free {
        n_terms: usize,
        complex: bool,
        /// `[lower, upper]` in MHz: one pair for all coefficients or one per
        /// coefficient.
        bounds: Vec<[f64; 2]>,
    },
    Around {
        base: SeriesFile,
        half_width_mhz: f64,
    },
}

impl SlotFile {
    pub fn from_slot(s: &Slot) -> Self {
        match s {
            Slot::Fixed(f) => SlotFile::Fixed(SeriesFile::from_series(f)),
            Slot::Free {
                n_terms,
                complex,
                bounds,
            } => SlotFile::Free {
                n_terms: *n_terms,
                complex: *complex,
                bounds: bounds.iter().map(|b| [b.lower, b.upper]).collect(),
            },
            Slot::Around { base, half_width } => SlotFile::Around {
                base: SeriesFile::from_series(base),
                half_width_mhz: *half_width,
            },
        }
    }

    pub fn to_slot(&self) -> Result<Slot, CliError> {
        Ok(match self {
            SlotFile::Fixed(f) => Slot::Fixed(f.to_series()?),
            SlotFile::Free {
                n_terms,
                complex,
                bounds,
            } => Slot::Free {
                n_terms: *n_terms,
                complex: *complex,
                bounds: bounds.iter().map(|&[lo, hi]| Bound::new(lo, hi)).collect(),
            },
            SlotFile::Around {
                base,
                half_width_mhz,
            } => Slot::Around {
                base: base.to_series()?,
                half_width: *half_width_mhz,
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstraintsFile {
    pub tie_rabi: bool,
    pub antisymmetric_detuning: bool,
    pub constant_detuning: bool,
    pub resonant: bool,
    pub pin_rabi_start: bool,
}

impl Default for ConstraintsFile {
    fn default() -> Self {
        Self::from_constraints(&Constraints::default())
    }
}

impl ConstraintsFile {
    pub fn from_constraints(c: &Constraints) -> Self {
        Self {
            tie_rabi: c.tie_rabi,
            antisymmetric_detuning: c.antisymmetric_detuning,
            constant_detuning: c.constant_detuning,
            resonant: c.resonant,
            pin_rabi_start: c.pin_rabi_start,
        }
    }

    pub fn to_constraints(self) -> Constraints {
        Constraints {
            tie_rabi: self.tie_rabi,
            antisymmetric_detuning: self.antisymmetric_detuning,
            constant_detuning: self.constant_detuning,
            resonant: self.resonant,
            pin_rabi_start: self.pin_rabi_start,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltyFile {
    pub boundary: f64,
    /// Weight per rad/μs of peak Rabi frequency above the cap.
    pub peak_rabi: f64,
    pub rabi_cap_mhz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexFile {
    pub initial_step: f64,
    pub f_tol: f64,
    pub x_tol: f64,
}

/// `SearchSpec` as JSON, field for field. Missing fields take the
/// amplitude-only defaults with nine terms per Rabi waveform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSpecFile {
    pub omega0: SlotFile,
    pub omega1: SlotFile,
    pub delta0: SlotFile,
    pub delta1: SlotFile,
    pub constraints: ConstraintsFile,
    pub target: String,
    pub blockade: BlockadeFile,
    pub penalty: PenaltyFile,
    pub tau_us: f64,
    pub phase_convention: String,
    pub budget: usize,
    pub restarts: usize,
    pub rng_seed: Option<u64>,
    pub target_error: Option<f64>,
    pub initial: Option<WaveformFile>,
    pub search_integrator: IntegratorFile,
    pub final_integrator: IntegratorFile,
    pub simplex: SimplexFile,
}

impl Default for SearchSpecFile {
    fn default() -> Self {
        let mut f = Self::from_spec(&SearchSpec::amplitude_only(9));
        f.rng_seed = None;
        f
    }
}

impl SearchSpecFile {
    pub fn from_spec(s: &SearchSpec) -> Self {
        Self {
            omega0: SlotFile::from_slot(&s.omega0),
            omega1: SlotFile::from_slot(&s.omega1),
            delta0: SlotFile::from_slot(&s.delta0),
            delta1: SlotFile::from_slot(&s.delta1),
            constraints: ConstraintsFile::from_constraints(&s.constraints),
            target: target_label(&s.target).to_string(),
            blockade: BlockadeFile::from_model(&s.blockade),
            penalty: PenaltyFile {
                boundary: s.penalty.boundary,
                peak_rabi: s.penalty.peak_rabi,
                rabi_cap_mhz: to_mhz(s.penalty.rabi_cap),
            },
            tau_us: s.tau,
            phase_convention: s.phase_convention.as_str().to_string(),
            budget: s.budget,
            restarts: s.restarts,
            rng_seed: Some(s.rng_seed),
            target_error: s.target_error,
            initial: s.initial.as_ref().map(WaveformFile::from_set),
            search_integrator: IntegratorFile::from_config(&s.search_integrator),
            final_integrator: IntegratorFile::from_config(&s.final_integrator),
            simplex: SimplexFile {
                initial_step: s.simplex.initial_step,
                f_tol: s.simplex.f_tol,
                x_tol: s.simplex.x_tol,
            },
        }
    }

    /// `rng_seed` falls back to `default_seed` when absent.
    pub fn to_spec(&self, default_seed: u64) -> Result<SearchSpec, CliError> {
        let phase_convention = PhaseConvention::parse(&self.phase_convention).ok_or_else(|| {
            CliError::input(format!(
                "unknown phase_convention `{}`",
                self.phase_convention
            ))
        })?;
        let spec = SearchSpec {
            omega0: self.omega0.to_slot()?,
            omega1: self.omega1.to_slot()?,
            delta0: self.delta0.to_slot()?,
            delta1: self.delta1.to_slot()?,
            constraints: self.constraints.to_constraints(),
            target: parse_target(&self.target)?,
            blockade: self.blockade.to_model()?,
            penalty: PenaltyWeights {
                boundary: self.penalty.boundary,
                peak_rabi: self.penalty.peak_rabi,
                rabi_cap: mhz(self.penalty.rabi_cap_mhz),
            },
            tau: self.tau_us,
            phase_convention,
            budget: self.budget,
            restarts: self.restarts,
            rng_seed: self.rng_seed.unwrap_or(default_seed),
            target_error: self.target_error,
            initial: self
                .initial
                .as_ref()
                .map(WaveformFile::to_set)
                .transpose()?,
            search_integrator: self.search_integrator.to_config()?,
            final_integrator: self.final_integrator.to_config()?,
            simplex: NelderMeadConfig {
                initial_step: self.simplex.initial_step,
                f_tol: self.simplex.f_tol,
                x_tol: self.simplex.x_tol,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}
