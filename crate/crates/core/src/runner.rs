//! Configuration-driven scenario execution: loads a declarative config, runs
//! named scenarios, persists time series, manifests and verdicts, optionally
//! emits a plot script, and maps results onto a CI-friendly exit status.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    condition1_scan, evaluate_bounds, mandelstam_tamm_check, minimal_full_deviation_time,
    speed_limit_window, support_inclusion_check, truncated_clock_residual, BoundReport,
    BOUND_SLACK, SUPPORT_EPS,
};
use crate::error::{Error, Result};
use crate::model::{
    clock_energy_stats, validate_no_wrap, CouplingShape, Grid, ModelConfig,
};
use crate::oracle::{analytic_reduced_state, BRANCH_PHASE_SIGN};
use crate::propagator::{
    free_clock_evolve, free_system_evolve, CompositeState, StrangPropagator,
};
use crate::statelib::{
    density_from_pure, fidelity, purity, HermitianOperator, PureSystemState,
};

/// Coupling integrals covered by the bound sweep by default.
pub fn default_sweep_integrals() -> Vec<f64> {
    vec![
        0.1,
        0.5,
        1.0,
        std::f64::consts::FRAC_PI_2,
        std::f64::consts::PI,
    ]
}

/// The named scenarios of the default suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Example1Dephasing,
    MandelstamTamm,
    PhotonBox,
    PhaseGate,
    TruncatedClock,
    BoundSweep,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Example1Dephasing,
        Scenario::MandelstamTamm,
        Scenario::PhotonBox,
        Scenario::PhaseGate,
        Scenario::TruncatedClock,
        Scenario::BoundSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Example1Dephasing => "example1-dephasing",
            Scenario::MandelstamTamm => "mandelstam-tamm",
            Scenario::PhotonBox => "photon-box",
            Scenario::PhaseGate => "phase-gate",
            Scenario::TruncatedClock => "truncated-clock",
            Scenario::BoundSweep => "bound-sweep",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::UnknownScenario(name.to_string()))
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn list_scenarios() -> Vec<&'static str> {
    Scenario::ALL.iter().map(|s| s.name()).collect()
}

/// System-space coupling axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingAxis {
    SigmaZ,
    SigmaX,
}

impl CouplingAxis {
    pub fn operator(self) -> HermitianOperator {
        match self {
            CouplingAxis::SigmaZ => HermitianOperator::pauli_z(),
            CouplingAxis::SigmaX => HermitianOperator::pauli_x(),
        }
    }
}

/// Declarative experiment configuration. Unset fields fall back to the
/// default table; a few defaults depend on the scenario (coupling axis,
/// coupling integral, initial system state). Unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub scenario: String,
    #[serde(default)]
    pub x_min: Option<f64>,
    #[serde(default)]
    pub x_max: Option<f64>,
    #[serde(default)]
    pub n: Option<usize>,
    /// Packet width delta; the packet occupies (-delta, 0).
    #[serde(default)]
    pub delta: Option<f64>,
    /// Coupling support width; the profile occupies (0, width).
    #[serde(default)]
    pub support_width: Option<f64>,
    /// Carrier wavenumber of the initial packet.
    #[serde(default)]
    pub k0: Option<f64>,
    #[serde(default)]
    pub hbar: Option<f64>,
    /// Target of the coupling integral over its support.
    #[serde(default)]
    pub g_integral: Option<f64>,
    #[serde(default)]
    pub coupling_axis: Option<CouplingAxis>,
    /// sigma_z coefficient of the system Hamiltonian.
    #[serde(default)]
    pub system_hamiltonian_z: Option<f64>,
    /// Initial system state as [re, im] pairs; normalized on load.
    #[serde(default)]
    pub system_state: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub sample_count: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Number of random probe states for the per-vector inequality.
    #[serde(default)]
    pub random_vectors: Option<usize>,
    /// Fixed slack added on top of the propagation error estimate.
    #[serde(default)]
    pub tolerance_slack: Option<f64>,
    /// Support-projector eigenvalue threshold.
    #[serde(default)]
    pub support_eps: Option<f64>,
    /// Fidelity threshold for the minimal full-deviation time.
    #[serde(default)]
    pub full_deviation_threshold: Option<f64>,
    #[serde(default)]
    pub sweep_integrals: Option<Vec<f64>>,
    /// Momentum-mode counts kept by the truncated-clock scenario, as
    /// divisors of n (e.g. 8 keeps n/8 modes).
    #[serde(default)]
    pub truncation_divisors: Option<Vec<usize>>,
    #[serde(default)]
    pub out_dir: Option<String>,
    #[serde(default)]
    pub emit_plot: Option<bool>,
}

impl ExperimentConfig {
    /// Scenario name plus all defaults.
    pub fn for_scenario(name: &str) -> Self {
        Self {
            scenario: name.to_string(),
            x_min: None,
            x_max: None,
            n: None,
            delta: None,
            support_width: None,
            k0: None,
            hbar: None,
            g_integral: None,
            coupling_axis: None,
            system_hamiltonian_z: None,
            system_state: None,
            t_max: None,
            dt: None,
            sample_count: None,
            seed: None,
            random_vectors: None,
            tolerance_slack: None,
            support_eps: None,
            full_deviation_threshold: None,
            sweep_integrals: None,
            truncation_divisors: None,
            out_dir: None,
            emit_plot: None,
        }
    }
}

/// Parses a config file, rejecting unknown keys with the parser's location
/// diagnostics.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| {
        Error::Config(format!("{}: {e}", path.display()))
    })
}

/// Fully resolved configuration with defaults and scenario table applied.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub scenario: Scenario,
    pub model: ModelConfig,
    pub system_state: PureSystemState,
    pub g_integral: f64,
    pub t_max: f64,
    pub dt: f64,
    pub sample_count: usize,
    pub seed: u64,
    pub random_vectors: usize,
    pub tolerance_slack: f64,
    pub support_eps: f64,
    pub full_deviation_threshold: f64,
    pub sweep_integrals: Vec<f64>,
    pub truncation_divisors: Vec<usize>,
    pub emit_plot: bool,
}

/// Scenario-dependent portion of the default table.
fn scenario_defaults(s: Scenario) -> (f64, CouplingAxis, Vec<[f64; 2]>) {
    let frac = std::f64::consts::FRAC_1_SQRT_2;
    let plus = vec![[frac, 0.0], [frac, 0.0]];
    match s {
        Scenario::Example1Dephasing | Scenario::BoundSweep => {
            (std::f64::consts::FRAC_PI_4, CouplingAxis::SigmaZ, plus)
        }
        Scenario::MandelstamTamm => (0.0, CouplingAxis::SigmaZ, plus),
        Scenario::PhotonBox => (
            std::f64::consts::FRAC_PI_2,
            CouplingAxis::SigmaX,
            vec![[1.0, 0.0], [0.0, 0.0]],
        ),
        Scenario::PhaseGate => (std::f64::consts::PI, CouplingAxis::SigmaZ, plus),
        Scenario::TruncatedClock => (1.0, CouplingAxis::SigmaZ, plus),
    }
}

pub fn resolve(cfg: &ExperimentConfig) -> Result<ResolvedConfig> {
    let scenario = Scenario::from_name(&cfg.scenario)?;
    let (g_def, axis_def, state_def) = scenario_defaults(scenario);
    let hbar = cfg.hbar.unwrap_or(1.0);
    let grid = Grid::new(
        cfg.x_min.unwrap_or(-4.0),
        cfg.x_max.unwrap_or(12.0),
        cfg.n.unwrap_or(4096),
    )?;
    let g_integral = cfg.g_integral.unwrap_or(g_def);
    let axis = cfg.coupling_axis.unwrap_or(axis_def);
    let hz = cfg.system_hamiltonian_z.unwrap_or(0.0);
    let h_s = if hz == 0.0 {
        HermitianOperator::zero(2)
    } else {
        HermitianOperator::new(
            HermitianOperator::pauli_z().matrix() * Complex64::from(hz),
        )?
    };
    let model = ModelConfig::new(
        grid,
        cfg.delta.unwrap_or(1.0),
        cfg.k0.unwrap_or(0.0),
        cfg.support_width.unwrap_or(1.0),
        g_integral,
        CouplingShape::Bump,
        h_s,
        axis.operator(),
        hbar,
    )?;
    let state_raw = cfg.system_state.clone().unwrap_or(state_def);
    let amps: Vec<Complex64> = state_raw
        .iter()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    let system_state = PureSystemState::normalized(amps)
        .map_err(|e| Error::Config(format!("system-state: {e}")))?;
    if system_state.dim() != model.system_dim() {
        return Err(Error::Config(format!(
            "system-state dimension {} does not match the model dimension {}",
            system_state.dim(),
            model.system_dim()
        )));
    }
    let sample_count = cfg.sample_count.unwrap_or(200);
    if sample_count < 2 {
        return Err(Error::Config("sample-count must be at least 2".into()));
    }
    let dt = cfg.dt.unwrap_or(1e-3);
    if !(dt > 0.0) {
        return Err(Error::Config("dt must be positive".into()));
    }
    let t_max = cfg.t_max.unwrap_or_else(|| {
        model.delta() + model.profile().support_width() + 2.0
    });
    if !(t_max > 0.0) {
        return Err(Error::Config("t-max must be positive".into()));
    }
    let divisors = cfg.truncation_divisors.clone().unwrap_or(vec![8, 4]);
    if divisors.iter().any(|&d| d == 0 || d > model.grid().len()) {
        return Err(Error::Config(
            "truncation-divisors must be nonzero and at most n".into(),
        ));
    }
    Ok(ResolvedConfig {
        scenario,
        model,
        system_state,
        g_integral,
        t_max,
        dt,
        sample_count,
        seed: cfg.seed.unwrap_or(42),
        random_vectors: cfg.random_vectors.unwrap_or(100),
        tolerance_slack: cfg.tolerance_slack.unwrap_or(BOUND_SLACK),
        support_eps: cfg.support_eps.unwrap_or(SUPPORT_EPS),
        full_deviation_threshold: cfg.full_deviation_threshold.unwrap_or(1e-3),
        sweep_integrals: cfg
            .sweep_integrals
            .clone()
            .unwrap_or_else(default_sweep_integrals),
        truncation_divisors: divisors,
        emit_plot: cfg.emit_plot.unwrap_or(false),
    })
}

/// Run provenance written before time stepping and completed afterwards.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    pub config: ExperimentConfig,
    pub branch_phase_sign: f64,
    pub energy_spread: f64,
    pub window_end: f64,
    pub seed: u64,
    pub version: String,
    /// Step-halving error estimate; None until the run completes.
    pub propagation_error: Option<f64>,
    pub duration_seconds: Option<f64>,
}

fn preliminary_manifest(
    cfg: &ExperimentConfig,
    resolved: &ResolvedConfig,
) -> Result<RunManifest> {
    let phi0 = resolved.model.initial_packet()?;
    let stats = clock_energy_stats(&phi0, resolved.model.hbar());
    Ok(RunManifest {
        scenario: resolved.scenario.name().to_string(),
        config: cfg.clone(),
        branch_phase_sign: BRANCH_PHASE_SIGN,
        energy_spread: stats.spread,
        window_end: speed_limit_window(stats.spread, resolved.model.hbar()),
        seed: resolved.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        propagation_error: None,
        duration_seconds: None,
    })
}

/// One sampled time point of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub fidelity: f64,
    pub trace_distance: f64,
    pub purity_system: f64,
    pub purity_clock: f64,
    pub clock_fidelity_to_free: f64,
    pub autocorrelation: f64,
    pub margin_fidelity: Option<f64>,
    pub margin_corollary: Option<f64>,
    pub margin_trace: Option<f64>,
    pub margin_weak_trace: Option<f64>,
    pub margin_vector_min: Option<f64>,
    pub applicable: bool,
    pub tolerance: f64,
}

pub const CSV_HEADER: &str = "t,fidelity,trace_distance,purity_system,purity_clock,\
clock_fidelity_to_free,autocorrelation,margin_fidelity,margin_corollary,margin_trace,\
margin_weak_trace,margin_vector_min,applicable,tolerance";

fn fmt_f(v: f64) -> String {
    format!("{v:.17e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f).unwrap_or_default()
}

impl TimeSeriesRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f(self.t),
            fmt_f(self.fidelity),
            fmt_f(self.trace_distance),
            fmt_f(self.purity_system),
            fmt_f(self.purity_clock),
            fmt_f(self.clock_fidelity_to_free),
            fmt_f(self.autocorrelation),
            fmt_opt(self.margin_fidelity),
            fmt_opt(self.margin_corollary),
            fmt_opt(self.margin_trace),
            fmt_opt(self.margin_weak_trace),
            fmt_opt(self.margin_vector_min),
            self.applicable,
            fmt_f(self.tolerance),
        )
    }

    pub fn parse_csv_row(line: &str) -> Result<Self> {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 14 {
            return Err(Error::Config(format!(
                "expected 14 columns, got {}: {line}",
                cells.len()
            )));
        }
        let f = |i: usize| -> Result<f64> {
            cells[i]
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("column {i}: {e}")))
        };
        let opt = |i: usize| -> Result<Option<f64>> {
            if cells[i].is_empty() {
                Ok(None)
            } else {
                f(i).map(Some)
            }
        };
        Ok(Self {
            t: f(0)?,
            fidelity: f(1)?,
            trace_distance: f(2)?,
            purity_system: f(3)?,
            purity_clock: f(4)?,
            clock_fidelity_to_free: f(5)?,
            autocorrelation: f(6)?,
            margin_fidelity: opt(7)?,
            margin_corollary: opt(8)?,
            margin_trace: opt(9)?,
            margin_weak_trace: opt(10)?,
            margin_vector_min: opt(11)?,
            applicable: cells[12]
                .parse::<bool>()
                .map_err(|e| Error::Config(format!("column 12: {e}")))?,
            tolerance: f(13)?,
        })
    }
}

/// One named check of a verdict with its worst observed margin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckVerdict {
    pub name: String,
    /// Worst (minimum) signed margin; None when no sample was applicable.
    pub worst_margin: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckVerdict {
    fn from_worst(name: &str, worst: Option<f64>, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            worst_margin: worst,
            tolerance,
            pass: worst.is_none_or(|w| w >= -tolerance),
        }
    }
}

/// Machine-readable run outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub scenario: String,
    pub pass: bool,
    pub inconclusive: bool,
    pub checks: Vec<CheckVerdict>,
    pub notes: Vec<String>,
}

impl Verdict {
    fn assemble(
        scenario: Scenario,
        checks: Vec<CheckVerdict>,
        notes: Vec<String>,
        inconclusive: bool,
    ) -> Self {
        let pass = !inconclusive && checks.iter().all(|c| c.pass);
        Self {
            scenario: scenario.name().to_string(),
            pass,
            inconclusive,
            checks,
            notes,
        }
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }
}

/// CI exit-status contract: 0 pass, 1 violation, 2 inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Pass,
    Violation,
    Inconclusive,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Pass => 0,
            ExitStatus::Violation => 1,
            ExitStatus::Inconclusive => 2,
        }
    }
}

pub fn verdict_status(v: &Verdict) -> ExitStatus {
    if v.inconclusive {
        ExitStatus::Inconclusive
    } else if v.pass {
        ExitStatus::Pass
    } else {
        ExitStatus::Violation
    }
}

/// Member of a sweep run.
#[derive(Debug, Clone)]
pub struct SweepMember {
    pub label: String,
    pub g_integral: f64,
    pub run: ScenarioRun,
}

/// Full in-memory result of a scenario.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub manifest: RunManifest,
    pub records: Vec<TimeSeriesRecord>,
    pub reports: Vec<BoundReport>,
    pub verdict: Verdict,
    pub members: Vec<SweepMember>,
}

fn sample_times(t_max: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| t_max * i as f64 / (count - 1) as f64)
        .collect()
}

/// Shared engine for the interacting scenarios: coarse + half-step
/// trajectories, per-sample reductions and the full bound suite.
struct InteractingRun {
    records: Vec<TimeSeriesRecord>,
    reports: Vec<BoundReport>,
    propagation_error: f64,
    energy_spread: f64,
    /// (cap - defect) minimum over applicable samples.
    support_margin: Option<f64>,
    /// ((1 - 1e-8) - purity) minimum where the pure-to-mixed claim applies.
    pure_to_mixed_margin: Option<f64>,
    /// Condition-1 residual of the initial product state.
    condition1_initial: f64,
    min_clock_purity: f64,
    /// Minimum clock fidelity to the free clock at t >= delta + width.
    late_clock_fidelity: Option<f64>,
    final_fidelity: f64,
    min_fidelity: f64,
}

fn run_interacting(r: &ResolvedConfig, g_integral: f64) -> Result<InteractingRun> {
    let model = if g_integral == r.g_integral {
        r.model.clone()
    } else {
        ModelConfig::new(
            r.model.grid().clone(),
            r.model.delta(),
            r.model.carrier(),
            r.model.profile().support_width(),
            g_integral,
            r.model.profile().shape(),
            r.model.system_hamiltonian().clone(),
            r.model.coupling_op().clone(),
            r.model.hbar(),
        )?
    };
    validate_no_wrap(&model, r.t_max)?;
    let hbar = model.hbar();
    let phi0 = model.initial_packet()?;
    let stats = clock_energy_stats(&phi0, hbar);
    let omega = r.system_state.clone();
    let rho0 = density_from_pure(&omega);
    let theta0 = CompositeState::product(&phi0, &omega);
    let prop = StrangPropagator::new(&model);
    let ts = sample_times(r.t_max, r.sample_count);

    let mut coarse: Vec<CompositeState> = Vec::with_capacity(ts.len());
    let mut state = theta0.clone();
    prop.evolve_sampled(&mut state, &ts, r.dt, |_, _, s| coarse.push(s.clone()));
    let mut prop_err = 0.0_f64;
    let mut fine = theta0.clone();
    prop.evolve_sampled(&mut fine, &ts, r.dt / 2.0, |i, _, s| {
        prop_err = prop_err.max(s.distance(&coarse[i]));
    });
    let tolerance = r.tolerance_slack + prop_err;

    let condition1_initial = crate::model::condition1_residual(
        &phi0,
        &omega,
        model.profile(),
        model.coupling_op(),
    );

    let mut records = Vec::with_capacity(ts.len());
    let mut reports = Vec::with_capacity(ts.len());
    let mut support_margin: Option<f64> = None;
    let mut pure_to_mixed_margin: Option<f64> = None;
    let mut min_clock_purity = f64::INFINITY;
    let mut late_clock_fidelity: Option<f64> = None;
    let transit_end = model.delta() + model.profile().support_width();
    for (i, &t) in ts.iter().enumerate() {
        let s = &coarse[i];
        let rho_pert = s.reduced_system()?;
        let rho_free = free_system_evolve(&rho0, model.system_hamiltonian(), t, hbar)?;
        let phi_free = free_clock_evolve(&phi0, t);
        let report = evaluate_bounds(
            t,
            &rho_free,
            &rho_pert,
            stats.spread,
            hbar,
            tolerance,
            r.random_vectors,
            r.seed.wrapping_add(i as u64),
        )?;
        let clock_purity = s.clock_purity();
        let clock_fid = s.clock_fidelity_to(&phi_free);
        min_clock_purity = min_clock_purity.min(clock_purity);
        if t >= transit_end {
            late_clock_fidelity = Some(match late_clock_fidelity {
                Some(v) => v.min(clock_fid),
                None => clock_fid,
            });
        }
        if report.applicable {
            let sup = support_inclusion_check(t, &rho_free, &rho_pert, r.support_eps);
            let m = r.support_eps.sqrt() - sup.inclusion_defect;
            support_margin = Some(support_margin.map_or(m, |v: f64| v.min(m)));
            if report.fidelity < 1.0 - 1e-6 && purity(&rho_free) > 1.0 - 1e-12 {
                let pm = (1.0 - 1e-8) - purity(&rho_pert);
                pure_to_mixed_margin =
                    Some(pure_to_mixed_margin.map_or(pm, |v: f64| v.min(pm)));
            }
        }
        records.push(TimeSeriesRecord {
            t,
            fidelity: report.fidelity,
            trace_distance: report.trace_distance,
            purity_system: purity(&rho_pert),
            purity_clock: clock_purity,
            clock_fidelity_to_free: clock_fid,
            autocorrelation: phi_free.inner(&phi0).norm().min(1.0),
            margin_fidelity: report.margin_fidelity,
            margin_corollary: report.margin_corollary,
            margin_trace: report.margin_trace,
            margin_weak_trace: report.margin_weak_trace,
            margin_vector_min: report.margin_vector_min,
            applicable: report.applicable,
            tolerance,
        });
        reports.push(report);
    }
    Ok(InteractingRun {
        final_fidelity: records.last().map(|r| r.fidelity).unwrap_or(1.0),
        min_fidelity: records.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min),
        records,
        reports,
        propagation_error: prop_err,
        energy_spread: stats.spread,
        support_margin,
        pure_to_mixed_margin,
        condition1_initial,
        min_clock_purity,
        late_clock_fidelity,
    })
}

fn worst<F: Fn(&BoundReport) -> Option<f64>>(
    reports: &[BoundReport],
    pick: F,
) -> Option<f64> {
    reports
        .iter()
        .filter_map(pick)
        .fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |v| v.min(m))))
}

/// The inequality checks common to every interacting run.
fn bound_checks(run: &InteractingRun, tolerance: f64) -> Vec<CheckVerdict> {
    let rs = &run.reports;
    let mut out = vec![
        CheckVerdict::from_worst("fidelity-bound", worst(rs, |r| r.margin_fidelity), tolerance),
        CheckVerdict::from_worst("corollary", worst(rs, |r| r.margin_corollary), tolerance),
        CheckVerdict::from_worst("trace-bound", worst(rs, |r| r.margin_trace), tolerance),
        CheckVerdict::from_worst(
            "weak-trace-bound",
            worst(rs, |r| r.margin_weak_trace),
            tolerance,
        ),
        CheckVerdict::from_worst(
            "vector-inequality",
            worst(rs, |r| r.margin_vector_min),
            tolerance,
        ),
        // D/2 >= D^2/4 makes the improved form dominate the weak one.
        CheckVerdict::from_worst(
            "weak-form-dominated",
            worst(rs, |r| {
                Some(r.margin_weak_trace? - r.margin_trace?)
            }),
            1e-12,
        ),
        CheckVerdict::from_worst("support-inclusion", run.support_margin, 0.0),
        CheckVerdict::from_worst("pure-to-mixed", run.pure_to_mixed_margin, 0.0),
    ];
    out.push(CheckVerdict {
        name: "condition1-initial".into(),
        worst_margin: Some(-run.condition1_initial),
        tolerance: 0.0,
        pass: run.condition1_initial == 0.0,
    });
    out
}

/// Expected late-time fidelity from the closed-form overlap plateau.
fn analytic_fidelity_floor(r: &ResolvedConfig, g_integral: f64) -> Result<f64> {
    let hbar = r.model.hbar();
    let w = Complex64::new(0.0, 2.0 * BRANCH_PHASE_SIGN * g_integral / hbar).exp();
    let c0 = r.system_state.amplitudes()[0];
    let c1 = r.system_state.amplitudes()[1];
    let rho_plateau = analytic_reduced_state(c0, c1, w)?;
    fidelity(&rho_plateau, &density_from_pure(&r.system_state))
}

fn dephasing_run(
    r: &ResolvedConfig,
    scenario: Scenario,
    g_integral: f64,
) -> Result<(Vec<TimeSeriesRecord>, Vec<BoundReport>, Verdict, f64)> {
    let run = run_interacting(r, g_integral)?;
    let tolerance = run
        .reports
        .first()
        .map(|rep| rep.tolerance)
        .unwrap_or(r.tolerance_slack);
    let mut checks = bound_checks(&run, tolerance);
    // Late-time fidelity settles on the plateau value of the overlap kernel.
    let floor = analytic_fidelity_floor(r, g_integral)?;
    checks.push(CheckVerdict {
        name: "fidelity-plateau".into(),
        worst_margin: Some(1e-4 - (run.final_fidelity - floor).abs()),
        tolerance: 0.0,
        pass: (run.final_fidelity - floor).abs() <= 1e-4,
    });
    // The overlap is an average of phases e^{-2iG} with G spanning [0, int g];
    // only while that arc stays within a half circle is the plateau also the
    // minimum of F over the transit.
    if 2.0 * g_integral.abs() / r.model.hbar() <= std::f64::consts::PI + 1e-12 {
        checks.push(CheckVerdict::from_worst(
            "fidelity-above-plateau",
            Some(run.min_fidelity - floor),
            1e-4,
        ));
    }
    let inconclusive = run.reports.iter().all(|rep| !rep.applicable);
    let verdict = Verdict::assemble(scenario, checks, Vec::new(), inconclusive);
    Ok((run.records, run.reports, verdict, run.propagation_error))
}

fn run_example1(r: &ResolvedConfig) -> Result<ScenarioRun> {
    let cfg_echo = config_echo(r);
    let (records, reports, verdict, prop_err) =
        dephasing_run(r, Scenario::Example1Dephasing, r.g_integral)?;
    finish(r, cfg_echo, records, reports, verdict, prop_err, Vec::new())
}

fn run_photon_box(r: &ResolvedConfig) -> Result<ScenarioRun> {
    let cfg_echo = config_echo(r);
    let run = run_interacting(r, r.g_integral)?;
    let tolerance = run
        .reports
        .first()
        .map(|rep| rep.tolerance)
        .unwrap_or(r.tolerance_slack);
    let mut checks = bound_checks(&run, tolerance);
    let sample_dt = r.t_max / (r.sample_count - 1) as f64;
    let t_star = minimal_full_deviation_time(&run.reports, r.full_deviation_threshold);
    checks.push(CheckVerdict {
        name: "full-deviation-reached".into(),
        worst_margin: t_star,
        tolerance: 0.0,
        pass: t_star.is_some(),
    });
    // t* dHc >= pi hbar / 2, with one sample interval of slack.
    let slack = sample_dt * run.energy_spread;
    let margin = t_star.map(|t| {
        t * run.energy_spread - std::f64::consts::FRAC_PI_2 * r.model.hbar()
    });
    checks.push(CheckVerdict::from_worst(
        "full-deviation-speed-limit",
        margin,
        slack,
    ));
    let inconclusive = run.reports.iter().all(|rep| !rep.applicable);
    let verdict = Verdict::assemble(Scenario::PhotonBox, checks, Vec::new(), inconclusive);
    let prop_err = run.propagation_error;
    finish(r, cfg_echo, run.records, run.reports, verdict, prop_err, Vec::new())
}

fn run_phase_gate(r: &ResolvedConfig) -> Result<ScenarioRun> {
    let cfg_echo = config_echo(r);
    let run = run_interacting(r, r.g_integral)?;
    let tolerance = run
        .reports
        .first()
        .map(|rep| rep.tolerance)
        .unwrap_or(r.tolerance_slack);
    let mut checks = bound_checks(&run, tolerance);
    checks.push(CheckVerdict::from_worst(
        "no-trace-on-clock",
        run.late_clock_fidelity.map(|f| f - (1.0 - 1e-6)),
        0.0,
    ));
    checks.push(CheckVerdict {
        name: "mid-transit-entanglement".into(),
        worst_margin: Some((1.0 - 1e-3) - run.min_clock_purity),
        tolerance: 0.0,
        pass: run.min_clock_purity < 1.0 - 1e-3,
    });
    let hbar = r.model.hbar();
    let phase = 2.0 * r.g_integral / hbar / std::f64::consts::PI;
    let notes = vec![format!(
        "informational: the relative branch phase accumulated across the coupling \
region is 2*integral(g)/hbar = {phase:.6}*pi; a clock-trace-free gate therefore \
needs integral(g) to be a multiple of pi*hbar, and a relative phase of pi \
(integral(g) = pi*hbar/2) necessarily entangles clock and system"
    )];
    let inconclusive = run.reports.iter().all(|rep| !rep.applicable);
    let verdict = Verdict::assemble(Scenario::PhaseGate, checks, notes, inconclusive);
    let prop_err = run.propagation_error;
    finish(r, cfg_echo, run.records, run.reports, verdict, prop_err, Vec::new())
}

fn run_mandelstam_tamm(r: &ResolvedConfig) -> Result<ScenarioRun> {
    let cfg_echo = config_echo(r);
    let run = run_interacting(r, 0.0)?;
    let tolerance = run
        .reports
        .first()
        .map(|rep| rep.tolerance)
        .unwrap_or(r.tolerance_slack);
    let mut checks = bound_checks(&run, tolerance);
    let phi0 = r.model.initial_packet()?;
    let ts = sample_times(r.t_max, r.sample_count);
    let margins =
        mandelstam_tamm_check(&phi0, run.energy_spread, &ts, r.model.hbar());
    let worst_mt = margins
        .iter()
        .map(|&(_, m)| m)
        .fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |v| v.min(m))));
    checks.push(CheckVerdict::from_worst("mandelstam-tamm", worst_mt, 1e-9));
    let inconclusive = margins.is_empty();
    let verdict =
        Verdict::assemble(Scenario::MandelstamTamm, checks, Vec::new(), inconclusive);
    let prop_err = run.propagation_error;
    finish(r, cfg_echo, run.records, run.reports, verdict, prop_err, Vec::new())
}

fn run_truncated_clock(r: &ResolvedConfig) -> Result<ScenarioRun> {
    let cfg_echo = config_echo(r);
    let model = &r.model;
    let h = model.grid().spacing();
    let span = r.t_max.min(-model.grid().x_min() - model.delta()).max(0.0);
    // lattice-aligned past times so free translation is an exact index shift
    let ts: Vec<f64> = (0..r.sample_count)
        .map(|i| {
            let t = -span * i as f64 / (r.sample_count - 1) as f64;
            (t / h).round() * h
        })
        .collect();
    let residual_exact = condition1_scan(model, &ts)?;
    let max_exact = residual_exact.iter().cloned().fold(0.0_f64, f64::max);
    let n = model.grid().len();
    let mut residuals: Vec<(usize, f64)> = Vec::new();
    for &div in &r.truncation_divisors {
        let d = n / div;
        residuals.push((d, truncated_clock_residual(d, model, &ts)?));
    }
    let mut checks = vec![CheckVerdict {
        name: "untruncated-residual-zero".into(),
        worst_margin: Some(-max_exact),
        tolerance: 0.0,
        pass: max_exact == 0.0,
    }];
    for &(d, res) in &residuals {
        checks.push(CheckVerdict {
            name: format!("truncated-residual-positive-d{d}"),
            worst_margin: Some(res),
            tolerance: 0.0,
            pass: res > 0.0,
        });
    }
    // larger kept dimension -> smaller residual
    let mut sorted = residuals.clone();
    sorted.sort_by_key(|&(d, _)| d);
    let mono = sorted
        .windows(2)
        .map(|w| w[0].1 - w[1].1)
        .fold(f64::INFINITY, f64::min);
    if sorted.len() > 1 {
        checks.push(CheckVerdict::from_worst(
            "residual-monotone",
            Some(mono),
            0.0,
        ));
    }
    // Records reflect the free (product-form) trajectory at t <= 0.
    let phi0 = model.initial_packet()?;
    let records: Vec<TimeSeriesRecord> = ts
        .iter()
        .map(|&t| {
            let phi_t = free_clock_evolve(&phi0, t);
            TimeSeriesRecord {
                t,
                fidelity: 1.0,
                trace_distance: 0.0,
                purity_system: 1.0,
                purity_clock: 1.0,
                clock_fidelity_to_free: 1.0,
                autocorrelation: phi_t.inner(&phi0).norm().min(1.0),
                margin_fidelity: None,
                margin_corollary: None,
                margin_trace: None,
                margin_weak_trace: None,
                margin_vector_min: None,
                applicable: false,
                tolerance: r.tolerance_slack,
            }
        })
        .collect();
    let verdict =
        Verdict::assemble(Scenario::TruncatedClock, checks, Vec::new(), false);
    finish(r, cfg_echo, records, Vec::new(), verdict, 0.0, Vec::new())
}

fn run_bound_sweep(r: &ResolvedConfig) -> Result<ScenarioRun> {
    let cfg_echo = config_echo(r);
    let integrals = r.sweep_integrals.clone();
    let member_of = |&g: &f64| -> Result<SweepMember> {
        let label = format!("g-{g:.6}");
        let (records, reports, verdict, prop_err) =
            dephasing_run(r, Scenario::BoundSweep, g)?;
        let mut manifest = cfg_echo.clone();
        manifest.propagation_error = Some(prop_err);
        Ok(SweepMember {
            label,
            g_integral: g,
            run: ScenarioRun {
                manifest,
                records,
                reports,
                verdict,
                members: Vec::new(),
            },
        })
    };
    #[cfg(feature = "parallel")]
    let members: Vec<SweepMember> = {
        use rayon::prelude::*;
        integrals
            .par_iter()
            .map(member_of)
            .collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let members: Vec<SweepMember> =
        integrals.iter().map(member_of).collect::<Result<Vec<_>>>()?;

    let mut checks = Vec::new();
    for m in &members {
        let worst_member = m
            .run
            .verdict
            .checks
            .iter()
            .filter_map(|c| c.worst_margin)
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))));
        checks.push(CheckVerdict {
            name: format!("member-{}", m.label),
            worst_margin: worst_member,
            tolerance: 0.0,
            pass: m.run.verdict.pass,
        });
    }
    let inconclusive = members.iter().all(|m| m.run.verdict.inconclusive);
    let verdict = Verdict::assemble(Scenario::BoundSweep, checks, Vec::new(), inconclusive);
    let prop_err = members
        .iter()
        .filter_map(|m| m.run.manifest.propagation_error)
        .fold(0.0_f64, f64::max);
    finish(r, cfg_echo, Vec::new(), Vec::new(), verdict, prop_err, members)
}

fn config_echo(r: &ResolvedConfig) -> RunManifest {
    // reconstructed echo used when the caller did not supply a file config
    let cfg = ExperimentConfig::for_scenario(r.scenario.name());
    RunManifest {
        scenario: r.scenario.name().to_string(),
        config: cfg,
        branch_phase_sign: BRANCH_PHASE_SIGN,
        energy_spread: 0.0,
        window_end: 0.0,
        seed: r.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        propagation_error: None,
        duration_seconds: None,
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    r: &ResolvedConfig,
    mut manifest: RunManifest,
    records: Vec<TimeSeriesRecord>,
    reports: Vec<BoundReport>,
    verdict: Verdict,
    propagation_error: f64,
    members: Vec<SweepMember>,
) -> Result<ScenarioRun> {
    let phi0 = r.model.initial_packet()?;
    let stats = clock_energy_stats(&phi0, r.model.hbar());
    manifest.energy_spread = stats.spread;
    manifest.window_end = speed_limit_window(stats.spread, r.model.hbar());
    manifest.propagation_error = Some(propagation_error);
    Ok(ScenarioRun {
        manifest,
        records,
        reports,
        verdict,
        members,
    })
}

/// Runs a scenario entirely in memory.
pub fn run_scenario(cfg: &ExperimentConfig) -> Result<ScenarioRun> {
    let r = resolve(cfg)?;
    let mut run = match r.scenario {
        Scenario::Example1Dephasing => run_example1(&r),
        Scenario::MandelstamTamm => run_mandelstam_tamm(&r),
        Scenario::PhotonBox => run_photon_box(&r),
        Scenario::PhaseGate => run_phase_gate(&r),
        Scenario::TruncatedClock => run_truncated_clock(&r),
        Scenario::BoundSweep => run_bound_sweep(&r),
    }?;
    run.manifest.config = cfg.clone();
    run.manifest.seed = r.seed;
    Ok(run)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// CSV + verdict + (optional) plot script for a completed run.
pub fn write_outputs(
    run: &ScenarioRun,
    dir: &Path,
    emit_plot: bool,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    if run.members.is_empty() {
        if run.records.is_empty() {
            return Err(Error::EmptyRecords);
        }
        write_csv(&run.records, &dir.join("series.csv"))?;
        if emit_plot {
            write_plot_script(run, &dir.join("plot.gp"))?;
        }
    } else {
        for m in &run.members {
            let mdir = dir.join(&m.label);
            fs::create_dir_all(&mdir)?;
            write_csv(&m.run.records, &mdir.join("series.csv"))?;
            write_json(&mdir.join("verdict.json"), &m.run.verdict)?;
            if emit_plot {
                write_plot_script(&m.run, &mdir.join("plot.gp"))?;
            }
        }
    }
    write_json(&dir.join("verdict.json"), &run.verdict)?;
    write_json(&dir.join("manifest.json"), &run.manifest)?;
    Ok(())
}

fn write_csv(records: &[TimeSeriesRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let mut f = fs::File::create(path)?;
    writeln!(f, "{CSV_HEADER}")?;
    for r in records {
        writeln!(f, "{}", r.csv_row())?;
    }
    Ok(())
}

fn write_plot_script(run: &ScenarioRun, path: &Path) -> Result<()> {
    let spread = run.manifest.energy_spread;
    let window = run.manifest.window_end;
    let script = format!(
        "# gnuplot script over series.csv\n\
set datafile separator ','\n\
set key outside\n\
set xlabel 't'\n\
dhc = {spread:.12e}\n\
window = {window:.12e}\n\
set arrow from window, graph 0 to window, graph 1 nohead dt 2\n\
plot 'series.csv' skip 1 using 1:2 with lines title 'fidelity', \\\n\
     '' skip 1 using 1:($3/2) with lines title 'trace distance / 2', \\\n\
     '' skip 1 using 1:5 with lines title 'clock purity', \\\n\
     (x <= window ? cos(dhc*x) : 1/0) with lines dt 3 title 'fidelity bound'\n"
    );
    fs::write(path, script)?;
    Ok(())
}

/// Runs a scenario with on-disk artifacts under `out_root/<scenario>`. The
/// manifest is written before time stepping begins and rewritten with the
/// propagation error and duration once the run completes.
pub fn execute_scenario(
    cfg: &ExperimentConfig,
    out_root: &Path,
    emit_plot: bool,
) -> Result<ScenarioRun> {
    let resolved = resolve(cfg)?;
    let dir = out_root.join(resolved.scenario.name());
    fs::create_dir_all(&dir)?;
    let preliminary = preliminary_manifest(cfg, &resolved)?;
    write_json(&dir.join("manifest.json"), &preliminary)?;
    let start = Instant::now();
    let mut run = run_scenario(cfg)?;
    run.manifest.duration_seconds = Some(start.elapsed().as_secs_f64());
    write_outputs(&run, &dir, emit_plot || resolved.emit_plot)?;
    Ok(run)
}

/// Re-evaluates a persisted verdict (JSON) or time series (CSV) and maps it
/// onto the exit-status contract.
pub fn verify_path(path: &Path) -> Result<ExitStatus> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or_default()
        .to_ascii_lowercase();
    match ext.as_str() {
        "json" => {
            let text = fs::read_to_string(path)?;
            let v: Verdict = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            Ok(verdict_status(&v))
        }
        "csv" => {
            let text = fs::read_to_string(path)?;
            let mut lines = text.lines();
            let header = lines.next().ok_or(Error::EmptyRecords)?;
            if header != CSV_HEADER {
                return Err(Error::Config(format!(
                    "{}: unrecognized header", path.display()
                )));
            }
            let mut any_applicable = false;
            let mut ok = true;
            for line in lines {
                if line.is_empty() {
                    continue;
                }
                let rec = TimeSeriesRecord::parse_csv_row(line)?;
                if !rec.applicable {
                    continue;
                }
                any_applicable = true;
                for m in [
                    rec.margin_fidelity,
                    rec.margin_corollary,
                    rec.margin_trace,
                    rec.margin_weak_trace,
                    rec.margin_vector_min,
                ]
                .into_iter()
                .flatten()
                {
                    if m < -rec.tolerance {
                        ok = false;
                    }
                }
            }
            Ok(if !any_applicable {
                ExitStatus::Inconclusive
            } else if ok {
                ExitStatus::Pass
            } else {
                ExitStatus::Violation
            })
        }
        _ => Err(Error::Config(format!(
            "{}: expected a .json verdict or .csv time series",
            path.display()
        ))),
    }
}
