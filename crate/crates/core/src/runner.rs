//! Scenario execution: one trial synthesizes a scene, runs the requested
//! estimators and scores them; sweeps repeat trials over one varied knob.
//!
//! Every random draw comes from a stream keyed by `(seed, trial, purpose,
//! antenna)`, so trial `t` sees the same geometry, waveforms and noise
//! whichever thread runs it and whichever axis value is being swept.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{
    apes_spectrum, capon_spectrum, glrt_statistic, received_matrix, Method, SpectrumEstimate,
};
use crate::cs::{
    build_basis, build_sensing_operator, draw_measurement, refine_grid, select_threshold, solve_dantzig,
    top_peaks, AngleGrid, DantzigSolution, MeasurementKind, MeasurementMatrix, PEAK_RELATIVE_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::geometry::{
    generate_waveforms, snr_to_sigma, synthesize_received, ArrayGeometry, Jammer, NoiseModel, Scene, Target,
    WaveformMatrix,
};
use crate::linalg::CVector;
use crate::metrics::{empirical_sjr, prr, to_db, SjrReport, SjrSetup};
use crate::rng::{derive_stream, Purpose, StreamKey};
use crate::scalar::deg_to_rad;
use crate::scenario::{GeometrySpec, Scenario};

/// Entries below this fraction of the peak count as outside the support.
pub const SUPPORT_RELATIVE_THRESHOLD: f64 = 1e-3;

const ON_GRID_TOL_RAD: f64 = 1e-9;

/// Everything a trial draws before any estimator runs.
#[derive(Debug, Clone)]
pub struct TrialData {
    pub scene: Scene<f64>,
    pub observations: Vec<CVector<f64>>,
    /// Noise variance actually used (0 when noiseless).
    pub sigma2: f64,
}

pub fn trial_geometry(scenario: &Scenario, seed: u64, trial: u64) -> Result<ArrayGeometry<f64>> {
    let lambda = scenario.wavelength();
    let nr = scenario.receive_antennas;
    match &scenario.geometry {
        GeometrySpec::Disk(d) => ArrayGeometry::random_disk(
            d.tx,
            nr,
            d.radius_wavelengths * lambda,
            lambda,
            d.shared,
            &mut derive_stream(seed, StreamKey::new(trial, Purpose::Geometry)),
        ),
        GeometrySpec::Explicit(e) => ArrayGeometry::new(
            GeometrySpec::points(&e.tx),
            GeometrySpec::points(&e.rx[..nr]),
            lambda,
        ),
    }
}

fn scenario_targets(scenario: &Scenario) -> Result<Vec<Target<f64>>> {
    scenario
        .targets
        .iter()
        .map(|t| Target::new(t.range_m, deg_to_rad(t.azimuth_deg), t.beta.value()))
        .collect()
}

pub fn synthesize_trial(scenario: &Scenario, seed: u64, trial: u64) -> Result<TrialData> {
    let geometry = trial_geometry(scenario, seed, trial)?;
    let waveforms = generate_waveforms(
        scenario.tx_count(),
        scenario.snapshots,
        scenario.orthonormalize,
        &mut derive_stream(seed, StreamKey::new(trial, Purpose::Waveform)),
    )?;
    let targets = scenario_targets(scenario)?;
    let jammer = match &scenario.jammer {
        None => None,
        Some(j) => {
            let b = Jammer::gaussian_waveform(
                scenario.snapshots,
                &mut derive_stream(seed, StreamKey::new(trial, Purpose::JammerWaveform)),
            );
            Some(Jammer::new(j.range_m, deg_to_rad(j.azimuth_deg), j.beta.value(), b)?)
        }
    };
    let sigma2 = match scenario.snr_db {
        None => 0.0,
        Some(db) => snr_to_sigma(&targets, &geometry, &waveforms, db)?,
    };
    let noise = if sigma2 > 0.0 {
        NoiseModel::new(sigma2)?
    } else {
        NoiseModel::silent()
    };
    let scene = Scene {
        geometry,
        waveforms,
        targets,
        jammer,
        noise,
    };
    let observations = synthesize_received(&scene, |l| {
        derive_stream(seed, StreamKey::new(trial, Purpose::Noise).antenna(l))
    })?;
    Ok(TrialData {
        scene,
        observations,
        sigma2,
    })
}

/// Grid indices closest to each target azimuth (deduplicated, ascending)
/// and whether every target sits exactly on a grid point.
pub fn target_indices(targets: &[Target<f64>], grid: &AngleGrid<f64>) -> (Vec<usize>, bool) {
    let on_grid = targets
        .iter()
        .all(|t| grid.position(t.azimuth, ON_GRID_TOL_RAD).is_some());
    let set: BTreeSet<usize> = targets.iter().map(|t| grid.nearest(t.azimuth)).collect();
    (set.into_iter().collect(), on_grid)
}

/// Indices holding at least [`SUPPORT_RELATIVE_THRESHOLD`] of the peak.
pub fn support(magnitudes: &[f64]) -> Vec<usize> {
    let max = magnitudes.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    (0..magnitudes.len())
        .filter(|&i| magnitudes[i] > SUPPORT_RELATIVE_THRESHOLD * max)
        .collect()
}

/// Output of the compressive pipeline for one trial.
#[derive(Debug, Clone)]
pub struct CsOutcome {
    pub grid: AngleGrid<f64>,
    pub solution: DantzigSolution<f64>,
    pub mu: f64,
    /// Coarse-grid solution when a refinement pass ran.
    pub coarse: Option<(AngleGrid<f64>, DantzigSolution<f64>)>,
}

fn threshold(scenario: &Scenario, n: usize, sigma2: f64) -> Result<f64> {
    match scenario.solver.mu {
        Some(mu) => Ok(mu),
        None => select_threshold(n, sigma2, scenario.solver.t),
    }
}

fn solve_on_grid(
    scenario: &Scenario,
    data: &TrialData,
    measurements: &[MeasurementMatrix<f64>],
    grid: &AngleGrid<f64>,
) -> Result<(DantzigSolution<f64>, f64)> {
    let pairs = measurements
        .iter()
        .enumerate()
        .map(|(l, m)| Ok((m.clone(), build_basis(&data.scene.geometry, &data.scene.waveforms, grid, l)?)))
        .collect::<Result<Vec<_>>>()?;
    let (op, r) = build_sensing_operator(&pairs, &data.observations)?;
    let mu = threshold(scenario, grid.len(), data.sigma2)?;
    let solution = solve_dantzig(&op, &r, mu, &scenario.solver.options())?;
    Ok((solution, mu))
}

pub fn draw_measurements(
    kind: MeasurementKind,
    m: usize,
    waveforms: &WaveformMatrix<f64>,
    antennas: usize,
    seed: u64,
    trial: u64,
) -> Result<Vec<MeasurementMatrix<f64>>> {
    (0..antennas)
        .map(|l| {
            let mut rng = derive_stream(seed, StreamKey::new(trial, Purpose::Measurement).antenna(l));
            draw_measurement(kind, m, waveforms, &mut rng)
        })
        .collect()
}

/// Compresses every antenna with `M` measurements and solves the Dantzig
/// selector, then re-solves on a fine grid when the scenario asks for it.
pub fn estimate_cs(scenario: &Scenario, data: &TrialData, seed: u64, trial: u64) -> Result<CsOutcome> {
    let grid = scenario.angle_grid()?;
    let measurements = draw_measurements(
        scenario.solver.kind,
        scenario.measurements,
        &data.scene.waveforms,
        data.observations.len(),
        seed,
        trial,
    )?;
    let (solution, mu) = solve_on_grid(scenario, data, &measurements, &grid)?;
    let Some(spec) = &scenario.refine else {
        return Ok(CsOutcome {
            grid,
            solution,
            mu,
            coarse: None,
        });
    };
    let fine = refine_grid(
        &solution.spectrum,
        &grid,
        spec.window_deg,
        spec.step_deg,
        PEAK_RELATIVE_THRESHOLD,
    )?;
    let (fine_solution, fine_mu) = solve_on_grid(scenario, data, &measurements, &fine)?;
    Ok(CsOutcome {
        grid: fine,
        solution: fine_solution,
        mu: fine_mu,
        coarse: Some((grid, solution)),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for ErrorRecord {
    fn from(e: &Error) -> Self {
        Self {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodResult {
    pub method: Method,
    pub angles_deg: Vec<f64>,
    pub magnitude: Vec<f64>,
    pub phase_rad: Vec<f64>,
    pub target_indices: Vec<usize>,
    /// `None` when the estimator failed or the PRR is undefined.
    pub prr: Option<f64>,
    /// Angles of the strongest local maxima, one per target, strongest first.
    pub peaks_deg: Vec<f64>,
    pub degenerate: bool,
    pub error: Option<ErrorRecord>,
}

impl MethodResult {
    pub fn prr_db(&self) -> Option<f64> {
        self.prr.map(to_db)
    }

    fn scored(
        method: Method,
        grid: &AngleGrid<f64>,
        magnitude: Vec<f64>,
        phase_rad: Vec<f64>,
        targets: &[Target<f64>],
        degenerate: bool,
        error: Option<ErrorRecord>,
    ) -> Self {
        let (target_indices, _) = target_indices(targets, grid);
        let degrees = grid.degrees();
        let peaks_deg = top_peaks(&magnitude, targets.len()).into_iter().map(|i| degrees[i]).collect();
        let prr = if error.is_none() {
            prr(&magnitude, &target_indices).ok()
        } else {
            None
        };
        Self {
            method,
            angles_deg: degrees,
            magnitude,
            phase_rad,
            target_indices,
            prr,
            peaks_deg,
            degenerate,
            error,
        }
    }

    fn failed(method: Method, error: &Error) -> Self {
        Self {
            method,
            angles_deg: Vec::new(),
            magnitude: Vec::new(),
            phase_rad: Vec::new(),
            target_indices: Vec::new(),
            prr: None,
            peaks_deg: Vec::new(),
            degenerate: false,
            error: Some(error.into()),
        }
    }

    /// Whether the top peaks land exactly on the true target grid points.
    pub fn peaks_on_targets(&self) -> bool {
        let mut peaks: Vec<usize> = self
            .peaks_deg
            .iter()
            .filter_map(|d| self.angles_deg.iter().position(|a| a == d))
            .collect();
        peaks.sort_unstable();
        self.error.is_none() && !peaks.is_empty() && peaks == self.target_indices
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CsDiagnostics {
    pub mu: f64,
    pub objective: f64,
    pub lower_bound: f64,
    pub violation: f64,
    pub iterations: usize,
    pub refined: bool,
    /// The recovered support equals the true target grid indices (only
    /// possible when every target lies on the grid).
    pub exact_support: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub trial: u64,
    pub config_hash: String,
    pub measurements: usize,
    pub snapshots: usize,
    pub receive_antennas: usize,
    pub kind: MeasurementKind,
}

impl Provenance {
    fn new(scenario: &Scenario, seed: u64, trial: u64) -> Self {
        Self {
            seed,
            trial,
            config_hash: scenario.config_hash(),
            measurements: scenario.measurements,
            snapshots: scenario.snapshots,
            receive_antennas: scenario.receive_antennas,
            kind: scenario.solver.kind,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub provenance: Provenance,
    pub sigma2: f64,
    pub methods: Vec<MethodResult>,
    pub cs: Option<CsDiagnostics>,
    pub sjr: Option<SjrReport>,
    pub wall_time_s: f64,
}

impl RunResult {
    pub fn method(&self, method: Method) -> Option<&MethodResult> {
        self.methods.iter().find(|m| m.method == method)
    }
}

fn baseline_result(
    scenario: &Scenario,
    data: &TrialData,
    grid: &AngleGrid<f64>,
    method: Method,
) -> MethodResult {
    let s = &data.scene;
    let loading = scenario.baselines.loading;
    let estimate: Result<SpectrumEstimate<f64>> = received_matrix(&data.observations).and_then(|z| match method {
        Method::Capon => capon_spectrum(&z, &s.waveforms, &s.geometry, grid, loading),
        Method::Apes => apes_spectrum(&z, &s.waveforms, &s.geometry, grid, loading),
        Method::Glrt => glrt_statistic(&z, &s.waveforms, &s.geometry, grid, loading, scenario.baselines.glrt_form),
        Method::Cs => unreachable!("handled by estimate_cs"),
    });
    match estimate {
        Ok(est) => MethodResult::scored(
            method,
            grid,
            est.magnitudes(),
            est.phases(),
            &s.targets,
            est.degenerate,
            None,
        ),
        Err(e) => MethodResult::failed(method, &e),
    }
}

fn split(spectrum: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    (
        spectrum.iter().map(|z| z.norm()).collect(),
        spectrum.iter().map(|z| z.arg()).collect(),
    )
}

fn cs_result(
    scenario: &Scenario,
    data: &TrialData,
    seed: u64,
    trial: u64,
) -> (MethodResult, Option<CsDiagnostics>) {
    let targets = &data.scene.targets;
    match estimate_cs(scenario, data, seed, trial) {
        Ok(out) => {
            let (mag, phase) = split(&out.solution.spectrum);
            let (truth, on_grid) = target_indices(targets, &out.grid);
            let exact_support = on_grid && out.coarse.is_none() && support(&mag) == truth;
            let diag = CsDiagnostics {
                mu: out.mu,
                objective: out.solution.objective,
                lower_bound: out.solution.lower_bound,
                violation: out.solution.violation,
                iterations: out.solution.iterations,
                refined: out.coarse.is_some(),
                exact_support,
            };
            (
                MethodResult::scored(Method::Cs, &out.grid, mag, phase, targets, false, None),
                Some(diag),
            )
        }
        Err(Error::Solver(se)) => {
            // Keep the best iterate so a failed solve can still be inspected.
            let err = Error::Solver(se.clone());
            match scenario.angle_grid() {
                Ok(grid) if se.best.len() == grid.len() => {
                    let (mag, phase) = split(&se.best);
                    (
                        MethodResult::scored(Method::Cs, &grid, mag, phase, targets, false, Some((&err).into())),
                        None,
                    )
                }
                _ => (MethodResult::failed(Method::Cs, &err), None),
            }
        }
        Err(e) => (MethodResult::failed(Method::Cs, &e), None),
    }
}

/// Runs one trial of `scenario`. Estimator failures are recorded per method;
/// only errors in building the scene itself are returned as `Err`.
pub fn run_trial(scenario: &Scenario, methods: &[Method], seed: u64, trial: u64) -> Result<RunResult> {
    let start = Instant::now();
    scenario.validate()?;
    let data = synthesize_trial(scenario, seed, trial)?;
    let grid = scenario.angle_grid()?;
    let mut results = Vec::with_capacity(methods.len());
    let mut cs = None;
    for &method in methods {
        if method == Method::Cs {
            let (res, diag) = cs_result(scenario, &data, seed, trial);
            cs = diag;
            results.push(res);
        } else {
            results.push(baseline_result(scenario, &data, &grid, method));
        }
    }
    Ok(RunResult {
        provenance: Provenance::new(scenario, seed, trial),
        sigma2: data.sigma2,
        methods: results,
        cs,
        sjr: None,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Single-scene run (trial 0).
pub fn run_scenario(scenario: &Scenario, methods: &[Method], seed: u64) -> Result<RunResult> {
    run_trial(scenario, methods, seed, 0)
}

/// SJR Monte-Carlo on the scenario's targets and jammer, with the geometry
/// of trial 0 held fixed.
pub fn run_sjr(scenario: &Scenario, kind: MeasurementKind, trials: usize, seed: u64) -> Result<SjrReport> {
    let mut scenario = scenario.clone();
    scenario.solver.kind = kind;
    scenario.validate()?;
    let Some(jammer) = &scenario.jammer else {
        return Err(Error::InvalidArgument {
            name: "jammer",
            reason: "SJR needs a jammer".into(),
        });
    };
    let setup = SjrSetup {
        geometry: trial_geometry(&scenario, seed, 0)?,
        targets: scenario_targets(&scenario)?,
        jammer_range: jammer.range_m,
        jammer_azimuth: deg_to_rad(jammer.azimuth_deg),
        jammer_beta: jammer.beta.value(),
        snapshots: scenario.snapshots,
        measurements: scenario.measurements,
        kind,
    };
    empirical_sjr(&setup, trials, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    #[serde(rename = "L")]
    Snapshots,
    #[serde(rename = "M")]
    Measurements,
    #[serde(rename = "N_r")]
    ReceiveAntennas,
    #[serde(rename = "snr_db")]
    SnrDb,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Snapshots => "L",
            Axis::Measurements => "M",
            Axis::ReceiveAntennas => "N_r",
            Axis::SnrDb => "snr_db",
        }
    }

    /// Copy of `scenario` with this axis set to `value`.
    pub fn apply(self, scenario: &Scenario, value: f64) -> Result<Scenario> {
        let mut s = scenario.clone();
        let count = || {
            if value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
                Ok(value as usize)
            } else {
                Err(Error::InvalidArgument {
                    name: "values",
                    reason: format!("{} must be a positive integer, got {value}", self.name()),
                })
            }
        };
        match self {
            Axis::Snapshots => s.snapshots = count()?,
            Axis::Measurements => s.measurements = count()?,
            Axis::ReceiveAntennas => s.receive_antennas = count()?,
            Axis::SnrDb => s.snr_db = Some(value),
        }
        s.validate()?;
        Ok(s)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l" | "snapshots" => Ok(Axis::Snapshots),
            "m" | "measurements" => Ok(Axis::Measurements),
            "n_r" | "nr" | "receive_antennas" => Ok(Axis::ReceiveAntennas),
            "snr_db" | "snr" => Ok(Axis::SnrDb),
            other => Err(Error::InvalidArgument {
                name: "axis",
                reason: format!("unknown axis `{other}` (expected L, M, N_r or snr_db)"),
            }),
        }
    }
}

/// One (value, method, trial) cell of a sweep. Skipped values carry no
/// trial and a `skipped: …` status.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub axis: Axis,
    pub value: f64,
    pub method: Method,
    pub trial: Option<u64>,
    pub prr: Option<f64>,
    pub status: String,
    pub peaks_on_targets: bool,
    pub seed: u64,
    pub config_hash: String,
    pub measurements: usize,
    pub snapshots: usize,
    pub receive_antennas: usize,
}

impl SweepRow {
    pub fn prr_db(&self) -> Option<f64> {
        self.prr.map(to_db)
    }
}

fn status_of(m: &MethodResult) -> String {
    match (&m.error, m.prr) {
        (Some(e), _) => format!("failed: {}", e.kind),
        (None, None) => "undefined_prr".into(),
        (None, Some(_)) => "ok".into(),
    }
}

pub fn sweep(
    scenario: &Scenario,
    axis: Axis,
    values: &[f64],
    trials: usize,
    methods: &[Method],
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument {
            name: "values",
            reason: "need at least one axis value".into(),
        });
    }
    if trials == 0 {
        return Err(Error::InvalidArgument {
            name: "trials",
            reason: "must be at least 1".into(),
        });
    }
    let mut rows = Vec::new();
    for &value in values {
        let point = match axis.apply(scenario, value) {
            Ok(s) => s,
            Err(e) => {
                log::warn!("skipping {axis} = {value}: {e}");
                rows.extend(methods.iter().map(|&method| SweepRow {
                    axis,
                    value,
                    method,
                    trial: None,
                    prr: None,
                    status: format!("skipped: {e}"),
                    peaks_on_targets: false,
                    seed,
                    config_hash: scenario.config_hash(),
                    measurements: scenario.measurements,
                    snapshots: scenario.snapshots,
                    receive_antennas: scenario.receive_antennas,
                }));
                continue;
            }
        };
        let hash = point.config_hash();
        let runs: Vec<Result<RunResult>> = (0..trials as u64)
            .into_par_iter()
            .map(|t| run_trial(&point, methods, seed, t))
            .collect();
        for (t, run) in runs.into_iter().enumerate() {
            let base = |method, prr, status, peaks| SweepRow {
                axis,
                value,
                method,
                trial: Some(t as u64),
                prr,
                status,
                peaks_on_targets: peaks,
                seed,
                config_hash: hash.clone(),
                measurements: point.measurements,
                snapshots: point.snapshots,
                receive_antennas: point.receive_antennas,
            };
            match run {
                Ok(run) => rows.extend(
                    run.methods
                        .iter()
                        .map(|m| base(m.method, m.prr, status_of(m), m.peaks_on_targets())),
                ),
                Err(e) => rows.extend(
                    methods
                        .iter()
                        .map(|&m| base(m, None, format!("failed: {}", e.kind()), false)),
                ),
            }
        }
    }
    Ok(rows)
}

/// Cap applied to PRR in dB before averaging. Exact zero ripple (or zero
/// target energy) gives an infinite PRR; averaging would let one such trial
/// swamp the rest, so aggregates treat it as ±200 dB.
pub const PRR_DB_CAP: f64 = 200.0;

/// Mean and standard error of PRR in dB over the successful trials of one
/// (value, method) cell, with infinities clamped to [`PRR_DB_CAP`].
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub axis: Axis,
    pub value: f64,
    pub method: Method,
    pub trials: usize,
    pub ok: usize,
    pub infinite: usize,
    pub mean_prr_db: f64,
    pub stderr_prr_db: f64,
    pub peak_hit_rate: f64,
}

pub fn summarize(rows: &[SweepRow]) -> Vec<SweepSummary> {
    let mut keys: Vec<(f64, Method)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|&(v, m)| v.to_bits() == r.value.to_bits() && m == r.method) {
            keys.push((r.value, r.method));
        }
    }
    let axis = rows.first().map(|r| r.axis);
    keys.into_iter()
        .map(|(value, method)| {
            let cell: Vec<&SweepRow> = rows
                .iter()
                .filter(|r| r.value.to_bits() == value.to_bits() && r.method == method && r.trial.is_some())
                .collect();
            let raw: Vec<f64> = cell.iter().filter_map(|r| r.prr_db()).collect();
            let infinite = raw.iter().filter(|v| v.is_infinite()).count();
            let db: Vec<f64> = raw.iter().map(|v| v.clamp(-PRR_DB_CAP, PRR_DB_CAP)).collect();
            let n = db.len() as f64;
            let (mean, stderr) = if db.is_empty() {
                (f64::NAN, f64::NAN)
            } else if db.len() < 2 {
                (db[0], 0.0)
            } else {
                let mean = db.iter().sum::<f64>() / n;
                let var = db.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                (mean, (var / n).sqrt())
            };
            let hits = cell.iter().filter(|r| r.peaks_on_targets).count();
            SweepSummary {
                axis: axis.expect("non-empty rows"),
                value,
                method,
                trials: cell.len(),
                ok: db.len(),
                infinite,
                mean_prr_db: mean,
                stderr_prr_db: stderr,
                peak_hit_rate: if cell.is_empty() {
                    0.0
                } else {
                    hits as f64 / cell.len() as f64
                },
            }
        })
        .collect()
}

/// Degrees of the strongest CS peak, for refinement studies.
pub fn strongest_peak_deg(result: &MethodResult) -> Option<f64> {
    let i = top_peaks(&result.magnitude, 1).into_iter().next()?;
    Some(result.angles_deg[i])
}
