//! Experiment configuration: one JSON document per scenario.
//!
//! Angles are in degrees, ranges and positions in metres, frequency in Hz and
//! amplitudes linear. Unknown keys are rejected so typos cannot silently fall
//! back to defaults.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{GlrtForm, Loading};
use crate::cs::{build_angle_grid, AngleGrid, DantzigOptions, Formulation, MeasurementKind};
use crate::error::{Error, Result};
use crate::geometry::Point;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

fn default_carrier() -> f64 {
    8.62e9
}
fn default_radius() -> f64 {
    50.0
}
fn default_one() -> usize {
    1
}
fn default_trials() -> usize {
    50
}
fn default_true() -> bool {
    true
}
fn default_t() -> f64 {
    1.0
}
fn default_beta() -> Amplitude {
    Amplitude::Real(1.0)
}

/// A linear amplitude, either real (`1.0`) or complex (`[re, im]`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

impl Amplitude {
    pub fn value(self) -> Complex64 {
        match self {
            Amplitude::Real(r) => Complex64::new(r, 0.0),
            Amplitude::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskSpec {
    /// Disk radius in wavelengths.
    #[serde(default = "default_radius")]
    pub radius_wavelengths: f64,
    pub tx: usize,
    /// Reuse the transmit positions for the receive antennas.
    #[serde(default)]
    pub shared: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSpec {
    pub tx: Vec<[f64; 2]>,
    /// At least `receive_antennas` positions; only that many leading
    /// entries are used.
    pub rx: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometrySpec {
    /// Positions drawn uniformly on a disk, redrawn for every trial.
    Disk(DiskSpec),
    Explicit(ExplicitSpec),
}

impl GeometrySpec {
    pub fn tx_count(&self) -> usize {
        match self {
            GeometrySpec::Disk(d) => d.tx,
            GeometrySpec::Explicit(e) => e.tx.len(),
        }
    }

    pub(crate) fn points(list: &[[f64; 2]]) -> Vec<Point<f64>> {
        list.iter().map(|&[x, y]| Point::new(x, y)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start_deg: f64,
    pub stop_deg: f64,
    pub step_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub azimuth_deg: f64,
    pub range_m: f64,
    #[serde(default = "default_beta")]
    pub beta: Amplitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JammerSpec {
    pub azimuth_deg: f64,
    pub range_m: f64,
    pub beta: Amplitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    /// Fixed Dantzig threshold. When absent, μ is derived from the noise
    /// variance with the `(1 + 1/t)√(2 ln N σ²)` rule.
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default)]
    pub kind: MeasurementKind,
    #[serde(default)]
    pub formulation: Formulation,
    #[serde(default)]
    pub equilibrate: bool,
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub feas_tol: Option<f64>,
    #[serde(default)]
    pub gap_tol: Option<f64>,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            mu: None,
            t: default_t(),
            kind: MeasurementKind::default(),
            formulation: Formulation::default(),
            equilibrate: false,
            max_iter: None,
            feas_tol: None,
            gap_tol: None,
        }
    }
}

impl SolverSpec {
    pub fn options(&self) -> DantzigOptions<f64> {
        let d = DantzigOptions::<f64>::default();
        DantzigOptions {
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            feas_tol: self.feas_tol.unwrap_or(d.feas_tol),
            gap_tol: self.gap_tol.unwrap_or(d.gap_tol),
            formulation: self.formulation,
            equilibrate: self.equilibrate,
            prune_tol: d.prune_tol,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineSpec {
    #[serde(default)]
    pub loading: Loading,
    #[serde(default)]
    pub glrt_form: GlrtForm,
}

/// Second CS pass on a fine grid around the coarse peaks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefineSpec {
    pub window_deg: f64,
    pub step_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub seed: u64,
    #[serde(default = "default_carrier")]
    pub carrier_hz: f64,
    pub geometry: GeometrySpec,
    /// Snapshots per pulse, `L`.
    pub snapshots: usize,
    /// Compressed measurements per receive antenna, `M`.
    pub measurements: usize,
    /// Receive antennas fused, `N_r`.
    #[serde(default = "default_one")]
    pub receive_antennas: usize,
    pub grid: GridSpec,
    pub targets: Vec<TargetSpec>,
    #[serde(default)]
    pub jammer: Option<JammerSpec>,
    /// Omitted means noiseless.
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub baselines: BaselineSpec,
    #[serde(default)]
    pub refine: Option<RefineSpec>,
    /// Monte-Carlo trials for `sweep` and `sjr` when not given on the
    /// command line.
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Orthonormalize the QPSK waveform columns.
    #[serde(default = "default_true")]
    pub orthonormalize: bool,
}

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Scenario = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    pub fn tx_count(&self) -> usize {
        self.geometry.tx_count()
    }

    pub fn angle_grid(&self) -> Result<AngleGrid<f64>> {
        build_angle_grid(self.grid.start_deg, self.grid.stop_deg, self.grid.step_deg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            return Err(invalid("carrier_hz", "must be positive"));
        }
        let mt = self.tx_count();
        if mt == 0 {
            return Err(invalid("geometry.tx", "need at least one transmit antenna"));
        }
        match &self.geometry {
            GeometrySpec::Disk(d) => {
                if !(d.radius_wavelengths >= 0.0 && d.radius_wavelengths.is_finite()) {
                    return Err(invalid("geometry.disk.radius_wavelengths", "must be non-negative"));
                }
            }
            GeometrySpec::Explicit(e) => {
                if e.rx.len() < self.receive_antennas {
                    return Err(invalid(
                        "geometry.explicit.rx",
                        format!("{} positions for {} receive antennas", e.rx.len(), self.receive_antennas),
                    ));
                }
            }
        }
        if self.receive_antennas == 0 {
            return Err(invalid("receive_antennas", "must be at least 1"));
        }
        if self.snapshots == 0 {
            return Err(invalid("snapshots", "must be at least 1"));
        }
        if self.orthonormalize && self.snapshots < mt {
            return Err(invalid(
                "snapshots",
                format!("L = {} is below Mt = {mt}; orthonormal waveforms impossible", self.snapshots),
            ));
        }
        if self.measurements == 0 {
            return Err(invalid("measurements", "must be at least 1"));
        }
        match self.solver.kind {
            MeasurementKind::Plain if self.measurements > self.snapshots => {
                return Err(invalid(
                    "measurements",
                    format!("M = {} exceeds L = {} for plain measurements", self.measurements, self.snapshots),
                ));
            }
            MeasurementKind::Matched if self.measurements > mt => {
                return Err(invalid(
                    "measurements",
                    format!("M = {} exceeds Mt = {mt} for matched measurements", self.measurements),
                ));
            }
            MeasurementKind::Matched if !self.orthonormalize => {
                return Err(invalid("orthonormalize", "matched measurements need orthonormal waveforms"));
            }
            _ => {}
        }
        self.angle_grid().map_err(|e| invalid("grid", e.to_string()))?;
        if self.targets.is_empty() {
            return Err(invalid("targets", "need at least one target"));
        }
        for t in &self.targets {
            if !(t.range_m > 0.0 && t.range_m.is_finite()) {
                return Err(invalid("targets.range_m", "must be positive"));
            }
            if !(t.azimuth_deg > -180.0 && t.azimuth_deg <= 180.0) {
                return Err(invalid("targets.azimuth_deg", "must lie in (-180, 180]"));
            }
        }
        if let Some(j) = &self.jammer {
            if !(j.range_m > 0.0 && j.range_m.is_finite()) {
                return Err(invalid("jammer.range_m", "must be positive"));
            }
            if !(j.azimuth_deg > -180.0 && j.azimuth_deg <= 180.0) {
                return Err(invalid("jammer.azimuth_deg", "must lie in (-180, 180]"));
            }
        }
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                return Err(invalid("snr_db", "must be finite"));
            }
        }
        if let Some(mu) = self.solver.mu {
            if !(mu >= 0.0 && mu.is_finite()) {
                return Err(invalid("solver.mu", "must be non-negative"));
            }
        }
        if !(self.solver.t > 0.0) {
            return Err(invalid("solver.t", "must be positive"));
        }
        if let Some(r) = &self.refine {
            if !(r.step_deg > 0.0 && r.window_deg > r.step_deg) {
                return Err(invalid("refine", "need 0 < step_deg < window_deg"));
            }
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        Ok(())
    }

    /// Short SHA-256 digest of the canonical serialization with the seed
    /// cleared, so runs of one config under different seeds share a hash.
    pub fn config_hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.seed = 0;
        let bytes = serde_json::to_vec(&canonical).expect("scenario serializes");
        hex::encode(&Sha256::digest(&bytes)[..8])
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    Scenario::from_json(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
