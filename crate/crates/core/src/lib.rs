//! Compressive-sensing direction-of-arrival estimation for colocated MIMO
//! radar.
//!
//! The library synthesizes the received echoes of a randomly placed MIMO
//! array, compresses them with random (optionally waveform-matched)
//! projections, and recovers a sparse angle spectrum with the Dantzig
//! selector. Capon, APES and GLRT baselines, peak-to-ripple and
//! signal-to-jammer metrics, and a config-driven experiment runner are
//! included.
//!
//! Everything numeric is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix the common `f64` instantiation.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cone;
pub mod cs;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod metrics;
pub mod output;
pub mod rng;
pub mod scalar;
pub mod runner;
pub mod scenario;

pub use error::{Error, Result, SolverError};

pub type Cplx = num_complex::Complex<f64>;
pub type Geometry = geometry::ArrayGeometry<f64>;
pub type Waveforms = geometry::WaveformMatrix<f64>;
pub type Grid = cs::AngleGrid<f64>;
pub type Sensing = cs::SensingOperator<f64>;
pub type Dantzig = cs::DantzigSolution<f64>;
pub type Spectrum = baselines::SpectrumEstimate<f64>;
