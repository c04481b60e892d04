//! Compressive-sensing DOA estimator: angle grid, per-antenna dictionaries,
//! random measurement operators, the stacked sensing operator, threshold
//! selection, the Dantzig-selector solver and adaptive grid refinement.

mod basis;
mod dantzig;
mod grid;
mod measurement;
mod refine;
mod sensing;
mod threshold;

pub use basis::{build_basis, BasisMatrix};
pub use dantzig::{
    dantzig_dual_bound, solve_dantzig, solve_dantzig_matrix, DantzigOptions, DantzigSolution, Formulation,
};
pub use grid::{build_angle_grid, AngleGrid};
pub use measurement::{draw_measurement, MeasurementKind, MeasurementMatrix};
pub use refine::{detect_peaks, refine_grid, strongest_angle_deg, top_peaks, PEAK_RELATIVE_THRESHOLD};
pub use sensing::{build_sensing_operator, SensingOperator};
pub use threshold::{select_threshold, select_threshold_with_base, LogBase};

/// Sparse complex amplitude vector aligned with an [`AngleGrid`].
pub type SparseSpectrum<T> = Vec<num_complex::Complex<T>>;
