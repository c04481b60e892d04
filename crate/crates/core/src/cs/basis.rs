use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, WaveformMatrix};
use crate::linalg::CMatrix;
use crate::scalar::Real;

use super::grid::AngleGrid;

/// Per-receive-antenna dictionary Ψₗ (L × N). Column `n` is the noiseless
/// response of a unit grid amplitude at angle `αₙ`.
#[derive(Debug, Clone)]
pub struct BasisMatrix<T: Real> {
    pub matrix: CMatrix<T>,
    pub antenna: usize,
    pub grid: AngleGrid<T>,
}

/// Ψₗ with column `n` equal to `e^{j(2π/λ)ηʳₗ(αₙ)} X v(αₙ)`.
pub fn build_basis<T: Real>(
    geometry: &ArrayGeometry<T>,
    waveforms: &WaveformMatrix<T>,
    grid: &AngleGrid<T>,
    antenna: usize,
) -> Result<BasisMatrix<T>> {
    if antenna >= geometry.rx_count() {
        return Err(Error::arg(
            "antenna",
            format!("index {antenna} out of range for {} receive antennas", geometry.rx_count()),
        ));
    }
    if waveforms.tx_count() != geometry.tx_count() {
        return Err(Error::Dimension("waveform columns must match transmit antennas".into()));
    }
    let mut matrix = CMatrix::zeros(waveforms.snapshots(), grid.len());
    for (n, &alpha) in grid.radians().iter().enumerate() {
        let col = waveforms.beam(geometry, alpha) * geometry.rx_phase(antenna, alpha);
        matrix.set_column(n, &col);
    }
    Ok(BasisMatrix {
        matrix,
        antenna,
        grid: grid.clone(),
    })
}
