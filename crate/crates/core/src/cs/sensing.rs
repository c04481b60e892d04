use std::ops::Range;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::scalar::{lit, Real};

use super::basis::BasisMatrix;
use super::grid::AngleGrid;
use super::measurement::MeasurementMatrix;

/// Stacked compressed dictionary Θ: the row block of antenna `l` is Φₗ Ψₗ.
#[derive(Debug, Clone)]
pub struct SensingOperator<T: Real> {
    pub theta: CMatrix<T>,
    /// `(antenna, rows of Θ)` in stacking order.
    pub blocks: Vec<(usize, Range<usize>)>,
    pub grid: AngleGrid<T>,
}

impl<T: Real> SensingOperator<T> {
    /// Number of stacked receive antennas `N_r`.
    pub fn antennas(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, i: usize) -> CMatrix<T> {
        let rows = self.blocks[i].1.clone();
        self.theta.rows(rows.start, rows.len()).into_owned()
    }
}

/// Builds Θ and the matching stacked measurement vector `r = [Φ₁z₁; …]`.
pub fn build_sensing_operator<T: Real>(
    pairs: &[(MeasurementMatrix<T>, BasisMatrix<T>)],
    observations: &[CVector<T>],
) -> Result<(SensingOperator<T>, CVector<T>)> {
    let Some((_, first)) = pairs.first() else {
        return Err(Error::arg("pairs", "need at least one antenna"));
    };
    if observations.len() != pairs.len() {
        return Err(Error::Dimension(format!(
            "{} observations for {} antennas",
            observations.len(),
            pairs.len()
        )));
    }
    let n = first.matrix.ncols();
    let grid = first.grid.clone();
    let tol = lit::<T>(1e-12);
    let total_rows: usize = pairs.iter().map(|(m, _)| m.rows()).sum();
    let mut theta = CMatrix::zeros(total_rows, n);
    let mut r = CVector::zeros(total_rows);
    let mut blocks = Vec::with_capacity(pairs.len());
    let mut row = 0;
    for ((meas, basis), z) in pairs.iter().zip(observations) {
        let same_grid = basis.grid.len() == grid.len()
            && basis
                .grid
                .radians()
                .iter()
                .zip(grid.radians())
                .all(|(a, b)| (*a - *b).abs() <= tol);
        if !same_grid {
            return Err(Error::Dimension(format!(
                "antenna {} uses a different angle grid",
                basis.antenna
            )));
        }
        if meas.effective.ncols() != basis.matrix.nrows() || z.len() != basis.matrix.nrows() {
            return Err(Error::Dimension(format!(
                "antenna {}: measurement is {}x{}, basis has {} rows, observation has {} samples",
                basis.antenna,
                meas.effective.nrows(),
                meas.effective.ncols(),
                basis.matrix.nrows(),
                z.len()
            )));
        }
        let m = meas.rows();
        theta.rows_mut(row, m).copy_from(&(&meas.effective * &basis.matrix));
        r.rows_mut(row, m).copy_from(&(&meas.effective * z));
        blocks.push((basis.antenna, row..row + m));
        row += m;
    }
    Ok((SensingOperator { theta, blocks, grid }, r))
}
