use crate::error::{Error, Result};
use crate::scalar::{deg_to_rad, lit, rad_to_deg, Real};

/// Strictly increasing list of candidate azimuths (radians). Spacing may be
/// non-uniform, as produced by grid refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid<T> {
    angles: Vec<T>,
}

impl<T: Real> AngleGrid<T> {
    pub fn from_radians(angles: Vec<T>) -> Result<Self> {
        if angles.len() < 2 {
            return Err(Error::arg("grid", "need at least two angles"));
        }
        if angles.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::arg("grid", "angles must be strictly increasing"));
        }
        Ok(Self { angles })
    }

    pub fn from_degrees(degrees: &[T]) -> Result<Self> {
        Self::from_radians(degrees.iter().map(|&d| deg_to_rad(d)).collect())
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn radians(&self) -> &[T] {
        &self.angles
    }

    /// Grid angles in degrees, rounded to 1e-9° so that decimal grids print
    /// as the decimals they were built from.
    pub fn degrees(&self) -> Vec<T> {
        self.angles.iter().map(|&a| round_deg(rad_to_deg(a))).collect()
    }

    /// Index of the grid angle closest to `azimuth` (radians).
    pub fn nearest(&self, azimuth: T) -> usize {
        let mut best = 0;
        for (i, &a) in self.angles.iter().enumerate() {
            if (a - azimuth).abs() < (self.angles[best] - azimuth).abs() {
                best = i;
            }
        }
        best
    }

    /// Index of the grid angle equal to `azimuth` within `tol` radians.
    pub fn position(&self, azimuth: T, tol: T) -> Option<usize> {
        let i = self.nearest(azimuth);
        ((self.angles[i] - azimuth).abs() <= tol).then_some(i)
    }

    pub fn contains_range(&self, azimuth: T) -> bool {
        azimuth >= self.angles[0] && azimuth <= self.angles[self.angles.len() - 1]
    }
}

pub(crate) fn round_deg<T: Real>(deg: T) -> T {
    let scale = lit::<T>(1e9);
    (deg * scale).round() / scale
}

/// Uniform grid from `start_deg` to `stop_deg` with `N = round((stop -
/// start) / step) + 1` points.
pub fn build_angle_grid<T: Real>(start_deg: T, stop_deg: T, step_deg: T) -> Result<AngleGrid<T>> {
    if !(step_deg > T::zero()) {
        return Err(Error::arg("step_deg", "must be positive"));
    }
    if !(start_deg < stop_deg) {
        return Err(Error::arg("start_deg", "must be below stop_deg"));
    }
    let span = (stop_deg - start_deg) / step_deg;
    let count = crate::scalar::to_f64(span).round() as usize + 1;
    let degrees: Vec<T> = (0..count)
        .map(|i| round_deg(start_deg + step_deg * lit(i as f64)))
        .collect();
    AngleGrid::from_degrees(&degrees)
}
