use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{deg_to_rad, lit, modulus, rad_to_deg, Real};

use super::grid::{round_deg, AngleGrid};

/// Peaks below this fraction of the spectrum maximum are ignored.
pub const PEAK_RELATIVE_THRESHOLD: f64 = 0.1;

/// Local maxima of `magnitudes` above `rel_threshold · max`. A plateau
/// reports its leftmost index. Result is in ascending index order.
pub fn detect_peaks<T: Real>(magnitudes: &[T], rel_threshold: T) -> Vec<usize> {
    let max = magnitudes.iter().fold(T::zero(), |a, &m| a.max(m));
    if !(max > T::zero()) {
        return Vec::new();
    }
    let floor = max * rel_threshold;
    let n = magnitudes.len();
    (0..n)
        .filter(|&i| {
            let m = magnitudes[i];
            let left_ok = i == 0 || m > magnitudes[i - 1];
            let right_ok = i + 1 == n || m >= magnitudes[i + 1];
            left_ok && right_ok && m > floor
        })
        .collect()
}

/// The `k` strongest local maxima (any height), strongest first; ties go
/// to the smaller index.
pub fn top_peaks<T: Real>(magnitudes: &[T], k: usize) -> Vec<usize> {
    let mut peaks = detect_peaks(magnitudes, T::zero());
    peaks.sort_by(|&a, &b| {
        magnitudes[b]
            .partial_cmp(&magnitudes[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    peaks.truncate(k);
    peaks
}

/// Union of fine grids of half-width `window_deg` and spacing
/// `fine_step_deg` centred on every detected peak of `|ŝ|`.
pub fn refine_grid<T: Real>(
    spectrum: &[Complex<T>],
    grid: &AngleGrid<T>,
    window_deg: T,
    fine_step_deg: T,
    rel_threshold: T,
) -> Result<AngleGrid<T>> {
    if spectrum.len() != grid.len() {
        return Err(Error::Dimension(format!(
            "spectrum has {} entries for a grid of {}",
            spectrum.len(),
            grid.len()
        )));
    }
    if !(fine_step_deg > T::zero()) || !(window_deg > fine_step_deg) {
        return Err(Error::arg("window_deg", "need 0 < fine step < window"));
    }
    let mags: Vec<T> = spectrum.iter().map(|z| modulus(*z)).collect();
    let peaks = detect_peaks(&mags, rel_threshold);
    if peaks.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let half = crate::scalar::to_f64(window_deg / fine_step_deg).round() as i64;
    let degrees = grid.degrees();
    let mut fine: Vec<T> = peaks
        .iter()
        .flat_map(|&p| {
            let centre = degrees[p];
            (-half..=half).map(move |k| round_deg(centre + fine_step_deg * lit(k as f64)))
        })
        .collect();
    fine.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let tol = fine_step_deg * lit(1e-6);
    fine.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let radians: Vec<T> = fine.into_iter().map(deg_to_rad).collect();
    AngleGrid::from_radians(radians)
}

/// Refined-grid angle (degrees) of the strongest entry of a spectrum.
pub fn strongest_angle_deg<T: Real>(spectrum: &[Complex<T>], grid: &AngleGrid<T>) -> T {
    let mut best = 0;
    for (i, z) in spectrum.iter().enumerate() {
        if modulus(*z) > modulus(spectrum[best]) {
            best = i;
        }
    }
    rad_to_deg(grid.radians()[best])
}
