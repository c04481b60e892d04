use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::WaveformMatrix;
use crate::linalg::{orthonormal_rows, CMatrix};
use crate::rng::complex_gaussian;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementKind {
    /// Gaussian projection of the L received samples.
    Plain,
    /// Gaussian projection of the received samples after correlation with
    /// the transmit waveforms: `Φ̃ = Φ Xᴴ`.
    #[default]
    Matched,
}

impl std::fmt::Display for MeasurementKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MeasurementKind::Plain => "plain",
            MeasurementKind::Matched => "matched",
        })
    }
}

/// Random compression operator for one receive antenna.
#[derive(Debug, Clone)]
pub struct MeasurementMatrix<T: Real> {
    pub kind: MeasurementKind,
    /// Gaussian draw with orthonormal rows: M × L (plain) or M × Mₜ (matched).
    pub phi: CMatrix<T>,
    /// Operator applied to the received samples, always M × L.
    pub effective: CMatrix<T>,
}

impl<T: Real> MeasurementMatrix<T> {
    pub fn rows(&self) -> usize {
        self.effective.nrows()
    }

    /// `Aₗ = Φ̃ₗᴴ Φ̃ₗ` (L × L).
    pub fn gram(&self) -> CMatrix<T> {
        self.effective.adjoint() * &self.effective
    }
}

pub fn draw_measurement<T: Real, R: Rng + ?Sized>(
    kind: MeasurementKind,
    m: usize,
    waveforms: &WaveformMatrix<T>,
    rng: &mut R,
) -> Result<MeasurementMatrix<T>> {
    let l = waveforms.snapshots();
    let mt = waveforms.tx_count();
    if m == 0 {
        return Err(Error::arg("measurements", "M must be positive"));
    }
    let cols = match kind {
        MeasurementKind::Plain => {
            if m > l {
                return Err(Error::arg("measurements", format!("M = {m} exceeds L = {l}")));
            }
            l
        }
        MeasurementKind::Matched => {
            if m > mt {
                return Err(Error::arg(
                    "measurements",
                    format!("M = {m} exceeds Mt = {mt} for matched measurements"),
                ));
            }
            if !waveforms.is_orthonormal() {
                return Err(Error::arg(
                    "waveforms",
                    "matched measurements need orthonormal waveform columns",
                ));
            }
            mt
        }
    };
    let draw = CMatrix::<T>::from_fn(m, cols, |_, _| complex_gaussian(rng, T::one()));
    let phi = orthonormal_rows(draw);
    let effective = match kind {
        MeasurementKind::Plain => phi.clone(),
        MeasurementKind::Matched => &phi * waveforms.samples().adjoint(),
    };
    Ok(MeasurementMatrix {
        kind,
        phi,
        effective,
    })
}
