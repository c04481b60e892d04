//! Classical receive-array estimators over the angle grid: Capon, APES and
//! GLRT, all built on the virtual-array matched filter
//!
//! ```text
//! g(α) = Z conj(X v(α)) / Mₜ
//! ```
//!
//! where `Z` is the M_r × L received matrix. With `XᴴX = I`, a single
//! on-grid target gives `g(θ) = s · a_r(θ)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::Cholesky;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::cs::AngleGrid;
use crate::error::{Error, Result};
use crate::geometry::{steering_vector, ArrayGeometry, Side, WaveformMatrix};
use crate::linalg::{CMatrix, CVector};
use crate::scalar::{czero, lit, modulus, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cs,
    Capon,
    Apes,
    Glrt,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Cs, Method::Capon, Method::Apes, Method::Glrt];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cs => "cs",
            Method::Capon => "capon",
            Method::Apes => "apes",
            Method::Glrt => "glrt",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cs" => Ok(Method::Cs),
            "capon" => Ok(Method::Capon),
            "apes" => Ok(Method::Apes),
            "glrt" => Ok(Method::Glrt),
            other => Err(Error::arg("methods", format!("unknown method `{other}`"))),
        }
    }
}

/// Diagonal loading added to the sample covariance.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loading {
    /// `δ = 1e-6 · tr(R̂) / M_r`.
    #[default]
    Default,
    Fixed(f64),
}

impl Loading {
    fn delta<T: Real>(self, trace: T, mr: usize) -> Result<T> {
        match self {
            Loading::Default => Ok(trace * lit(1e-6) / lit(mr as f64)),
            Loading::Fixed(d) if d >= 0.0 && d.is_finite() => Ok(lit(d)),
            Loading::Fixed(_) => Err(Error::arg("loading", "must be finite and non-negative")),
        }
    }
}

/// GLRT statistic variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlrtForm {
    /// `1 − a_rᴴR̂⁻¹a_r / a_rᴴQ̂⁻¹a_r`: fraction of the received energy that
    /// the transmit waveforms steered to α explain.
    #[default]
    ResidualRatio,
    /// `|a_rᴴR̂⁻¹g|² / (a_rᴴR̂⁻¹a_r · gᴴR̂⁻¹g)`: alignment of `g(α)` with the
    /// receive steering vector in the R̂⁻¹ metric. Identically one for a
    /// single receive antenna.
    Cosine,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumValues<T> {
    /// Per-angle complex amplitude estimates β̂(α).
    Amplitude(Vec<Complex<T>>),
    /// Real detection statistic in [0, 1].
    Statistic(Vec<T>),
}

#[derive(Debug, Clone)]
pub struct SpectrumEstimate<T: Real> {
    pub method: Method,
    pub grid: AngleGrid<T>,
    pub values: SpectrumValues<T>,
    /// Set when the estimator collapsed to the matched filter (one receive
    /// antenna for APES).
    pub degenerate: bool,
}

impl<T: Real> SpectrumEstimate<T> {
    pub fn magnitudes(&self) -> Vec<T> {
        match &self.values {
            SpectrumValues::Amplitude(v) => v.iter().map(|z| modulus(*z)).collect(),
            SpectrumValues::Statistic(v) => v.clone(),
        }
    }

    pub fn phases(&self) -> Vec<T> {
        match &self.values {
            SpectrumValues::Amplitude(v) => v.iter().map(|z| z.im.atan2(z.re)).collect(),
            SpectrumValues::Statistic(v) => vec![T::zero(); v.len()],
        }
    }
}

/// Stacks per-antenna observations into the M_r × L matrix `Z`.
pub fn received_matrix<T: Real>(observations: &[CVector<T>]) -> Result<CMatrix<T>> {
    let Some(first) = observations.first() else {
        return Err(Error::arg("observations", "need at least one receive antenna"));
    };
    let l = first.len();
    if observations.iter().any(|z| z.len() != l) {
        return Err(Error::Dimension("observations differ in length".into()));
    }
    Ok(CMatrix::from_fn(observations.len(), l, |r, c| observations[r][c]))
}

fn check_dims<T: Real>(z: &CMatrix<T>, x: &WaveformMatrix<T>, geometry: &ArrayGeometry<T>) -> Result<()> {
    if z.nrows() != geometry.rx_count() {
        return Err(Error::Dimension(format!(
            "Z has {} rows for {} receive antennas",
            z.nrows(),
            geometry.rx_count()
        )));
    }
    if z.ncols() != x.snapshots() || x.tx_count() != geometry.tx_count() {
        return Err(Error::Dimension("Z, X and the array disagree on L or Mt".into()));
    }
    Ok(())
}

/// `g(α)` for every grid angle.
pub fn matched_filter_virtual<T: Real>(
    z: &CMatrix<T>,
    x: &WaveformMatrix<T>,
    grid: &AngleGrid<T>,
    geometry: &ArrayGeometry<T>,
) -> Result<Vec<CVector<T>>> {
    check_dims(z, x, geometry)?;
    let mt = lit::<T>(x.tx_count() as f64);
    Ok(grid
        .radians()
        .iter()
        .map(|&alpha| {
            let beam = x.beam(geometry, alpha).map(|c| c.conj());
            (z * beam).map(|c| c / mt)
        })
        .collect())
}

/// Shared per-call state: matched-filter outputs, receive steering vectors
/// and the loaded sample covariance.
struct Prepared<T: Real> {
    g: Vec<CVector<T>>,
    a: Vec<CVector<T>>,
    r: CMatrix<T>,
    /// Mₜ / L, the weight of `g gᴴ` in the APES residual covariance.
    fit_weight: T,
    zero: bool,
}

fn prepare<T: Real>(
    z: &CMatrix<T>,
    x: &WaveformMatrix<T>,
    geometry: &ArrayGeometry<T>,
    grid: &AngleGrid<T>,
    loading: Loading,
) -> Result<Prepared<T>> {
    let g = matched_filter_virtual(z, x, grid, geometry)?;
    let l = lit::<T>(z.ncols() as f64);
    let mr = z.nrows();
    let mut r = (z * z.adjoint()).map(|c| c / l);
    let trace = (0..mr).fold(T::zero(), |acc, i| acc + r[(i, i)].re);
    let zero = !(trace > T::zero());
    let delta = loading.delta(trace, mr)?;
    for i in 0..mr {
        r[(i, i)] += Complex::new(delta, T::zero());
    }
    let a = grid
        .radians()
        .iter()
        .map(|&alpha| steering_vector(geometry, Side::Rx, alpha))
        .collect();
    Ok(Prepared {
        g,
        a,
        r,
        fit_weight: lit::<T>(x.tx_count() as f64) / l,
        zero,
    })
}

fn factor<T: Real>(m: CMatrix<T>) -> Result<Cholesky<Complex<T>, nalgebra::Dyn>> {
    m.cholesky().ok_or(Error::SingularCovariance)
}

fn quad<T: Real>(u: &CVector<T>, w: &CVector<T>) -> Complex<T> {
    u.dotc(w)
}

fn matched_output<T: Real>(a: &CVector<T>, g: &CVector<T>) -> Complex<T> {
    quad(a, g) / lit::<T>(a.len() as f64)
}

/// `β̂(α) = a_rᴴR̂⁻¹g / a_rᴴR̂⁻¹a_r`.
pub fn capon_spectrum<T: Real>(
    z: &CMatrix<T>,
    x: &WaveformMatrix<T>,
    geometry: &ArrayGeometry<T>,
    grid: &AngleGrid<T>,
    loading: Loading,
) -> Result<SpectrumEstimate<T>> {
    let p = prepare(z, x, geometry, grid, loading)?;
    let values = if p.zero {
        vec![czero(); grid.len()]
    } else {
        let chol = factor(p.r.clone())?;
        p.a.iter()
            .zip(&p.g)
            .map(|(a, g)| {
                let ra = chol.solve(a);
                quad(&ra, g) / quad(&ra, a)
            })
            .collect()
    };
    Ok(SpectrumEstimate {
        method: Method::Capon,
        grid: grid.clone(),
        values: SpectrumValues::Amplitude(values),
        degenerate: false,
    })
}

/// APES: Capon with the residual covariance `Q̂(α) = R̂ − (Mₜ/L) g gᴴ`
/// (loading included through R̂) in place of R̂.
pub fn apes_spectrum<T: Real>(
    z: &CMatrix<T>,
    x: &WaveformMatrix<T>,
    geometry: &ArrayGeometry<T>,
    grid: &AngleGrid<T>,
    loading: Loading,
) -> Result<SpectrumEstimate<T>> {
    let p = prepare(z, x, geometry, grid, loading)?;
    let degenerate = z.nrows() == 1;
    let values = if p.zero {
        vec![czero(); grid.len()]
    } else if degenerate {
        p.a.iter().zip(&p.g).map(|(a, g)| matched_output(a, g)).collect()
    } else {
        p.a.iter()
            .zip(&p.g)
            .map(|(a, g)| {
                let q = &p.r - (g * g.adjoint()).map(|c| c * p.fit_weight);
                let chol = factor(q)?;
                let qa = chol.solve(a);
                Ok(quad(&qa, g) / quad(&qa, a))
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok(SpectrumEstimate {
        method: Method::Apes,
        grid: grid.clone(),
        values: SpectrumValues::Amplitude(values),
        degenerate,
    })
}

pub fn glrt_statistic<T: Real>(
    z: &CMatrix<T>,
    x: &WaveformMatrix<T>,
    geometry: &ArrayGeometry<T>,
    grid: &AngleGrid<T>,
    loading: Loading,
    form: GlrtForm,
) -> Result<SpectrumEstimate<T>> {
    let p = prepare(z, x, geometry, grid, loading)?;
    let values = if p.zero {
        vec![T::zero(); grid.len()]
    } else {
        let chol = factor(p.r.clone())?;
        p.a.iter()
            .zip(&p.g)
            .map(|(a, g)| {
                let ra = chol.solve(a);
                let ara = quad(a, &ra).re;
                let rho = match form {
                    GlrtForm::Cosine => {
                        let rg = chol.solve(g);
                        let grg = quad(g, &rg).re;
                        if !(grg > T::zero()) {
                            T::zero()
                        } else {
                            quad(a, &rg).norm_sqr() / (ara * grg)
                        }
                    }
                    GlrtForm::ResidualRatio => {
                        let q = &p.r - (g * g.adjoint()).map(|c| c * p.fit_weight);
                        let qa = factor(q)?.solve(a);
                        T::one() - ara / quad(a, &qa).re
                    }
                };
                Ok(rho.max(T::zero()).min(T::one()))
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok(SpectrumEstimate {
        method: Method::Glrt,
        grid: grid.clone(),
        values: SpectrumValues::Statistic(values),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cs::build_angle_grid;
    use crate::geometry::{generate_waveforms, synthesize_received, NoiseModel, Point, Scene, Target};
    use crate::rng::{derive_stream, Purpose, StreamKey};
    use crate::scalar::deg_to_rad;

    const LAMBDA: f64 = 0.0348;

    fn rng(p: Purpose, a: usize) -> crate::rng::Stream {
        derive_stream(77, StreamKey::new(0, p).antenna(a))
    }

    fn scene(mr: usize, at_origin: bool, targets: &[(f64, f64)], snr: Option<f64>) -> Scene<f64> {
        let mut g = ArrayGeometry::random_disk(30, mr, 50.0 * LAMBDA, LAMBDA, false, &mut rng(Purpose::Geometry, 0))
            .unwrap();
        if at_origin {
            g = ArrayGeometry::new(g.tx().to_vec(), vec![Point::new(0.0, 0.0)], LAMBDA).unwrap();
        }
        let x = generate_waveforms(30, 512, true, &mut rng(Purpose::Waveform, 0)).unwrap();
        let targets: Vec<_> = targets
            .iter()
            .map(|&(deg, range)| Target::new(range, deg_to_rad(deg), Complex::new(1.0, 0.0)).unwrap())
            .collect();
        let noise = match snr {
            None => NoiseModel::silent(),
            Some(db) => NoiseModel::new(crate::geometry::snr_to_sigma(&targets, &g, &x, db).unwrap()).unwrap(),
        };
        Scene {
            geometry: g,
            waveforms: x,
            targets,
            jammer: None,
            noise,
        }
    }

    fn data(s: &Scene<f64>) -> CMatrix<f64> {
        received_matrix(&synthesize_received(s, |l| rng(Purpose::Noise, l)).unwrap()).unwrap()
    }

    #[test]
    fn matched_filter_recovers_single_target() {
        let s = scene(1, true, &[(-2.0, 4000.0)], None);
        let grid = build_angle_grid::<f64>(-5.0, 5.0, 0.2).unwrap();
        let g = matched_filter_virtual(&data(&s), &s.waveforms, &grid, &s.geometry).unwrap();
        let truth = s.targets[0].grid_amplitude(LAMBDA);
        assert!((g[15][0] - truth).norm() < 1e-8);
    }

    #[test]
    fn zero_data_gives_zero_spectra() {
        let s = scene(3, false, &[], None);
        let z = CMatrix::zeros(3, 512);
        let grid = build_angle_grid::<f64>(-5.0, 5.0, 0.2).unwrap();
        let g = matched_filter_virtual(&z, &s.waveforms, &grid, &s.geometry).unwrap();
        assert!(g.iter().all(|v| v.iter().all(|c| c.norm() == 0.0)));
        for est in [
            capon_spectrum(&z, &s.waveforms, &s.geometry, &grid, Loading::Default).unwrap(),
            apes_spectrum(&z, &s.waveforms, &s.geometry, &grid, Loading::Default).unwrap(),
            glrt_statistic(&z, &s.waveforms, &s.geometry, &grid, Loading::Default, GlrtForm::ResidualRatio)
                .unwrap(),
        ] {
            assert!(est.magnitudes().iter().all(|m| *m == 0.0));
        }
    }

    #[test]
    fn single_antenna_capon_equals_matched_filter() {
        let s = scene(1, true, &[(-3.0, 4000.0), (1.0, 4100.0)], Some(20.0));
        let z = data(&s);
        let grid = build_angle_grid::<f64>(-5.0, 5.0, 0.2).unwrap();
        let g = matched_filter_virtual(&z, &s.waveforms, &grid, &s.geometry).unwrap();
        let capon = capon_spectrum(&z, &s.waveforms, &s.geometry, &grid, Loading::Default).unwrap();
        let apes = apes_spectrum(&z, &s.waveforms, &s.geometry, &grid, Loading::Default).unwrap();
        assert!(apes.degenerate);
        let (SpectrumValues::Amplitude(c), SpectrumValues::Amplitude(a)) = (&capon.values, &apes.values) else {
            panic!("amplitude spectra expected");
        };
        for i in 0..grid.len() {
            assert!((c[i] - g[i][0]).norm() < 1e-9);
            assert!((a[i] - g[i][0]).norm() < 1e-9);
        }
    }

    #[test]
    fn capon_amplitude_at_target() {
        let s = scene(10, false, &[(-2.0, 4000.0)], Some(20.0));
        let z = data(&s);
        let grid = build_angle_grid::<f64>(-5.0, 5.0, 0.2).unwrap();
        let capon = capon_spectrum(&z, &s.waveforms, &s.geometry, &grid, Loading::Default).unwrap();
        let m = capon.magnitudes();
        let peak = crate::cs::top_peaks(&m, 1)[0];
        assert_eq!(peak, 15);
        assert!((m[15] - 1.0).abs() < 0.1, "{}", m[15]);
    }

    #[test]
    fn cosine_glrt_limits() {
        // One transmitter at the origin and X = e₀, so g(α) is the first
        // column of Z. Receive steering: a_r(0) = (1, j), a_r(π/2) = (1, 1).
        let geometry = ArrayGeometry::new(
            vec![Point::new(0.0, 0.0)],
            vec![Point::new(0.0, 0.0), Point::new(LAMBDA / 4.0, 0.0)],
            LAMBDA,
        )
        .unwrap();
        let grid = AngleGrid::from_radians(vec![0.0, std::f64::consts::FRAC_PI_2]).unwrap();
        let x = WaveformMatrix::from_samples(CMatrix::from_row_slice(
            2,
            1,
            &[Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)],
        ))
        .unwrap();
        let z = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(1.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(0.0, 1.0),
                Complex::new(0.0, 0.0),
            ],
        );
        // g(0) = (1, j) ∥ a_r(0).
        let est = glrt_statistic(&z, &x, &geometry, &grid, Loading::Fixed(1.0), GlrtForm::Cosine).unwrap();
        let rho = est.magnitudes();
        assert!((rho[0] - 1.0).abs() < 1e-12, "{rho:?}");
        // g(π/2) = (1, -1) ⊥ a_r(π/2).
        let z2 = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(1.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(-1.0, 0.0),
                Complex::new(0.0, 0.0),
            ],
        );
        // R̂ = ggᴴ/2 + I keeps (1, -1) as an eigenvector, so R̂⁻¹g stays ⊥ a_r.
        let est = glrt_statistic(&z2, &x, &geometry, &grid, Loading::Fixed(1.0), GlrtForm::Cosine).unwrap();
        assert!(est.magnitudes()[1].abs() < 1e-12);
    }

    #[test]
    fn glrt_in_unit_interval_and_peaks_at_targets() {
        let s = scene(10, false, &[(-3.0, 4000.0), (-2.0, 4100.0)], Some(20.0));
        let z = data(&s);
        let grid = build_angle_grid::<f64>(-5.0, 5.0, 0.2).unwrap();
        for form in [GlrtForm::ResidualRatio, GlrtForm::Cosine] {
            let est = glrt_statistic(&z, &s.waveforms, &s.geometry, &grid, Loading::Default, form).unwrap();
            let m = est.magnitudes();
            assert!(m.iter().all(|v| (0.0..=1.0).contains(v)));
            let mut top = crate::cs::top_peaks(&m, 2);
            top.sort();
            assert_eq!(top, vec![10, 15], "{form:?}");
        }
    }

    #[test]
    fn scaling_data_scales_amplitudes() {
        let s = scene(4, false, &[(-1.0, 4000.0)], Some(20.0));
        let z = data(&s);
        let c = Complex::new(-0.6, 1.7);
        let zc = z.map(|v| v * c);
        let grid = build_angle_grid::<f64>(-5.0, 5.0, 0.2).unwrap();
        for (a, b) in [
            (
                capon_spectrum(&z, &s.waveforms, &s.geometry, &grid, Loading::Default).unwrap(),
                capon_spectrum(&zc, &s.waveforms, &s.geometry, &grid, Loading::Default).unwrap(),
            ),
            (
                apes_spectrum(&z, &s.waveforms, &s.geometry, &grid, Loading::Default).unwrap(),
                apes_spectrum(&zc, &s.waveforms, &s.geometry, &grid, Loading::Default).unwrap(),
            ),
        ] {
            let (SpectrumValues::Amplitude(x), SpectrumValues::Amplitude(y)) = (&a.values, &b.values) else {
                panic!()
            };
            for (p, q) in x.iter().zip(y) {
                assert!((p * c - q).norm() < 1e-9 * (1.0 + q.norm()));
            }
            assert_eq!(crate::cs::top_peaks(&a.magnitudes(), 1), crate::cs::top_peaks(&b.magnitudes(), 1));
        }
        let ra = glrt_statistic(&z, &s.waveforms, &s.geometry, &grid, Loading::Default, GlrtForm::ResidualRatio)
            .unwrap()
            .magnitudes();
        let rb = glrt_statistic(&zc, &s.waveforms, &s.geometry, &grid, Loading::Default, GlrtForm::ResidualRatio)
            .unwrap()
            .magnitudes();
        for (p, q) in ra.iter().zip(&rb) {
            assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_loading_on_rank_deficient_covariance_errors() {
        let s = scene(3, false, &[(-1.0, 4000.0)], None);
        let mut z = data(&s);
        z.row_mut(2).fill(Complex::new(0.0, 0.0));
        let grid = build_angle_grid::<f64>(-5.0, 5.0, 0.2).unwrap();
        assert!(matches!(
            capon_spectrum(&z, &s.waveforms, &s.geometry, &grid, Loading::Fixed(0.0)),
            Err(Error::SingularCovariance)
        ));
    }

    #[test]
    fn method_parsing() {
        assert_eq!("CS".parse::<Method>().unwrap(), Method::Cs);
        assert_eq!(" glrt".parse::<Method>().unwrap(), Method::Glrt);
        assert!("music".parse::<Method>().is_err());
    }
}
