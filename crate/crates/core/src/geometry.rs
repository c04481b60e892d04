//! Planar array geometry, steering vectors, transmit waveforms and synthesis
//! of the received signal (targets, an optional jammer and white noise).
//!
//! Angles are azimuths in radians measured from the x axis. A target at
//! range `d` and azimuth `θ` contributes, at receive antenna `l`,
//!
//! ```text
//! z_l += e^{-j(2π/λ)(2d - ηʳ_l(θ))} β X v(θ)
//! ```
//!
//! where `η(θ) = x cos θ + y sin θ` is the far-field aperture projection and
//! `v(θ)` the transmit steering vector. A jammer only travels one way.

use log::warn;
use nalgebra::DVector;
use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{gram_deviation, norm_sqr, orthonormal_columns, CMatrix, CVector};
use crate::rng::{complex_gaussian, uniform};
use crate::scalar::{cis, cplx, lit, range_phase, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn radius(&self) -> T {
        self.x.hypot(self.y)
    }
}

/// Which half of the array a steering vector refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Tx,
    Rx,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry<T> {
    tx: Vec<Point<T>>,
    rx: Vec<Point<T>>,
    wavelength: T,
}

impl<T: Real> ArrayGeometry<T> {
    pub fn new(tx: Vec<Point<T>>, rx: Vec<Point<T>>, wavelength: T) -> Result<Self> {
        if tx.is_empty() {
            return Err(Error::arg("tx_positions", "need at least one transmit antenna"));
        }
        if rx.is_empty() {
            return Err(Error::arg("rx_positions", "need at least one receive antenna"));
        }
        if !(wavelength > T::zero()) || !wavelength.is_finite() {
            return Err(Error::arg("wavelength", "must be positive and finite"));
        }
        if tx.iter().chain(&rx).any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::arg("positions", "antenna coordinates must be finite"));
        }
        Ok(Self { tx, rx, wavelength })
    }

    /// Places antennas uniformly at random on a disk of `radius` meters
    /// centred on the origin. With `shared` the receive antennas reuse the
    /// first `rx_count` transmit positions (drawing extra ones if needed).
    pub fn random_disk<R: Rng + ?Sized>(
        tx_count: usize,
        rx_count: usize,
        radius: T,
        wavelength: T,
        shared: bool,
        rng: &mut R,
    ) -> Result<Self> {
        if !(radius >= T::zero()) || !radius.is_finite() {
            return Err(Error::arg("radius", "must be non-negative and finite"));
        }
        let draw = |rng: &mut R| {
            let r = radius * uniform::<T, _>(rng).sqrt();
            let phi = T::two_pi() * uniform::<T, _>(rng);
            Point::new(r * phi.cos(), r * phi.sin())
        };
        let tx: Vec<_> = (0..tx_count).map(|_| draw(rng)).collect();
        let rx: Vec<_> = if shared {
            (0..rx_count)
                .map(|i| if i < tx.len() { tx[i] } else { draw(rng) })
                .collect()
        } else {
            (0..rx_count).map(|_| draw(rng)).collect()
        };
        Self::new(tx, rx, wavelength)
    }

    pub fn tx(&self) -> &[Point<T>] {
        &self.tx
    }

    pub fn rx(&self) -> &[Point<T>] {
        &self.rx
    }

    pub fn tx_count(&self) -> usize {
        self.tx.len()
    }

    pub fn rx_count(&self) -> usize {
        self.rx.len()
    }

    pub fn wavelength(&self) -> T {
        self.wavelength
    }

    /// Largest distance of any antenna from the origin.
    pub fn aperture_radius(&self) -> T {
        self.tx
            .iter()
            .chain(&self.rx)
            .fold(T::zero(), |acc, p| acc.max(p.radius()))
    }

    fn positions(&self, side: Side) -> &[Point<T>] {
        match side {
            Side::Tx => &self.tx,
            Side::Rx => &self.rx,
        }
    }

    /// Phase factor `e^{j(2π/λ)η(θ)}` of one receive antenna.
    pub fn rx_phase(&self, antenna: usize, azimuth: T) -> Complex<T> {
        cis(T::two_pi() / self.wavelength * project_aperture(self.rx[antenna], azimuth))
    }
}

/// Far-field path-length advance `x cos θ + y sin θ`.
pub fn project_aperture<T: Real>(position: Point<T>, azimuth: T) -> T {
    position.x * azimuth.cos() + position.y * azimuth.sin()
}

/// Steering vector with entries `e^{j(2π/λ)ηᵢ(θ)}`.
pub fn steering_vector<T: Real>(geometry: &ArrayGeometry<T>, side: Side, azimuth: T) -> CVector<T> {
    let k = T::two_pi() / geometry.wavelength;
    let pos = geometry.positions(side);
    DVector::from_iterator(pos.len(), pos.iter().map(|p| cis(k * project_aperture(*p, azimuth))))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target<T> {
    pub range: T,
    pub azimuth: T,
    pub beta: Complex<T>,
}

impl<T: Real> Target<T> {
    pub fn new(range: T, azimuth: T, beta: Complex<T>) -> Result<Self> {
        if !(range > T::zero()) || !range.is_finite() {
            return Err(Error::arg("target.range", "must be positive"));
        }
        if !(azimuth > -T::pi() && azimuth <= T::pi()) {
            return Err(Error::arg("target.azimuth", "must lie in (-π, π]"));
        }
        Ok(Self { range, azimuth, beta })
    }

    /// Grid amplitude `e^{-j4πd/λ} β` this target produces in the sparse
    /// angle spectrum.
    pub fn grid_amplitude(&self, wavelength: T) -> Complex<T> {
        range_phase(self.range, wavelength, 2) * self.beta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jammer<T: Real> {
    pub range: T,
    pub azimuth: T,
    pub beta: Complex<T>,
    /// Unit-norm length-L waveform.
    pub waveform: CVector<T>,
}

impl<T: Real> Jammer<T> {
    pub fn new(range: T, azimuth: T, beta: Complex<T>, waveform: CVector<T>) -> Result<Self> {
        if !(range > T::zero()) {
            return Err(Error::arg("jammer.range", "must be positive"));
        }
        let n = norm_sqr(&waveform).sqrt();
        if (n - T::one()).abs() > lit(1e-12) {
            return Err(Error::arg("jammer.waveform", "must have unit norm"));
        }
        Ok(Self {
            range,
            azimuth,
            beta,
            waveform,
        })
    }

    /// Circular Gaussian waveform of length `len`, normalized to unit norm.
    pub fn gaussian_waveform<R: Rng + ?Sized>(len: usize, rng: &mut R) -> CVector<T> {
        let raw = CVector::<T>::from_fn(len, |_, _| complex_gaussian(rng, T::one()));
        let n = norm_sqr(&raw).sqrt();
        raw.map(|z| z / n)
    }
}

/// Transmit waveform matrix `X` (L × Mₜ); column `i` is the sequence sent by
/// transmit antenna `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformMatrix<T: Real> {
    samples: CMatrix<T>,
    orthonormal: bool,
}

impl<T: Real> WaveformMatrix<T> {
    pub fn from_samples(samples: CMatrix<T>) -> Result<Self> {
        if samples.nrows() == 0 || samples.ncols() == 0 {
            return Err(Error::Dimension("waveform matrix must be non-empty".into()));
        }
        let orthonormal = samples.nrows() >= samples.ncols() && gram_deviation(&samples) <= lit(1e-8);
        Ok(Self {
            samples,
            orthonormal,
        })
    }

    pub fn samples(&self) -> &CMatrix<T> {
        &self.samples
    }

    /// Number of snapshots `L`.
    pub fn snapshots(&self) -> usize {
        self.samples.nrows()
    }

    pub fn tx_count(&self) -> usize {
        self.samples.ncols()
    }

    /// Whether `XᴴX = I` holds to within 1e-8.
    pub fn is_orthonormal(&self) -> bool {
        self.orthonormal
    }

    /// `X v(θ)`: the noiseless per-snapshot transmit superposition seen from
    /// azimuth `θ`.
    pub fn beam(&self, geometry: &ArrayGeometry<T>, azimuth: T) -> CVector<T> {
        &self.samples * steering_vector(geometry, Side::Tx, azimuth)
    }
}

/// Draws i.i.d. QPSK symbols `{±1 ± j}/√(2L)` and, when `orthonormalize` is
/// set, replaces the columns by an orthonormal basis of their span so that
/// `XᴴX = I` exactly.
pub fn generate_waveforms<T: Real, R: Rng + ?Sized>(
    tx_count: usize,
    snapshots: usize,
    orthonormalize: bool,
    rng: &mut R,
) -> Result<WaveformMatrix<T>> {
    if tx_count == 0 {
        return Err(Error::arg("tx_count", "must be positive"));
    }
    if snapshots < tx_count {
        return Err(Error::arg(
            "snapshots",
            format!("L = {snapshots} < Mt = {tx_count}: orthonormal columns impossible"),
        ));
    }
    let amp = lit::<T>(1.0 / (2.0 * snapshots as f64).sqrt());
    let raw = CMatrix::<T>::from_fn(snapshots, tx_count, |_, _| {
        let bits: u8 = rng.random_range(0..4);
        let re = if bits & 1 == 0 { amp } else { -amp };
        let im = if bits & 2 == 0 { amp } else { -amp };
        cplx(re, im)
    });
    let samples = if orthonormalize {
        orthonormal_columns(raw)
    } else {
        raw
    };
    WaveformMatrix::from_samples(samples)
}

/// White circular complex Gaussian noise with per-sample variance `σ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel<T> {
    pub variance: T,
}

impl<T: Real> NoiseModel<T> {
    pub fn new(variance: T) -> Result<Self> {
        if !(variance >= T::zero()) || !variance.is_finite() {
            return Err(Error::arg("noise.variance", "must be finite and non-negative"));
        }
        Ok(Self { variance })
    }

    pub fn silent() -> Self {
        Self {
            variance: T::zero(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> CVector<T> {
        if self.variance == T::zero() {
            return CVector::zeros(len);
        }
        CVector::from_fn(len, |_, _| complex_gaussian(rng, self.variance))
    }
}

/// Everything needed to synthesize one realization of the received data.
#[derive(Debug, Clone)]
pub struct Scene<T: Real> {
    pub geometry: ArrayGeometry<T>,
    pub waveforms: WaveformMatrix<T>,
    pub targets: Vec<Target<T>>,
    pub jammer: Option<Jammer<T>>,
    pub noise: NoiseModel<T>,
}

impl<T: Real> Scene<T> {
    pub fn validate(&self) -> Result<()> {
        if self.waveforms.tx_count() != self.geometry.tx_count() {
            return Err(Error::Dimension(format!(
                "waveform matrix has {} columns but the array has {} transmit antennas",
                self.waveforms.tx_count(),
                self.geometry.tx_count()
            )));
        }
        if let Some(j) = &self.jammer {
            if j.waveform.len() != self.waveforms.snapshots() {
                return Err(Error::Dimension(format!(
                    "jammer waveform has {} samples, expected L = {}",
                    j.waveform.len(),
                    self.waveforms.snapshots()
                )));
            }
        }
        let radius = self.geometry.aperture_radius();
        for t in &self.targets {
            if t.range < radius * lit(10.0) {
                warn!(
                    "target at range {} is not far-field for an aperture of radius {}",
                    crate::scalar::to_f64(t.range),
                    crate::scalar::to_f64(radius)
                );
            }
        }
        Ok(())
    }

    /// Noiseless target echoes at receive antenna `l`.
    pub fn target_component(&self, l: usize) -> CVector<T> {
        let lambda = self.geometry.wavelength();
        let mut z = CVector::zeros(self.waveforms.snapshots());
        for t in &self.targets {
            let coef = t.grid_amplitude(lambda) * self.geometry.rx_phase(l, t.azimuth);
            z += self.waveforms.beam(&self.geometry, t.azimuth) * coef;
        }
        z
    }

    /// Jammer contribution at receive antenna `l` (zero without a jammer).
    pub fn jammer_component(&self, l: usize) -> CVector<T> {
        match &self.jammer {
            None => CVector::zeros(self.waveforms.snapshots()),
            Some(j) => {
                let coef = range_phase(j.range, self.geometry.wavelength(), 1)
                    * self.geometry.rx_phase(l, j.azimuth)
                    * j.beta;
                &j.waveform * coef
            }
        }
    }
}

/// Mean per-sample power of the noiseless target echoes, averaged over
/// snapshots and receive antennas.
pub fn mean_signal_power<T: Real>(
    targets: &[Target<T>],
    geometry: &ArrayGeometry<T>,
    waveforms: &WaveformMatrix<T>,
) -> T {
    let scene = Scene {
        geometry: geometry.clone(),
        waveforms: waveforms.clone(),
        targets: targets.to_vec(),
        jammer: None,
        noise: NoiseModel::silent(),
    };
    let total = (0..geometry.rx_count()).fold(T::zero(), |acc, l| acc + norm_sqr(&scene.target_component(l)));
    total / lit((geometry.rx_count() * waveforms.snapshots()) as f64)
}

/// Noise variance that puts the target echoes `snr_db` decibels above the
/// noise floor.
pub fn snr_to_sigma<T: Real>(
    targets: &[Target<T>],
    geometry: &ArrayGeometry<T>,
    waveforms: &WaveformMatrix<T>,
    snr_db: T,
) -> Result<T> {
    if targets.is_empty() {
        return Err(Error::arg("targets", "SNR needs at least one target"));
    }
    if !snr_db.is_finite() {
        return Err(Error::arg("snr_db", "must be finite"));
    }
    let p = mean_signal_power(targets, geometry, waveforms);
    if !(p > T::zero()) {
        return Err(Error::ZeroSignal);
    }
    Ok(p / lit::<T>(10.0).powf(snr_db / lit(10.0)))
}

/// Received data at every receive antenna, one length-L vector each. Noise
/// for antenna `l` is drawn from `noise_rng(l)`.
pub fn synthesize_received<T: Real, R: Rng, F: FnMut(usize) -> R>(
    scene: &Scene<T>,
    mut noise_rng: F,
) -> Result<Vec<CVector<T>>> {
    scene.validate()?;
    let l_len = scene.waveforms.snapshots();
    Ok((0..scene.geometry.rx_count())
        .map(|l| {
            let mut z = scene.target_component(l) + scene.jammer_component(l);
            if scene.noise.variance > T::zero() {
                let mut rng = noise_rng(l);
                z += scene.noise.sample(l_len, &mut rng);
            }
            z
        })
        .collect())
}
