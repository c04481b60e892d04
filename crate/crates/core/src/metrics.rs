//! Spectrum quality and jammer-suppression metrics.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::cs::{draw_measurement, MeasurementKind};
use crate::error::{Error, Result};
use crate::geometry::{generate_waveforms, ArrayGeometry, Jammer, Target};
use crate::linalg::{norm_sqr, CVector};
use crate::rng::{derive_stream, Purpose, StreamKey};
use crate::scalar::{lit, modulus, range_phase, to_f64, Real};

/// Peak-to-ripple ratio: energy at the target indices over the energy
/// everywhere else. Returns `+∞` when the ripple is exactly zero.
pub fn prr<T: Real>(magnitudes: &[T], targets: &[usize]) -> Result<T> {
    if targets.is_empty() {
        return Err(Error::arg("targets", "PRR needs at least one target index"));
    }
    if let Some(&bad) = targets.iter().find(|&&i| i >= magnitudes.len()) {
        return Err(Error::arg(
            "targets",
            format!("index {bad} out of range for {} bins", magnitudes.len()),
        ));
    }
    if magnitudes.iter().any(|m| !(*m >= T::zero())) {
        return Err(Error::arg("spectrum", "magnitudes must be non-negative"));
    }
    let mut on = vec![false; magnitudes.len()];
    for &i in targets {
        on[i] = true;
    }
    let (peak, ripple) = magnitudes
        .iter()
        .zip(&on)
        .fold((T::zero(), T::zero()), |(p, r), (m, &t)| {
            if t {
                (p + *m * *m, r)
            } else {
                (p, r + *m * *m)
            }
        });
    if ripple > T::zero() {
        Ok(peak / ripple)
    } else if peak > T::zero() {
        Ok(lit(f64::INFINITY))
    } else {
        Err(Error::UndefinedPrr("spectrum is zero at every bin".into()))
    }
}

/// `10·log₁₀` of a power ratio.
pub fn to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Closed-form SJR after compression: `Mₜ Σ|βₖ|² / |β|²` for plain
/// measurements and `L Σ|βₖ|² / |β|²` for matched ones.
pub fn theoretical_sjr<T: Real>(
    tx_count: usize,
    snapshots: usize,
    target_betas: &[Complex<T>],
    jammer_beta: Complex<T>,
    kind: MeasurementKind,
) -> Result<T> {
    let pj = jammer_beta.norm_sqr();
    if !(pj > T::zero()) {
        return Err(Error::arg("jammer.beta", "jammer amplitude must be non-zero"));
    }
    let ps = target_betas.iter().fold(T::zero(), |a, b| a + b.norm_sqr());
    let gain = match kind {
        MeasurementKind::Plain => tx_count,
        MeasurementKind::Matched => snapshots,
    };
    Ok(lit::<T>(gain as f64) * ps / pj)
}

/// Fixed part of an SJR experiment. Each trial redraws the waveforms, the
/// jammer waveform and the measurement matrices; the geometry stays put.
#[derive(Debug, Clone)]
pub struct SjrSetup<T: Real> {
    pub geometry: ArrayGeometry<T>,
    pub targets: Vec<Target<T>>,
    pub jammer_range: T,
    pub jammer_azimuth: T,
    pub jammer_beta: Complex<T>,
    pub snapshots: usize,
    pub measurements: usize,
    pub kind: MeasurementKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct SjrReport {
    pub kind: MeasurementKind,
    pub trials: usize,
    /// Mean compressed target power per antenna.
    pub p_s: f64,
    pub p_s_stderr: f64,
    /// Mean compressed jammer power per antenna.
    pub p_j: f64,
    pub p_j_stderr: f64,
    pub sjr_empirical: f64,
    pub sjr_theoretical: f64,
    /// Diagonal (per-target) part of `p_s`.
    pub c1: f64,
    pub c1_stderr: f64,
    /// Cross-target part of `p_s`; `p_s = c1 + c2`.
    pub c2: f64,
    pub c2_stderr: f64,
}

impl SjrReport {
    pub fn sjr_empirical_db(&self) -> f64 {
        to_db(self.sjr_empirical)
    }

    pub fn sjr_theoretical_db(&self) -> f64 {
        to_db(self.sjr_theoretical)
    }
}

#[derive(Clone, Copy, Default)]
struct TrialPowers {
    ps: f64,
    pj: f64,
    c1: f64,
    c2: f64,
}

fn sjr_trial<T: Real>(setup: &SjrSetup<T>, master: u64, trial: u64) -> Result<TrialPowers> {
    let g = &setup.geometry;
    let lambda = g.wavelength();
    let x = generate_waveforms(
        g.tx_count(),
        setup.snapshots,
        true,
        &mut derive_stream(master, StreamKey::new(trial, Purpose::Waveform)),
    )?;
    let b = Jammer::<T>::gaussian_waveform(
        setup.snapshots,
        &mut derive_stream(master, StreamKey::new(trial, Purpose::JammerWaveform)),
    );
    let beams: Vec<CVector<T>> = setup
        .targets
        .iter()
        .map(|t| x.beam(g, t.azimuth) * (range_phase(t.range, lambda, 2) * t.beta))
        .collect();
    let jam_range = range_phase(setup.jammer_range, lambda, 1) * setup.jammer_beta;

    let mut acc = TrialPowers::default();
    for l in 0..g.rx_count() {
        let mut rng = derive_stream(master, StreamKey::new(trial, Purpose::Measurement).antenna(l));
        let phi = draw_measurement(setup.kind, setup.measurements, &x, &mut rng)?;
        let parts: Vec<CVector<T>> = setup
            .targets
            .iter()
            .zip(&beams)
            .map(|(t, beam)| &phi.effective * beam * g.rx_phase(l, t.azimuth))
            .collect();
        let total = parts.iter().fold(CVector::zeros(phi.rows()), |a, p| a + p);
        let ps = to_f64(norm_sqr(&total));
        let c1 = parts.iter().map(|p| to_f64(norm_sqr(p))).sum::<f64>();
        let jam = &phi.effective * &b * (jam_range * g.rx_phase(l, setup.jammer_azimuth));
        acc.ps += ps;
        acc.c1 += c1;
        acc.c2 += ps - c1;
        acc.pj += to_f64(norm_sqr(&jam));
    }
    let nr = g.rx_count() as f64;
    Ok(TrialPowers {
        ps: acc.ps / nr,
        pj: acc.pj / nr,
        c1: acc.c1 / nr,
        c2: acc.c2 / nr,
    })
}

fn mean_stderr(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Monte-Carlo estimate of the compressed signal and jammer powers. Trials
/// run in parallel on streams derived from `(master, trial)`, so the report
/// does not depend on the thread count.
pub fn empirical_sjr<T: Real>(setup: &SjrSetup<T>, trials: usize, master: u64) -> Result<SjrReport> {
    if trials == 0 {
        return Err(Error::arg("trials", "must be at least 1"));
    }
    if !(modulus(setup.jammer_beta) > T::zero()) {
        return Err(Error::arg("jammer.beta", "jammer amplitude must be non-zero"));
    }
    if setup.targets.is_empty() {
        return Err(Error::arg("targets", "SJR needs at least one target"));
    }
    let betas: Vec<_> = setup.targets.iter().map(|t| t.beta).collect();
    let theory = theoretical_sjr(
        setup.geometry.tx_count(),
        setup.snapshots,
        &betas,
        setup.jammer_beta,
        setup.kind,
    )?;
    let per_trial = (0..trials as u64)
        .into_par_iter()
        .map(|t| sjr_trial(setup, master, t))
        .collect::<Result<Vec<_>>>()?;
    let (p_s, p_s_stderr) = mean_stderr(per_trial.iter().map(|p| p.ps));
    let (p_j, p_j_stderr) = mean_stderr(per_trial.iter().map(|p| p.pj));
    let (c1, c1_stderr) = mean_stderr(per_trial.iter().map(|p| p.c1));
    let (c2, c2_stderr) = mean_stderr(per_trial.iter().map(|p| p.c2));
    Ok(SjrReport {
        kind: setup.kind,
        trials,
        p_s,
        p_s_stderr,
        p_j,
        p_j_stderr,
        sjr_empirical: p_s / p_j,
        sjr_theoretical: to_f64(theory),
        c1,
        c1_stderr,
        c2,
        c2_stderr,
    })
}
