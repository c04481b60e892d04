//! Scalar abstraction shared by every numeric module.
//!
//! All signal-model, recovery and baseline code is written against [`Real`],
//! which is satisfied by `f32` and `f64` (anything nalgebra treats as a real
//! field and that is `Copy`). Complex samples are `Complex<T>`.

use nalgebra::RealField;
use num_complex::Complex;

/// Real scalar used throughout the crate.
pub trait Real: RealField + Copy {}

impl<T: RealField + Copy> Real for T {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Converts a `T` back into `f64` (lossless for `f32`/`f64`).
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_subset_unchecked()
}

/// `e^{jθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Complex modulus.
#[inline]
pub fn modulus<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Phase `e^{-j 2π · passes · d / λ}` for a propagation path of `passes`
/// traversals of range `d`.
///
/// The cycle count is reduced modulo one before scaling by 2π so the phase
/// stays accurate for ranges of many thousands of wavelengths.
pub fn range_phase<T: Real>(range: T, wavelength: T, passes: u32) -> Complex<T> {
    let cycles = to_f64(range) / to_f64(wavelength) * f64::from(passes);
    let frac = cycles - cycles.floor();
    cis(lit::<T>(-std::f64::consts::TAU * frac))
}

pub fn deg_to_rad<T: Real>(deg: T) -> T {
    deg * T::pi() / lit(180.0)
}

pub fn rad_to_deg<T: Real>(rad: T) -> T {
    rad * lit(180.0) / T::pi()
}
