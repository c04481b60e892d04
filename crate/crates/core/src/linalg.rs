//! Small dense complex helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::scalar::{lit, modulus, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// Orthonormalizes the columns of a tall (or square) matrix with a
/// Householder QR. Column `k` of the result spans the same space as the
/// first `k + 1` input columns.
pub fn orthonormal_columns<T: Real>(m: CMatrix<T>) -> CMatrix<T> {
    assert!(m.nrows() >= m.ncols(), "need rows >= cols for orthonormal columns");
    m.qr().q()
}

/// Orthonormalizes the rows of a wide (or square) matrix.
pub fn orthonormal_rows<T: Real>(m: CMatrix<T>) -> CMatrix<T> {
    orthonormal_columns(m.adjoint()).adjoint()
}

/// Largest entrywise deviation of `AᴴA` from the identity.
pub fn gram_deviation<T: Real>(m: &CMatrix<T>) -> T {
    let g = m.adjoint() * m;
    let mut worst = T::zero();
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { lit(1.0) } else { T::zero() };
            let d = modulus(g[(i, j)] - Complex::new(target, T::zero()));
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn norm_sqr<T: Real>(v: &CVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// Max complex modulus of a vector (zero for an empty vector).
pub fn inf_norm<T: Real>(v: &CVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, z| {
        let m = modulus(*z);
        if m > acc {
            m
        } else {
            acc
        }
    })
}

/// Sum of complex moduli.
pub fn l1_norm<T: Real>(v: &CVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + modulus(*z))
}
