//! Scalar abstraction shared by every numerical module.
//!
//! All algebra, tensor and matrix-function code is generic over a real
//! floating point type `R`; the working field is always `Complex<R>`.
//! Concrete aliases for `f64` and `f32` live at the crate root.

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating point type backing the complex working field.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {
    /// Name recorded in report fingerprints.
    const PRECISION: &'static str;
    /// Tolerance for identities that hold to a few ulps of the working precision.
    const TIGHT_TOL: f64;
    /// Tolerance for identities that go through a decomposition or a linear solve.
    const LOOSE_TOL: f64;
    /// Eigenvalues closer than this (relative to the matrix scale) are treated as one.
    const CLUSTER_TOL: f64;
    const EPSILON: f64;

    /// Converts an `f64` literal. Out-of-range values saturate to infinity.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn infinity() -> Self {
        Self::lit(f64::INFINITY)
    }
}

impl Real for f64 {
    const PRECISION: &'static str = "f64";
    const TIGHT_TOL: f64 = 1e-12;
    const LOOSE_TOL: f64 = 1e-9;
    const CLUSTER_TOL: f64 = 1e-8;
    const EPSILON: f64 = f64::EPSILON;
}

impl Real for f32 {
    const PRECISION: &'static str = "f32";
    const TIGHT_TOL: f64 = 1e-5;
    const LOOSE_TOL: f64 = 1e-3;
    const CLUSTER_TOL: f64 = 1e-3;
    const EPSILON: f64 = f32::EPSILON as f64;
}

/// Complex working scalar.
pub type Cx<R> = Complex<R>;
/// Dense complex matrix.
pub type Mat<R> = DMatrix<Cx<R>>;
/// Coefficient vector of a Lie algebra element (or any dense complex vector).
pub type Coeffs<R> = DVector<Cx<R>>;

#[inline]
pub fn cx<R: Real>(re: f64, im: f64) -> Cx<R> {
    Complex::new(R::lit(re), R::lit(im))
}

#[inline]
pub fn re<R: Real>(x: f64) -> Cx<R> {
    Complex::new(R::lit(x), R::zero())
}

/// Converts a complex number between precisions.
#[inline]
pub fn cast_cx<R: Real>(z: Complex<f64>) -> Cx<R> {
    Complex::new(R::lit(z.re), R::lit(z.im))
}

#[inline]
pub fn to_c64<R: Real>(z: Cx<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
}

/// Modulus of a complex number.
#[inline]
pub fn modulus<R: Real>(z: Cx<R>) -> R {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// Largest entry modulus of a matrix (zero for an empty matrix).
pub fn max_abs<R: Real>(m: &Mat<R>) -> R {
    m.iter().fold(R::zero(), |acc, z| acc.max(modulus(*z)))
}

/// Largest entry modulus of a vector or any iterator of complex values.
pub fn max_abs_iter<'a, R: Real>(it: impl IntoIterator<Item = &'a Cx<R>>) -> R {
    it.into_iter().fold(R::zero(), |acc, z| acc.max(modulus(*z)))
}
