//! Dynamical r-matrices over self-dual Lie algebras: structure constants,
//! special functions, matrix functions of `ad`, the classical dynamical
//! Yang-Baxter equations on the algebra and on the group, and Poisson
//! brackets on the associated phase spaces.
//!
//! Everything is generic over the real scalar `R` (`f32` or `f64`); the
//! aliases below fix it to one precision.

pub mod document;
pub mod error;
pub mod liealg;
pub mod linalg;
pub mod poisson;
pub mod rmatrix;
pub mod scalar;
pub mod specfun;
pub mod suite;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type LieAlgebra64 = liealg::LieAlgebra<f64>;
pub type LieAlgebra32 = liealg::LieAlgebra<f32>;
pub type GroupElement64 = liealg::GroupElement<f64>;
pub type GroupElement32 = liealg::GroupElement<f32>;
pub type SpectralFunction64 = specfun::SpectralFunction<f64>;
pub type SpectralFunction32 = specfun::SpectralFunction<f32>;
pub type RMatrixFamily64 = rmatrix::RMatrixFamily<f64>;
pub type RMatrixFamily32 = rmatrix::RMatrixFamily<f32>;
pub type TwoTensor64 = tensor::TwoTensor<f64>;
pub type TwoTensor32 = tensor::TwoTensor<f32>;
pub type ThreeTensor64 = tensor::ThreeTensor<f64>;
pub type ThreeTensor32 = tensor::ThreeTensor<f32>;
pub type PhasePoint64 = poisson::PhasePoint<f64>;
pub type PhasePoint32 = poisson::PhasePoint<f32>;
