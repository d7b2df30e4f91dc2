//! Finite-dimensional and level-truncated models of semicrossed products of
//! operator algebras: Fourier/Fejér decompositions of block operators,
//! commutants and bicommutants, reflexive covers, one-point algebras of
//! finite dynamical systems and ℓ¹ convolution algebras.
//!
//! All numerics are generic over the real scalar type (`f64` or `f32`);
//! the aliases at the crate root fix `f64`.

pub mod error;
pub mod graded;
pub mod io;
pub mod l1conv;
pub mod linop;
pub mod orbit;
pub mod random;
pub mod reflexivity;
pub mod semicrossed;
pub mod scalar;

pub use error::{Error, Result};
pub use nalgebra::Complex;
pub use scalar::Real;

pub type CMatrix = linop::CMat<f64>;
pub type Subspace = linop::OperatorSubspace<f64>;
