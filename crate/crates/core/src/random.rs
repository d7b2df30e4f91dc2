//! Seeded random generation of complex test data.

use nalgebra::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linop::{CMat, CVec, OperatorSubspace};
use crate::scalar::{lit, Real};

/// Standard complex Gaussian (`E|z|² = 1`).
pub fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(lit(re * std::f64::consts::FRAC_1_SQRT_2), lit(im * std::f64::consts::FRAC_1_SQRT_2))
}

pub fn matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat<T> {
    CMat::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn vector<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec<T> {
    CVec::from_fn(n, |_, _| gaussian(rng))
}

pub fn unit_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec<T> {
    let v: CVec<T> = vector(rng, n);
    let nrm = v.norm();
    v / Complex::new(nrm, T::zero())
}

/// Haar-ish unitary from the QR factor of a Gaussian matrix.
pub fn unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat<T> {
    matrix::<T, R>(rng, n, n).qr().q()
}

/// Gaussian combination of the orthonormal basis of `s`.
pub fn element<T: Real, R: Rng + ?Sized>(rng: &mut R, s: &OperatorSubspace<T>) -> CMat<T> {
    let c: CVec<T> = vector(rng, s.dim());
    let v = s.coords() * c;
    crate::linop::unvectorize(v.as_slice(), s.ambient())
}
