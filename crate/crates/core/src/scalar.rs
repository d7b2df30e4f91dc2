//! Real scalar abstraction. Every matrix in the crate has entries in
//! `Complex<T>` for some `T: Real`; `f64` is the working precision and
//! `f32` is supported for the exact (non-rank-deciding) parts.

use std::fmt::Debug;

use nalgebra::{Complex, DMatrix, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point type usable as the real part of matrix entries.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Debug + Send + Sync {
    /// Singular values of `a` in decreasing order.
    fn singular_values(a: &DMatrix<Complex<Self>>) -> Vec<Self>;

    /// Thin SVD `a = U Σ V*`: the singular values in decreasing order and
    /// `V` (`cols × min(rows, cols)`).
    fn thin_svd_v(a: &DMatrix<Complex<Self>>) -> (Vec<Self>, DMatrix<Complex<Self>>);

    /// `a · b` through the blocked kernels; for the large products.
    fn matmul(a: &DMatrix<Complex<Self>>, b: &DMatrix<Complex<Self>>) -> DMatrix<Complex<Self>>;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn singular_values(a: &DMatrix<Complex<$t>>) -> Vec<$t> {
                let (m, k) = a.shape();
                if m == 0 || k == 0 {
                    return Vec::new();
                }
                let fa = to_faer(a);
                fa.singular_values()
                    .or_else(|_| fa.adjoint().to_owned().singular_values())
                    .unwrap_or_else(|_| gram_svd(&fa).0)
            }

            fn thin_svd_v(a: &DMatrix<Complex<$t>>) -> (Vec<$t>, DMatrix<Complex<$t>>) {
                let (m, k) = a.shape();
                let r = m.min(k);
                if r == 0 {
                    return (Vec::new(), DMatrix::zeros(k, 0));
                }
                let fa = to_faer(a);
                let (sv, v) = match fa.thin_svd() {
                    Ok(svd) => (svd.S().column_vector().iter().map(|z| z.re).collect(), svd.V().to_owned()),
                    // A* = V Σ U*, so the left factor of A* is V
                    Err(_) => match fa.adjoint().to_owned().thin_svd() {
                        Ok(svd) => (svd.S().column_vector().iter().map(|z| z.re).collect(), svd.U().to_owned()),
                        Err(_) => gram_svd(&fa),
                    },
                };
                (sv, DMatrix::from_fn(k, r, |i, j| v[(i, j)]))
            }

            fn matmul(a: &DMatrix<Complex<$t>>, b: &DMatrix<Complex<$t>>) -> DMatrix<Complex<$t>> {
                assert_eq!(a.ncols(), b.nrows(), "matmul shapes");
                let fa = faer::MatRef::from_column_major_slice(a.as_slice(), a.nrows(), a.ncols());
                let fb = faer::MatRef::from_column_major_slice(b.as_slice(), b.nrows(), b.ncols());
                let mut out = DMatrix::zeros(a.nrows(), b.ncols());
                let (m, n) = out.shape();
                let fo = faer::MatMut::from_column_major_slice_mut(out.as_mut_slice(), m, n);
                faer::linalg::matmul::matmul(fo, faer::Accum::Replace, fa, fb, Complex::new(1.0, 0.0), faer::get_global_parallelism());
                out
            }
        }
    };
}

fn to_faer<T: RealField + Copy>(a: &DMatrix<Complex<T>>) -> faer::Mat<Complex<T>>
where
    Complex<T>: faer::traits::ComplexField,
{
    assert!(a.iter().all(|z| z.re.is_finite() && z.im.is_finite()), "SVD of a non-finite matrix");
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Last-resort thin SVD through the eigendecomposition of `A*A`. Singular
/// values below `sqrt(ε)·σ_max` lose their relative accuracy.
fn gram_svd<T>(a: &faer::Mat<Complex<T>>) -> (Vec<T>, faer::Mat<Complex<T>>)
where
    T: RealField + Copy,
    Complex<T>: faer::traits::ComplexField<Real = T>,
{
    let r = a.nrows().min(a.ncols());
    let gram = a.adjoint() * a;
    let evd = gram.self_adjoint_eigen(faer::Side::Lower).expect("Hermitian eigensolver converges");
    let (s, u) = (evd.S().column_vector().to_owned(), evd.U());
    let k = a.ncols();
    let sv = (0..r).map(|i| s[k - 1 - i].re.max(T::zero()).sqrt()).collect();
    (sv, faer::Mat::from_fn(k, r, |i, j| u[(i, k - 1 - j)]))
}

impl_real!(f32);
impl_real!(f64);

/// Runs every decomposition on the calling thread. Callers that parallelize
/// over independent problems use this to keep results bit-reproducible.
pub fn use_sequential_kernels() {
    faer::set_global_parallelism(faer::Par::Seq);
}

/// Converts an `f64` literal or tolerance into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

#[inline]
pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// Modulus of a complex number.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.norm_sqr().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_fallback_matches_the_direct_svd() {
        let a = DMatrix::from_fn(5, 3, |i, j| Complex::new((i * 3 + j) as f64 * 0.37 - 1.0, ((i + 2 * j) % 4) as f64 * 0.5));
        let (sv, v) = f64::thin_svd_v(&a);
        let (gs, gv) = gram_svd(&to_faer(&a));
        for i in 0..3 {
            assert!((sv[i] - gs[i]).abs() < 1e-10 * sv[0]);
            // right singular vectors agree up to phase
            let overlap: Complex<f64> = (0..3).map(|r| v[(r, i)].conj() * gv[(r, i)]).sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-8);
        }
    }
}
