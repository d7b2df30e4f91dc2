//! Operators on `C^d ⊗ C^N` viewed as `N × N` arrays of `d × d` blocks.
//!
//! Row index `κ·d + i` is component `i` at level `κ`, so block `(κ, λ)` is
//! the matrix element `T_{κ,λ}` with `⟨T_{κ,λ}ξ, η⟩ = ⟨T(ξ⊗e_λ), η⊗e_κ⟩`.
//! The shift `v` acts by `e_n ↦ e_{n+1}` and annihilates the last level.

use std::f64::consts::PI;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::linop::{frobenius, identity, pattern_space, CMat, OperatorSubspace};
use crate::scalar::{czero, lit, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct GradedOperator<T: Real> {
    block_dim: usize,
    levels: usize,
    matrix: CMat<T>,
}

/// Result of the quadrature route for a Fourier coefficient.
#[derive(Clone, Debug)]
pub struct Quadrature<T: Real> {
    pub op: GradedOperator<T>,
    pub nodes: usize,
    /// Fewer than `2N` nodes: neighbouring diagonals may alias.
    pub precision_warning: bool,
}

impl<T: Real> GradedOperator<T> {
    pub fn new(block_dim: usize, levels: usize, matrix: CMat<T>) -> Result<Self> {
        let n = block_dim * levels;
        if matrix.shape() != (n, n) {
            return Err(Error::Shape(format!(
                "graded operator with d={block_dim}, N={levels} needs a {n}x{n} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { block_dim, levels, matrix })
    }

    pub fn zero(block_dim: usize, levels: usize) -> Self {
        let n = block_dim * levels;
        Self { block_dim, levels, matrix: CMat::zeros(n, n) }
    }

    pub fn identity(block_dim: usize, levels: usize) -> Self {
        Self { block_dim, levels, matrix: identity(block_dim * levels) }
    }

    /// `x ⊗ v^k`: block `(λ + k, λ)` equals `x`.
    pub fn shifted(x: &CMat<T>, levels: usize, k: usize) -> Result<Self> {
        if !x.is_square() {
            return Err(Error::Shape("block must be square".into()));
        }
        let d = x.nrows();
        let mut op = Self::zero(d, levels);
        for lam in 0..levels.saturating_sub(k) {
            op.matrix.view_mut(((lam + k) * d, lam * d), (d, d)).copy_from(x);
        }
        Ok(op)
    }

    /// `V = 1 ⊗ v`.
    pub fn shift(block_dim: usize, levels: usize) -> Self {
        Self::shifted(&identity(block_dim), levels, 1).expect("identity is square")
    }

    /// `b ⊗ 1`.
    pub fn ampliate(b: &CMat<T>, levels: usize) -> Result<Self> {
        Self::shifted(b, levels, 0)
    }

    /// `Σ_k blocks[k] ⊗ p_k`.
    pub fn block_diagonal(blocks: &[CMat<T>]) -> Result<Self> {
        let d = blocks.first().map(|b| b.nrows()).unwrap_or(0);
        let mut op = Self::zero(d, blocks.len());
        for (k, b) in blocks.iter().enumerate() {
            op.set_block(k, k, b)?;
        }
        Ok(op)
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn dim(&self) -> usize {
        self.block_dim * self.levels
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat<T> {
        self.matrix
    }

    fn check_index(&self, kappa: usize, lambda: usize) -> Result<()> {
        if kappa >= self.levels || lambda >= self.levels {
            return Err(Error::Index(format!("block ({kappa},{lambda}) with {} levels", self.levels)));
        }
        Ok(())
    }

    /// The matrix element `T_{κ,λ}`.
    pub fn block(&self, kappa: usize, lambda: usize) -> Result<CMat<T>> {
        self.check_index(kappa, lambda)?;
        let d = self.block_dim;
        Ok(self.matrix.view((kappa * d, lambda * d), (d, d)).into_owned())
    }

    pub fn set_block(&mut self, kappa: usize, lambda: usize, x: &CMat<T>) -> Result<()> {
        self.check_index(kappa, lambda)?;
        let d = self.block_dim;
        if x.shape() != (d, d) {
            return Err(Error::Shape(format!("block must be {d}x{d}")));
        }
        self.matrix.view_mut((kappa * d, lambda * d), (d, d)).copy_from(x);
        Ok(())
    }

    fn check_grading(&self, other: &Self) -> Result<()> {
        if self.block_dim != other.block_dim || self.levels != other.levels {
            return Err(Error::Shape(format!(
                "grading (d={}, N={}) vs (d={}, N={})",
                self.block_dim, self.levels, other.block_dim, other.levels
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_grading(other)?;
        Ok(Self { matrix: &self.matrix * &other.matrix, ..*self })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_grading(other)?;
        Ok(Self { matrix: &self.matrix + &other.matrix, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_grading(other)?;
        Ok(Self { matrix: &self.matrix - &other.matrix, ..*self })
    }

    pub fn scaled(&self, s: Complex<T>) -> Self {
        Self { matrix: &self.matrix * s, ..*self }
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), ..*self }
    }

    pub fn frobenius(&self) -> T {
        frobenius(&self.matrix)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::identity(self.block_dim, self.levels);
        for _ in 0..k {
            out.matrix = &out.matrix * &self.matrix;
        }
        out
    }

    /// Level difference `κ − λ` of the block containing entry `(r, c)`.
    fn diagonal_of(&self, r: usize, c: usize) -> i64 {
        (r / self.block_dim) as i64 - (c / self.block_dim) as i64
    }

    /// The `m`-th Fourier coefficient `G_m(T)`: the `m`-th block diagonal.
    /// Zero when `|m| ≥ N`.
    pub fn fourier_gm(&self, m: i64) -> Self {
        let mut out = self.clone();
        for c in 0..self.dim() {
            for r in 0..self.dim() {
                if self.diagonal_of(r, c) != m {
                    out.matrix[(r, c)] = czero();
                }
            }
        }
        out
    }

    /// `G_m(T)` as the equispaced average of `U_s T U_s* e^{-ims}` over
    /// `nodes` points of the circle, `U_s(ξ ⊗ e_n) = e^{ins} ξ ⊗ e_n`.
    /// Zero when `|m| ≥ N`, where the rule would alias a lower diagonal.
    pub fn fourier_gm_quadrature(&self, m: i64, nodes: usize) -> Quadrature<T> {
        let n = self.dim();
        let mut acc = CMat::<T>::zeros(n, n);
        let precision_warning = nodes < 2 * self.levels;
        if m.unsigned_abs() as usize >= self.levels {
            return Quadrature { op: Self { matrix: acc, ..*self }, nodes, precision_warning };
        }
        for j in 0..nodes {
            let s = 2.0 * PI * j as f64 / nodes as f64;
            let u = CMat::<T>::from_fn(n, n, |r, c| {
                if r == c {
                    let level = (r / self.block_dim) as f64;
                    Complex::new(lit((level * s).cos()), lit((level * s).sin()))
                } else {
                    czero()
                }
            });
            let weight = Complex::new(lit((m as f64 * s).cos()), lit(-(m as f64 * s).sin()));
            acc += (&u * &self.matrix * u.adjoint()) * weight;
        }
        let op = Self { matrix: acc * Complex::new(lit::<T>(1.0 / nodes as f64), T::zero()), ..*self };
        Quadrature { op, nodes, precision_warning }
    }

    /// Default node count for the quadrature route.
    pub fn default_nodes(&self) -> usize {
        4 * self.levels
    }

    /// The diagonal operator `T_(m)`: `Σ_n T_{m+n,n} ⊗ p_n` for `m ≥ 0`,
    /// `Σ_n T_{n,n-m} ⊗ p_n` for `m < 0`.
    pub fn diagonal_part(&self, m: i64) -> Self {
        let mut out = Self::zero(self.block_dim, self.levels);
        let shift = m.unsigned_abs() as usize;
        for n in 0..self.levels.saturating_sub(shift) {
            let b = if m >= 0 { self.block(n + shift, n) } else { self.block(n, n + shift) };
            out.set_block(n, n, &b.expect("in range")).expect("in range");
        }
        out
    }

    /// Cesàro mean `σ_l(T)(0) = Σ_{|m| ≤ l} (1 − |m|/(l+1)) G_m(T)`.
    pub fn fejer_sum(&self, l: usize) -> Self {
        let mut out = Self::zero(self.block_dim, self.levels);
        let top = l.min(self.levels.saturating_sub(1)) as i64;
        for m in -top..=top {
            let w = 1.0 - m.unsigned_abs() as f64 / (l as f64 + 1.0);
            out.matrix += self.fourier_gm(m).matrix * Complex::new(lit::<T>(w), T::zero());
        }
        out
    }

    /// `Σ_m |m| ‖G_m(T)‖_F / (l + 1)`, which equals the Frobenius-norm
    /// triangle bound on `‖σ_l(T)(0) − T‖_F` once `l ≥ N − 1`.
    pub fn fejer_error_bound(&self, l: usize) -> T {
        let top = self.levels as i64 - 1;
        let mut s = T::zero();
        for m in -top..=top {
            s += lit::<T>(m.unsigned_abs() as f64) * self.fourier_gm(m).frobenius();
        }
        s / lit(l as f64 + 1.0)
    }

    /// Compression to the first `k` levels.
    pub fn compress(&self, k: usize) -> Result<Self> {
        if k > self.levels {
            return Err(Error::Index(format!("cannot compress {} levels to {k}", self.levels)));
        }
        let n = k * self.block_dim;
        Ok(Self { block_dim: self.block_dim, levels: k, matrix: self.matrix.view((0, 0), (n, n)).into_owned() })
    }

    /// Largest Frobenius norm of a block strictly above the block diagonal.
    pub fn upper_mass(&self) -> T {
        let mut worst = T::zero();
        for m in 1..self.levels as i64 {
            worst = worst.max(self.fourier_gm(-m).frobenius());
        }
        worst
    }
}

/// `p_k`-compression onto level `k` as a projection on `C^d ⊗ C^N`.
pub fn level_projection<T: Real>(block_dim: usize, levels: usize, k: usize) -> GradedOperator<T> {
    let mut p = GradedOperator::zero(block_dim, levels);
    p.set_block(k, k, &identity(block_dim)).expect("level in range");
    p
}

/// The block lower-triangular operators `𝔗` on `N` levels.
pub fn block_lower_pattern<T: Real>(block_dim: usize, levels: usize) -> OperatorSubspace<T> {
    pattern_space(block_dim * levels, |i, j| i / block_dim >= j / block_dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use crate::scalar::cone;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type G = GradedOperator<f64>;

    fn random_graded(rng: &mut ChaCha8Rng, d: usize, n: usize) -> G {
        G::new(d, n, random::matrix(rng, d * n, d * n)).unwrap()
    }

    #[test]
    fn matrix_element_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b: CMat<f64> = random::matrix(&mut rng, 2, 2);
        let t = G::ampliate(&b, 3).unwrap();
        for k in 0..3 {
            for l in 0..3 {
                let blk = t.block(k, l).unwrap();
                if k == l {
                    assert_eq!(blk, b);
                } else {
                    assert!(frobenius(&blk) == 0.0);
                }
            }
        }
        let v = G::shift(2, 4);
        assert_eq!(v.block(2, 1).unwrap(), identity(2));
        assert!(frobenius(&v.block(1, 2).unwrap()) == 0.0);
        assert!(v.block(4, 0).is_err());

        // W = w* ⊗ v: (W²)_{λ+2,λ} = (w*)²
        let w: CMat<f64> = random::unitary(&mut rng, 2);
        let big_w = G::shifted(&w.adjoint(), 4, 1).unwrap();
        let w2 = big_w.pow(2);
        let expected = w.adjoint() * w.adjoint();
        for lam in 0..2 {
            assert!(frobenius(&(w2.block(lam + 2, lam).unwrap() - &expected)) < 1e-14);
        }
    }

    #[test]
    fn fourier_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b: CMat<f64> = random::matrix(&mut rng, 2, 2);
        let t = G::ampliate(&b, 4).unwrap();
        assert_eq!(t.fourier_gm(0), t);
        for m in [-3, -1, 1, 2, 3] {
            assert_eq!(t.fourier_gm(m).frobenius(), 0.0);
        }
        let v = G::shift(2, 4);
        let v_plus_v2 = v.add(&v.pow(2)).unwrap();
        assert_eq!(v_plus_v2.fourier_gm(1), v);
        assert_eq!(t.fourier_gm(4).frobenius(), 0.0);
        assert_eq!(t.fourier_gm(-7).frobenius(), 0.0);
    }

    #[test]
    fn reassembly_on_random_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_graded(&mut rng, 2, 3);
        let mut sum = G::zero(2, 3);
        for m in -2..=2 {
            sum = sum.add(&t.fourier_gm(m)).unwrap();
        }
        assert!(sum.sub(&t).unwrap().frobenius() < 1e-14);
    }

    #[test]
    fn quadrature_examples() {
        let v = G::shift(1, 4);
        let q = v.fourier_gm_quadrature(1, 16);
        assert!(!q.precision_warning);
        assert!(q.op.sub(&v).unwrap().frobenius() < 1e-13);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b: CMat<f64> = random::matrix(&mut rng, 3, 3);
        let t = G::ampliate(&b, 4).unwrap();
        assert!(t.fourier_gm_quadrature(0, 8).op.sub(&t).unwrap().frobenius() < 1e-13);

        let t = random_graded(&mut rng, 2, 4);
        for m in -4..=4 {
            let q = t.fourier_gm_quadrature(m, t.default_nodes());
            assert!(q.op.sub(&t.fourier_gm(m)).unwrap().frobenius() <= 1e-12);
        }
        assert!(t.fourier_gm_quadrature(0, 5).precision_warning);
    }

    #[test]
    fn fejer_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b: CMat<f64> = random::matrix(&mut rng, 2, 2);
        let t = G::ampliate(&b, 5).unwrap();
        for l in [0, 1, 7, 100] {
            assert!(t.fejer_sum(l).sub(&t).unwrap().frobenius() < 1e-14);
        }
        let v = G::shift(2, 5);
        for l in [1usize, 3, 10] {
            let expected = v.scaled(Complex::new(1.0 - 1.0 / (l as f64 + 1.0), 0.0));
            assert!(v.fejer_sum(l).sub(&expected).unwrap().frobenius() < 1e-14);
        }
    }

    /// The literal double sum `1/(l+1) Σ_{n≤l} Σ_{|m|≤n} G_m(T)`.
    fn fejer_double_sum(t: &G, l: usize) -> G {
        let mut acc = G::zero(t.block_dim(), t.levels());
        for n in 0..=l as i64 {
            for m in -n..=n {
                acc = acc.add(&t.fourier_gm(m)).unwrap();
            }
        }
        acc.scaled(Complex::new(1.0 / (l as f64 + 1.0), 0.0))
    }

    #[test]
    fn fejer_matches_double_sum_and_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let t = random_graded(&mut rng, 2, 3);
        for l in [0, 1, 2, 5] {
            assert!(t.fejer_sum(l).sub(&fejer_double_sum(&t, l)).unwrap().frobenius() < 1e-12);
        }
        let l = 300;
        let err = t.fejer_sum(l).sub(&t).unwrap().frobenius();
        assert!(err <= t.fejer_error_bound(l) + 1e-14);
    }

    #[test]
    fn diagonal_part_and_compression() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = random_graded(&mut rng, 2, 4);
        let v = G::shift(2, 4);
        // G_m(T) = V^m T_(m) for m ≥ 0
        for m in 0..4 {
            let lhs = v.pow(m as usize).mul(&t.diagonal_part(m)).unwrap();
            assert!(lhs.sub(&t.fourier_gm(m)).unwrap().frobenius() < 1e-14);
        }
        // G_m(T) = T_(m) (V*)^{-m} for m < 0
        for m in 1..4 {
            let rhs = t.diagonal_part(-m).mul(&v.adjoint().pow(m as usize)).unwrap();
            assert!(rhs.sub(&t.fourier_gm(-m)).unwrap().frobenius() < 1e-14);
        }
        let c = t.compress(2).unwrap();
        assert_eq!(c.block(1, 0).unwrap(), t.block(1, 0).unwrap());
        assert!(t.compress(5).is_err());
        assert_eq!(level_projection::<f64>(2, 3, 1).block(1, 1).unwrap(), identity(2));
        let _ = cone::<f64>();
    }

    #[test]
    fn single_precision_reassembly() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let t = GradedOperator::<f32>::new(2, 3, random::matrix(&mut rng, 6, 6)).unwrap();
        let mut sum = GradedOperator::<f32>::zero(2, 3);
        for m in -2..=2 {
            sum = sum.add(&t.fourier_gm(m)).unwrap();
        }
        assert_eq!(sum, t);
    }
}
