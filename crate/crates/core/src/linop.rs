//! Dense complex linear algebra and the operator-subspace calculus.
//!
//! Subspaces of `M_n(C)` are stored as an `n² × k` matrix whose columns are
//! column-major vectorisations of an orthonormal basis under the trace inner
//! product `⟨X, Y⟩ = tr(Y* X)`, so every subspace computation reduces to an
//! ordinary computation in `C^{n²}`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{cabs, cone, czero, lit, Real};

pub type CMat<T> = DMatrix<Complex<T>>;
pub type CVec<T> = DVector<Complex<T>>;

/// Tolerance for unitarity/hermiticity predicates, scaled by the row count.
pub const TAU_NUM: f64 = 1e-10;
/// Singular values below `RANK_EPS · max(rows, cols) · σ_max` count as zero.
pub const RANK_EPS: f64 = 1e-10;

/// `RANK_EPS`, raised to a few ulps for single precision.
pub fn rank_eps<T: Real>() -> T {
    lit::<T>(RANK_EPS).max(lit::<T>(64.0) * T::default_epsilon())
}

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    CMat::identity(n, n)
}

/// `E_{ij}` in `M_n`.
pub fn matrix_unit<T: Real>(n: usize, i: usize, j: usize) -> CMat<T> {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = cone();
    m
}

pub fn diag<T: Real>(entries: &[Complex<T>]) -> CMat<T> {
    CMat::from_diagonal(&CVec::from_column_slice(entries))
}

pub fn scale<T: Real>(m: &CMat<T>, s: T) -> CMat<T> {
    m * Complex::new(s, T::zero())
}

pub fn frobenius<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

pub fn singular_values<T: Real>(m: &CMat<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    T::singular_values(m)
}

/// Spectral norm (largest singular value).
pub fn operator_norm<T: Real>(m: &CMat<T>) -> T {
    singular_values(m).into_iter().fold(T::zero(), |a, b| a.max(b))
}

pub fn matrix_power<T: Real>(m: &CMat<T>, k: usize) -> CMat<T> {
    let mut out = identity(m.nrows());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

/// `‖U*U − I‖_F ≤ tol · rows`.
pub fn is_unitary<T: Real>(u: &CMat<T>, tol: T) -> bool {
    u.is_square() && frobenius(&(u.adjoint() * u - identity(u.nrows()))) <= tol * lit(u.nrows() as f64)
}

pub fn is_hermitian<T: Real>(m: &CMat<T>, tol: T) -> bool {
    m.is_square() && frobenius(&(m - m.adjoint())) <= tol * lit(m.nrows().max(1) as f64)
}

/// Column-major vectorisation.
pub fn vectorize<T: Real>(m: &CMat<T>) -> CVec<T> {
    CVec::from_column_slice(m.as_slice())
}

pub fn unvectorize<T: Real>(v: &[Complex<T>], n: usize) -> CMat<T> {
    CMat::from_column_slice(n, n, v)
}

/// Bilinear trace pairing `tr(A B)` (no conjugation).
pub fn trace_pairing<T: Real>(a: &CMat<T>, b: &CMat<T>) -> Complex<T> {
    (a * b).trace()
}

fn rank_threshold<T: Real>(sigma_max: T, rows: usize, cols: usize, scale: T) -> T {
    rank_eps::<T>() * lit::<T>(rows.max(cols) as f64) * sigma_max.max(scale)
}

/// Orthonormal basis (columns) of the null space of `a`.
///
/// `scale` is a floor for the σ_max used in the rank threshold, so that a
/// numerically vanishing `a` is recognised as zero rather than full rank.
pub fn nullspace<T: Real>(a: &CMat<T>, scale: T) -> CMat<T> {
    let (m, k) = a.shape();
    null_directions(a, |smax| rank_threshold(smax, m, k, scale))
}

/// Orthonormal basis of the right singular directions of `a` with singular
/// value at most `thr` (the complement of the row space when `a` is wide).
pub fn nullspace_below<T: Real>(a: &CMat<T>, thr: T) -> CMat<T> {
    null_directions(a, |_| thr)
}

fn null_directions<T: Real>(a: &CMat<T>, threshold: impl Fn(T) -> T) -> CMat<T> {
    let (m, k) = a.shape();
    if k == 0 {
        return CMat::zeros(0, 0);
    }
    if m == 0 {
        return identity(k);
    }
    let (sv, v) = T::thin_svd_v(a);
    let thr = threshold(sv.iter().copied().fold(T::zero(), |x, y| x.max(y)));
    if m >= k {
        let null: Vec<CVec<T>> = (0..k)
            .filter(|&i| sv[i] <= thr)
            .map(|i| v.column(i).into_owned())
            .collect();
        if null.is_empty() {
            CMat::zeros(k, 0)
        } else {
            CMat::from_columns(&null)
        }
    } else {
        let row_space: Vec<CVec<T>> = (0..m)
            .filter(|&i| sv[i] > thr)
            .map(|i| v.column(i).into_owned())
            .collect();
        if row_space.is_empty() {
            return identity(k);
        }
        complement(&CMat::from_columns(&row_space))
    }
}

/// Orthonormal basis of the orthogonal complement of the column span of `q`,
/// which must have orthonormal columns. Built from Householder reflectors.
pub fn complement<T: Real>(q: &CMat<T>) -> CMat<T> {
    let (n, k) = q.shape();
    assert!(k <= n, "more orthonormal columns than rows");
    let two = Complex::new(lit::<T>(2.0), T::zero());
    let mut a = q.clone();
    let mut reflectors: Vec<(usize, CVec<T>)> = Vec::with_capacity(k);
    for j in 0..k {
        let mut v: CVec<T> = a.view((j, j), (n - j, 1)).column(0).into_owned();
        let xnorm = v.norm();
        if xnorm == T::zero() {
            continue;
        }
        let x0 = v[0];
        let phase = if cabs(x0) > T::zero() { x0 / Complex::new(cabs(x0), T::zero()) } else { cone() };
        v[0] += phase * Complex::new(xnorm, T::zero());
        let vn = v.norm();
        if vn == T::zero() {
            continue;
        }
        v /= Complex::new(vn, T::zero());
        let mut sub = a.view_mut((j, j), (n - j, k - j));
        let w = v.adjoint() * &sub;
        sub -= &v * w * two;
        reflectors.push((j, v));
    }
    let mut e = CMat::zeros(n, n - k);
    for i in 0..n - k {
        e[(k + i, i)] = cone();
    }
    for (j, v) in reflectors.iter().rev() {
        let mut sub = e.rows_mut(*j, n - j);
        let w = v.adjoint() * &sub;
        sub -= v * w * two;
    }
    e
}

/// Modified Gram-Schmidt (two passes) over the columns of `cols`, in order.
/// Columns whose residual norm is at most `rel_tol · max column norm` are
/// dropped.
pub fn orthonormalize_columns<T: Real>(cols: &CMat<T>, rel_tol: T) -> CMat<T> {
    let rows = cols.nrows();
    let max_norm = cols
        .column_iter()
        .map(|c| c.norm())
        .fold(T::zero(), |a, b| a.max(b));
    if max_norm == T::zero() {
        return CMat::zeros(rows, 0);
    }
    let thr = rel_tol * max_norm;
    let mut basis: Vec<CVec<T>> = Vec::new();
    for c in cols.column_iter() {
        let mut r: CVec<T> = c.into_owned();
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dotc(&r);
                r.axpy(-proj, q, cone());
            }
        }
        let nr = r.norm();
        if nr > thr {
            basis.push(r / Complex::new(nr, T::zero()));
        }
    }
    if basis.is_empty() {
        CMat::zeros(rows, 0)
    } else {
        CMat::from_columns(&basis)
    }
}

fn default_rel_tol<T: Real>(rows: usize, cols: usize) -> T {
    rank_eps::<T>() * lit::<T>(rows.max(cols).max(1) as f64)
}

/// A linear subspace of `M_n(C)` with an orthonormal basis under the trace
/// inner product.
#[derive(Clone, Debug)]
pub struct OperatorSubspace<T: Real> {
    n: usize,
    coords: CMat<T>,
}

impl<T: Real> OperatorSubspace<T> {
    pub fn zero(n: usize) -> Self {
        Self { n, coords: CMat::zeros(n * n, 0) }
    }

    pub fn full(n: usize) -> Self {
        Self { n, coords: identity(n * n) }
    }

    /// Span of `mats` with the default rank tolerance.
    pub fn span(n: usize, mats: &[CMat<T>]) -> Result<Self> {
        Self::span_with_tol(n, mats, default_rel_tol(n * n, mats.len()))
    }

    pub fn span_with_tol(n: usize, mats: &[CMat<T>], rel_tol: T) -> Result<Self> {
        for (i, m) in mats.iter().enumerate() {
            if m.shape() != (n, n) {
                return Err(Error::Shape(format!(
                    "spanning matrix {i} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        if mats.is_empty() {
            return Ok(Self::zero(n));
        }
        let cols: Vec<CVec<T>> = mats.iter().map(vectorize).collect();
        let coords = orthonormalize_columns(&CMat::from_columns(&cols), rel_tol);
        Ok(Self { n, coords })
    }

    /// Wraps coordinates that are already orthonormal columns in `C^{n²}`.
    pub fn from_orthonormal_coords(n: usize, coords: CMat<T>) -> Self {
        debug_assert_eq!(coords.nrows(), n * n);
        Self { n, coords }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    pub fn coords(&self) -> &CMat<T> {
        &self.coords
    }

    pub fn element(&self, i: usize) -> CMat<T> {
        unvectorize(self.coords.column(i).as_slice(), self.n)
    }

    pub fn basis(&self) -> Vec<CMat<T>> {
        (0..self.dim()).map(|i| self.element(i)).collect()
    }

    /// `‖Q*Q − I‖_F` of the stored basis.
    pub fn gram_defect(&self) -> T {
        frobenius(&(self.coords.adjoint() * &self.coords - identity(self.dim())))
    }

    fn check_shape(&self, t: &CMat<T>) -> Result<()> {
        if t.shape() != (self.n, self.n) {
            return Err(Error::Shape(format!(
                "matrix is {}x{}, subspace lives in M_{}",
                t.nrows(),
                t.ncols(),
                self.n
            )));
        }
        Ok(())
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Shape(format!("ambient M_{} vs M_{}", self.n, other.n)));
        }
        Ok(())
    }

    /// Orthogonal projection of `t` onto the subspace.
    pub fn project(&self, t: &CMat<T>) -> Result<CMat<T>> {
        self.check_shape(t)?;
        let v = vectorize(t);
        let p = &self.coords * (self.coords.adjoint() * v);
        Ok(unvectorize(p.as_slice(), self.n))
    }

    /// `‖t − proj(t)‖_F`.
    pub fn residual(&self, t: &CMat<T>) -> Result<T> {
        Ok(frobenius(&(t - self.project(t)?)))
    }

    /// Membership with relative tolerance: `residual ≤ tol · max(1, ‖t‖_F)`.
    pub fn contains(&self, t: &CMat<T>, tol: T) -> Result<(bool, T)> {
        let r = self.residual(t)?;
        Ok((r <= tol * T::one().max(frobenius(t)), r))
    }

    /// `‖(I − P_self) Q_other‖`: zero iff `other ⊆ self`.
    pub fn excess_of(&self, other: &Self) -> Result<T> {
        self.check_ambient(other)?;
        if other.dim() == 0 {
            return Ok(T::zero());
        }
        let r = &other.coords - &self.coords * (self.coords.adjoint() * &other.coords);
        Ok(operator_norm(&r))
    }

    /// Whether `other ⊆ self`, with the excess norm.
    pub fn contains_subspace(&self, other: &Self, tol: T) -> Result<(bool, T)> {
        let e = self.excess_of(other)?;
        Ok((e <= tol, e))
    }

    /// `‖P_self − P_other‖` (operator norm of the projector difference).
    pub fn gap(&self, other: &Self) -> Result<T> {
        Ok(self.excess_of(other)?.max(other.excess_of(self)?))
    }

    pub fn equals(&self, other: &Self, tol: T) -> Result<(bool, T)> {
        let g = self.gap(other)?;
        Ok((g <= tol, g))
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Self::zero(self.n));
        }
        let r = &self.coords - &other.coords * (other.coords.adjoint() * &self.coords);
        let null = nullspace(&r, T::one());
        if null.ncols() == 0 {
            return Ok(Self::zero(self.n));
        }
        Ok(Self { n: self.n, coords: &self.coords * null })
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut cols: Vec<CVec<T>> = self.coords.column_iter().map(|c| c.into_owned()).collect();
        cols.extend(other.coords.column_iter().map(|c| c.into_owned()));
        if cols.is_empty() {
            return Ok(Self::zero(self.n));
        }
        let rel = default_rel_tol(self.n * self.n, cols.len());
        Ok(Self { n: self.n, coords: orthonormalize_columns(&CMat::from_columns(&cols), rel) })
    }

    pub fn orthogonal_complement(&self) -> Self {
        Self { n: self.n, coords: complement(&self.coords) }
    }

    /// `self ⊖ sub`: the part of `self` orthogonal to `sub`.
    pub fn relative_complement(&self, sub: &Self) -> Result<Self> {
        self.check_ambient(sub)?;
        if self.dim() == 0 {
            return Ok(Self::zero(self.n));
        }
        let r = &self.coords - &sub.coords * (sub.coords.adjoint() * &self.coords);
        let rel: T = default_rel_tol(self.n * self.n, self.dim());
        Ok(Self { n: self.n, coords: orthonormalize_columns(&r, rel.max(lit(1e-8))) })
    }

    /// `{X* : X ∈ S}`.
    pub fn adjoint_space(&self) -> Self {
        let cols: Vec<CVec<T>> = (0..self.dim()).map(|i| vectorize(&self.element(i).adjoint())).collect();
        let coords = if cols.is_empty() { CMat::zeros(self.n * self.n, 0) } else { CMat::from_columns(&cols) };
        Self { n: self.n, coords }
    }

    /// `{R : tr(S R) = 0 for all S}` under the bilinear trace pairing.
    ///
    /// `tr(S R) = ⟨R, S*⟩`, so this is the orthogonal complement of `S*`.
    pub fn annihilator(&self) -> Self {
        self.adjoint_space().orthogonal_complement()
    }

    /// Span of the images of the basis under `f`.
    pub fn map<F>(&self, out_n: usize, f: F) -> Result<Self>
    where
        F: Fn(&CMat<T>) -> CMat<T>,
    {
        let imgs: Vec<CMat<T>> = self.basis().iter().map(f).collect();
        Self::span(out_n, &imgs)
    }

    /// `U · S · V`.
    pub fn conjugated(&self, u: &CMat<T>, v: &CMat<T>) -> Result<Self> {
        if u.shape() != (self.n, self.n) || v.shape() != (self.n, self.n) {
            return Err(Error::Shape("conjugating matrices must match the ambient size".into()));
        }
        self.map(self.n, |x| u * x * v)
    }

    /// Largest residual of `b_i b_j` outside the subspace, over basis pairs.
    pub fn product_closure_residual(&self) -> T {
        let basis = self.basis();
        let mut worst = T::zero();
        for a in &basis {
            for b in &basis {
                let r = self.residual(&(a * b)).expect("shapes agree");
                worst = worst.max(r);
            }
        }
        worst
    }
}

pub fn orthonormalize<T: Real>(spanning: &[CMat<T>], tol: T) -> Result<OperatorSubspace<T>> {
    let n = spanning.first().map(|m| m.nrows()).unwrap_or(0);
    let rel = tol * lit::<T>((n * n).max(spanning.len()).max(1) as f64);
    OperatorSubspace::span_with_tol(n, spanning, rel)
}

pub fn subspace_contains<T: Real>(s: &OperatorSubspace<T>, t: &CMat<T>, tol: T) -> Result<(bool, T)> {
    s.contains(t, tol)
}

pub fn subspace_equal<T: Real>(a: &OperatorSubspace<T>, b: &OperatorSubspace<T>, tol: T) -> Result<(bool, T)> {
    a.equals(b, tol)
}

pub fn intersect<T: Real>(a: &OperatorSubspace<T>, b: &OperatorSubspace<T>) -> Result<OperatorSubspace<T>> {
    a.intersect(b)
}

pub fn sum_span<T: Real>(a: &OperatorSubspace<T>, b: &OperatorSubspace<T>) -> Result<OperatorSubspace<T>> {
    a.sum(b)
}

pub fn annihilator<T: Real>(s: &OperatorSubspace<T>) -> OperatorSubspace<T> {
    s.annihilator()
}

/// `{X ∈ M_n : X G = G X for every generator}`, as the common null space of
/// the maps `X ↦ XG − GX`. An empty generator list gives all of `M_n`.
pub fn commutant_of_set<T: Real>(n: usize, generators: &[CMat<T>]) -> Result<OperatorSubspace<T>> {
    for (i, g) in generators.iter().enumerate() {
        if g.shape() != (n, n) {
            return Err(Error::Shape(format!("generator {i} is {}x{}, expected {n}x{n}", g.nrows(), g.ncols())));
        }
    }
    let mut coords: Option<CMat<T>> = None;
    let eye = identity::<T>(n);
    for g in generators {
        let scale = frobenius(g);
        if scale == T::zero() {
            continue;
        }
        match coords.take() {
            None => {
                // vec(XG − GX) = (Gᵀ ⊗ I − I ⊗ G) vec(X)
                let op = g.transpose().kronecker(&eye) - eye.kronecker(g);
                coords = Some(nullspace(&op, scale));
            }
            Some(k) => {
                if k.ncols() == 0 {
                    coords = Some(k);
                    break;
                }
                let cols: Vec<CVec<T>> = k
                    .column_iter()
                    .map(|c| {
                        let x = unvectorize(c.as_slice(), n);
                        vectorize(&(&x * g - g * &x))
                    })
                    .collect();
                let null = nullspace(&CMat::from_columns(&cols), scale);
                coords = Some(if null.ncols() == 0 { CMat::zeros(n * n, 0) } else { k * null });
            }
        }
    }
    Ok(match coords {
        None => OperatorSubspace::full(n),
        Some(c) => OperatorSubspace::from_orthonormal_coords(n, c),
    })
}

/// Smallest unital subalgebra of `M_n` containing the generators: starting
/// from `span{I, generators}`, words are extended on the left by generators
/// until the dimension stops growing.
pub fn generated_unital_algebra<T: Real>(n: usize, generators: &[CMat<T>]) -> Result<OperatorSubspace<T>> {
    let mut seed = vec![identity::<T>(n)];
    seed.extend(generators.iter().cloned());
    let mut alg = OperatorSubspace::span(n, &seed)?;
    loop {
        let mut mats = alg.basis();
        for g in generators {
            for b in alg.basis() {
                let p = g * &b;
                let nrm = frobenius(&p);
                if nrm > lit(1e-14) {
                    mats.push(scale(&p, T::one() / nrm));
                }
            }
        }
        let next = OperatorSubspace::span(n, &mats)?;
        if next.dim() == alg.dim() {
            return Ok(alg);
        }
        alg = next;
    }
}

/// Span of the matrix units `E_{ij}` with `keep(i, j)`.
pub fn pattern_space<T: Real>(n: usize, keep: impl Fn(usize, usize) -> bool) -> OperatorSubspace<T> {
    let idx: Vec<usize> = (0..n * n).filter(|&k| keep(k % n, k / n)).collect();
    let mut coords = CMat::zeros(n * n, idx.len());
    for (c, &k) in idx.iter().enumerate() {
        coords[(k, c)] = cone();
    }
    OperatorSubspace::from_orthonormal_coords(n, coords)
}

/// Zero matrix of matching size.
pub fn zeros<T: Real>(r: usize, c: usize) -> CMat<T> {
    CMat::from_element(r, c, czero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type M = CMat<f64>;

    fn e(n: usize, i: usize, j: usize) -> M {
        matrix_unit(n, i, j)
    }

    fn jordan(n: usize) -> M {
        let mut j = M::zeros(n, n);
        for i in 0..n - 1 {
            j[(i + 1, i)] = cone();
        }
        j
    }

    #[test]
    fn scalar_multiples_collapse() {
        let i2 = identity::<f64>(2);
        let s = orthonormalize(&[i2.clone(), scale(&i2, 2.0)], 1e-10).unwrap();
        assert_eq!(s.dim(), 1);
        let b = s.element(0);
        let expected = scale(&i2, 1.0 / 2f64.sqrt());
        // basis vector is I/√2 up to a phase
        let phase = b[(0, 0)] / expected[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(frobenius(&(b - expected * phase)) < 1e-12);
    }

    #[test]
    fn orthogonal_units_stay_two_dimensional() {
        let s = orthonormalize(&[e(2, 0, 0), e(2, 1, 1)], 1e-10).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.gram_defect() < 1e-12);
    }

    #[test]
    fn dependent_triple_has_rank_two() {
        // coefficient matrix rows (1,0,1,0), (1,0,-1,0), (1,0,0,0) in vec(E00),vec(E10),vec(E01),vec(E11): rank 2
        let a = e(2, 0, 0) + e(2, 0, 1);
        let b = e(2, 0, 0) - e(2, 0, 1);
        let s = orthonormalize(&[a, b, e(2, 0, 0)], 1e-10).unwrap();
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn shape_errors() {
        assert!(OperatorSubspace::<f64>::span(2, &[identity(3)]).is_err());
        let s = OperatorSubspace::<f64>::full(2);
        assert!(s.contains(&identity(3), 1e-10).is_err());
        assert!(s.gap(&OperatorSubspace::full(3)).is_err());
    }

    #[test]
    fn membership_examples() {
        let i2 = identity::<f64>(2);
        let s = OperatorSubspace::span(2, std::slice::from_ref(&i2)).unwrap();
        let (ok, r) = s.contains(&i2, 1e-10).unwrap();
        assert!(ok && r < 1e-14);

        let s = OperatorSubspace::span(2, &[e(2, 0, 0)]).unwrap();
        let (ok, r) = s.contains(&e(2, 0, 1), 1e-10).unwrap();
        assert!(!ok);
        assert!((r - 1.0).abs() < 1e-14);

        let d = OperatorSubspace::span(2, &[e(2, 0, 0), e(2, 1, 1)]).unwrap();
        let t = diag(&[cplx(3.0, 0.0), cplx(0.0, 5.0)]);
        assert!(d.contains(&t, 1e-10).unwrap().0);
    }

    #[test]
    fn equality_examples() {
        let d1 = OperatorSubspace::span(2, &[e(2, 0, 0), e(2, 1, 1)]).unwrap();
        let d2 = OperatorSubspace::span(2, &[identity(2), diag(&[cplx(1.0, 0.0), cplx(-1.0, 0.0)])]).unwrap();
        let (eq, gap) = d1.equals(&d2, 1e-8).unwrap();
        assert!(eq && gap < 1e-12);

        let a = OperatorSubspace::span(2, &[e(2, 0, 0)]).unwrap();
        let b = OperatorSubspace::span(2, &[e(2, 1, 1)]).unwrap();
        let (eq, gap) = a.equals(&b, 1e-8).unwrap();
        assert!(!eq);
        assert!((gap - 1.0).abs() < 1e-12);

        let j = jordan(3);
        let j2 = &j * &j;
        let t1 = OperatorSubspace::span(3, &[identity(3), j.clone(), j2.clone()]).unwrap();
        let t2 = OperatorSubspace::span(3, &[identity::<f64>(3) + &j, j.clone(), j2]).unwrap();
        assert!(t1.equals(&t2, 1e-8).unwrap().0);
    }

    #[test]
    fn intersect_sum_annihilator_examples() {
        let d = OperatorSubspace::span(2, &[e(2, 0, 0), e(2, 1, 1)]).unwrap();
        let c = OperatorSubspace::span(2, &[identity(2)]).unwrap();
        assert!(d.intersect(&c).unwrap().equals(&c, 1e-8).unwrap().0);

        let a = OperatorSubspace::span(2, &[e(2, 0, 0)]).unwrap();
        let ann = a.annihilator();
        let expected = OperatorSubspace::span(2, &[e(2, 0, 1), e(2, 1, 0), e(2, 1, 1)]).unwrap();
        assert!(ann.equals(&expected, 1e-8).unwrap().0);

        let b = OperatorSubspace::span(2, &[e(2, 1, 1)]).unwrap();
        assert!(a.sum(&b).unwrap().equals(&d, 1e-8).unwrap().0);
    }

    #[test]
    fn annihilator_uses_bilinear_pairing() {
        // S = span{E00 + i E01}: tr(S R) = R00 + i R10, not conjugated
        let s0 = e(2, 0, 0) + e(2, 0, 1) * cplx(0.0, 1.0);
        let s = OperatorSubspace::span(2, std::slice::from_ref(&s0)).unwrap();
        for r in s.annihilator().basis() {
            assert!(trace_pairing(&s0, &r).norm() < 1e-12);
        }
        assert_eq!(s.annihilator().dim(), 3);
    }

    #[test]
    fn commutant_examples() {
        assert_eq!(commutant_of_set(3, &[identity::<f64>(3)]).unwrap().dim(), 9);
        assert_eq!(commutant_of_set::<f64>(3, &[]).unwrap().dim(), 9);

        let d = commutant_of_set(2, &[diag(&[cplx(1.0, 0.0), cplx(2.0, 0.0)])]).unwrap();
        let diag2 = OperatorSubspace::span(2, &[e(2, 0, 0), e(2, 1, 1)]).unwrap();
        assert!(d.equals(&diag2, 1e-8).unwrap().0);

        let j = jordan(4);
        let comm = commutant_of_set(4, std::slice::from_ref(&j)).unwrap();
        let powers: Vec<M> = (0..4).map(|k| matrix_power(&j, k)).collect();
        let toeplitz = OperatorSubspace::span(4, &powers).unwrap();
        assert_eq!(comm.dim(), 4);
        assert!(comm.equals(&toeplitz, 1e-8).unwrap().0);
    }

    #[test]
    fn generated_algebra_examples() {
        let j = jordan(3);
        let t3 = generated_unital_algebra(3, std::slice::from_ref(&j)).unwrap();
        assert_eq!(t3.dim(), 3);
        assert_eq!(generated_unital_algebra::<f64>(3, &[]).unwrap().dim(), 1);
        assert_eq!(generated_unital_algebra(2, &[e(2, 0, 1), e(2, 1, 0)]).unwrap().dim(), 4);
        assert!(t3.product_closure_residual() < 1e-10);
    }

    #[test]
    fn complement_is_orthonormal_and_orthogonal() {
        let s = OperatorSubspace::span(2, &[identity(2), e(2, 0, 1)]).unwrap();
        let c = s.orthogonal_complement();
        assert_eq!(c.dim(), 2);
        assert!(c.gram_defect() < 1e-12);
        assert!(frobenius(&(s.coords().adjoint() * c.coords())) < 1e-12);
    }

    #[test]
    fn wide_nullspace_uses_complement() {
        let a = M::from_row_slice(1, 3, &[cone(), cone(), czero()]);
        let n = nullspace(&a, 1.0);
        assert_eq!(n.ncols(), 2);
        assert!(frobenius(&(&a * &n)) < 1e-12);
    }

    #[test]
    fn unitary_and_hermitian_predicates() {
        let w = M::from_row_slice(2, 2, &[czero(), cone(), cone(), czero()]);
        assert!(is_unitary(&w, TAU_NUM));
        assert!(is_hermitian(&w, TAU_NUM));
        assert!(!is_unitary(&scale(&w, 2.0), TAU_NUM));
        assert!(!is_hermitian(&e(2, 0, 1), TAU_NUM));
    }

    #[test]
    fn works_in_single_precision() {
        let j: CMat<f32> = {
            let mut m = CMat::<f32>::zeros(3, 3);
            m[(1, 0)] = cone();
            m[(2, 1)] = cone();
            m
        };
        let s = OperatorSubspace::span(3, &[identity::<f32>(3), j.clone(), &j * &j]).unwrap();
        assert_eq!(s.dim(), 3);
        assert!(s.contains(&(&j * Complex::new(2.0f32, 0.0)), 1e-5).unwrap().0);
    }
}
