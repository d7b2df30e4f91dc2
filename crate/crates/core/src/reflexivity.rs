//! Reflexive covers `Ref(S) = {T : Tξ ∈ Sξ for every ξ}` of subspaces of
//! `M_n`, and the Fourier-invariant subspace calculus over a truncated
//! semicrossed product.
//!
//! Both engines shrink an over-approximation from above, so an estimate
//! equal to `S` certifies `Ref(S) = S`.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::GradedOperator;
use crate::linop::{frobenius, identity, matrix_power, nullspace_below, pattern_space, CMat, CVec, OperatorSubspace};
use crate::random;
use crate::scalar::{cone, czero, lit, to_f64, Real};
use crate::semicrossed::{build_w_form, FinDynAlgebra};

/// Subspace gap tolerance for certificates.
pub const GAP_TOL: f64 = 1e-8;
/// Largest coordinate-subset size in the second sampling stratum.
pub const DEFAULT_SUBSET_SIZE: usize = 3;
/// Consecutive unchanged Gaussian batches that end sampling.
pub const DEFAULT_PATIENCE: usize = 5;
pub const DEFAULT_BATCH: usize = 4;
/// Vectors whose `Sξ` has a singular value in `(GRAY_LO, GRAY_HI]·σ_max`
/// have ambiguous numerical rank and are skipped.
const GRAY_LO: f64 = 1e-11;
const GRAY_HI: f64 = 1e-6;
/// Singular values of `P⊥_{Sξ}[Kξ]` below `CUT_TOL·‖ξ‖` do not cut, so
/// ill-conditioned vectors can only enlarge the estimate.
const CUT_TOL: f64 = 1e-8;
/// Alternation cap per rank-one start.
pub const MAX_ALTERNATIONS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sampled,
    Rankone,
    Pattern,
    Auto,
}

/// A vector `ξ` and an element `T` of the previous estimate with
/// `Tξ ∉ Sξ`, so `T ∉ Ref(S)`.
#[derive(Clone, Debug)]
pub struct Witness<T: Real> {
    pub xi: CVec<T>,
    pub element: CMat<T>,
    pub residual: T,
}

#[derive(Clone, Debug)]
pub struct RefResult<T: Real> {
    pub estimate: OperatorSubspace<T>,
    pub certified_reflexive: bool,
    pub method: Method,
    pub samples_used: usize,
    /// Budget ran out before the estimate stabilized.
    pub unstable: bool,
    /// No rank-one element was available to cut the estimate.
    pub vacuous: bool,
    pub witness: Option<Witness<T>>,
    pub seed: u64,
}

impl<T: Real> RefResult<T> {
    pub fn defect_dim(&self, s: &OperatorSubspace<T>) -> usize {
        self.estimate.dim().saturating_sub(s.dim())
    }

    /// `estimate ⊖ S`.
    pub fn defect_basis(&self, s: &OperatorSubspace<T>) -> Result<OperatorSubspace<T>> {
        self.estimate.relative_complement(s)
    }
}

fn certify<T: Real>(s: &OperatorSubspace<T>, estimate: &OperatorSubspace<T>) -> Result<bool> {
    Ok(estimate.dim() == s.dim() && estimate.gap(s)? <= lit(GAP_TOL))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stratum {
    Basis,
    Subset,
    Gaussian,
}

/// The stratified vector pool: standard basis vectors, random unimodular
/// combinations on every coordinate subset of size `2..=s_max`, then dense
/// Gaussians.
pub struct VectorPool<T: Real> {
    n: usize,
    rng: ChaCha8Rng,
    subsets: Vec<Vec<usize>>,
    next_basis: usize,
    next_subset: usize,
    _marker: std::marker::PhantomData<T>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

impl<T: Real> VectorPool<T> {
    pub fn new(n: usize, s_max: usize, seed: u64) -> Self {
        let subsets = (2..=s_max.min(n)).flat_map(|k| combinations(n, k)).collect();
        Self {
            n,
            rng: ChaCha8Rng::seed_from_u64(seed),
            subsets,
            next_basis: 0,
            next_subset: 0,
            _marker: std::marker::PhantomData,
        }
    }

    /// Size of the two deterministic strata.
    pub fn structured_len(&self) -> usize {
        self.n + self.subsets.len()
    }

    pub fn next_vector(&mut self) -> (Stratum, CVec<T>) {
        if self.next_basis < self.n {
            let mut v = CVec::zeros(self.n);
            v[self.next_basis] = cone();
            self.next_basis += 1;
            return (Stratum::Basis, v);
        }
        if self.next_subset < self.subsets.len() {
            let mut v = CVec::zeros(self.n);
            for &i in &self.subsets[self.next_subset] {
                let z: Complex<T> = random::gaussian(&mut self.rng);
                v[i] = z / Complex::new(crate::scalar::cabs(z), T::zero());
            }
            self.next_subset += 1;
            return (Stratum::Subset, v);
        }
        (Stratum::Gaussian, random::vector(&mut self.rng, self.n))
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// `[X_1ξ … X_kξ]` for the matrices whose column-major vecs are the
/// columns of `coords`.
fn apply_columns<T: Real>(coords: &CMat<T>, n: usize, xi: &CVec<T>) -> CMat<T> {
    let mut out = CMat::zeros(n, coords.ncols());
    let xi = xi.as_slice();
    for (col, o) in coords.as_slice().chunks_exact(n * n).zip(out.as_mut_slice().chunks_exact_mut(n)) {
        for (block, &x) in col.chunks_exact(n).zip(xi) {
            for (acc, &b) in o.iter_mut().zip(block) {
                *acc += b * x;
            }
        }
    }
    out
}

/// `[X_1ᵀξ … X_kᵀξ]`.
fn apply_columns_transposed<T: Real>(coords: &CMat<T>, n: usize, xi: &CVec<T>) -> CMat<T> {
    let mut out = CMat::zeros(n, coords.ncols());
    let xi = xi.as_slice();
    for (col, o) in coords.as_slice().chunks_exact(n * n).zip(out.as_mut_slice().chunks_exact_mut(n)) {
        // column c of X is entries c·n..c·n+n, so (Xᵀξ)_c is its pairing with ξ
        for (acc, block) in o.iter_mut().zip(col.chunks_exact(n)) {
            *acc = block.iter().zip(xi).fold(czero(), |s, (&b, &x)| s + b * x);
        }
    }
    out
}

/// Orthonormal basis of the column span of `cols` when its numerical rank
/// is unambiguous: no singular value lies in `(GRAY_LO, GRAY_HI]·σ_max`.
fn clean_image<T: Real>(cols: &CMat<T>) -> Option<CMat<T>> {
    let n = cols.nrows();
    if cols.ncols() == 0 || frobenius(cols) == T::zero() {
        return Some(CMat::zeros(n, 0));
    }
    let (sv, u) = T::thin_svd_v(&cols.adjoint());
    let smax = sv[0];
    let hi = lit::<T>(GRAY_HI) * smax;
    let lo = lit::<T>(GRAY_LO) * smax;
    if sv.iter().any(|&x| x > lo && x <= hi) {
        return None;
    }
    let rank = sv.iter().filter(|&&x| x > hi).count();
    Some(u.columns(0, rank).into_owned())
}

/// Orthonormal basis of `Sξ`, or `None` when its rank is ambiguous.
fn image_basis<T: Real>(s: &OperatorSubspace<T>, xi: &CVec<T>) -> Option<CMat<T>> {
    clean_image(&apply_columns(s.coords(), s.ambient(), xi))
}

/// `{ζ : ζᵀ y = 0 for y in the span of cols}`, or `None` when ambiguous.
fn bilinear_null<T: Real>(cols: &CMat<T>) -> Option<CMat<T>> {
    let u = clean_image(cols)?;
    Some(crate::linop::complement(&u.map(|z| z.conj())))
}

/// One constraint `P⊥_{Sξ} T ξ = 0` applied to the estimate with
/// orthonormal coordinates `k`, where `y` is an orthonormal basis of `Sξ`.
/// Returns the new coordinates when the estimate shrinks, with a witness
/// of an excluded element.
fn cut<T: Real>(s: &OperatorSubspace<T>, k: &CMat<T>, xi: &CVec<T>, y: &CMat<T>) -> Option<(CMat<T>, Witness<T>)> {
    let n = s.ambient();
    if k.ncols() == 0 {
        return None;
    }
    let xn = xi.norm();
    let kx = apply_columns(k, n, xi);
    let m = if y.ncols() == 0 { kx } else { &kx - T::matmul(y, &T::matmul(&y.adjoint(), &kx)) };
    let thr = lit::<T>(CUT_TOL) * xn;
    if frobenius(&m) <= thr {
        return None;
    }
    let null = nullspace_below(&m, thr);
    if null.ncols() == k.ncols() {
        return None;
    }
    let excluded = crate::linop::complement(&null);
    let c = excluded.column(0).into_owned();
    let element = crate::linop::unvectorize((k * &c).as_slice(), n);
    let residual = (&m * c).norm();
    let new_k = if null.ncols() == 0 { CMat::zeros(n * n, 0) } else { T::matmul(k, &null) };
    // S ⊆ Ref(S) for every ξ; a cut that loses S is numerically unreliable
    if s.dim() > 0 {
        let q = s.coords();
        let lost = crate::linop::operator_norm(&(q - T::matmul(&new_k, &T::matmul(&new_k.adjoint(), q))));
        if lost > lit(GAP_TOL) {
            return None;
        }
    }
    Some((new_k, Witness { xi: xi.clone(), element, residual }))
}

/// The estimate cut by all standard basis vectors at once:
/// `⊕_j (S e_j) e_jᵀ`.
fn basis_stratum<T: Real>(s: &OperatorSubspace<T>) -> (CMat<T>, Option<Witness<T>>, usize) {
    let n = s.ambient();
    let mut cols: Vec<CVec<T>> = Vec::new();
    let mut witness = None;
    let mut max_rank = 0;
    for j in 0..n {
        let mut e = CVec::zeros(n);
        e[j] = cone();
        let y = image_basis(s, &e).unwrap_or_else(|| identity(n));
        max_rank = max_rank.max(y.ncols());
        for col in y.column_iter() {
            let mut v = CVec::zeros(n * n);
            v.rows_mut(j * n, n).copy_from(&col);
            cols.push(v);
        }
        if witness.is_none() && y.ncols() < n {
            let perp = crate::linop::complement(&y);
            let mut element = CMat::zeros(n, n);
            element.column_mut(j).copy_from(&perp.column(0));
            witness = Some(Witness { xi: e, element, residual: T::one() });
        }
    }
    let k = if cols.is_empty() { CMat::zeros(n * n, 0) } else { CMat::from_columns(&cols) };
    (k, witness, max_rank)
}

/// Applies the constraint of `xi` unless it is unusable. Gaussian vectors
/// whose `Sξ` has rank below the largest rank seen are numerically
/// degenerate draws and are skipped, together with ambiguous-rank vectors.
fn filtered_cut<T: Real>(
    s: &OperatorSubspace<T>,
    k: &mut CMat<T>,
    witness: &mut Option<Witness<T>>,
    max_rank: &mut usize,
    stratum: Stratum,
    xi: &CVec<T>,
) {
    let Some(y) = image_basis(s, xi) else {
        return;
    };
    if stratum == Stratum::Gaussian && y.ncols() < *max_rank {
        return;
    }
    *max_rank = (*max_rank).max(y.ncols());
    if let Some((nk, w)) = cut(s, k, xi, &y) {
        *k = nk;
        witness.get_or_insert(w);
    }
}

/// Largest total sample count used by [`ref_sampled`] by default.
pub fn default_budget(n: usize) -> usize {
    let pool = VectorPool::<f64>::new(n, DEFAULT_SUBSET_SIZE, 0);
    pool.structured_len() + 40 * DEFAULT_BATCH * DEFAULT_PATIENCE
}

#[derive(Clone, Copy, Debug)]
pub struct SampleConfig {
    pub budget: usize,
    pub s_max: usize,
    pub patience: usize,
    pub batch: usize,
}

impl SampleConfig {
    pub fn with_budget(budget: usize) -> Self {
        Self { budget, s_max: DEFAULT_SUBSET_SIZE, patience: DEFAULT_PATIENCE, batch: DEFAULT_BATCH }
    }
}

/// Sampled over-approximation of `Ref(S)` with the default pool shape.
pub fn ref_sampled<T: Real>(s: &OperatorSubspace<T>, budget: usize, seed: u64) -> Result<RefResult<T>> {
    ref_sampled_with(s, SampleConfig::with_budget(budget), seed)
}

pub fn ref_sampled_with<T: Real>(s: &OperatorSubspace<T>, cfg: SampleConfig, seed: u64) -> Result<RefResult<T>> {
    let n = s.ambient();
    let mut pool = VectorPool::<T>::new(n, cfg.s_max, seed);
    let (mut k, mut witness, mut max_rank) = basis_stratum(s);
    let mut used = n;
    for _ in 0..n {
        pool.next_vector();
    }
    let mut stable = 0usize;
    let mut unstable = false;
    'outer: loop {
        if k.ncols() == s.dim() {
            break;
        }
        let dim_before = k.ncols();
        let mut gaussian_batch = false;
        for _ in 0..cfg.batch.max(1) {
            if used >= cfg.budget {
                unstable = true;
                break 'outer;
            }
            let (stratum, xi) = pool.next_vector();
            used += 1;
            gaussian_batch = stratum == Stratum::Gaussian;
            filtered_cut(s, &mut k, &mut witness, &mut max_rank, stratum, &xi);
        }
        if gaussian_batch {
            stable = if k.ncols() == dim_before { stable + 1 } else { 0 };
            if stable >= cfg.patience {
                break;
            }
        }
    }
    let estimate = OperatorSubspace::from_orthonormal_coords(n, k);
    Ok(RefResult {
        certified_reflexive: certify(s, &estimate)?,
        estimate,
        method: Method::Sampled,
        samples_used: used,
        unstable,
        vacuous: false,
        witness,
        seed,
    })
}

/// Cuts `M_n` by the constraints of an explicit labelled vector list, in
/// order, with the same filtering as [`ref_sampled`].
pub fn ref_from_vectors<T: Real>(s: &OperatorSubspace<T>, vectors: &[(Stratum, CVec<T>)]) -> Result<RefResult<T>> {
    let n = s.ambient();
    let mut k = identity::<T>(n * n);
    let mut witness = None;
    let mut max_rank = 0;
    for (i, (stratum, xi)) in vectors.iter().enumerate() {
        if xi.len() != n {
            return Err(Error::Shape(format!("vector {i} has length {}, expected {n}", xi.len())));
        }
        filtered_cut(s, &mut k, &mut witness, &mut max_rank, *stratum, xi);
    }
    let estimate = OperatorSubspace::from_orthonormal_coords(n, k);
    Ok(RefResult {
        certified_reflexive: certify(s, &estimate)?,
        estimate,
        method: Method::Sampled,
        samples_used: vectors.len(),
        unstable: false,
        vacuous: false,
        witness,
        seed: 0,
    })
}

/// Default rank-one start count: `50 · dim annihilator(S)`.
pub fn default_starts<T: Real>(s: &OperatorSubspace<T>) -> usize {
    let n = s.ambient();
    50 * (n * n - s.dim())
}

/// Growing orthonormal set in `C^{n²}` capped at `cap` columns.
struct RankOneSpan<T: Real> {
    q: CMat<T>,
    len: usize,
}

impl<T: Real> RankOneSpan<T> {
    fn push(&mut self, v: CVec<T>) {
        if self.len == self.q.ncols() {
            return;
        }
        let vn = v.norm();
        if vn == T::zero() {
            return;
        }
        let mut r = v / Complex::new(vn, T::zero());
        for _ in 0..2 {
            let q = self.q.columns(0, self.len);
            let c = q.adjoint() * &r;
            r -= q * c;
        }
        let rn = r.norm();
        if rn > lit(1e-6) {
            self.q.column_mut(self.len).copy_from(&(r / Complex::new(rn, T::zero())));
            self.len += 1;
        }
    }

    fn full(&self) -> bool {
        self.len == self.q.ncols()
    }
}

fn random_combination<T: Real>(rng: &mut ChaCha8Rng, basis: &CMat<T>) -> CVec<T> {
    let c: CVec<T> = random::vector(rng, basis.ncols());
    let v = basis * c;
    let vn = v.norm();
    v / Complex::new(vn, T::zero())
}

/// Rank-one search in the annihilator `{R : tr(S_i R) = 0}` by alternating
/// exact solves: for fixed `η` every `ξ` with `ξᵀ S_i η = 0` gives
/// `R = ηξᵀ`; for fixed `ξ` the roles swap. The estimate is the annihilator
/// of the span of the rank-ones found.
pub fn ref_rankone<T: Real>(s: &OperatorSubspace<T>, starts: usize, seed: u64) -> Result<RefResult<T>> {
    let n = s.ambient();
    let target = n * n - s.dim();
    if target == 0 {
        let estimate = OperatorSubspace::full(n);
        return Ok(RefResult {
            certified_reflexive: certify(s, &estimate)?,
            estimate,
            method: Method::Rankone,
            samples_used: 0,
            unstable: false,
            vacuous: true,
            witness: None,
            seed,
        });
    }
    let mut pool = VectorPool::<T>::new(n, DEFAULT_SUBSET_SIZE, seed);
    let mut span = RankOneSpan { q: CMat::zeros(n * n, target), len: 0 };
    let mut used = 0;
    let mut max_rank = 0;
    while used < starts && !span.full() {
        let (stratum, mut eta) = pool.next_vector();
        used += 1;
        for step in 0..MAX_ALTERNATIONS {
            let before = span.len;
            let image = apply_columns(s.coords(), n, &eta);
            if step == 0 {
                let Some(y) = clean_image(&image) else {
                    break;
                };
                if stratum == Stratum::Gaussian && y.ncols() < max_rank {
                    break;
                }
                max_rank = max_rank.max(y.ncols());
            }
            let Some(xis) = bilinear_null(&image) else {
                break;
            };
            if xis.ncols() == 0 {
                break;
            }
            for xi in xis.column_iter() {
                span.push(xi.kronecker(&eta));
            }
            let xi = random_combination(pool.rng(), &xis);
            let Some(etas) = bilinear_null(&apply_columns_transposed(s.coords(), n, &xi)) else {
                break;
            };
            for e in etas.column_iter() {
                span.push(xi.kronecker(&e));
            }
            if span.full() || span.len == before || etas.ncols() == 0 {
                break;
            }
            eta = random_combination(pool.rng(), &etas);
        }
    }
    let (estimate, vacuous) = if span.len == 0 {
        (OperatorSubspace::full(n), true)
    } else {
        let r = OperatorSubspace::from_orthonormal_coords(n, span.q.columns(0, span.len).into_owned());
        (r.annihilator(), false)
    };
    Ok(RefResult {
        certified_reflexive: certify(s, &estimate)?,
        estimate,
        method: Method::Rankone,
        samples_used: used,
        unstable: false,
        vacuous,
        witness: None,
        seed,
    })
}

/// Intersection of the sampled and rank-one estimates.
pub fn ref_auto<T: Real>(s: &OperatorSubspace<T>, budget: usize, starts: usize, seed: u64) -> Result<RefResult<T>> {
    let a = ref_sampled(s, budget, seed)?;
    let b = ref_rankone(s, starts, seed)?;
    let estimate = a.estimate.intersect(&b.estimate)?;
    Ok(RefResult {
        certified_reflexive: certify(s, &estimate)?,
        estimate,
        method: Method::Auto,
        samples_used: a.samples_used + b.samples_used,
        unstable: a.unstable,
        vacuous: false,
        witness: a.witness,
        seed,
    })
}

/// Structural description of a twisted pattern space `U·span{E_ij}·V`.
#[derive(Clone, Debug)]
pub struct PatternMeta<T: Real> {
    pub n: usize,
    pub pattern: Vec<(usize, usize)>,
    pub left: Option<CMat<T>>,
    pub right: Option<CMat<T>>,
}

impl<T: Real> PatternMeta<T> {
    pub fn space(&self) -> Result<OperatorSubspace<T>> {
        if let Some(&(i, j)) = self.pattern.iter().find(|&&(i, j)| i >= self.n || j >= self.n) {
            return Err(Error::Index(format!("pattern entry ({i},{j}) outside M_{}", self.n)));
        }
        let p = pattern_space(self.n, |i, j| self.pattern.contains(&(i, j)));
        let eye = identity(self.n);
        p.conjugated(self.left.as_ref().unwrap_or(&eye), self.right.as_ref().unwrap_or(&eye))
    }
}

/// `Ref(S) = S` for twisted pattern spaces: basis vectors force the
/// off-pattern entries to vanish, and `Ref(USV) = U Ref(S) V`. Refuses
/// when the metadata does not describe `S`.
pub fn pattern_ref_oracle<T: Real>(s: &OperatorSubspace<T>, meta: &PatternMeta<T>) -> Result<RefResult<T>> {
    for u in [&meta.left, &meta.right].into_iter().flatten() {
        if !crate::linop::is_unitary(u, lit(1e-10)) {
            return Err(Error::Precondition("pattern twist is not unitary".into()));
        }
    }
    let p = meta.space()?;
    let (same, gap) = s.equals(&p, lit(GAP_TOL))?;
    if !same {
        return Err(Error::Precondition(format!(
            "subspace does not match the pattern description (gap {:.3e})",
            to_f64(gap)
        )));
    }
    Ok(RefResult {
        estimate: s.clone(),
        certified_reflexive: true,
        method: Method::Pattern,
        samples_used: 0,
        unstable: false,
        vacuous: false,
        witness: None,
        seed: 0,
    })
}

/// `(S_0, …, S_{N−1})` with `S_m = {w^m T_{m,0} : T ∈ S}` for a
/// Fourier-invariant `S` inside the w-form truncation of `sys`.
pub fn g_invariant_decompose<T: Real>(
    s: &OperatorSubspace<T>,
    sys: &FinDynAlgebra<T>,
    levels: usize,
) -> Result<Vec<OperatorSubspace<T>>> {
    let d = sys.d();
    if s.ambient() != d * levels {
        return Err(Error::Shape(format!("subspace lives in M_{}, expected M_{}", s.ambient(), d * levels)));
    }
    let tol = lit::<T>(GAP_TOL);
    let host = build_w_form(sys, levels)?.space;
    let (inside, e) = host.contains_subspace(s, tol)?;
    if !inside {
        return Err(Error::NotInSemicrossed(to_f64(e)));
    }
    let basis: Vec<GradedOperator<T>> =
        s.basis().into_iter().map(|t| GradedOperator::new(d, levels, t).expect("ambient checked")).collect();
    for m in -(levels as i64 - 1)..levels as i64 {
        for t in &basis {
            let r = s.residual(t.fourier_gm(m).matrix())?;
            if r > tol {
                return Err(Error::NotGInvariant { m, residual: to_f64(r) });
            }
        }
    }
    (0..levels)
        .map(|m| {
            let wm = matrix_power(sys.w(), m);
            let mats: Vec<CMat<T>> = basis.iter().map(|t| &wm * t.block(m, 0).expect("in range")).collect();
            OperatorSubspace::span(d, &mats)
        })
        .collect()
}

/// `span{W^m ρ(x) : x ∈ S_m}`.
pub fn assemble_from_sequence<T: Real>(
    seq: &[OperatorSubspace<T>],
    sys: &FinDynAlgebra<T>,
    levels: usize,
) -> Result<OperatorSubspace<T>> {
    let d = sys.d();
    if seq.len() != levels {
        return Err(Error::Shape(format!("sequence has {} slots for {levels} levels", seq.len())));
    }
    let w_star = sys.w().adjoint();
    let mut mats = Vec::new();
    for (m, sm) in seq.iter().enumerate() {
        if sm.ambient() != d {
            return Err(Error::Shape(format!("slot {m} lives in M_{}, expected M_{d}", sm.ambient())));
        }
        let wm = matrix_power(&w_star, m);
        for x in sm.basis() {
            mats.push(GradedOperator::shifted(&(&wm * x), levels, m)?.into_matrix());
        }
    }
    OperatorSubspace::span(d * levels, &mats)
}

#[derive(Clone, Debug, Serialize)]
pub struct InteriorDefect {
    pub levels: usize,
    pub margin: usize,
    pub dim_s: usize,
    pub dim_estimate: usize,
    pub defect_dim: usize,
    pub defect_ratio: f64,
    pub certified_reflexive: bool,
    pub unstable: bool,
    pub samples_used: usize,
    /// Excess of the compressed estimate over the compressed `S`.
    /// It vanishes iff `estimate ⊆ S + ker(compression)`, that is, iff every
    /// defect direction can be chosen inside the last `margin` levels.
    pub interior_excess: f64,
    pub defect_annihilated: bool,
    /// Largest interior norm over the orthonormal basis of `estimate ⊖ S`.
    pub orthogonal_defect_interior: f64,
}

/// Sampled reflexive cover of `s ⊆ M_{dN}` compared with `s` away from the
/// last `margin` levels.
pub fn interior_ref_defect<T: Real>(
    s: &OperatorSubspace<T>,
    block_dim: usize,
    margin: usize,
    budget: usize,
    seed: u64,
) -> Result<InteriorDefect> {
    let n = s.ambient();
    if block_dim == 0 || !n.is_multiple_of(block_dim) {
        return Err(Error::Shape(format!("M_{n} is not graded by blocks of size {block_dim}")));
    }
    let levels = n / block_dim;
    if margin >= levels {
        return Err(Error::TruncationTooShort { levels, required: margin + 1 });
    }
    let r = ref_sampled(s, budget, seed)?;
    let cut = (levels - margin) * block_dim;
    let compress = |x: &CMat<T>| x.view((0, 0), (cut, cut)).into_owned();
    let target = s.map(cut, compress)?;
    let est_c = r.estimate.map(cut, compress)?;
    let interior_excess = target.excess_of(&est_c)?;
    let orthogonal_defect_interior = r
        .defect_basis(s)?
        .basis()
        .iter()
        .map(|x| frobenius(&compress(x)))
        .fold(T::zero(), |a, b| a.max(b));
    let tol = lit::<T>(GAP_TOL);
    let defect_dim = r.defect_dim(s);
    Ok(InteriorDefect {
        levels,
        margin,
        dim_s: s.dim(),
        dim_estimate: r.estimate.dim(),
        defect_dim,
        defect_ratio: defect_dim as f64 / s.dim().max(1) as f64,
        certified_reflexive: r.certified_reflexive,
        unstable: r.unstable,
        samples_used: r.samples_used,
        interior_excess: to_f64(interior_excess),
        defect_annihilated: interior_excess <= tol,
        orthogonal_defect_interior: to_f64(orthogonal_defect_interior),
    })
}

/// Whether the defect ratios strictly decrease along the sequence.
pub fn strictly_decreasing_ratio(reports: &[InteriorDefect]) -> bool {
    reports.windows(2).all(|w| w[1].defect_ratio < w[0].defect_ratio)
}

/// Random slot subspaces of `M_d` with the listed dimensions; assembled,
/// they give a random Fourier-invariant subspace.
pub fn random_sequence<T: Real, R: Rng + ?Sized>(rng: &mut R, d: usize, slot_dims: &[usize]) -> Result<Vec<OperatorSubspace<T>>> {
    slot_dims
        .iter()
        .map(|&k| {
            let mats: Vec<CMat<T>> = (0..k.min(d * d)).map(|_| random::matrix(rng, d, d)).collect();
            OperatorSubspace::span(d, &mats)
        })
        .collect()
}
