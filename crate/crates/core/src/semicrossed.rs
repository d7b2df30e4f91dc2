//! Truncated w*-semicrossed products `Z+ ×_w A` over a unital algebra
//! `A ⊆ M_d` with a unitary `w` satisfying `w A w* ⊆ A`.
//!
//! Two realizations are built on `C^d ⊗ C^N`:
//! the w-form `span{Wⁿ ρ(b)}` with `W = w* ⊗ v`, `ρ(b) = b ⊗ 1`, and the
//! β-form `span{Vⁿ π(b)}` with `V = 1 ⊗ v`, `π(b) = Σ_k βᵏ(b) ⊗ p_k`,
//! `β = ad_w`. They are exchanged by `Q = Σ_n w⁻ⁿ ⊗ p_n`.

use nalgebra::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::{block_lower_pattern, GradedOperator};
use crate::linop::{
    commutant_of_set, frobenius, identity, is_unitary, matrix_power, pattern_space, CMat, OperatorSubspace,
};
use crate::scalar::{lit, to_f64, Real};

/// Residual tolerance used by validators.
const RESIDUAL_TOL: f64 = 1e-10;
/// Closure tolerance for algebra axioms.
const ALGEBRA_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct FinDynAlgebra<T: Real> {
    d: usize,
    algebra: OperatorSubspace<T>,
    w: CMat<T>,
}

impl<T: Real> FinDynAlgebra<T> {
    /// Checks that `w` is unitary and that `A` is a unital algebra.
    /// The covariance condition `w A w* ⊆ A` is checked by the builders.
    pub fn new(algebra: OperatorSubspace<T>, w: CMat<T>) -> Result<Self> {
        let d = algebra.ambient();
        if w.shape() != (d, d) {
            return Err(Error::Shape(format!("w is {}x{}, algebra lives in M_{d}", w.nrows(), w.ncols())));
        }
        if !is_unitary(&w, lit(RESIDUAL_TOL)) {
            return Err(Error::InvalidAlgebra("w is not unitary".into()));
        }
        let (unital, r) = algebra.contains(&identity(d), lit(ALGEBRA_TOL))?;
        if !unital {
            return Err(Error::InvalidAlgebra(format!("identity not in algebra (residual {:.3e})", to_f64(r))));
        }
        let closure = algebra.product_closure_residual();
        if closure > lit(ALGEBRA_TOL) {
            return Err(Error::InvalidAlgebra(format!(
                "algebra not closed under products (residual {:.3e})",
                to_f64(closure)
            )));
        }
        Ok(Self { d, algebra, w })
    }

    /// `C·I_d` with the given unitary.
    pub fn scalar(w: CMat<T>) -> Result<Self> {
        let d = w.nrows();
        Self::new(OperatorSubspace::span(d, &[identity(d)])?, w)
    }

    /// The diagonal masa `D_d` with the given unitary.
    pub fn diagonal(w: CMat<T>) -> Result<Self> {
        let d = w.nrows();
        Self::new(pattern_space(d, |i, j| i == j), w)
    }

    /// `M_d` with the given unitary.
    pub fn full(w: CMat<T>) -> Result<Self> {
        let d = w.nrows();
        Self::new(OperatorSubspace::full(d), w)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn algebra(&self) -> &OperatorSubspace<T> {
        &self.algebra
    }

    pub fn w(&self) -> &CMat<T> {
        &self.w
    }

    /// `β(b) = w b w*`.
    pub fn beta(&self, b: &CMat<T>) -> CMat<T> {
        &self.w * b * self.w.adjoint()
    }

    pub fn beta_pow(&self, b: &CMat<T>, k: usize) -> CMat<T> {
        let wk = matrix_power(&self.w, k);
        &wk * b * wk.adjoint()
    }

    /// Residual of `β(b)` outside `A` for each basis element.
    pub fn covariance_residuals(&self) -> Vec<T> {
        self.algebra
            .basis()
            .iter()
            .map(|b| self.algebra.residual(&self.beta(b)).expect("shapes agree"))
            .collect()
    }

    /// Errors naming the first basis element with `β(b) ∉ A`.
    pub fn check_covariance(&self) -> Result<()> {
        for (index, r) in self.covariance_residuals().into_iter().enumerate() {
            if r > lit(ALGEBRA_TOL) {
                return Err(Error::Covariance { index, residual: to_f64(r) });
            }
        }
        Ok(())
    }

    /// The same unitary over another algebra.
    pub fn with_algebra(&self, algebra: OperatorSubspace<T>) -> Result<Self> {
        Self::new(algebra, self.w.clone())
    }

    /// `(A', w*)`, so that `β' = ad_{w*}`.
    pub fn commutant_system(&self) -> Result<Self> {
        let a_prime = commutant_of_set(self.d, &self.algebra.basis())?;
        Self::new(a_prime, self.w.adjoint())
    }

    /// `ρ(b) = b ⊗ 1`.
    pub fn rho(&self, b: &CMat<T>, levels: usize) -> Result<GradedOperator<T>> {
        GradedOperator::ampliate(b, levels)
    }

    /// `W = w* ⊗ v`.
    pub fn big_w(&self, levels: usize) -> GradedOperator<T> {
        GradedOperator::shifted(&self.w.adjoint(), levels, 1).expect("w is square")
    }

    /// `π(b) = Σ_k βᵏ(b) ⊗ p_k`.
    pub fn pi(&self, b: &CMat<T>, levels: usize) -> GradedOperator<T> {
        let mut blocks = Vec::with_capacity(levels);
        let mut cur = b.clone();
        for _ in 0..levels {
            blocks.push(cur.clone());
            cur = self.beta(&cur);
        }
        GradedOperator::block_diagonal(&blocks).expect("square blocks")
    }

    /// The generating set `{ρ(b) : b ∈ basis A} ∪ {W}`.
    pub fn generators(&self, levels: usize) -> Vec<CMat<T>> {
        let mut gens: Vec<CMat<T>> = self
            .algebra
            .basis()
            .iter()
            .map(|b| GradedOperator::ampliate(b, levels).expect("square").into_matrix())
            .collect();
        gens.push(self.big_w(levels).into_matrix());
        gens
    }

    /// Largest `‖ρ(b)W − Wρ(β(b))‖_F` over basis elements.
    pub fn covariance_identity_residual(&self, levels: usize) -> T {
        let w = self.big_w(levels);
        let mut worst = T::zero();
        for b in self.algebra.basis() {
            let lhs = GradedOperator::ampliate(&b, levels).expect("square").mul(&w).expect("grading");
            let rhs = w.mul(&GradedOperator::ampliate(&self.beta(&b), levels).expect("square")).expect("grading");
            worst = worst.max(lhs.sub(&rhs).expect("grading").frobenius());
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    W,
    Beta,
}

impl Form {
    pub fn name(self) -> &'static str {
        match self {
            Form::W => "w",
            Form::Beta => "beta",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedSemicrossed<T: Real> {
    pub source: FinDynAlgebra<T>,
    pub levels: usize,
    pub form: Form,
    pub space: OperatorSubspace<T>,
}

impl<T: Real> TruncatedSemicrossed<T> {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

fn check_levels(levels: usize) -> Result<()> {
    if levels == 0 {
        return Err(Error::Precondition("at least one level is required".into()));
    }
    Ok(())
}

/// `span{Wⁿ ρ(b) : n < N, b ∈ basis A}`; block `(λ+n, λ)` of `Wⁿρ(b)` is
/// `(w*)ⁿ b`.
pub fn build_w_form<T: Real>(sys: &FinDynAlgebra<T>, levels: usize) -> Result<TruncatedSemicrossed<T>> {
    check_levels(levels)?;
    sys.check_covariance()?;
    let w_star = sys.w.adjoint();
    let mut mats = Vec::new();
    for n in 0..levels {
        let wn = matrix_power(&w_star, n);
        for b in sys.algebra.basis() {
            mats.push(GradedOperator::shifted(&(&wn * &b), levels, n)?.into_matrix());
        }
    }
    let space = OperatorSubspace::span(sys.d * levels, &mats)?;
    Ok(TruncatedSemicrossed { source: sys.clone(), levels, form: Form::W, space })
}

/// `span{Vⁿ π(b) : n < N, b ∈ basis A}`; block `(λ+n, λ)` of `Vⁿπ(b)` is
/// `β^λ(b)`.
pub fn build_beta_form<T: Real>(sys: &FinDynAlgebra<T>, levels: usize) -> Result<TruncatedSemicrossed<T>> {
    check_levels(levels)?;
    sys.check_covariance()?;
    let v = GradedOperator::<T>::shift(sys.d, levels);
    let mut mats = Vec::new();
    for n in 0..levels {
        let vn = v.pow(n);
        for b in sys.algebra.basis() {
            mats.push(vn.mul(&sys.pi(&b, levels))?.into_matrix());
        }
    }
    let space = OperatorSubspace::span(sys.d * levels, &mats)?;
    Ok(TruncatedSemicrossed { source: sys.clone(), levels, form: Form::Beta, space })
}

pub fn build<T: Real>(sys: &FinDynAlgebra<T>, levels: usize, form: Form) -> Result<TruncatedSemicrossed<T>> {
    match form {
        Form::W => build_w_form(sys, levels),
        Form::Beta => build_beta_form(sys, levels),
    }
}

/// `Q = Σ_n w⁻ⁿ ⊗ p_n`.
pub fn intertwiner_q<T: Real>(sys: &FinDynAlgebra<T>, levels: usize) -> CMat<T> {
    let w_star = sys.w.adjoint();
    let blocks: Vec<CMat<T>> = (0..levels).map(|n| matrix_power(&w_star, n)).collect();
    GradedOperator::block_diagonal(&blocks).expect("square blocks").into_matrix()
}

/// `span{b ⊗ vⁿ : n < N, b ∈ basis A}`.
pub fn tensor_toeplitz<T: Real>(algebra: &OperatorSubspace<T>, levels: usize) -> Result<OperatorSubspace<T>> {
    let mut mats = Vec::new();
    for n in 0..levels {
        for b in algebra.basis() {
            mats.push(GradedOperator::shifted(&b, levels, n)?.into_matrix());
        }
    }
    OperatorSubspace::span(algebra.ambient() * levels, &mats)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    /// Nonzero block strictly above the diagonal.
    SupportAboveDiagonal { kappa: usize, lambda: usize, residual: f64 },
    /// A block (or `w^m T_{m,0}`) outside the algebra.
    NotInAlgebra { kappa: usize, lambda: usize, residual: f64 },
    /// β-form: `β(T_{m+λ,λ}) ≠ T_{m+λ+1,λ+1}`.
    BetaShift { kappa: usize, lambda: usize, residual: f64 },
    /// w-form: `T_{m+λ,λ} ≠ (w*)^m b_m`.
    NotToeplitz { kappa: usize, lambda: usize, residual: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub member: bool,
    pub violation: Option<Violation>,
}

/// Decides membership in the truncated semicrossed product from the blocks
/// of `t` alone. `tol` is relative to `max(1, ‖t‖_F)`.
pub fn membership_char<T: Real>(
    t: &GradedOperator<T>,
    sys: &FinDynAlgebra<T>,
    form: Form,
    tol: T,
) -> Result<MembershipReport> {
    if t.block_dim() != sys.d {
        return Err(Error::Shape(format!("block dimension {} vs algebra dimension {}", t.block_dim(), sys.d)));
    }
    let levels = t.levels();
    let thr = tol * T::one().max(t.frobenius());
    let fail = |v: Violation| Ok(MembershipReport { member: false, violation: Some(v) });
    for kappa in 0..levels {
        for lambda in kappa + 1..levels {
            let r = frobenius(&t.block(kappa, lambda)?);
            if r > thr {
                return fail(Violation::SupportAboveDiagonal { kappa, lambda, residual: to_f64(r) });
            }
        }
    }
    match form {
        Form::Beta => {
            for lambda in 0..levels {
                for kappa in lambda..levels {
                    let blk = t.block(kappa, lambda)?;
                    let r = sys.algebra.residual(&blk)?;
                    if r > thr {
                        return fail(Violation::NotInAlgebra { kappa, lambda, residual: to_f64(r) });
                    }
                    if kappa + 1 < levels {
                        let next = t.block(kappa + 1, lambda + 1)?;
                        let r = frobenius(&(sys.beta(&blk) - next));
                        if r > thr {
                            return fail(Violation::BetaShift { kappa: kappa + 1, lambda: lambda + 1, residual: to_f64(r) });
                        }
                    }
                }
            }
        }
        Form::W => {
            let w_star = sys.w.adjoint();
            for m in 0..levels {
                let b_m = matrix_power(&sys.w, m) * t.block(m, 0)?;
                let r = sys.algebra.residual(&b_m)?;
                if r > thr {
                    return fail(Violation::NotInAlgebra { kappa: m, lambda: 0, residual: to_f64(r) });
                }
                let expected = matrix_power(&w_star, m) * &b_m;
                for lambda in 1..levels - m {
                    let r = frobenius(&(t.block(m + lambda, lambda)? - &expected));
                    if r > thr {
                        return fail(Violation::NotToeplitz { kappa: m + lambda, lambda, residual: to_f64(r) });
                    }
                }
            }
        }
    }
    Ok(MembershipReport { member: true, violation: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Equal,
    SemicrossedStrictlyLarger,
    TensorStrictlyLarger,
    #[serde(rename = "intersection=rho(A)")]
    IntersectionIsRho,
    Other,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootOfUnity {
    /// Smallest `q ≥ 1` with `w^q = I`.
    pub q: usize,
    /// `dim span{W^{nq} ρ(b)}` over `nq < N`.
    pub span_dim: usize,
    pub contained_in_intersection: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TensorComparison {
    pub classification: Classification,
    pub w_in_algebra: bool,
    pub w_star_in_algebra: bool,
    /// `dim(wⁿA ∩ A)` for `n < N`.
    pub intersection_dims: Vec<usize>,
    pub tensor_dim: usize,
    pub semicrossed_dim: usize,
    pub meet_dim: usize,
    pub rho_dim: usize,
    pub gap: f64,
    pub root_of_unity: Option<RootOfUnity>,
}

/// Compares `A ⊗ 𝒯_N` with the w-form truncation of `Z+ ×_w A`.
pub fn tensor_toeplitz_compare<T: Real>(sys: &FinDynAlgebra<T>, levels: usize) -> Result<TensorComparison> {
    let tol = lit::<T>(ALGEBRA_TOL);
    let semi = build_w_form(sys, levels)?.space;
    let tensor = tensor_toeplitz(&sys.algebra, levels)?;
    let meet = semi.intersect(&tensor)?;
    let rho_dim = sys.algebra.dim();
    let (equal, gap) = semi.equals(&tensor, tol)?;
    let (semi_has_tensor, _) = semi.contains_subspace(&tensor, tol)?;
    let (tensor_has_semi, _) = tensor.contains_subspace(&semi, tol)?;
    let classification = if equal {
        Classification::Equal
    } else if semi_has_tensor {
        Classification::SemicrossedStrictlyLarger
    } else if tensor_has_semi {
        Classification::TensorStrictlyLarger
    } else if meet.dim() == rho_dim {
        Classification::IntersectionIsRho
    } else {
        Classification::Other
    };
    let mut intersection_dims = Vec::with_capacity(levels);
    for n in 0..levels {
        let wn = matrix_power(&sys.w, n);
        let shifted = sys.algebra.map(sys.d, |b| &wn * b)?;
        intersection_dims.push(shifted.intersect(&sys.algebra)?.dim());
    }
    let eye = identity::<T>(sys.d);
    let root_of_unity = match (1..levels).find(|&q| frobenius(&(matrix_power(&sys.w, q) - &eye)) <= tol) {
        None => None,
        Some(q) => {
            let mut mats = Vec::new();
            let w_star = sys.w.adjoint();
            for n in (0..levels).step_by(q) {
                let wn = matrix_power(&w_star, n);
                for b in sys.algebra.basis() {
                    mats.push(GradedOperator::shifted(&(&wn * &b), levels, n)?.into_matrix());
                }
            }
            let span = OperatorSubspace::span(sys.d * levels, &mats)?;
            let (contained, _) = meet.contains_subspace(&span, tol)?;
            Some(RootOfUnity { q, span_dim: span.dim(), contained_in_intersection: contained })
        }
    };
    Ok(TensorComparison {
        classification,
        w_in_algebra: sys.algebra.contains(&sys.w, tol)?.0,
        w_star_in_algebra: sys.algebra.contains(&sys.w.adjoint(), tol)?.0,
        intersection_dims,
        tensor_dim: tensor.dim(),
        semicrossed_dim: semi.dim(),
        meet_dim: meet.dim(),
        rho_dim,
        gap: to_f64(gap),
        root_of_unity,
    })
}

/// The β-form truncation of `Z+ ×_γ A'` with `γ = ad_{w*}`: block
/// `(λ+n, λ)` is `γ^λ(c_n)`, `c_n ∈ A'`.
pub fn predicted_commutant<T: Real>(sys: &FinDynAlgebra<T>, levels: usize) -> Result<TruncatedSemicrossed<T>> {
    let dual = sys.commutant_system()?;
    dual.check_covariance().map_err(|e| Error::InvalidAlgebra(format!("w* A' w ⊄ A': {e}")))?;
    build_beta_form(&dual, levels)
}

/// `{ρ(b), W}'` computed directly.
pub fn brute_commutant<T: Real>(sys: &FinDynAlgebra<T>, levels: usize) -> Result<OperatorSubspace<T>> {
    commutant_of_set(sys.d * levels, &sys.generators(levels))
}

/// Largest `‖XG − GX‖_F` over basis elements `X` of `s` and generators `G`.
pub fn commutation_residual<T: Real>(s: &OperatorSubspace<T>, gens: &[CMat<T>]) -> T {
    let mut worst = T::zero();
    for x in s.basis() {
        for g in gens {
            worst = worst.max(frobenius(&(&x * g - g * &x)));
        }
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutantReport {
    pub predicted_dim: usize,
    pub brute_dim: usize,
    /// `max ‖XG − GX‖_F` over the predicted basis.
    pub commutation_residual: f64,
    /// `‖(I − P_brute) Q_predicted‖`.
    pub containment_excess: f64,
    pub gap: f64,
}

pub fn commutant_check<T: Real>(sys: &FinDynAlgebra<T>, levels: usize) -> Result<CommutantReport> {
    let predicted = predicted_commutant(sys, levels)?.space;
    let brute = brute_commutant(sys, levels)?;
    Ok(CommutantReport {
        predicted_dim: predicted.dim(),
        brute_dim: brute.dim(),
        commutation_residual: to_f64(commutation_residual(&predicted, &sys.generators(levels))),
        containment_excess: to_f64(brute.excess_of(&predicted)?),
        gap: to_f64(predicted.gap(&brute)?),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BicommutantReport {
    pub algebra_bicommutant_dim: usize,
    pub predicted_dim: usize,
    pub brute_dim: usize,
    pub semicrossed_dim: usize,
    /// `‖(I − P_brute'') Q_semicrossed‖`.
    pub semicrossed_excess: f64,
    /// `‖(I − P_brute'') Q_predicted‖`.
    pub predicted_excess: f64,
    pub gap: f64,
}

/// Compares the w-form truncation over `A''` with `{ρ(b), W}''`.
pub fn bicommutant_check<T: Real>(sys: &FinDynAlgebra<T>, levels: usize) -> Result<BicommutantReport> {
    let a_prime = commutant_of_set(sys.d, &sys.algebra.basis())?;
    let a_second = commutant_of_set(sys.d, &a_prime.basis())?;
    let predicted = build_w_form(&sys.with_algebra(a_second.clone())?, levels)?.space;
    let semi = build_w_form(sys, levels)?.space;
    let brute1 = brute_commutant(sys, levels)?;
    let brute2 = commutant_of_set(sys.d * levels, &brute1.basis())?;
    Ok(BicommutantReport {
        algebra_bicommutant_dim: a_second.dim(),
        predicted_dim: predicted.dim(),
        brute_dim: brute2.dim(),
        semicrossed_dim: semi.dim(),
        semicrossed_excess: to_f64(brute2.excess_of(&semi)?),
        predicted_excess: to_f64(brute2.excess_of(&predicted)?),
        gap: to_f64(predicted.gap(&brute2)?),
    })
}

#[derive(Clone, Debug)]
pub struct ReducedWindow<T: Real> {
    pub crossed: OperatorSubspace<T>,
    pub analytic: OperatorSubspace<T>,
    /// Gap between `analytic` and `crossed ∩ 𝔗`.
    pub gap: T,
}

/// Levels `−window..=window` with the truncated bilateral shift `U`;
/// `π̂(b) = Σ_k βᵏ(b) ⊗ p_k` over the window, `β⁻¹ = ad_{w*}`.
pub fn reduced_crossed_window<T: Real>(
    m_alg: &OperatorSubspace<T>,
    w: &CMat<T>,
    window: usize,
) -> Result<ReducedWindow<T>> {
    let tol = lit::<T>(ALGEBRA_TOL);
    let d = m_alg.ambient();
    let (star_closed, e) = m_alg.contains_subspace(&m_alg.adjoint_space(), tol)?;
    if !star_closed {
        return Err(Error::InvalidAlgebra(format!("algebra is not *-closed (excess {:.3e})", to_f64(e))));
    }
    let sys = FinDynAlgebra::new(m_alg.clone(), w.clone())?;
    let (onto, e) = m_alg.equals(&m_alg.map(d, |b| sys.beta(b))?, tol)?;
    if !onto {
        return Err(Error::InvalidAlgebra(format!("w M w* ≠ M (gap {:.3e})", to_f64(e))));
    }
    let levels = 2 * window + 1;
    let pi_hat = |b: &CMat<T>| -> Vec<CMat<T>> {
        (0..levels)
            .map(|j| {
                if j >= window {
                    sys.beta_pow(b, j - window)
                } else {
                    let wk = matrix_power(&w.adjoint(), window - j);
                    &wk * b * wk.adjoint()
                }
            })
            .collect()
    };
    let mut analytic_mats = Vec::new();
    let mut anti_mats = Vec::new();
    for b in m_alg.basis() {
        let blocks = pi_hat(&b);
        for n in 0..levels {
            let mut lower = GradedOperator::zero(d, levels);
            let mut upper = GradedOperator::zero(d, levels);
            for j in 0..levels - n {
                lower.set_block(j + n, j, &blocks[j])?;
                upper.set_block(j, j + n, &blocks[j + n])?;
            }
            analytic_mats.push(lower.into_matrix());
            if n > 0 {
                anti_mats.push(upper.into_matrix());
            }
        }
    }
    let analytic = OperatorSubspace::span(d * levels, &analytic_mats)?;
    let mut all = analytic_mats;
    all.extend(anti_mats);
    let crossed = OperatorSubspace::span(d * levels, &all)?;
    let lower = crossed.intersect(&block_lower_pattern(d, levels))?;
    let gap = analytic.gap(&lower)?;
    Ok(ReducedWindow { crossed, analytic, gap })
}

/// The cyclic permutation `e_i ↦ e_{i+1 mod q}`.
pub fn cyclic_shift<T: Real>(q: usize) -> CMat<T> {
    CMat::from_fn(q, q, |i, j| if i == (j + 1) % q { Complex::new(T::one(), T::zero()) } else { Complex::new(T::zero(), T::zero()) })
}
