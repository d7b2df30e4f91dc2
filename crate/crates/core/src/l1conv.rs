//! Finitely supported elements of `ℓ¹(Z+, C, α)` over a C*-algebra
//! `C ⊆ M_d` with a *-endomorphism `α`, the two convolution products
//! `(δ_n⊗x) ∗_l (δ_m⊗y) = δ_{n+m}⊗α^m(x)y` and
//! `(δ_n⊗x) ∗_r (δ_m⊗y) = δ_{n+m}⊗xα^n(y)`, and the left and right
//! regular representations on `C^d ⊗ C^N`.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::GradedOperator;
use crate::linop::{frobenius, identity, operator_norm, unvectorize, vectorize, CMat, OperatorSubspace};
use crate::random;
use crate::scalar::{lit, to_f64, Real};

const RESIDUAL_TOL: f64 = 1e-10;

/// How `α` is given.
#[derive(Clone, Debug)]
pub enum Alpha<T: Real> {
    /// `α = ad_u`, `x ↦ u x u*`.
    Unitary(CMat<T>),
    /// Images of the context basis, extended linearly.
    Table(Vec<CMat<T>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// The coefficient algebra `C` together with `α`.
#[derive(Clone, Debug)]
pub struct L1Context<T: Real> {
    d: usize,
    basis: Vec<CMat<T>>,
    algebra: OperatorSubspace<T>,
    alpha: AlphaMap<T>,
}

#[derive(Clone, Debug)]
enum AlphaMap<T: Real> {
    Unitary(CMat<T>),
    /// `vec α(x) = L vec(x)` for `x ∈ C`.
    Linear(CMat<T>),
}

impl<T: Real> L1Context<T> {
    /// Validates that `span(basis)` is a unital *-algebra and that `α` is a
    /// *-endomorphism of it. A table must be given on a linearly
    /// independent basis.
    pub fn new(basis: Vec<CMat<T>>, alpha: Alpha<T>) -> Result<Arc<Self>> {
        let d = basis.first().map(|b| b.nrows()).ok_or_else(|| Error::InvalidAlgebra("empty basis".into()))?;
        let algebra = OperatorSubspace::span(d, &basis)?;
        let tol = lit::<T>(RESIDUAL_TOL);
        let closure_tol = lit::<T>(1e-8);
        if algebra.residual(&identity(d))? > closure_tol {
            return Err(Error::InvalidAlgebra("identity not in the coefficient algebra".into()));
        }
        if algebra.product_closure_residual() > closure_tol {
            return Err(Error::InvalidAlgebra("coefficient algebra not closed under products".into()));
        }
        if algebra.excess_of(&algebra.adjoint_space())? > closure_tol {
            return Err(Error::InvalidAlgebra("coefficient algebra not closed under adjoints".into()));
        }
        let alpha = match alpha {
            Alpha::Unitary(u) => {
                if u.shape() != (d, d) || !crate::linop::is_unitary(&u, tol) {
                    return Err(Error::InvalidAlgebra("α must be implemented by a d×d unitary".into()));
                }
                AlphaMap::Unitary(u)
            }
            Alpha::Table(images) => {
                if images.len() != basis.len() || algebra.dim() != basis.len() {
                    return Err(Error::InvalidAlgebra(
                        "a table needs one image per element of a linearly independent basis".into(),
                    ));
                }
                let b = CMat::from_columns(&basis.iter().map(vectorize).collect::<Vec<_>>());
                let img = CMat::from_columns(&images.iter().map(vectorize).collect::<Vec<_>>());
                let q = algebra.coords();
                let r = q.adjoint() * &b;
                let r_inv = r.try_inverse().ok_or_else(|| Error::InvalidAlgebra("basis is degenerate".into()))?;
                AlphaMap::Linear(img * r_inv * q.adjoint())
            }
        };
        let ctx = Self { d, basis, algebra, alpha };
        ctx.validate_alpha()?;
        Ok(Arc::new(ctx))
    }

    fn validate_alpha(&self) -> Result<()> {
        let tol = lit::<T>(RESIDUAL_TOL);
        let basis = self.algebra.basis();
        for (i, a) in basis.iter().enumerate() {
            let fa = self.alpha(a);
            let r = self.algebra.residual(&fa)?;
            if r > tol {
                return Err(Error::InvalidAlgebra(format!("α leaves the algebra at basis element {i} ({:.3e})", to_f64(r))));
            }
            let r = frobenius(&(self.alpha(&a.adjoint()) - fa.adjoint()));
            if r > tol {
                return Err(Error::InvalidAlgebra(format!("α does not preserve adjoints at {i} ({:.3e})", to_f64(r))));
            }
            for b in &basis {
                let r = frobenius(&(self.alpha(&(a * b)) - &fa * self.alpha(b)));
                if r > tol {
                    return Err(Error::InvalidAlgebra(format!("α is not multiplicative at {i} ({:.3e})", to_f64(r))));
                }
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// The basis as given.
    pub fn basis(&self) -> &[CMat<T>] {
        &self.basis
    }

    pub fn algebra(&self) -> &OperatorSubspace<T> {
        &self.algebra
    }

    pub fn alpha(&self, x: &CMat<T>) -> CMat<T> {
        match &self.alpha {
            AlphaMap::Unitary(u) => u * x * u.adjoint(),
            AlphaMap::Linear(l) => unvectorize((l * vectorize(x)).as_slice(), self.d),
        }
    }

    pub fn alpha_pow(&self, x: &CMat<T>, k: usize) -> CMat<T> {
        (0..k).fold(x.clone(), |y, _| self.alpha(&y))
    }

    /// Largest `‖b_i b_j − b_j b_i‖` over basis pairs.
    pub fn commutator_residual(&self) -> T {
        let mut worst = T::zero();
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(frobenius(&(a * b - b * a)));
            }
        }
        worst
    }
}

#[derive(Clone, Debug)]
pub struct L1Element<T: Real> {
    ctx: Arc<L1Context<T>>,
    coeffs: Vec<CMat<T>>,
}

impl<T: Real> L1Element<T> {
    /// Coefficients must lie in the context algebra.
    pub fn new(ctx: &Arc<L1Context<T>>, coeffs: Vec<CMat<T>>) -> Result<Self> {
        for (n, x) in coeffs.iter().enumerate() {
            let r = ctx.algebra.residual(x)?;
            if r > lit::<T>(1e-8) * T::one().max(frobenius(x)) {
                return Err(Error::InvalidAlgebra(format!("coefficient {n} is not in the algebra ({:.3e})", to_f64(r))));
            }
        }
        Ok(Self { ctx: Arc::clone(ctx), coeffs })
    }

    /// `δ_n ⊗ x`.
    pub fn monomial(ctx: &Arc<L1Context<T>>, n: usize, x: CMat<T>) -> Result<Self> {
        let mut coeffs = vec![CMat::zeros(ctx.d, ctx.d); n];
        coeffs.push(x);
        Self::new(ctx, coeffs)
    }

    /// `δ_0 ⊗ I`.
    pub fn unit(ctx: &Arc<L1Context<T>>) -> Self {
        Self { ctx: Arc::clone(ctx), coeffs: vec![identity(ctx.d)] }
    }

    /// Random element with `support` coefficients drawn from the algebra.
    pub fn random<R: Rng + ?Sized>(ctx: &Arc<L1Context<T>>, support: usize, rng: &mut R) -> Self {
        let coeffs = (0..support).map(|_| random::element(rng, &ctx.algebra)).collect();
        Self { ctx: Arc::clone(ctx), coeffs }
    }

    pub fn context(&self) -> &Arc<L1Context<T>> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[CMat<T>] {
        &self.coeffs
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// `|F|₁ = Σ ‖x_n‖`.
    pub fn l1_norm(&self) -> T {
        self.coeffs.iter().map(operator_norm).fold(T::zero(), |a, b| a + b)
    }

    fn check_context(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn convolve(&self, other: &Self, term: impl Fn(usize, &CMat<T>, usize, &CMat<T>) -> CMat<T>) -> Result<Self> {
        self.check_context(other)?;
        let d = self.ctx.d;
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(Self { ctx: Arc::clone(&self.ctx), coeffs: Vec::new() });
        }
        let mut coeffs = vec![CMat::zeros(d, d); self.coeffs.len() + other.coeffs.len() - 1];
        for (n, x) in self.coeffs.iter().enumerate() {
            for (m, y) in other.coeffs.iter().enumerate() {
                coeffs[n + m] += term(n, x, m, y);
            }
        }
        Ok(Self { ctx: Arc::clone(&self.ctx), coeffs })
    }

    /// `F ∗_l G`.
    pub fn conv_left(&self, other: &Self) -> Result<Self> {
        let ctx = Arc::clone(&self.ctx);
        self.convolve(other, |_, x, m, y| ctx.alpha_pow(x, m) * y)
    }

    /// `F ∗_r G`.
    pub fn conv_right(&self, other: &Self) -> Result<Self> {
        let ctx = Arc::clone(&self.ctx);
        self.convolve(other, |n, x, _, y| x * ctx.alpha_pow(y, n))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let d = self.ctx.d;
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = CMat::zeros(d, d);
        let coeffs = (0..len)
            .map(|i| self.coeffs.get(i).unwrap_or(&zero) - other.coeffs.get(i).unwrap_or(&zero))
            .collect();
        Ok(Self { ctx: Arc::clone(&self.ctx), coeffs })
    }

    /// `max_n ‖x_n − y_n‖_F`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.coeffs.iter().map(frobenius).fold(T::zero(), |a, b| a.max(b)))
    }
}

#[derive(Clone, Debug)]
pub struct RepImage<T: Real> {
    pub op: GradedOperator<T>,
    /// Set when coefficients beyond the truncation were dropped.
    pub truncation_warning: bool,
}

/// `π̃(x) = Σ_k α^k(x) ⊗ p_k`.
pub fn pi_tilde<T: Real>(ctx: &L1Context<T>, x: &CMat<T>, levels: usize) -> GradedOperator<T> {
    let blocks: Vec<CMat<T>> = (0..levels).map(|k| ctx.alpha_pow(x, k)).collect();
    GradedOperator::block_diagonal(&blocks).expect("blocks share a size")
}

/// `lt(F) = Σ Vⁿ π̃(x_n)` with `V = 1 ⊗ v`.
pub fn lt_rep<T: Real>(f: &L1Element<T>, levels: usize) -> RepImage<T> {
    rep(f, levels, Side::Left)
}

/// `rt(F) = Σ π̃(x_n) (V*)ⁿ`.
pub fn rt_rep<T: Real>(f: &L1Element<T>, levels: usize) -> RepImage<T> {
    rep(f, levels, Side::Right)
}

fn rep<T: Real>(f: &L1Element<T>, levels: usize, side: Side) -> RepImage<T> {
    let d = f.ctx.d;
    let mut op = GradedOperator::zero(d, levels);
    for (n, x) in f.coeffs.iter().enumerate().take(levels) {
        for lambda in 0..levels - n {
            let block = f.ctx.alpha_pow(x, lambda);
            let (row, col) = match side {
                Side::Left => (lambda + n, lambda),
                Side::Right => (lambda, lambda + n),
            };
            op.set_block(row, col, &block).expect("indices inside the grading");
        }
    }
    let truncation_warning = f.coeffs.iter().skip(levels).any(|x| frobenius(x) > T::zero());
    RepImage { op, truncation_warning }
}

/// Lower bounds for the universal left and right norms of `F`:
/// operator norms of the truncated regular representations.
#[derive(Clone, Debug, Serialize)]
pub struct NormLowerBound {
    pub levels: usize,
    pub lt_norm: f64,
    pub rt_norm: f64,
    pub l1_norm: f64,
    pub label: &'static str,
}

pub fn norm_lower_bound<T: Real>(f: &L1Element<T>, levels: usize) -> NormLowerBound {
    NormLowerBound {
        levels,
        lt_norm: to_f64(operator_norm(lt_rep(f, levels).op.matrix())),
        rt_norm: to_f64(operator_norm(rt_rep(f, levels).op.matrix())),
        l1_norm: to_f64(f.l1_norm()),
        label: "lower bound",
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OppReport {
    pub samples: usize,
    pub max_residual: f64,
    pub passed: bool,
}

/// For commutative `C`, checks `F ∗_l G = G ∗_r F` on random pairs.
pub fn opp_iso_check<T: Real, R: Rng + ?Sized>(
    ctx: &Arc<L1Context<T>>,
    samples: usize,
    support: usize,
    rng: &mut R,
) -> Result<OppReport> {
    let comm = ctx.commutator_residual();
    if comm > lit(RESIDUAL_TOL) {
        return Err(Error::Precondition(format!("coefficient algebra is not commutative ({:.3e})", to_f64(comm))));
    }
    let mut worst = T::zero();
    for _ in 0..samples {
        let f = L1Element::random(ctx, support, rng);
        let g = L1Element::random(ctx, support, rng);
        worst = worst.max(f.conv_left(&g)?.distance(&g.conv_right(&f)?)?);
    }
    Ok(OppReport { samples, max_residual: to_f64(worst), passed: worst <= lit(RESIDUAL_TOL) })
}

#[derive(Clone, Debug, Serialize)]
pub struct CovariantReport {
    pub side: Side,
    pub norm: f64,
    pub contractive: bool,
    /// Covariance residual per context basis element.
    pub residuals: Vec<f64>,
    /// `max ‖[TT*, π(b)]‖` over the basis, for left pairs.
    pub tt_star_commutator: Option<f64>,
    pub covariant: bool,
}

/// Validates a pair `(π, T)`, with `π` given by its images of the context
/// basis. Left: `π(x)T = Tπ(α(x))`. Right: `Tπ(x) = π(α(x))T`.
pub fn covariant_pair_check<T: Real>(
    ctx: &L1Context<T>,
    pi_images: &[CMat<T>],
    t: &CMat<T>,
    side: Side,
) -> Result<CovariantReport> {
    let k = ctx.basis.len();
    if pi_images.len() != k {
        return Err(Error::Shape(format!("{} images for a basis of {k}", pi_images.len())));
    }
    let m = t.nrows();
    if !t.is_square() || pi_images.iter().any(|p| p.shape() != (m, m)) {
        return Err(Error::Shape("π images and T must share a square size".into()));
    }
    let b = CMat::from_columns(&ctx.basis.iter().map(vectorize).collect::<Vec<_>>());
    let img = CMat::from_columns(&pi_images.iter().map(vectorize).collect::<Vec<_>>());
    // orthonormal bases (matrix units) invert exactly
    let b_pinv = if b.adjoint() * &b == identity(k) {
        b.adjoint()
    } else {
        b.clone().pseudo_inverse(lit(1e-12)).map_err(|e| Error::InvalidAlgebra(format!("degenerate basis: {e}")))?
    };
    let pi_lin = img * b_pinv;
    let pi = |x: &CMat<T>| unvectorize((&pi_lin * vectorize(x)).as_slice(), m);
    let tol = lit::<T>(RESIDUAL_TOL);
    for (i, x) in ctx.basis.iter().enumerate() {
        let px = pi(x);
        if frobenius(&(pi(&x.adjoint()) - px.adjoint())) > tol {
            return Err(Error::Precondition(format!("π does not preserve adjoints at basis element {i}")));
        }
        for y in &ctx.basis {
            if frobenius(&(pi(&(x * y)) - &px * pi(y))) > tol {
                return Err(Error::Precondition(format!("π is not multiplicative at basis element {i}")));
            }
        }
    }
    let norm = operator_norm(t);
    let contractive = norm <= T::one() + tol;
    let residuals: Vec<T> = ctx
        .basis
        .iter()
        .map(|x| {
            let pa = pi(&ctx.alpha(x));
            match side {
                Side::Left => frobenius(&(pi(x) * t - t * pa)),
                Side::Right => frobenius(&(t * pi(x) - pa * t)),
            }
        })
        .collect();
    let tt_star_commutator = (side == Side::Left).then(|| {
        let tt = t * t.adjoint();
        ctx.basis.iter().map(|x| frobenius(&(&tt * pi(x) - pi(x) * &tt))).fold(T::zero(), |a, b| a.max(b))
    });
    let covariant = contractive
        && residuals.iter().all(|&r| r <= tol)
        && tt_star_commutator.is_none_or(|c| c <= tol);
    Ok(CovariantReport {
        side,
        norm: to_f64(norm),
        contractive,
        residuals: residuals.into_iter().map(to_f64).collect(),
        tt_star_commutator: tt_star_commutator.map(to_f64),
        covariant,
    })
}

/// The pair `(π̃, V)` of the left regular representation on `levels`
/// levels: images of the context basis under `π̃` and the shift `V`.
pub fn regular_pair<T: Real>(ctx: &L1Context<T>, levels: usize) -> (Vec<CMat<T>>, CMat<T>) {
    let images = ctx.basis.iter().map(|x| pi_tilde(ctx, x, levels).into_matrix()).collect();
    (images, GradedOperator::shift(ctx.d, levels).into_matrix())
}
