use std::sync::Arc;

use semicross::linop::{identity, matrix_unit, zeros, CMat, OperatorSubspace};
use semicross::l1conv::{
    covariant_pair_check, lt_rep, norm_lower_bound, opp_iso_check, regular_pair, rt_rep, Alpha, L1Context, L1Element,
    Side,
};
use semicross::random;
use semicross::semicrossed::{build_beta_form, cyclic_shift, FinDynAlgebra};
use semicross::Error;

use super::{case, Case};
use crate::catalog::generic_unitary;
use crate::report::Recorder;

type Ctx = Arc<L1Context<f64>>;
type El = L1Element<f64>;

fn diagonal_basis() -> Vec<CMat<f64>> {
    vec![matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)]
}

/// `(id, context, commutative)`.
fn contexts() -> Vec<(&'static str, Ctx, bool)> {
    let units: Vec<CMat<f64>> = (0..2).flat_map(|i| (0..2).map(move |j| matrix_unit(2, i, j))).collect();
    vec![
        ("diag-swap", L1Context::new(diagonal_basis(), Alpha::Unitary(cyclic_shift(2))).unwrap(), true),
        // α(diag(a, b)) = diag(a, a): unital, not injective
        ("diag-collapse", L1Context::new(diagonal_basis(), Alpha::Table(vec![identity(2), zeros(2, 2)])).unwrap(), true),
        ("full-generic", L1Context::new(units, Alpha::Unitary(generic_unitary(2))).unwrap(), false),
    ]
}

pub fn l1() -> Vec<Case> {
    let mut cases: Vec<Case> = contexts()
        .into_iter()
        .map(|(id, ctx, commutative)| case(format!("l1/{id}"), move |r| context_case(r, &ctx, commutative)))
        .collect();
    cases.push(case("l1/lt-image-is-beta-form", |r| {
        let levels = 5;
        let w = cyclic_shift(2);
        let ctx = L1Context::new(diagonal_basis(), Alpha::Unitary(w.clone()))?;
        let mut mats = Vec::new();
        for n in 0..levels {
            for x in diagonal_basis() {
                mats.push(lt_rep(&El::monomial(&ctx, n, x)?, levels).op.into_matrix());
            }
        }
        let image = OperatorSubspace::span(2 * levels, &mats)?;
        let beta = build_beta_form(&FinDynAlgebra::diagonal(w)?, levels)?.space;
        r.le("lt-image-vs-beta-form", image.gap(&beta)?, r.tol.gap);
        r.eq("image", image.dim(), 2 * levels);
        Ok(())
    }));
    cases
}

fn context_case(r: &mut Recorder, ctx: &Ctx, commutative: bool) -> anyhow::Result<()> {
    let tol = r.tol.residual;
    let levels = 6;
    let (mut assoc, mut submult, mut lt_hom, mut rt_hom) = (0f64, 0f64, 0f64, 0f64);
    let triples = 30;
    for _ in 0..triples {
        let [f, g, h] = [0, 1, 2].map(|_| El::random(ctx, 3, r.rng()));
        assoc = assoc.max(f.conv_left(&g)?.conv_left(&h)?.distance(&f.conv_left(&g.conv_left(&h)?)?)?);
        assoc = assoc.max(f.conv_right(&g)?.conv_right(&h)?.distance(&f.conv_right(&g.conv_right(&h)?)?)?);
        let bound = f.l1_norm() * g.l1_norm();
        submult = submult.max(f.conv_left(&g)?.l1_norm() / bound).max(f.conv_right(&g)?.l1_norm() / bound);
        let prod = lt_rep(&f, levels).op.mul(&lt_rep(&g, levels).op)?;
        lt_hom = lt_hom.max(lt_rep(&f.conv_left(&g)?, levels).op.sub(&prod)?.frobenius());
        let prod = rt_rep(&f, levels).op.mul(&rt_rep(&g, levels).op)?;
        rt_hom = rt_hom.max(rt_rep(&f.conv_right(&g)?, levels).op.sub(&prod)?.frobenius());
    }
    r.dim("triples", triples);
    r.le("associativity", assoc, tol);
    r.le("submultiplicativity-ratio", submult, 1.0 + tol);
    r.le("lt-homomorphism", lt_hom, tol);
    r.le("rt-homomorphism", rt_hom, tol);

    let f = El::random(ctx, 3, r.rng());
    let unit = El::unit(ctx);
    let unit_err = [f.conv_left(&unit)?, unit.conv_left(&f)?, f.conv_right(&unit)?, unit.conv_right(&f)?]
        .iter()
        .map(|x| x.distance(&f))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0f64, f64::max);
    r.le("two-sided-unit", unit_err, tol);

    let x = random::element(r.rng(), ctx.algebra());
    let y = random::element(r.rng(), ctx.algebra());
    let lhs = El::monomial(ctx, 1, x.clone())?.conv_left(&El::monomial(ctx, 1, y.clone())?)?;
    let rhs = El::monomial(ctx, 2, ctx.alpha(&x) * &y)?;
    r.le("left-monomial-rule", lhs.distance(&rhs)?, tol);
    let lhs = El::monomial(ctx, 1, x.clone())?.conv_right(&El::monomial(ctx, 1, y.clone())?)?;
    let rhs = El::monomial(ctx, 2, &x * ctx.alpha(&y))?;
    r.le("right-monomial-rule", lhs.distance(&rhs)?, tol);
    let plain = El::monomial(ctx, 2, &x * &y)?;
    let left_zero = El::monomial(ctx, 2, x.clone())?.conv_left(&El::monomial(ctx, 0, y.clone())?)?;
    let right_zero = El::monomial(ctx, 0, x.clone())?.conv_right(&El::monomial(ctx, 2, y.clone())?)?;
    r.le("degree-zero-factor-is-plain-product", left_zero.distance(&plain)?.max(right_zero.distance(&plain)?), tol);

    let opp = opp_iso_check(ctx, 20, 4, r.rng());
    if commutative {
        let opp = opp?;
        r.le("opposite-identity", opp.max_residual, tol);
        r.check("opposite-identity-passed", opp.passed);
    } else {
        r.check("noncommutative-opposite-rejected", matches!(opp, Err(Error::Precondition(_))));
    }

    let (images, v) = regular_pair(ctx, 5);
    let left = covariant_pair_check(ctx, &images, &v, Side::Left)?;
    r.check("regular-pair-left-covariant", left.covariant);
    r.le("regular-pair-left-residual", left.residuals.iter().copied().fold(0.0, f64::max), tol);
    let right = covariant_pair_check(ctx, &images, &v.adjoint(), Side::Right)?;
    r.check("adjoint-pair-right-covariant", right.covariant);
    let doubled = covariant_pair_check(ctx, &images, &(&v * semicross::scalar::cplx(2.0, 0.0)), Side::Left)?;
    r.check("doubled-shift-not-contractive", !doubled.contractive && !doubled.covariant);

    let bound = norm_lower_bound(&f, levels);
    r.check("lower-bounds-below-l1-norm", bound.lt_norm <= bound.l1_norm * (1.0 + tol) && bound.rt_norm <= bound.l1_norm * (1.0 + tol));
    r.gap("lt-norm-lower-bound", bound.lt_norm);
    r.gap("rt-norm-lower-bound", bound.rt_norm);
    r.gap("l1-norm", bound.l1_norm);
    Ok(())
}
