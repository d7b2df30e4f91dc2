use semicross::linop::{diag, CMat};
use semicross::orbit::{
    analyze_orbit, build_ct, dphi_membership, structure_check, uniform_subalgebra_span_check, DphiViolation,
    FiniteDynSys, PointFunction,
};
use semicross::scalar::cplx;
use semicross::Error;

use super::algebra::draw;
use super::reflexive::interior_case;
use super::{case, Case};
use crate::catalog::{dyn_systems, toeplitz};

/// `(n0, p)` of the catalogued systems, by direct reading of the maps.
fn expected_shape(id: &str) -> (usize, usize) {
    match id {
        "fixed-point" => (0, 1),
        "tail-to-fixed" => (2, 1),
        "two-cycle" => (0, 2),
        "tail2-cycle3" => (2, 3),
        "partial-orbit" => (1, 2),
        other => panic!("no expected orbit shape for `{other}`"),
    }
}

pub fn prop31() -> Vec<Case> {
    dyn_systems()
        .into_iter()
        .map(|ns| {
            let (id, sys) = (ns.id, ns.sys);
            case(format!("prop31/{id}"), move |r| {
                let levels = if id == "tail2-cycle3" { 14 } else { 12 };
                let rep = structure_check::<f64>(&sys, levels)?;
                let (n0, p) = expected_shape(id);
                r.eq("n0", rep.n0, n0);
                r.eq("p", rep.p, p);
                r.le("structure-gap", rep.gap, r.tol.gap);
                r.eq("tail", rep.dim_tail, (0..n0).map(|l| levels - l).sum());
                for (i, &k) in rep.class_dims.iter().enumerate() {
                    r.eq(format!("class-{i}"), k, levels - (n0 + i));
                }
                r.eq("ct-vs-sum", rep.dim_ct, rep.dim_sum);
                if id == "fixed-point" {
                    r.eq("ct", rep.dim_ct, levels);
                    r.le("ct-vs-toeplitz", build_ct::<f64>(&sys, levels)?.gap(&toeplitz(levels))?, r.tol.gap);
                }
                let dec = analyze_orbit(&sys, levels)?;
                let total: CMat<f64> = dec.class_projections().into_iter().fold(dec.tail_projection(), |a, b| a + b);
                r.le("projections-sum-to-identity", (total - CMat::identity(levels, levels)).norm(), r.tol.residual);
                let short = analyze_orbit(&sys, n0 + p - 1);
                r.check("short-truncation-rejected", n0 + p == 1 || matches!(short, Err(Error::TruncationTooShort { .. })));
                r.detail("structure", &rep);
                Ok(())
            })
        })
        .collect()
}

pub fn rem32() -> Vec<Case> {
    let mut cases: Vec<Case> = dyn_systems()
        .into_iter()
        .map(|ns| {
            let (id, sys) = (ns.id, ns.sys);
            case(format!("rem32/{id}"), move |r| {
                let levels = 10;
                let ct = build_ct::<f64>(&sys, levels)?;
                let (samples, mut disagreements, mut mislabeled) = (200, 0, 0);
                for i in 0..samples {
                    let inside = i % 2 == 0;
                    let t = draw(r.rng(), &ct, inside)?;
                    let by_entries = dphi_membership(&t, &sys, levels)?.member;
                    let (by_span, _) = ct.contains(&t, r.tol.gap)?;
                    disagreements += usize::from(by_entries != by_span);
                    mislabeled += usize::from(by_span != inside);
                }
                r.dim("ct", ct.dim());
                r.dim("samples", samples);
                r.eq("disagreements", disagreements, 0);
                r.eq("mislabeled-draws", mislabeled, 0);
                let v: CMat<f64> = CMat::from_fn(levels, levels, |i, j| if i == j + 1 { cplx(1.0, 0.0) } else { cplx(0.0, 0.0) });
                r.check("shift-is-member", dphi_membership(&v, &sys, levels)?.member);
                Ok(())
            })
        })
        .collect();
    cases.push(case("rem32/diagonal-pattern", |r| {
        // t → 1 → 2 → 3 → 2: n0 = 2, p = 2
        let sys = FiniteDynSys::from_indices(vec![1, 2, 3, 2], 0)?;
        let levels = 9;
        let y: [semicross::Complex<f64>; 4] = [cplx(1.0, 0.0), cplx(2.0, 0.5), cplx(-1.0, 0.0), cplx(0.0, 3.0)];
        let entries: Vec<_> = (0..levels).map(|n| if n < 2 { y[n] } else { y[2 + (n - 2) % 2] }).collect();
        r.check("periodic-diagonal-is-member", dphi_membership(&diag(&entries), &sys, levels)?.member);
        let mut broken = entries.clone();
        broken[6] += cplx(0.25, 0.0);
        let rep = dphi_membership(&diag(&broken), &sys, levels)?;
        r.check_with(
            "broken-class-rejected",
            !rep.member && matches!(rep.violation, Some(DphiViolation::Diagonal { m: 0, kappa: 2, n: 6, .. })),
            format!("{:?}", rep.violation),
        );
        Ok(())
    }));
    cases
}

pub fn thm33() -> Vec<Case> {
    dyn_systems()
        .into_iter()
        .map(|ns| {
            let sys = ns.sys;
            case(format!("thm33-interior/{}", ns.id), move |r| {
                interior_case(r, 1, |n| Ok(build_ct::<f64>(&sys, n)?))
            })
        })
        .collect()
}

fn injective_on_points(sys: &FiniteDynSys) -> PointFunction<f64> {
    sys.function(|k| cplx(k as f64 + 1.0, 0.5 * k as f64))
}

pub fn rem34() -> Vec<Case> {
    dyn_systems()
        .into_iter()
        .map(|ns| {
            let (id, sys) = (ns.id, ns.sys);
            case(format!("rem34/{id}"), move |r| {
                let levels = 10;
                let one = sys.constant(cplx(1.0, 0.0));
                let pair = uniform_subalgebra_span_check(&sys, &[one.clone(), injective_on_points(&sys)], levels)?;
                r.dim("generated-algebra", pair.algebra_dim);
                r.dim("ct", pair.ct_dim);
                r.le("separating-pair-gap", pair.gap, r.tol.gap);
                r.check("separating-pair-spans", pair.equal);
                let mut all: Vec<PointFunction<f64>> = (0..sys.points().len()).map(|k| sys.indicator(k)).collect();
                all.push(one.clone());
                let indicators = uniform_subalgebra_span_check(&sys, &all, levels)?;
                r.check("indicators-span", indicators.equal);
                let dec = analyze_orbit(&sys, levels)?;
                let constants_only = uniform_subalgebra_span_check(&sys, &[one], levels);
                if dec.n0 + dec.p >= 2 {
                    r.check("constants-rejected", matches!(constants_only, Err(Error::Precondition(_))));
                } else {
                    r.check("constants-span-single-point", constants_only.map(|u| u.equal).unwrap_or(false));
                }
                Ok(())
            })
        })
        .collect()
}
