use rand::Rng;
use semicross::linop::{matrix_unit, pattern_space, OperatorSubspace};
use semicross::reflexivity::{
    assemble_from_sequence, default_budget, default_starts, g_invariant_decompose, interior_ref_defect,
    pattern_ref_oracle, random_sequence, ref_rankone, ref_sampled, strictly_decreasing_ratio, InteriorDefect,
    PatternMeta,
};
use semicross::semicrossed::{build_w_form, intertwiner_q};

use super::{case, Case};
use crate::catalog::{ref_cases, system, upper_triangular, Space, Sys};
use crate::report::Recorder;

pub const INTERIOR_LEVELS: [usize; 3] = [8, 12, 16];
pub const MARGIN: usize = 1;

/// Interior defect of the spaces `space_at(N)` across the truncations.
/// The ratio condition holds vacuously when no truncation has a defect.
pub(crate) fn interior_case(
    r: &mut Recorder,
    block_dim: usize,
    space_at: impl Fn(usize) -> anyhow::Result<Space>,
) -> anyhow::Result<()> {
    let mut reports: Vec<InteriorDefect> = Vec::new();
    for n in INTERIOR_LEVELS {
        let s = space_at(n)?;
        let seed = r.rng().random::<u64>();
        let rep = interior_ref_defect(&s, block_dim, MARGIN, default_budget(s.ambient()), seed)?;
        r.dim(format!("N={n}/space"), rep.dim_s);
        r.dim(format!("N={n}/estimate"), rep.dim_estimate);
        r.dim(format!("N={n}/defect"), rep.defect_dim);
        r.le(format!("N={n}/interior-excess"), rep.interior_excess, r.tol.gap);
        reports.push(rep);
    }
    let ratios: Vec<String> = reports.iter().map(|x| format!("{:.4}", x.defect_ratio)).collect();
    let no_defect = reports.iter().all(|x| x.defect_dim == 0);
    r.check_with("defect-ratio-strictly-decreasing", no_defect || strictly_decreasing_ratio(&reports), ratios.join(" > "));
    r.detail("interior", &reports);
    Ok(())
}

fn semicrossed_interior(suite: &str, ids: &[&'static str]) -> Vec<Case> {
    ids.iter()
        .map(|&id| {
            let sys = system(id);
            case(format!("{suite}/{id}"), move |r| {
                interior_case(r, sys.d(), |n| Ok(build_w_form(&sys, n)?.space))
            })
        })
        .collect()
}

pub fn lemma26() -> Vec<Case> {
    semicrossed_interior("lemma26-interior", &["full-identity", "full-generic"])
}

pub fn thm29() -> Vec<Case> {
    semicrossed_interior("thm29-interior", &["scalar-trivial", "diag-identity", "diag-cyclic", "upper-phase"])
}

/// Reflexive slot spaces of `M_2`, cycled along the levels.
fn reflexive_slots(levels: usize) -> Vec<Space> {
    let kinds = [
        pattern_space(2, |i, j| i == j),
        OperatorSubspace::span(2, &[matrix_unit(2, 0, 0)]).unwrap(),
        upper_triangular(2),
        OperatorSubspace::full(2),
    ];
    (0..levels).map(|m| kinds[m % kinds.len()].clone()).collect()
}

pub fn thm28() -> Vec<Case> {
    ["full-identity", "full-generic"]
        .into_iter()
        .map(|id| {
            let sys = system(id);
            case(format!("thm28-interior/{id}"), move |r| {
                interior_case(r, 2, |n| Ok(assemble_from_sequence(&reflexive_slots(n), &sys, n)?))
            })
        })
        .collect()
}

pub fn prop27() -> Vec<Case> {
    ["full-identity", "full-generic"]
        .into_iter()
        .map(|id| {
            let sys = system(id);
            case(format!("prop27/{id}"), move |r| round_trips(r, &sys, 4, 25))
        })
        .collect()
}

fn round_trips(r: &mut Recorder, sys: &Sys, levels: usize, count: usize) -> anyhow::Result<()> {
    let d = sys.d();
    let (mut slot_gap, mut space_gap) = (0f64, 0f64);
    for _ in 0..count {
        let dims: Vec<usize> = (0..levels).map(|_| r.rng().random_range(0..=d * d)).collect();
        let seq = random_sequence(r.rng(), d, &dims)?;
        let s = assemble_from_sequence(&seq, sys, levels)?;
        let back = g_invariant_decompose(&s, sys, levels)?;
        for (a, b) in seq.iter().zip(&back) {
            slot_gap = slot_gap.max(a.gap(b)?);
        }
        space_gap = space_gap.max(assemble_from_sequence(&back, sys, levels)?.gap(&s)?);
    }
    r.dim("samples", count);
    r.le("decompose-after-assemble", slot_gap, r.tol.gap);
    r.le("assemble-after-decompose", space_gap, r.tol.gap);
    let full = build_w_form(sys, levels)?.space;
    let slots = g_invariant_decompose(&full, sys, levels)?;
    r.check("full-space-has-full-slots", slots.iter().all(|x| x.dim() == d * d));
    Ok(())
}

pub fn engines() -> Vec<Case> {
    let mut cases: Vec<Case> = ref_cases()
        .into_iter()
        .map(|rc| {
            case(format!("ref-engines/{}", rc.id), move |r| {
                let s = &rc.space;
                let a = ref_sampled(s, default_budget(s.ambient()), r.seed())?;
                let b = ref_rankone(s, default_starts(s), r.seed())?;
                r.dim("space", s.dim());
                r.dim("sampled-estimate", a.estimate.dim());
                r.dim("rankone-estimate", b.estimate.dim());
                r.le("space-inside-sampled", a.estimate.excess_of(s)?, r.tol.gap);
                r.le("space-inside-rankone", b.estimate.excess_of(s)?, r.tol.gap);
                r.le("sampled-vs-rankone", a.estimate.gap(&b.estimate)?, r.tol.gap);
                r.check("certificates-agree", a.certified_reflexive == b.certified_reflexive);
                r.check("sampled-stable", !a.unstable);
                if let Some(cells) = &rc.pattern {
                    let meta = PatternMeta { n: s.ambient(), pattern: cells.clone(), left: None, right: None };
                    r.check("pattern-oracle-certifies", pattern_ref_oracle(s, &meta)?.certified_reflexive);
                    r.check("sampled-certifies-pattern", a.certified_reflexive);
                }
                match rc.id {
                    "toeplitz-2" => {
                        r.eq("defect", a.defect_dim(s), 1);
                    }
                    "corner-unit" | "full-3" => {
                        r.check("certified", a.certified_reflexive);
                    }
                    _ => {}
                }
                Ok(())
            })
        })
        .collect();
    cases.push(case("ref-engines/twisted-pattern", |r| {
        let levels = 3;
        let keep = |i: usize, j: usize| i % 2 == j % 2 && i / 2 >= j / 2;
        let cells: Vec<(usize, usize)> =
            (0..2 * levels).flat_map(|i| (0..2 * levels).map(move |j| (i, j))).filter(|&(i, j)| keep(i, j)).collect();
        let q = intertwiner_q(&system("diag-cyclic"), levels);
        let meta = PatternMeta { n: 2 * levels, pattern: cells, left: Some(q.clone()), right: Some(q.adjoint()) };
        let s = meta.space()?;
        let oracle = pattern_ref_oracle(&s, &meta)?;
        let sampled = ref_sampled(&s, default_budget(s.ambient()), r.seed())?;
        r.dim("space", s.dim());
        r.check("pattern-oracle-certifies", oracle.certified_reflexive);
        r.check("sampled-certifies", sampled.certified_reflexive);
        let plain: Space = pattern_space(2 * levels, keep);
        let mismatch = PatternMeta { n: 2 * levels, pattern: vec![(0, 0)], left: None, right: None };
        r.check("oracle-refuses-wrong-description", pattern_ref_oracle(&plain, &mismatch).is_err());
        r.eq("twist-preserves-dim", s.dim(), plain.dim());
        Ok(())
    }));
    cases
}
