//! The suite registry and the case runner.

mod algebra;
mod dynamics;
mod l1;
mod reflexive;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::report::{Recorder, Tolerances, VerificationReport};

type CaseFn = Box<dyn Fn(&mut Recorder) -> anyhow::Result<()> + Send + Sync>;

pub struct Case {
    pub id: String,
    run: CaseFn,
}

pub(crate) fn case(id: impl Into<String>, run: impl Fn(&mut Recorder) -> anyhow::Result<()> + Send + Sync + 'static) -> Case {
    Case { id: id.into(), run: Box::new(run) }
}

pub struct Suite {
    pub name: &'static str,
    pub summary: &'static str,
    build: fn() -> Vec<Case>,
}

impl Suite {
    pub fn cases(&self) -> Vec<Case> {
        (self.build)()
    }
}

const REGISTRY: &[Suite] = &[
    Suite { name: "fourier", summary: "Fourier coefficients, quadrature and Fejér sums", build: algebra::fourier },
    Suite { name: "prop22", summary: "block test for the β-form agrees with span membership", build: algebra::prop22 },
    Suite { name: "prop24", summary: "block test for the w-form agrees with span membership", build: algebra::prop24 },
    Suite { name: "bullets", summary: "tensor product against semicrossed product", build: algebra::bullets },
    Suite { name: "example25", summary: "root-of-unity intersections", build: algebra::example25 },
    Suite { name: "lemma26-interior", summary: "interior reflexivity over the full matrix algebra", build: reflexive::lemma26 },
    Suite { name: "prop27", summary: "G-invariant subspaces and their slot sequences", build: reflexive::prop27 },
    Suite { name: "thm28-interior", summary: "interior reflexivity from reflexive slots", build: reflexive::thm28 },
    Suite { name: "thm29-interior", summary: "interior reflexivity over reflexive algebras", build: reflexive::thm29 },
    Suite { name: "sarason", summary: "reflexive matrix algebras and the Toeplitz case", build: algebra::sarason },
    Suite { name: "ptak", summary: "tensor products with the Toeplitz algebra", build: algebra::ptak },
    Suite { name: "thm211", summary: "commutant of the semicrossed product", build: algebra::thm211 },
    Suite { name: "thm212", summary: "bicommutant of the semicrossed product", build: algebra::thm212 },
    Suite { name: "reduced214", summary: "analytic part of the reduced crossed product", build: algebra::reduced214 },
    Suite { name: "prop31", summary: "structure of the one-point algebra", build: dynamics::prop31 },
    Suite { name: "rem32", summary: "entrywise membership in the one-point algebra", build: dynamics::rem32 },
    Suite { name: "thm33-interior", summary: "interior reflexivity of one-point algebras", build: dynamics::thm33 },
    Suite { name: "rem34", summary: "coefficients from a separating subalgebra", build: dynamics::rem34 },
    Suite { name: "l1", summary: "convolution algebras and covariant pairs", build: l1::l1 },
    Suite { name: "ref-engines", summary: "agreement of the reflexive-cover engines", build: reflexive::engines },
];

const MANIFEST: &str = include_str!("../../suites.manifest");

/// Manifest lines, skipping blanks, must name the registry in order.
const fn registry_matches(registry: &[Suite], manifest: &str) -> bool {
    let m = manifest.as_bytes();
    let (mut pos, mut idx) = (0, 0);
    while pos < m.len() {
        let start = pos;
        while pos < m.len() && m[pos] != b'\n' {
            pos += 1;
        }
        let end = pos;
        pos += 1;
        if end == start {
            continue;
        }
        if idx == registry.len() {
            return false;
        }
        let name = registry[idx].name.as_bytes();
        if name.len() != end - start {
            return false;
        }
        let mut k = 0;
        while k < name.len() {
            if name[k] != m[start + k] {
                return false;
            }
            k += 1;
        }
        idx += 1;
    }
    idx == registry.len()
}

const _: () = assert!(registry_matches(REGISTRY, MANIFEST), "suite registry differs from suites.manifest");

pub fn registry() -> &'static [Suite] {
    REGISTRY
}

pub fn find(name: &str) -> Option<&'static Suite> {
    REGISTRY.iter().find(|s| s.name == name)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Seed of one case: the master generator on the stream named by the case.
pub fn case_seed(master: u64, case_id: &str) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(fnv1a(case_id));
    rng.next_u64()
}

fn run_case(case: &Case, tag: &str, master: u64, tol: Tolerances) -> VerificationReport {
    let seed = case_seed(master, &case.id);
    let mut rec = Recorder::new(seed, tol);
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| (case.run)(&mut rec)));
    let error = match outcome {
        Ok(Ok(())) => None,
        Ok(Err(e)) => Some(format!("{e:#}")),
        Err(p) => Some(match (p.downcast_ref::<&str>(), p.downcast_ref::<String>()) {
            (Some(s), _) => format!("panic: {s}"),
            (_, Some(s)) => format!("panic: {s}"),
            _ => "panic".to_string(),
        }),
    };
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    rec.finish(case.id.clone(), tag.to_string(), master, error, runtime_ms)
}

/// Runs the suites concurrently over all their cases; reports come back
/// grouped by suite in case order.
pub fn run_suites(suites: &[&Suite], master: u64, tol: Tolerances) -> Vec<(&'static str, Vec<VerificationReport>)> {
    let jobs: Vec<(usize, Case)> =
        suites.iter().enumerate().flat_map(|(i, s)| s.cases().into_iter().map(move |c| (i, c))).collect();
    let reports: Vec<(usize, VerificationReport)> =
        jobs.par_iter().map(|(i, c)| (*i, run_case(c, suites[*i].name, master, tol))).collect();
    let mut grouped: Vec<(&'static str, Vec<VerificationReport>)> = suites.iter().map(|s| (s.name, Vec::new())).collect();
    for (i, r) in reports {
        grouped[i].1.push(r);
    }
    grouped
}

pub fn run_suite(suite: &Suite, master: u64, tol: Tolerances) -> Vec<VerificationReport> {
    run_suites(&[suite], master, tol).pop().map(|(_, r)| r).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn case_ids_are_unique_and_prefixed() {
        let mut seen = HashSet::new();
        for s in registry() {
            for c in s.cases() {
                assert!(c.id.starts_with(&format!("{}/", s.name)), "{}", c.id);
                assert!(seen.insert(c.id.clone()), "duplicate {}", c.id);
            }
        }
    }

    #[test]
    fn manifest_comparison_is_exact() {
        assert!(registry_matches(REGISTRY, MANIFEST));
        assert!(!registry_matches(REGISTRY, "fourier\n"));
        assert!(!registry_matches(&REGISTRY[..1], "fourier\nprop22\n"));
        assert!(!registry_matches(&REGISTRY[..1], "fourie\n"));
        assert!(registry_matches(&REGISTRY[..1], "\nfourier\n\n"));
    }

    #[test]
    fn case_seeds_depend_on_master_and_id() {
        assert_eq!(case_seed(42, "a/b"), case_seed(42, "a/b"));
        assert_ne!(case_seed(42, "a/b"), case_seed(43, "a/b"));
        assert_ne!(case_seed(42, "a/b"), case_seed(42, "a/c"));
    }
}
