use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semicross::graded::GradedOperator;
use semicross::linop::{identity, matrix_unit, pattern_space, CMat, CVec, OperatorSubspace};
use semicross::random;
use semicross::reflexivity::*;
use semicross::semicrossed::FinDynAlgebra;

type S = OperatorSubspace<f64>;

fn random_subspace(rng: &mut ChaCha8Rng, n: usize, k: usize) -> S {
    let mats: Vec<CMat<f64>> = (0..k).map(|_| random::matrix(rng, n, n)).collect();
    S::span(n, &mats).unwrap()
}

fn toeplitz(n: usize) -> S {
    let v = GradedOperator::<f64>::shift(1, n);
    S::span(n, &(0..n).map(|k| v.pow(k).into_matrix()).collect::<Vec<_>>()).unwrap()
}

fn pool(n: usize, len: usize, seed: u64) -> Vec<(Stratum, CVec<f64>)> {
    let mut p = VectorPool::new(n, DEFAULT_SUBSET_SIZE, seed);
    (0..len).map(|_| p.next_vector()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn estimates_contain_the_space(seed in any::<u64>(), n in 2usize..4, k in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_subspace(&mut rng, n, k);
        let a = ref_sampled(&s, default_budget(n), seed).unwrap();
        let b = ref_rankone(&s, default_starts(&s), seed).unwrap();
        prop_assert!(a.estimate.contains_subspace(&s, 1e-8).unwrap().0);
        prop_assert!(b.estimate.contains_subspace(&s, 1e-8).unwrap().0);
    }

    #[test]
    fn unitary_equivariance_with_transported_pool(seed in any::<u64>(), n in 2usize..4, k in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_subspace(&mut rng, n, k);
        let u = random::unitary(&mut rng, n);
        let v = random::unitary(&mut rng, n);
        let vectors = pool(n, 60, seed);
        let moved: Vec<_> = vectors.iter().map(|(st, x)| (*st, v.adjoint() * x)).collect();
        let r = ref_from_vectors(&s, &vectors).unwrap().estimate;
        let r_moved = ref_from_vectors(&s.conjugated(&u, &v).unwrap(), &moved).unwrap().estimate;
        prop_assert!(r.conjugated(&u, &v).unwrap().gap(&r_moved).unwrap() <= 1e-8);
    }

    #[test]
    fn monotone_on_nested_spaces(seed in any::<u64>(), n in 2usize..4, k in 1usize..4, extra in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let small = random_subspace(&mut rng, n, k);
        let big = small.sum(&random_subspace(&mut rng, n, extra)).unwrap();
        // one label for every vector so both spaces see the same constraints
        let vectors: Vec<_> = pool(n, 60, seed).into_iter().map(|(_, x)| (Stratum::Subset, x)).collect();
        let a = ref_from_vectors(&small, &vectors).unwrap().estimate;
        let b = ref_from_vectors(&big, &vectors).unwrap().estimate;
        prop_assert!(b.contains_subspace(&a, 1e-8).unwrap().0);
    }

    #[test]
    fn decompose_and_assemble_are_inverse(seed in any::<u64>(), levels in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random::unitary(&mut rng, 2);
        let sys = FinDynAlgebra::<f64>::full(w).unwrap();
        let dims: Vec<usize> = (0..levels).map(|m| (seed as usize >> (3 * m)) % 5).collect();
        let seq = random_sequence(&mut rng, 2, &dims).unwrap();
        let s = assemble_from_sequence(&seq, &sys, levels).unwrap();
        let back = g_invariant_decompose(&s, &sys, levels).unwrap();
        for (a, b) in seq.iter().zip(&back) {
            prop_assert!(a.gap(b).unwrap() <= 1e-8);
        }
        let again = assemble_from_sequence(&back, &sys, levels).unwrap();
        prop_assert!(again.gap(&s).unwrap() <= 1e-8);
    }
}

#[test]
fn monotone_on_catalogued_chain() {
    let chain = [
        S::span(2, &[matrix_unit(2, 0, 0)]).unwrap(),
        pattern_space(2, |i, j| i == j),
        pattern_space(2, |i, j| i >= j),
        S::full(2),
    ];
    let vectors: Vec<_> = pool(2, 80, 3).into_iter().map(|(_, x)| (Stratum::Subset, x)).collect();
    let estimates: Vec<S> = chain.iter().map(|s| ref_from_vectors(s, &vectors).unwrap().estimate).collect();
    for w in estimates.windows(2) {
        assert!(w[1].contains_subspace(&w[0], 1e-8).unwrap().0);
    }
    let t3 = toeplitz(3);
    let lower = pattern_space(3, |i, j| i >= j);
    let vectors: Vec<_> = pool(3, 120, 4).into_iter().map(|(_, x)| (Stratum::Subset, x)).collect();
    let a = ref_from_vectors(&t3, &vectors).unwrap().estimate;
    let b = ref_from_vectors(&lower, &vectors).unwrap().estimate;
    assert!(b.contains_subspace(&a, 1e-8).unwrap().0);
}

#[test]
fn engines_agree_on_catalogue() {
    let d2t4 = {
        let sys = FinDynAlgebra::<f64>::diagonal(identity(2)).unwrap();
        semicross::semicrossed::build_w_form(&sys, 4).unwrap().space
    };
    let cases = [
        S::span(2, &[matrix_unit(2, 0, 0)]).unwrap(),
        pattern_space(3, |i, j| i >= j),
        pattern_space(3, |i, j| i == j || j == 2),
        pattern_space(4, |i, j| (i + j) % 2 == 0),
        S::full(3),
        toeplitz(2),
        toeplitz(3),
        d2t4,
    ];
    for (i, s) in cases.iter().enumerate() {
        let n = s.ambient();
        let a = ref_sampled(s, default_budget(n), 7).unwrap();
        let b = ref_rankone(s, default_starts(s), 7).unwrap();
        assert!(a.estimate.gap(&b.estimate).unwrap() <= 1e-8, "case {i}: {} vs {}", a.estimate.dim(), b.estimate.dim());
        assert_eq!(a.certified_reflexive, b.certified_reflexive, "case {i}");
    }
}

#[test]
fn non_invariant_space_is_rejected() {
    let sys = FinDynAlgebra::<f64>::full(identity(2)).unwrap();
    let mut t = GradedOperator::<f64>::zero(2, 2);
    t.set_block(0, 0, &identity(2)).unwrap();
    t.set_block(1, 0, &identity(2)).unwrap();
    t.set_block(1, 1, &identity(2)).unwrap();
    let s = S::span(4, &[t.into_matrix()]).unwrap();
    assert!(matches!(g_invariant_decompose(&s, &sys, 2), Err(semicross::Error::NotGInvariant { .. })));
}
