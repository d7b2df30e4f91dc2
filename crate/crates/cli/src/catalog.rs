//! Fixed instances the verification suites run on.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semicross::linop::{diag, identity, matrix_unit, pattern_space, CMat, OperatorSubspace};
use semicross::orbit::FiniteDynSys;
use semicross::random;
use semicross::scalar::cplx;
use semicross::semicrossed::{cyclic_shift, FinDynAlgebra};

pub type Sys = FinDynAlgebra<f64>;
pub type Space = OperatorSubspace<f64>;

pub struct NamedSystem {
    pub id: &'static str,
    pub sys: Sys,
}

/// The unitary shared by the instances that need a generic one.
pub fn generic_unitary(d: usize) -> CMat<f64> {
    random::unitary(&mut ChaCha8Rng::seed_from_u64(11), d)
}

fn phase(theta: f64) -> semicross::Complex<f64> {
    cplx(theta.cos(), theta.sin())
}

/// An angle with `θ/π` irrational.
pub fn irrational_angle() -> f64 {
    2.0 * PI * (2f64.sqrt() - 1.0)
}

pub fn upper_triangular(d: usize) -> Space {
    pattern_space(d, |i, j| i <= j)
}

pub fn system(id: &str) -> Sys {
    systems().into_iter().find(|s| s.id == id).unwrap_or_else(|| panic!("no catalogued system `{id}`")).sys
}

pub fn systems() -> Vec<NamedSystem> {
    let one = cplx(1.0, 0.0);
    let theta = irrational_angle();
    let pair = OperatorSubspace::span(2, &[identity(2), matrix_unit(2, 0, 0)]).expect("square");
    let list: Vec<(&'static str, Sys)> = vec![
        ("scalar-trivial", Sys::scalar(identity(1)).unwrap()),
        ("scalar-sign", Sys::scalar(diag(&[one, cplx(-1.0, 0.0)])).unwrap()),
        ("scalar-irrational", Sys::scalar(diag(&[one, phase(theta)])).unwrap()),
        ("diag-identity", Sys::diagonal(identity(2)).unwrap()),
        ("diag-cyclic", Sys::diagonal(cyclic_shift(2)).unwrap()),
        ("diag-cyclic3", Sys::diagonal(cyclic_shift(3)).unwrap()),
        ("full-identity", Sys::full(identity(2)).unwrap()),
        ("full-generic", Sys::full(generic_unitary(2)).unwrap()),
        ("upper-phase", Sys::new(upper_triangular(2), diag(&[one, cplx(0.0, 1.0)])).unwrap()),
        ("pair-irrational", Sys::new(pair, diag(&[one, phase(theta)])).unwrap()),
    ];
    list.into_iter().map(|(id, sys)| NamedSystem { id, sys }).collect()
}

pub struct NamedDynSys {
    pub id: &'static str,
    pub sys: FiniteDynSys,
}

/// One system per orbit shape: `(n0, p)` = (0,1), (2,1), (0,2), (2,3), and
/// a system with points off the orbit of `t`.
pub fn dyn_systems() -> Vec<NamedDynSys> {
    let list: Vec<(&'static str, Vec<usize>, usize)> = vec![
        ("fixed-point", vec![0, 0], 0),
        ("tail-to-fixed", vec![1, 2, 2], 0),
        ("two-cycle", vec![1, 0], 0),
        ("tail2-cycle3", vec![1, 2, 3, 4, 2], 0),
        ("partial-orbit", vec![1, 2, 1, 0, 4], 0),
    ];
    list.into_iter()
        .map(|(id, phi, t)| NamedDynSys { id, sys: FiniteDynSys::from_indices(phi, t).expect("valid map") })
        .collect()
}

pub fn toeplitz(n: usize) -> Space {
    let v = semicross::graded::GradedOperator::<f64>::shift(1, n);
    let powers: Vec<CMat<f64>> = (0..n).map(|k| v.pow(k).into_matrix()).collect();
    OperatorSubspace::span(n, &powers).expect("square")
}

pub struct RefCase {
    pub id: &'static str,
    pub space: Space,
    /// Pattern description when the space is a pattern span.
    pub pattern: Option<Vec<(usize, usize)>>,
}

fn pattern_case(id: &'static str, n: usize, keep: impl Fn(usize, usize) -> bool) -> RefCase {
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| keep(i, j)).collect();
    let space = pattern_space(n, |i, j| cells.contains(&(i, j)));
    RefCase { id, space, pattern: Some(cells) }
}

/// Spaces on which both reflexive-cover engines are compared.
pub fn ref_cases() -> Vec<RefCase> {
    let d2t4 = semicross::semicrossed::build_w_form(&Sys::diagonal(identity(2)).unwrap(), 4).unwrap().space;
    vec![
        RefCase { id: "corner-unit", space: OperatorSubspace::span(2, &[matrix_unit(2, 0, 0)]).unwrap(), pattern: None },
        pattern_case("lower-triangular-3", 3, |i, j| i >= j),
        pattern_case("diagonal-and-column-3", 3, |i, j| i == j || j == 2),
        pattern_case("checkerboard-4", 4, |i, j| (i + j) % 2 == 0),
        pattern_case("full-3", 3, |_, _| true),
        RefCase { id: "toeplitz-2", space: toeplitz(2), pattern: None },
        RefCase { id: "toeplitz-3", space: toeplitz(3), pattern: None },
        RefCase { id: "diag-toeplitz-4", space: d2t4, pattern: None },
    ]
}
