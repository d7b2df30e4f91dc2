//! One-point algebras of a finite dynamical system `φ: K → K`.
//!
//! The orbit of the basepoint `t` visits `n0` transient points and then a
//! cycle of length `p`. On `N` levels, `π_t(f) = diag(f(φⁿ(t)))` and the
//! one-point algebra is `C_t = span{vⁿ π_t(f)}` with `v e_n = e_{n+1}`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::GradedOperator;
use crate::linop::{diag, generated_unital_algebra, matrix_power, pattern_space, CMat, OperatorSubspace};
use crate::scalar::{cabs, cone, czero, lit, to_f64, Real};

const GAP_TOL: f64 = 1e-8;
const ENTRY_TOL: f64 = 1e-10;
/// Values closer than this do not separate two points.
const SEPARATION_TOL: f64 = 1e-12;

/// A function on `K`, keyed by point label.
pub type PointFunction<T> = BTreeMap<String, Complex<T>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDynSys {
    points: Vec<String>,
    phi: Vec<usize>,
    t: usize,
}

impl FiniteDynSys {
    /// `phi` must be defined on every label and take values in `points`.
    pub fn new(points: Vec<String>, phi: &HashMap<String, String>, t: &str) -> Result<Self> {
        let index: HashMap<&str, usize> = points.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
        if index.len() != points.len() {
            return Err(Error::Precondition("duplicate point labels".into()));
        }
        let lookup = |label: &str| index.get(label).copied().ok_or_else(|| Error::UnknownPoint(label.to_string()));
        for key in phi.keys() {
            lookup(key)?;
        }
        let mut map = Vec::with_capacity(points.len());
        for p in &points {
            let image = phi.get(p).ok_or_else(|| Error::FunctionUndefined(p.clone()))?;
            map.push(lookup(image)?);
        }
        let t = lookup(t)?;
        Ok(Self { points, phi: map, t })
    }

    /// System on the labels `0..phi.len()` rendered as strings.
    pub fn from_indices(phi: Vec<usize>, t: usize) -> Result<Self> {
        let n = phi.len();
        if let Some(&bad) = phi.iter().find(|&&x| x >= n) {
            return Err(Error::UnknownPoint(bad.to_string()));
        }
        if t >= n {
            return Err(Error::UnknownPoint(t.to_string()));
        }
        Ok(Self { points: (0..n).map(|i| i.to_string()).collect(), phi, t })
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn phi(&self) -> &[usize] {
        &self.phi
    }

    pub fn basepoint(&self) -> usize {
        self.t
    }

    pub fn label(&self, k: usize) -> &str {
        &self.points[k]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.points.iter().position(|p| p == label).ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }

    /// Index of `φⁿ(t)`.
    pub fn iterate(&self, n: usize) -> usize {
        (0..n).fold(self.t, |x, _| self.phi[x])
    }

    /// Point indices `φⁿ(t)` for `n < levels`.
    pub fn level_points(&self, levels: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(levels);
        let mut x = self.t;
        for _ in 0..levels {
            out.push(x);
            x = self.phi[x];
        }
        out
    }

    pub fn indicator<T: Real>(&self, k: usize) -> PointFunction<T> {
        self.function(|j| if j == k { cone() } else { czero() })
    }

    pub fn constant<T: Real>(&self, c: Complex<T>) -> PointFunction<T> {
        self.function(|_| c)
    }

    /// The function `k ↦ f(k)` on point indices.
    pub fn function<T: Real>(&self, mut f: impl FnMut(usize) -> Complex<T>) -> PointFunction<T> {
        self.points.iter().enumerate().map(|(k, p)| (p.clone(), f(k))).collect()
    }

    fn values<T: Real>(&self, f: &PointFunction<T>) -> Result<Vec<Complex<T>>> {
        if let Some(extra) = f.keys().find(|k| !self.points.contains(k)) {
            return Err(Error::UnknownPoint(extra.clone()));
        }
        self.points.iter().map(|p| f.get(p).copied().ok_or_else(|| Error::FunctionUndefined(p.clone()))).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitDecomposition {
    pub n0: usize,
    pub p: usize,
    pub levels: usize,
    /// `t, φ(t), …, φ^{n0+p−1}(t)`.
    pub orbit: Vec<String>,
    pub tail_indices: Vec<usize>,
    pub cycle_classes: Vec<Vec<usize>>,
}

impl OrbitDecomposition {
    /// Diagonal projection onto the given level indices.
    fn projection<T: Real>(&self, idx: &[usize]) -> CMat<T> {
        let mut p = CMat::zeros(self.levels, self.levels);
        for &i in idx {
            p[(i, i)] = cone();
        }
        p
    }

    pub fn tail_projection<T: Real>(&self) -> CMat<T> {
        self.projection(&self.tail_indices)
    }

    pub fn class_projections<T: Real>(&self) -> Vec<CMat<T>> {
        self.cycle_classes.iter().map(|c| self.projection(c)).collect()
    }
}

pub fn analyze_orbit(sys: &FiniteDynSys, levels: usize) -> Result<OrbitDecomposition> {
    let mut first_visit = vec![usize::MAX; sys.points.len()];
    let mut orbit = Vec::new();
    let mut x = sys.t;
    let (n0, p) = loop {
        let step = orbit.len();
        if first_visit[x] != usize::MAX {
            break (first_visit[x], step - first_visit[x]);
        }
        first_visit[x] = step;
        orbit.push(sys.points[x].clone());
        x = sys.phi[x];
    };
    assert!(p >= 1);
    if levels < n0 + p {
        return Err(Error::TruncationTooShort { levels, required: n0 + p });
    }
    let tail_indices = (0..n0).collect();
    let cycle_classes = (0..p).map(|i| (n0 + i..levels).step_by(p).collect()).collect();
    Ok(OrbitDecomposition { n0, p, levels, orbit, tail_indices, cycle_classes })
}

/// `π_t(f) = diag(f(t), f(φ(t)), …)` on `levels` levels.
pub fn build_pi_t<T: Real>(sys: &FiniteDynSys, f: &PointFunction<T>, levels: usize) -> Result<CMat<T>> {
    let vals = sys.values(f)?;
    let entries: Vec<Complex<T>> = sys.level_points(levels).into_iter().map(|k| vals[k]).collect();
    Ok(diag(&entries))
}

fn shift<T: Real>(levels: usize) -> CMat<T> {
    GradedOperator::<T>::shift(1, levels).into_matrix()
}

/// `span{vⁿ π_t(δ_k)}` over `n < levels` and orbit points `k`.
pub fn build_ct<T: Real>(sys: &FiniteDynSys, levels: usize) -> Result<OperatorSubspace<T>> {
    let dec = analyze_orbit(sys, levels)?;
    let pts = sys.level_points(levels);
    let orbit: Vec<usize> = pts[..dec.n0 + dec.p].to_vec();
    let v = shift::<T>(levels);
    let mut gens = Vec::new();
    for &k in &orbit {
        let pi = build_pi_t(sys, &sys.indicator::<T>(k), levels)?;
        for n in 0..levels {
            gens.push(matrix_power(&v, n) * &pi);
        }
    }
    OperatorSubspace::span(levels, &gens)
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub n0: usize,
    pub p: usize,
    pub levels: usize,
    pub dim_ct: usize,
    pub dim_tail: usize,
    /// `Σ_{λ<n0} (N − λ)`.
    pub expected_tail_dim: usize,
    pub class_dims: Vec<usize>,
    pub dim_sum: usize,
    pub gap: f64,
    pub equal: bool,
}

/// Compares `C_t` with `𝔗P_{n0} ⊕ 𝒯P_0 ⊕ … ⊕ 𝒯P_{p−1}` built directly.
pub fn structure_check<T: Real>(sys: &FiniteDynSys, levels: usize) -> Result<StructureReport> {
    let dec = analyze_orbit(sys, levels)?;
    let ct = build_ct::<T>(sys, levels)?;
    let n0 = dec.n0;
    let tail = pattern_space::<T>(levels, |i, j| j < n0 && i >= j);
    let v = shift::<T>(levels);
    let mut total = tail.clone();
    let mut class_dims = Vec::with_capacity(dec.p);
    for p_i in dec.class_projections::<T>() {
        let gens: Vec<CMat<T>> = (0..levels).map(|m| matrix_power(&v, m) * &p_i).collect();
        let toeplitz_i = OperatorSubspace::span(levels, &gens)?;
        class_dims.push(toeplitz_i.dim());
        total = total.sum(&toeplitz_i)?;
    }
    let gap = ct.gap(&total)?;
    Ok(StructureReport {
        n0,
        p: dec.p,
        levels,
        dim_ct: ct.dim(),
        dim_tail: tail.dim(),
        expected_tail_dim: (0..n0).map(|l| levels - l).sum(),
        class_dims,
        dim_sum: total.dim(),
        gap: to_f64(gap),
        equal: gap <= lit(GAP_TOL),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DphiViolation {
    /// A nonzero entry above the diagonal.
    Upper { row: usize, col: usize, value: f64 },
    /// `T_{m+κ,κ} ≠ T_{m+n,n}` although `φ^κ(t) = φⁿ(t)`.
    Diagonal { m: usize, kappa: usize, n: usize, residual: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DphiReport {
    pub member: bool,
    pub violation: Option<DphiViolation>,
}

/// Entrywise membership test in `C_t`: `T` is lower triangular and each
/// diagonal `m` is constant along levels mapped to the same orbit point.
pub fn dphi_membership<T: Real>(t: &CMat<T>, sys: &FiniteDynSys, levels: usize) -> Result<DphiReport> {
    if t.shape() != (levels, levels) {
        return Err(Error::Shape(format!("operator is {}x{}, expected {levels}x{levels}", t.nrows(), t.ncols())));
    }
    let tol = lit::<T>(ENTRY_TOL) * T::one().max(crate::linop::frobenius(t));
    let report = |v| Ok(DphiReport { member: false, violation: Some(v) });
    for col in 0..levels {
        for row in 0..col {
            if cabs(t[(row, col)]) > tol {
                return report(DphiViolation::Upper { row, col, value: to_f64(cabs(t[(row, col)])) });
            }
        }
    }
    let pts = sys.level_points(levels);
    let mut first_level: HashMap<usize, usize> = HashMap::new();
    for (n, &k) in pts.iter().enumerate() {
        let kappa = *first_level.entry(k).or_insert(n);
        if kappa == n {
            continue;
        }
        for m in 0..levels - n {
            let r = cabs(t[(m + kappa, kappa)] - t[(m + n, n)]);
            if r > tol {
                return report(DphiViolation::Diagonal { m, kappa, n, residual: to_f64(r) });
            }
        }
    }
    Ok(DphiReport { member: true, violation: None })
}

#[derive(Clone, Debug, Serialize)]
pub struct UniformReport {
    /// Dimension of the unital algebra generated on the orbit.
    pub algebra_dim: usize,
    pub span_dim: usize,
    pub ct_dim: usize,
    pub gap: f64,
    pub equal: bool,
}

/// Whether coefficients from the unital algebra generated by `funcs`
/// already span `C_t`. `funcs` must contain a nonzero constant and
/// separate the points of the orbit.
pub fn uniform_subalgebra_span_check<T: Real>(
    sys: &FiniteDynSys,
    funcs: &[PointFunction<T>],
    levels: usize,
) -> Result<UniformReport> {
    let dec = analyze_orbit(sys, levels)?;
    let orbit: Vec<usize> = sys.level_points(dec.n0 + dec.p);
    let vals: Vec<Vec<Complex<T>>> = funcs.iter().map(|f| sys.values(f)).collect::<Result<_>>()?;
    let sep = lit::<T>(SEPARATION_TOL);
    let is_constant = |v: &Vec<Complex<T>>| v.iter().all(|&z| cabs(z - v[0]) <= sep) && cabs(v[0]) > sep;
    if !vals.iter().any(is_constant) {
        return Err(Error::Precondition("the family contains no nonzero constant function".into()));
    }
    for (a, &x) in orbit.iter().enumerate() {
        for &y in &orbit[a + 1..] {
            if vals.iter().all(|v| cabs(v[x] - v[y]) <= sep) {
                return Err(Error::Precondition(format!(
                    "points `{}` and `{}` of the orbit are not separated",
                    sys.label(x),
                    sys.label(y)
                )));
            }
        }
    }
    let restricted: Vec<CMat<T>> =
        vals.iter().map(|v| diag(&orbit.iter().map(|&k| v[k]).collect::<Vec<_>>())).collect();
    let algebra = generated_unital_algebra(orbit.len(), &restricted)?;
    let v = shift::<T>(levels);
    let mut gens = Vec::new();
    for g in algebra.basis() {
        let f = sys.function(|k| match orbit.iter().position(|&o| o == k) {
            Some(i) => g[(i, i)],
            None => czero(),
        });
        let pi = build_pi_t(sys, &f, levels)?;
        for n in 0..levels {
            gens.push(matrix_power(&v, n) * &pi);
        }
    }
    let span = OperatorSubspace::span(levels, &gens)?;
    let ct = build_ct::<T>(sys, levels)?;
    let gap = span.gap(&ct)?;
    Ok(UniformReport {
        algebra_dim: algebra.dim(),
        span_dim: span.dim(),
        ct_dim: ct.dim(),
        gap: to_f64(gap),
        equal: gap <= lit(GAP_TOL),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::identity;
    use crate::scalar::cplx;

    fn labelled(pairs: &[(&str, &str)], t: &str) -> FiniteDynSys {
        let points = pairs.iter().map(|(a, _)| a.to_string()).collect();
        let phi = pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        FiniteDynSys::new(points, &phi, t).unwrap()
    }

    fn rho_shape() -> FiniteDynSys {
        labelled(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "c")], "a")
    }

    #[test]
    fn preperiod_and_period() {
        let d = analyze_orbit(&rho_shape(), 14).unwrap();
        assert_eq!((d.n0, d.p), (2, 3));
        assert_eq!(d.orbit, ["a", "b", "c", "d", "e"]);
        assert_eq!(d.cycle_classes[1], vec![3, 6, 9, 12]);
        let fixed = labelled(&[("a", "a")], "a");
        let d = analyze_orbit(&fixed, 3).unwrap();
        assert_eq!((d.n0, d.p, d.cycle_classes.len()), (0, 1, 1));
        assert_eq!(d.cycle_classes[0], vec![0, 1, 2]);
    }

    #[test]
    fn short_truncation_reports_minimum() {
        let err = analyze_orbit(&rho_shape(), 4).unwrap_err();
        assert_eq!(err, Error::TruncationTooShort { levels: 4, required: 5 });
    }

    #[test]
    fn pi_t_evaluates_along_orbit() {
        let sys = rho_shape();
        let pi = build_pi_t(&sys, &sys.indicator::<f64>(1), 6).unwrap();
        let expected: Vec<_> = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0].iter().map(|&x| cplx(x, 0.0)).collect();
        assert_eq!(pi, diag(&expected));
        let one = build_pi_t(&sys, &sys.constant(cone::<f64>()), 6).unwrap();
        assert_eq!(one, identity(6));
    }

    #[test]
    fn missing_function_value_is_an_error() {
        let sys = rho_shape();
        let mut f = sys.constant(cone::<f64>());
        f.remove("d");
        assert_eq!(build_pi_t(&sys, &f, 6).unwrap_err(), Error::FunctionUndefined("d".into()));
    }

    #[test]
    fn tail_dimension_formula() {
        let r = structure_check::<f64>(&rho_shape(), 14).unwrap();
        assert!(r.equal, "gap {}", r.gap);
        assert_eq!(r.dim_tail, 27);
        assert_eq!(r.expected_tail_dim, 27);
        assert_eq!(r.dim_ct, r.dim_sum);
    }

    #[test]
    fn fixed_point_gives_toeplitz() {
        let sys = labelled(&[("a", "a"), ("b", "a")], "a");
        let r = structure_check::<f64>(&sys, 7).unwrap();
        assert!(r.equal);
        assert_eq!(r.dim_ct, 7);
    }

    #[test]
    fn dphi_patterns() {
        let sys = labelled(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "c")], "a");
        let y = [1.0, 2.0, 3.0, 4.0, 3.0, 4.0, 3.0, 4.0];
        let t: CMat<f64> = diag(&y.iter().map(|&x| cplx(x, 0.0)).collect::<Vec<_>>());
        assert!(dphi_membership(&t, &sys, 8).unwrap().member);
        let mut bad = t.clone();
        bad[(6, 6)] = cplx(5.0, 0.0);
        let r = dphi_membership(&bad, &sys, 8).unwrap();
        assert_eq!(r.violation, Some(DphiViolation::Diagonal { m: 0, kappa: 2, n: 6, residual: 2.0 }));
        assert!(dphi_membership(&shift::<f64>(8), &sys, 8).unwrap().member);
    }

    #[test]
    fn separating_family_spans() {
        let sys = rho_shape();
        let f = sys.function(|k| cplx::<f64>(k as f64, 0.0));
        let r = uniform_subalgebra_span_check(&sys, &[sys.constant(cone()), f], 8).unwrap();
        assert!(r.equal);
        assert_eq!(r.algebra_dim, 5);
        let err = uniform_subalgebra_span_check(&sys, &[sys.constant(cone::<f64>())], 8).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
