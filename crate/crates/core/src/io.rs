//! JSON exchange formats. Matrices are `{"rows", "cols", "data"}` with
//! row-major `[re, im]` entries.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::GradedOperator;
use crate::l1conv::{Alpha, L1Context, L1Element};
use crate::linop::{CMat, CVec, OperatorSubspace};
use crate::orbit::{FiniteDynSys, OrbitDecomposition, PointFunction, StructureReport};
use crate::reflexivity::{Method, RefResult};
use crate::scalar::{cplx, to_f64, Real};
use crate::semicrossed::{FinDynAlgebra, TruncatedSemicrossed};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix<T: Real>(m: &CMat<T>) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push([to_f64(m[(i, j)].re), to_f64(m[(i, j)].im)]);
            }
        }
        Self { rows: m.nrows(), cols: m.ncols(), data }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<CMat<T>> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Shape(format!(
                "{} entries for a {}x{} matrix",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(CMat::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.data[i * self.cols + j];
            cplx(re, im)
        }))
    }

    fn square<T: Real>(&self, n: usize, what: &str) -> Result<CMat<T>> {
        if (self.rows, self.cols) != (n, n) {
            return Err(Error::Shape(format!("{what} is {}x{}, expected {n}x{n}", self.rows, self.cols)));
        }
        self.to_matrix()
    }
}

fn vector_json<T: Real>(v: &CVec<T>) -> Vec<[f64; 2]> {
    v.iter().map(|z| [to_f64(z.re), to_f64(z.im)]).collect()
}

fn matrices<T: Real>(list: &[MatrixJson], n: usize, what: &str) -> Result<Vec<CMat<T>>> {
    list.iter().enumerate().map(|(i, m)| m.square(n, &format!("{what}[{i}]"))).collect()
}

/// A generator list for the commutant solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorsJson {
    pub ambient: usize,
    pub generators: Vec<MatrixJson>,
}

impl GeneratorsJson {
    pub fn to_matrices<T: Real>(&self) -> Result<Vec<CMat<T>>> {
        matrices(&self.generators, self.ambient, "generators")
    }
}

/// A subspace of `M_n` by a spanning list; output bases are orthonormal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub ambient: usize,
    pub basis: Vec<MatrixJson>,
}

impl SubspaceJson {
    pub fn from_subspace<T: Real>(s: &OperatorSubspace<T>) -> Self {
        Self { ambient: s.ambient(), basis: s.basis().iter().map(MatrixJson::from_matrix).collect() }
    }

    pub fn to_subspace<T: Real>(&self) -> Result<OperatorSubspace<T>> {
        OperatorSubspace::span(self.ambient, &matrices(&self.basis, self.ambient, "basis")?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradedJson {
    pub block_dim: usize,
    pub levels: usize,
    #[serde(flatten)]
    pub matrix: MatrixJson,
}

impl GradedJson {
    pub fn from_graded<T: Real>(g: &GradedOperator<T>) -> Self {
        Self { block_dim: g.block_dim(), levels: g.levels(), matrix: MatrixJson::from_matrix(g.matrix()) }
    }

    pub fn to_graded<T: Real>(&self) -> Result<GradedOperator<T>> {
        GradedOperator::new(self.block_dim, self.levels, self.matrix.to_matrix()?)
    }
}

/// A finite dynamical algebra `(A, w)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemJson {
    pub d: usize,
    pub algebra_basis: Vec<MatrixJson>,
    pub w: MatrixJson,
}

impl SystemJson {
    pub fn from_system<T: Real>(sys: &FinDynAlgebra<T>) -> Self {
        Self {
            d: sys.d(),
            algebra_basis: sys.algebra().basis().iter().map(MatrixJson::from_matrix).collect(),
            w: MatrixJson::from_matrix(sys.w()),
        }
    }

    pub fn to_system<T: Real>(&self) -> Result<FinDynAlgebra<T>> {
        let algebra = OperatorSubspace::span(self.d, &matrices(&self.algebra_basis, self.d, "algebra_basis")?)?;
        FinDynAlgebra::new(algebra, self.w.square(self.d, "w")?)
    }
}

/// Builder output: the truncated semicrossed product with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemicrossedJson {
    pub form: String,
    pub levels: usize,
    pub d: usize,
    pub algebra_dim: usize,
    pub dim: usize,
    pub subspace: SubspaceJson,
}

impl SemicrossedJson {
    pub fn from_truncated<T: Real>(t: &TruncatedSemicrossed<T>) -> Self {
        Self {
            form: t.form.name().to_string(),
            levels: t.levels,
            d: t.source.d(),
            algebra_dim: t.source.algebra().dim(),
            dim: t.dim(),
            subspace: SubspaceJson::from_subspace(&t.space),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynSystemJson {
    pub points: Vec<String>,
    pub phi: BTreeMap<String, String>,
    pub t: String,
}

impl DynSystemJson {
    pub fn from_system(sys: &FiniteDynSys) -> Self {
        Self {
            points: sys.points().to_vec(),
            phi: sys
                .points()
                .iter()
                .zip(sys.phi())
                .map(|(p, &img)| (p.clone(), sys.label(img).to_string()))
                .collect(),
            t: sys.label(sys.basepoint()).to_string(),
        }
    }

    pub fn to_system(&self) -> Result<FiniteDynSys> {
        let phi: HashMap<String, String> = self.phi.clone().into_iter().collect();
        FiniteDynSys::new(self.points.clone(), &phi, &self.t)
    }
}

/// Orbit analysis output.
#[derive(Clone, Debug, Serialize)]
pub struct StructureJson {
    pub decomposition: OrbitDecomposition,
    pub structure: StructureReport,
}

/// A function on `K` as `{"label": [re, im], ...}`.
pub type FunctionJson = BTreeMap<String, [f64; 2]>;

pub fn function_from_json<T: Real>(f: &FunctionJson) -> PointFunction<T> {
    f.iter().map(|(k, &[re, im])| (k.clone(), cplx(re, im))).collect()
}

pub fn function_to_json<T: Real>(f: &PointFunction<T>) -> FunctionJson {
    f.iter().map(|(k, z)| (k.clone(), [to_f64(z.re), to_f64(z.im)])).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaJson {
    Unitary(MatrixJson),
    Table(Vec<MatrixJson>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct L1ContextJson {
    pub d: usize,
    pub basis: Vec<MatrixJson>,
    pub alpha: AlphaJson,
}

impl L1ContextJson {
    pub fn to_context<T: Real>(&self) -> Result<Arc<L1Context<T>>> {
        let basis = matrices(&self.basis, self.d, "basis")?;
        let alpha = match &self.alpha {
            AlphaJson::Unitary(u) => Alpha::Unitary(u.square(self.d, "alpha.unitary")?),
            AlphaJson::Table(t) => Alpha::Table(matrices(t, self.d, "alpha.table")?),
        };
        L1Context::new(basis, alpha)
    }
}

/// An element together with its coefficient context.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct L1ElementJson {
    pub context: L1ContextJson,
    pub coeffs: Vec<MatrixJson>,
}

impl L1ElementJson {
    pub fn to_element<T: Real>(&self) -> Result<L1Element<T>> {
        let ctx = self.context.to_context()?;
        self.coeffs_in(&ctx)
    }

    /// The coefficients read inside an existing context.
    pub fn coeffs_in<T: Real>(&self, ctx: &Arc<L1Context<T>>) -> Result<L1Element<T>> {
        L1Element::new(ctx, matrices(&self.coeffs, ctx.d(), "coeffs")?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub xi: Vec<[f64; 2]>,
    pub element: MatrixJson,
    pub residual: f64,
}

/// Report for one reflexive-cover computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefReport {
    pub method: String,
    pub ambient: usize,
    pub dim_s: usize,
    pub dim_estimate: usize,
    pub defect_dim: usize,
    pub certified_reflexive: bool,
    pub unstable: bool,
    pub vacuous: bool,
    pub samples_used: usize,
    pub seed: u64,
    pub defect_basis: Vec<MatrixJson>,
    pub witness: Option<WitnessJson>,
}

impl RefReport {
    pub fn new<T: Real>(s: &OperatorSubspace<T>, r: &RefResult<T>) -> Result<Self> {
        let method = match r.method {
            Method::Sampled => "sampled",
            Method::Rankone => "rankone",
            Method::Pattern => "pattern",
            Method::Auto => "auto",
        };
        Ok(Self {
            method: method.to_string(),
            ambient: s.ambient(),
            dim_s: s.dim(),
            dim_estimate: r.estimate.dim(),
            defect_dim: r.defect_dim(s),
            certified_reflexive: r.certified_reflexive,
            unstable: r.unstable,
            vacuous: r.vacuous,
            samples_used: r.samples_used,
            seed: r.seed,
            defect_basis: r.defect_basis(s)?.basis().iter().map(MatrixJson::from_matrix).collect(),
            witness: r.witness.as_ref().map(|w| WitnessJson {
                xi: vector_json(&w.xi),
                element: MatrixJson::from_matrix(&w.element),
                residual: to_f64(w.residual),
            }),
        })
    }
}
