//! The product algebra `B = ∏_x M_{n_x}(ℂ)` over a finite index set.
//!
//! An [`AlgebraElement`] holds one `n_x × n_x` block per point. Indicator
//! elements `χ_U` are identity blocks on `U` and zero elsewhere. The spectral
//! checks at the bottom of the module confirm that images of indicators are
//! idempotents with spectrum in `{0, 1}` and that images of nonnegative
//! functions have nonnegative spectrum.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::filters::{FilterError, Subset, Universe};
use crate::json::MatrixJson;
use crate::linalg::{self, CMatrix};
use crate::reps::Representation;

/// Default relative tolerance used by every numerical decision.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("index set mismatch")]
    IndexSetMismatch,
    #[error("not idempotent: ‖e² − e‖ = {defect:e} exceeds {bound:e}")]
    NotIdempotent { defect: f64, bound: f64 },
    #[error("spectrum check failed: {0}")]
    SpectrumViolation(String),
    #[error("index set is not abelian: point {label:?} has dimension {dim}")]
    NonAbelian { label: String, dim: usize },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}

impl From<FilterError> for AlgebraError {
    fn from(e: FilterError) -> Self {
        AlgebraError::InvalidInput(e.to_string())
    }
}

/// A finite index set with the dimension `n_x ≥ 1` of each factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IndexSetJson", into = "IndexSetJson")]
pub struct IndexSet {
    universe: Universe,
    dims: Vec<usize>,
}

impl IndexSet {
    pub fn new(universe: Universe, dims: Vec<usize>) -> Result<Self, AlgebraError> {
        if dims.len() != universe.len() {
            return Err(AlgebraError::InvalidInput(format!(
                "{} dimensions for {} points",
                dims.len(),
                universe.len()
            )));
        }
        if let Some(i) = dims.iter().position(|&d| d == 0) {
            return Err(AlgebraError::InvalidInput(format!(
                "point {:?} has dimension 0",
                universe.label(i)
            )));
        }
        Ok(IndexSet { universe, dims })
    }

    pub fn from_pairs<S: Into<String>, I: IntoIterator<Item = (S, usize)>>(
        points: I,
    ) -> Result<Self, AlgebraError> {
        let (labels, dims): (Vec<String>, Vec<usize>) =
            points.into_iter().map(|(l, d)| (l.into(), d)).unzip();
        IndexSet::new(Universe::new(labels)?, dims)
    }

    /// The abelian algebra `ℂ(X)`: every factor one-dimensional.
    pub fn abelian(universe: Universe) -> Self {
        let dims = vec![1; universe.len()];
        IndexSet { universe, dims }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn label(&self, i: usize) -> &str {
        self.universe.label(i)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.universe.index_of(label)
    }

    pub fn is_abelian(&self) -> bool {
        self.dims.iter().all(|&d| d == 1)
    }

    /// Total dimension `Σ n_x²` of the algebra.
    pub fn algebra_dim(&self) -> usize {
        self.dims.iter().map(|d| d * d).sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PointJson {
    label: String,
    dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct IndexSetJson {
    points: Vec<PointJson>,
}

impl TryFrom<IndexSetJson> for IndexSet {
    type Error = AlgebraError;

    fn try_from(json: IndexSetJson) -> Result<Self, Self::Error> {
        IndexSet::from_pairs(json.points.into_iter().map(|p| (p.label, p.dim)))
    }
}

impl From<IndexSet> for IndexSetJson {
    fn from(set: IndexSet) -> Self {
        let points = set
            .universe
            .labels()
            .iter()
            .zip(&set.dims)
            .map(|(label, &dim)| PointJson {
                label: label.clone(),
                dim,
            })
            .collect();
        IndexSetJson { points }
    }
}

/// An element of `B`: one square block per point of the index set.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    index_set: IndexSet,
    blocks: Vec<CMatrix>,
}

impl AlgebraElement {
    pub fn new(index_set: IndexSet, blocks: Vec<CMatrix>) -> Result<Self, AlgebraError> {
        if blocks.len() != index_set.len() {
            return Err(AlgebraError::InvalidInput(format!(
                "{} blocks for {} points",
                blocks.len(),
                index_set.len()
            )));
        }
        for (i, b) in blocks.iter().enumerate() {
            let n = index_set.dim(i);
            if b.nrows() != n || b.ncols() != n {
                return Err(AlgebraError::InvalidInput(format!(
                    "block at {:?} is {}x{}, expected {n}x{n}",
                    index_set.label(i),
                    b.nrows(),
                    b.ncols()
                )));
            }
            if !linalg::is_finite(b) {
                return Err(AlgebraError::InvalidInput("non-finite entry".into()));
            }
        }
        Ok(AlgebraElement { index_set, blocks })
    }

    pub fn from_fn<F: FnMut(usize) -> CMatrix>(index_set: &IndexSet, f: F) -> Result<Self, AlgebraError> {
        let blocks = (0..index_set.len()).map(f).collect();
        AlgebraElement::new(index_set.clone(), blocks)
    }

    pub fn zero(index_set: &IndexSet) -> Self {
        indicator(index_set, Subset::EMPTY).expect("empty set is a subset")
    }

    pub fn unit(index_set: &IndexSet) -> Self {
        indicator(index_set, index_set.universe().full()).expect("full set is a subset")
    }

    /// The matrix unit `e^{(x)}_{ij}` (zero-based `i`, `j`).
    pub fn matrix_unit(index_set: &IndexSet, x: usize, i: usize, j: usize) -> Self {
        let blocks = (0..index_set.len())
            .map(|y| {
                let n = index_set.dim(y);
                if y == x {
                    linalg::matrix_unit(n, i, j)
                } else {
                    linalg::zeros(n, n)
                }
            })
            .collect();
        AlgebraElement {
            index_set: index_set.clone(),
            blocks,
        }
    }

    /// Entries drawn uniformly from the unit square `[-1, 1] + [-1, 1]i`.
    pub fn random<R: Rng + ?Sized>(index_set: &IndexSet, rng: &mut R) -> Self {
        let blocks = index_set
            .dims()
            .iter()
            .map(|&n| {
                CMatrix::from_fn(n, n, |_, _| {
                    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
                })
            })
            .collect();
        AlgebraElement {
            index_set: index_set.clone(),
            blocks,
        }
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index_set
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMatrix {
        &self.blocks[i]
    }

    /// `max_x ‖b(x)‖₂`, the norm of `B` as a product of matrix algebras.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::op_norm).fold(0.0, f64::max)
    }

    fn zip_with<F>(&self, other: &Self, f: F) -> Result<Self, AlgebraError>
    where
        F: Fn(&CMatrix, &CMatrix) -> CMatrix,
    {
        if self.index_set != other.index_set {
            return Err(AlgebraError::IndexSetMismatch);
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(AlgebraElement {
            index_set: self.index_set.clone(),
            blocks,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        AlgebraElement {
            index_set: self.index_set.clone(),
            blocks: self.blocks.iter().map(|b| b * s).collect(),
        }
    }

    /// `max_x ‖a(x) − b(x)‖₂`.
    pub fn distance(&self, other: &Self) -> Result<f64, AlgebraError> {
        Ok(self.sub(other)?.norm())
    }

    pub fn to_json(&self) -> ElementJson {
        let blocks = self
            .index_set
            .universe()
            .labels()
            .iter()
            .zip(&self.blocks)
            .map(|(l, b)| (l.clone(), MatrixJson::from(b)))
            .collect();
        ElementJson { blocks }
    }

    pub fn from_json(index_set: &IndexSet, json: ElementJson) -> Result<Self, AlgebraError> {
        let mut blocks: Vec<Option<CMatrix>> = vec![None; index_set.len()];
        for (label, m) in json.blocks {
            let i = index_set
                .index_of(&label)
                .ok_or_else(|| AlgebraError::InvalidInput(format!("unknown label {label:?}")))?;
            blocks[i] = Some(CMatrix::try_from(m).map_err(AlgebraError::InvalidInput)?);
        }
        let blocks = blocks
            .into_iter()
            .enumerate()
            .map(|(i, b)| {
                b.ok_or_else(|| {
                    AlgebraError::InvalidInput(format!("missing block {:?}", index_set.label(i)))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        AlgebraElement::new(index_set.clone(), blocks)
    }
}

/// `{"blocks": {label: matrix, ...}}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    pub blocks: BTreeMap<String, MatrixJson>,
}

/// The indicator `χ_U`: identity blocks on `U`, zero blocks elsewhere.
pub fn indicator(index_set: &IndexSet, set: Subset) -> Result<AlgebraElement, AlgebraError> {
    if !index_set.universe().contains_subset(set) {
        return Err(AlgebraError::InvalidInput(
            "set is not contained in the index set".into(),
        ));
    }
    let blocks = index_set
        .dims()
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            if set.contains(i) {
                linalg::identity(n)
            } else {
                linalg::zeros(n, n)
            }
        })
        .collect();
    Ok(AlgebraElement {
        index_set: index_set.clone(),
        blocks,
    })
}

/// Eigenvalues with algebraic multiplicity, sorted by `(re, im)`.
pub fn spectrum(m: &CMatrix) -> Result<Vec<Complex64>, AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::InvalidInput(format!(
            "spectrum of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    if !linalg::is_finite(m) {
        return Err(AlgebraError::InvalidInput("non-finite entry".into()));
    }
    linalg::eigenvalues(m).ok_or(AlgebraError::NoConvergence)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdempotentSpectrum {
    #[serde(with = "crate::json::complex_vec")]
    pub eigenvalues: Vec<Complex64>,
    pub zeros: usize,
    pub ones: usize,
    /// Largest distance from an eigenvalue to `{0, 1}`.
    pub max_deviation: f64,
    pub idempotent_defect: f64,
}

/// Confirm that an idempotent has spectrum in `{0, 1}`, containing both
/// values unless `e` is `0` or `I`.
pub fn check_idempotent_spectrum(e: &CMatrix, tol: f64) -> Result<IdempotentSpectrum, AlgebraError> {
    if !e.is_square() {
        return Err(AlgebraError::InvalidInput("idempotent must be square".into()));
    }
    let norm = linalg::op_norm(e);
    let bound = tol * (1.0 + norm * norm);
    let defect = linalg::op_norm(&(e * e - e));
    if defect > bound {
        return Err(AlgebraError::NotIdempotent { defect, bound });
    }
    let eigenvalues = spectrum(e)?;
    let one = Complex64::new(1.0, 0.0);
    let mut zeros = 0;
    let mut ones = 0;
    let mut max_deviation: f64 = 0.0;
    for &z in &eigenvalues {
        let (d0, d1) = (z.norm(), (z - one).norm());
        if d0 <= d1 {
            zeros += 1;
        } else {
            ones += 1;
        }
        max_deviation = max_deviation.max(d0.min(d1));
    }
    if max_deviation > bound {
        return Err(AlgebraError::SpectrumViolation(format!(
            "eigenvalue at distance {max_deviation:e} from {{0, 1}}"
        )));
    }
    let n = e.nrows();
    let is_zero = norm <= tol;
    let is_identity = linalg::op_norm(&(e - linalg::identity(n))) <= tol * (1.0 + norm);
    if !is_zero && ones == 0 {
        return Err(AlgebraError::SpectrumViolation(
            "nonzero idempotent without eigenvalue 1".into(),
        ));
    }
    if !is_identity && zeros == 0 {
        return Err(AlgebraError::SpectrumViolation(
            "idempotent other than I without eigenvalue 0".into(),
        ));
    }
    Ok(IdempotentSpectrum {
        eigenvalues,
        zeros,
        ones,
        max_deviation,
        idempotent_defect: defect,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositiveSpectrum {
    #[serde(with = "crate::json::complex_vec")]
    pub eigenvalues: Vec<Complex64>,
    pub min_real: f64,
    pub max_abs_imag: f64,
}

/// For `ℂ(X)` and a nonnegative function `f`, confirm `σ(π(f)) ⊂ [0, ∞)`.
pub fn check_positive_spectrum(
    f: &AlgebraElement,
    rep: &Representation,
    tol: f64,
) -> Result<PositiveSpectrum, AlgebraError> {
    let index_set = f.index_set();
    if let Some(i) = index_set.dims().iter().position(|&d| d != 1) {
        return Err(AlgebraError::NonAbelian {
            label: index_set.label(i).to_string(),
            dim: index_set.dim(i),
        });
    }
    if rep.index_set() != index_set {
        return Err(AlgebraError::IndexSetMismatch);
    }
    for (i, b) in f.blocks().iter().enumerate() {
        let z = b[(0, 0)];
        if z.im != 0.0 || z.re < 0.0 {
            return Err(AlgebraError::InvalidInput(format!(
                "f({:?}) = {z} is not real and nonnegative",
                index_set.label(i)
            )));
        }
    }
    let image = rep.evaluate(f).map_err(|e| AlgebraError::InvalidInput(e.to_string()))?;
    let eigenvalues = spectrum(&image)?;
    let min_real = eigenvalues.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let max_abs_imag = eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let bound = tol * (1.0 + linalg::op_norm(&image));
    if min_real < -bound || max_abs_imag > bound {
        return Err(AlgebraError::SpectrumViolation(format!(
            "eigenvalue outside [0, ∞): min real {min_real:e}, max |imag| {max_abs_imag:e}"
        )));
    }
    Ok(PositiveSpectrum {
        eigenvalues,
        min_real,
        max_abs_imag,
    })
}

/// Serialize a spectrum as `[[re, im], ...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumJson {
    #[serde(with = "crate::json::complex_vec")]
    pub eigenvalues: Vec<Complex64>,
}
