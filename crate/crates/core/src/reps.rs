//! Finite-dimensional representations of the product algebra `B`.
//!
//! A [`Representation`] on `ℂ^m` is given by the images `π(e^{(x)}_{ij})` of
//! the matrix units of every factor. Over a finite index set these generate
//! `B` linearly, so validation reduces to the matrix-unit relations
//!
//! ```text
//! π(e^{(x)}_{ij}) π(e^{(y)}_{kl}) = δ_{xy} δ_{jk} π(e^{(x)}_{il}),   Σ_x Σ_i π(e^{(x)}_{ii}) = I_m.
//! ```
//!
//! Every representation is equivalent to a direct sum `⊕_{y∈Y} I_{m_y} ⊗ p_y`
//! of factor projections `p_y(b) = b(y)`. [`decompose`] computes the support
//! `Y`, the multiplicities `m_y` and an explicit intertwiner; irreducible
//! representations correspond exactly to principal ultrafilters on the index
//! set ([`extract_filter`], [`build_from_filter`]).
//!
//! All numerical decisions take a relative tolerance, normally
//! [`DEFAULT_TOL`](crate::algebra::DEFAULT_TOL). Rank decisions cut off at
//! `tol · σ_max`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{indicator, AlgebraElement, AlgebraError, IndexSet};
use crate::filters::{partition_select, Filter, FilterError, Partition, Subset};
use crate::json::MatrixJson;
use crate::linalg::{self, CMatrix};

/// Number of random probe elements used to verify a decomposition.
pub const RANDOM_PROBES: usize = 20;
const PROBE_SEED: u64 = 0x005e_ed0f_b10c;
/// Largest index set for which subset enumerations are run.
pub const MAX_ENUMERATED_POINTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("index set mismatch")]
    IndexSetMismatch,
    #[error("not a representation: {relation} violated by {violation:e} (bound {bound:e})")]
    NotARepresentation {
        relation: String,
        violation: f64,
        bound: f64,
    },
    #[error("not irreducible: commutant has dimension {commutant_dim}")]
    NotIrreducible { commutant_dim: usize },
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("decomposition failed: {0}")]
    DecompositionFailure(String),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl RepError {
    /// Stable machine-readable reason.
    pub fn code(&self) -> &'static str {
        match self {
            RepError::InvalidInput(_) => "invalid_input",
            RepError::IndexSetMismatch => "index_set_mismatch",
            RepError::NotARepresentation { .. } => "not_a_representation",
            RepError::NotIrreducible { .. } => "not_irreducible",
            RepError::Inconsistent(_) => "inconsistent",
            RepError::DecompositionFailure(_) => "decomposition_failure",
            RepError::Filter(FilterError::NotAFilter(_)) => "not_a_filter",
            RepError::Filter(FilterError::NotUltrafilter { .. }) => "not_an_ultrafilter",
            RepError::Filter(_) => "invalid_filter",
            RepError::Algebra(AlgebraError::NotIdempotent { .. }) => "not_idempotent",
            RepError::Algebra(_) => "algebra_error",
        }
    }
}

/// A representation of `B` on `ℂ^m`, stored as matrix-unit images.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    index_set: IndexSet,
    carrier_dim: usize,
    // images[x][i * n_x + j] = π(e^{(x)}_{ij})
    images: Vec<Vec<CMatrix>>,
}

impl Representation {
    /// Checks shapes only; see [`Representation::validate`] for the relations.
    pub fn new(
        index_set: IndexSet,
        carrier_dim: usize,
        images: Vec<Vec<CMatrix>>,
    ) -> Result<Self, RepError> {
        if carrier_dim == 0 {
            return Err(RepError::InvalidInput(
                "carrier dimension 0 admits no unital representation".into(),
            ));
        }
        if images.len() != index_set.len() {
            return Err(RepError::InvalidInput(format!(
                "images for {} points, index set has {}",
                images.len(),
                index_set.len()
            )));
        }
        for (x, per_point) in images.iter().enumerate() {
            let n = index_set.dim(x);
            if per_point.len() != n * n {
                return Err(RepError::InvalidInput(format!(
                    "point {:?} needs {} images, got {}",
                    index_set.label(x),
                    n * n,
                    per_point.len()
                )));
            }
            for m in per_point {
                if m.nrows() != carrier_dim || m.ncols() != carrier_dim {
                    return Err(RepError::InvalidInput(format!(
                        "image at {:?} is {}x{}, carrier dimension is {carrier_dim}",
                        index_set.label(x),
                        m.nrows(),
                        m.ncols()
                    )));
                }
                if !linalg::is_finite(m) {
                    return Err(RepError::InvalidInput("non-finite image entry".into()));
                }
            }
        }
        Ok(Representation {
            index_set,
            carrier_dim,
            images,
        })
    }

    /// Build from a function of `(x, i, j)` with zero-based indices.
    pub fn from_fn<F>(index_set: &IndexSet, carrier_dim: usize, mut f: F) -> Result<Self, RepError>
    where
        F: FnMut(usize, usize, usize) -> CMatrix,
    {
        let images = (0..index_set.len())
            .map(|x| {
                let n = index_set.dim(x);
                (0..n * n).map(|ij| f(x, ij / n, ij % n)).collect()
            })
            .collect();
        Representation::new(index_set.clone(), carrier_dim, images)
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index_set
    }

    pub fn carrier_dim(&self) -> usize {
        self.carrier_dim
    }

    /// `π(e^{(x)}_{ij})`, zero-based.
    pub fn image(&self, x: usize, i: usize, j: usize) -> &CMatrix {
        let n = self.index_set.dim(x);
        &self.images[x][i * n + j]
    }

    /// All generator images as `(x, i, j, π(e^{(x)}_{ij}))`.
    pub fn generators(&self) -> impl Iterator<Item = (usize, usize, usize, &CMatrix)> {
        self.images.iter().enumerate().flat_map(move |(x, per_point)| {
            let n = self.index_set.dim(x);
            per_point
                .iter()
                .enumerate()
                .map(move |(ij, m)| (x, ij / n, ij % n, m))
        })
    }

    /// Check the matrix-unit relations and unitality.
    ///
    /// Residuals are measured in the Frobenius norm (an upper bound for the
    /// operator norm) relative to `1 + ‖π(a)‖·‖π(b)‖`.
    pub fn validate(&self, tol: f64) -> Result<ValidationReport, RepError> {
        let gens: Vec<_> = self.generators().collect();
        let norms: Vec<f64> = gens.iter().map(|g| linalg::op_norm(g.3)).collect();
        let mut worst = 0.0f64;
        let mut worst_relation = String::from("none");
        let mut checked = 0usize;
        let mut note = |rel: f64, describe: &dyn Fn() -> String| {
            if rel > worst || worst_relation == "none" {
                worst = worst.max(rel);
                worst_relation = describe();
            }
        };
        for (a, (x, i, j, pa)) in gens.iter().enumerate() {
            for (b, (y, k, l, pb)) in gens.iter().enumerate() {
                let mut residual = *pa * *pb;
                if x == y && j == k {
                    residual -= self.image(*x, *i, *l);
                }
                let rel = residual.norm() / (1.0 + norms[a] * norms[b]);
                checked += 1;
                note(rel, &|| {
                    let lx = self.index_set.label(*x);
                    let ly = self.index_set.label(*y);
                    format!(
                        "e[{lx}:{}:{}]·e[{ly}:{}:{}]",
                        i + 1,
                        j + 1,
                        k + 1,
                        l + 1
                    )
                });
            }
        }
        let mut sum = linalg::zeros(self.carrier_dim, self.carrier_dim);
        for x in 0..self.index_set.len() {
            for i in 0..self.index_set.dim(x) {
                sum += self.image(x, i, i);
            }
        }
        let unit_rel =
            (&sum - linalg::identity(self.carrier_dim)).norm() / (1.0 + linalg::op_norm(&sum));
        checked += 1;
        note(unit_rel, &|| "unitality Σ e[x:i:i] = I".to_string());
        if worst > tol {
            return Err(RepError::NotARepresentation {
                relation: worst_relation,
                violation: worst,
                bound: tol,
            });
        }
        Ok(ValidationReport {
            valid: true,
            relations_checked: checked,
            worst_violation: worst,
            worst_relation,
        })
    }

    /// `π(b) = Σ_x Σ_{ij} b(x)_{ij} π(e^{(x)}_{ij})`.
    pub fn evaluate(&self, b: &AlgebraElement) -> Result<CMatrix, RepError> {
        if b.index_set() != &self.index_set {
            return Err(RepError::IndexSetMismatch);
        }
        let mut out = linalg::zeros(self.carrier_dim, self.carrier_dim);
        for (x, i, j, g) in self.generators() {
            let coeff = b.block(x)[(i, j)];
            if coeff != Complex64::new(0.0, 0.0) {
                out += g * coeff;
            }
        }
        Ok(out)
    }

    /// `π(χ_{x}) = Σ_i π(e^{(x)}_{ii})`.
    pub fn projector(&self, x: usize) -> CMatrix {
        let mut out = linalg::zeros(self.carrier_dim, self.carrier_dim);
        for i in 0..self.index_set.dim(x) {
            out += self.image(x, i, i);
        }
        out
    }

    /// `π(χ_U)`.
    pub fn indicator_image(&self, set: Subset) -> CMatrix {
        let mut out = linalg::zeros(self.carrier_dim, self.carrier_dim);
        for x in set.indices().filter(|&x| x < self.index_set.len()) {
            out += self.projector(x);
        }
        out
    }

    /// `b ↦ S π(b) S⁻¹`.
    pub fn conjugate(&self, s: &CMatrix) -> Result<Self, RepError> {
        if s.nrows() != self.carrier_dim || s.ncols() != self.carrier_dim {
            return Err(RepError::InvalidInput("conjugator has wrong shape".into()));
        }
        let s_inv = linalg::inverse(s)
            .ok_or_else(|| RepError::InvalidInput("conjugator is singular".into()))?;
        let images = self
            .images
            .iter()
            .map(|per_point| per_point.iter().map(|g| s * g * &s_inv).collect())
            .collect();
        Representation::new(self.index_set.clone(), self.carrier_dim, images)
    }

    /// `π ⊕ ρ` on `ℂ^{m_π + m_ρ}`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, RepError> {
        if self.index_set != other.index_set {
            return Err(RepError::IndexSetMismatch);
        }
        let images = self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(ga, gb)| linalg::block_diagonal(&[ga, gb]))
                    .collect()
            })
            .collect();
        Representation::new(
            self.index_set.clone(),
            self.carrier_dim + other.carrier_dim,
            images,
        )
    }

    /// `I_k ⊗ π`: `k` consecutive copies of `π`.
    pub fn tensor_identity(&self, k: usize) -> Result<Self, RepError> {
        if k == 0 {
            return Err(RepError::InvalidInput("multiplicity must be positive".into()));
        }
        let eye = linalg::identity(k);
        let images = self
            .images
            .iter()
            .map(|per_point| per_point.iter().map(|g| linalg::kron(&eye, g)).collect())
            .collect();
        Representation::new(self.index_set.clone(), self.carrier_dim * k, images)
    }

    fn point(&self, label: &str) -> Result<usize, RepError> {
        self.index_set
            .index_of(label)
            .ok_or_else(|| RepError::InvalidInput(format!("unknown label {label:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub relations_checked: usize,
    pub worst_violation: f64,
    pub worst_relation: String,
}

/// `{"index_set": ..., "carrier_dim": m, "images": {"x:i:j": matrix, ...}}`
/// with one-based `i`, `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationJson {
    pub index_set: IndexSet,
    pub carrier_dim: usize,
    pub images: BTreeMap<String, MatrixJson>,
}

impl From<&Representation> for RepresentationJson {
    fn from(rep: &Representation) -> Self {
        let images = rep
            .generators()
            .map(|(x, i, j, g)| {
                (
                    format!("{}:{}:{}", rep.index_set.label(x), i + 1, j + 1),
                    MatrixJson::from(g),
                )
            })
            .collect();
        RepresentationJson {
            index_set: rep.index_set.clone(),
            carrier_dim: rep.carrier_dim,
            images,
        }
    }
}

impl TryFrom<RepresentationJson> for Representation {
    type Error = RepError;

    fn try_from(json: RepresentationJson) -> Result<Self, Self::Error> {
        let set = json.index_set;
        let mut slots: Vec<Vec<Option<CMatrix>>> =
            set.dims().iter().map(|&n| vec![None; n * n]).collect();
        for (key, m) in json.images {
            let mut parts = key.rsplitn(3, ':');
            let (j, i, label) = match (parts.next(), parts.next(), parts.next()) {
                (Some(j), Some(i), Some(label)) => (j, i, label),
                _ => return Err(RepError::InvalidInput(format!("bad image key {key:?}"))),
            };
            let x = set
                .index_of(label)
                .ok_or_else(|| RepError::InvalidInput(format!("unknown label in {key:?}")))?;
            let n = set.dim(x);
            let parse = |s: &str| -> Result<usize, RepError> {
                match s.parse::<usize>() {
                    Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
                    _ => Err(RepError::InvalidInput(format!("bad index in {key:?}"))),
                }
            };
            let (i, j) = (parse(i)?, parse(j)?);
            let slot = &mut slots[x][i * n + j];
            if slot.is_some() {
                return Err(RepError::InvalidInput(format!("duplicate image {key:?}")));
            }
            *slot = Some(CMatrix::try_from(m).map_err(RepError::InvalidInput)?);
        }
        let mut images = Vec::with_capacity(slots.len());
        for (x, per_point) in slots.into_iter().enumerate() {
            let n = set.dim(x);
            let mut out = Vec::with_capacity(per_point.len());
            for (ij, slot) in per_point.into_iter().enumerate() {
                out.push(slot.ok_or_else(|| {
                    RepError::InvalidInput(format!(
                        "missing image {}:{}:{}",
                        set.label(x),
                        ij / n + 1,
                        ij % n + 1
                    ))
                })?);
            }
            images.push(out);
        }
        Representation::new(set, json.carrier_dim, images)
    }
}

impl Serialize for Representation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RepresentationJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Representation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let json = RepresentationJson::deserialize(d)?;
        Representation::try_from(json).map_err(serde::de::Error::custom)
    }
}

/// The factor projection `p_x(b) = b(x)` on `ℂ^{n_x}`.
pub fn factor_projection(index_set: &IndexSet, x: usize) -> Result<Representation, RepError> {
    if x >= index_set.len() {
        return Err(RepError::InvalidInput(format!("point {x} out of range")));
    }
    let n = index_set.dim(x);
    Representation::from_fn(index_set, n, |y, i, j| {
        if y == x {
            linalg::matrix_unit(n, i, j)
        } else {
            linalg::zeros(n, n)
        }
    })
}

/// `π(χ_{x})` for the point named `label`.
pub fn projector_at(rep: &Representation, label: &str) -> Result<CMatrix, RepError> {
    Ok(rep.projector(rep.point(label)?))
}

/// Points `x` with `π(χ_{x}) ≠ 0`, in label order.
pub fn support(rep: &Representation, tol: f64) -> Subset {
    Subset::from_indices(
        (0..rep.index_set().len()).filter(|&x| linalg::op_norm(&rep.projector(x)) > tol),
    )
}

fn is_identity(m: &CMatrix, tol: f64) -> bool {
    let n = m.nrows();
    linalg::op_norm(&(m - linalg::identity(n))) <= tol * (1.0 + linalg::op_norm(m))
}

/// The ultrafilter `F_π = {U : π(χ_U) = I}` of an irreducible representation.
pub fn extract_filter(rep: &Representation, tol: f64) -> Result<Filter, RepError> {
    let commutant_dim = commutant_dimension(rep, tol);
    if commutant_dim != 1 {
        return Err(RepError::NotIrreducible { commutant_dim });
    }
    let set = rep.index_set();
    let full_points: Vec<usize> = (0..set.len())
        .filter(|&x| is_identity(&rep.projector(x), tol))
        .collect();
    let y = match full_points.as_slice() {
        [y] => *y,
        [] => {
            return Err(RepError::Inconsistent(
                "no point has π(χ_x) = I".into(),
            ))
        }
        many => {
            return Err(RepError::Inconsistent(format!(
                "{} points have π(χ_x) = I",
                many.len()
            )))
        }
    };
    if set.len() <= MAX_ENUMERATED_POINTS {
        let projectors: Vec<CMatrix> = (0..set.len()).map(|x| rep.projector(x)).collect();
        for u in set.universe().power_set() {
            let mut image = linalg::zeros(rep.carrier_dim(), rep.carrier_dim());
            for x in u.indices() {
                image += &projectors[x];
            }
            if is_identity(&image, tol) != u.contains(y) {
                return Err(RepError::Inconsistent(format!(
                    "membership of {:?} disagrees with kernel point {:?}",
                    set.universe().labels_of(u),
                    set.label(y)
                )));
            }
        }
    }
    Ok(Filter::at_point(set.universe().clone(), y)?)
}

/// Optional change of basis per point, `label → invertible n_x × n_x matrix`.
pub type BasisChoice = BTreeMap<String, CMatrix>;

/// The irreducible representation `π_F` of an ultrafilter `F`.
///
/// The carrier dimension is found by selecting the block of the partition of
/// points by factor dimension that belongs to `F`; the images are the matrix
/// units of the kernel point, conjugated by its basis choice if one is given.
pub fn build_from_filter(
    filter: &Filter,
    index_set: &IndexSet,
    bases: Option<&BasisChoice>,
) -> Result<Representation, RepError> {
    if filter.universe() != index_set.universe() {
        return Err(RepError::IndexSetMismatch);
    }
    let by_dim = Partition::by_key(index_set.universe().clone(), |x| index_set.dim(x));
    let block = partition_select(filter, &by_dim)?;
    let y = filter.point()?;
    let n = by_dim.blocks()[block]
        .first()
        .map(|x| index_set.dim(x))
        .expect("nonempty block");
    debug_assert_eq!(n, index_set.dim(y));

    let change = match bases.and_then(|b| b.get(index_set.label(y))) {
        None => None,
        Some(s) => {
            if s.nrows() != n || s.ncols() != n {
                return Err(RepError::InvalidInput(format!(
                    "basis at {:?} must be {n}x{n}",
                    index_set.label(y)
                )));
            }
            let s_inv = linalg::inverse(s).ok_or_else(|| {
                RepError::InvalidInput(format!("basis at {:?} is singular", index_set.label(y)))
            })?;
            Some((s.clone(), s_inv))
        }
    };
    if let Some(bases) = bases {
        for label in bases.keys() {
            if index_set.index_of(label).is_none() {
                return Err(RepError::InvalidInput(format!("basis for unknown label {label:?}")));
            }
        }
    }
    Representation::from_fn(index_set, n, |x, i, j| {
        if x != y {
            return linalg::zeros(n, n);
        }
        let e = linalg::matrix_unit(n, i, j);
        match &change {
            Some((s, s_inv)) => s * e * s_inv,
            None => e,
        }
    })
}

/// Compress each central block `π(χ_x)` to its range.
///
/// Returns, per support point, `(x, Q_x, W_x)` with `π(χ_x) = Q_x W_x` and
/// `W_x Q_x = I`, or `None` if the ranges fail to split the carrier.
fn central_blocks(rep: &Representation, tol: f64) -> Option<Vec<(usize, CMatrix, CMatrix)>> {
    let m = rep.carrier_dim();
    let mut ranges = Vec::new();
    let mut total = 0;
    for x in 0..rep.index_set().len() {
        let p = rep.projector(x);
        if linalg::op_norm(&p) <= tol {
            continue;
        }
        let q = linalg::orthonormal_range(&p, tol);
        total += q.ncols();
        ranges.push((x, q));
    }
    if total != m {
        return None;
    }
    let mut v = linalg::zeros(m, m);
    let mut at = 0;
    for (_, q) in &ranges {
        v.view_mut((0, at), (m, q.ncols())).copy_from(q);
        at += q.ncols();
    }
    let w = linalg::inverse(&v)?;
    let mut at = 0;
    let mut out = Vec::with_capacity(ranges.len());
    for (x, q) in ranges {
        let d = q.ncols();
        let wx = w.rows(at, d).into_owned();
        at += d;
        out.push((x, q, wx));
    }
    Some(out)
}

/// Stacked Sylvester operator `T ↦ (T g − g T)_g` acting on `vec(T)`.
fn sylvester_stack<'a, I>(gens: I, d: usize) -> CMatrix
where
    I: IntoIterator<Item = &'a CMatrix>,
{
    let eye = linalg::identity(d);
    let blocks: Vec<CMatrix> = gens
        .into_iter()
        .map(|g| linalg::kron(&g.transpose(), &eye) - linalg::kron(&eye, g))
        .collect();
    let mut out = linalg::zeros(blocks.len() * d * d, d * d);
    for (k, b) in blocks.iter().enumerate() {
        out.view_mut((k * d * d, 0), (d * d, d * d)).copy_from(b);
    }
    out
}

/// Dimension of the commutant on the full carrier, from the Sylvester system
/// over every generator image. `O(m⁶)`; intended for small carriers.
pub fn commutant_dimension_direct(rep: &Representation, tol: f64) -> usize {
    let stack = sylvester_stack(rep.generators().map(|g| g.3), rep.carrier_dim());
    let scale = rep.generators().map(|g| linalg::op_norm(g.3)).fold(0.0, f64::max);
    linalg::nullity(&stack, tol, scale)
}

/// Dimension of `{T : T π(g) = π(g) T for every generator g}`.
///
/// Singular values of the stacked Sylvester system at or below
/// `tol · max(σ_max, max_g ‖g‖)` count toward the nullity; the generator scale
/// matters when every generator acts as a scalar and the system is zero.
///
/// Anything commuting with the image commutes with the central idempotents
/// `π(χ_x)`, so the Sylvester system splits over their ranges; each block is
/// solved with the compressed generator images of its own factor.
pub fn commutant_dimension(rep: &Representation, tol: f64) -> usize {
    let Some(blocks) = central_blocks(rep, tol) else {
        return commutant_dimension_direct(rep, tol);
    };
    blocks
        .iter()
        .map(|(x, q, w)| {
            let n = rep.index_set().dim(*x);
            let compressed: Vec<CMatrix> = (0..n * n)
                .map(|ij| w * rep.image(*x, ij / n, ij % n) * q)
                .collect();
            let scale = compressed.iter().map(linalg::op_norm).fold(0.0, f64::max);
            linalg::nullity(&sylvester_stack(&compressed, q.ncols()), tol, scale)
        })
        .sum()
}

/// One-dimensional commutant.
pub fn is_irreducible(rep: &Representation, tol: f64) -> bool {
    commutant_dimension(rep, tol) == 1
}

/// `S⁻¹ π S = ⊕_{y∈Y} I_{m_y} ⊗ p_y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    index_set: IndexSet,
    support: Vec<usize>,
    multiplicities: Vec<usize>,
    intertwiner: CMatrix,
    intertwiner_inverse: CMatrix,
    residual: f64,
    condition_number: f64,
}

impl Decomposition {
    /// Support points in label order.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn support_labels(&self) -> Vec<String> {
        self.support
            .iter()
            .map(|&y| self.index_set.label(y).to_string())
            .collect()
    }

    /// Multiplicities, parallel to [`Decomposition::support`].
    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn multiplicity_of(&self, label: &str) -> usize {
        self.index_set
            .index_of(label)
            .and_then(|x| self.support.iter().position(|&y| y == x))
            .map_or(0, |k| self.multiplicities[k])
    }

    /// `(support, multiplicities)`, the equivalence class of the representation.
    pub fn signature(&self) -> Vec<(usize, usize)> {
        self.support
            .iter()
            .copied()
            .zip(self.multiplicities.iter().copied())
            .collect()
    }

    pub fn intertwiner(&self) -> &CMatrix {
        &self.intertwiner
    }

    pub fn intertwiner_inverse(&self) -> &CMatrix {
        &self.intertwiner_inverse
    }

    /// `max_b ‖S⁻¹π(b)S − blockdiag(b)‖ / (1 + ‖b‖)` over the probe elements.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    pub fn is_irreducible(&self) -> bool {
        self.multiplicities == [1]
    }

    /// `⊕_{y∈Y} I_{m_y} ⊗ b(y)`.
    pub fn block_diagonal(&self, b: &AlgebraElement) -> CMatrix {
        block_diagonal_model(&self.support, &self.multiplicities, b)
    }

    pub fn to_json(&self) -> DecompositionJson {
        DecompositionJson {
            support: self.support_labels(),
            multiplicities: self
                .support
                .iter()
                .zip(&self.multiplicities)
                .map(|(&y, &m)| (self.index_set.label(y).to_string(), m))
                .collect(),
            intertwiner: MatrixJson::from(&self.intertwiner),
            residual: self.residual,
            cond: self.condition_number,
        }
    }
}

/// `{"support": [...], "multiplicities": {...}, "intertwiner": matrix, "residual": r, "cond": c}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub support: Vec<String>,
    pub multiplicities: BTreeMap<String, usize>,
    pub intertwiner: MatrixJson,
    pub residual: f64,
    pub cond: f64,
}

fn block_diagonal_model(support: &[usize], multiplicities: &[usize], b: &AlgebraElement) -> CMatrix {
    let blocks: Vec<&CMatrix> = support
        .iter()
        .zip(multiplicities)
        .flat_map(|(&y, &m)| std::iter::repeat_n(b.block(y), m))
        .collect();
    linalg::block_diagonal(&blocks)
}

/// Probe elements: every matrix unit, then seeded random elements.
fn probe_elements(index_set: &IndexSet) -> Vec<AlgebraElement> {
    let mut probes = Vec::new();
    for x in 0..index_set.len() {
        let n = index_set.dim(x);
        for i in 0..n {
            for j in 0..n {
                probes.push(AlgebraElement::matrix_unit(index_set, x, i, j));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    probes.extend((0..RANDOM_PROBES).map(|_| AlgebraElement::random(index_set, &mut rng)));
    probes
}

/// Split a representation into factor projections with an explicit intertwiner.
///
/// For each support point `y`, an orthonormal basis `v_1 … v_{m_y}` of
/// `range π(e^{(y)}_{11})` is taken with pivoted Gram-Schmidt, and the
/// intertwiner gets the columns `π(e^{(y)}_{i1}) v_k`, ordered by `y`, then
/// `k`, then `i`. Then `S⁻¹π(b)S` carries `m_y` consecutive copies of `b(y)`.
/// The result is verified on all matrix units and [`RANDOM_PROBES`] random
/// elements; a residual above `10 · tol · cond(S)` is reported as a failure.
pub fn decompose(rep: &Representation, tol: f64) -> Result<Decomposition, RepError> {
    let set = rep.index_set();
    let m = rep.carrier_dim();
    let support_set = support(rep, tol);
    let mut support_pts = Vec::new();
    let mut multiplicities = Vec::new();
    let mut columns: Vec<nalgebra::DVector<Complex64>> = Vec::with_capacity(m);
    for y in support_set.indices() {
        let n = set.dim(y);
        let basis = linalg::orthonormal_range(rep.image(y, 0, 0), tol);
        let mult = basis.ncols();
        if mult == 0 {
            return Err(RepError::DecompositionFailure(format!(
                "π(χ_{{{}}}) ≠ 0 but π(e_11) has numerical rank 0",
                set.label(y)
            )));
        }
        for k in 0..mult {
            let v = basis.column(k);
            for i in 0..n {
                columns.push(rep.image(y, i, 0) * v);
            }
        }
        support_pts.push(y);
        multiplicities.push(mult);
    }
    if columns.len() != m {
        return Err(RepError::DecompositionFailure(format!(
            "Σ m_y·n_y = {} but carrier dimension is {m}",
            columns.len()
        )));
    }
    let mut s = linalg::zeros(m, m);
    for (k, col) in columns.iter().enumerate() {
        s.set_column(k, col);
    }
    let s_inv = linalg::inverse(&s)
        .ok_or_else(|| RepError::DecompositionFailure("intertwiner is singular".into()))?;
    let condition_number = linalg::cond(&s);
    let mut residual = 0.0f64;
    for b in probe_elements(set) {
        let image = rep.evaluate(&b)?;
        let model = block_diagonal_model(&support_pts, &multiplicities, &b);
        let err = linalg::op_norm(&(&s_inv * image * &s - model));
        residual = residual.max(err / (1.0 + b.norm()));
    }
    let bound = 10.0 * tol * condition_number;
    if residual.is_nan() || residual > bound {
        return Err(RepError::DecompositionFailure(format!(
            "residual {residual:e} exceeds {bound:e} (cond {condition_number:e})"
        )));
    }
    Ok(Decomposition {
        index_set: set.clone(),
        support: support_pts,
        multiplicities,
        intertwiner: s,
        intertwiner_inverse: s_inv,
        residual,
        condition_number,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceCertificate {
    pub equivalent: bool,
    /// `T` with `T π₁(b) = π₂(b) T`, when equivalent.
    pub intertwiner: Option<CMatrix>,
    /// Largest generator residual `‖T π₁(g) − π₂(g) T‖ / (‖S₂‖ ‖S₁⁻¹‖)`.
    pub residual: Option<f64>,
}

/// `{"equivalent": bool, "intertwiner": matrix | null, "residual": r | null}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub equivalent: bool,
    pub intertwiner: Option<MatrixJson>,
    pub residual: Option<f64>,
}

impl From<&EquivalenceCertificate> for CertificateJson {
    fn from(c: &EquivalenceCertificate) -> Self {
        CertificateJson {
            equivalent: c.equivalent,
            intertwiner: c.intertwiner.as_ref().map(MatrixJson::from),
            residual: c.residual,
        }
    }
}

/// Decide equivalence by comparing decompositions; when they agree, return
/// `T = S₂ S₁⁻¹` verified on every generator.
pub fn equivalent(
    first: &Representation,
    second: &Representation,
    tol: f64,
) -> Result<EquivalenceCertificate, RepError> {
    if first.index_set() != second.index_set() {
        return Err(RepError::IndexSetMismatch);
    }
    let not_equivalent = EquivalenceCertificate {
        equivalent: false,
        intertwiner: None,
        residual: None,
    };
    if first.carrier_dim() != second.carrier_dim() {
        return Ok(not_equivalent);
    }
    let d1 = decompose(first, tol)?;
    let d2 = decompose(second, tol)?;
    if d1.signature() != d2.signature() {
        return Ok(not_equivalent);
    }
    let t = d2.intertwiner() * d1.intertwiner_inverse();
    let scale = linalg::op_norm(d2.intertwiner()) * linalg::op_norm(d1.intertwiner_inverse());
    let mut residual = 0.0f64;
    for ((_, _, _, g1), (_, _, _, g2)) in first.generators().zip(second.generators()) {
        let err = linalg::op_norm(&(&t * g1 - g2 * &t));
        residual = residual.max(err / scale);
    }
    let bound = 10.0 * tol * (d1.condition_number() + d2.condition_number());
    if residual.is_nan() || residual > bound {
        return Err(RepError::Inconsistent(format!(
            "equivalence intertwiner residual {residual:e} exceeds {bound:e}"
        )));
    }
    Ok(EquivalenceCertificate {
        equivalent: true,
        intertwiner: Some(t),
        residual: Some(residual),
    })
}

/// The factor projections `p_x`, one per point in label order.
pub fn enumerate_irreducibles(index_set: &IndexSet) -> Vec<Representation> {
    (0..index_set.len())
        .map(|x| factor_projection(index_set, x).expect("point in range"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    /// Number of sets `U` with `π(χ_U) ≠ 0`.
    pub nonzero_sets: usize,
    /// Pairs `A ⊆ C` with `π(χ_A) ≠ 0` that were checked.
    pub pairs_checked: usize,
    pub support: Vec<String>,
}

/// Every `U` with `π(χ_U) ≠ 0`, for index sets of at most
/// [`MAX_ENUMERATED_POINTS`] points.
pub fn nonzero_indicator_sets(rep: &Representation, tol: f64) -> Result<Vec<Subset>, RepError> {
    let set = rep.index_set();
    if set.len() > MAX_ENUMERATED_POINTS {
        return Err(RepError::InvalidInput(format!(
            "subset enumeration limited to {MAX_ENUMERATED_POINTS} points"
        )));
    }
    let projectors: Vec<CMatrix> = (0..set.len()).map(|x| rep.projector(x)).collect();
    let m = rep.carrier_dim();
    Ok(set
        .universe()
        .power_set()
        .filter(|u| {
            let mut image = linalg::zeros(m, m);
            for x in u.indices() {
                image += &projectors[x];
            }
            linalg::op_norm(&image) > tol
        })
        .collect())
}

/// Exhaustively confirm that `U_π = {U : π(χ_U) ≠ 0}` is upward closed.
pub fn inclusion_property_check(rep: &Representation, tol: f64) -> Result<InclusionReport, RepError> {
    let set = rep.index_set();
    let nonzero = nonzero_indicator_sets(rep, tol)?;
    let mut flags = vec![false; 1usize << set.len()];
    for u in &nonzero {
        flags[u.bits() as usize] = true;
    }
    let full = set.universe().full();
    if !flags[full.bits() as usize] {
        return Err(RepError::Inconsistent("π(χ_X) = 0".into()));
    }
    let mut pairs_checked = 0;
    for &a in &nonzero {
        for extra in full.difference(a).subsets() {
            let c = a.union(extra);
            pairs_checked += 1;
            if !flags[c.bits() as usize] {
                return Err(RepError::Inconsistent(format!(
                    "π(χ_A) ≠ 0 but π(χ_C) = 0 for A = {:?} ⊆ C = {:?}",
                    set.universe().labels_of(a),
                    set.universe().labels_of(c)
                )));
            }
        }
    }
    Ok(InclusionReport {
        nonzero_sets: nonzero.len(),
        pairs_checked,
        support: set.universe().labels_of(support(rep, tol)),
    })
}

/// The involution `[[0, 1/h], [h, 0]]`.
pub fn involution_matrix(h: Complex64) -> Result<CMatrix, RepError> {
    if h.norm() == 0.0 || !h.re.is_finite() || !h.im.is_finite() {
        return Err(RepError::InvalidInput("h must be finite and nonzero".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    Ok(CMatrix::from_row_slice(2, 2, &[zero, h.inv(), h, zero]))
}

/// The representation of `ℂ² = ℂ(\{x1, x2\})` on `ℂ²` induced by the
/// involution `a = e_{x2} − e_{x1} ↦ [[0, 1/h], [h, 0]]`, i.e.
/// `π(e_{x1}) = (I − π(a))/2` and `π(e_{x2}) = (I + π(a))/2`.
///
/// For `h ∉ {0, 1}` with `|h| ≠ 1` the images are not self-adjoint, and
/// `π(e_{x1})` is a nontrivial oblique idempotent intertwining `π`.
pub fn involution_representation(h: Complex64) -> Result<Representation, RepError> {
    let a = involution_matrix(h)?;
    let half = Complex64::new(0.5, 0.0);
    let eye = linalg::identity(2);
    let minus = (&eye - &a) * half;
    let plus = (&eye + &a) * half;
    let set = IndexSet::from_pairs([("x1", 1), ("x2", 1)])?;
    Representation::new(set, 2, vec![vec![minus], vec![plus]])
}

/// `π(χ_U)` obtained by evaluating the indicator element.
pub fn indicator_image_via_evaluate(rep: &Representation, set: Subset) -> Result<CMatrix, RepError> {
    rep.evaluate(&indicator(rep.index_set(), set)?)
}
