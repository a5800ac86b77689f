//! Seeded random inputs: invertible matrices with bounded condition number
//! and conjugated direct sums of factor projections.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::IndexSet;
use crate::filters::Universe;
use crate::linalg::{self, CMatrix};
use crate::reps::{factor_projection, RepError, Representation};

fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

/// A random unitary, the `Q` factor of a random complex matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    loop {
        let a = CMatrix::from_fn(n, n, |_, _| random_complex(rng));
        if linalg::cond(&a) < 1e6 {
            return a.qr().q();
        }
    }
}

/// `U · diag(σ) · V*` with `σ_1 = 1`, `σ_n = 1/cond` and the rest
/// log-uniform in between, so the 2-norm condition number is `cond`.
pub fn invertible_with_cond<R: Rng + ?Sized>(n: usize, cond: f64, rng: &mut R) -> CMatrix {
    assert!(cond >= 1.0, "condition number below 1");
    let u = random_unitary(n, rng);
    let v = random_unitary(n, rng);
    let log_c = cond.ln();
    let sigma: Vec<f64> = (0..n)
        .map(|k| match k {
            0 => 1.0,
            k if k == n - 1 => 1.0 / cond,
            _ => (-rng.gen_range(0.0..=log_c)).exp(),
        })
        .collect();
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        sigma.iter().map(|&s| Complex64::new(s, 0.0)),
    ));
    u * d * v.adjoint()
}

/// Random invertible with condition number drawn uniformly from `[1, max_cond]`.
pub fn random_invertible<R: Rng + ?Sized>(n: usize, max_cond: f64, rng: &mut R) -> CMatrix {
    let cond = if n == 1 { 1.0 } else { rng.gen_range(1.0..=max_cond) };
    invertible_with_cond(n, cond, rng)
}

/// `⊕_{(y, m)} I_m ⊗ p_y` in the given order.
pub fn block_sum(index_set: &IndexSet, parts: &[(usize, usize)]) -> Result<Representation, RepError> {
    let mut out: Option<Representation> = None;
    for &(y, m) in parts {
        let piece = factor_projection(index_set, y)?.tensor_identity(m)?;
        out = Some(match out {
            None => piece,
            Some(acc) => acc.direct_sum(&piece)?,
        });
    }
    out.ok_or_else(|| RepError::InvalidInput("no summands".into()))
}

/// A fixture with known decomposition.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub rep: Representation,
    /// `(point, multiplicity)` in label order.
    pub parts: Vec<(usize, usize)>,
    pub conjugator: CMatrix,
}

/// `S₀ · (⊕_{(y, m_y)} I_{m_y} ⊗ p_y) · S₀⁻¹` with `cond(S₀) ≤ max_cond`.
pub fn conjugated_sum<R: Rng + ?Sized>(
    index_set: &IndexSet,
    parts: &[(usize, usize)],
    max_cond: f64,
    rng: &mut R,
) -> Result<Fixture, RepError> {
    let mut parts = parts.to_vec();
    parts.sort_unstable();
    let base = block_sum(index_set, &parts)?;
    let s0 = random_invertible(base.carrier_dim(), max_cond, rng);
    Ok(Fixture {
        rep: base.conjugate(&s0)?,
        parts,
        conjugator: s0,
    })
}

/// Index set `p0, p1, …` with dimensions drawn from `1..=max_dim`.
pub fn random_index_set<R: Rng + ?Sized>(points: usize, max_dim: usize, rng: &mut R) -> IndexSet {
    let universe = Universe::numbered("p", points).expect("at least one point");
    let dims = (0..points).map(|_| rng.gen_range(1..=max_dim)).collect();
    IndexSet::new(universe, dims).expect("positive dimensions")
}

/// A random decomposable fixture: support of size `1..=max_support`,
/// multiplicities in `1..=max_mult`.
pub fn random_fixture<R: Rng + ?Sized>(
    index_set: &IndexSet,
    max_support: usize,
    max_mult: usize,
    max_cond: f64,
    rng: &mut R,
) -> Fixture {
    let n = index_set.len();
    let size = rng.gen_range(1..=max_support.min(n));
    let mut points: Vec<usize> = (0..n).collect();
    for i in 0..size {
        let j = rng.gen_range(i..n);
        points.swap(i, j);
    }
    let parts: Vec<(usize, usize)> = points[..size]
        .iter()
        .map(|&y| (y, rng.gen_range(1..=max_mult)))
        .collect();
    conjugated_sum(index_set, &parts, max_cond, rng).expect("valid parts")
}
