//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::linalg::SVD;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMatrix {
    CMatrix::zeros(r, c)
}

/// The matrix unit `E_ij` of size `n`, zero-based indices.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut e = zeros(n, n);
    e[(i, j)] = Complex64::new(1.0, 0.0);
    e
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let svd = SVD::new(m.clone(), false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Operator 2-norm.
pub fn op_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// 2-norm condition number; infinite for singular or non-square input.
pub fn cond(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

pub fn inverse(m: &CMatrix) -> Option<CMatrix> {
    if !m.is_square() {
        return None;
    }
    m.clone().lu().try_inverse().filter(is_finite)
}

/// Number of singular values at or below `tol · max(σ_max, scale)`, counting
/// missing rows. `scale` floors the cutoff when `m` is numerically zero.
pub fn nullity(m: &CMatrix, tol: f64, scale: f64) -> usize {
    let s = singular_values(m);
    let cutoff = tol * s.first().copied().unwrap_or(0.0).max(scale);
    let small = s.iter().filter(|&&v| v <= cutoff).count();
    small + m.ncols().saturating_sub(m.nrows())
}

/// Eigenvalues with algebraic multiplicity from faer's complex Schur
/// (Hessenberg QR) solver, sorted by real part and then imaginary part.
pub fn eigenvalues(m: &CMatrix) -> Option<Vec<Complex64>> {
    debug_assert!(m.is_square());
    let n = m.nrows();
    let mut out: Vec<Complex64> = match n {
        0 => Vec::new(),
        1 => vec![m[(0, 0)]],
        _ => {
            let dense = faer::Mat::<faer::c64>::from_fn(n, n, |i, j| {
                let z = m[(i, j)];
                faer::c64::new(z.re, z.im)
            });
            let ev = dense.eigenvalues().ok()?;
            ev.into_iter().map(|z| Complex64::new(z.re, z.im)).collect()
        }
    };
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Some(out)
}

/// Orthonormal basis of the column space of `m`, by Gram-Schmidt with
/// reorthogonalization and largest-remaining-norm column pivoting.
///
/// Columns whose residual norm falls to `tol · σ_max` or below are dropped.
/// Ties in the pivot choice go to the lowest column index.
pub fn orthonormal_range(m: &CMatrix, tol: f64) -> CMatrix {
    let rows = m.nrows();
    let cutoff = tol * op_norm(m);
    let mut work = m.clone();
    let mut basis: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    let mut used = vec![false; m.ncols()];
    loop {
        let mut pivot = None;
        let mut best = cutoff;
        for (j, _) in used.iter().enumerate().filter(|(_, &u)| !u) {
            let norm = work.column(j).norm();
            if norm > best {
                best = norm;
                pivot = Some(j);
            }
        }
        let Some(j) = pivot else { break };
        used[j] = true;
        let mut v = work.column(j).into_owned();
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let norm = v.norm();
        if norm <= cutoff {
            continue;
        }
        v /= Complex64::new(norm, 0.0);
        for (k, _) in used.iter().enumerate().filter(|(_, &u)| !u) {
            let proj = v.dotc(&work.column(k));
            let update = &v * proj;
            let mut col = work.column_mut(k);
            col -= update;
        }
        basis.push(v);
        if basis.len() == rows {
            break;
        }
    }
    let mut out = zeros(rows, basis.len());
    for (k, v) in basis.iter().enumerate() {
        out.set_column(k, v);
    }
    out
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Block diagonal matrix from square blocks.
pub fn block_diagonal(blocks: &[&CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(n, n);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, at), (b.nrows(), b.ncols())).copy_from(*b);
        at += b.nrows();
    }
    out
}
