//! Thin SVD of a tall, narrow matrix through its Gram matrix.

use crate::error::Result;
use crate::numkern::eigen::jacobi_eigh;
use crate::numkern::matrix::{dot, Matrix};
use crate::scalar::Real;

/// Relative gap under which the two leading singular values count as tied.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SvdResult<T> {
    /// All `m` singular values, descending.
    pub singular_values: Vec<T>,
    /// Right singular vectors `v_j`, one per entry.
    pub right_vectors: Vec<Vec<T>>,
    /// `Y·v_j`; the left singular vector is this divided by `σ_j` when `σ_j > 0`.
    pub left_scores: Vec<Vec<T>>,
    /// `σ₁ = σ₂` within relative [`DEGENERACY_TOL`]: the leading plane has no unique basis.
    pub degenerate: bool,
    /// Every singular value is zero; usable for diagnostics only.
    pub all_zero: bool,
}

impl<T: Real> SvdResult<T> {
    pub fn left_vector(&self, j: usize) -> Option<Vec<T>> {
        let s = self.singular_values[j];
        (s > T::zero()).then(|| self.left_scores[j].iter().map(|&x| x / s).collect())
    }
}

/// Flips `v` so that its largest-magnitude entry is positive (first index wins ties).
pub fn orient<T: Real>(v: &mut [T]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < T::zero()) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Singular values and vectors of `Y` from the eigen-decomposition of `YᵀY`.
///
/// Works for any shape: when `n < m` the trailing `m - n` singular values are
/// zero up to round-off. Negative Gram eigenvalues are clamped to zero.
pub fn svd_thin<T: Real>(y: &Matrix<T>) -> Result<SvdResult<T>> {
    let eig = jacobi_eigh(&y.gram())?;
    let m = y.ncols();
    let mut singular_values = Vec::with_capacity(m);
    let mut right_vectors = Vec::with_capacity(m);
    let mut left_scores = Vec::with_capacity(m);
    for j in 0..m {
        singular_values.push(eig.values[j].max(T::zero()).sqrt());
        let mut v = eig.vector(j);
        orient(&mut v);
        left_scores.push(y.mul_vec(&v));
        right_vectors.push(v);
    }
    let all_zero = singular_values.iter().all(|&s| s == T::zero());
    let degenerate =
        !all_zero && m >= 2 && singular_values[0] - singular_values[1] <= T::lit(DEGENERACY_TOL) * singular_values[0];
    Ok(SvdResult { singular_values, right_vectors, left_scores, degenerate, all_zero })
}

/// `Σ_j σ_j u_j v_jᵀ`, i.e. `Σ_j (Y v_j) v_jᵀ`.
pub fn reconstruct<T: Real>(svd: &SvdResult<T>) -> Matrix<T> {
    let n = svd.left_scores.first().map_or(0, Vec::len);
    let m = svd.right_vectors.len();
    Matrix::from_fn(n, m, |i, j| svd.left_scores.iter().zip(&svd.right_vectors).map(|(u, v)| u[i] * v[j]).sum())
}

/// Largest absolute inner product between distinct right vectors, and the
/// largest deviation of their norms from one.
pub fn orthonormality_error<T: Real>(vs: &[Vec<T>]) -> T {
    let mut worst = T::zero();
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate().skip(i) {
            let target = if i == j { T::one() } else { T::zero() };
            worst = worst.max((dot(a, b) - target).abs());
        }
    }
    worst
}
