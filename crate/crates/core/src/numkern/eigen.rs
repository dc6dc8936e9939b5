//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use crate::error::{Error, Result};
use crate::numkern::matrix::Matrix;
use crate::scalar::Real;

pub const MAX_SWEEPS: usize = 50;
pub const MAX_ORDER: usize = 256;

/// Eigen-decomposition `S = V·diag(values)·Vᵀ`, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    /// Eigenvectors stored as columns.
    pub vectors: Matrix<T>,
    pub sweeps: usize,
}

impl<T: Real> SymEigen<T> {
    pub fn vector(&self, j: usize) -> Vec<T> {
        self.vectors.col(j)
    }
}

fn off_diagonal_norm<T: Real>(a: &Matrix<T>) -> T {
    let n = a.nrows();
    let mut s = T::zero();
    for p in 0..n {
        for q in p + 1..n {
            s += a[(p, q)] * a[(p, q)];
        }
    }
    (s + s).sqrt()
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix.
///
/// Symmetry is checked to `1e-9·max(1, ‖S‖_F)`. Sweeps stop once the
/// off-diagonal Frobenius mass drops below `max(1e-14, m·ε)·‖S‖_F`.
pub fn jacobi_eigh<T: Real>(s: &Matrix<T>) -> Result<SymEigen<T>> {
    let n = s.nrows();
    if s.ncols() != n {
        return Err(Error::Shape(format!("expected a square matrix, got {}x{}", n, s.ncols())));
    }
    if n > MAX_ORDER {
        return Err(Error::TooLarge(n));
    }
    if let Some((row, col)) = s.first_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    let fro = s.frobenius_sq().sqrt();
    let sym_tol = T::lit(1e-9) * fro.max(T::one());
    for p in 0..n {
        for q in p + 1..n {
            let gap = (s[(p, q)] - s[(q, p)]).abs();
            if gap > sym_tol {
                return Err(Error::NotSymmetric { row: p, col: q, gap: gap.as_f64() });
            }
        }
    }

    // work on the symmetrised copy
    let mut a = Matrix::from_fn(n, n, |i, j| (s[(i, j)] + s[(j, i)]) * T::lit(0.5));
    let mut v = Matrix::identity(n);
    let tol = fro * T::lit(1e-14).max(T::from_len(n) * T::epsilon());
    let hundred = T::lit(100.0);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= tol || fro == T::zero() {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off: off.as_f64() });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let g = hundred * apq.abs();
                // element below the resolution of both diagonal entries
                if sweeps > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[(p, q)] = T::zero();
                    a[(q, p)] = T::zero();
                    continue;
                }
                let h = aqq - app;
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = T::lit(0.5) * h / apq;
                    let t = T::one() / (theta.abs() + (T::one() + theta * theta).sqrt());
                    if theta < T::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let sn = t * c;
                let tau = sn / (T::one() + c);
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        let nrp = arp - sn * (arq + tau * arp);
                        let nrq = arq + sn * (arp - tau * arq);
                        a[(r, p)] = nrp;
                        a[(p, r)] = nrp;
                        a[(r, q)] = nrq;
                        a[(q, r)] = nrq;
                    }
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp - sn * (vrq + tau * vrp);
                    v[(r, q)] = vrq + sn * (vrp - tau * vrq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their solver order
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymEigen { values, vectors, sweeps })
}
