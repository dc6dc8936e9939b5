use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} values cannot fill a {rows}x{cols} matrix", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            data.extend_from_slice(r);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * c).collect() }
    }

    /// `YᵀY`, symmetric by construction.
    pub fn gram(&self) -> Self {
        let m = self.cols;
        let mut g = Self::zeros(m, m);
        for i in 0..self.rows {
            let r = self.row(i);
            for p in 0..m {
                let rp = r[p];
                if rp == T::zero() {
                    continue;
                }
                for (gq, &rq) in g.data[p * m + p..(p + 1) * m].iter_mut().zip(&r[p..]) {
                    *gq += rp * rq;
                }
            }
        }
        for p in 0..m {
            for q in 0..p {
                g.data[p * m + q] = g.data[q * m + p];
            }
        }
        g
    }

    /// `Y·x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Y·B`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| (0..self.cols).map(|k| self[(i, k)] * other[(k, j)]).sum()))
    }

    pub fn frobenius_sq(&self) -> T {
        norm_sq(&self.data)
    }

    /// Position of the first non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.data.iter().position(|x| !x.is_finite()).map(|k| (k / self.cols.max(1), k % self.cols.max(1)))
    }

    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(perm[i], j)])
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm_sq<T: Real>(a: &[T]) -> T {
    dot(a, a)
}

pub fn mean<T: Real>(a: &[T]) -> T {
    a.iter().copied().sum::<T>() / T::from_len(a.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_matches_explicit_product() {
        let y = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, -1.0]]).unwrap();
        let g = y.gram();
        let explicit = y.transpose().matmul(&y).unwrap();
        assert_eq!(g, explicit);
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(Matrix::<f64>::from_rows(&rows).is_err());
    }

    #[test]
    fn non_finite_position() {
        let y = Matrix::from_rows(&[[1.0, 2.0], [f64::NAN, 4.0]]).unwrap();
        assert_eq!(y.first_non_finite(), Some((1, 0)));
    }
}
