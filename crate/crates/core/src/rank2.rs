//! Least-squares fit of the rank-2 multiplicative model
//! `y_i = θ₁ᵢφ₁ + θ₂ᵢφ₂ + ε_i` and the estimators derived from it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkern::matrix::{dot, mean, norm_sq, Matrix};
use crate::numkern::svd::svd_thin;
use crate::scalar::Real;

/// `n × m` intensity matrix: rows are arrays, columns are probes.
#[derive(Clone, Debug, PartialEq)]
pub struct DataMatrix<T> {
    values: Matrix<T>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl<T: Real> DataMatrix<T> {
    pub fn new(values: Matrix<T>, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        let (n, m) = (values.nrows(), values.ncols());
        if n < 3 || m < 3 {
            return Err(Error::TooSmall { n, m });
        }
        if row_labels.len() != n || col_labels.len() != m {
            return Err(Error::Shape(format!(
                "{} row labels and {} column labels for a {n}x{m} matrix",
                row_labels.len(),
                col_labels.len()
            )));
        }
        if let Some((row, col)) = values.first_non_finite() {
            return Err(Error::NonFinite { row, col });
        }
        Ok(Self { values, row_labels, col_labels })
    }

    /// Wraps a matrix with generated labels `array1..` and `probe1..`.
    pub fn from_matrix(values: Matrix<T>) -> Result<Self> {
        let rows = (1..=values.nrows()).map(|i| format!("array{i}")).collect();
        let cols = (1..=values.ncols()).map(|j| format!("probe{j}")).collect();
        Self::new(values, rows, cols)
    }

    pub fn values(&self) -> &Matrix<T> {
        &self.values
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn m(&self) -> usize {
        self.values.ncols()
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { values: self.values.scaled(c), ..self.clone() }
    }

    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        Self {
            values: self.values.permute_rows(perm),
            row_labels: perm.iter().map(|&i| self.row_labels[i].clone()).collect(),
            col_labels: self.col_labels.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Rank2Fit<T> {
    pub n: usize,
    pub m: usize,
    /// All `m` singular values of `Y`.
    pub lambda: Vec<T>,
    pub phi1: Vec<T>,
    pub phi2: Vec<T>,
    pub theta1: Vec<T>,
    pub theta2: Vec<T>,
    pub theta2_bar: T,
    /// Divide-by-`n` variance of `theta2`.
    pub sigma2_hat: T,
    /// Residual mass beyond two components per array and residual dimension.
    pub resid_sigma2: T,
    /// `‖θ̂₁‖²/n`
    pub eigen_est1: T,
    /// `‖θ̂₂‖²/n`
    pub eigen_est2: T,
    pub degenerate: bool,
}

/// Population (divide-by-`n`) variance `n⁻¹‖θ‖² − θ̄²`, evaluated in two passes.
pub fn sigma_hat2<T: Real>(theta2: &[T]) -> T {
    let bar = mean(theta2);
    theta2.iter().map(|&t| (t - bar) * (t - bar)).sum::<T>() / T::from_len(theta2.len())
}

/// `(‖Y‖²_F − ‖Yφ̂₁‖² − ‖Yφ̂₂‖²) / (n(m−2))`.
pub fn resid_sigma2<T: Real>(y: &Matrix<T>, fit: &Rank2Fit<T>) -> Result<T> {
    let (n, m) = (y.nrows(), y.ncols());
    if m <= 2 {
        return Err(Error::Domain(format!("residual variance needs more than 2 probes, got {m}")));
    }
    let resid = y.frobenius_sq() - norm_sq(&fit.theta1) - norm_sq(&fit.theta2);
    Ok(resid / T::from_len(n * (m - 2)))
}

/// `d_n = Σ_i ‖y_i − (φ₁ᵀy_i)φ₁ − (φ₂ᵀy_i)φ₂‖²` for unit, orthogonal `φ₁, φ₂`.
pub fn least_squares_objective<T: Real>(y: &Matrix<T>, phi1: &[T], phi2: &[T]) -> T {
    (0..y.nrows())
        .map(|i| {
            let row = y.row(i);
            let t1 = dot(row, phi1);
            let t2 = dot(row, phi2);
            row.iter()
                .zip(phi1.iter().zip(phi2))
                .map(|(&yij, (&p1, &p2))| {
                    let r = yij - t1 * p1 - t2 * p2;
                    r * r
                })
                .sum::<T>()
        })
        .sum()
}

pub fn fit_rank2<T: Real>(y: &DataMatrix<T>) -> Result<Rank2Fit<T>> {
    fit_matrix(y.values())
}

/// Fits an unlabeled matrix; same contract as [`fit_rank2`].
pub fn fit_matrix<T: Real>(y: &Matrix<T>) -> Result<Rank2Fit<T>> {
    let (n, m) = (y.nrows(), y.ncols());
    if n < 3 || m < 3 {
        return Err(Error::TooSmall { n, m });
    }
    if let Some((row, col)) = y.first_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    let svd = svd_thin(y)?;
    if svd.all_zero {
        return Err(Error::AllZero);
    }
    let mut vs = svd.right_vectors.into_iter();
    let mut scores = svd.left_scores.into_iter();
    let phi1 = vs.next().expect("m >= 3");
    let phi2 = vs.next().expect("m >= 3");
    let theta1 = scores.next().expect("m >= 3");
    let theta2 = scores.next().expect("m >= 3");

    let nf = T::from_len(n);
    let mut fit = Rank2Fit {
        n,
        m,
        lambda: svd.singular_values,
        theta2_bar: mean(&theta2),
        sigma2_hat: sigma_hat2(&theta2),
        resid_sigma2: T::zero(),
        eigen_est1: norm_sq(&theta1) / nf,
        eigen_est2: norm_sq(&theta2) / nf,
        phi1,
        phi2,
        theta1,
        theta2,
        degenerate: svd.degenerate,
    };
    fit.resid_sigma2 = resid_sigma2(y, &fit)?;
    Ok(fit)
}

impl<T: Real> Rank2Fit<T> {
    /// `λ₂²/λ₁²`, zero when `λ₁ = 0`.
    pub fn ratio(&self) -> T {
        let l1 = self.lambda[0];
        if l1 > T::zero() {
            (self.lambda[1] / l1).powi(2)
        } else {
            T::zero()
        }
    }

    /// Flips the signs of `(φ_j, θ_j)` so that `φ_j` points the same way as
    /// the reference vector. The model is invariant under `(θ_j, φ_j) → (−θ_j, −φ_j)`;
    /// with known true probe effects this fixes the parametrization.
    pub fn align_signs(&mut self, phi1_ref: &[T], phi2_ref: &[T]) {
        if dot(&self.phi1, phi1_ref) < T::zero() {
            self.phi1.iter_mut().chain(self.theta1.iter_mut()).for_each(|x| *x = -*x);
        }
        if dot(&self.phi2, phi2_ref) < T::zero() {
            self.phi2.iter_mut().chain(self.theta2.iter_mut()).for_each(|x| *x = -*x);
            self.theta2_bar = -self.theta2_bar;
        }
    }

    pub fn contribution_summary(&self, probe_labels: &[String]) -> Result<ContributionSummary> {
        ContributionSummary::from_factors(&self.theta1, &self.theta2, &self.phi1, &self.phi2, probe_labels)
    }
}

/// Five-number summary of one probe's second-to-first dimension ratio, in percent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeContribution {
    pub probe: String,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Arrays skipped because `θ̂₁ᵢφ̂₁ⱼ = 0`.
    pub excluded: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContributionSummary {
    pub probes: Vec<ProbeContribution>,
}

/// Linear-interpolation quantile of sorted data (`(len−1)·q` positions).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

impl ContributionSummary {
    /// Per probe `j`, summarizes `|θ₂ᵢφ₂ⱼ / (θ₁ᵢφ₁ⱼ)|·100` over arrays `i`.
    pub fn from_factors<T: Real>(
        theta1: &[T],
        theta2: &[T],
        phi1: &[T],
        phi2: &[T],
        probe_labels: &[String],
    ) -> Result<Self> {
        if theta1.len() != theta2.len() || phi1.len() != phi2.len() || probe_labels.len() != phi1.len() {
            return Err(Error::Shape("factor lengths disagree".into()));
        }
        let mut probes = Vec::with_capacity(phi1.len());
        for (j, label) in probe_labels.iter().enumerate() {
            let mut ratios: Vec<f64> = theta1
                .iter()
                .zip(theta2)
                .filter_map(|(&t1, &t2)| {
                    let first = (t1 * phi1[j]).as_f64();
                    (first != 0.0).then(|| ((t2 * phi2[j]).as_f64() / first).abs() * 100.0)
                })
                .collect();
            if ratios.is_empty() {
                return Err(Error::NoFirstDimension(label.clone()));
            }
            ratios.sort_by(f64::total_cmp);
            probes.push(ProbeContribution {
                probe: label.clone(),
                min: ratios[0],
                q1: quantile_sorted(&ratios, 0.25),
                median: quantile_sorted(&ratios, 0.5),
                q3: quantile_sorted(&ratios, 0.75),
                max: ratios[ratios.len() - 1],
                excluded: theta1.len() - ratios.len(),
            });
        }
        Ok(Self { probes })
    }

    /// Tab-separated table with `Min. (%)`, `Q1 (%)`, `Med. (%)`, `Q3 (%)`, `Max. (%)` columns.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("probe\tMin. (%)\tQ1 (%)\tMed. (%)\tQ3 (%)\tMax. (%)\n");
        for p in &self.probes {
            out.push_str(&format!(
                "{}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\n",
                p.probe, p.min, p.q1, p.median, p.q3, p.max
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(prefix: &str, k: usize) -> Vec<String> {
        (1..=k).map(|i| format!("{prefix}{i}")).collect()
    }

    #[test]
    fn sigma_hat2_examples() {
        assert_eq!(sigma_hat2(&[1.0, -1.0, 1.0, -1.0]), 1.0);
        assert_eq!(sigma_hat2(&[3.5; 4]), 0.0);
        assert_eq!(sigma_hat2(&[2.0, 0.0, -2.0, 0.0]), 2.0);
    }

    #[test]
    fn exact_rank_one_fit() {
        let y = DataMatrix::from_matrix(Matrix::from_fn(4, 4, |_, _| 1.0f64)).unwrap();
        let fit = fit_rank2(&y).unwrap();
        for (&p, &t) in fit.phi1.iter().zip(&fit.theta1) {
            assert!((p - 0.5).abs() < 1e-12);
            assert!((t - 2.0).abs() < 1e-12);
        }
        assert!(fit.lambda[1] < 1e-7);
        assert!(fit.sigma2_hat < 1e-14);
    }

    #[test]
    fn exact_rank_two_fit() {
        // orthonormal factors from Sylvester rows
        let u1 = [0.5f64, 0.5, 0.5, 0.5];
        let u2 = [0.5, -0.5, 0.5, -0.5];
        let v1 = [0.5, 0.5, 0.5, 0.5];
        let v2 = [0.5, 0.5, -0.5, -0.5];
        let y = Matrix::from_fn(4, 4, |i, j| 3.0 * u1[i] * v1[j] + 2.0 * u2[i] * v2[j]);
        let fit = fit_matrix(&y).unwrap();
        assert!((fit.lambda[0] - 3.0).abs() < 1e-12);
        assert!((fit.lambda[1] - 2.0).abs() < 1e-12);
        assert!(fit.resid_sigma2.abs() < 1e-14);
    }

    #[test]
    fn identity_residual_variance() {
        let y = Matrix::<f64>::identity(4);
        let fit = fit_matrix(&y).unwrap();
        assert!(fit.degenerate);
        assert!((fit.resid_sigma2 - 0.25).abs() < 1e-14);
    }

    #[test]
    fn errors() {
        assert!(matches!(fit_matrix(&Matrix::<f64>::zeros(4, 3)), Err(Error::AllZero)));
        assert!(matches!(fit_matrix(&Matrix::<f64>::zeros(2, 3)), Err(Error::TooSmall { .. })));
        let mut y = Matrix::<f64>::identity(3);
        y[(1, 2)] = f64::INFINITY;
        assert!(matches!(DataMatrix::from_matrix(y), Err(Error::NonFinite { row: 1, col: 2 })));
    }

    #[test]
    fn contribution_zero_second_dimension() {
        let s = ContributionSummary::from_factors(
            &[1.0, 2.0, 3.0],
            &[0.0, 0.0, 0.0],
            &[0.6, 0.8],
            &[0.8, -0.6],
            &labels("p", 2),
        )
        .unwrap();
        for p in &s.probes {
            assert_eq!([p.min, p.q1, p.median, p.q3, p.max], [0.0; 5]);
        }
    }

    #[test]
    fn contribution_hand_example() {
        let s = ContributionSummary::from_factors(
            &[10.0, 10.0],
            &[1.0, 2.0],
            &[0.8, 0.6],
            &[0.6, -0.8],
            &labels("probe", 2),
        )
        .unwrap();
        let p = &s.probes[0];
        assert!((p.min - 7.5).abs() < 1e-12);
        assert!((p.max - 15.0).abs() < 1e-12);
        assert!((p.median - 11.25).abs() < 1e-12);
        assert!(s.to_tsv().starts_with("probe\tMin. (%)\tQ1 (%)\tMed. (%)\tQ3 (%)\tMax. (%)\n"));
    }

    #[test]
    fn contribution_all_zero_probe_errors() {
        let r = ContributionSummary::from_factors(&[1.0, 1.0], &[1.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &labels("p", 2));
        assert!(matches!(r, Err(Error::NoFirstDimension(ref p)) if p == "p1"));
    }
}
