//! Quantile normalization across arrays.

use crate::error::{Error, Result};
use crate::numkern::Matrix;
use crate::rank2::DataMatrix;

use super::io::ProbeSetRecord;

/// Gives every array (inner vector) the same empirical distribution: the
/// `r`-th smallest value becomes the mean of the `r`-th smallest values
/// across arrays. Tied values within an array all receive the mean of the
/// reference values over their tied ranks.
pub fn quantile_normalize_arrays(arrays: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let Some(first) = arrays.first() else {
        return Ok(Vec::new());
    };
    let len = first.len();
    if let Some((i, a)) = arrays.iter().enumerate().find(|(_, a)| a.len() != len) {
        return Err(Error::Precondition(format!("array {i} has {} values, array 0 has {len}", a.len())));
    }
    if arrays.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Precondition("quantile normalization needs finite values".into()));
    }
    let orders: Vec<Vec<usize>> = arrays
        .iter()
        .map(|a| {
            let mut idx: Vec<usize> = (0..len).collect();
            idx.sort_by(|&x, &y| a[x].total_cmp(&a[y]));
            idx
        })
        .collect();
    let k = arrays.len() as f64;
    let reference: Vec<f64> =
        (0..len).map(|r| arrays.iter().zip(&orders).map(|(a, o)| a[o[r]]).sum::<f64>() / k).collect();
    Ok(arrays
        .iter()
        .zip(&orders)
        .map(|(a, order)| {
            let mut out = vec![0.0; len];
            let mut r = 0;
            while r < len {
                let mut end = r + 1;
                while end < len && a[order[end]] == a[order[r]] {
                    end += 1;
                }
                let v = reference[r..end].iter().sum::<f64>() / (end - r) as f64;
                for &i in &order[r..end] {
                    out[i] = v;
                }
                r = end;
            }
            out
        })
        .collect())
}

/// Normalizes the pooled values of all probe sets, array by array.
pub fn quantile_normalize(records: &[ProbeSetRecord]) -> Result<Vec<ProbeSetRecord>> {
    let Some(first) = records.first() else {
        return Ok(Vec::new());
    };
    let n = first.matrix.n();
    if let Some(r) = records.iter().find(|r| r.matrix.n() != n) {
        return Err(Error::Precondition(format!(
            "probe set {} has {} arrays, {} has {n}; arrays need equal value counts",
            r.probeset_id,
            r.matrix.n(),
            first.probeset_id
        )));
    }
    let pooled: Vec<Vec<f64>> =
        (0..n).map(|i| records.iter().flat_map(|r| r.matrix.values().row(i).to_vec()).collect()).collect();
    let normalized = quantile_normalize_arrays(&pooled)?;
    let mut offset = 0;
    records
        .iter()
        .map(|r| {
            let m = r.matrix.m();
            let values = Matrix::from_fn(n, m, |i, j| normalized[i][offset + j]);
            offset += m;
            let matrix = DataMatrix::new(values, r.matrix.row_labels().to_vec(), r.matrix.col_labels().to_vec())?;
            Ok(ProbeSetRecord { probeset_id: r.probeset_id.clone(), matrix, fit: None, notes: r.notes.clone() })
        })
        .collect()
}
