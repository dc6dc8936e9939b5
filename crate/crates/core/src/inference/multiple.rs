use crate::error::{Error, Result};
use crate::scalar::Real;

/// Benjamini–Hochberg step-up adjusted p-values, in input order.
pub fn bh_adjust<T: Real>(pvals: &[T]) -> Result<Vec<T>> {
    if let Some(p) = pvals.iter().find(|p| !(**p >= T::zero() && **p <= T::one())) {
        return Err(Error::Domain(format!("p-value {p} outside [0, 1]")));
    }
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].partial_cmp(&pvals[b]).expect("finite").then(a.cmp(&b)));
    let mf = T::from_len(m);
    let mut adjusted = vec![T::zero(); m];
    let mut running = T::one();
    for (rank, &i) in order.iter().enumerate().rev() {
        let candidate = (mf * pvals[i] / T::from_len(rank + 1)).max(pvals[i]).min(T::one());
        running = running.min(candidate);
        adjusted[i] = running;
    }
    Ok(adjusted)
}
