//! Reference implementations that share no code with the library.

/// Singular triplets of a dense row-major `n × m` matrix by power iteration
/// on `v ↦ Yᵀ(Yv)` with deflation `Y ← Y − σuvᵀ`.
pub struct OracleSvd {
    pub values: Vec<f64>,
    /// Right singular vectors.
    pub v: Vec<Vec<f64>>,
}

fn matvec(y: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    y.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn tmatvec(y: &[Vec<f64>], u: &[f64]) -> Vec<f64> {
    let m = y[0].len();
    let mut out = vec![0.0; m];
    for (row, &ui) in y.iter().zip(u) {
        for (o, &a) in out.iter_mut().zip(row) {
            *o += a * ui;
        }
    }
    out
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn power_svd(rows: &[Vec<f64>], count: usize) -> OracleSvd {
    let m = rows[0].len();
    let mut y: Vec<Vec<f64>> = rows.to_vec();
    let mut values = Vec::new();
    let mut vs: Vec<Vec<f64>> = Vec::new();
    for k in 0..count {
        // deterministic start with weight on every coordinate
        let mut v: Vec<f64> = (0..m).map(|j| 1.0 + ((j * 7 + k * 3) % 11) as f64 / 10.0).collect();
        for prev in &vs {
            let c: f64 = v.iter().zip(prev).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(prev).for_each(|(a, b)| *a -= c * b);
        }
        let s = norm(&v);
        v.iter_mut().for_each(|x| *x /= s);
        let mut lambda = 0.0;
        for _ in 0..500_000 {
            let mut w = tmatvec(&y, &matvec(&y, &v));
            // keep the iterate clear of directions already removed
            for prev in &vs {
                let c: f64 = w.iter().zip(prev).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(prev).for_each(|(a, b)| *a -= c * b);
            }
            let l = norm(&w);
            if l == 0.0 {
                break;
            }
            w.iter_mut().for_each(|x| *x /= l);
            let diff = v.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            v = w;
            let done = diff < 1e-15 || ((l - lambda).abs() <= 1e-16 * l && diff < 1e-12);
            lambda = l;
            if done {
                break;
            }
        }
        let u = matvec(&y, &v);
        let sigma = norm(&u);
        if sigma > 0.0 {
            for (row, &ui) in y.iter_mut().zip(&u) {
                for (a, &vj) in row.iter_mut().zip(&v) {
                    *a -= ui * vj;
                }
            }
        }
        values.push(sigma);
        vs.push(v);
    }
    OracleSvd { values, v: vs }
}

/// `‖(I − QQᵀ)P‖_F` for orthonormal column sets `P`, `Q`; bounds the sine of
/// the largest principal angle between their spans.
pub fn subspace_gap(p: &[Vec<f64>], q: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for a in p {
        let mut r = a.clone();
        for b in q {
            let c: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        total += r.iter().map(|x| x * x).sum::<f64>();
    }
    total.sqrt()
}

/// Benjamini–Hochberg straight from the definition
/// `q_i = min_{j: p_j ≥ p_i} min(1, K p_j / rank_j)`.
pub fn bh_naive(p: &[f64]) -> Vec<f64> {
    let k = p.len() as f64;
    let rank = |x: f64| p.iter().filter(|&&y| y <= x).count() as f64;
    p.iter()
        .map(|&pi| {
            p.iter().filter(|&&pj| pj >= pi).map(|&pj| (k * pj / rank(pj)).min(1.0)).fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Quantile normalization by counting ranks, one value at a time.
pub fn quantile_naive(arrays: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let len = arrays[0].len();
    let sorted: Vec<Vec<f64>> = arrays
        .iter()
        .map(|a| {
            let mut s = a.clone();
            s.sort_by(|x, y| x.partial_cmp(y).unwrap());
            s
        })
        .collect();
    let reference: Vec<f64> =
        (0..len).map(|r| sorted.iter().map(|s| s[r]).sum::<f64>() / arrays.len() as f64).collect();
    arrays
        .iter()
        .map(|a| {
            a.iter()
                .map(|&x| {
                    let below = a.iter().filter(|&&y| y < x).count();
                    let tied = a.iter().filter(|&&y| y == x).count();
                    reference[below..below + tied].iter().sum::<f64>() / tied as f64
                })
                .collect()
        })
        .collect()
}

/// Direct evaluation of `n^{-1/2} aᵀθ / σ` with the divide-by-`n` variance.
pub fn z_naive(a: &[f64], theta: &[f64]) -> f64 {
    let n = theta.len() as f64;
    let mean = theta.iter().sum::<f64>() / n;
    let var = theta.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / n;
    a.iter().zip(theta).map(|(x, y)| x * y).sum::<f64>() / n.sqrt() / var.sqrt()
}

/// `Φ(x)` as `½ + ∫₀ˣ φ(t) dt` by composite Simpson's rule.
pub fn phi_naive(x: f64) -> f64 {
    let panels = 20_000;
    let h = x / panels as f64;
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = pdf(0.0) + pdf(x);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * pdf(i as f64 * h);
    }
    0.5 + s * h / 3.0
}

/// `(c_n, b_n)` evaluated directly in f64.
pub fn gumbel_naive(n: usize) -> (f64, f64) {
    let l = ((n - 1) as f64).ln();
    let c = (2.0 * l).sqrt();
    (c, c - (4.0 * std::f64::consts::PI * l).ln() / (2.0 * c))
}

/// Sylvester rows of order `n` (a power of two) by doubling `[[1]]`.
pub fn sylvester_naive(n: usize) -> Vec<Vec<f64>> {
    let mut h = vec![vec![1.0]];
    while h.len() < n {
        let top: Vec<Vec<f64>> = h.iter().map(|r| r.iter().chain(r).copied().collect()).collect();
        let bottom: Vec<Vec<f64>> = h.iter().map(|r| r.iter().copied().chain(r.iter().map(|x| -x)).collect()).collect();
        h = top.into_iter().chain(bottom).collect();
    }
    h
}
