//! Direction vectors `a` (and matrices `A` of them) for the tests on the
//! second dimension: each row is orthogonal to the first-dimension mean
//! `μ̂₁`, scaled so that `‖a‖² = n`, and mutually orthogonal to the others.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkern::matrix::{dot, norm_sq};
use crate::scalar::Real;

/// Balance statistic above which a warning is raised.
pub const BALANCE_WARN: f64 = 0.5;

const NORM_TOL: f64 = 1e-10;
const ORTHO_TOL: f64 = 1e-8;

/// Partition of arrays into groups, ordered by first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    labels: Vec<String>,
    names: Vec<String>,
    index: Vec<usize>,
}

impl GroupSpec {
    /// One label per array. Every array may form its own group (`p = n`).
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Groups("no arrays".into()));
        }
        let mut names: Vec<String> = Vec::new();
        let mut index = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            let g = match names.iter().position(|n| n == l) {
                Some(g) => g,
                None => {
                    names.push(l.to_string());
                    names.len() - 1
                }
            };
            index.push(g);
        }
        Ok(Self { labels: labels.iter().map(|l| l.as_ref().to_string()).collect(), names, index })
    }

    pub fn n(&self) -> usize {
        self.index.len()
    }

    pub fn p(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn group_of(&self, i: usize) -> usize {
        self.index[i]
    }

    pub fn members(&self, g: usize) -> impl Iterator<Item = usize> + '_ {
        self.index.iter().enumerate().filter(move |(_, &k)| k == g).map(|(i, _)| i)
    }

    pub fn sizes(&self) -> Vec<usize> {
        (0..self.p()).map(|g| self.members(g).count()).collect()
    }

    /// Expands one value per group to one value per array.
    pub fn expand<T: Copy>(&self, per_group: &[T]) -> Vec<T> {
        self.index.iter().map(|&g| per_group[g]).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mu1Estimator {
    #[default]
    Median,
    Mean,
}

/// How a direction set was built; carried into reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Hadamard,
    Complement,
    TwoGroup,
    Contrast,
    Custom,
}

/// `k` directions of length `n` with the `μ̂₁` they were built against.
#[derive(Clone, Debug, Serialize)]
pub struct DirectionSet<T> {
    rows: Vec<Vec<T>>,
    mu1_hat: Vec<T>,
    balance: Vec<T>,
    construction: Construction,
    notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionDiagnostics {
    /// `|‖a_i‖² − n| / n` per row.
    pub norm_error: Vec<f64>,
    /// Largest `|a_iᵀa_j| / n` over `i ≠ j`.
    pub max_pairwise: f64,
    /// `|a_iᵀμ̂₁| / (‖μ̂₁‖√n)` per row.
    pub mu1_error: Vec<f64>,
    /// `max_j a_ij² / n` per row.
    pub balance: Vec<f64>,
    pub warnings: Vec<String>,
}

impl DirectionDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.norm_error.iter().all(|&e| e <= NORM_TOL)
            && self.max_pairwise <= ORTHO_TOL
            && self.mu1_error.iter().all(|&e| e <= ORTHO_TOL)
    }
}

fn balance_of<T: Real>(row: &[T]) -> T {
    let n = T::from_len(row.len());
    row.iter().fold(T::zero(), |acc, &x| acc.max(x * x)) / n
}

pub fn validate_directions<T: Real>(ds: &DirectionSet<T>) -> DirectionDiagnostics {
    diagnose(&ds.rows, &ds.mu1_hat)
}

fn diagnose<T: Real>(rows: &[Vec<T>], mu1_hat: &[T]) -> DirectionDiagnostics {
    let n = mu1_hat.len() as f64;
    let mu_norm = norm_sq(mu1_hat).sqrt().as_f64();
    let norm_error = rows.iter().map(|r| (norm_sq(r).as_f64() - n).abs() / n).collect();
    let mut max_pairwise: f64 = 0.0;
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            max_pairwise = max_pairwise.max(dot(a, b).as_f64().abs() / n);
        }
    }
    let mu1_error = rows
        .iter()
        .map(|r| if mu_norm > 0.0 { dot(r, mu1_hat).as_f64().abs() / (mu_norm * n.sqrt()) } else { 0.0 })
        .collect();
    let balance: Vec<f64> = rows.iter().map(|r| balance_of(r).as_f64()).collect();
    let warnings = balance
        .iter()
        .enumerate()
        .filter(|(_, &b)| b > BALANCE_WARN)
        .map(|(i, b)| format!("direction {i} is unbalanced: max a_j^2/n = {b:.3}"))
        .collect();
    DirectionDiagnostics { norm_error, max_pairwise, mu1_error, balance, warnings }
}

impl<T: Real> DirectionSet<T> {
    /// Validates the three invariants; rows are taken as given.
    pub fn new(rows: Vec<Vec<T>>, mu1_hat: Vec<T>, construction: Construction) -> Result<Self> {
        let n = mu1_hat.len();
        if rows.is_empty() {
            return Err(Error::InvalidDirections("no directions".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Shape(format!("direction of length {} against n = {n}", r.len())));
        }
        let diag = diagnose(&rows, &mu1_hat);
        if !diag.is_valid() {
            return Err(Error::InvalidDirections(format!(
                "norm error {:?}, pairwise {:e}, mu1 error {:?}",
                diag.norm_error, diag.max_pairwise, diag.mu1_error
            )));
        }
        let balance = rows.iter().map(|r| balance_of(r)).collect();
        Ok(Self { rows, mu1_hat, balance, construction, notes: diag.warnings })
    }

    /// Rescales each raw row to `‖a‖² = n`, then validates.
    pub fn normalized(rows: Vec<Vec<T>>, mu1_hat: Vec<T>, construction: Construction) -> Result<Self> {
        let n = T::from_len(mu1_hat.len());
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                let s = norm_sq(&r);
                if s == T::zero() {
                    return Err(Error::ZeroDirection(format!("row {i} is zero")));
                }
                let c = (n / s).sqrt();
                Ok(r.into_iter().map(|x| x * c).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, mu1_hat, construction)
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.mu1_hat.len()
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.rows[i]
    }

    pub fn mu1_hat(&self) -> &[T] {
        &self.mu1_hat
    }

    pub fn balance(&self) -> &[T] {
        &self.balance
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// `A·x`.
    pub fn project(&self, x: &[T]) -> Vec<T> {
        self.rows.iter().map(|r| dot(r, x)).collect()
    }

    /// Plain text form: `# n=<n> k=<k>` then one space-separated row per line.
    /// `μ̂₁` is not part of the format.
    pub fn to_text(&self) -> String {
        let mut out = format!("# n={} k={}\n", self.n(), self.k());
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output and validates it against `mu1_hat`.
    pub fn from_text(text: &str, mu1_hat: Vec<T>) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty direction file".into() })?;
        let (n, k) = parse_header(header)?;
        if n != mu1_hat.len() {
            return Err(Error::Shape(format!("file has n = {n}, mu1_hat has {}", mu1_hat.len())));
        }
        let mut rows = Vec::with_capacity(k);
        for (lineno, l) in lines {
            let row = l
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .ok()
                        .and_then(T::from_f64)
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| Error::Parse { line: lineno + 1, msg: format!("bad number {tok:?}") })
                })
                .collect::<Result<Vec<T>>>()?;
            if row.len() != n {
                return Err(Error::Parse { line: lineno + 1, msg: format!("expected {n} values, got {}", row.len()) });
            }
            rows.push(row);
        }
        if rows.len() != k {
            return Err(Error::Parse { line: 1, msg: format!("header announces k={k}, found {} rows", rows.len()) });
        }
        Self::new(rows, mu1_hat, Construction::Custom)
    }
}

fn parse_header(header: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse { line: 1, msg: format!("expected '# n=<n> k=<k>', got {header:?}") };
    let rest = header.trim().strip_prefix('#').ok_or_else(bad)?;
    let mut n = None;
    let mut k = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("n=") {
            n = v.parse().ok();
        } else if let Some(v) = tok.strip_prefix("k=") {
            k = v.parse().ok();
        }
    }
    Ok((n.ok_or_else(bad)?, k.ok_or_else(bad)?))
}

fn median_of<T: Real>(mut xs: Vec<T>) -> T {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) * T::lit(0.5)
    }
}

/// Group-constant estimate of the first-dimension mean from `θ̂₁`.
pub fn estimate_mu1<T: Real>(theta1: &[T], groups: &GroupSpec, estimator: Mu1Estimator) -> Result<Vec<T>> {
    if theta1.len() != groups.n() {
        return Err(Error::Shape(format!("{} scores for {} arrays", theta1.len(), groups.n())));
    }
    let per_group = (0..groups.p())
        .map(|g| {
            let xs: Vec<T> = groups.members(g).map(|i| theta1[i]).collect();
            if xs.is_empty() {
                return Err(Error::Groups(format!("group {} is empty", groups.names()[g])));
            }
            Ok(match estimator {
                Mu1Estimator::Median => median_of(xs),
                Mu1Estimator::Mean => xs.iter().copied().sum::<T>() / T::from_len(xs.len()),
            })
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(groups.expand(&per_group))
}

/// Removes from `v` its components along `basis` (assumed mutually orthogonal),
/// with one re-orthogonalization pass.
fn project_out<T: Real>(v: &mut [T], basis: &[&[T]]) {
    for _ in 0..2 {
        for b in basis {
            let bb = norm_sq(b);
            if bb == T::zero() {
                continue;
            }
            let c = dot(v, b) / bb;
            v.iter_mut().zip(b.iter()).for_each(|(x, &y)| *x -= c * y);
        }
    }
}

/// Two-group contrast `(−μ̂₂ᵍ on group 1, +μ̂₁ᵍ on group 2)`, projected
/// orthogonal to `μ̂₁` and scaled to `‖a‖² = n`.
pub fn two_group_direction<T: Real>(mu1_hat: &[T], groups: &GroupSpec) -> Result<DirectionSet<T>> {
    if groups.p() != 2 {
        return Err(Error::Groups(format!("two-group direction needs exactly 2 groups, got {}", groups.p())));
    }
    if mu1_hat.len() != groups.n() {
        return Err(Error::Shape(format!("mu1_hat has {} entries for {} arrays", mu1_hat.len(), groups.n())));
    }
    let level = |g: usize| {
        let idx: Vec<usize> = groups.members(g).collect();
        idx.iter().map(|&i| mu1_hat[i]).sum::<T>() / T::from_len(idx.len())
    };
    let (m1, m2) = (level(0), level(1));
    if m1 == T::zero() && m2 == T::zero() {
        return Err(Error::ZeroDirection("both group levels of mu1_hat are zero".into()));
    }
    let mut a = groups.expand(&[-m2, m1]);
    project_out(&mut a, &[mu1_hat]);
    let sizes = groups.sizes();
    let ds = DirectionSet::normalized(vec![a], mu1_hat.to_vec(), Construction::TwoGroup)?;
    Ok(if sizes[0] != sizes[1] {
        ds.with_note(format!("unequal group sizes {}/{}: projected orthogonal to mu1_hat", sizes[0], sizes[1]))
    } else {
        ds
    })
}

/// Group-level contrasts expanded to arrays, projected orthogonal to `μ̂₁`,
/// Gram–Schmidt orthogonalized in the given order and scaled to `‖a‖² = n`.
pub fn contrast_directions<T: Real>(
    groups: &GroupSpec,
    contrasts: &[Vec<T>],
    mu1_hat: &[T],
) -> Result<DirectionSet<T>> {
    let p = groups.p();
    if contrasts.is_empty() || contrasts.len() >= p {
        return Err(Error::Groups(format!(
            "need between 1 and {} contrasts for {p} groups, got {}",
            p - 1,
            contrasts.len()
        )));
    }
    if mu1_hat.len() != groups.n() {
        return Err(Error::Shape(format!("mu1_hat has {} entries for {} arrays", mu1_hat.len(), groups.n())));
    }
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(contrasts.len());
    for (i, c) in contrasts.iter().enumerate() {
        if c.len() != p {
            return Err(Error::Shape(format!("contrast {i} has {} entries for {p} groups", c.len())));
        }
        let mut a = groups.expand(c);
        let before = norm_sq(&a).sqrt();
        let mut basis: Vec<&[T]> = vec![mu1_hat];
        basis.extend(rows.iter().map(Vec::as_slice));
        project_out(&mut a, &basis);
        if before == T::zero() || norm_sq(&a).sqrt() <= T::lit(1e-10) * before {
            return Err(Error::ZeroDirection(format!("contrast {i} is dependent on mu1_hat or earlier contrasts")));
        }
        rows.push(a);
    }
    DirectionSet::normalized(rows, mu1_hat.to_vec(), Construction::Contrast)
}

/// Entry `(i, j)` of the Sylvester–Hadamard matrix `[[1,1],[1,−1]]^{⊗r}`.
#[inline]
pub fn sylvester_entry(i: usize, j: usize) -> i8 {
    if (i & j).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Columns `1..=k` of the order-`n` Sylvester–Hadamard matrix (the constant
/// column 0 dropped), as rows of `A`. `μ̂₁` is taken as `1ₙ`.
pub fn hadamard_directions<T: Real>(n: usize, k: usize) -> Result<DirectionSet<T>> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Domain(format!("Hadamard directions need n = 2^r, got {n}")));
    }
    if k == 0 || k >= n {
        return Err(Error::Domain(format!("need 1 <= k <= {} directions, got {k}", n - 1)));
    }
    let rows = (1..=k).map(|j| (0..n).map(|i| T::from_i8(sylvester_entry(i, j)).expect("±1")).collect()).collect();
    DirectionSet::new(rows, vec![T::one(); n], Construction::Hadamard)
}

fn is_constant<T: Real>(v: &[T]) -> bool {
    let scale = v.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    v.iter().all(|&x| (x - v[0]).abs() <= T::lit(1e-12) * scale)
}

/// Orthogonal basis of the complement of `μ̂₁`, rows scaled to `‖a‖² = n`.
///
/// For `n = 2^r` and constant `μ̂₁` this is the Hadamard family. Otherwise the
/// cosine basis `√2·cos(πk(j+½)/n)`, `k = 1..n−1`, is reflected by the
/// Householder map taking `1ₙ/√n` onto `μ̂₁/‖μ̂₁‖`.
pub fn complement_directions<T: Real>(mu1_hat: &[T]) -> Result<DirectionSet<T>> {
    let n = mu1_hat.len();
    let mu_norm = norm_sq(mu1_hat).sqrt();
    if mu_norm == T::zero() {
        return Err(Error::ZeroDirection("mu1_hat is zero".into()));
    }
    if n < 2 {
        return Err(Error::Domain("complement needs n >= 2".into()));
    }
    if n.is_power_of_two() && is_constant(mu1_hat) {
        let h = hadamard_directions::<T>(n, n - 1)?;
        return DirectionSet::new(h.rows, mu1_hat.to_vec(), Construction::Hadamard);
    }
    let nf = T::from_len(n);
    let pi = T::lit(std::f64::consts::PI);
    let sqrt2 = T::lit(std::f64::consts::SQRT_2);
    let half = T::lit(0.5);
    let cosine: Vec<Vec<T>> = (1..n)
        .map(|k| (0..n).map(|j| sqrt2 * (pi * T::from_len(k) * (T::from_len(j) + half) / nf).cos()).collect())
        .collect();
    // Householder w = (e − u)/‖e − u‖ with u = 1/√n, e = μ̂₁/‖μ̂₁‖, sign chosen
    // so the reflection maps u to e (or −e, which spans the same line).
    let inv_sqrt_n = nf.sqrt().recip();
    let e: Vec<T> = mu1_hat.iter().map(|&x| x / mu_norm).collect();
    let mut w: Vec<T> = e.iter().map(|&x| x - inv_sqrt_n).collect();
    let mut wn = norm_sq(&w).sqrt();
    if wn <= T::lit(1e-8) {
        w = e.iter().map(|&x| x + inv_sqrt_n).collect();
        wn = norm_sq(&w).sqrt();
    }
    let rows = if wn <= T::lit(1e-8) {
        cosine
    } else {
        w.iter_mut().for_each(|x| *x /= wn);
        cosine
            .into_iter()
            .map(|c| {
                let t = T::lit(2.0) * dot(&w, &c);
                c.iter().zip(&w).map(|(&ci, &wi)| ci - t * wi).collect::<Vec<T>>()
            })
            .collect()
    };
    // clean residual round-off before validation
    let mut clean: Vec<Vec<T>> = Vec::with_capacity(rows.len());
    for mut r in rows {
        let mut basis: Vec<&[T]> = vec![mu1_hat];
        basis.extend(clean.iter().map(Vec::as_slice));
        project_out(&mut r, &basis);
        clean.push(r);
    }
    Ok(DirectionSet::normalized(clean, mu1_hat.to_vec(), Construction::Complement)?
        .with_note("complement basis: reflected cosine family, not Kronecker"))
}
