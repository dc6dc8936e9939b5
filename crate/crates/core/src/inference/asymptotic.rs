//! Large-sample tests of `μ₂ = 0` built on the second-dimension scores `θ̂₂`.

use crate::directions::DirectionSet;
use crate::error::{Error, Result};
use crate::numkern::matrix::{dot, norm_sq};
use crate::numkern::special::{chisq_sf, normal_cdf, normal_sf};
use crate::rank2::Rank2Fit;
use crate::scalar::Real;

use super::outcome::{Method, TestOutcome};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Sidedness {
    #[default]
    TwoSided,
    /// Reject for large positive `Z`.
    Greater,
    /// Reject for large negative `Z`.
    Less,
}

/// Null law for the max statistic; the other one is reported as `p_value_alt`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxCalibration {
    /// Finite-sample `1 − Φ(u)^{n−1}`.
    #[default]
    PhiPower,
    /// Extreme-value limit `1 − exp(−exp(−c_n(u − b_n)))`.
    Gumbel,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TestOptions {
    pub sidedness: Sidedness,
    /// Run on a degenerate fit instead of refusing it.
    pub force: bool,
    pub max_calibration: MaxCalibration,
}

/// `σ̂`, refusing degenerate fits and zero spread.
pub(crate) fn checked_sigma<T: Real>(fit: &Rank2Fit<T>, opts: &TestOptions) -> Result<T> {
    if fit.degenerate && !opts.force {
        return Err(Error::DegenerateFit);
    }
    if fit.n < 3 {
        return Err(Error::TooSmall { n: fit.n, m: fit.m });
    }
    // measured against the whole fitted signal; rounding noise in θ̂₂ counts as zero
    let scale = (norm_sq(&fit.theta1) + norm_sq(&fit.theta2)) / T::from_len(fit.n);
    if fit.sigma2_hat.is_nan() || fit.sigma2_hat <= T::lit(1e-14) * scale || fit.sigma2_hat <= T::zero() {
        return Err(Error::SigmaZero);
    }
    Ok(fit.sigma2_hat.sqrt())
}

pub(crate) fn check_direction<T: Real>(a: &[T], n: usize) -> Result<()> {
    if a.len() != n {
        return Err(Error::Shape(format!("direction has {} entries, fit has n = {n}", a.len())));
    }
    let nf = T::from_len(n);
    if ((norm_sq(a) - nf) / nf).abs() > T::lit(1e-8) {
        return Err(Error::InvalidDirections(format!("|a|^2 = {} differs from n = {n}", norm_sq(a))));
    }
    Ok(())
}

pub(crate) fn z_p_value<T: Real>(z: T, sidedness: Sidedness) -> T {
    match sidedness {
        Sidedness::TwoSided => (T::lit(2.0) * normal_sf(z.abs())).min(T::one()),
        Sidedness::Greater => normal_sf(z),
        Sidedness::Less => normal_cdf(z),
    }
}

/// `Z = n^{−1/2}·aᵀθ̂₂ / σ̂` against the standard normal.
pub fn target_test<T: Real>(fit: &Rank2Fit<T>, a: &[T], opts: TestOptions) -> Result<TestOutcome<T>> {
    check_direction(a, fit.n)?;
    let sigma = checked_sigma(fit, &opts)?;
    let z = dot(a, &fit.theta2) / (T::from_len(fit.n).sqrt() * sigma);
    Ok(TestOutcome {
        method: Method::Target,
        statistic: z,
        p_value: z_p_value(z, opts.sidedness),
        p_value_alt: None,
        df: None,
        gumbel_constants: None,
        n: fit.n,
        k: 1,
        bootstrap_b: None,
        seed: None,
        warnings: Vec::new(),
    })
}

/// `T_A = n⁻¹‖Aθ̂₂‖² / σ̂²` against `χ²_k`.
pub fn chisq_test<T: Real>(fit: &Rank2Fit<T>, ds: &DirectionSet<T>, opts: TestOptions) -> Result<TestOutcome<T>> {
    let (n, k) = (fit.n, ds.k());
    if ds.n() != n {
        return Err(Error::Shape(format!("directions have n = {}, fit has n = {n}", ds.n())));
    }
    if k >= n {
        return Err(Error::TestConfig(format!("chi-square test needs k < n, got k = {k}, n = {n}")));
    }
    let sigma = checked_sigma(fit, &opts)?;
    let stat = norm_sq(&ds.project(&fit.theta2)) / (T::from_len(n) * sigma * sigma);
    let mut warnings = Vec::new();
    if 2 * k > n {
        warnings.push(format!("k = {k} exceeds n/2; the chi-square approximation degrades as k approaches n"));
    }
    Ok(TestOutcome {
        method: Method::Chisq,
        statistic: stat,
        p_value: chisq_sf(stat, k)?,
        p_value_alt: None,
        df: Some(k),
        gumbel_constants: None,
        n,
        k,
        bootstrap_b: None,
        seed: None,
        warnings,
    })
}

/// `c_n = √(2 ln(n−1))`, `b_n = c_n − ln(4π ln(n−1)) / (2c_n)`; needs `n ≥ 3`.
pub fn gumbel_constants<T: Real>(n: usize) -> Result<(T, T)> {
    if n < 3 {
        return Err(Error::Domain(format!("Gumbel constants need n >= 3, got {n}")));
    }
    let l = T::from_len(n - 1).ln();
    let c = (T::lit(2.0) * l).sqrt();
    let b = c - (T::lit(4.0 * std::f64::consts::PI) * l).ln() / (T::lit(2.0) * c);
    Ok((c, b))
}

/// `1 − Φ(u)^{count}`, evaluated through logarithms to keep small tails.
pub fn phi_power_sf<T: Real>(u: T, count: usize) -> T {
    let log_phi = (-normal_sf(u)).ln_1p();
    -(T::from_len(count) * log_phi).exp_m1()
}

/// `M_n = max_j n^{−1/2}a_jᵀθ̂₂` over `k = n − 1` directions, standardized by `σ̂`.
pub fn max_test<T: Real>(fit: &Rank2Fit<T>, ds: &DirectionSet<T>, opts: TestOptions) -> Result<TestOutcome<T>> {
    let n = fit.n;
    if n < 3 {
        return Err(Error::TooSmall { n, m: fit.m });
    }
    if ds.n() != n || ds.k() != n - 1 {
        return Err(Error::TestConfig(format!("max test needs k = n - 1 = {} directions of length {n}", n - 1)));
    }
    let sigma = checked_sigma(fit, &opts)?;
    let root_n = T::from_len(n).sqrt();
    let m = ds.rows().iter().map(|a| dot(a, &fit.theta2) / root_n).fold(T::neg_infinity(), T::max);
    let u = m / sigma;
    let (c, b) = gumbel_constants::<T>(n)?;
    let gumbel = -(-(-(c * (u - b))).exp()).exp_m1();
    let phi_power = phi_power_sf(u, n - 1);
    let (p, alt) = match opts.max_calibration {
        MaxCalibration::PhiPower => (phi_power, gumbel),
        MaxCalibration::Gumbel => (gumbel, phi_power),
    };
    Ok(TestOutcome {
        method: Method::Max,
        statistic: u,
        p_value: p,
        p_value_alt: Some(alt),
        df: None,
        gumbel_constants: Some((c, b)),
        n,
        k: n - 1,
        bootstrap_b: None,
        seed: None,
        warnings: ds.notes().to_vec(),
    })
}
