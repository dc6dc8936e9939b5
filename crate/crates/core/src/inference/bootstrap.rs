//! Residual bootstrap on the second-dimension scores.
//!
//! Resamples the centered `θ̂₂` values with replacement and recomputes the
//! studentized statistic, so no further SVDs are needed. The p-value is
//! `B⁻¹ Σ_b I{|T*_b| ≥ |T|}` (target) or `B⁻¹ Σ_b I{T*_b ≥ T}` (χ²); it can be 0.
//! The `(1 + Σ)/(1 + B)` variant is not used.

use rand::Rng;
use rayon::prelude::*;

use crate::directions::DirectionSet;
use crate::error::{Error, Result};
use crate::numkern::matrix::{dot, mean, norm_sq};
use crate::rank2::Rank2Fit;
use crate::rng::{substream, StreamRng};
use crate::scalar::Real;

use super::asymptotic::{chisq_test, target_test, Sidedness, TestOptions};
use super::outcome::{Method, TestOutcome};

pub const MIN_RESAMPLES: usize = 100;
/// Redraws allowed for a resample whose values are all equal.
pub const MAX_REDRAWS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BootstrapMethod {
    Target,
    Chisq,
}

/// One resample drawn from `rng`; `None` when every redraw had zero spread.
fn resample_statistic<T: Real>(
    centered: &[T],
    ds: &DirectionSet<T>,
    method: BootstrapMethod,
    rng: &mut StreamRng,
    buf: &mut Vec<T>,
) -> Option<T> {
    let n = centered.len();
    let nf = T::from_len(n);
    for _ in 0..=MAX_REDRAWS {
        buf.clear();
        buf.extend((0..n).map(|_| centered[rng.random_range(0..n)]));
        if buf.iter().all(|&v| v == buf[0]) {
            continue;
        }
        let bar = mean(buf);
        let var = norm_sq(buf) / nf - bar * bar;
        if var > T::zero() {
            return Some(match method {
                BootstrapMethod::Target => dot(ds.row(0), buf) / (nf.sqrt() * var.sqrt()),
                BootstrapMethod::Chisq => norm_sq(&ds.project(buf)) / (nf * var),
            });
        }
    }
    None
}

/// Bootstrap-calibrated target or χ² test. Resample `r` draws from the
/// substream `(seed, r)`, so the result does not depend on thread count.
pub fn bootstrap_p<T: Real>(
    fit: &Rank2Fit<T>,
    ds: &DirectionSet<T>,
    method: BootstrapMethod,
    resamples: usize,
    seed: u64,
    opts: TestOptions,
) -> Result<TestOutcome<T>> {
    if resamples < MIN_RESAMPLES {
        return Err(Error::TestConfig(format!("bootstrap needs B >= {MIN_RESAMPLES}, got {resamples}")));
    }
    let observed = match method {
        BootstrapMethod::Target => {
            if ds.k() != 1 {
                return Err(Error::TestConfig(format!("target bootstrap takes one direction, got {}", ds.k())));
            }
            target_test(fit, ds.row(0), opts)?
        }
        BootstrapMethod::Chisq => chisq_test(fit, ds, opts)?,
    };
    let t_obs = observed.statistic;
    let centered: Vec<T> = fit.theta2.iter().map(|&t| t - fit.theta2_bar).collect();

    let exceed = |t: T| match (method, opts.sidedness) {
        (BootstrapMethod::Chisq, _) | (BootstrapMethod::Target, Sidedness::Greater) => t >= t_obs,
        (BootstrapMethod::Target, Sidedness::Less) => t <= t_obs,
        (BootstrapMethod::Target, Sidedness::TwoSided) => t.abs() >= t_obs.abs(),
    };
    let count: usize = (0..resamples)
        .into_par_iter()
        .map_init(Vec::new, |buf, r| {
            let mut rng = substream(seed, r as u64);
            resample_statistic(&centered, ds, method, &mut rng, buf).is_some_and(exceed) as usize
        })
        .sum();

    Ok(TestOutcome {
        method: match method {
            BootstrapMethod::Target => Method::TargetBootstrap,
            BootstrapMethod::Chisq => Method::ChisqBootstrap,
        },
        statistic: t_obs,
        p_value: T::from_len(count) / T::from_len(resamples),
        p_value_alt: None,
        df: observed.df,
        gumbel_constants: None,
        n: fit.n,
        k: ds.k(),
        bootstrap_b: Some(resamples),
        seed: Some(seed),
        warnings: observed.warnings,
    })
}
