//! Fit, screen and test a collection of probe sets.

use rayon::prelude::*;

use crate::directions::{
    complement_directions, contrast_directions, estimate_mu1, two_group_direction, DirectionSet, GroupSpec,
    Mu1Estimator,
};
use crate::error::{Error, Result};
use crate::inference::{
    bh_adjust, bootstrap_p, chisq_test, max_test, target_test, BootstrapMethod, MaxCalibration, Method, Sidedness,
    TestOptions, TestOutcome,
};
use crate::rank2::fit_rank2;
use crate::rng::derive_seed;

use super::io::{Metadata, ProbeSetRecord};
use super::report::{ScreenReport, ScreenReportRow};

pub const DEFAULT_RATIO: f64 = 0.1;
pub const DEFAULT_ALPHA: f64 = 0.05;

/// `λ₂²/λ₁²` of a fitted record; zero when unfitted.
pub fn ratio_of(record: &ProbeSetRecord) -> f64 {
    record.fit.as_ref().map_or(0.0, |f| f.ratio())
}

/// Fits every record that has no fit yet. Failures are kept as notes.
pub fn fit_records(records: &mut [ProbeSetRecord]) {
    records.par_iter_mut().filter(|r| r.fit.is_none()).for_each(|r| match fit_rank2(&r.matrix) {
        Ok(fit) => {
            if fit.degenerate {
                r.notes.push("degenerate fit: lambda1 == lambda2".into());
            }
            r.fit = Some(fit);
        }
        Err(e) => r.notes.push(format!("fit failed: {e}")),
    });
}

/// Fits, keeps records with `λ₂²/λ₁² > ratio_threshold`, orders them by
/// ratio (descending, ties by id) and truncates to `top_n`.
pub fn screen(mut records: Vec<ProbeSetRecord>, ratio_threshold: f64, top_n: Option<usize>) -> Vec<ProbeSetRecord> {
    fit_records(&mut records);
    let mut kept: Vec<(f64, ProbeSetRecord)> = records
        .into_iter()
        .map(|r| (ratio_of(&r), r))
        .filter(|(q, r)| r.fit.is_some() && *q > ratio_threshold)
        .collect();
    kept.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.probeset_id.cmp(&b.1.probeset_id)));
    if let Some(t) = top_n {
        kept.truncate(t);
    }
    kept.into_iter().map(|(_, r)| r).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScreenTest {
    /// Two-group contrast; needs exactly two groups.
    #[default]
    Target,
    /// Group contrasts; Helmert contrasts unless given.
    Chisq,
    /// Maximum over a complete basis orthogonal to `μ̂₁`.
    Max,
}

impl ScreenTest {
    pub fn name(self) -> &'static str {
        match self {
            ScreenTest::Target => "target",
            ScreenTest::Chisq => "chisq",
            ScreenTest::Max => "max",
        }
    }
}

impl std::str::FromStr for ScreenTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "target" => Ok(ScreenTest::Target),
            "chisq" => Ok(ScreenTest::Chisq),
            "max" => Ok(ScreenTest::Max),
            _ => Err(Error::TestConfig(format!("unknown test {s:?}; expected target, chisq or max"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    pub test: ScreenTest,
    /// Bootstrap resamples; `None` for the large-sample reference law.
    pub bootstrap: Option<usize>,
    pub seed: u64,
    pub mu1_estimator: Mu1Estimator,
    /// Group-level contrasts for the χ² test, one entry per group.
    pub contrasts: Option<Vec<Vec<f64>>>,
    pub alpha: f64,
    pub sidedness: Sidedness,
    pub max_calibration: MaxCalibration,
    pub force: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            test: ScreenTest::Target,
            bootstrap: None,
            seed: 0,
            mu1_estimator: Mu1Estimator::Median,
            contrasts: None,
            alpha: DEFAULT_ALPHA,
            sidedness: Sidedness::TwoSided,
            max_calibration: MaxCalibration::PhiPower,
            force: false,
        }
    }
}

/// `p − 1` Helmert contrasts: contrast `j` compares group `j` with the mean
/// of the groups before it.
pub fn helmert_contrasts(p: usize) -> Vec<Vec<f64>> {
    (1..p)
        .map(|j| {
            (0..p)
                .map(|g| {
                    if g < j {
                        1.0
                    } else if g == j {
                        -(j as f64)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

fn check_config(meta: &Metadata, config: &AnalysisConfig) -> Result<()> {
    let p = meta.groups.p();
    match config.test {
        ScreenTest::Target if p != 2 => {
            return Err(Error::TestConfig(format!("the target test needs exactly 2 groups, metadata has {p}")))
        }
        ScreenTest::Chisq => {
            if let Some(c) = &config.contrasts {
                if c.is_empty() || c.iter().any(|r| r.len() != p) {
                    return Err(Error::TestConfig(format!("contrasts need one weight for each of {p} groups")));
                }
            } else if p < 2 {
                return Err(Error::TestConfig("the chi-square test needs at least 2 groups".into()));
            }
        }
        ScreenTest::Max if config.bootstrap.is_some() => {
            return Err(Error::TestConfig("the max test has no bootstrap calibration".into()))
        }
        _ => {}
    }
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::TestConfig(format!("alpha must lie in (0, 1), got {}", config.alpha)));
    }
    Ok(())
}

fn directions(mu1_hat: &[f64], groups: &GroupSpec, config: &AnalysisConfig) -> Result<DirectionSet<f64>> {
    match config.test {
        ScreenTest::Target => two_group_direction(mu1_hat, groups),
        ScreenTest::Chisq => {
            let default;
            let contrasts = match &config.contrasts {
                Some(c) => c,
                None => {
                    default = helmert_contrasts(groups.p());
                    &default
                }
            };
            contrast_directions(groups, contrasts, mu1_hat)
        }
        ScreenTest::Max => complement_directions(mu1_hat),
    }
}

fn test_record(
    record: &ProbeSetRecord,
    meta: &Metadata,
    config: &AnalysisConfig,
    index: usize,
) -> Result<TestOutcome<f64>> {
    let fit = match &record.fit {
        Some(f) => f.clone(),
        None => fit_rank2(&record.matrix)?,
    };
    let mu1_groups = meta.mu1_groups.as_ref().unwrap_or(&meta.groups);
    let mu1_hat = estimate_mu1(&fit.theta1, mu1_groups, config.mu1_estimator)?;
    let ds = directions(&mu1_hat, &meta.groups, config)?;
    let opts =
        TestOptions { sidedness: config.sidedness, force: config.force, max_calibration: config.max_calibration };
    let mut outcome = match (config.test, config.bootstrap) {
        (ScreenTest::Target, None) => target_test(&fit, ds.row(0), opts)?,
        (ScreenTest::Chisq, None) => chisq_test(&fit, &ds, opts)?,
        (ScreenTest::Max, _) => max_test(&fit, &ds, opts)?,
        (test, Some(b)) => {
            let method = if test == ScreenTest::Target { BootstrapMethod::Target } else { BootstrapMethod::Chisq };
            bootstrap_p(&fit, &ds, method, b, derive_seed(config.seed, &[index as u64]), opts)?
        }
    };
    for note in ds.notes() {
        if !outcome.warnings.contains(note) {
            outcome.warnings.push(note.clone());
        }
    }
    Ok(outcome)
}

fn method_name(config: &AnalysisConfig) -> &'static str {
    let m = match (config.test, config.bootstrap) {
        (ScreenTest::Target, None) => Method::Target,
        (ScreenTest::Chisq, None) => Method::Chisq,
        (ScreenTest::Max, _) => Method::Max,
        (ScreenTest::Target, Some(_)) => Method::TargetBootstrap,
        (ScreenTest::Chisq, Some(_)) => Method::ChisqBootstrap,
    };
    m.as_str()
}

/// Tests every record, then adjusts the valid p-values together by
/// Benjamini–Hochberg. Records whose test fails carry the error in `notes`
/// and stay out of the family.
pub fn analyze(records: &[ProbeSetRecord], meta: &Metadata, config: &AnalysisConfig) -> Result<ScreenReport> {
    check_config(meta, config)?;
    let n = meta.groups.n();
    if let Some(r) = records.iter().find(|r| r.matrix.n() != n || r.matrix.row_labels() != meta.array_ids) {
        return Err(Error::Precondition(format!("probe set {} does not match the {n} metadata arrays", r.probeset_id)));
    }
    let outcomes: Vec<Result<TestOutcome<f64>>> =
        records.par_iter().enumerate().map(|(i, r)| test_record(r, meta, config, i)).collect();

    let valid: Vec<f64> = outcomes.iter().filter_map(|o| o.as_ref().ok().map(|o| o.p_value)).collect();
    let adjusted = bh_adjust(&valid)?;
    let mut adj = adjusted.into_iter();

    let method = method_name(config);
    let rows = records
        .iter()
        .zip(outcomes)
        .map(|(r, outcome)| {
            let mut notes = r.notes.clone();
            let lambda = |j: usize| r.fit.as_ref().and_then(|f| f.lambda.get(j).copied());
            let (statistic, p_value, p_adjusted) = match outcome {
                Ok(o) => {
                    notes.extend(o.warnings);
                    (Some(o.statistic), Some(o.p_value), adj.next())
                }
                Err(e) => {
                    notes.push(e.to_string());
                    (None, None, None)
                }
            };
            ScreenReportRow {
                probeset_id: r.probeset_id.clone(),
                n: r.matrix.n(),
                m: r.matrix.m(),
                lambda: [lambda(0), lambda(1), lambda(2), lambda(3)],
                ratio: ratio_of(r),
                method: method.to_string(),
                statistic,
                p_value,
                p_adjusted,
                selected: p_adjusted.is_some_and(|q| q <= config.alpha),
                notes,
            }
        })
        .collect();
    Ok(ScreenReport { test: method.to_string(), family_size: valid.len(), alpha: config.alpha, rows })
}
