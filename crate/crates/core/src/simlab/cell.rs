use rayon::prelude::*;
use serde::Serialize;

use crate::directions::{complement_directions, hadamard_directions, Construction, DirectionSet};
use crate::error::{Error, Result};
use crate::inference::asymptotic::z_p_value;
use crate::inference::{bootstrap_p, chisq_test, max_test, target_test, BootstrapMethod, MaxCalibration, TestOptions};
use crate::numkern::norm_sq;
use crate::rank2::fit_matrix;
use crate::rng::{derive_seed, Role};

use super::spec::{alternating, ErrorDist, Hypothesis, SimulationSpec};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const MIN_REPS: usize = 100;

/// Target directions used in the simulation study.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionCase {
    /// `a = (1, −1, …, 1, −1)`, aligned with the alternative.
    Case1,
    /// `(√3/2)(1, −1, …) + (1/2)(1, …, 1, −1, …, −1)`. For `n ≡ 2 (mod 4)`
    /// the summands are not orthogonal and `‖a‖² = n + √3`.
    Case2,
}

/// The case vector as written, before any rescaling; case 2 needs even `n`.
pub fn case_vector(case: DirectionCase, n: usize) -> Result<Vec<f64>> {
    let alt = alternating(n);
    Ok(match case {
        DirectionCase::Case1 => alt,
        DirectionCase::Case2 => {
            if !n.is_multiple_of(2) {
                return Err(Error::Domain(format!("case-2 direction needs even n, got {n}")));
            }
            let s3 = 3f64.sqrt() / 2.0;
            alt.iter().enumerate().map(|(i, &a)| s3 * a + 0.5 * if i < n / 2 { 1.0 } else { -1.0 }).collect()
        }
    })
}

/// The case direction rescaled to `‖a‖² = n` and checked against `mu1_hat`.
pub fn case_direction(case: DirectionCase, mu1_hat: &[f64]) -> Result<DirectionSet<f64>> {
    let raw = case_vector(case, mu1_hat.len())?;
    DirectionSet::normalized(vec![raw], mu1_hat.to_vec(), Construction::Custom)
}

/// `‖a‖/√n` for the unscaled case vector.
pub fn case_scale(case: DirectionCase, n: usize) -> Result<f64> {
    Ok((norm_sq(&case_vector(case, n)?) / n as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "test")]
pub enum TestConfig {
    Target { case: DirectionCase },
    Chisq { k: usize },
    Max { calibration: MaxCalibration },
    TargetBootstrap { case: DirectionCase, resamples: usize },
    ChisqBootstrap { k: usize, resamples: usize },
}

impl TestConfig {
    pub fn label(&self) -> String {
        let case = |c: &DirectionCase| match c {
            DirectionCase::Case1 => "case1",
            DirectionCase::Case2 => "case2",
        };
        match self {
            TestConfig::Target { case: c } => format!("target_{}", case(c)),
            TestConfig::Chisq { k } => format!("chisq_k{k}"),
            TestConfig::Max { calibration: MaxCalibration::Gumbel } => "max_gumbel".into(),
            TestConfig::Max { calibration: MaxCalibration::PhiPower } => "max_phi_power".into(),
            TestConfig::TargetBootstrap { case: c, .. } => format!("target_{}_bootstrap", case(c)),
            TestConfig::ChisqBootstrap { k, .. } => format!("chisq_k{k}_bootstrap"),
        }
    }

    /// Direction set for a spec whose `μ₁` is known.
    pub fn directions(&self, spec: &SimulationSpec) -> Result<DirectionSet<f64>> {
        match *self {
            TestConfig::Target { case } | TestConfig::TargetBootstrap { case, .. } => case_direction(case, &spec.mu1),
            TestConfig::Chisq { k } | TestConfig::ChisqBootstrap { k, .. } => {
                let h = hadamard_directions(spec.n, k)?;
                // the Kronecker family is orthogonal to a constant first-dimension mean only
                DirectionSet::new(h.rows().to_vec(), spec.mu1.clone(), Construction::Hadamard)
            }
            TestConfig::Max { .. } => complement_directions(&spec.mu1),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationResult {
    pub n: usize,
    pub error_dist: ErrorDist,
    pub hypothesis: Hypothesis,
    pub test: String,
    pub rejection_rate: f64,
    pub rejections: usize,
    /// Replicates whose test could not be computed; counted as non-rejections.
    pub failures: usize,
    pub reps: usize,
    pub mc_stderr: f64,
}

/// Rejection rate of `test` at level `alpha` over `reps` replicates of `spec`.
///
/// Fitted probe effects are sign-aligned with the true `φ₁, φ₂` before
/// testing, the parametrization in which the fit is consistent. Only the
/// one-sided max test is sensitive to this.
///
/// The asymptotic target test uses the case vector unscaled, so its `Z` is
/// the normalized statistic times [`case_scale`]. The bootstrap test does not
/// depend on the scale of `a`.
pub fn run_cell(spec: &SimulationSpec, test: &TestConfig, reps: usize, alpha: f64) -> Result<SimulationResult> {
    if reps < MIN_REPS {
        return Err(Error::Precondition(format!("need at least {MIN_REPS} replicates, got {reps}")));
    }
    spec.validate()?;
    let ds = test.directions(spec)?;
    let opts = TestOptions::default();
    let literal_scale = match *test {
        TestConfig::Target { case } => case_scale(case, spec.n)?,
        _ => 1.0,
    };

    let one = |rep: u64| -> Result<bool> {
        let y = super::spec::gen_matrix(spec, rep)?;
        let mut fit = fit_matrix(&y)?;
        fit.align_signs(&spec.phi1, &spec.phi2);
        let outcome = match *test {
            TestConfig::Target { .. } => {
                let mut o = target_test(&fit, ds.row(0), opts)?;
                if (literal_scale - 1.0).abs() > 1e-12 {
                    o.statistic *= literal_scale;
                    o.p_value = z_p_value(o.statistic, opts.sidedness);
                }
                o
            }
            TestConfig::Chisq { .. } => chisq_test(&fit, &ds, opts)?,
            TestConfig::Max { calibration } => {
                max_test(&fit, &ds, TestOptions { max_calibration: calibration, ..opts })?
            }
            TestConfig::TargetBootstrap { resamples, .. } | TestConfig::ChisqBootstrap { resamples, .. } => {
                let method = if matches!(test, TestConfig::TargetBootstrap { .. }) {
                    BootstrapMethod::Target
                } else {
                    BootstrapMethod::Chisq
                };
                let seed = derive_seed(spec.seed, &[rep, Role::Bootstrap as u64]);
                bootstrap_p(&fit, &ds, method, resamples, seed, opts)?
            }
        };
        Ok(outcome.p_value < alpha)
    };

    let (rejections, failures) = (0..reps as u64)
        .into_par_iter()
        .map(|rep| match one(rep) {
            Ok(true) => (1usize, 0usize),
            Ok(false) => (0, 0),
            Err(_) => (0, 1),
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let rate = rejections as f64 / reps as f64;
    Ok(SimulationResult {
        n: spec.n,
        error_dist: spec.error_dist,
        hypothesis: spec.hypothesis(),
        test: test.label(),
        rejection_rate: rate,
        rejections,
        failures,
        reps,
        mc_stderr: (rate * (1.0 - rate) / reps as f64).sqrt(),
    })
}
