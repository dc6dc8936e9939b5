//! Generating model for Monte Carlo experiments.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkern::matrix::{dot, norm_sq, Matrix};
use crate::rank2::DataMatrix;
use crate::rng::{stream_id, substream, Role};

/// Variance shared by all non-degenerate error laws. `N(0, 5000)` is read as
/// variance 5000, which is what makes the three laws comparable.
pub const ERROR_VARIANCE: f64 = 5000.0;
pub const DEFAULT_PROBES: usize = 12;
pub const DEFAULT_MU1: f64 = 4500.0;
pub const DEFAULT_VAR_THETA1: f64 = 150_000.0;
pub const DEFAULT_VAR_THETA2: f64 = 10_000.0;
pub const DEFAULT_MU2_AMPLITUDE: f64 = 125.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorDist {
    /// `N(0, 5000)`.
    Normal,
    /// `t₅ × 10√30`.
    T5Scaled,
    /// `50(Z² − 1)`.
    ChisqCentered,
    /// No noise at all.
    Zero,
}

impl ErrorDist {
    pub const TABLE: [ErrorDist; 3] = [ErrorDist::Normal, ErrorDist::T5Scaled, ErrorDist::ChisqCentered];

    pub fn name(self) -> &'static str {
        match self {
            ErrorDist::Normal => "normal",
            ErrorDist::T5Scaled => "t",
            ErrorDist::ChisqCentered => "chisq",
            ErrorDist::Zero => "zero",
        }
    }

    pub fn variance(self) -> f64 {
        match self {
            ErrorDist::Zero => 0.0,
            _ => ERROR_VARIANCE,
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            ErrorDist::Normal => ERROR_VARIANCE.sqrt() * rng.sample::<f64, _>(StandardNormal),
            ErrorDist::T5Scaled => {
                let t = StudentT::new(5.0).expect("5 degrees of freedom");
                10.0 * 30f64.sqrt() * t.sample(rng)
            }
            ErrorDist::ChisqCentered => {
                let z: f64 = rng.sample(StandardNormal);
                50.0 * (z * z - 1.0)
            }
            ErrorDist::Zero => 0.0,
        }
    }
}

impl std::fmt::Display for ErrorDist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    Null,
    Alternative,
}

impl Hypothesis {
    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::Null => "null",
            Hypothesis::Alternative => "alt",
        }
    }
}

/// `Y = θ₁φ₁ᵀ + θ₂φ₂ᵀ + E`, `θ_j ~ N(μ_j, σ_j² I)`, `E` i.i.d. from `error_dist`.
#[derive(Clone, Debug, Serialize)]
pub struct SimulationSpec {
    pub n: usize,
    pub m: usize,
    pub mu1: Vec<f64>,
    pub var_theta1: f64,
    pub mu2: Vec<f64>,
    pub var_theta2: f64,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub error_dist: ErrorDist,
    pub seed: u64,
}

/// `(1, −1, 1, −1, …)` of length `len`.
pub fn alternating(len: usize) -> Vec<f64> {
    (0..len).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()
}

impl SimulationSpec {
    /// The microarray-scale design: 12 probes, `μ₁ = 4500·1`, `σ₁² = 150000`,
    /// `σ₂² = 10000`, `φ₁ ∝ 1`, `φ₂ ∝ (1, −1, …)`, and `μ₂ = 0` (null) or
    /// `±125` alternating (alternative).
    pub fn standard(n: usize, hypothesis: Hypothesis, error_dist: ErrorDist, seed: u64) -> Self {
        let m = DEFAULT_PROBES;
        let c = 1.0 / (2.0 * 3f64.sqrt());
        let mu2 = match hypothesis {
            Hypothesis::Null => vec![0.0; n],
            Hypothesis::Alternative => alternating(n).into_iter().map(|s| s * DEFAULT_MU2_AMPLITUDE).collect(),
        };
        Self {
            n,
            m,
            mu1: vec![DEFAULT_MU1; n],
            var_theta1: DEFAULT_VAR_THETA1,
            mu2,
            var_theta2: DEFAULT_VAR_THETA2,
            phi1: vec![c; m],
            phi2: alternating(m).into_iter().map(|s| s * c).collect(),
            error_dist,
            seed,
        }
    }

    pub fn hypothesis(&self) -> Hypothesis {
        if self.mu2.iter().all(|&x| x == 0.0) {
            Hypothesis::Null
        } else {
            Hypothesis::Alternative
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Precondition(format!("invalid simulation spec: {msg}")));
        if self.n < 3 || self.m < 3 {
            return bad(format!("need n, m >= 3, got {}x{}", self.n, self.m));
        }
        if self.mu1.len() != self.n || self.mu2.len() != self.n {
            return bad("mean vectors must have length n".into());
        }
        if self.phi1.len() != self.m || self.phi2.len() != self.m {
            return bad("probe effects must have length m".into());
        }
        if (norm_sq(&self.phi1) - 1.0).abs() > 1e-12 || (norm_sq(&self.phi2) - 1.0).abs() > 1e-12 {
            return bad("probe effects must be unit vectors".into());
        }
        if dot(&self.phi1, &self.phi2).abs() > 1e-12 {
            return bad("probe effects must be orthogonal".into());
        }
        let scale = (norm_sq(&self.mu1) * norm_sq(&self.mu2)).sqrt();
        if dot(&self.mu1, &self.mu2).abs() > 1e-12 * scale.max(1.0) {
            return bad("mu1 and mu2 must be orthogonal".into());
        }
        if !(self.var_theta1 >= 0.0 && self.var_theta2 >= 0.0) {
            return bad("variances must be nonnegative".into());
        }
        Ok(())
    }
}

/// The `replicate`-th data matrix of `spec`; each of `θ₁`, `θ₂` and `E` has
/// its own substream keyed by `(seed, replicate, role)`.
pub fn gen_matrix(spec: &SimulationSpec, replicate: u64) -> Result<Matrix<f64>> {
    spec.validate()?;
    let mut r1 = substream(spec.seed, stream_id(replicate, Role::Theta1));
    let mut r2 = substream(spec.seed, stream_id(replicate, Role::Theta2));
    let mut re = substream(spec.seed, stream_id(replicate, Role::Error));
    let s1 = spec.var_theta1.sqrt();
    let s2 = spec.var_theta2.sqrt();
    let mut y = Matrix::zeros(spec.n, spec.m);
    for i in 0..spec.n {
        let t1 = spec.mu1[i] + s1 * r1.sample::<f64, _>(StandardNormal);
        let t2 = spec.mu2[i] + s2 * r2.sample::<f64, _>(StandardNormal);
        for (j, y_ij) in y.row_mut(i).iter_mut().enumerate() {
            *y_ij = t1 * spec.phi1[j] + t2 * spec.phi2[j] + spec.error_dist.sample(&mut re);
        }
    }
    Ok(y)
}

pub fn gen_dataset(spec: &SimulationSpec, replicate: u64) -> Result<DataMatrix<f64>> {
    DataMatrix::from_matrix(gen_matrix(spec, replicate)?)
}
