//! Tests of the null hypothesis that the mean matrix is rank one (`μ₂ = 0`).

pub mod asymptotic;
pub mod bootstrap;
pub mod multiple;
pub mod outcome;

pub use asymptotic::{
    chisq_test, gumbel_constants, max_test, phi_power_sf, target_test, MaxCalibration, Sidedness, TestOptions,
};
pub use bootstrap::{bootstrap_p, BootstrapMethod};
pub use multiple::bh_adjust;
pub use outcome::{Method, OutcomeRecord, TestOutcome, OUTCOME_TSV_HEADER};
