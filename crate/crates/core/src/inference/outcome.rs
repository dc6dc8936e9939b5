use serde::Serialize;

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Target,
    Chisq,
    Max,
    TargetBootstrap,
    ChisqBootstrap,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Target => "target",
            Method::Chisq => "chisq",
            Method::Max => "max",
            Method::TargetBootstrap => "target_bootstrap",
            Method::ChisqBootstrap => "chisq_bootstrap",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TestOutcome<T> {
    pub method: Method,
    /// `Z` for the target test, `T_A` for χ², `M_n/σ̂` for the max test.
    pub statistic: T,
    pub p_value: T,
    /// Max test only: the Gumbel-limit p-value (the primary one uses `Φ(u)^{n−1}`).
    pub p_value_alt: Option<T>,
    pub df: Option<usize>,
    /// Max test only: `(c_n, b_n)`.
    pub gumbel_constants: Option<(T, T)>,
    pub n: usize,
    pub k: usize,
    pub bootstrap_b: Option<usize>,
    pub seed: Option<u64>,
    pub warnings: Vec<String>,
}

/// Flat form of a [`TestOutcome`] for TSV and JSON output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeRecord {
    pub method: String,
    pub statistic: f64,
    pub p_value: f64,
    pub p_value_alt: Option<f64>,
    pub df: Option<usize>,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "B")]
    pub b: Option<usize>,
    pub seed: Option<u64>,
}

pub const OUTCOME_TSV_HEADER: &str = "method\tstatistic\tp_value\tp_value_alt\tdf\tn\tk\tB\tseed";

fn opt<V: ToString>(v: Option<V>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

impl<T: Real> TestOutcome<T> {
    pub fn record(&self) -> OutcomeRecord {
        OutcomeRecord {
            method: self.method.to_string(),
            statistic: self.statistic.as_f64(),
            p_value: self.p_value.as_f64(),
            p_value_alt: self.p_value_alt.map(Real::as_f64),
            df: self.df,
            n: self.n,
            k: self.k,
            b: self.bootstrap_b,
            seed: self.seed,
        }
    }
}

impl OutcomeRecord {
    pub fn to_tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.method,
            self.statistic,
            self.p_value,
            opt(self.p_value_alt),
            opt(self.df),
            self.n,
            self.k,
            opt(self.b),
            opt(self.seed)
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain record serializes")
    }
}
