//! Report tables and plot coordinates.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::directions::GroupSpec;
use crate::error::{Error, Result};

use super::io::ProbeSetRecord;
use super::pipeline::ratio_of;

pub const REPORT_COLUMNS: [&str; 14] = [
    "probeset_id",
    "n",
    "m",
    "lambda1",
    "lambda2",
    "lambda3",
    "lambda4",
    "ratio",
    "method",
    "statistic",
    "p_value",
    "p_adjusted",
    "selected",
    "notes",
];

#[derive(Clone, Debug, Serialize)]
pub struct ScreenReportRow {
    pub probeset_id: String,
    pub n: usize,
    pub m: usize,
    /// Leading singular values; absent past `min(n, m)` or without a fit.
    pub lambda: [Option<f64>; 4],
    pub ratio: f64,
    pub method: String,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub p_adjusted: Option<f64>,
    pub selected: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScreenReport {
    pub test: String,
    /// Number of p-values in the Benjamini–Hochberg family.
    pub family_size: usize,
    pub alpha: f64,
    pub rows: Vec<ScreenReportRow>,
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), |v| v.to_string())
}

/// Notes joined by `"; "`, with tabs and newlines flattened.
fn notes_field(notes: &[String]) -> String {
    notes.join("; ").replace(['\t', '\n', '\r'], " ")
}

impl ScreenReport {
    pub fn selected_count(&self) -> usize {
        self.rows.iter().filter(|r| r.selected).count()
    }

    /// Rows with an unadjusted p-value at or below `alpha`.
    pub fn significant_count(&self) -> usize {
        self.rows.iter().filter(|r| r.p_value.is_some_and(|p| p <= self.alpha)).count()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# test={}", self.test);
        let _ = writeln!(out, "# family_size={}", self.family_size);
        let _ = writeln!(out, "# alpha={}", self.alpha);
        let _ = writeln!(out, "# significant={}", self.significant_count());
        let _ = writeln!(out, "# selected={}", self.selected_count());
        let _ = writeln!(out, "{}", REPORT_COLUMNS.join("\t"));
        for r in &self.rows {
            let fields = [
                r.probeset_id.clone(),
                r.n.to_string(),
                r.m.to_string(),
                opt(r.lambda[0]),
                opt(r.lambda[1]),
                opt(r.lambda[2]),
                opt(r.lambda[3]),
                r.ratio.to_string(),
                r.method.clone(),
                opt(r.statistic),
                opt(r.p_value),
                opt(r.p_adjusted),
                r.selected.to_string(),
                notes_field(&r.notes),
            ];
            let _ = writeln!(out, "{}", fields.join("\t"));
        }
        out
    }
}

/// Singular values and ratio of each record, one line per record.
pub fn screen_tsv(records: &[ProbeSetRecord]) -> String {
    let mut out = String::from("probeset_id\tn\tm\tlambda1\tlambda2\tlambda3\tlambda4\tratio\tnotes\n");
    for r in records {
        let lambda = |j: usize| opt(r.fit.as_ref().and_then(|f| f.lambda.get(j).copied()));
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.probeset_id,
            r.matrix.n(),
            r.matrix.m(),
            lambda(0),
            lambda(1),
            lambda(2),
            lambda(3),
            ratio_of(r),
            notes_field(&r.notes)
        );
    }
    out
}

/// Fit summary of each record: singular values and the variance estimates.
pub fn fit_tsv(records: &[ProbeSetRecord]) -> String {
    let mut out = String::from(
        "probeset_id\tn\tm\tlambda1\tlambda2\tlambda3\tlambda4\tratio\tsigma2_hat\tresid_sigma2\teigen_est1\teigen_est2\tdegenerate\tnotes\n",
    );
    for r in records {
        let lambda = |j: usize| opt(r.fit.as_ref().and_then(|f| f.lambda.get(j).copied()));
        let field = |g: fn(&crate::rank2::Rank2Fit<f64>) -> f64| opt(r.fit.as_ref().map(g));
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.probeset_id,
            r.matrix.n(),
            r.matrix.m(),
            lambda(0),
            lambda(1),
            lambda(2),
            lambda(3),
            ratio_of(r),
            field(|f| f.sigma2_hat),
            field(|f| f.resid_sigma2),
            field(|f| f.eigen_est1),
            field(|f| f.eigen_est2),
            r.fit.as_ref().map_or("NA".into(), |f| f.degenerate.to_string()),
            notes_field(&r.notes)
        );
    }
    out
}

/// `arrays.tsv` (array_id, group, theta1, theta2) and `probes.tsv`
/// (probe_id, phi1, phi2) for a fitted record.
pub fn scatter_tables(record: &ProbeSetRecord, groups: &GroupSpec) -> Result<(String, String)> {
    let fit = record
        .fit
        .as_ref()
        .ok_or_else(|| Error::Precondition(format!("probe set {} has no fit", record.probeset_id)))?;
    if groups.n() != fit.n {
        return Err(Error::Shape(format!("{} group labels for {} arrays", groups.n(), fit.n)));
    }
    let mut arrays = String::from("array_id\tgroup\ttheta1\ttheta2\n");
    for (i, id) in record.matrix.row_labels().iter().enumerate() {
        let _ = writeln!(arrays, "{id}\t{}\t{:?}\t{:?}", groups.labels()[i], fit.theta1[i], fit.theta2[i]);
    }
    let mut probes = String::from("probe_id\tphi1\tphi2\n");
    for (j, id) in record.matrix.col_labels().iter().enumerate() {
        let _ = writeln!(probes, "{id}\t{:?}\t{:?}", fit.phi1[j], fit.phi2[j]);
    }
    Ok((arrays, probes))
}

/// Writes the two scatter tables into `dir`, returning their paths.
pub fn emit_scatter(record: &ProbeSetRecord, groups: &GroupSpec, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let (arrays, probes) = scatter_tables(record, groups)?;
    fs::create_dir_all(dir)?;
    let a = dir.join("arrays.tsv");
    let p = dir.join("probes.tsv");
    fs::write(&a, arrays)?;
    fs::write(&p, probes)?;
    Ok((a, p))
}
