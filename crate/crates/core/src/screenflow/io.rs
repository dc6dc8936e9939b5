//! Tab-separated input and output of probe-set collections.
//!
//! Probes-as-rows files have the header `probeset_id  probe_id  <array ids…>`
//! and one line per probe. Arrays-as-rows files have the header
//! `probeset_id  array_id  <probe labels…>` and one line per array and probe
//! set; a probe set with fewer probes than header labels takes the leading
//! labels. Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::directions::GroupSpec;
use crate::error::{Error, Result};
use crate::numkern::Matrix;
use crate::rank2::{DataMatrix, Rank2Fit};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Orientation {
    #[default]
    ProbesAsRows,
    ArraysAsRows,
}

/// One probe set: an `n × m` matrix with arrays as rows.
#[derive(Clone, Debug)]
pub struct ProbeSetRecord {
    pub probeset_id: String,
    pub matrix: DataMatrix<f64>,
    pub fit: Option<Rank2Fit<f64>>,
    pub notes: Vec<String>,
}

impl ProbeSetRecord {
    pub fn new(probeset_id: impl Into<String>, matrix: DataMatrix<f64>) -> Self {
        Self { probeset_id: probeset_id.into(), matrix, fit: None, notes: Vec::new() }
    }
}

/// Array grouping read from a metadata file, in matrix array order.
#[derive(Clone, Debug)]
pub struct Metadata {
    pub array_ids: Vec<String>,
    pub groups: GroupSpec,
    /// Optional separate grouping for estimating `μ̂₁`.
    pub mu1_groups: Option<GroupSpec>,
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub records: Vec<ProbeSetRecord>,
    pub meta: Metadata,
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split('\t').map(str::trim).collect()))
}

fn parse_value(field: &str, line: usize, column: &str, col_no: usize) -> Result<f64> {
    let bad = |what: &str| Error::Parse {
        line,
        msg: format!("{what} value {field:?} in column {column:?} (field {col_no})"),
    };
    if field.is_empty() || field.eq_ignore_ascii_case("na") {
        return Err(bad("missing"));
    }
    let v: f64 = field.parse().map_err(|_| bad("non-numeric"))?;
    if !v.is_finite() {
        return Err(bad("non-finite"));
    }
    Ok(v)
}

struct Block {
    id: String,
    line: usize,
    labels: Vec<String>,
    rows: Vec<Vec<f64>>,
}

/// Groups lines by their first field, keeping first-appearance order.
fn collect_blocks(text: &str, kind: &str) -> Result<(Vec<String>, Vec<Block>)> {
    let mut lines = data_lines(text);
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty matrix file".into() })?;
    if header.len() < 3 || header[0] != "probeset_id" || header[1] != kind {
        return Err(Error::Parse {
            line: hline,
            msg: format!("header must start with probeset_id\\t{kind} and list at least one value column"),
        });
    }
    let columns: Vec<String> = header[2..].iter().map(|s| s.to_string()).collect();
    let mut blocks: Vec<Block> = Vec::new();
    for (line, fields) in lines {
        if fields.len() < 3 {
            return Err(Error::Parse { line, msg: "too few fields".into() });
        }
        if fields.len() > columns.len() + 2 {
            return Err(Error::Parse {
                line,
                msg: format!("{} fields but the header has {}", fields.len(), columns.len() + 2),
            });
        }
        let id = fields[0];
        let values = fields[2..]
            .iter()
            .enumerate()
            .map(|(j, f)| parse_value(f, line, &columns[j], j + 3))
            .collect::<Result<Vec<_>>>()?;
        match blocks.last_mut() {
            Some(b) if b.id == id => {
                if values.len() != b.rows[0].len() {
                    return Err(Error::Parse { line, msg: format!("ragged probe set {id}") });
                }
                b.labels.push(fields[1].to_string());
                b.rows.push(values);
            }
            _ => {
                if blocks.iter().any(|b| b.id == id) {
                    return Err(Error::Parse { line, msg: format!("duplicate or non-contiguous probeset_id {id}") });
                }
                blocks.push(Block {
                    id: id.to_string(),
                    line,
                    labels: vec![fields[1].to_string()],
                    rows: vec![values],
                });
            }
        }
    }
    if blocks.is_empty() {
        return Err(Error::Parse { line: hline, msg: "no probe sets".into() });
    }
    Ok((columns, blocks))
}

fn unique_labels(labels: &[String], what: &str, line: usize) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::Parse { line, msg: format!("duplicate {what} {l:?}") });
        }
    }
    Ok(())
}

/// Parses a matrix file into records with arrays as rows.
pub fn parse_matrix(text: &str, orientation: Orientation) -> Result<Vec<ProbeSetRecord>> {
    match orientation {
        Orientation::ProbesAsRows => {
            let (arrays, blocks) = collect_blocks(text, "probe_id")?;
            unique_labels(&arrays, "array id", 1)?;
            blocks
                .into_iter()
                .map(|b| {
                    if b.rows[0].len() != arrays.len() {
                        return Err(Error::Parse {
                            line: b.line,
                            msg: format!("probe set {} lacks array columns", b.id),
                        });
                    }
                    unique_labels(&b.labels, "probe id", b.line)?;
                    let (m, n) = (b.rows.len(), arrays.len());
                    let values = Matrix::from_fn(n, m, |i, j| b.rows[j][i]);
                    let matrix = DataMatrix::new(values, arrays.clone(), b.labels).map_err(|e| at_line(e, b.line))?;
                    Ok(ProbeSetRecord::new(b.id, matrix))
                })
                .collect()
        }
        Orientation::ArraysAsRows => {
            let (probes, blocks) = collect_blocks(text, "array_id")?;
            let records = blocks
                .into_iter()
                .map(|b| {
                    unique_labels(&b.labels, "array id", b.line)?;
                    let (n, m) = (b.rows.len(), b.rows[0].len());
                    let values = Matrix::from_fn(n, m, |i, j| b.rows[i][j]);
                    let matrix =
                        DataMatrix::new(values, b.labels, probes[..m].to_vec()).map_err(|e| at_line(e, b.line))?;
                    Ok(ProbeSetRecord::new(b.id, matrix))
                })
                .collect::<Result<Vec<_>>>()?;
            let first = records[0].matrix.row_labels();
            if let Some(r) = records.iter().find(|r| r.matrix.row_labels() != first) {
                return Err(Error::Precondition(format!(
                    "probe set {} lists arrays in a different order",
                    r.probeset_id
                )));
            }
            Ok(records)
        }
    }
}

fn at_line(e: Error, line: usize) -> Error {
    match e {
        Error::TooSmall { n, m } => {
            Error::Precondition(format!("probe set starting at line {line} is {n}x{m}; need at least 3x3"))
        }
        other => other,
    }
}

/// Parses `array_id  group  [mu1_group]` lines; the header is required.
pub fn parse_meta(text: &str) -> Result<Vec<(String, String, Option<String>)>> {
    let mut lines = data_lines(text);
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty metadata file".into() })?;
    if header.len() < 2 || header[0] != "array_id" || header[1] != "group" {
        return Err(Error::Parse { line: hline, msg: "metadata header must be array_id\\tgroup[\\tmu1_group]".into() });
    }
    let with_mu1 = header.get(2) == Some(&"mu1_group");
    let want = if with_mu1 { 3 } else { 2 };
    let mut out: Vec<(String, String, Option<String>)> = Vec::new();
    for (line, f) in lines {
        if f.len() != want || f.iter().any(|s| s.is_empty()) {
            return Err(Error::Parse { line, msg: format!("expected {want} non-empty fields") });
        }
        if out.iter().any(|(a, _, _)| a == f[0]) {
            return Err(Error::Parse { line, msg: format!("duplicate array_id {}", f[0]) });
        }
        out.push((f[0].to_string(), f[1].to_string(), with_mu1.then(|| f[2].to_string())));
    }
    Ok(out)
}

/// Aligns metadata rows to the matrix array order.
pub fn align_meta(array_ids: &[String], rows: &[(String, String, Option<String>)]) -> Result<Metadata> {
    if let Some((a, _, _)) = rows.iter().find(|(a, _, _)| !array_ids.contains(a)) {
        return Err(Error::Precondition(format!("metadata array {a:?} is not in the matrix")));
    }
    let ordered = array_ids
        .iter()
        .map(|id| {
            rows.iter()
                .find(|(a, _, _)| a == id)
                .ok_or_else(|| Error::Precondition(format!("array {id:?} has no metadata")))
        })
        .collect::<Result<Vec<_>>>()?;
    let groups = GroupSpec::new(&ordered.iter().map(|r| r.1.as_str()).collect::<Vec<_>>())?;
    let mu1_groups = if ordered.iter().all(|r| r.2.is_some()) && !ordered.is_empty() {
        let labels: Vec<&str> = ordered.iter().map(|r| r.2.as_deref().unwrap_or_default()).collect();
        Some(GroupSpec::new(&labels)?)
    } else {
        None
    };
    Ok(Metadata { array_ids: array_ids.to_vec(), groups, mu1_groups })
}

/// Reads a matrix file and its metadata.
pub fn load_dataset(matrix_path: &Path, meta_path: &Path, orientation: Orientation) -> Result<Dataset> {
    let records = parse_matrix(&fs::read_to_string(matrix_path)?, orientation)?;
    let rows = parse_meta(&fs::read_to_string(meta_path)?)?;
    let meta = align_meta(records[0].matrix.row_labels(), &rows)?;
    Ok(Dataset { records, meta })
}

pub fn load_records(matrix_path: &Path, orientation: Orientation) -> Result<Vec<ProbeSetRecord>> {
    parse_matrix(&fs::read_to_string(matrix_path)?, orientation)
}

fn fmt_value(x: f64) -> String {
    // shortest representation that parses back to the same f64
    format!("{x:?}")
}

/// Writes records in the probes-as-rows layout; values round-trip exactly.
pub fn write_matrix(records: &[ProbeSetRecord]) -> Result<String> {
    let Some(first) = records.first() else {
        return Err(Error::Precondition("no records to write".into()));
    };
    let arrays = first.matrix.row_labels();
    let mut out = format!("probeset_id\tprobe_id\t{}\n", arrays.join("\t"));
    for r in records {
        if r.matrix.row_labels() != arrays {
            return Err(Error::Precondition(format!("probe set {} has different arrays", r.probeset_id)));
        }
        let y = r.matrix.values();
        for (j, probe) in r.matrix.col_labels().iter().enumerate() {
            let _ = write!(out, "{}\t{probe}", r.probeset_id);
            for i in 0..y.nrows() {
                let _ = write!(out, "\t{}", fmt_value(y[(i, j)]));
            }
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn write_meta(meta: &Metadata) -> String {
    let mut out = String::from("array_id\tgroup");
    if meta.mu1_groups.is_some() {
        out.push_str("\tmu1_group");
    }
    out.push('\n');
    for (i, a) in meta.array_ids.iter().enumerate() {
        let _ = write!(out, "{a}\t{}", meta.groups.labels()[i]);
        if let Some(g) = &meta.mu1_groups {
            let _ = write!(out, "\t{}", g.labels()[i]);
        }
        out.push('\n');
    }
    out
}
