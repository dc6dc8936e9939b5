//! Grids of simulation cells laid out like the published tables.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, GENERATOR_NAME, NORMAL_METHOD};

use crate::inference::MaxCalibration;

use super::cell::{run_cell, DirectionCase, SimulationResult, TestConfig, DEFAULT_ALPHA};
use super::spec::{ErrorDist, Hypothesis, SimulationSpec};

pub const DEFAULT_REPS: usize = 5000;
pub const DEFAULT_BOOTSTRAP_B: usize = 1000;
pub const CHISQ_K: usize = 4;

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    /// Row group, e.g. `case1`, `target_case2`, `chisq_k4`.
    pub block: String,
    pub n: usize,
    pub hypothesis: Hypothesis,
    /// Column variant: empty, `asymptotic` or `bootstrap`.
    pub variant: String,
    /// One result per error law, in `ErrorDist::TABLE` order.
    pub cells: Vec<SimulationResult>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimTable {
    pub id: u8,
    pub reps: usize,
    pub seed: u64,
    pub bootstrap_b: usize,
    pub alpha: f64,
    pub rows: Vec<TableRow>,
}

/// Seed of one data-generating configuration. Tests sharing `(n, law,
/// hypothesis)` see the same data sets, as the published tables do.
pub fn cell_seed(seed: u64, n: usize, dist: ErrorDist, hypothesis: Hypothesis) -> u64 {
    let d = ErrorDist::TABLE.iter().position(|&x| x == dist).unwrap_or(3) as u64;
    let h = match hypothesis {
        Hypothesis::Null => 0,
        Hypothesis::Alternative => 1,
    };
    derive_seed(seed, &[n as u64, d, h])
}

struct Layout {
    block: &'static str,
    variant: &'static str,
    sizes: &'static [usize],
    test: TestConfig,
}

fn layouts(table: u8, b: usize) -> Result<Vec<Layout>> {
    use DirectionCase::*;
    let l = |block, variant, sizes, test| Layout { block, variant, sizes, test };
    Ok(match table {
        1 => vec![
            l("case1", "", &[8, 16, 32, 128], TestConfig::Target { case: Case1 }),
            l("case2", "", &[8, 16, 32, 128], TestConfig::Target { case: Case2 }),
        ],
        2 => vec![l("chisq_k4", "", &[8, 16, 32, 64], TestConfig::Chisq { k: CHISQ_K })],
        3 => vec![
            l("target_case2", "asymptotic", &[6, 8], TestConfig::Target { case: Case2 }),
            l("target_case2", "bootstrap", &[6, 8], TestConfig::TargetBootstrap { case: Case2, resamples: b }),
            l("chisq_k4", "asymptotic", &[8, 16], TestConfig::Chisq { k: CHISQ_K }),
            l("chisq_k4", "bootstrap", &[8, 16], TestConfig::ChisqBootstrap { k: CHISQ_K, resamples: b }),
        ],
        4 => vec![l("max", "", &[8, 16, 32, 64], TestConfig::Max { calibration: MaxCalibration::Gumbel })],
        _ => return Err(Error::Precondition(format!("no table {table}; expected 1 to 4"))),
    })
}

/// Runs every cell of `table` at level 0.05.
pub fn reproduce_table(table: u8, reps: usize, seed: u64, bootstrap_b: usize) -> Result<SimTable> {
    let mut rows = Vec::new();
    for layout in layouts(table, bootstrap_b)? {
        for hyp in [Hypothesis::Null, Hypothesis::Alternative] {
            for &n in layout.sizes {
                let cells = ErrorDist::TABLE
                    .iter()
                    .map(|&dist| {
                        let spec = SimulationSpec::standard(n, hyp, dist, cell_seed(seed, n, dist, hyp));
                        run_cell(&spec, &layout.test, reps, DEFAULT_ALPHA)
                    })
                    .collect::<Result<Vec<_>>>()?;
                rows.push(TableRow {
                    block: layout.block.into(),
                    n,
                    hypothesis: hyp,
                    variant: layout.variant.into(),
                    cells,
                });
            }
        }
    }
    Ok(SimTable { id: table, reps, seed, bootstrap_b, alpha: DEFAULT_ALPHA, rows })
}

impl SimTable {
    pub fn row(&self, block: &str, variant: &str, n: usize, hypothesis: Hypothesis) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.block == block && r.variant == variant && r.n == n && r.hypothesis == hypothesis)
    }

    /// Rejection rate of one cell; `variant` is empty outside table 3.
    pub fn rate(&self, block: &str, variant: &str, n: usize, hypothesis: Hypothesis, dist: ErrorDist) -> Option<f64> {
        let row = self.row(block, variant, n, hypothesis)?;
        row.cells.iter().find(|c| c.error_dist == dist).map(|c| c.rejection_rate)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# table={}", self.id);
        let _ = writeln!(out, "# seed={}", self.seed);
        let _ = writeln!(out, "# reps={}", self.reps);
        let _ = writeln!(out, "# alpha={}", self.alpha);
        if self.id == 3 {
            let _ = writeln!(out, "# bootstrap_B={}", self.bootstrap_b);
        }
        let _ = writeln!(out, "# generator={GENERATOR_NAME}");
        let _ = writeln!(out, "# normal_method={NORMAL_METHOD}");
        let _ = writeln!(out, "# version={}", env!("CARGO_PKG_VERSION"));
        let names: Vec<&str> = ErrorDist::TABLE.iter().map(|d| d.name()).collect();
        let mut header = vec!["block".to_string(), "hypothesis".into(), "n".into()];
        if self.id == 3 {
            header.push("variant".into());
        }
        header.extend(names.iter().map(|s| s.to_string()));
        header.extend(names.iter().map(|s| format!("se_{s}")));
        let _ = writeln!(out, "{}", header.join("\t"));
        for row in &self.rows {
            let mut fields = vec![row.block.clone(), row.hypothesis.name().into(), row.n.to_string()];
            if self.id == 3 {
                fields.push(row.variant.clone());
            }
            fields.extend(row.cells.iter().map(|c| format!("{:.4}", c.rejection_rate)));
            fields.extend(row.cells.iter().map(|c| format!("{:.4}", c.mc_stderr)));
            let _ = writeln!(out, "{}", fields.join("\t"));
        }
        out
    }
}
