//! Screening pipeline for collections of probe-set matrices: load,
//! quantile-normalize, screen by `λ₂²/λ₁²`, test each survivor and adjust
//! for multiplicity.

pub mod io;
pub mod normalize;
pub mod pipeline;
pub mod report;
pub mod synthetic;

pub use io::{
    load_dataset, load_records, parse_matrix, parse_meta, write_matrix, Dataset, Metadata, Orientation, ProbeSetRecord,
};
pub use normalize::{quantile_normalize, quantile_normalize_arrays};
pub use pipeline::{
    analyze, fit_records, helmert_contrasts, ratio_of, screen, AnalysisConfig, ScreenTest, DEFAULT_RATIO,
};
pub use report::{emit_scatter, scatter_tables, ScreenReport, ScreenReportRow, REPORT_COLUMNS};
pub use synthetic::{synthetic_corpus, CorpusSpec, SyntheticCorpus};
