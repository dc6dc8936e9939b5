use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use probedim::inference::MaxCalibration;
use probedim::screenflow::{
    self, analyze, emit_scatter, quantile_normalize, report, screen, AnalysisConfig, Orientation, ProbeSetRecord,
    ScreenTest,
};
use probedim::simlab::{reproduce_table, DEFAULT_BOOTSTRAP_B, DEFAULT_REPS};
use probedim::{Error, Result};

#[derive(Parser)]
#[command(name = "probedim", version, about = "Rank-2 fits and unidimensionality tests for probe-level data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layout {
    /// One line per probe, one column per array.
    Probes,
    /// One line per array, one column per probe.
    Arrays,
}

impl From<Layout> for Orientation {
    fn from(l: Layout) -> Self {
        match l {
            Layout::Probes => Orientation::ProbesAsRows,
            Layout::Arrays => Orientation::ArraysAsRows,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TestArg {
    Target,
    Chisq,
    Max,
}

#[derive(Clone, Copy, ValueEnum)]
enum CalibrationArg {
    PhiPower,
    Gumbel,
}

#[derive(clap::Args)]
struct Input {
    /// Matrix TSV.
    matrix: PathBuf,
    #[arg(long, value_enum, default_value = "probes")]
    layout: Layout,
}

#[derive(clap::Args)]
struct ScreenArgs {
    /// Keep probe sets with lambda2^2/lambda1^2 above this.
    #[arg(long, default_value_t = screenflow::DEFAULT_RATIO)]
    ratio: f64,
    /// Keep at most this many probe sets, highest ratios first.
    #[arg(long)]
    top: Option<usize>,
    /// Use the intensities as given instead of quantile normalizing.
    #[arg(long)]
    no_normalize: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Fit every probe set and print singular values and variance estimates.
    Fit {
        #[command(flatten)]
        input: Input,
        /// Print probe contribution quantiles for this probe set instead.
        #[arg(long)]
        contributions: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quantile-normalize across arrays over all probe sets.
    Normalize {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank probe sets by lambda2^2/lambda1^2.
    Screen {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        screen: ScreenArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Screen, test each probe set and adjust by Benjamini-Hochberg.
    Analyze {
        #[command(flatten)]
        input: Input,
        /// Metadata TSV: array_id, group[, mu1_group].
        #[arg(long)]
        groups: PathBuf,
        #[arg(long, value_enum, default_value = "target")]
        test: TestArg,
        /// Calibrate by this many bootstrap resamples.
        #[arg(long)]
        bootstrap: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Group contrasts for the chi-square test, e.g. "1,-1,0;1,1,-2".
        #[arg(long)]
        contrasts: Option<String>,
        #[arg(long, default_value_t = screenflow::pipeline::DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "phi-power")]
        calibration: CalibrationArg,
        /// Test degenerate fits instead of skipping them.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        screen: ScreenArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write singular-vector coordinates of one probe set for plotting.
    Scatter {
        #[command(flatten)]
        input: Input,
        probeset_id: String,
        #[arg(long)]
        groups: PathBuf,
        #[arg(long)]
        no_normalize: bool,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Reproduce a simulation table.
    Simulate {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        table: u8,
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long = "bootstrap-B", default_value_t = DEFAULT_BOOTSTRAP_B)]
        bootstrap_b: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic corpus (matrix.tsv, meta.tsv) with known truth.
    Synthetic {
        #[arg(long, default_value_t = 350)]
        probesets: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load(input: &Input) -> Result<Vec<ProbeSetRecord>> {
    screenflow::load_records(&input.matrix, input.layout.into())
}

fn prepare(records: Vec<ProbeSetRecord>, no_normalize: bool) -> Result<Vec<ProbeSetRecord>> {
    if no_normalize {
        Ok(records)
    } else {
        quantile_normalize(&records)
    }
}

fn parse_contrasts(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse { line: 0, msg: format!("bad contrast weight {x:?}") })
                })
                .collect()
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit { input, contributions, out } => {
            let mut records = load(&input)?;
            screenflow::fit_records(&mut records);
            let text = match contributions {
                None => report::fit_tsv(&records),
                Some(id) => {
                    let r = records
                        .iter()
                        .find(|r| r.probeset_id == id)
                        .ok_or_else(|| Error::Precondition(format!("no probe set {id:?}")))?;
                    let fit = r.fit.as_ref().ok_or_else(|| Error::Precondition(r.notes.join("; ")))?;
                    fit.contribution_summary(r.matrix.col_labels())?.to_tsv()
                }
            };
            emit(&text, out.as_deref())
        }
        Command::Normalize { input, out } => {
            let records = quantile_normalize(&load(&input)?)?;
            emit(&screenflow::write_matrix(&records)?, out.as_deref())
        }
        Command::Screen { input, screen: s, out } => {
            let records = prepare(load(&input)?, s.no_normalize)?;
            let kept = screen(records, s.ratio, s.top);
            emit(&report::screen_tsv(&kept), out.as_deref())
        }
        Command::Analyze {
            input,
            groups,
            test,
            bootstrap,
            seed,
            contrasts,
            alpha,
            calibration,
            force,
            screen: s,
            out,
        } => {
            let ds = screenflow::load_dataset(&input.matrix, &groups, input.layout.into())?;
            let records = prepare(ds.records, s.no_normalize)?;
            let kept = screen(records, s.ratio, s.top);
            let config = AnalysisConfig {
                test: match test {
                    TestArg::Target => ScreenTest::Target,
                    TestArg::Chisq => ScreenTest::Chisq,
                    TestArg::Max => ScreenTest::Max,
                },
                bootstrap,
                seed,
                contrasts: contrasts.as_deref().map(parse_contrasts).transpose()?,
                alpha,
                max_calibration: match calibration {
                    CalibrationArg::PhiPower => MaxCalibration::PhiPower,
                    CalibrationArg::Gumbel => MaxCalibration::Gumbel,
                },
                force,
                ..AnalysisConfig::default()
            };
            let rep = analyze(&kept, &ds.meta, &config)?;
            emit(&rep.to_tsv(), out.as_deref())?;
            eprintln!(
                "{} screened, {} tested, {} significant at {alpha}, {} after BH",
                kept.len(),
                rep.family_size,
                rep.significant_count(),
                rep.selected_count()
            );
            Ok(())
        }
        Command::Scatter { input, probeset_id, groups, no_normalize, out_dir } => {
            let ds = screenflow::load_dataset(&input.matrix, &groups, input.layout.into())?;
            let mut records = prepare(ds.records, no_normalize)?;
            let idx = records
                .iter()
                .position(|r| r.probeset_id == probeset_id)
                .ok_or_else(|| Error::Precondition(format!("no probe set {probeset_id:?}")))?;
            let mut one = vec![records.swap_remove(idx)];
            screenflow::fit_records(&mut one);
            let (a, p) = emit_scatter(&one[0], &ds.meta.groups, &out_dir)?;
            eprintln!("wrote {} and {}", a.display(), p.display());
            Ok(())
        }
        Command::Simulate { table, reps, seed, bootstrap_b, out } => {
            let t = reproduce_table(table, reps, seed, bootstrap_b)?;
            emit(&t.to_tsv(), out.as_deref())
        }
        Command::Synthetic { probesets, seed, out_dir } => {
            let spec = screenflow::CorpusSpec { probesets, ..Default::default() };
            let corpus = screenflow::synthetic_corpus(&spec, seed)?;
            fs::create_dir_all(&out_dir)?;
            fs::write(out_dir.join("matrix.tsv"), screenflow::write_matrix(&corpus.records)?)?;
            fs::write(out_dir.join("meta.tsv"), screenflow::io::write_meta(&corpus.meta))?;
            let truth: String = corpus
                .records
                .iter()
                .zip(&corpus.alternative)
                .map(|(r, &a)| format!("{}\t{}\n", r.probeset_id, if a { "alt" } else { "null" }))
                .collect();
            fs::write(out_dir.join("truth.tsv"), format!("probeset_id\ttruth\n{truth}"))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
