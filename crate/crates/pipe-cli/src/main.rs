//! `pipe`: reproduce registered claims, run pair suites and inspect graphs.
//!
//! Graph inputs are graph6 files, one graph per line. Per-graph commands print
//! one JSON object per line. Exit status is 0 iff every evaluated claim passes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use pipe_core::encode::{self, Anchors, DistanceMode, Policy};
use pipe_core::graphcore::{parse_graph6, parse_graph6_file, write_graph6};
use pipe_core::persist::{self, ColorAssignment, FiltrationSpec};
use pipe_core::wl::{self, KfwlBudget};
use pipe_core::Graph;
use pipe_harness::pair_suite::{pair_suite, pairs_from_graph6, parse_methods};
use pipe_harness::report::{emit, Format};
use pipe_harness::reproduce::reproduce_report;
use pipe_harness::HarnessError;

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("graph {index}: {source}")]
    Graph { index: usize, source: pipe_core::GraphError },
    #[error("graph6 round trip changed graph {0}")]
    RoundTrip(usize),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Encode(#[from] encode::EncodeError),
    #[error(transparent)]
    Persist(#[from] persist::PersistError),
    #[error(transparent)]
    Wl(#[from] wl::WlError),
}

#[derive(Parser)]
#[command(name = "pipe", version, about = "Positional encodings, persistence and WL tests on small graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the claims of a registered construction, or `all`.
    Repro {
        id: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutFormat::Json)]
        format: OutFormat,
    },
    /// Distinguishability of consecutive graph pairs in a graph6 file.
    Pairs {
        file: PathBuf,
        /// Comma-separated subset of ph, ph_lpe, pipe.
        #[arg(long, default_value = "ph,ph_lpe,pipe")]
        methods: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutFormat::Json)]
        format: OutFormat,
    },
    /// Positional encoding rows of each graph.
    Pe {
        file: PathBuf,
        #[arg(long, value_enum)]
        method: PeChoice,
        #[arg(long)]
        k: usize,
        /// LapPE sign handling.
        #[arg(long, value_enum, default_value_t = LapPolicy::Projection)]
        policy: LapPolicy,
        /// Distance anchors, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        anchors: Vec<usize>,
    },
    /// Dimension 0 and 1 persistence diagrams under a vertex-colour filtration.
    Ph {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = FiltrationChoice::Degree)]
        filtration: FiltrationChoice,
        /// Encoding width for lap and rw colours; capped at the vertex count.
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// 1-WL colour histogram (k = 1) or k-FWL tuple histogram (k = 2, 3).
    Wl {
        file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        k: u8,
    },
    /// graph6 utilities.
    G6 {
        #[command(subcommand)]
        action: G6Action,
    },
}

#[derive(Subcommand)]
enum G6Action {
    /// Parse and re-encode every line; fails if any graph changes.
    Roundtrip { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Tsv,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Tsv => Format::Tsv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PeChoice {
    Lap,
    Rw,
    Distance,
}

#[derive(Clone, Copy, ValueEnum)]
enum LapPolicy {
    Raw,
    Projection,
}

#[derive(Clone, Copy, ValueEnum)]
enum FiltrationChoice {
    Degree,
    Lap,
    Rw,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_graphs(path: &Path) -> Result<Vec<Graph>, CliError> {
    Ok(parse_graph6_file(&read(path)?).map_err(HarnessError::from)?)
}

fn print_line<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("output serializes"));
}

#[derive(Serialize)]
struct PeLine<'a> {
    graph: usize,
    rows: &'a [Vec<f64>],
}

#[derive(Serialize)]
struct PhLine<'a> {
    graph: usize,
    dim0: &'a persist::PersistenceDiagram,
    dim1: &'a persist::PersistenceDiagram,
}

#[derive(Serialize)]
struct WlLine {
    graph: usize,
    rounds: Option<usize>,
    histogram: Vec<(usize, usize)>,
}

fn colors(g: &Graph, choice: FiltrationChoice, k: usize) -> Result<ColorAssignment, CliError> {
    let k = k.min(g.n()).max(1);
    Ok(match choice {
        FiltrationChoice::Degree => ColorAssignment::degrees(g),
        FiltrationChoice::Lap => ColorAssignment::from_pe(&encode::lap_pe(g, k, Policy::EigenspaceProjection)?),
        FiltrationChoice::Rw => ColorAssignment::from_pe(&encode::rw_pe(g, k)?),
    })
}

/// Returns whether every evaluated claim passed.
fn run(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Repro { id, n, seed, format } => {
            let report = reproduce_report(&[id.as_str()], n, seed)?;
            print!("{}", emit(&report, format.into()));
            Ok(report.passed())
        }
        Command::Pairs {
            file,
            methods,
            seed,
            format,
        } => {
            let methods = parse_methods(&methods)?;
            let pairs = pairs_from_graph6(&read(&file)?)?;
            let report = pair_suite(&pairs, &methods, seed)?.to_report();
            print!("{}", emit(&report, format.into()));
            Ok(report.passed())
        }
        Command::Pe {
            file,
            method,
            k,
            policy,
            anchors,
        } => {
            for (i, g) in read_graphs(&file)?.iter().enumerate() {
                let pe = match method {
                    PeChoice::Lap => {
                        let policy = match policy {
                            LapPolicy::Raw => Policy::Raw,
                            LapPolicy::Projection => Policy::EigenspaceProjection,
                        };
                        encode::lap_pe(g, k, policy)?
                    }
                    PeChoice::Rw => encode::rw_pe(g, k)?,
                    PeChoice::Distance => {
                        encode::distance_pe(g, &Anchors::Fixed(anchors.clone()), k, &DistanceMode::RwVector)?
                    }
                };
                print_line(&PeLine { graph: i, rows: &pe.rows });
            }
            Ok(true)
        }
        Command::Ph { file, filtration, k } => {
            for (i, g) in read_graphs(&file)?.iter().enumerate() {
                let c = colors(g, filtration, k)?;
                let values = persist::filtration_values(&c, &FiltrationSpec::injective_rank(&[&c]))?;
                let (d0, d1) = persist::diagrams(g, &values)?;
                print_line(&PhLine {
                    graph: i,
                    dim0: &d0,
                    dim1: &d1,
                });
            }
            Ok(true)
        }
        Command::Wl { file, k } => {
            for (i, g) in read_graphs(&file)?.iter().enumerate() {
                let line = if k == 1 {
                    let (_, hist) = wl::wl1(g, &ColorAssignment::constant(g.n()));
                    WlLine {
                        graph: i,
                        rounds: None,
                        histogram: hist.into_iter().collect(),
                    }
                } else {
                    let tc = wl::kfwl_joint(&[g], k as usize, &KfwlBudget::default())?.remove(0);
                    WlLine {
                        graph: i,
                        rounds: Some(tc.rounds),
                        histogram: tc.histogram().into_iter().collect(),
                    }
                };
                print_line(&line);
            }
            Ok(true)
        }
        Command::G6 {
            action: G6Action::Roundtrip { file },
        } => {
            let text = read(&file)?;
            let lines = text
                .lines()
                .map(|l| l.trim().trim_start_matches(">>graph6<<"))
                .filter(|l| !l.is_empty());
            for (i, line) in lines.enumerate() {
                let g = parse_graph6(line).map_err(|source| CliError::Graph { index: i, source })?;
                let out = write_graph6(&g);
                let back = parse_graph6(&out).map_err(|source| CliError::Graph { index: i, source })?;
                if back != g {
                    return Err(CliError::RoundTrip(i));
                }
                println!("{out}");
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
