use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use morphmine::apps::{self, Induced, JobConfig, ResultReport};
use morphmine::cost::{CostConfig, Mode};
use morphmine::graph::{load_graph_files, DataGraph, GraphError};
use morphmine::pattern::text::parse_pattern;
use morphmine::Pattern;

#[derive(Parser)]
#[command(name = "morphmine", version, about = "Graph pattern mining with pattern morphing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count vertex-induced motifs of every size from 3 up to k.
    Motifs {
        #[arg(short, value_parser = clap::value_parser!(u8).range(3..=5))]
        k: u8,
        #[command(flatten)]
        common: Common,
        graph: PathBuf,
        labels: Option<PathBuf>,
    },
    /// Frequent subgraph mining: labeled patterns with k edges and MNI support at least s.
    Fsm {
        #[arg(short, value_parser = clap::value_parser!(u8).range(1..=7))]
        k: u8,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        support: u64,
        #[command(flatten)]
        common: Common,
        graph: PathBuf,
        labels: PathBuf,
    },
    /// Count or enumerate matches of patterns read from files.
    Match {
        /// Pattern file; repeat the flag for several patterns.
        #[arg(short, long = "pattern", value_name = "FILE", required = true)]
        patterns: Vec<PathBuf>,
        /// How patterns without explicit anti-edges are matched.
        #[arg(long, value_enum, default_value_t = InducedArg::Edge)]
        induced: InducedArg,
        /// List every match instead of only counting.
        #[arg(long)]
        enumerate: bool,
        #[command(flatten)]
        common: Common,
        graph: PathBuf,
        labels: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum InducedArg {
    Edge,
    Vertex,
}

#[derive(Clone, Copy, ValueEnum)]
enum MorphArg {
    Off,
    Naive,
    Auto,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = MorphArg::Auto)]
    morph: MorphArg,
    /// Seed for cost sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// Print the report as JSON instead of TSV.
    #[arg(long)]
    json: bool,
    /// Print the chosen morph plan and candidate costs on standard error.
    #[arg(long)]
    explain: bool,
    /// TOML file with cost constants.
    #[arg(long, value_name = "FILE")]
    cost_config: Option<PathBuf>,
    /// Measure the cost constants on this machine before planning and print
    /// them on standard error.
    #[arg(long)]
    calibrate: bool,
}

/// Failures that map to exit code 2: input that could not be read or parsed.
#[derive(Debug)]
struct InputError(anyhow::Error);

fn input<T, E: Into<anyhow::Error>>(r: Result<T, E>, what: &str) -> anyhow::Result<T> {
    r.map_err(|e| anyhow::Error::new(InputError(e.into().context(what.to_string()))))
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn load(graph: &Path, labels: Option<&Path>) -> anyhow::Result<DataGraph> {
    let loaded: Result<_, GraphError> = load_graph_files(graph, labels);
    let (g, report) = input(loaded, &format!("loading {}", graph.display()))?;
    eprintln!("{report}");
    Ok(g)
}

fn job(common: &Common) -> anyhow::Result<JobConfig> {
    let mut cost = match &common.cost_config {
        Some(path) => input(CostConfig::load(path), &format!("reading {}", path.display()))?,
        None => CostConfig::default(),
    };
    if common.calibrate {
        let measured = CostConfig::calibrate(common.seed);
        cost.count_per_iso = measured.count_per_iso;
        cost.mni_per_vertex_iso = measured.mni_per_vertex_iso;
        eprint!("# calibrated cost constants\n{}", cost.to_toml());
    }
    let mode = match common.morph {
        MorphArg::Off => Mode::Off,
        MorphArg::Naive => Mode::Naive,
        MorphArg::Auto => Mode::Auto,
    };
    Ok(JobConfig { mode, seed: common.seed, cost })
}

fn read_patterns(paths: &[PathBuf]) -> anyhow::Result<Vec<Pattern>> {
    paths
        .iter()
        .map(|path| {
            let text = input(std::fs::read_to_string(path), &format!("reading {}", path.display()))?;
            input(parse_pattern(&text), &format!("parsing {}", path.display()))
        })
        .collect()
}

fn emit(report: &ResultReport, common: &Common) {
    if common.explain {
        eprint!("{}", report.explain);
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if common.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_tsv());
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    let common = match &command {
        Command::Motifs { common, .. } | Command::Fsm { common, .. } | Command::Match { common, .. } => common,
    };
    let cfg = job(common)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads.map_or(0, usize::from))
        .build()
        .context("starting worker threads")?;
    let report = pool.install(|| -> Result<ResultReport, anyhow::Error> {
        Ok(match &command {
            Command::Motifs { k, graph, labels, .. } => {
                let g = load(graph, labels.as_deref())?;
                apps::run_motifs(&g, usize::from(*k), &cfg)?
            }
            Command::Fsm { k, support, graph, labels, .. } => {
                let g = load(graph, Some(labels))?;
                apps::run_fsm(&g, usize::from(*k), *support, &cfg)?
            }
            Command::Match { patterns, induced, enumerate, graph, labels, .. } => {
                let patterns = read_patterns(patterns)?;
                let g = load(graph, labels.as_deref())?;
                let induced = match induced {
                    InducedArg::Edge => Induced::Edge,
                    InducedArg::Vertex => Induced::Vertex,
                };
                apps::run_match(&g, &patterns, induced, *enumerate, &cfg)?
            }
        })
    })?;
    emit(&report, common);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
