//! `dcglearn`: command-line front end to `dcglearn-core`.
//!
//! Exit status is 0 on success, 1 when the library reports an error (or a
//! fixture claim fails) and 2 on usage errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dcglearn_core::experiments::fixtures::FixtureTables;
use dcglearn_core::experiments::{
    run_assumption_proportions, run_skeleton_recovery, verify_fixtures_with,
};
use dcglearn_core::io;
use dcglearn_core::selection::DsepTable;
use dcglearn_core::{
    algorithm1_with, d_connected, estimate_ci, random_dcg_scm, structured_scm, Assumption,
    CiTestConfig, ExperimentConfig, LinearScm, SearchSpace, SelectOptions, SelectionReport,
    SgsMode, SgsReading, SpaceKind, Structure,
};

/// Default directory for experiment outputs when neither `--output-dir` nor
/// the config's `output` key is given.
const OUT_DIR_ENV: &str = "DCGLEARN_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "dcglearn",
    version,
    about = "Structure search over small directed graphs with feedback"
)]
struct Cli {
    /// Worker threads for parallel scans (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log verbosity; repeat for more (`RUST_LOG` also applies).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether J and K are d-separated given a conditioning set.
    Dsep {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        k: usize,
        /// Comma-separated 1-based nodes, or `-` for the empty set.
        #[arg(long, default_value = "-")]
        cond: String,
    },
    /// List every graph of a search space with its edge and d-separation counts.
    Enumerate {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Classify the Markov graphs of a space under every assumption.
    Select {
        #[arg(long)]
        ci: PathBuf,
        #[command(flatten)]
        space: SpaceArgs,
        /// Only print the ids selected under this assumption.
        #[arg(long)]
        assumption: Option<Assumption>,
        #[command(flatten)]
        sgs: SgsArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Draw a linear SCM and sample a dataset from it.
    Simulate {
        /// Sample from this weighted model instead of drawing one.
        #[arg(long, conflicts_with_all = ["ens", "structure"])]
        scm: Option<PathBuf>,
        /// Expected neighbourhood size of a random graph.
        #[arg(long, conflicts_with = "structure")]
        ens: Option<f64>,
        #[arg(long)]
        structure: Option<Structure>,
        #[arg(long, default_value_t = 5)]
        p: usize,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Dataset CSV (stdout when absent).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write the drawn model here.
        #[arg(long)]
        scm_out: Option<PathBuf>,
    },
    /// Fisher-z tests for every conditional independence statement.
    EstimateCi {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = dcglearn_core::citest::DEFAULT_ALPHA)]
        alpha: f64,
        /// Largest conditioning set to test; larger ones count as dependent.
        #[arg(long)]
        max_cond: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Select graphs under one assumption and report the shared class and skeleton.
    Algorithm1 {
        #[arg(long)]
        ci: PathBuf,
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value = "mdr")]
        assumption: Assumption,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a simulation study and write long and summary CSVs.
    Experiment(ExperimentArgs),
    /// Check every worked example; exits 1 if any claim fails.
    Fixtures {
        /// Skip the scans over all five-node graphs.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Args, Debug)]
struct SpaceArgs {
    #[arg(long, default_value = "dcg")]
    space: SpaceKind,
    /// Node count; defaults to the input's.
    #[arg(long)]
    p: Option<usize>,
    /// Permit spaces above five nodes.
    #[arg(long)]
    allow_large: bool,
}

#[derive(Args, Debug)]
struct SgsArgs {
    #[arg(long, value_enum, default_value_t = SgsReadingArg::OutsideMec)]
    sgs_reading: SgsReadingArg,
    /// Check every proper edge subset rather than single deletions.
    #[arg(long)]
    sgs_exhaustive: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SgsReadingArg {
    OutsideMec,
    Literal,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Study {
    Proportions,
    Recovery,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// `key = value` config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Study::Proportions)]
    study: Study,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Directory for `<study>_long.csv` and `<study>_summary.csv`.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl SgsArgs {
    fn options(&self) -> SelectOptions {
        SelectOptions {
            sgs_mode: if self.sgs_exhaustive {
                SgsMode::Exhaustive
            } else {
                SgsMode::SingleEdgeDeletion
            },
            sgs_reading: match self.sgs_reading {
                SgsReadingArg::OutsideMec => SgsReading::OutsideMec,
                SgsReadingArg::Literal => SgsReading::Literal,
            },
        }
    }
}

impl SpaceArgs {
    fn build(&self, input_p: Option<usize>) -> Result<SearchSpace> {
        let p = match (self.p, input_p) {
            (Some(a), Some(b)) if a != b => bail!("--p {a} does not match the input's p={b}"),
            (Some(p), _) | (None, Some(p)) => p,
            (None, None) => dcglearn_core::selection::DEFAULT_SPACE_NODES,
        };
        Ok(SearchSpace::of_kind(self.space, p)?.allow_large(self.allow_large))
    }
}

/// Writes to `path` atomically, or to stdout.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => io::write_atomic(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn node_arg(v: usize, p: usize, flag: &str) -> Result<usize> {
    if v == 0 || v > p {
        bail!("--{flag} {v} outside 1..={p}");
    }
    Ok(v - 1)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Dsep { graph, j, k, cond } => {
            let g = io::read_graph(&graph)?;
            let (j, k) = (node_arg(j, g.p(), "j")?, node_arg(k, g.p(), "k")?);
            let cond = io::parse_node_list(&cond, g.p())?;
            let connected = d_connected(&g, j, k, cond)?;
            println!("{}", if connected { "connected" } else { "separated" });
        }
        Command::Enumerate { space, output } => {
            let space = space.build(None)?;
            let table = DsepTable::build(&space)?;
            info!("{} graphs", table.len());
            let mut s = String::from("graph_id,total_edges,real_edges,dsep_count\n");
            for i in 0..table.len() {
                let real = table.graph(i).skeleton().real_edges;
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    table.id(i),
                    table.total_edges(i),
                    real,
                    table.dsep_count(i)
                );
            }
            emit(output.as_deref(), &s)?;
        }
        Command::Select {
            ci,
            space,
            assumption,
            sgs,
            output,
        } => {
            let ci = io::read_sepset(&ci)?;
            let table = DsepTable::build(&space.build(Some(ci.p()))?)?;
            let report = SelectionReport::analyze(&ci, &table, sgs.options())?;
            let text = match assumption {
                Some(a) => report.ids(a).iter().map(|id| format!("{id}\n")).collect(),
                None => io::format_report(&report),
            };
            emit(output.as_deref(), &text)?;
        }
        Command::Simulate {
            scm,
            ens,
            structure,
            p,
            n,
            seed,
            output,
            scm_out,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let model: LinearScm = match (scm, ens, structure) {
                (Some(path), _, _) => io::read_scm(&path)?,
                (None, _, Some(s)) => structured_scm(s, &mut rng)?,
                (None, e, None) => random_dcg_scm(p, e.unwrap_or(1.0), &mut rng)?,
            };
            if let Some(path) = scm_out {
                emit(Some(&path), &io::format_scm(&model))?;
            }
            let data = model.sample(n, &mut rng, seed)?;
            emit(output.as_deref(), &io::format_dataset(&data))?;
        }
        Command::EstimateCi {
            data,
            alpha,
            max_cond,
            output,
        } => {
            let data = io::read_dataset(&data)?;
            let cfg = CiTestConfig {
                max_cond_size: max_cond,
                ..CiTestConfig::with_alpha(alpha)
            };
            let ci = estimate_ci(&data, &cfg)?;
            emit(output.as_deref(), &io::format_sepset(&ci))?;
        }
        Command::Algorithm1 {
            ci,
            space,
            assumption,
            output,
        } => {
            let ci = io::read_sepset(&ci)?;
            let table = DsepTable::build(&space.build(Some(ci.p()))?)?;
            let out = algorithm1_with(&ci, &table, assumption)?;
            let mut s = String::new();
            let _ = writeln!(s, "assumption={}", out.assumption);
            let _ = writeln!(s, "selected={}", out.selected.len());
            match &out.mec {
                Some(m) => {
                    let ids: Vec<String> = m.iter().map(u64::to_string).collect();
                    let _ = writeln!(s, "mec={}", ids.join(","));
                }
                None => s.push_str("mec=-\n"),
            }
            match &out.skeleton {
                Some(sk) => {
                    let pairs: Vec<String> = sk
                        .pairs(ci.p())
                        .into_iter()
                        .map(|(a, b)| format!("{}-{}", a + 1, b + 1))
                        .collect();
                    let _ = writeln!(s, "skeleton={}", pairs.join(","));
                }
                None => s.push_str("skeleton=-\n"),
            }
            let _ = writeln!(s, "elapsed_ms={}", out.elapsed.as_millis());
            emit(output.as_deref(), &s)?;
        }
        Command::Experiment(args) => experiment(args)?,
        Command::Fixtures { quick } => {
            let report = verify_fixtures_with(&FixtureTables::new(), !quick)?;
            print!("{}", report.format());
            return Ok(report.all_passed());
        }
    }
    Ok(true)
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(a) = args.alpha {
        cfg.alpha = a;
    }
    let dir = args
        .output_dir
        .or_else(|| cfg.output.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    cfg.validate()?;
    let (result, name) = match args.study {
        Study::Proportions => (run_assumption_proportions(&cfg, None)?, "proportions"),
        Study::Recovery => (run_skeleton_recovery(&cfg, None)?, "recovery"),
    };
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let long = dir.join(format!("{name}_long.csv"));
    let summary = dir.join(format!("{name}_summary.csv"));
    emit(Some(&long), &result.long_csv())?;
    emit(Some(&summary), &result.summary_csv())?;
    print!("{}", result.summary_csv());
    info!("wrote {} and {}", long.display(), summary.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
