use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use symspec::controllability::{self, parse_system_spec, LeaderFollowerSystem};
use symspec::datasets::{self, DATASET_NAMES};
use symspec::graph::{parse_edge_list, Graph};
use symspec::montecarlo::{self, emit_grid, ExperimentConfig, GridFormat};
use symspec::permutation::Permutation;
use symspec::report::{self, MethodChoice};
use symspec::spectral;
use symspec::Error;

#[derive(Parser)]
#[command(name = "symspec", version, about = "Graph symmetry, spectra and leader-follower controllability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Friendliness verdict, spectrum and symmetry of a graph.
    Analyze {
        #[command(flatten)]
        source: GraphSource,
        /// Absolute tolerance for eigenvalue gaps and for |v.1|.
        #[arg(long, default_value_t = spectral::DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Automorphism group, a 2-cycle witness and its subgraphs of symmetry.
    Automorphisms {
        #[command(flatten)]
        source: GraphSource,
        /// How many non-identity automorphisms to list.
        #[arg(long, default_value_t = 20)]
        limit: usize,
        #[arg(long)]
        json: bool,
    },
    /// Controllability of a leader-follower system.
    Controllability(ControllabilityArgs),
    /// Erdős–Rényi sweep of repeated eigenvalues and eigenvectors orthogonal to 1.
    Montecarlo(MontecarloArgs),
    /// Bundled graphs.
    Dataset {
        #[command(subcommand)]
        action: DatasetAction,
    },
    /// Cycle structure and eigenvalue -1 of a permutation.
    Permutation {
        /// 1-based images, e.g. `2 1 4 5 3`.
        images: Vec<usize>,
        /// Cycle notation instead of images, e.g. `(1 2)(3 4 5)`; needs --n.
        #[arg(long, conflicts_with = "images", requires = "n")]
        cycles: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GraphSource {
    /// Edge-list file, or `-` for standard input.
    path: Option<PathBuf>,
    /// Name of a bundled dataset.
    #[arg(long)]
    dataset: Option<String>,
}

#[derive(Args)]
struct ControllabilityArgs {
    /// System file: an edge list plus a `leader:` line.
    #[arg(required_unless_present = "dataset")]
    path: Option<PathBuf>,
    /// Bundled follower graph; use with --leader.
    #[arg(long, conflicts_with = "path", requires = "leader")]
    dataset: Option<String>,
    /// Followers adjacent to the leader, by label.
    #[arg(long, num_args = 1.., value_delimiter = ' ')]
    leader: Vec<String>,
    #[arg(long, default_value_t = controllability::DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    method: MethodArg,
    /// Write a simulated trajectory (zero initial state, constant input) as CSV.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    input: f64,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Spectral,
    Kalman,
    Both,
}

#[derive(Args)]
struct MontecarloArgs {
    /// Graph sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Edge probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = spectral::DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// 5000 trials over n = 2..=100 unless --n/--trials override.
    #[arg(long)]
    full_scale: bool,
    /// Output prefix; files are `<prefix>_repeated.csv` and so on.
    #[arg(long, default_value = "montecarlo")]
    out: String,
}

#[derive(Subcommand)]
enum DatasetAction {
    /// Names, sizes and provenance of the bundled graphs.
    List,
    /// Print a bundled graph as an edge list.
    Show { name: String },
}

enum Failure {
    Input(String),
    Inconsistent(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_graph(source: &GraphSource) -> Result<(Graph, String), Failure> {
    match (&source.path, &source.dataset) {
        (_, Some(name)) => Ok((datasets::dataset_by_name(name)?.graph, name.clone())),
        (Some(path), None) => {
            let text = read_text(path)?;
            let g = parse_edge_list(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            Ok((g, path.display().to_string()))
        }
        (None, None) => Err(Failure::Input("no graph given".into())),
    }
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> Result<(), Failure> {
    if json {
        let s = serde_json::to_string_pretty(value).map_err(|e| Failure::Input(e.to_string()))?;
        println!("{s}");
    } else {
        print!("{}", text());
    }
    Ok(())
}

fn controllability(args: &ControllabilityArgs) -> Result<(), Failure> {
    let sys = match (&args.path, &args.dataset) {
        (Some(path), _) => {
            let text = read_text(path)?;
            let mut sys = parse_system_spec(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            if !args.leader.is_empty() {
                sys = LeaderFollowerSystem::with_leader_labels(sys.follower_graph().clone(), &args.leader)?;
            }
            sys
        }
        (None, Some(name)) => {
            let g = datasets::dataset_by_name(name)?.graph;
            LeaderFollowerSystem::with_leader_labels(g, &args.leader)?
        }
        (None, None) => return Err(Failure::Input("no system given".into())),
    };
    let method = match args.method {
        MethodArg::Spectral => MethodChoice::Spectral,
        MethodArg::Kalman => MethodChoice::Kalman,
        MethodArg::Both => MethodChoice::Both,
    };
    let r = report::controllability_report(&sys, args.tol, method)?;
    emit(args.json, &r, || r.to_text())?;
    if let Some(path) = &args.trajectory {
        let x0 = vec![0.0; sys.follower_count()];
        let traj = controllability::simulate(&sys, &[args.input], &x0, args.dt, args.steps)?;
        write_file(path, &traj.to_csv())?;
    }
    if r.methods_agree() == Some(false) {
        return Err(Failure::Inconsistent(
            "spectral and Kalman tests disagree; the system is numerically delicate".into(),
        ));
    }
    Ok(())
}

fn montecarlo(args: &MontecarloArgs) -> Result<(), Failure> {
    let mut cfg = if args.full_scale {
        ExperimentConfig::full_scale()
    } else {
        ExperimentConfig::default()
    };
    if !args.n.is_empty() {
        cfg.n_values = args.n.clone();
    }
    if !args.p.is_empty() {
        cfg.p_values = args.p.clone();
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    cfg.tolerance = args.tol;
    cfg.master_seed = args.seed;

    let (repeated, orthogonal) = montecarlo::run_experiments(&cfg)?;
    for grid in [&repeated, &orthogonal] {
        let stem = format!("{}_{}", args.out, grid.experiment.slug());
        write_file(Path::new(&format!("{stem}.csv")), &emit_grid(grid, GridFormat::Csv)?)?;
        write_file(Path::new(&format!("{stem}.svg")), &emit_grid(grid, GridFormat::Svg)?)?;
        println!("wrote {stem}.csv and {stem}.svg");
    }
    let meta = serde_json::to_string_pretty(&montecarlo::metadata(&cfg)).map_err(|e| Failure::Input(e.to_string()))?;
    let meta_path = format!("{}_metadata.json", args.out);
    write_file(Path::new(&meta_path), &(meta + "\n"))?;
    println!("wrote {meta_path}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { source, tol, json } => {
            let (g, name) = load_graph(&source)?;
            let r = report::analyze(&g, &name, tol);
            emit(json, &r, || r.to_text())
        }
        Command::Automorphisms { source, limit, json } => {
            let (g, name) = load_graph(&source)?;
            let r = report::automorphism_report(&g, &name, limit);
            emit(json, &r, || r.to_text())
        }
        Command::Controllability(args) => controllability(&args),
        Command::Montecarlo(args) => montecarlo(&args),
        Command::Dataset { action } => match action {
            DatasetAction::List => {
                for name in DATASET_NAMES {
                    let d = datasets::dataset_by_name(name)?;
                    println!("{name}\t{}", d.provenance);
                }
                Ok(())
            }
            DatasetAction::Show { name } => {
                let d = datasets::dataset_by_name(&name)?;
                print!("# {}\n{}", d.provenance, d.graph.to_edge_list());
                Ok(())
            }
        },
        Command::Permutation { images, cycles, n, json } => {
            let p = match (cycles, n) {
                (Some(c), Some(n)) => Permutation::parse_cycles(n, &c)?,
                _ if images.is_empty() => return Err(Failure::Input("no permutation given".into())),
                _ => Permutation::from_one_based(&images)?,
            };
            let r = report::permutation_report(&p)?;
            emit(json, &r, || r.to_text())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Inconsistent(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
