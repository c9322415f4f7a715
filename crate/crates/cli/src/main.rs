//! `lmdeploy`: landmark deployment analysis, optimization and observer
//! simulation from the command line.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use landmark_deploy::Error;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }

    /// Library error with the file it came from, if any.
    pub fn from_lib(e: Error, context: &str) -> Self {
        let code = match e {
            Error::TrajectoryOutOfRegion { .. } | Error::DegenerateGeometry { .. } | Error::UndefinedDepth { .. } => {
                EXIT_INVARIANT
            }
            _ => EXIT_INPUT,
        };
        let message = if context.is_empty() { e.to_string() } else { format!("{context}: {e}") };
        Self { code, message }
    }
}

#[derive(Parser, Debug)]
#[command(name = "lmdeploy", version, about = "Directional landmark deployment for camera pose observers")]
struct Cli {
    /// Worker threads for coverage evaluation and fitness (results do not depend on it).
    #[arg(long, global = true, env = "LMDEPLOY_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SceneOverrides {
    /// Scene JSON file.
    #[arg(long)]
    pub scene: PathBuf,
    /// Required number of simultaneously covered landmarks.
    #[arg(long)]
    pub n: Option<usize>,
    /// Coverage strength threshold.
    #[arg(long)]
    pub thold: Option<f64>,
    /// Coverage probability threshold.
    #[arg(long = "thold-p")]
    pub thold_p: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Ega,
    Sga,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Uniform,
    Random,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Placement {
    Wall,
    Free,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VisibilityArg {
    Ideal,
    CameraModel,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coverage map and metrics of a deployment.
    Analyze {
        #[command(flatten)]
        scene: SceneOverrides,
        #[arg(long)]
        deployment: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimize a deployment with the (elimination) genetic algorithm.
    Optimize(OptimizeArgs),
    /// Baseline deployment.
    Generate {
        #[command(flatten)]
        scene: SceneOverrides,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Number of landmarks K.
        #[arg(long)]
        landmarks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the pose observer along a trajectory.
    Simulate(SimulateArgs),
    /// Estimate the orientation PDF from yaw/pitch recordings.
    EstimatePdf(EstimateArgs),
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub scene: SceneOverrides,
    /// Optimizer settings JSON; flags below override it.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Ega)]
    pub mode: Mode,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Generation budget.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Number of landmarks K.
    #[arg(long)]
    pub landmarks: Option<usize>,
    /// Population size M.
    #[arg(long)]
    pub population: Option<usize>,
    /// Eliminated chromosomes per generation Q.
    #[arg(long)]
    pub eliminated: Option<usize>,
    #[arg(long)]
    pub min_recombination: Option<usize>,
    #[arg(long)]
    pub max_recombination: Option<usize>,
    /// Per-gene mutation probability.
    #[arg(long)]
    pub mutation: Option<f64>,
    /// Stop after this many generations without improvement.
    #[arg(long)]
    pub plateau: Option<usize>,
    #[arg(long, value_enum)]
    pub placement: Option<Placement>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scene: SceneOverrides,
    #[arg(long)]
    pub deployment: PathBuf,
    /// Trajectory JSON; a seeded random walk is generated when absent.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// Observer settings JSON; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random-walk duration (s).
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub gain: Option<f64>,
    #[arg(long)]
    pub injection_gain: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_enum)]
    pub visibility: Option<VisibilityArg>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// CSV with columns t,alpha_rad,beta_rad.
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long, default_value_t = 24)]
    pub yaw_cells: usize,
    #[arg(long, default_value_t = 12)]
    pub pitch_cells: usize,
    /// Mean resampling gap (s); 50 sample periods when absent.
    #[arg(long)]
    pub mean_gap: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_INPUT);
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().expect("thread pool is configured once");
    }
    let result = match cli.command {
        Command::Analyze { scene, deployment, out } => commands::analyze(&scene, &deployment, &out),
        Command::Optimize(args) => commands::optimize(&args),
        Command::Generate { scene, kind, landmarks, seed, out } => {
            commands::generate(&scene, kind, landmarks, seed, &out)
        }
        Command::Simulate(args) => commands::simulate(&args),
        Command::EstimatePdf(args) => commands::estimate_pdf(&args),
    };
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
