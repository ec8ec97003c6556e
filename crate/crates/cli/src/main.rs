//! `dlab`: batch front end for the Dirichlet-space lab.
//!
//! Exit codes: 0 pass, 1 condition failed, 2 input error, 3 numerical failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirichlet_lab::config::{OutputFormat, RunConfig};
use dirichlet_lab::Error;

#[derive(Parser, Debug)]
#[command(name = "dlab", version, about = "Capacities, separation checks and tree counterexamples for the Dirichlet space")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// Start from a config file, or from the `config` field of a report.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Weak-separation threshold.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Ratio budget: a check passes iff its sup ratio is at most this.
    #[arg(long, global = true)]
    pub k: Option<f64>,
    /// Quadrature nodes per arc.
    #[arg(long, global = true)]
    pub quad: Option<usize>,
    /// Radial grid cells.
    #[arg(long = "grid-r", global = true)]
    pub grid_r: Option<usize>,
    /// Angular grid cells.
    #[arg(long = "grid-t", global = true)]
    pub grid_t: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a sequence checker on a sequence file.
    Check {
        #[arg(value_enum)]
        condition: Condition,
        file: PathBuf,
        /// Normalize the sequence (with --eta, --beta) before checking.
        #[arg(long)]
        normalize: bool,
        /// Deepest dyadic level of the Carleson sampler.
        #[arg(long, default_value_t = 6)]
        levels: u32,
    },
    /// Bergman-tree computations.
    Tree {
        #[command(subcommand)]
        command: TreeCommand,
    },
    /// Logarithmic and condenser capacities.
    Capacity {
        #[command(subcommand)]
        command: CapacityCommand,
    },
    /// Build a sequence file from a generator description.
    Generate { file: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Condition {
    Ws,
    Cc,
    Cm,
    Mass,
    TheoremD,
}

#[derive(Subcommand, Debug)]
pub enum TreeCommand {
    /// Tree capacity of a condenser file, by recursion and by linear solve.
    Cap {
        file: Option<PathBuf>,
        /// A single target this many levels below the root instead of a file.
        #[arg(long)]
        single_path_depth: Option<u32>,
    },
    /// Comb capacities over m = √N, given as `a..b`, `a,b,c` or `m`.
    Comb {
        #[arg(long, default_value = "2..60")]
        m: String,
        /// Also run the linear solver on every comb.
        #[arg(long)]
        exact: bool,
    },
    /// The truncated counterexample: lattice plus combs.
    Counterexample {
        /// Scenario parameters; defaults otherwise.
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Tree-level versus hyperbolic distance to the origin.
    Distcheck {
        #[arg(long, default_value_t = 60)]
        n_max: u32,
    },
}

#[derive(Subcommand, Debug)]
pub enum CapacityCommand {
    /// `C(E)` of a JSON list of arcs.
    Arcs { file: PathBuf },
    /// Fast condenser capacity of a condenser file.
    Condenser { file: PathBuf },
    /// Grid condenser capacity, at the configured resolution and one refinement.
    Grid {
        file: PathBuf,
        /// Skip the refined solve.
        #[arg(long)]
        no_refine: bool,
        /// Write the potential as `r,theta,value` CSV.
        #[arg(long)]
        field: Option<PathBuf>,
    },
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Input(_) | Error::QuadratureSize { .. } | Error::Infeasible { .. } => 2,
        Error::NotPositiveDefinite { .. } | Error::Accuracy { .. } | Error::Numerical { .. } | Error::Resolution { .. } => 3,
    }
}

fn build_config(g: &GlobalArgs) -> Result<RunConfig, Error> {
    let mut c = match &g.config {
        Some(path) => output::load_config(path)?,
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($($field:ident = $value:expr),*) => {$(if let Some(v) = $value { c.$field = v; })*};
    }
    set!(gamma = g.gamma, eta = g.eta, beta = g.beta, delta = g.delta, k = g.k, quad = g.quad, seed = g.seed);
    if let Some(r) = g.grid_r {
        c.grid.n_r = r;
    }
    if let Some(t) = g.grid_t {
        c.grid.n_theta = t;
    }
    c.validate()?;
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build_config(&cli.global).and_then(|config| commands::run(&cli, config));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("dlab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
