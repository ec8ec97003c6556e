use std::fs::File;
use std::path::Path;

use dirichlet_lab::capacity::{condenser_capacity, grid_condenser_capacity, log_capacity, CondenserSpec};
use dirichlet_lab::config::{OutputFormat, RunConfig};
use dirichlet_lab::geometry::{merge_arcs, Arc};
use dirichlet_lab::report::CheckReport;
use dirichlet_lab::sequence::{
    check_capacitary_condition, check_carleson, check_finite_measure, check_theorem_d, check_weak_separation,
    dyadic_arc_families, generate, normalize, Generator, Sequence,
};
use dirichlet_lab::tree::{
    comb_limit, comb_sweep, counterexample_scenario, tree_capacity_exact, tree_capacity_recursive,
    tree_disc_distance_check, ScenarioParams, TreeCondenser, TreeNode,
};
use dirichlet_lab::{Error, Result};
use serde::Serialize;

use crate::output::{parse, read, Sink};
use crate::{CapacityCommand, Cli, Command, Condition, TreeCommand};

/// Runs one command; `Ok(pass)`.
pub fn run(cli: &Cli, mut config: RunConfig) -> Result<bool> {
    let sink = Sink::new(cli.global.out.clone());
    // the comb sweep is a table; everything else defaults to JSON
    let table = matches!(cli.command, Command::Tree { command: TreeCommand::Comb { .. } });
    config.format = match cli.global.format {
        Some(f) => f.into(),
        None if table => OutputFormat::Csv,
        None => OutputFormat::Json,
    };
    match &cli.command {
        Command::Check {
            condition,
            file,
            normalize: norm,
            levels,
        } => check(&sink, &config, *condition, file, *norm, *levels),
        Command::Tree { command } => tree(&sink, &config, command),
        Command::Capacity { command } => capacity(&sink, &config, command),
        Command::Generate { file } => {
            let g: Generator = parse(file)?;
            let seq = generate(&g, config.seed)?;
            require_json(&config, "generate")?;
            sink.write(format!("{}\n", seq.to_json()).as_bytes())?;
            Ok(true)
        }
    }
}

fn require_json(config: &RunConfig, command: &str) -> Result<()> {
    match config.format {
        OutputFormat::Json => Ok(()),
        OutputFormat::Csv => Err(Error::Input(format!("`{command}` has no CSV form; use --format json"))),
    }
}

fn emit_check(sink: &Sink, config: &RunConfig, command: &str, report: &CheckReport) -> Result<bool> {
    match config.format {
        OutputFormat::Json => sink.json(command, config, report.pass, report)?,
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf).map_err(|e| Error::Input(format!("csv: {e}")))?;
            sink.write(&buf)?;
        }
    }
    Ok(report.pass)
}

#[derive(Serialize)]
struct MassResult {
    label: String,
    points: usize,
    mass: f64,
    tail_bound: Option<f64>,
    normalization: Vec<String>,
}

fn check(sink: &Sink, config: &RunConfig, condition: Condition, file: &Path, norm: bool, levels: u32) -> Result<bool> {
    let mut seq = Sequence::from_json(&read(file)?).map_err(|e| Error::Input(format!("{}: {e}", file.display())))?;
    let mut notes = Vec::new();
    if norm {
        let (normalized, dropped) = normalize(&seq, config.eta, config.beta)?;
        seq = normalized;
        notes = dropped;
    }
    let mut report = match condition {
        Condition::Ws => check_weak_separation(&seq, config.delta),
        Condition::Cc => check_capacitary_condition(&seq, config.gamma, config.quad, config.k)?,
        Condition::Cm => check_carleson(&seq, &dyadic_arc_families(levels), config.quad, config.k)?,
        Condition::TheoremD => check_theorem_d(&seq, config.gamma, config.k)?,
        Condition::Mass => {
            require_json(config, "check mass")?;
            let result = MassResult {
                label: seq.label.clone(),
                points: seq.len(),
                mass: check_finite_measure(&seq),
                tail_bound: seq.tail_bound,
                normalization: notes,
            };
            sink.json("check mass", config, true, &result)?;
            return Ok(true);
        }
    };
    for n in notes {
        report.warn(n);
    }
    let name = format!("check {}", condition_name(condition));
    emit_check(sink, config, &name, &report)
}

fn condition_name(c: Condition) -> &'static str {
    match c {
        Condition::Ws => "ws",
        Condition::Cc => "cc",
        Condition::Cm => "cm",
        Condition::Mass => "mass",
        Condition::TheoremD => "theorem-d",
    }
}

/// `a..b` (inclusive), `a,b,c` or a single value.
pub fn parse_range(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::Input(format!("bad range `{s}`: expected `a..b`, `a,b,c` or `m`"));
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
    let values: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Result<_>>()?
    };
    if values.is_empty() || values.contains(&0) {
        return Err(bad());
    }
    Ok(values)
}

#[derive(Serialize)]
struct TreeCapResult {
    condenser: TreeCondenser,
    recursive: f64,
    exact: f64,
    difference: f64,
}

#[derive(Serialize)]
struct CombResult<'a> {
    rows: &'a [dirichlet_lab::tree::CombRow],
    limit: f64,
    increasing: bool,
    below_limit: bool,
}

fn tree(sink: &Sink, config: &RunConfig, command: &TreeCommand) -> Result<bool> {
    match command {
        TreeCommand::Cap { file, single_path_depth } => {
            require_json(config, "tree cap")?;
            let condenser = match (file, single_path_depth) {
                (Some(path), None) => {
                    let c: TreeCondenser = parse(path)?;
                    c.validate()?;
                    c
                }
                (None, Some(depth)) => TreeCondenser::new(TreeNode::root(), vec![TreeNode::from_u64(*depth, 1)?])?,
                _ => return Err(Error::Input("give exactly one of a condenser file or --single-path-depth".into())),
            };
            let recursive = tree_capacity_recursive(&condenser)?;
            let exact = tree_capacity_exact(&condenser)?;
            let difference = (recursive - exact).abs();
            let pass = difference <= 1e-10;
            let result = TreeCapResult {
                condenser,
                recursive,
                exact,
                difference,
            };
            sink.json("tree cap", config, pass, &result)?;
            Ok(pass)
        }
        TreeCommand::Comb { m, exact } => {
            let ms = parse_range(m)?;
            let rows = comb_sweep(&ms, *exact)?;
            let increasing = rows.windows(2).all(|w| w[1].c0_sqrt_n > w[0].c0_sqrt_n);
            let below_limit = rows.iter().all(|r| r.c0_sqrt_n <= comb_limit() + 1e-6);
            let pass = increasing && below_limit;
            match config.format {
                OutputFormat::Csv => sink.csv_rows(&rows)?,
                OutputFormat::Json => {
                    let result = CombResult {
                        rows: &rows,
                        limit: comb_limit(),
                        increasing,
                        below_limit,
                    };
                    sink.json("tree comb", config, pass, &result)?
                }
            }
            Ok(pass)
        }
        TreeCommand::Counterexample { params } => {
            require_json(config, "tree counterexample")?;
            let mut p: ScenarioParams = match params {
                Some(path) => parse(path)?,
                None => ScenarioParams::default(),
            };
            p.seed = config.seed;
            p.gamma = config.gamma;
            p.eta = config.eta;
            p.quad = config.quad;
            let report = counterexample_scenario(&p)?;
            sink.json("tree counterexample", config, report.pass, &report)?;
            Ok(report.pass)
        }
        TreeCommand::Distcheck { n_max } => {
            let report = tree_disc_distance_check(*n_max)?;
            emit_check(sink, config, "tree distcheck", &report)
        }
    }
}

#[derive(Serialize)]
struct ArcsResult {
    capacity: f64,
    merged: Vec<Arc>,
    quad: usize,
}

#[derive(Serialize)]
struct GridResult {
    capacity: f64,
    resolution: dirichlet_lab::capacity::GridResolution,
    condition: f64,
    refined_capacity: Option<f64>,
    refinement_delta: Option<f64>,
}

fn condenser_spec(path: &Path) -> Result<CondenserSpec> {
    let spec: CondenserSpec = parse(path)?;
    if spec.plate_outer.is_empty() {
        return Err(Error::Input(format!("{}: outer plate is empty", path.display())));
    }
    Ok(spec)
}

fn capacity(sink: &Sink, config: &RunConfig, command: &CapacityCommand) -> Result<bool> {
    match command {
        CapacityCommand::Arcs { file } => {
            require_json(config, "capacity arcs")?;
            let arcs: Vec<Arc> = parse(file)?;
            let result = ArcsResult {
                capacity: log_capacity(&arcs, config.quad)?,
                merged: merge_arcs(&arcs),
                quad: config.quad,
            };
            sink.json("capacity arcs", config, true, &result)?;
            Ok(true)
        }
        CapacityCommand::Condenser { file } => {
            require_json(config, "capacity condenser")?;
            let spec = condenser_spec(file)?;
            if spec.plate_inner.radius != 1.0 {
                return Err(Error::Input(
                    "the fast route needs an inner plate of hyperbolic radius 1; use `capacity grid`".into(),
                ));
            }
            let mut estimate = condenser_capacity(&spec.plate_inner.center, &spec.plate_outer, config.quad)?;
            if estimate.plates_intersect {
                estimate.warning.get_or_insert_with(|| "plates intersect: capacity is 0 by convention".into());
            }
            sink.json("capacity condenser", config, true, &estimate)?;
            Ok(true)
        }
        CapacityCommand::Grid { file, no_refine, field } => {
            require_json(config, "capacity grid")?;
            let spec = condenser_spec(file)?;
            let u = grid_condenser_capacity(&spec, config.grid)?;
            if let Some(path) = field {
                let f = File::create(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
                u.write_csv(std::io::BufWriter::new(f))?;
            }
            let refined = if *no_refine {
                None
            } else {
                Some(grid_condenser_capacity(&spec, config.grid.refined())?.energy)
            };
            let result = GridResult {
                capacity: u.energy,
                resolution: config.grid,
                condition: u.condition,
                refined_capacity: refined,
                refinement_delta: refined.map(|r| (r - u.energy).abs()),
            };
            sink.json("capacity grid", config, true, &result)?;
            Ok(true)
        }
    }
}
