use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use coverage_lab::coverage::union_coverage;
use coverage_lab::deploy::Seed;
use coverage_lab::error::Error;
use coverage_lab::experiment::{
    self, compare_to_reference, deploy_with, ExperimentConfig, ReferenceTable, Strategy, GAUSSIAN_TABLE, GA_TABLE,
};
use coverage_lab::ga::optimize_field;
use coverage_lab::geometry::Deployment;
use serde_json::json;

/// Sensor-coverage experiments: deployers, GA optimiser, baselines and sweeps.
#[derive(Debug, Parser)]
#[command(name = "coverage-lab", version)]
struct Cli {
    /// Experiment config (JSON). Defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed. For `sweep` it replaces the config's seed list.
    #[arg(long, global = true, env = "COVERAGE_LAB_SEED", value_name = "N")]
    seed: Option<u64>,

    /// Output directory (overrides the config's `output.dir`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for sweeps. Output does not depend on it.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// More logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Drop nodes with a one-shot deployer and measure coverage.
    Deploy {
        #[arg(long, value_enum, default_value = "uniform")]
        strategy: Deployer,
        #[command(flatten)]
        nodes: Nodes,
    },
    /// Run the per-subarea genetic algorithm on the whole field.
    Optimize {
        #[command(flatten)]
        nodes: Nodes,
    },
    /// Run a comparison baseline (bidding or self-spreading).
    Baseline {
        #[arg(long, value_enum)]
        strategy: BaselineKind,
        #[command(flatten)]
        nodes: Nodes,
    },
    /// Run every (strategy, n, seed) cell of the config into a CSV file.
    Sweep {
        /// Skip the SVG chart.
        #[arg(long)]
        no_plot: bool,
    },
    /// Compare a sweep CSV with the published tables.
    Report {
        /// Sweep CSV; defaults to the config's output file.
        #[arg(long, value_name = "CSV")]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "all")]
        table: TableChoice,
    },
    /// Draw mean coverage against n from a sweep CSV.
    Plot {
        #[arg(long, value_name = "CSV")]
        input: Option<PathBuf>,
        /// Published column to overlay; repeatable.
        #[arg(long = "reference", value_enum)]
        references: Vec<TableName>,
        /// SVG path; defaults to the config's plot file.
        #[arg(long, value_name = "SVG")]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Nodes {
    /// Number of sensors; defaults to the first config node count.
    #[arg(short = 'n', long = "nodes")]
    n: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Deployer {
    Uniform,
    Gaussian,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BaselineKind {
    Bidding,
    Dss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableName {
    Table2,
    #[value(name = "table3-gaussian")]
    Table3Gaussian,
}

impl TableName {
    fn table(self) -> ReferenceTable {
        match self {
            TableName::Table2 => GA_TABLE,
            TableName::Table3Gaussian => GAUSSIAN_TABLE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableChoice {
    All,
    Table2,
    #[value(name = "table3-gaussian")]
    Table3Gaussian,
}

struct Session {
    config: ExperimentConfig,
    seed: Option<u64>,
    out: PathBuf,
    jobs: usize,
}

impl Session {
    fn new(cli: &Cli, fallback: Strategy) -> Result<Self> {
        let config = match &cli.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::single(fallback, 50, 1),
        };
        let out = cli.out.clone().unwrap_or_else(|| config.output.dir.clone());
        let jobs = cli
            .jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if jobs == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()).into());
        }
        Ok(Session {
            config,
            seed: cli.seed,
            out,
            jobs,
        })
    }

    fn seed(&self) -> Seed {
        Seed(self.seed.unwrap_or(self.config.seeds[0]))
    }

    fn n(&self, nodes: &Nodes) -> Result<usize> {
        let n = nodes.n.unwrap_or(self.config.node_counts[0]);
        if n == 0 {
            return Err(Error::Config("node count must be positive".into()).into());
        }
        Ok(n)
    }

    fn out_dir(&self) -> Result<&Path> {
        std::fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok(&self.out)
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Writes `<stem>.json` and `<stem>.svg` for a single layout and prints a summary line.
fn emit_layout(ctx: &Session, stem: &str, dep: &Deployment, extra: serde_json::Value) -> Result<()> {
    let coverage = union_coverage(dep, ctx.config.resolution())?;
    let dir = ctx.out_dir()?;
    let mut doc = json!({
        "n": dep.len(),
        "seed": ctx.seed().0,
        "coverage": coverage.union_fraction,
        "naive_sum": coverage.naive_sum_fraction,
        "deployment": dep,
    });
    if let (Some(doc), serde_json::Value::Object(extra)) = (doc.as_object_mut(), extra) {
        doc.extend(extra);
    }
    write_json(&dir.join(format!("{stem}.json")), &doc)?;
    experiment::deployment_snapshot(dep, None, &dir.join(format!("{stem}.svg")))?;
    println!(
        "{stem}: n={} seed={} coverage={:.4} ({})",
        dep.len(),
        ctx.seed().0,
        coverage.union_fraction,
        dir.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Deploy { strategy, nodes } => {
            let s = match strategy {
                Deployer::Uniform => Strategy::Uniform,
                Deployer::Gaussian => Strategy::Gaussian,
            };
            let ctx = Session::new(&cli, s)?;
            let (dep, _) = deploy_with(&ctx.config, s, ctx.n(nodes)?, ctx.seed())?;
            emit_layout(&ctx, &format!("deploy-{s}"), &dep, json!({}))
        }
        Command::Optimize { nodes } => {
            let ctx = Session::new(&cli, Strategy::Ga)?;
            let field = ctx.config.field()?;
            let opt = optimize_field(&field, ctx.n(nodes)?, ctx.config.sensing_radius, &ctx.config.ga, ctx.seed())?;
            let extra = json!({
                "total_fitness": opt.total_fitness,
                "initial_mean_fitness": opt.initial_mean_fitness(),
                "generations": opt.generations(),
                "subareas": opt.partition.len(),
            });
            emit_layout(&ctx, "optimize", &opt.deployment, extra)?;
            experiment::deployment_snapshot(&opt.deployment, Some(&opt.partition), &ctx.out.join("optimize.svg"))?;
            Ok(())
        }
        Command::Baseline { strategy, nodes } => {
            let s = match strategy {
                BaselineKind::Bidding => Strategy::Bidding,
                BaselineKind::Dss => Strategy::Dss,
            };
            let ctx = Session::new(&cli, s)?;
            let n = ctx.n(nodes)?;
            if n < 2 {
                return Err(Error::Config(format!("{s} needs at least two nodes")).into());
            }
            let (dep, steps) = deploy_with(&ctx.config, s, n, ctx.seed())?;
            emit_layout(&ctx, &format!("baseline-{s}"), &dep, json!({ "steps": steps }))
        }
        Command::Sweep { no_plot } => {
            if cli.config.is_none() {
                return Err(Error::Config("sweep needs --config".into()).into());
            }
            let mut ctx = Session::new(&cli, Strategy::Ga)?;
            if let Some(seed) = ctx.seed {
                log::info!("seed override: running seed {seed} only");
                ctx.config.seeds = vec![seed];
            }
            let csv = ctx.out_dir()?.join(&ctx.config.output.csv);
            let result = experiment::run_sweep_to(&ctx.config, &csv, ctx.jobs)?;
            println!("sweep: {} rows -> {}", result.rows.len(), csv.display());
            if !no_plot {
                let svg = ctx.out.join(&ctx.config.output.plot);
                experiment::emit_plot(&result, &[], &svg)?;
                println!("plot: {}", svg.display());
            }
            Ok(())
        }
        Command::Report { input, table } => {
            let ctx = Session::new(&cli, Strategy::Ga)?;
            let path = input.clone().unwrap_or_else(|| ctx.out.join(&ctx.config.output.csv));
            let result = experiment::read_csv(&path)?;
            let tables: Vec<ReferenceTable> = match table {
                TableChoice::All => vec![GA_TABLE, GAUSSIAN_TABLE],
                TableChoice::Table2 => vec![GA_TABLE],
                TableChoice::Table3Gaussian => vec![GAUSSIAN_TABLE],
            };
            let present = result.strategies();
            let mut printed = 0;
            for t in tables {
                if *table == TableChoice::All && !present.contains(&t.strategy) {
                    continue;
                }
                println!("{}", compare_to_reference(&result, &t));
                printed += 1;
            }
            if printed == 0 {
                println!("no ga or gaussian rows in {}; nothing to compare", path.display());
            }
            Ok(())
        }
        Command::Plot {
            input,
            references,
            output,
        } => {
            let ctx = Session::new(&cli, Strategy::Ga)?;
            let path = input.clone().unwrap_or_else(|| ctx.out.join(&ctx.config.output.csv));
            let result = experiment::read_csv(&path)?;
            let svg = match output {
                Some(p) => p.clone(),
                None => ctx.out_dir()?.join(&ctx.config.output.plot),
            };
            let overlay: Vec<ReferenceTable> = references.iter().map(|r| r.table()).collect();
            experiment::emit_plot(&result, &overlay, &svg)?;
            println!("plot: {}", svg.display());
            Ok(())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_config_error() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
