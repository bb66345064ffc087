//! `polyforage` command-line front end.
//!
//! Exit status: 0 on success, 2 on bad arguments or configuration, 1 on
//! I/O errors, malformed input or failed matrix cells.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use polyforage::engine::{replicate_seed, CONFIG_KEYS};
use polyforage::experiments::{self, matrix_run, plot_series, snapshot_svg, write_matrix_outputs, write_run_outputs};
use polyforage::metrics::read_csv;
use polyforage::{run_replicates, ColonyKind, EnvironmentKind, Observable, SimConfig};

#[derive(Parser)]
#[command(name = "polyforage", version, about = "Seeded ant-colony foraging simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run replicates of one colony in one environment.
    Run(RunArgs),
    /// Run a canned colony by environment matrix.
    Matrix(MatrixArgs),
    /// Draw observables from one or more series CSVs into an SVG chart.
    Plot(PlotArgs),
}

/// Settings shared by `run` and `matrix`. Precedence, lowest first:
/// defaults, `--config`, `--set`, named flags.
#[derive(Args)]
struct ConfigArgs {
    /// Config file of `key = value` lines.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override any config key (see the list below); repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Rounds per replicate.
    #[arg(long)]
    rounds: Option<u64>,
    /// Replicates per cell.
    #[arg(long)]
    replicates: Option<u32>,
    /// Worker threads. Output does not depend on it.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = PossibleValuesParser::new(ColonyKind::ALL.map(ColonyKind::name)))]
    colony: Option<String>,
    #[arg(long, value_parser = PossibleValuesParser::new(EnvironmentKind::ALL.map(EnvironmentKind::name)))]
    env: Option<String>,
    /// Seed of replicate 0; replicate i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    common: ConfigArgs,
    /// Output directory.
    #[arg(long, env = "POLYFORAGE_OUT")]
    out: PathBuf,
    /// Also write population and division-of-labour charts.
    #[arg(long)]
    charts: bool,
    /// Also draw the world of replicate 0 after this many rounds.
    #[arg(long, value_name = "ROUND")]
    snapshot_round: Option<u64>,
}

#[derive(Args)]
struct MatrixArgs {
    /// `paper`: all 4 colonies in all 5 environments. `long-season`: seasonal cells with 3000-round seasons.
    #[arg(long, default_value = "paper", value_parser = PossibleValuesParser::new(["paper", "long-season"]))]
    preset: String,
    /// Cell c, replicate r runs with seed base + 1000 c + r.
    #[arg(long)]
    base_seed: Option<u64>,
    #[command(flatten)]
    common: ConfigArgs,
    /// Output directory.
    #[arg(long, env = "POLYFORAGE_OUT")]
    out: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// Series CSV; repeatable.
    #[arg(long = "input", required = true, value_name = "CSV")]
    inputs: Vec<PathBuf>,
    /// Legend label per input, in order. Defaults to the CSV's directory
    /// name, or its file name when that is not `series.csv`.
    #[arg(long = "label")]
    labels: Vec<String>,
    /// Observable to draw; repeatable.
    #[arg(long = "observable", default_value = "worker_population")]
    observables: Vec<Observable>,
    #[arg(long, default_value = "")]
    title: String,
    /// SVG file to write.
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

type Outcome = Result<(), Failure>;

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

/// Help text listing every config key with its default.
fn config_keys_help() -> String {
    let defaults = SimConfig::default();
    let mut text = String::from("Config keys and defaults (for --config files and --set):\n");
    for key in CONFIG_KEYS {
        text.push_str(&format!("  {key} = {}\n", defaults.get(key).expect("known key")));
    }
    text
}

fn command() -> clap::Command {
    let d = SimConfig::default();
    let keys = config_keys_help();
    let with_defaults = |c: clap::Command| {
        c.mut_arg("rounds", |a| {
            a.help(format!("Rounds per replicate [default: {}]", d.rounds))
        })
        .mut_arg("replicates", |a| {
            a.help(format!("Replicates per cell [default: {}]", d.replicates))
        })
        .after_help(keys.clone())
    };
    Cli::command()
        .mut_subcommand("run", |c| {
            with_defaults(c)
                .mut_arg("colony", |a| {
                    a.help(format!("Colony type [default: {}]", d.colony.name()))
                })
                .mut_arg("env", |a| {
                    a.help(format!("Environment [default: {}]", d.environment.name()))
                })
                .mut_arg("seed", |a| {
                    a.help(format!(
                        "Seed of replicate 0; replicate i uses seed + i [default: {}]",
                        d.base_seed
                    ))
                })
        })
        .mut_subcommand("matrix", |c| {
            with_defaults(c).mut_arg("base_seed", |a| {
                a.help(format!(
                    "Cell c, replicate r runs with seed base + 1000 c + r [default: {}]",
                    d.base_seed
                ))
            })
        })
}

fn resolve(mut cfg: SimConfig, args: &ConfigArgs) -> Result<SimConfig, Failure> {
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_document(&text)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v.trim()).map_err(usage)?;
    }
    if let Some(r) = args.rounds {
        cfg.rounds = r;
    }
    if let Some(r) = args.replicates {
        cfg.replicates = r;
    }
    Ok(cfg)
}

fn cmd_run(args: RunArgs) -> Outcome {
    let mut cfg = resolve(SimConfig::default(), &args.common)?;
    if let Some(c) = &args.colony {
        cfg.colony = c.parse().map_err(usage)?;
    }
    if let Some(e) = &args.env {
        cfg.environment = e.parse().map_err(usage)?;
    }
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    cfg.validate().map_err(usage)?;

    print!("{}", cfg.to_document());
    println!("config_hash = {}", cfg.hash());
    let series = run_replicates(&cfg, args.common.jobs).map_err(usage)?;
    let seeds: Vec<String> = series.seeds.iter().map(u64::to_string).collect();
    println!("seeds = {}", seeds.join(","));

    let report = write_run_outputs(&cfg, &series, &args.out, args.charts).map_err(runtime)?;
    for path in report.csvs.iter().chain(&report.charts) {
        println!("wrote {}", path.display());
    }
    if let Some(round) = args.snapshot_round {
        let svg = snapshot_svg(&cfg, replicate_seed(cfg.base_seed, 0), round).map_err(usage)?;
        let path = args.out.join(format!("snapshot_round_{round}.svg"));
        fs::write(&path, svg).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_matrix(args: MatrixArgs) -> Outcome {
    let mut matrix = experiments::preset(&args.preset).expect("preset names are validated by clap");
    matrix.base = resolve(matrix.base, &args.common)?;
    let base_seed = args.base_seed.unwrap_or(matrix.base.base_seed);
    matrix.base.base_seed = base_seed;

    println!("preset = {}", matrix.name);
    println!("base_seed = {base_seed}");
    let results = matrix_run(&matrix, base_seed, args.common.jobs, false);
    let report = write_matrix_outputs(&results, &args.out).map_err(runtime)?;
    println!(
        "wrote {} series, {} charts and {}",
        report.csvs.len(),
        report.charts.len(),
        report.manifest.display()
    );
    let failures = results.failures();
    for (cell, e) in &failures {
        eprintln!("cell {} failed: {e}", cell.dir_name());
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(runtime(format!(
            "{} of {} cells failed",
            failures.len(),
            results.cells.len()
        )))
    }
}

fn default_label(path: &Path) -> String {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    let parent = path
        .parent()
        .and_then(Path::file_name)
        .map(|s| s.to_string_lossy().into_owned());
    match (stem.as_deref(), parent) {
        (Some("series"), Some(dir)) => dir,
        (Some(stem), _) => stem.to_string(),
        _ => path.display().to_string(),
    }
}

fn cmd_plot(args: PlotArgs) -> Outcome {
    if !args.labels.is_empty() && args.labels.len() != args.inputs.len() {
        return Err(usage(format!(
            "{} labels given for {} inputs",
            args.labels.len(),
            args.inputs.len()
        )));
    }
    let mut inputs = Vec::new();
    for (i, path) in args.inputs.iter().enumerate() {
        let series = read_csv(path).map_err(runtime)?;
        let label = args.labels.get(i).cloned().unwrap_or_else(|| default_label(path));
        inputs.push((label, series));
    }
    let svg = plot_series(&inputs, &args.observables, &args.title).map_err(runtime)?;
    fs::write(&args.out, svg).map_err(|e| runtime(format!("cannot write {}: {e}", args.out.display())))?;
    println!("wrote {}", args.out.display());
    Ok(())
}

/// Prints a clap error followed by the usage of the subcommand it concerns.
fn argument_error(e: clap::Error) -> ! {
    use clap::error::ErrorKind;
    if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) || !e.use_stderr() {
        e.exit();
    }
    let _ = e.print();
    if e.render().to_string().contains("Usage:") {
        std::process::exit(2);
    }
    let mut cmd = command();
    cmd.build();
    let sub = std::env::args().skip(1).find(|a| cmd.find_subcommand(a).is_some());
    let usage = match sub.and_then(|s| cmd.find_subcommand_mut(&s).map(|c| c.render_usage())) {
        Some(u) => u,
        None => cmd.render_usage(),
    };
    eprintln!("\n{usage}");
    std::process::exit(2);
}

fn main() -> ExitCode {
    let matches = command().try_get_matches().unwrap_or_else(|e| argument_error(e));
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| argument_error(e));
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Matrix(a) => cmd_matrix(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Usage(msg) | Failure::Runtime(msg)) = &f;
            eprintln!("error: {msg}");
            if let Failure::Usage(_) = f {
                eprintln!("run `polyforage --help` for usage");
            }
            ExitCode::from(f.code())
        }
    }
}
