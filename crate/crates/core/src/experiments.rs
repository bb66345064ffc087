//! Canned experiment matrices and their on-disk output layout.
//!
//! ```text
//! <out>/<colony>_<env>/series.csv
//! <out>/<colony>_<env>/config.txt
//! <out>/charts/<env>_population.svg
//! <out>/charts/<env>_dol.svg
//! <out>/manifest
//! ```
//!
//! Replicate `r` of the cell with canonical index `c` (environment-major,
//! see [`Cell::index`]) runs with seed `base_seed + 1000 * c + r`.
//!
//! A single-cell run ([`write_run_outputs`]) writes `series.csv`,
//! `config.txt` and `manifest` directly into its output directory, plus
//! `population.svg` and `dol.svg` when charts are requested.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::colony::ColonyKind;
use crate::engine::{init_sim, run, SimConfig};
use crate::error::MetricsError;
use crate::error::{ConfigError, Error, Result};
use crate::metrics::{
    render_chart, render_world, write_chart, write_csv, AggregateSeries, ChartSeries, ChartStyle, Observable,
    RoundRecord,
};
use crate::world::EnvironmentKind;

/// Seed stride between matrix cells.
pub const CELL_SEED_STRIDE: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub environment: EnvironmentKind,
    pub colony: ColonyKind,
}

impl Cell {
    pub fn new(colony: ColonyKind, environment: EnvironmentKind) -> Self {
        Self { environment, colony }
    }

    /// Position in the full 5 x 4 matrix, environment-major.
    pub fn index(&self) -> u64 {
        let e = EnvironmentKind::ALL
            .iter()
            .position(|&k| k == self.environment)
            .unwrap() as u64;
        let c = ColonyKind::ALL.iter().position(|&k| k == self.colony).unwrap() as u64;
        e * ColonyKind::ALL.len() as u64 + c
    }

    pub fn dir_name(&self) -> String {
        format!("{}_{}", self.colony.name(), self.environment.name())
    }
}

pub fn cell_seed(base_seed: u64, cell: Cell, replicate: u32) -> u64 {
    base_seed
        .wrapping_add(CELL_SEED_STRIDE * cell.index())
        .wrapping_add(replicate as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentMatrix {
    pub name: String,
    pub base: SimConfig,
    pub cells: Vec<Cell>,
    /// Extra `key = value` assignments applied to individual cells.
    pub overrides: BTreeMap<Cell, Vec<(String, String)>>,
}

impl ExperimentMatrix {
    /// Every colony against every environment on the default parameters.
    pub fn standard() -> Self {
        Self::full("standard", SimConfig::default())
    }

    pub fn full(name: &str, base: SimConfig) -> Self {
        let cells = EnvironmentKind::ALL
            .iter()
            .flat_map(|&e| ColonyKind::ALL.iter().map(move |&c| Cell::new(c, e)))
            .collect();
        Self {
            name: name.to_string(),
            base,
            cells,
            overrides: BTreeMap::new(),
        }
    }

    /// Keeps only cells in the given environments.
    pub fn restrict_to(mut self, environments: &[EnvironmentKind]) -> Self {
        self.cells.retain(|c| environments.contains(&c.environment));
        self
    }

    pub fn environments(&self) -> Vec<EnvironmentKind> {
        let mut envs: Vec<_> = self.cells.iter().map(|c| c.environment).collect();
        envs.sort();
        envs.dedup();
        envs
    }

    /// Resolved configuration of one cell for a given matrix base seed.
    pub fn cell_config(&self, cell: Cell, base_seed: u64) -> Result<SimConfig, ConfigError> {
        let mut cfg = self.base.clone();
        cfg.colony = cell.colony;
        cfg.environment = cell.environment;
        cfg.base_seed = cell_seed(base_seed, cell, 0);
        if let Some(list) = self.overrides.get(&cell) {
            for (k, v) in list {
                cfg.set(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Seasonal environment with 3000-round seasons, all four colonies.
pub fn long_season_preset() -> ExperimentMatrix {
    let base = SimConfig {
        season_length: 3000,
        environment: EnvironmentKind::Seasonal,
        ..SimConfig::default()
    };
    let mut m = ExperimentMatrix::full("long-season", base);
    m.cells.retain(|c| c.environment == EnvironmentKind::Seasonal);
    m
}

pub fn preset(name: &str) -> Option<ExperimentMatrix> {
    match name {
        "paper" => Some(ExperimentMatrix::full(name, SimConfig::default())),
        "long-season" | "long_season" => Some(long_season_preset()),
        _ => None,
    }
}

#[derive(Debug)]
pub struct CellOutcome {
    pub config: Result<SimConfig, ConfigError>,
    pub series: Option<AggregateSeries>,
    /// Raw per-replicate records, kept only when requested.
    pub runs: Vec<Vec<RoundRecord>>,
}

#[derive(Debug)]
pub struct MatrixResults {
    pub name: String,
    pub base_seed: u64,
    pub cells: BTreeMap<Cell, CellOutcome>,
}

impl MatrixResults {
    pub fn series(&self, colony: ColonyKind, environment: EnvironmentKind) -> Option<&AggregateSeries> {
        self.cells.get(&Cell::new(colony, environment))?.series.as_ref()
    }

    pub fn runs(&self, colony: ColonyKind, environment: EnvironmentKind) -> &[Vec<RoundRecord>] {
        self.cells
            .get(&Cell::new(colony, environment))
            .map_or(&[], |c| c.runs.as_slice())
    }

    pub fn failures(&self) -> Vec<(Cell, &ConfigError)> {
        self.cells
            .iter()
            .filter_map(|(c, o)| o.config.as_ref().err().map(|e| (*c, e)))
            .collect()
    }
}

/// Runs every cell and replicate on up to `jobs` threads, one cell at a
/// time so that only one cell's raw runs are held in memory. A cell whose
/// configuration is invalid is reported and skipped; the rest still run.
pub fn matrix_run(matrix: &ExperimentMatrix, base_seed: u64, jobs: usize, keep_runs: bool) -> MatrixResults {
    let pool = (jobs > 1).then(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("failed to build worker pool")
    });
    let cells = matrix
        .cells
        .iter()
        .map(|&cell| {
            let config = matrix.cell_config(cell, base_seed);
            let Ok(cfg) = &config else {
                return (
                    cell,
                    CellOutcome {
                        config,
                        series: None,
                        runs: Vec::new(),
                    },
                );
            };
            let seeds: Vec<u64> = (0..cfg.replicates).map(|r| cfg.base_seed + r as u64).collect();
            let exec = |&seed: &u64| run(cfg, seed).expect("validated config");
            let runs: Vec<Vec<RoundRecord>> = match &pool {
                Some(pool) => pool.install(|| seeds.par_iter().map(exec).collect()),
                None => seeds.iter().map(exec).collect(),
            };
            let series = Some(AggregateSeries::from_runs(&runs, cfg.hash(), seeds));
            let runs = if keep_runs { runs } else { Vec::new() };
            (cell, CellOutcome { config, series, runs })
        })
        .collect();
    MatrixResults {
        name: matrix.name.clone(),
        base_seed,
        cells,
    }
}

/// Paths written by [`write_matrix_outputs`].
#[derive(Debug, Default)]
pub struct OutputReport {
    pub csvs: Vec<PathBuf>,
    pub charts: Vec<PathBuf>,
    pub manifest: PathBuf,
}

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Population chart (one line per colony) and division-of-labour chart
/// (total and explorer count for the caste and age colonies) of one
/// environment.
pub fn environment_charts(
    results: &MatrixResults,
    environment: EnvironmentKind,
) -> (Vec<ChartSeries>, Vec<ChartSeries>) {
    let mut population = Vec::new();
    let mut dol = Vec::new();
    for (k, colony) in ColonyKind::ALL.into_iter().enumerate() {
        let Some(s) = results.series(colony, environment) else {
            continue;
        };
        population.push(ChartSeries::new(colony.label(), s.mean(Observable::WorkerPopulation).to_vec()).color(k));
        if colony.is_polyethic() {
            dol.push(
                ChartSeries::new(
                    format!("{} total", colony.label()),
                    s.mean(Observable::WorkerPopulation).to_vec(),
                )
                .color(k),
            );
            dol.push(
                ChartSeries::new(
                    format!("{} Solo", colony.label()),
                    s.mean(Observable::ExplorerCount).to_vec(),
                )
                .color(k)
                .dashed(),
            );
        }
    }
    (population, dol)
}

pub fn write_matrix_outputs(results: &MatrixResults, out: &Path) -> Result<OutputReport> {
    mkdir(out)?;
    let mut report = OutputReport::default();
    let mut manifest = String::new();
    let _ = writeln!(manifest, "preset = {}", results.name);
    let _ = writeln!(manifest, "base_seed = {}", results.base_seed);
    for (cell, outcome) in &results.cells {
        match (&outcome.config, &outcome.series) {
            (Ok(cfg), Some(series)) => {
                let dir = out.join(cell.dir_name());
                mkdir(&dir)?;
                let csv = dir.join("series.csv");
                write_csv(series, &csv)?;
                write_file(&dir.join("config.txt"), &config_text(cfg))?;
                report.csvs.push(csv);
                let seeds: Vec<String> = series.seeds.iter().map(u64::to_string).collect();
                let _ = writeln!(
                    manifest,
                    "{} hash={} seeds={}",
                    cell.dir_name(),
                    cfg.hash(),
                    seeds.join(",")
                );
            }
            (Err(e), _) => {
                let _ = writeln!(manifest, "{} error={}", cell.dir_name(), e);
            }
            (Ok(_), None) => unreachable!("valid cell without a series"),
        }
    }

    let charts = out.join("charts");
    let mut made_chart_dir = false;
    for env in EnvironmentKind::ALL {
        let (population, dol) = environment_charts(results, env);
        if population.is_empty() {
            continue;
        }
        if !made_chart_dir {
            mkdir(&charts)?;
            made_chart_dir = true;
        }
        let season = results
            .cells
            .iter()
            .find(|(c, o)| c.environment == env && o.config.is_ok())
            .and_then(|(_, o)| o.config.as_ref().ok())
            .filter(|cfg| cfg.environment == EnvironmentKind::Seasonal)
            .map(|cfg| cfg.season_length);
        let hashes: Vec<String> = results
            .cells
            .iter()
            .filter(|(c, _)| c.environment == env)
            .filter_map(|(c, o)| o.series.as_ref().map(|s| format!("{}={}", c.dir_name(), s.config_hash)))
            .collect();
        let base = ChartStyle {
            season_length: season,
            description: Some(hashes.join(" ")),
            ..ChartStyle::default()
        };
        let pop_path = charts.join(format!("{}_population.svg", env.name()));
        write_chart(
            &population,
            &ChartStyle {
                title: format!("Worker population, {} environment", env.name()),
                ..base.clone()
            },
            &pop_path,
        )?;
        report.charts.push(pop_path);
        if !dol.is_empty() {
            let dol_path = charts.join(format!("{}_dol.svg", env.name()));
            write_chart(
                &dol,
                &ChartStyle {
                    title: format!("Division of labour, {} environment", env.name()),
                    ..base
                },
                &dol_path,
            )?;
            report.charts.push(dol_path);
        }
    }

    report.manifest = out.join("manifest");
    write_file(&report.manifest, &manifest)?;
    Ok(report)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn config_text(config: &SimConfig) -> String {
    format!("# config_hash = {}\n{}", config.hash(), config.to_document())
}

/// Output of one (colony, environment) cell run by
/// [`crate::engine::run_replicates`].
pub fn write_run_outputs(
    config: &SimConfig,
    series: &AggregateSeries,
    out: &Path,
    charts: bool,
) -> Result<OutputReport> {
    mkdir(out)?;
    let mut report = OutputReport::default();
    let csv = out.join("series.csv");
    write_csv(series, &csv)?;
    report.csvs.push(csv);
    write_file(&out.join("config.txt"), &config_text(config))?;

    let seeds: Vec<String> = series.seeds.iter().map(u64::to_string).collect();
    let manifest = format!(
        "colony = {}\nenvironment = {}\nhash = {}\nseeds = {}\n",
        config.colony.name(),
        config.environment.name(),
        config.hash(),
        seeds.join(",")
    );
    report.manifest = out.join("manifest");
    write_file(&report.manifest, &manifest)?;

    if charts {
        let style = ChartStyle {
            season_length: (config.environment == EnvironmentKind::Seasonal).then_some(config.season_length),
            description: Some(format!("hash={} seeds={}", config.hash(), seeds.join(","))),
            ..ChartStyle::default()
        };
        let label = config.colony.label();
        let population = out.join("population.svg");
        write_chart(
            &[ChartSeries::new(
                label,
                series.mean(Observable::WorkerPopulation).to_vec(),
            )],
            &ChartStyle {
                title: format!(
                    "Worker population, {label} colony, {} environment",
                    config.environment.name()
                ),
                ..style.clone()
            },
            &population,
        )?;
        report.charts.push(population);
        if config.colony.is_polyethic() {
            let dol = out.join("dol.svg");
            write_chart(
                &[
                    ChartSeries::new("total", series.mean(Observable::WorkerPopulation).to_vec()),
                    ChartSeries::new("Solo", series.mean(Observable::ExplorerCount).to_vec()).dashed(),
                ],
                &ChartStyle {
                    title: format!(
                        "Division of labour, {label} colony, {} environment",
                        config.environment.name()
                    ),
                    ..style
                },
                &dol,
            )?;
            report.charts.push(dol);
        }
    }
    Ok(report)
}

/// SVG picture of the world of the run seeded `seed` after `round` rounds.
pub fn snapshot_svg(config: &SimConfig, seed: u64, round: u64) -> std::result::Result<String, ConfigError> {
    let mut state = init_sim(config, seed)?;
    while state.round < round {
        state.step_round();
    }
    Ok(render_world(&state.world, 6))
}

/// One chart of `observables` across labelled series. A single observable
/// is labelled by input; a single input by observable. Observables after
/// the first are dashed.
pub fn plot_series(
    inputs: &[(String, AggregateSeries)],
    observables: &[Observable],
    title: &str,
) -> std::result::Result<String, MetricsError> {
    let mut lines = Vec::new();
    for (k, (label, series)) in inputs.iter().enumerate() {
        for (j, &obs) in observables.iter().enumerate() {
            let name = match (inputs.len(), observables.len()) {
                (_, 1) => label.clone(),
                (1, _) => obs.name().to_string(),
                _ => format!("{label} {}", obs.name()),
            };
            let mut line = ChartSeries::new(name, series.mean(obs).to_vec()).color(k);
            if j > 0 {
                line = line.dashed();
            }
            lines.push(line);
        }
    }
    let first_round = inputs.first().and_then(|(_, s)| s.rounds.first().copied()).unwrap_or(1);
    render_chart(
        &lines,
        &ChartStyle {
            title: title.to_string(),
            y_label: if observables.len() == 1 {
                observables[0].name().to_string()
            } else {
                "value".into()
            },
            first_round,
            ..ChartStyle::default()
        },
    )
}
