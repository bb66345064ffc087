//! Per-round observables, replicate aggregation and export.

mod chart;
mod csv;
mod summary;

pub use self::chart::{render_chart, render_world, write_chart, ChartSeries, ChartStyle};
pub use self::csv::{format_sig6, read_csv, write_csv, write_csv_to, CSV_HEADER_PREFIX};
pub use self::summary::{summarize, Summary};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::MetricsError;

/// What one replicate looked like at the end of one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u64,
    pub worker_population: u64,
    pub explorer_count: u64,
    pub exploiter_count: u64,
    pub larvae_count: u64,
    pub store: u64,
    pub explorer_deliveries: u64,
    pub exploiter_deliveries: u64,
    pub food_in_world: u64,
    pub colony_alive: bool,
}

/// The averaged columns, in CSV order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Observable {
    WorkerPopulation,
    ExplorerCount,
    ExploiterCount,
    LarvaeCount,
    Store,
    ExplorerDeliveries,
    ExploiterDeliveries,
    FoodInWorld,
    ColonyAlive,
}

impl Observable {
    pub const ALL: [Observable; 9] = [
        Observable::WorkerPopulation,
        Observable::ExplorerCount,
        Observable::ExploiterCount,
        Observable::LarvaeCount,
        Observable::Store,
        Observable::ExplorerDeliveries,
        Observable::ExploiterDeliveries,
        Observable::FoodInWorld,
        Observable::ColonyAlive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::WorkerPopulation => "worker_population",
            Observable::ExplorerCount => "explorer_count",
            Observable::ExploiterCount => "exploiter_count",
            Observable::LarvaeCount => "larvae_count",
            Observable::Store => "store",
            Observable::ExplorerDeliveries => "explorer_deliveries",
            Observable::ExploiterDeliveries => "exploiter_deliveries",
            Observable::FoodInWorld => "food_in_world",
            Observable::ColonyAlive => "colony_alive",
        }
    }

    pub fn of(self, r: &RoundRecord) -> f64 {
        match self {
            Observable::WorkerPopulation => r.worker_population as f64,
            Observable::ExplorerCount => r.explorer_count as f64,
            Observable::ExploiterCount => r.exploiter_count as f64,
            Observable::LarvaeCount => r.larvae_count as f64,
            Observable::Store => r.store as f64,
            Observable::ExplorerDeliveries => r.explorer_deliveries as f64,
            Observable::ExploiterDeliveries => r.exploiter_deliveries as f64,
            Observable::FoodInWorld => r.food_in_world as f64,
            Observable::ColonyAlive => r.colony_alive as u8 as f64,
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = match s {
            "population" => "worker_population",
            "explorers" => "explorer_count",
            "exploiters" => "exploiter_count",
            other => other,
        };
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| MetricsError::UnknownObservable(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub observable: Observable,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Round-by-round mean and population standard deviation across replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateSeries {
    pub rounds: Vec<u64>,
    pub columns: Vec<Column>,
    pub config_hash: String,
    pub seeds: Vec<u64>,
}

impl AggregateSeries {
    pub fn from_runs(runs: &[Vec<RoundRecord>], config_hash: String, seeds: Vec<u64>) -> Self {
        let len = runs.first().map_or(0, Vec::len);
        assert!(runs.iter().all(|r| r.len() == len), "replicates differ in length");
        let n = runs.len() as f64;
        let rounds = runs
            .first()
            .map_or_else(Vec::new, |r| r.iter().map(|x| x.round).collect());
        let columns = Observable::ALL
            .into_iter()
            .map(|observable| {
                let mut mean = Vec::with_capacity(len);
                let mut std = Vec::with_capacity(len);
                for i in 0..len {
                    let values = runs.iter().map(|r| observable.of(&r[i]));
                    let m = values.clone().sum::<f64>() / n;
                    let var = values.map(|v| (v - m) * (v - m)).sum::<f64>() / n;
                    mean.push(m);
                    std.push(var.max(0.0).sqrt());
                }
                Column { observable, mean, std }
            })
            .collect();
        Self {
            rounds,
            columns,
            config_hash,
            seeds,
        }
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn column(&self, observable: Observable) -> &Column {
        self.columns
            .iter()
            .find(|c| c.observable == observable)
            .expect("aggregate carries every observable")
    }

    pub fn mean(&self, observable: Observable) -> &[f64] {
        &self.column(observable).mean
    }

    /// Statistics of the mean series of `observable` over indices `[from, to)`.
    pub fn summarize(&self, observable: Observable, from: usize, to: usize) -> Option<Summary> {
        summarize(self.mean(observable), from, to)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(round: u64, e: u64, c: u64) -> RoundRecord {
        RoundRecord {
            round,
            worker_population: e + c,
            explorer_count: e,
            exploiter_count: c,
            larvae_count: 0,
            store: 7,
            explorer_deliveries: 0,
            exploiter_deliveries: 0,
            food_in_world: 0,
            colony_alive: true,
        }
    }

    #[test]
    fn constant_field_mean_is_constant() {
        let runs = vec![vec![rec(1, 3, 4), rec(2, 1, 1)], vec![rec(1, 5, 0), rec(2, 9, 2)]];
        let agg = AggregateSeries::from_runs(&runs, "h".into(), vec![0, 1]);
        assert_eq!(agg.mean(Observable::Store), &[7.0, 7.0]);
        assert_eq!(agg.column(Observable::Store).std, vec![0.0, 0.0]);
        assert_eq!(agg.mean(Observable::ExplorerCount), &[4.0, 5.0]);
        assert_eq!(agg.column(Observable::ExplorerCount).std, vec![1.0, 4.0]);
        for i in 0..2 {
            let sum = agg.mean(Observable::ExplorerCount)[i] + agg.mean(Observable::ExploiterCount)[i];
            assert!((sum - agg.mean(Observable::WorkerPopulation)[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn observable_names_parse() {
        for o in Observable::ALL {
            assert_eq!(o.name().parse::<Observable>().unwrap(), o);
        }
        assert_eq!(
            "population".parse::<Observable>().unwrap(),
            Observable::WorkerPopulation
        );
        assert!("nope".parse::<Observable>().is_err());
    }
}
