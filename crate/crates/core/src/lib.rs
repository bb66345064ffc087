//! Seeded ant-colony foraging simulator.
//!
//! Colonies of explorers and trail-following exploiters forage on a torus
//! while food arrives uniformly, in a patch, or in alternating seasons.
//! [`engine::run`] drives one replicate; [`experiments`] runs the full
//! colony by environment matrix and writes CSV and SVG output.

pub mod agents;
pub mod colony;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod world;

pub use agents::{Ant, AntState, Role};
pub use colony::ColonyKind;
pub use engine::{init_sim, run, run_replicates, SimConfig, SimState};
pub use error::{ConfigError, Error, MetricsError, Result, WorldError};
pub use metrics::{AggregateSeries, Observable, RoundRecord};
pub use world::{EnvironmentKind, GridCoord, World};
