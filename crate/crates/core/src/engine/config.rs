//! Simulation parameters and their flat `key = value` text form.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agents::AgentParams;
use crate::colony::{ColonyKind, ColonyParams};
use crate::error::ConfigError;
use crate::world::{CarrierParams, EnvironmentKind, EnvironmentParams, GridCoord, Torus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub width: u32,
    pub height: u32,
    pub nest_x: u32,
    pub nest_y: u32,
    pub colony: ColonyKind,
    pub environment: EnvironmentKind,
    pub rounds: u64,
    pub drop_interval: u64,
    pub food_lifetime: u64,
    pub energy_max: u32,
    pub refuel_threshold: u32,
    pub gestation: u64,
    pub lifespan_min: u32,
    pub lifespan_max: u32,
    pub window: u64,
    pub season_length: u64,
    pub patch_distance: u32,
    pub patch_radius: u32,
    pub initial_store: u64,
    pub carrier_deposit: f64,
    pub carrier_decay: f64,
    pub carrier_prune: f64,
    pub carrier_cap: f64,
    pub local_search_budget: u32,
    pub safety_margin: u32,
    pub dispatch_radius: u32,
    pub sense_radius: u32,
    pub explore_range: u32,
    pub switch_threshold: u32,
    pub base_seed: u64,
    pub replicates: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            width: 101,
            height: 101,
            nest_x: 50,
            nest_y: 50,
            colony: ColonyKind::Caste,
            environment: EnvironmentKind::Uniform,
            rounds: 10_000,
            drop_interval: 5,
            food_lifetime: 1000,
            energy_max: 450,
            refuel_threshold: 50,
            gestation: 100,
            lifespan_min: 2750,
            lifespan_max: 3250,
            window: 500,
            season_length: 1000,
            patch_distance: 30,
            patch_radius: 4,
            initial_store: 32,
            carrier_deposit: 1.0,
            carrier_decay: 0.01,
            carrier_prune: 0.05,
            carrier_cap: 3.0,
            local_search_budget: 20,
            safety_margin: 10,
            dispatch_radius: 2,
            sense_radius: 1,
            explore_range: 50,
            switch_threshold: 2,
            base_seed: 1,
            replicates: 13,
        }
    }
}

/// Every key accepted in a config document, in canonical order.
pub const CONFIG_KEYS: &[&str] = &[
    "width",
    "height",
    "nest_x",
    "nest_y",
    "colony",
    "environment",
    "rounds",
    "drop_interval",
    "food_lifetime",
    "energy_max",
    "refuel_threshold",
    "gestation",
    "lifespan_min",
    "lifespan_max",
    "window",
    "season_length",
    "patch_distance",
    "patch_radius",
    "initial_store",
    "carrier_deposit",
    "carrier_decay",
    "carrier_prune",
    "carrier_cap",
    "local_search_budget",
    "safety_margin",
    "dispatch_radius",
    "sense_radius",
    "explore_range",
    "switch_threshold",
    "base_seed",
    "replicates",
];

fn parse<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::Value {
        line,
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

impl SimConfig {
    pub fn torus(&self) -> Torus {
        Torus::new(self.width, self.height)
    }

    pub fn nest(&self) -> GridCoord {
        GridCoord::new(self.nest_x, self.nest_y)
    }

    pub fn agent_params(&self) -> AgentParams {
        AgentParams {
            energy_max: self.energy_max,
            safety_margin: self.safety_margin,
            local_search_budget: self.local_search_budget,
            dispatch_radius: self.dispatch_radius,
            sense_radius: self.sense_radius,
            explore_range: self.explore_range,
        }
    }

    pub fn colony_params(&self) -> ColonyParams {
        ColonyParams {
            gestation: self.gestation,
            energy_max: self.energy_max,
            lifespan_min: self.lifespan_min,
            lifespan_max: self.lifespan_max,
            switch_threshold: self.switch_threshold,
            refuel_threshold: self.refuel_threshold,
        }
    }

    pub fn carrier_params(&self) -> CarrierParams {
        CarrierParams {
            deposit: self.carrier_deposit,
            decay: self.carrier_decay,
            prune: self.carrier_prune,
            cap: self.carrier_cap,
        }
    }

    pub fn environment_params(&self) -> EnvironmentParams {
        EnvironmentParams {
            kind: self.environment,
            drop_interval: self.drop_interval,
            season_length: self.season_length,
            patch_distance: self.patch_distance,
            patch_radius: self.patch_radius,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive: [(&'static str, u64); 13] = [
            ("width", self.width as u64),
            ("height", self.height as u64),
            ("drop_interval", self.drop_interval),
            ("food_lifetime", self.food_lifetime),
            ("energy_max", self.energy_max as u64),
            ("gestation", self.gestation),
            ("lifespan_min", self.lifespan_min as u64),
            ("window", self.window),
            ("season_length", self.season_length),
            ("patch_distance", self.patch_distance as u64),
            ("local_search_budget", self.local_search_budget as u64),
            ("safety_margin", self.safety_margin as u64),
            ("replicates", self.replicates as u64),
        ];
        for (field, v) in positive {
            if v == 0 {
                return Err(ConfigError::invalid(field, "must be strictly positive"));
            }
        }
        if self.sense_radius > 1 {
            return Err(ConfigError::invalid("sense_radius", "must be 0 or 1"));
        }
        if self.switch_threshold == 0 {
            return Err(ConfigError::invalid("switch_threshold", "must be strictly positive"));
        }
        if self.nest_x >= self.width {
            return Err(ConfigError::invalid(
                "nest_x",
                format!("must be below width {}", self.width),
            ));
        }
        if self.nest_y >= self.height {
            return Err(ConfigError::invalid(
                "nest_y",
                format!("must be below height {}", self.height),
            ));
        }
        if self.width * self.height < 2 {
            return Err(ConfigError::invalid(
                "width",
                "grid needs at least one cell besides the nest",
            ));
        }
        if self.lifespan_min > self.lifespan_max {
            return Err(ConfigError::invalid("lifespan_max", "must be at least lifespan_min"));
        }
        if self.refuel_threshold > self.energy_max {
            return Err(ConfigError::invalid("refuel_threshold", "cannot exceed energy_max"));
        }
        if self.refuel_threshold <= self.safety_margin {
            return Err(ConfigError::invalid(
                "refuel_threshold",
                "must exceed safety_margin so a sated ant can still leave the nest",
            ));
        }
        if self.patch_radius >= self.patch_distance {
            return Err(ConfigError::invalid("patch_radius", "patch must not cover the nest"));
        }
        let half = self.width.min(self.height) / 2;
        if self.patch_distance + self.patch_radius > half {
            return Err(ConfigError::invalid(
                "patch_distance",
                format!("patch must fit within half the grid ({half} cells)"),
            ));
        }
        for (field, v) in [
            ("carrier_deposit", self.carrier_deposit),
            ("carrier_decay", self.carrier_decay),
            ("carrier_prune", self.carrier_prune),
            ("carrier_cap", self.carrier_cap),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::invalid(field, "must be a finite positive number"));
            }
        }
        Ok(())
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        self.set_at(0, key, value)
    }

    fn set_at(&mut self, line: usize, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "width" => self.width = parse(line, key, value)?,
            "height" => self.height = parse(line, key, value)?,
            "nest_x" => self.nest_x = parse(line, key, value)?,
            "nest_y" => self.nest_y = parse(line, key, value)?,
            "colony" => self.colony = parse(line, key, value)?,
            "environment" => self.environment = parse(line, key, value)?,
            "rounds" => self.rounds = parse(line, key, value)?,
            "drop_interval" => self.drop_interval = parse(line, key, value)?,
            "food_lifetime" => self.food_lifetime = parse(line, key, value)?,
            "energy_max" => self.energy_max = parse(line, key, value)?,
            "refuel_threshold" => self.refuel_threshold = parse(line, key, value)?,
            "gestation" => self.gestation = parse(line, key, value)?,
            "lifespan_min" => self.lifespan_min = parse(line, key, value)?,
            "lifespan_max" => self.lifespan_max = parse(line, key, value)?,
            "window" => self.window = parse(line, key, value)?,
            "season_length" => self.season_length = parse(line, key, value)?,
            "patch_distance" => self.patch_distance = parse(line, key, value)?,
            "patch_radius" => self.patch_radius = parse(line, key, value)?,
            "initial_store" => self.initial_store = parse(line, key, value)?,
            "carrier_deposit" => self.carrier_deposit = parse(line, key, value)?,
            "carrier_decay" => self.carrier_decay = parse(line, key, value)?,
            "carrier_prune" => self.carrier_prune = parse(line, key, value)?,
            "carrier_cap" => self.carrier_cap = parse(line, key, value)?,
            "local_search_budget" => self.local_search_budget = parse(line, key, value)?,
            "safety_margin" => self.safety_margin = parse(line, key, value)?,
            "dispatch_radius" => self.dispatch_radius = parse(line, key, value)?,
            "sense_radius" => self.sense_radius = parse(line, key, value)?,
            "explore_range" => self.explore_range = parse(line, key, value)?,
            "switch_threshold" => self.switch_threshold = parse(line, key, value)?,
            "base_seed" => self.base_seed = parse(line, key, value)?,
            "replicates" => self.replicates = parse(line, key, value)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Overlays a config document onto `self`. Blank lines and `#` comments
    /// are ignored. Does not validate; call [`SimConfig::validate`] after all
    /// overrides are in.
    pub fn apply_document(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    text: raw.to_string(),
                });
            };
            self.set_at(line, key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn from_document(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = SimConfig::default();
        cfg.apply_document(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "width" => self.width.to_string(),
            "height" => self.height.to_string(),
            "nest_x" => self.nest_x.to_string(),
            "nest_y" => self.nest_y.to_string(),
            "colony" => self.colony.to_string(),
            "environment" => self.environment.to_string(),
            "rounds" => self.rounds.to_string(),
            "drop_interval" => self.drop_interval.to_string(),
            "food_lifetime" => self.food_lifetime.to_string(),
            "energy_max" => self.energy_max.to_string(),
            "refuel_threshold" => self.refuel_threshold.to_string(),
            "gestation" => self.gestation.to_string(),
            "lifespan_min" => self.lifespan_min.to_string(),
            "lifespan_max" => self.lifespan_max.to_string(),
            "window" => self.window.to_string(),
            "season_length" => self.season_length.to_string(),
            "patch_distance" => self.patch_distance.to_string(),
            "patch_radius" => self.patch_radius.to_string(),
            "initial_store" => self.initial_store.to_string(),
            "carrier_deposit" => self.carrier_deposit.to_string(),
            "carrier_decay" => self.carrier_decay.to_string(),
            "carrier_prune" => self.carrier_prune.to_string(),
            "carrier_cap" => self.carrier_cap.to_string(),
            "local_search_budget" => self.local_search_budget.to_string(),
            "safety_margin" => self.safety_margin.to_string(),
            "dispatch_radius" => self.dispatch_radius.to_string(),
            "sense_radius" => self.sense_radius.to_string(),
            "explore_range" => self.explore_range.to_string(),
            "switch_threshold" => self.switch_threshold.to_string(),
            "base_seed" => self.base_seed.to_string(),
            "replicates" => self.replicates.to_string(),
            _ => return None,
        })
    }

    /// Canonical text form: one `key = value` line per field, fixed order.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        for key in CONFIG_KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key).expect("known key"));
        }
        out
    }

    /// First 16 hex digits of the SHA-256 of the canonical document.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_document().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SimConfig::default().validate().unwrap();
    }

    #[test]
    fn document_round_trips() {
        let cfg = SimConfig {
            colony: ColonyKind::Age,
            environment: EnvironmentKind::RoamingPatch,
            carrier_decay: 0.02,
            ..SimConfig::default()
        };
        let back = SimConfig::from_document(&cfg.to_document()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
    }

    #[test]
    fn hash_changes_with_any_field() {
        let base = SimConfig::default();
        let mut other = base.clone();
        other.base_seed += 1;
        assert_ne!(base.hash(), other.hash());
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = SimConfig::from_document("# comment\n\nrounds = 200 # trailing\ncolony=age\n").unwrap();
        assert_eq!(cfg.rounds, 200);
        assert_eq!(cfg.colony, ColonyKind::Age);
    }

    #[test]
    fn errors_name_the_field() {
        let err = SimConfig::from_document("bogus = 1").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { line: 1, .. }));
        let err = SimConfig::from_document("rounds = ten").unwrap_err();
        assert!(err.to_string().contains("rounds"));
        let err = SimConfig::from_document("drop_interval = 0").unwrap_err();
        assert_eq!(
            err,
            ConfigError::Invalid {
                field: "drop_interval",
                reason: "must be strictly positive".into()
            }
        );
        let err = SimConfig::from_document("lifespan_min = 4000").unwrap_err();
        assert!(err.to_string().contains("lifespan_max"));
        let err = SimConfig::from_document("just words").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 1, .. }));
        let err = SimConfig::from_document("environment = desert").unwrap_err();
        assert!(err.to_string().contains("desert"));
    }
}
