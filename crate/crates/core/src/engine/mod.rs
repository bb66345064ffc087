//! Deterministic round loop and replicate orchestration.
//!
//! Per-round update order (part of the determinism contract):
//!
//! 1. food drop
//! 2. food expiry
//! 3. season flip / patch relocation
//! 4. queen
//! 5. larva maturation
//! 6. ants, in an order reshuffled every round; arrivals (delivery,
//!    feeding, starvation, age-polyethism switching) resolve as they happen
//! 7. ageing and removal of the dead
//! 8. carrier decay
//! 9. success-tracker headcount and eviction
//! 10. the round's [`RoundRecord`]
//!
//! All randomness comes from one ChaCha8 stream per replicate, consumed in
//! exactly that order.

mod config;
pub mod invariants;

pub use config::{SimConfig, CONFIG_KEYS};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{step_ant, Ant, Role};
use crate::colony::{ArrivalOutcome, Colony, Maturation, RoleCounts};
use crate::error::ConfigError;
use crate::metrics::{AggregateSeries, RoundRecord};
use crate::world::{AntId, World};

/// Counts of everything that happened in the last round, for ledger checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundEvents {
    pub drops: u64,
    pub expiries: u64,
    pub pickups: u64,
    pub deliveries: u64,
    pub larvae_created: u64,
    /// Maturations that found food in the store.
    pub larvae_matured: u64,
    pub births_died: u64,
    pub workers_fed: u64,
    pub starved: u64,
    pub aged_out: u64,
    pub lost_in_field: u64,
    pub relocated: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimState {
    pub config: SimConfig,
    pub round: u64,
    pub world: World,
    pub colony: Colony,
    pub ants: Vec<Ant>,
    pub last_events: RoundEvents,
    next_ant_id: AntId,
    rng: ChaCha8Rng,
}

/// Round-0 state: empty world, the initial store, no ants, no brood.
pub fn init_sim(config: &SimConfig, seed: u64) -> Result<SimState, ConfigError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let world = World::new(
        config.torus(),
        config.nest(),
        config.food_lifetime,
        config.carrier_params(),
        config.environment_params(),
        &mut rng,
    );
    let colony = Colony::new(
        config.colony,
        config.colony_params(),
        config.initial_store,
        config.window,
    );
    Ok(SimState {
        config: config.clone(),
        round: 0,
        world,
        colony,
        ants: Vec::new(),
        last_events: RoundEvents::default(),
        next_ant_id: 0,
        rng,
    })
}

impl SimState {
    pub fn role_counts(&self) -> RoleCounts {
        RoleCounts::of(&self.ants)
    }

    pub fn colony_alive(&self) -> bool {
        !(self.ants.is_empty() && self.colony.store == 0)
    }

    /// Advances one round and reports it.
    pub fn step_round(&mut self) -> RoundRecord {
        self.round += 1;
        let round = self.round;
        let mut ev = RoundEvents::default();
        let rng = &mut self.rng;
        let world = &mut self.world;
        let colony = &mut self.colony;

        if world.drop_food(round, rng).is_some() {
            ev.drops += 1;
        }
        ev.expiries = world.expire_food(round) as u64;
        ev.relocated = world.advance_environment(round, rng).is_some();

        if colony.queen_step(round, RoleCounts::of(&self.ants), rng).is_some() {
            ev.larvae_created += 1;
        }
        for m in colony.mature_larvae(round, world.nest, &mut self.next_ant_id, rng) {
            match m {
                Maturation::Worker(ant) => {
                    ev.larvae_matured += 1;
                    self.ants.push(ant);
                }
                Maturation::DiedAtBirth => ev.births_died += 1,
            }
        }

        let params = self.config.agent_params();
        let mut order: Vec<usize> = (0..self.ants.len()).collect();
        order.shuffle(rng);
        let mut dead = vec![false; self.ants.len()];
        let mut delivered = RoleCounts::default();
        for i in order {
            let report = step_ant(&mut self.ants[i], world, &params, round, rng);
            if report.picked_up {
                ev.pickups += 1;
            }
            let Some(carrying) = report.arrived else {
                continue;
            };
            if carrying {
                ev.deliveries += 1;
                delivered.add(self.ants[i].role);
            }
            match colony.worker_arrival(&mut self.ants[i], carrying, round) {
                ArrivalOutcome::Fed => ev.workers_fed += 1,
                ArrivalOutcome::NotHungry => {}
                ArrivalOutcome::Starved => {
                    ev.starved += 1;
                    dead[i] = true;
                    continue;
                }
            }
            if colony.kind == crate::colony::ColonyKind::Age {
                let others = RoleCounts::of(
                    self.ants
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i && !dead[j])
                        .map(|(_, a)| a),
                );
                colony.maybe_switch_role(&mut self.ants[i], round, others, rng);
            }
        }

        for (ant, dead) in self.ants.iter_mut().zip(dead.iter_mut()) {
            if *dead {
                continue;
            }
            ant.age += 1;
            if ant.age >= ant.max_age {
                *dead = true;
                ev.aged_out += 1;
                if ant.carrying {
                    ev.lost_in_field += 1;
                }
            }
        }
        let mut dead_iter = dead.into_iter();
        self.ants.retain(|ant| {
            let dead = dead_iter.next().unwrap();
            if dead && !ant.at_nest() {
                world.seeker.clear_owner(&world.torus, ant.id);
            }
            !dead
        });

        world.decay_carrier();

        let counts = RoleCounts::of(&self.ants);
        colony.tracker.record_headcount(round, counts);
        colony.tracker.evict(round);

        self.last_events = ev;
        RoundRecord {
            round,
            worker_population: self.ants.len() as u64,
            explorer_count: counts.explorers as u64,
            exploiter_count: counts.exploiters as u64,
            larvae_count: colony.larvae.len() as u64,
            store: colony.store,
            explorer_deliveries: delivered.get(Role::Explorer) as u64,
            exploiter_deliveries: delivered.get(Role::Exploiter) as u64,
            food_in_world: world.food.len() as u64,
            colony_alive: self.colony_alive(),
        }
    }

    /// Steps until the configured round count is reached.
    pub fn run_to_end(&mut self) -> Vec<RoundRecord> {
        let remaining = self.config.rounds.saturating_sub(self.round);
        (0..remaining).map(|_| self.step_round()).collect()
    }
}

/// One seeded run of `config.rounds` rounds.
pub fn run(config: &SimConfig, seed: u64) -> Result<Vec<RoundRecord>, ConfigError> {
    Ok(init_sim(config, seed)?.run_to_end())
}

/// Seed of replicate `index` of a single-cell run.
pub fn replicate_seed(base_seed: u64, index: u32) -> u64 {
    base_seed.wrapping_add(index as u64)
}

/// Runs each seed on up to `jobs` threads. Results come back in seed order
/// whatever the thread count.
pub fn run_seeds(config: &SimConfig, seeds: &[u64], jobs: usize) -> Result<Vec<Vec<RoundRecord>>, ConfigError> {
    config.validate()?;
    if jobs <= 1 || seeds.len() <= 1 {
        return seeds.iter().map(|&s| run(config, s)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("failed to build worker pool");
    pool.install(|| seeds.par_iter().map(|&s| run(config, s)).collect())
}

/// Runs `config.replicates` replicates with seeds `base_seed + i` and
/// averages them round by round.
pub fn run_replicates(config: &SimConfig, jobs: usize) -> Result<AggregateSeries, ConfigError> {
    let seeds: Vec<u64> = (0..config.replicates)
        .map(|i| replicate_seed(config.base_seed, i))
        .collect();
    let runs = run_seeds(config, &seeds, jobs)?;
    Ok(AggregateSeries::from_runs(&runs, config.hash(), seeds))
}
