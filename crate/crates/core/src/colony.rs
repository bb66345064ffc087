//! Colony metabolism and the four role-assignment policies.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{Ant, Role};
use crate::error::ParseKindError;
use crate::world::{AntId, GridCoord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ColonyKind {
    PureExplorer,
    PureExploiter,
    Caste,
    Age,
}

impl ColonyKind {
    pub const ALL: [ColonyKind; 4] = [
        ColonyKind::PureExplorer,
        ColonyKind::PureExploiter,
        ColonyKind::Caste,
        ColonyKind::Age,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ColonyKind::PureExplorer => "explorer",
            ColonyKind::PureExploiter => "exploiter",
            ColonyKind::Caste => "caste",
            ColonyKind::Age => "age",
        }
    }

    /// Chart label, in the Solo/Coop vocabulary for the pure colonies.
    pub fn label(self) -> &'static str {
        match self {
            ColonyKind::PureExplorer => "Solo",
            ColonyKind::PureExploiter => "Coop",
            ColonyKind::Caste => "Caste",
            ColonyKind::Age => "Age",
        }
    }

    pub fn is_polyethic(self) -> bool {
        matches!(self, ColonyKind::Caste | ColonyKind::Age)
    }
}

impl fmt::Display for ColonyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ColonyKind {
    type Err = ParseKindError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "explorer" | "solo" => Ok(ColonyKind::PureExplorer),
            "exploiter" | "coop" => Ok(ColonyKind::PureExploiter),
            "caste" => Ok(ColonyKind::Caste),
            "age" => Ok(ColonyKind::Age),
            other => Err(ParseKindError {
                what: "colony",
                value: other.to_string(),
                expected: "explorer, exploiter, caste, age",
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Larva {
    pub created_at: u64,
    pub matures_at: u64,
    pub destined_role: Option<Role>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleCounts {
    pub explorers: usize,
    pub exploiters: usize,
}

impl RoleCounts {
    pub fn of<'a>(ants: impl IntoIterator<Item = &'a Ant>) -> Self {
        let mut c = RoleCounts::default();
        for a in ants {
            c.add(a.role);
        }
        c
    }

    pub fn get(&self, role: Role) -> usize {
        match role {
            Role::Explorer => self.explorers,
            Role::Exploiter => self.exploiters,
        }
    }

    pub fn add(&mut self, role: Role) {
        match role {
            Role::Explorer => self.explorers += 1,
            Role::Exploiter => self.exploiters += 1,
        }
    }

    pub fn remove(&mut self, role: Role) {
        match role {
            Role::Explorer => self.explorers -= 1,
            Role::Exploiter => self.exploiters -= 1,
        }
    }

    pub fn total(&self) -> usize {
        self.explorers + self.exploiters
    }
}

/// Sliding-window record of deliveries and headcounts per role.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuccessTracker {
    window: u64,
    deliveries: VecDeque<(u64, Role)>,
    headcounts: VecDeque<(u64, RoleCounts)>,
    delivered: RoleCounts,
    headcount_sum: RoleCounts,
}

impl SuccessTracker {
    pub fn new(window: u64) -> Self {
        Self {
            window,
            deliveries: VecDeque::new(),
            headcounts: VecDeque::new(),
            delivered: RoleCounts::default(),
            headcount_sum: RoleCounts::default(),
        }
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn record_delivery(&mut self, round: u64, role: Role) {
        self.deliveries.push_back((round, role));
        self.delivered.add(role);
    }

    pub fn record_headcount(&mut self, round: u64, counts: RoleCounts) {
        self.headcounts.push_back((round, counts));
        self.headcount_sum.explorers += counts.explorers;
        self.headcount_sum.exploiters += counts.exploiters;
    }

    /// Drops every record at or before `now - window`, keeping the
    /// `window` most recent rounds.
    pub fn evict(&mut self, now: u64) {
        let Some(cutoff) = now.checked_sub(self.window) else {
            return;
        };
        while let Some(&(round, role)) = self.deliveries.front() {
            if round > cutoff {
                break;
            }
            self.deliveries.pop_front();
            self.delivered.remove(role);
        }
        while let Some(&(round, counts)) = self.headcounts.front() {
            if round > cutoff {
                break;
            }
            self.headcounts.pop_front();
            self.headcount_sum.explorers -= counts.explorers;
            self.headcount_sum.exploiters -= counts.exploiters;
        }
    }

    pub fn deliveries(&self, role: Role) -> usize {
        self.delivered.get(role)
    }

    pub fn mean_headcount(&self, role: Role) -> f64 {
        if self.headcounts.is_empty() {
            0.0
        } else {
            self.headcount_sum.get(role) as f64 / self.headcounts.len() as f64
        }
    }

    /// Deliveries per average worker of `role` over the window. Call
    /// [`SuccessTracker::evict`] first.
    pub fn efficiency(&self, role: Role) -> f64 {
        let mean = self.mean_headcount(role);
        if mean == 0.0 {
            0.0
        } else {
            self.deliveries(role) as f64 / mean
        }
    }

    pub fn oldest_round(&self) -> Option<u64> {
        let d = self.deliveries.front().map(|r| r.0);
        let h = self.headcounts.front().map(|r| r.0);
        match (d, h) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// Probability of choosing the explorer role given both efficiencies.
pub fn explorer_probability(eff_explorer: f64, eff_exploiter: f64) -> f64 {
    let total = eff_explorer + eff_exploiter;
    if total <= 0.0 {
        0.5
    } else {
        eff_explorer / total
    }
}

/// Proportional role draw with the at-least-one-of-each guard.
///
/// `counts` are the workers (plus destined larvae) already holding each role,
/// not counting the individual being assigned.
pub fn choose_role<R: Rng + ?Sized>(eff_explorer: f64, eff_exploiter: f64, counts: RoleCounts, rng: &mut R) -> Role {
    match (counts.explorers, counts.exploiters) {
        (0, 0) => {}
        (0, _) => return Role::Explorer,
        (_, 0) => return Role::Exploiter,
        _ => {}
    }
    let p = explorer_probability(eff_explorer, eff_exploiter);
    if rng.gen::<f64>() < p {
        Role::Explorer
    } else {
        Role::Exploiter
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColonyParams {
    pub gestation: u64,
    pub energy_max: u32,
    pub lifespan_min: u32,
    pub lifespan_max: u32,
    pub switch_threshold: u32,
    /// Workers arriving at the nest eat only once their energy has fallen
    /// to this level or below.
    pub refuel_threshold: u32,
}

impl Default for ColonyParams {
    fn default() -> Self {
        Self {
            gestation: 100,
            energy_max: 450,
            lifespan_min: 2750,
            lifespan_max: 3250,
            switch_threshold: 2,
            refuel_threshold: 450,
        }
    }
}

/// Result of a worker reaching the nest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrivalOutcome {
    Fed,
    NotHungry,
    Starved,
}

/// Result of a larva reaching its maturation round.
#[derive(Debug, Clone, PartialEq)]
pub enum Maturation {
    Worker(Ant),
    /// Matured into an empty store and died on the spot.
    DiedAtBirth,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Colony {
    pub kind: ColonyKind,
    pub params: ColonyParams,
    pub store: u64,
    pub larvae: VecDeque<Larva>,
    pub tracker: SuccessTracker,
}

impl Colony {
    pub fn new(kind: ColonyKind, params: ColonyParams, initial_store: u64, window: u64) -> Self {
        Self {
            kind,
            params,
            store: initial_store,
            larvae: VecDeque::new(),
            tracker: SuccessTracker::new(window),
        }
    }

    pub fn destined_counts(&self) -> RoleCounts {
        let mut c = RoleCounts::default();
        for role in self.larvae.iter().filter_map(|l| l.destined_role) {
            c.add(role);
        }
        c
    }

    fn efficiencies(&mut self, round: u64) -> (f64, f64) {
        self.tracker.evict(round);
        (
            self.tracker.efficiency(Role::Explorer),
            self.tracker.efficiency(Role::Exploiter),
        )
    }

    /// Lays at most one larva, only while the store exceeds workers plus
    /// larvae. `workers` are the living workers by role.
    pub fn queen_step<R: Rng + ?Sized>(&mut self, round: u64, workers: RoleCounts, rng: &mut R) -> Option<Larva> {
        let population = workers.total() as u64 + self.larvae.len() as u64;
        if self.store == 0 || self.store <= population {
            return None;
        }
        self.store -= 1;
        let destined_role = match self.kind {
            ColonyKind::Caste => Some(self.choose_offspring_role(round, workers, rng)),
            _ => None,
        };
        let larva = Larva {
            created_at: round,
            matures_at: round + self.params.gestation,
            destined_role,
        };
        self.larvae.push_back(larva);
        Some(larva)
    }

    /// Caste queens pick the role of a new larva in proportion to each role's
    /// recent efficiency, never letting a role die out.
    pub fn choose_offspring_role<R: Rng + ?Sized>(&mut self, round: u64, workers: RoleCounts, rng: &mut R) -> Role {
        let destined = self.destined_counts();
        let counts = RoleCounts {
            explorers: workers.explorers + destined.explorers,
            exploiters: workers.exploiters + destined.exploiters,
        };
        let (e, c) = self.efficiencies(round);
        choose_role(e, c, counts, rng)
    }

    /// Turns due larvae into workers, each costing one unit of food.
    pub fn mature_larvae<R: Rng + ?Sized>(
        &mut self,
        round: u64,
        nest: GridCoord,
        next_id: &mut AntId,
        rng: &mut R,
    ) -> Vec<Maturation> {
        let mut out = Vec::new();
        while let Some(larva) = self.larvae.front() {
            if larva.matures_at > round {
                break;
            }
            let larva = self.larvae.pop_front().unwrap();
            if self.store == 0 {
                out.push(Maturation::DiedAtBirth);
                continue;
            }
            self.store -= 1;
            let role = match self.kind {
                ColonyKind::PureExplorer | ColonyKind::Age => Role::Explorer,
                ColonyKind::PureExploiter => Role::Exploiter,
                ColonyKind::Caste => larva.destined_role.expect("caste larva without a destined role"),
            };
            let max_age = rng.gen_range(self.params.lifespan_min..=self.params.lifespan_max);
            let ant = Ant::new(*next_id, role, nest, self.params.energy_max, max_age);
            *next_id += 1;
            out.push(Maturation::Worker(ant));
        }
        out
    }

    /// Delivers the carried morsel, credits it to the ant's role, then feeds
    /// the ant if it is hungry. A hungry ant facing an empty store starves.
    pub fn worker_arrival(&mut self, ant: &mut Ant, carried: bool, round: u64) -> ArrivalOutcome {
        if carried {
            self.store += 1;
            self.tracker.record_delivery(round, ant.role);
        }
        if ant.energy > self.params.refuel_threshold {
            return ArrivalOutcome::NotHungry;
        }
        if self.store == 0 {
            return ArrivalOutcome::Starved;
        }
        self.store -= 1;
        ant.energy = self.params.energy_max;
        ArrivalOutcome::Fed
    }

    /// Age-polyethism role re-draw after a completed trip. `others` counts
    /// every other living worker by role. Returns the new role if it changed.
    pub fn maybe_switch_role<R: Rng + ?Sized>(
        &mut self,
        ant: &mut Ant,
        round: u64,
        others: RoleCounts,
        rng: &mut R,
    ) -> Option<Role> {
        if self.kind != ColonyKind::Age || ant.trips_completed < self.params.switch_threshold {
            return None;
        }
        debug_assert!(ant.at_nest());
        let (e, c) = self.efficiencies(round);
        let role = choose_role(e, c, others, rng);
        if role != ant.role {
            ant.role = role;
            Some(role)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(1)
    }

    fn counts(e: usize, c: usize) -> RoleCounts {
        RoleCounts {
            explorers: e,
            exploiters: c,
        }
    }

    fn colony(kind: ColonyKind, store: u64) -> Colony {
        Colony::new(kind, ColonyParams::default(), store, 500)
    }

    #[test]
    fn queen_threshold_is_strict() {
        let mut col = colony(ColonyKind::PureExplorer, 10);
        for r in 0..4 {
            col.larvae.push_back(Larva {
                created_at: r,
                matures_at: 1000,
                destined_role: None,
            });
        }
        assert!(col.queen_step(10, counts(5, 0), &mut rng()).is_some());
        assert_eq!(col.store, 9);
        let mut col = colony(ColonyKind::PureExplorer, 9);
        for r in 0..4 {
            col.larvae.push_back(Larva {
                created_at: r,
                matures_at: 1000,
                destined_role: None,
            });
        }
        assert!(col.queen_step(10, counts(5, 0), &mut rng()).is_none());
        assert_eq!(col.store, 9);
    }

    #[test]
    fn queen_never_lays_from_empty_store() {
        let mut col = colony(ColonyKind::Caste, 0);
        assert!(col.queen_step(1, counts(0, 0), &mut rng()).is_none());
    }

    /// Hand ledger of the bootstrap: one larva per round while the store
    /// exceeds the brood, then maturation 100 rounds later.
    #[test]
    fn bootstrap_ledger() {
        let mut store: i64 = 32;
        let mut brood = 0;
        let mut created = Vec::new();
        for round in 1..=50 {
            if store > brood {
                store -= 1;
                brood += 1;
                created.push(round);
            }
        }
        assert_eq!(created, (1..=16).collect::<Vec<_>>());
        assert_eq!(store, 16);

        let mut col = colony(ColonyKind::PureExplorer, 32);
        let mut rng = rng();
        let mut next_id = 0;
        let mut workers = Vec::new();
        for round in 1..=116 {
            let c = RoleCounts::of(&workers);
            col.queen_step(round, c, &mut rng);
            for m in col.mature_larvae(round, GridCoord::new(0, 0), &mut next_id, &mut rng) {
                if let Maturation::Worker(a) = m {
                    workers.push(a);
                }
            }
            if round == 16 {
                assert_eq!(col.larvae.len(), 16);
                assert_eq!(col.store, 16);
            }
            if (101..=116).contains(&round) {
                assert_eq!(workers.len() as u64, round - 100);
            }
        }
        assert_eq!(workers.len(), 16);
        assert_eq!(col.store, 0);
        assert!(col.larvae.is_empty());
    }

    #[test]
    fn larva_into_empty_store_dies() {
        let mut col = colony(ColonyKind::PureExplorer, 0);
        col.larvae.push_back(Larva {
            created_at: 0,
            matures_at: 100,
            destined_role: None,
        });
        let mut id = 0;
        let out = col.mature_larvae(100, GridCoord::new(0, 0), &mut id, &mut rng());
        assert_eq!(out, vec![Maturation::DiedAtBirth]);
        assert_eq!(id, 0);
    }

    #[test]
    fn sampled_lifespans_are_uniform_in_range() {
        let mut col = colony(ColonyKind::PureExplorer, 1000);
        let mut rng = rng();
        let mut id = 0;
        for i in 0..1000 {
            col.larvae.push_back(Larva {
                created_at: i,
                matures_at: 100,
                destined_role: None,
            });
        }
        let ages: Vec<u32> = col
            .mature_larvae(100, GridCoord::new(0, 0), &mut id, &mut rng)
            .into_iter()
            .map(|m| match m {
                Maturation::Worker(a) => a.max_age,
                Maturation::DiedAtBirth => panic!("store was full"),
            })
            .collect();
        assert_eq!(ages.len(), 1000);
        assert!(ages.iter().all(|a| (2750..=3250).contains(a)));
        let mean = ages.iter().map(|&a| a as f64).sum::<f64>() / 1000.0;
        assert!((2950.0..=3050.0).contains(&mean), "mean {mean}");
    }

    #[test]
    fn offspring_roles_follow_policy() {
        let mut rng = rng();
        let mut seen = RoleCounts::default();
        for kind in ColonyKind::ALL {
            let mut col = colony(kind, 10_000);
            let mut id = 0;
            for round in 1..=30 {
                col.queen_step(round, counts(0, 0), &mut rng);
            }
            for m in col.mature_larvae(200, GridCoord::new(0, 0), &mut id, &mut rng) {
                let Maturation::Worker(a) = m else { panic!() };
                match kind {
                    ColonyKind::PureExplorer | ColonyKind::Age => assert_eq!(a.role, Role::Explorer),
                    ColonyKind::PureExploiter => assert_eq!(a.role, Role::Exploiter),
                    ColonyKind::Caste => seen.add(a.role),
                }
            }
        }
        assert!(seen.explorers >= 1 && seen.exploiters >= 1);
    }

    #[test]
    fn arrival_ledger_order() {
        let mut ant = Ant::new(0, Role::Explorer, GridCoord::new(0, 0), 0, 3000);
        let mut col = colony(ColonyKind::PureExplorer, 0);
        assert_eq!(col.worker_arrival(&mut ant, true, 5), ArrivalOutcome::Fed);
        assert_eq!(col.store, 0);
        assert_eq!(ant.energy, 450);
        assert_eq!(col.tracker.deliveries(Role::Explorer), 1);

        let mut ant = Ant::new(1, Role::Explorer, GridCoord::new(0, 0), 0, 3000);
        assert_eq!(col.worker_arrival(&mut ant, false, 6), ArrivalOutcome::Starved);

        let mut col = colony(ColonyKind::PureExplorer, 5);
        let mut ant = Ant::new(2, Role::Exploiter, GridCoord::new(0, 0), 3, 3000);
        assert_eq!(col.worker_arrival(&mut ant, true, 7), ArrivalOutcome::Fed);
        assert_eq!(col.store, 5);
        assert_eq!(col.tracker.deliveries(Role::Exploiter), 1);
    }

    #[test]
    fn sated_ant_does_not_eat() {
        let params = ColonyParams {
            refuel_threshold: 100,
            ..ColonyParams::default()
        };
        let mut col = Colony::new(ColonyKind::PureExplorer, params, 0, 500);
        let mut ant = Ant::new(0, Role::Explorer, GridCoord::new(0, 0), 300, 3000);
        assert_eq!(col.worker_arrival(&mut ant, false, 1), ArrivalOutcome::NotHungry);
        assert_eq!(ant.energy, 300);
        assert_eq!(col.worker_arrival(&mut ant, true, 1), ArrivalOutcome::NotHungry);
        assert_eq!(col.store, 1);
    }

    #[test]
    fn efficiency_examples() {
        let mut t = SuccessTracker::new(500);
        for r in 1..=500 {
            t.record_headcount(r, counts(5, 0));
        }
        for r in 0..10 {
            t.record_delivery(100 + r, Role::Explorer);
        }
        t.evict(500);
        assert_eq!(t.efficiency(Role::Explorer), 2.0);
        assert_eq!(t.efficiency(Role::Exploiter), 0.0);

        let mut t = SuccessTracker::new(500);
        for r in 1..=500 {
            t.record_headcount(r, counts(if r <= 250 { 4 } else { 6 }, 1));
        }
        for r in 0..10 {
            t.record_delivery(400 + r, Role::Explorer);
        }
        t.evict(500);
        // brute force mean over the recorded window
        let mean: f64 = (1..=500).map(|r| if r <= 250 { 4.0 } else { 6.0 }).sum::<f64>() / 500.0;
        assert_eq!(mean, 5.0);
        assert_eq!(t.efficiency(Role::Explorer), 10.0 / mean);
        assert_eq!(t.efficiency(Role::Exploiter), 0.0);
    }

    #[test]
    fn eviction_keeps_last_window() {
        let mut t = SuccessTracker::new(500);
        for r in 1..=1000 {
            t.record_headcount(r, counts(1, 1));
            t.record_delivery(r, Role::Exploiter);
        }
        t.evict(1000);
        assert_eq!(t.oldest_round(), Some(501));
        assert_eq!(t.deliveries(Role::Exploiter), 500);
    }

    #[test]
    fn probability_examples() {
        assert_eq!(explorer_probability(2.0, 2.0), 0.5);
        assert!((explorer_probability(0.02, 0.01) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(explorer_probability(0.0, 0.0), 0.5);
        assert_eq!(explorer_probability(0.0, 3.0), 0.0);
    }

    #[test]
    fn guard_forces_missing_role() {
        let mut rng = rng();
        for _ in 0..100 {
            assert_eq!(choose_role(100.0, 0.0, counts(5, 0), &mut rng), Role::Exploiter);
            assert_eq!(choose_role(0.0, 100.0, counts(0, 5), &mut rng), Role::Explorer);
        }
    }

    #[test]
    fn proportional_draw_frequency() {
        let mut rng = rng();
        let n = 30_000;
        let hits = (0..n)
            .filter(|_| choose_role(0.02, 0.01, counts(3, 3), &mut rng) == Role::Explorer)
            .count();
        let p = hits as f64 / n as f64;
        assert!((p - 2.0 / 3.0).abs() < 0.015, "p = {p}");
    }

    #[test]
    fn age_switching_rules() {
        let mut col = colony(ColonyKind::Age, 0);
        for r in 1..=10 {
            col.tracker.record_headcount(r, counts(5, 5));
        }
        for r in 1..=3 {
            col.tracker.record_delivery(r, Role::Exploiter);
        }
        let mut rng = rng();
        let mut ant = Ant::new(0, Role::Explorer, GridCoord::new(0, 0), 450, 3000);
        ant.trips_completed = 1;
        assert_eq!(col.maybe_switch_role(&mut ant, 10, counts(5, 5), &mut rng), None);
        ant.trips_completed = 2;
        assert_eq!(
            col.maybe_switch_role(&mut ant, 10, counts(5, 5), &mut rng),
            Some(Role::Exploiter)
        );
        // sole explorer stays put
        let mut sole = Ant::new(1, Role::Explorer, GridCoord::new(0, 0), 450, 3000);
        sole.trips_completed = 5;
        for _ in 0..50 {
            assert_eq!(col.maybe_switch_role(&mut sole, 10, counts(0, 9), &mut rng), None);
        }
        // non-age colonies never switch
        let mut caste = colony(ColonyKind::Caste, 0);
        assert_eq!(caste.maybe_switch_role(&mut ant, 10, counts(5, 5), &mut rng), None);
    }
}
