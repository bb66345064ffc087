//! Round-by-round consistency checks over a running simulation.
//!
//! [`InvariantChecker::check`] compares the state after a round with the
//! state after the previous one and with the round's event counts.

use std::collections::BTreeMap;

use super::SimState;
use crate::agents::{AntState, Role};
use crate::colony::{ColonyKind, RoleCounts};
use crate::metrics::RoundRecord;
use crate::world::{AntId, DropSource};

#[derive(Debug, Clone, PartialEq)]
struct AntView {
    state: AntState,
    energy: u32,
    age: u32,
    max_age: u32,
    trips: u32,
    path_len: usize,
}

#[derive(Debug, Clone)]
struct View {
    round: u64,
    store: u64,
    food: u64,
    ants: BTreeMap<AntId, AntView>,
    /// Workers plus destined larvae, by role.
    caste_counts: RoleCounts,
}

impl View {
    fn of(s: &SimState) -> Self {
        let mut caste_counts = s.colony.destined_counts();
        for a in &s.ants {
            caste_counts.add(a.role);
        }
        Self {
            round: s.round,
            store: s.colony.store,
            food: s.world.food.len() as u64,
            ants: s
                .ants
                .iter()
                .map(|a| {
                    (
                        a.id,
                        AntView {
                            state: a.state,
                            energy: a.energy,
                            age: a.age,
                            max_age: a.max_age,
                            trips: a.trips_completed,
                            path_len: a.breadcrumb.len(),
                        },
                    )
                })
                .collect(),
            caste_counts,
        }
    }
}

/// Stateful checker; feed it every round in order, starting from round 0.
#[derive(Debug, Clone)]
pub struct InvariantChecker {
    prev: View,
    last_relocation: u64,
}

impl InvariantChecker {
    /// Starts from the given state, usually the one returned by
    /// [`super::init_sim`].
    pub fn new(state: &SimState) -> Self {
        Self {
            prev: View::of(state),
            last_relocation: 0,
        }
    }

    /// Checks the state reached by the latest `step_round` call, which
    /// produced `record`. Returns every violated property.
    pub fn check(&mut self, s: &SimState, record: &RoundRecord) -> Result<(), Vec<String>> {
        let mut errs = Vec::new();
        let ev = s.last_events;
        let prev = &self.prev;
        let cfg = &s.config;
        let round = s.round;
        let mut fail = |msg: String| errs.push(format!("round {round}: {msg}"));

        if round != prev.round + 1 {
            fail(format!("expected round {}, state is at {round}", prev.round + 1));
        }

        // food
        let food = s.world.food.len() as u64;
        if food + ev.pickups + ev.expiries != prev.food + ev.drops {
            fail(format!(
                "food not conserved: {} + {} drops - {} pickups - {} expiries != {food}",
                prev.food, ev.drops, ev.pickups, ev.expiries
            ));
        }
        let expect_drop = round.is_multiple_of(cfg.drop_interval) as u64;
        if ev.drops != expect_drop {
            fail(format!("{} drops, expected {expect_drop}", ev.drops));
        }
        if ev.drops == 1 && s.world.env.drops_made != round / cfg.drop_interval {
            fail(format!("{} drops made by round {round}", s.world.env.drops_made));
        }
        if ev.relocated {
            self.last_relocation = round;
        }
        if let Some(center) = s.world.env.patch_center {
            let r2 = (cfg.patch_radius as u64).pow(2);
            for item in s.world.food.iter() {
                if item.source == DropSource::Patch
                    && item.dropped_at > self.last_relocation
                    && s.world.torus.distance_sq(item.pos, center) > r2
                {
                    fail(format!(
                        "patch item {} at {} outside the current patch",
                        item.id, item.pos
                    ));
                }
            }
        }
        if s.world.food.iter().any(|i| i.expires_at <= round) {
            fail("expired food still on the grid".into());
        }

        // store ledger
        let store = s.colony.store;
        let credit = prev.store + ev.deliveries;
        let debit = ev.larvae_created + ev.larvae_matured + ev.workers_fed;
        if credit < debit || credit - debit != store {
            fail(format!(
                "store ledger: {} + {} delivered - {} laid - {} matured - {} fed != {store}",
                prev.store, ev.deliveries, ev.larvae_created, ev.larvae_matured, ev.workers_fed
            ));
        }

        // record
        let counts = RoleCounts::of(&s.ants);
        let expected = RoundRecord {
            round,
            worker_population: s.ants.len() as u64,
            explorer_count: counts.explorers as u64,
            exploiter_count: counts.exploiters as u64,
            larvae_count: s.colony.larvae.len() as u64,
            store,
            explorer_deliveries: record.explorer_deliveries,
            exploiter_deliveries: record.exploiter_deliveries,
            food_in_world: food,
            colony_alive: !(s.ants.is_empty() && store == 0),
        };
        if *record != expected {
            fail(format!("record {record:?} does not describe the state {expected:?}"));
        }
        if record.explorer_deliveries + record.exploiter_deliveries != ev.deliveries {
            fail("per-role deliveries do not add up".into());
        }
        match s.colony.kind {
            ColonyKind::PureExplorer if counts.exploiters > 0 => fail("exploiter in an explorer colony".into()),
            ColonyKind::PureExploiter if counts.explorers > 0 => fail("explorer in an exploiter colony".into()),
            _ => {}
        }

        // caste: a role missing before the queen acted is the one she laid
        if s.colony.kind == ColonyKind::Caste && ev.larvae_created == 1 {
            let newest = s.colony.larvae.back().and_then(|l| l.destined_role);
            for role in [Role::Explorer, Role::Exploiter] {
                let other = match role {
                    Role::Explorer => Role::Exploiter,
                    Role::Exploiter => Role::Explorer,
                };
                if prev.caste_counts.get(role) == 0 && prev.caste_counts.get(other) > 0 && newest != Some(role) {
                    fail(format!("no {role} left but the new larva is {newest:?}"));
                }
            }
        }
        if s.colony.kind != ColonyKind::Caste && s.colony.larvae.iter().any(|l| l.destined_role.is_some()) {
            fail("only caste larvae carry a destined role".into());
        }

        // tracker window
        if let Some(oldest) = s.colony.tracker.oldest_round() {
            if oldest + s.colony.tracker.window() <= round {
                fail(format!("tracker still holds round {oldest}"));
            }
        }

        // ants
        let max_energy = cfg.energy_max;
        let mut removed = 0u64;
        let mut trips_closed = 0u64;
        for (id, before) in &prev.ants {
            let Some(a) = s.ants.iter().find(|a| a.id == *id) else {
                removed += 1;
                let aged = before.age + 1 >= before.max_age;
                if !aged && before.path_len != 1 {
                    fail(format!("ant {id} vanished {} steps from the nest", before.path_len));
                }
                continue;
            };
            if a.age != before.age + 1 {
                fail(format!("ant {id} aged {} -> {}", before.age, a.age));
            }
            let fed = a.energy == max_energy && a.at_nest();
            if !fed && a.energy != before.energy.saturating_sub(1) {
                fail(format!("ant {id} energy {} -> {}", before.energy, a.energy));
            }
            let closed = a.trips_completed - before.trips;
            if closed != a.at_nest() as u32 {
                fail(format!("ant {id} closed {closed} trips, at nest: {}", a.at_nest()));
            }
            trips_closed += closed as u64;
            if fed && before.energy > cfg.refuel_threshold + 1 {
                fail(format!("ant {id} ate with {} energy", before.energy));
            }
        }
        if removed != ev.starved + ev.aged_out {
            fail(format!(
                "{removed} ants removed, {} starved + {} aged out",
                ev.starved, ev.aged_out
            ));
        }
        // ants that arrive and die of age in the same round are already gone
        let finished = trips_closed + ev.aged_out;
        if ev.workers_fed > finished || ev.deliveries > finished + ev.starved {
            fail(format!(
                "{} fed and {} deliveries for at most {finished} finished trips",
                ev.workers_fed, ev.deliveries
            ));
        }
        let t = &s.world.torus;
        for a in &s.ants {
            if a.energy > max_energy {
                fail(format!("ant {} energy {} above {max_energy}", a.id, a.energy));
            }
            if a.energy == 0 && !a.at_nest() && !a.state.is_returning() {
                fail(format!("ant {} out of energy but {:?}", a.id, a.state));
            }
            if a.age >= a.max_age {
                fail(format!("ant {} outlived its max age", a.id));
            }
            if a.carrying != (a.state == AntState::ReturningWithFood) {
                fail(format!("ant {} carrying {} in {:?}", a.id, a.carrying, a.state));
            }
            if a.at_nest() != (a.pos == s.world.nest && a.breadcrumb.is_empty()) {
                fail(format!(
                    "ant {} at {} with {} steps of path in {:?}",
                    a.id,
                    a.pos,
                    a.breadcrumb.len(),
                    a.state
                ));
            }
            if !a.at_nest() {
                if a.breadcrumb.first() != Some(&s.world.nest) {
                    fail(format!("ant {} path does not start at the nest", a.id));
                }
                let chain_ok = a.breadcrumb.windows(2).all(|w| t.are_adjacent(w[0], w[1]))
                    && a.breadcrumb.last().is_some_and(|&p| t.are_adjacent(p, a.pos));
                if !chain_ok {
                    fail(format!("ant {} path home is broken", a.id));
                }
            }
            let marks = s.world.seeker.marks_of(a.id);
            let chained = marks.first().is_none_or(|m| m.pos == s.world.nest)
                && marks.windows(2).all(|w| t.are_adjacent(w[0].pos, w[1].pos))
                && marks.iter().enumerate().all(|(k, m)| m.seq as usize == k);
            if !chained {
                fail(format!("ant {} seeker trail is not a chain from the nest", a.id));
            }
            if !a.state.is_returning() && !a.at_nest() {
                let prefix = marks.iter().zip(&a.breadcrumb).all(|(m, &p)| m.pos == p);
                if marks.len() > a.breadcrumb.len() || !prefix {
                    fail(format!("ant {} seeker trail strays from its path", a.id));
                }
            }
            if a.role == Role::Explorer && a.state == AntState::Outbound && marks.len() != a.breadcrumb.len() {
                fail(format!(
                    "outbound explorer {} has {} marks for {} steps",
                    a.id,
                    marks.len(),
                    a.breadcrumb.len()
                ));
            }
            if a.at_nest() && !marks.is_empty() {
                fail(format!("ant {} home with marks left", a.id));
            }
        }
        for owner in s.world.seeker.owners() {
            if !s.ants.iter().any(|a| a.id == owner) {
                fail(format!("seeker marks of dead ant {owner}"));
            }
        }

        // carrier field
        let cp = s.world.carrier.params();
        for &v in s.world.carrier.values() {
            if v != 0.0 && !(v >= cp.prune && v <= cp.cap) {
                fail(format!("carrier intensity {v} outside [{}, {}]", cp.prune, cp.cap));
                break;
            }
        }

        self.prev = View::of(s);
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

/// Runs `config.rounds` rounds from `seed`, checking every one. Stops at the
/// first round with violations.
pub fn run_checked(config: &super::SimConfig, seed: u64) -> Result<Vec<RoundRecord>, Vec<String>> {
    let mut s = super::init_sim(config, seed).map_err(|e| vec![e.to_string()])?;
    let mut checker = InvariantChecker::new(&s);
    let mut out = Vec::with_capacity(config.rounds as usize);
    for _ in 0..config.rounds {
        let r = s.step_round();
        checker.check(&s, &r)?;
        out.push(r);
    }
    Ok(out)
}
