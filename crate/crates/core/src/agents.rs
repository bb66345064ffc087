//! Per-ant foraging state machines.
//!
//! Explorers leave the nest laying seeker marks, keep away from every marked
//! cell, and walk back along their own breadcrumb. Exploiters climb the
//! carrier field outwards from the nest; when there is no trail near the
//! nest they go out the way an explorer would.
//!
//! Every ant that picks up a morsel with at least one more morsel in the
//! surrounding 3x3 block paints carrier trail on each cell of its way home.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ParseKindError;
use crate::world::Direction;
use crate::world::{AntId, GridCoord, World};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Explorer,
    Exploiter,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Explorer => "explorer",
            Role::Exploiter => "exploiter",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Role {
    type Err = ParseKindError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "explorer" | "solo" => Ok(Role::Explorer),
            "exploiter" | "coop" => Ok(Role::Exploiter),
            other => Err(ParseKindError {
                what: "role",
                value: other.to_string(),
                expected: "explorer, exploiter",
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AntState {
    AtNest,
    Outbound,
    LocalSearch,
    ReturningWithFood,
    ReturningEmpty,
    FollowingCarrier,
}

impl AntState {
    pub fn is_returning(self) -> bool {
        matches!(self, AntState::ReturningWithFood | AntState::ReturningEmpty)
    }

    pub fn can_transition_to(self, next: AntState) -> bool {
        use AntState::*;
        if self == next {
            return true;
        }
        match self {
            AtNest => matches!(next, Outbound | FollowingCarrier),
            Outbound => matches!(next, LocalSearch | ReturningWithFood | ReturningEmpty),
            LocalSearch => matches!(next, ReturningWithFood | ReturningEmpty),
            FollowingCarrier => matches!(next, ReturningWithFood | LocalSearch | ReturningEmpty),
            ReturningWithFood | ReturningEmpty => next == AtNest,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentParams {
    pub energy_max: u32,
    pub safety_margin: u32,
    pub local_search_budget: u32,
    /// Chebyshev radius around the nest an exploiter checks for trail.
    pub dispatch_radius: u32,
    /// 1: searching ants step onto food in an adjacent cell; 0: they only
    /// find food by standing on it.
    pub sense_radius: u32,
    /// Longest outbound leg in steps; 0 leaves only the energy limit.
    pub explore_range: u32,
}

impl Default for AgentParams {
    fn default() -> Self {
        Self {
            energy_max: 450,
            safety_margin: 10,
            local_search_budget: 20,
            dispatch_radius: 2,
            sense_radius: 1,
            explore_range: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ant {
    pub id: AntId,
    pub role: Role,
    pub state: AntState,
    pub pos: GridCoord,
    /// Rounds of sustenance left.
    pub energy: u32,
    pub age: u32,
    pub max_age: u32,
    /// Cells to walk back through, nest first.
    pub breadcrumb: Vec<GridCoord>,
    pub carrying: bool,
    /// Set at pickup when the source had more food; paints the way home.
    pub marks_carrier: bool,
    pub trips_completed: u32,
    /// Direction of the last step taken.
    pub heading: Option<Direction>,
    /// Bearing in radians of the current outbound leg, drawn on departure.
    pub bearing: Option<f64>,
    /// Unwrapped displacement from the nest.
    pub offset: (i64, i64),
    pub search_left: u32,
}

impl Ant {
    pub fn new(id: AntId, role: Role, nest: GridCoord, energy: u32, max_age: u32) -> Self {
        Self {
            id,
            role,
            state: AntState::AtNest,
            pos: nest,
            energy,
            age: 0,
            max_age,
            breadcrumb: Vec::new(),
            carrying: false,
            marks_carrier: false,
            trips_completed: 0,
            heading: None,
            bearing: None,
            offset: (0, 0),
            search_left: 0,
        }
    }

    pub fn at_nest(&self) -> bool {
        self.state == AntState::AtNest
    }
}

/// What a single step did that the colony needs to know about.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepReport {
    pub picked_up: bool,
    /// `Some(carrying)` when the ant walked into the nest this step.
    pub arrived: Option<bool>,
}

/// Advances one ant by one round. World mutations (pickups, marks, trail)
/// are applied immediately so later ants in the same round see them.
pub fn step_ant<R: Rng + ?Sized>(
    ant: &mut Ant,
    world: &mut World,
    params: &AgentParams,
    round: u64,
    rng: &mut R,
) -> StepReport {
    let mut report = StepReport::default();
    ant.energy = ant.energy.saturating_sub(1);

    if ant.state == AntState::AtNest {
        ant.heading = None;
        ant.bearing = None;
        ant.state = match ant.role {
            Role::Explorer => AntState::Outbound,
            Role::Exploiter => exploiter_dispatch(world, params),
        };
    }

    if ant.state.is_returning() {
        backtrack_step(ant, world, &mut report);
        return report;
    }

    if must_turn_back(ant, params) {
        ant.state = AntState::ReturningEmpty;
        backtrack_step(ant, world, &mut report);
        return report;
    }

    if params.sense_radius > 0 && ant.state != AntState::LocalSearch {
        if world.food.count_at(&world.torus, ant.pos) > 0 {
            report.picked_up = sense_and_pickup(ant, world);
            return report;
        }
        if let Some(next) = adjacent_food(ant.pos, world, rng) {
            advance(ant, world, next, round, ant.state == AntState::Outbound);
            report.picked_up = sense_and_pickup(ant, world);
            return report;
        }
    }

    match ant.state {
        AntState::Outbound => {
            if ant.bearing.is_none() {
                ant.bearing = Some(rng.gen_range(0.0..std::f64::consts::TAU));
            }
            let next = choose_outbound_move(ant, world, rng);
            advance(ant, world, next, round, true);
        }
        AntState::FollowingCarrier => match follow_carrier_target(ant, world, rng) {
            Some(next) => advance(ant, world, next, round, false),
            None => {
                ant.state = AntState::LocalSearch;
                ant.search_left = params.local_search_budget;
                if !local_search_step(ant, world, round, rng) {
                    ant.state = AntState::ReturningEmpty;
                    backtrack_step(ant, world, &mut report);
                    return report;
                }
            }
        },
        AntState::LocalSearch => {
            if !local_search_step(ant, world, round, rng) {
                ant.state = AntState::ReturningEmpty;
                backtrack_step(ant, world, &mut report);
                return report;
            }
        }
        AntState::AtNest | AntState::ReturningWithFood | AntState::ReturningEmpty => unreachable!(),
    }

    report.picked_up = sense_and_pickup(ant, world);
    report
}

/// The return leg must stay payable: turn back once the path home plus the
/// safety margin uses up the remaining energy, or once an outbound leg
/// reaches the exploration range.
fn must_turn_back(ant: &Ant, params: &AgentParams) -> bool {
    let steps = ant.breadcrumb.len() as u32;
    steps > 0
        && (steps + params.safety_margin >= ant.energy
            || (ant.state == AntState::Outbound && params.explore_range > 0 && steps >= params.explore_range))
}

fn advance(ant: &mut Ant, world: &mut World, next: GridCoord, round: u64, lay_seeker: bool) {
    if lay_seeker {
        let seq = ant.breadcrumb.len() as u32;
        world
            .deposit_seeker(ant.id, ant.pos, seq, round)
            .expect("outbound ant laid a non-contiguous seeker trail");
    }
    ant.heading = world.torus.direction_between(ant.pos, next);
    let (dx, dy) = world.torus.delta(ant.pos, next);
    ant.offset = (ant.offset.0 + dx, ant.offset.1 + dy);
    ant.breadcrumb.push(ant.pos);
    ant.pos = next;
    if !lay_seeker {
        erase_loops(ant, world);
    }
}

/// Cuts the path memory back to the earliest remembered cell the ant is on
/// or next to. Cells carrying the ant's own seeker marks are kept.
fn erase_loops(ant: &mut Ant, world: &World) {
    let t = &world.torus;
    let lo = world.seeker.marks_of(ant.id).len();
    for j in lo..ant.breadcrumb.len() {
        let c = ant.breadcrumb[j];
        if c == ant.pos {
            ant.breadcrumb.truncate(j);
            return;
        }
        if t.are_adjacent(c, ant.pos) {
            ant.breadcrumb.truncate(j + 1);
            return;
        }
    }
}

/// Angle between the bearing of an unwrapped offset and `bearing`, in [0, pi].
pub fn bearing_deviation(offset: (i64, i64), bearing: f64) -> f64 {
    let angle = (offset.1 as f64).atan2(offset.0 as f64);
    let d = (angle - bearing).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

/// Picks the outbound neighbour by lexicographic preference: unmarked, then
/// farther from the nest, then closest to the ray from the nest along the
/// ant's bearing. Remaining ties are broken uniformly.
pub fn choose_outbound_move<R: Rng + ?Sized>(ant: &Ant, world: &World, rng: &mut R) -> GridCoord {
    let t = &world.torus;
    let here = world.nest_distance_sq(ant.pos);
    let mut best_key = (u8::MAX, u8::MAX, u64::MAX);
    let mut ties: [GridCoord; 8] = [ant.pos; 8];
    let mut n_ties = 0;
    for dir in Direction::ALL {
        let cell = t.step(ant.pos, dir);
        if cell == world.nest {
            continue;
        }
        let marked = world.seeker.is_marked(t, cell) as u8;
        let closer = (world.nest_distance_sq(cell) <= here) as u8;
        let (dx, dy) = dir.offset();
        let turn = ant.bearing.map_or(0, |b| {
            (bearing_deviation((ant.offset.0 + dx, ant.offset.1 + dy), b) * 1e9) as u64
        });
        let key = (marked, closer, turn);
        if key < best_key {
            best_key = key;
            n_ties = 0;
        }
        if key == best_key {
            ties[n_ties] = cell;
            n_ties += 1;
        }
    }
    pick(&ties[..n_ties], rng)
}

fn pick<R: Rng + ?Sized>(cells: &[GridCoord], rng: &mut R) -> GridCoord {
    if cells.len() == 1 {
        cells[0]
    } else {
        cells[rng.gen_range(0..cells.len())]
    }
}

/// Takes the food on the ant's cell, if any. Returns whether it picked up.
pub fn sense_and_pickup(ant: &mut Ant, world: &mut World) -> bool {
    if ant.carrying || world.food.take(&world.torus, ant.pos).is_none() {
        return false;
    }
    ant.carrying = true;
    ant.marks_carrier = should_mark_carrier(ant.pos, world);
    ant.state = AntState::ReturningWithFood;
    true
}

/// True when, after the pickup, more food remains in the 3x3 block around
/// the pickup cell.
pub fn should_mark_carrier(pickup: GridCoord, world: &World) -> bool {
    world.food.count_in_neighborhood(&world.torus, pickup) > 0
}

/// Walks one cell back along the breadcrumb; on reaching the nest clears the
/// ant's seeker marks and closes the trip.
pub fn backtrack_step(ant: &mut Ant, world: &mut World, report: &mut StepReport) {
    let prev = ant
        .breadcrumb
        .pop()
        .expect("returning ant outside the nest has no breadcrumb");
    if ant.marks_carrier {
        world.carrier.mark(&world.torus, ant.pos);
    }
    ant.heading = world.torus.direction_between(ant.pos, prev);
    let (dx, dy) = world.torus.delta(ant.pos, prev);
    ant.offset = (ant.offset.0 + dx, ant.offset.1 + dy);
    ant.pos = prev;
    if ant.breadcrumb.is_empty() {
        debug_assert_eq!(ant.pos, world.nest);
        world.seeker.clear_owner(&world.torus, ant.id);
        ant.trips_completed += 1;
        ant.state = AntState::AtNest;
        report.arrived = Some(ant.carrying);
        ant.carrying = false;
        ant.marks_carrier = false;
    }
}

/// Strongest positive-trail neighbour strictly farther from the nest.
pub fn follow_carrier_target<R: Rng + ?Sized>(ant: &Ant, world: &World, rng: &mut R) -> Option<GridCoord> {
    let t = &world.torus;
    let here = world.nest_distance_sq(ant.pos);
    let mut best = 0.0;
    let mut ties: [GridCoord; 8] = [ant.pos; 8];
    let mut n_ties = 0;
    for cell in t.neighbors(ant.pos) {
        if world.nest_distance_sq(cell) <= here {
            continue;
        }
        let v = world.carrier.at(t, cell);
        if v <= 0.0 || v < best {
            continue;
        }
        if v > best {
            best = v;
            n_ties = 0;
        }
        ties[n_ties] = cell;
        n_ties += 1;
    }
    (n_ties > 0).then(|| pick(&ties[..n_ties], rng))
}

/// A random neighbouring cell holding food, never the nest.
fn adjacent_food<R: Rng + ?Sized>(pos: GridCoord, world: &World, rng: &mut R) -> Option<GridCoord> {
    let t = &world.torus;
    let mut food: [GridCoord; 8] = [pos; 8];
    let mut n = 0;
    for cell in t.neighbors(pos) {
        if cell != world.nest && world.food.count_at(t, cell) > 0 {
            food[n] = cell;
            n += 1;
        }
    }
    (n > 0).then(|| pick(&food[..n], rng))
}

/// One step of the bounded random walk. Steps onto visible food in the
/// neighbourhood when there is some. Returns false once the budget is spent.
fn local_search_step<R: Rng + ?Sized>(ant: &mut Ant, world: &mut World, round: u64, rng: &mut R) -> bool {
    if ant.search_left == 0 {
        return false;
    }
    ant.search_left -= 1;
    let t = world.torus;
    let mut food: [GridCoord; 8] = [ant.pos; 8];
    let mut n_food = 0;
    let mut open: [GridCoord; 8] = [ant.pos; 8];
    let mut n_open = 0;
    for cell in t.neighbors(ant.pos) {
        if cell == world.nest {
            continue;
        }
        open[n_open] = cell;
        n_open += 1;
        if world.food.count_at(&t, cell) > 0 {
            food[n_food] = cell;
            n_food += 1;
        }
    }
    let next = if n_food > 0 {
        pick(&food[..n_food], rng)
    } else {
        pick(&open[..n_open], rng)
    };
    advance(ant, world, next, round, false);
    true
}

/// Where an exploiter sitting in the nest heads next.
pub fn exploiter_dispatch(world: &World, params: &AgentParams) -> AntState {
    let r = params.dispatch_radius as i64;
    let t = &world.torus;
    let trail_near_nest = (-r..=r).any(|dy| {
        (-r..=r).any(|dx| {
            let p = t.wrap(world.nest.x as i64 + dx, world.nest.y as i64 + dy);
            world.carrier.at(t, p) > 0.0
        })
    });
    if trail_near_nest {
        AntState::FollowingCarrier
    } else {
        AntState::Outbound
    }
}
