//! The toroidal foraging world: geometry, food, trails and environment.

mod environment;
mod food;
mod geometry;
mod trails;

pub use environment::{EnvironmentKind, EnvironmentParams, EnvironmentState};
pub use food::{DropSource, FoodItem, FoodLayer};
pub use geometry::{toroidal_distance, wrap, Direction, GridCoord, Torus};
pub use trails::{AntId, CarrierField, CarrierParams, SeekerMark, SeekerMarks};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::WorldError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct World {
    pub torus: Torus,
    pub nest: GridCoord,
    pub food: FoodLayer,
    pub seeker: SeekerMarks,
    pub carrier: CarrierField,
    pub env: EnvironmentState,
    // squared distance of every cell from the nest
    nest_dist_sq: Vec<u32>,
}

impl World {
    pub fn new<R: Rng + ?Sized>(
        torus: Torus,
        nest: GridCoord,
        food_lifetime: u64,
        carrier: CarrierParams,
        env: EnvironmentParams,
        rng: &mut R,
    ) -> Self {
        let nest_dist_sq = (0..torus.cells())
            .map(|i| torus.distance_sq(torus.coord(i), nest) as u32)
            .collect();
        Self {
            torus,
            nest,
            food: FoodLayer::new(&torus, food_lifetime),
            seeker: SeekerMarks::new(&torus),
            carrier: CarrierField::new(&torus, carrier),
            env: EnvironmentState::new(env, &torus, nest, rng),
            nest_dist_sq,
        }
    }

    #[inline]
    pub fn nest_distance_sq(&self, p: GridCoord) -> u32 {
        self.nest_dist_sq[self.torus.index(p)]
    }

    pub fn nest_distance(&self, p: GridCoord) -> f64 {
        (self.nest_distance_sq(p) as f64).sqrt()
    }

    pub fn drop_food<R: Rng + ?Sized>(&mut self, round: u64, rng: &mut R) -> Option<FoodItem> {
        let (pos, source) = self.env.drop_food(&self.torus, self.nest, round, rng)?;
        Some(self.food.place(&self.torus, pos, round, source))
    }

    pub fn expire_food(&mut self, round: u64) -> usize {
        self.food.expire(&self.torus, round)
    }

    pub fn advance_environment<R: Rng + ?Sized>(&mut self, round: u64, rng: &mut R) -> Option<GridCoord> {
        self.env.advance(&self.torus, self.nest, round, rng)
    }

    pub fn deposit_seeker(&mut self, owner: AntId, pos: GridCoord, seq: u32, round: u64) -> Result<(), WorldError> {
        self.seeker.deposit(&self.torus, owner, pos, seq, round)
    }

    pub fn deposit_carrier(&mut self, pos: GridCoord, amount: f64) {
        self.carrier.deposit(&self.torus, pos, amount);
    }

    pub fn decay_carrier(&mut self) {
        self.carrier.decay();
    }

    /// Cells with positive carrier intensity that are 8-connected to a cell
    /// within one step of the nest. Returns the size of that component.
    pub fn nest_trail_component(&self) -> usize {
        let t = &self.torus;
        let positive = |p: GridCoord| self.carrier.at(t, p) > 0.0;
        let mut seen = vec![false; t.cells()];
        let mut stack: Vec<GridCoord> = std::iter::once(self.nest)
            .chain(t.neighbors(self.nest))
            .filter(|&p| positive(p))
            .collect();
        for &p in &stack {
            seen[t.index(p)] = true;
        }
        let mut size = 0;
        while let Some(p) = stack.pop() {
            size += 1;
            for n in t.neighbors(p) {
                let idx = t.index(n);
                if !seen[idx] && positive(n) {
                    seen[idx] = true;
                    stack.push(n);
                }
            }
        }
        size
    }
}
