//! The five food-drop environments.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::food::DropSource;
use super::geometry::{GridCoord, Torus};
use crate::error::ParseKindError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EnvironmentKind {
    Uniform,
    Patch,
    RoamingPatch,
    Seasonal,
    Mixed,
}

impl EnvironmentKind {
    pub const ALL: [EnvironmentKind; 5] = [
        EnvironmentKind::Uniform,
        EnvironmentKind::Patch,
        EnvironmentKind::RoamingPatch,
        EnvironmentKind::Seasonal,
        EnvironmentKind::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnvironmentKind::Uniform => "uniform",
            EnvironmentKind::Patch => "patch",
            EnvironmentKind::RoamingPatch => "roaming",
            EnvironmentKind::Seasonal => "seasonal",
            EnvironmentKind::Mixed => "mixed",
        }
    }

    pub fn has_patch(self) -> bool {
        !matches!(self, EnvironmentKind::Uniform)
    }
}

impl fmt::Display for EnvironmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvironmentKind {
    type Err = ParseKindError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(EnvironmentKind::Uniform),
            "patch" => Ok(EnvironmentKind::Patch),
            "roaming" | "roaming_patch" | "roaming-patch" => Ok(EnvironmentKind::RoamingPatch),
            "seasonal" => Ok(EnvironmentKind::Seasonal),
            "mixed" => Ok(EnvironmentKind::Mixed),
            other => Err(ParseKindError {
                what: "environment",
                value: other.to_string(),
                expected: "uniform, patch, roaming, seasonal, mixed",
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentParams {
    pub kind: EnvironmentKind,
    pub drop_interval: u64,
    pub season_length: u64,
    pub patch_distance: u32,
    pub patch_radius: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvironmentState {
    pub params: EnvironmentParams,
    pub patch_center: Option<GridCoord>,
    pub next_drop_round: u64,
    pub drops_made: u64,
    /// Only meaningful for the seasonal kind.
    pub patch_season: bool,
    pub relocations: u64,
    disc: Vec<(i64, i64)>,
}

impl EnvironmentState {
    pub fn new<R: Rng + ?Sized>(params: EnvironmentParams, torus: &Torus, nest: GridCoord, rng: &mut R) -> Self {
        let r = params.patch_radius as i64;
        let disc = (-r..=r)
            .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
            .filter(|(dx, dy)| dx * dx + dy * dy <= r * r)
            .collect();
        let mut env = Self {
            params,
            patch_center: None,
            next_drop_round: params.drop_interval,
            drops_made: 0,
            patch_season: false,
            relocations: 0,
            disc,
        };
        if params.kind.has_patch() {
            env.patch_center = Some(env.sample_center(torus, nest, rng));
        }
        env
    }

    pub fn kind(&self) -> EnvironmentKind {
        self.params.kind
    }

    /// Emits the round's food drop, if `round` is a drop round.
    pub fn drop_food<R: Rng + ?Sized>(
        &mut self,
        torus: &Torus,
        nest: GridCoord,
        round: u64,
        rng: &mut R,
    ) -> Option<(GridCoord, DropSource)> {
        if round < self.next_drop_round {
            return None;
        }
        self.next_drop_round += self.params.drop_interval;
        self.drops_made += 1;
        let source = match self.params.kind {
            EnvironmentKind::Uniform => DropSource::Uniform,
            EnvironmentKind::Patch | EnvironmentKind::RoamingPatch => DropSource::Patch,
            EnvironmentKind::Seasonal if self.patch_season => DropSource::Patch,
            EnvironmentKind::Seasonal => DropSource::Uniform,
            // odd-numbered drops uniform, even-numbered drops in the patch
            EnvironmentKind::Mixed if self.drops_made % 2 == 1 => DropSource::Uniform,
            EnvironmentKind::Mixed => DropSource::Patch,
        };
        let pos = match source {
            DropSource::Uniform => uniform_cell(torus, nest, rng),
            DropSource::Patch => self.patch_cell(torus, rng),
        };
        Some((pos, source))
    }

    /// Season flips and patch relocations due at the end of `round`.
    /// Returns the new patch centre when a relocation happened.
    pub fn advance<R: Rng + ?Sized>(
        &mut self,
        torus: &Torus,
        nest: GridCoord,
        round: u64,
        rng: &mut R,
    ) -> Option<GridCoord> {
        if round == 0 || !round.is_multiple_of(self.params.season_length) {
            return None;
        }
        match self.params.kind {
            EnvironmentKind::RoamingPatch => Some(self.relocate_patch(torus, nest, rng)),
            EnvironmentKind::Seasonal => {
                self.patch_season = !self.patch_season;
                if self.patch_season {
                    Some(self.relocate_patch(torus, nest, rng))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Moves the patch to a uniformly random direction at the configured
    /// distance. Existing food stays where it is.
    pub fn relocate_patch<R: Rng + ?Sized>(&mut self, torus: &Torus, nest: GridCoord, rng: &mut R) -> GridCoord {
        let center = self.sample_center(torus, nest, rng);
        self.patch_center = Some(center);
        self.relocations += 1;
        center
    }

    fn sample_center<R: Rng + ?Sized>(&self, torus: &Torus, nest: GridCoord, rng: &mut R) -> GridCoord {
        let angle = rng.gen::<f64>() * TAU;
        let d = self.params.patch_distance as f64;
        torus.wrap(
            nest.x as i64 + (d * angle.cos()).round() as i64,
            nest.y as i64 + (d * angle.sin()).round() as i64,
        )
    }

    fn patch_cell<R: Rng + ?Sized>(&self, torus: &Torus, rng: &mut R) -> GridCoord {
        let center = self.patch_center.expect("patch environment without a patch centre");
        let (dx, dy) = self.disc[rng.gen_range(0..self.disc.len())];
        torus.wrap(center.x as i64 + dx, center.y as i64 + dy)
    }

    /// Whether the active distribution for the next drop is the patch.
    pub fn patch_active(&self) -> bool {
        match self.params.kind {
            EnvironmentKind::Uniform => false,
            EnvironmentKind::Seasonal => self.patch_season,
            _ => true,
        }
    }
}

fn uniform_cell<R: Rng + ?Sized>(torus: &Torus, nest: GridCoord, rng: &mut R) -> GridCoord {
    loop {
        let p = GridCoord::new(rng.gen_range(0..torus.width), rng.gen_range(0..torus.height));
        if p != nest {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(kind: EnvironmentKind) -> EnvironmentParams {
        EnvironmentParams {
            kind,
            drop_interval: 5,
            season_length: 1000,
            patch_distance: 30,
            patch_radius: 4,
        }
    }

    fn setup(kind: EnvironmentKind) -> (Torus, GridCoord, ChaCha8Rng, EnvironmentState) {
        let t = Torus::new(101, 101);
        let nest = GridCoord::new(50, 50);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let env = EnvironmentState::new(params(kind), &t, nest, &mut rng);
        (t, nest, rng, env)
    }

    #[test]
    fn drop_schedule_counts() {
        for kind in EnvironmentKind::ALL {
            let (t, nest, mut rng, mut env) = setup(kind);
            let mut by_116 = 0;
            let mut total = 0;
            for round in 1..=1000 {
                if env.drop_food(&t, nest, round, &mut rng).is_some() {
                    total += 1;
                    if round <= 116 {
                        by_116 += 1;
                    }
                }
                env.advance(&t, nest, round, &mut rng);
            }
            assert_eq!(total, 200, "{kind}");
            assert_eq!(by_116, 23, "{kind}");
        }
    }

    #[test]
    fn mixed_alternates_mechanisms() {
        let (t, nest, mut rng, mut env) = setup(EnvironmentKind::Mixed);
        let (mut uniform, mut patch) = (0, 0);
        for round in 1..=1000 {
            match env.drop_food(&t, nest, round, &mut rng) {
                Some((_, DropSource::Uniform)) => uniform += 1,
                Some((_, DropSource::Patch)) => patch += 1,
                None => {}
            }
        }
        assert_eq!((uniform, patch), (100, 100));
    }

    #[test]
    fn relocated_centres_stay_in_distance_band() {
        let (t, nest, mut rng, mut env) = setup(EnvironmentKind::RoamingPatch);
        for _ in 0..1000 {
            let c = env.relocate_patch(&t, nest, &mut rng);
            let d = t.distance(c, nest);
            assert!((29.0..=31.0).contains(&d), "centre {c} at {d}");
        }
    }

    #[test]
    fn roaming_relocates_every_season() {
        let (t, nest, mut rng, mut env) = setup(EnvironmentKind::RoamingPatch);
        let mut at = Vec::new();
        for round in 1..=3000 {
            if env.advance(&t, nest, round, &mut rng).is_some() {
                at.push(round);
            }
        }
        assert_eq!(at, vec![1000, 2000, 3000]);
    }

    #[test]
    fn seasonal_starts_uniform_and_relocates_on_patch_seasons() {
        let (t, nest, mut rng, mut env) = setup(EnvironmentKind::Seasonal);
        let mut sources = Vec::new();
        let mut relocations = Vec::new();
        for round in 1..=4000 {
            if let Some((_, s)) = env.drop_food(&t, nest, round, &mut rng) {
                sources.push((round, s));
            }
            if env.advance(&t, nest, round, &mut rng).is_some() {
                relocations.push(round);
            }
        }
        for (round, s) in sources {
            let season = (round - 1) / 1000;
            let expected = if season % 2 == 0 {
                DropSource::Uniform
            } else {
                DropSource::Patch
            };
            assert_eq!(s, expected, "round {round}");
        }
        assert_eq!(relocations, vec![1000, 3000]);
    }

    #[test]
    fn patch_drops_land_in_disc() {
        let (t, nest, mut rng, mut env) = setup(EnvironmentKind::Patch);
        let c = env.patch_center.unwrap();
        for round in 1..=5000 {
            if let Some((p, _)) = env.drop_food(&t, nest, round, &mut rng) {
                assert!(t.distance(p, c) <= 4.0);
            }
        }
    }

    #[test]
    fn uniform_never_drops_on_nest() {
        let t = Torus::new(3, 1);
        let nest = GridCoord::new(1, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..500 {
            assert_ne!(uniform_cell(&t, nest, &mut rng), nest);
        }
    }
}
