//! Seeker breadcrumbs and the decaying carrier field.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::geometry::{GridCoord, Torus};
use crate::error::WorldError;

pub type AntId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeekerMark {
    pub pos: GridCoord,
    pub owner: AntId,
    pub seq: u32,
    pub placed_at: u64,
}

/// Owner-tagged seeker marks. Marks are not decayed; they disappear when
/// their owner finishes its return or dies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeekerMarks {
    per_cell: Vec<u16>,
    by_owner: BTreeMap<AntId, Vec<SeekerMark>>,
}

impl SeekerMarks {
    pub fn new(torus: &Torus) -> Self {
        Self {
            per_cell: vec![0; torus.cells()],
            by_owner: BTreeMap::new(),
        }
    }

    /// Records the next mark of `owner`. Sequence numbers must be contiguous
    /// from zero; anything else means the caller's state machine is broken.
    pub fn deposit(
        &mut self,
        torus: &Torus,
        owner: AntId,
        pos: GridCoord,
        seq: u32,
        round: u64,
    ) -> Result<(), WorldError> {
        let marks = self.by_owner.entry(owner).or_default();
        if seq as usize != marks.len() {
            return Err(WorldError::SeekerSequence {
                owner,
                expected: marks.len() as u32,
                got: seq,
            });
        }
        marks.push(SeekerMark {
            pos,
            owner,
            seq,
            placed_at: round,
        });
        let idx = torus.index(pos);
        self.per_cell[idx] = self.per_cell[idx].saturating_add(1);
        Ok(())
    }

    pub fn clear_owner(&mut self, torus: &Torus, owner: AntId) -> usize {
        let Some(marks) = self.by_owner.remove(&owner) else {
            return 0;
        };
        for m in &marks {
            let idx = torus.index(m.pos);
            self.per_cell[idx] -= 1;
        }
        marks.len()
    }

    #[inline]
    pub fn is_marked(&self, torus: &Torus, pos: GridCoord) -> bool {
        self.per_cell[torus.index(pos)] > 0
    }

    pub fn count_at(&self, torus: &Torus, pos: GridCoord) -> usize {
        self.per_cell[torus.index(pos)] as usize
    }

    pub fn marks_of(&self, owner: AntId) -> &[SeekerMark] {
        self.by_owner.get(&owner).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Every mark on `pos`, ordered by owner. Linear in the number of marks.
    pub fn marks_at(&self, pos: GridCoord) -> Vec<SeekerMark> {
        self.by_owner
            .values()
            .flatten()
            .filter(|m| m.pos == pos)
            .copied()
            .collect()
    }

    pub fn owners(&self) -> impl Iterator<Item = AntId> + '_ {
        self.by_owner.keys().copied()
    }

    pub fn total(&self) -> usize {
        self.by_owner.values().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarrierParams {
    pub deposit: f64,
    pub decay: f64,
    pub prune: f64,
    /// Saturation level; deposits never lift a cell above it.
    pub cap: f64,
}

impl Default for CarrierParams {
    fn default() -> Self {
        Self {
            deposit: 1.0,
            decay: 0.01,
            prune: 0.05,
            cap: 3.0,
        }
    }
}

/// Scalar carrier-trail intensity per cell with linear decay.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CarrierField {
    params: CarrierParams,
    intensity: Vec<f64>,
    // cells with nonzero intensity, in first-deposit order
    active: Vec<usize>,
}

impl CarrierField {
    pub fn new(torus: &Torus, params: CarrierParams) -> Self {
        Self {
            params,
            intensity: vec![0.0; torus.cells()],
            active: Vec::new(),
        }
    }

    pub fn params(&self) -> &CarrierParams {
        &self.params
    }

    pub fn deposit(&mut self, torus: &Torus, pos: GridCoord, amount: f64) {
        debug_assert!(amount > 0.0);
        let idx = torus.index(pos);
        if self.intensity[idx] == 0.0 {
            self.active.push(idx);
        }
        self.intensity[idx] = (self.intensity[idx] + amount).min(self.params.cap);
    }

    /// Deposits the configured per-cell amount.
    pub fn mark(&mut self, torus: &Torus, pos: GridCoord) {
        let amount = self.params.deposit;
        self.deposit(torus, pos, amount);
    }

    /// One round of linear decay, clamping at zero and pruning weak cells.
    pub fn decay(&mut self) {
        let CarrierParams { decay, prune, .. } = self.params;
        let intensity = &mut self.intensity;
        self.active.retain(|&idx| {
            let v = intensity[idx] - decay;
            if v < prune || v <= 0.0 {
                intensity[idx] = 0.0;
                false
            } else {
                intensity[idx] = v;
                true
            }
        });
    }

    #[inline]
    pub fn at(&self, torus: &Torus, pos: GridCoord) -> f64 {
        self.intensity[torus.index(pos)]
    }

    pub fn values(&self) -> &[f64] {
        &self.intensity
    }

    pub fn active_cells(&self) -> usize {
        self.active.len()
    }

    pub fn clear(&mut self) {
        for &idx in &self.active {
            self.intensity[idx] = 0.0;
        }
        self.active.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeker_sequence_must_be_contiguous() {
        let t = Torus::new(11, 11);
        let mut s = SeekerMarks::new(&t);
        s.deposit(&t, 1, GridCoord::new(5, 5), 0, 1).unwrap();
        let dup = s.deposit(&t, 1, GridCoord::new(5, 6), 0, 2);
        assert!(matches!(
            dup,
            Err(WorldError::SeekerSequence {
                expected: 1,
                got: 0,
                ..
            })
        ));
        assert!(s.deposit(&t, 1, GridCoord::new(5, 6), 3, 2).is_err());
        s.deposit(&t, 1, GridCoord::new(5, 6), 1, 2).unwrap();
    }

    #[test]
    fn two_owners_share_a_cell() {
        let t = Torus::new(11, 11);
        let mut s = SeekerMarks::new(&t);
        let p = GridCoord::new(2, 3);
        s.deposit(&t, 7, p, 0, 1).unwrap();
        s.deposit(&t, 9, p, 0, 1).unwrap();
        let owners: Vec<_> = s.marks_at(p).iter().map(|m| m.owner).collect();
        assert_eq!(owners, vec![7, 9]);
        assert_eq!(s.count_at(&t, p), 2);
        s.clear_owner(&t, 7);
        assert!(s.is_marked(&t, p));
        assert_eq!(s.marks_at(p)[0].owner, 9);
        s.clear_owner(&t, 9);
        assert!(!s.is_marked(&t, p));
        assert_eq!(s.total(), 0);
    }

    #[test]
    fn carrier_deposits_add() {
        let t = Torus::new(11, 11);
        let mut c = CarrierField::new(&t, CarrierParams::default());
        let p = GridCoord::new(1, 1);
        c.deposit(&t, p, 1.0);
        c.deposit(&t, p, 1.0);
        assert_eq!(c.at(&t, p), 2.0);
        assert_eq!(c.active_cells(), 1);
    }

    #[test]
    fn untouched_field_stays_zero() {
        let t = Torus::new(11, 11);
        let mut c = CarrierField::new(&t, CarrierParams::default());
        for _ in 0..100 {
            c.decay();
        }
        assert!(c.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_decay_prunes_at_closed_form_round() {
        let t = Torus::new(11, 11);
        let params = CarrierParams::default();
        let mut c = CarrierField::new(&t, params);
        let p = GridCoord::new(0, 0);
        c.deposit(&t, p, 1.0);
        // closed form: 1 - 0.01 n falls below 0.05 once n > 95
        let threshold_round = ((1.0 - params.prune) / params.decay).round() as usize;
        let mut pruned_at = None;
        for n in 1..=300 {
            c.decay();
            let expected = 1.0 - params.decay * n as f64;
            let v = c.at(&t, p);
            if v == 0.0 {
                pruned_at.get_or_insert(n);
            } else {
                assert!((v - expected).abs() < 1e-9);
            }
        }
        assert_eq!(c.at(&t, p), 0.0);
        let n = pruned_at.unwrap();
        assert!(n == threshold_round || n == threshold_round + 1, "pruned at {n}");
    }
}
