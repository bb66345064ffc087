use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::geometry::{GridCoord, Torus};

/// Which drop mechanism produced a food item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DropSource {
    Uniform,
    Patch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoodItem {
    pub id: u64,
    pub pos: GridCoord,
    pub dropped_at: u64,
    pub expires_at: u64,
    pub source: DropSource,
}

/// All food currently lying in the world.
///
/// Ids are handed out in drop order and the lifetime is fixed, so id order is
/// also expiry order; expiry only ever looks at the front of `items`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoodLayer {
    lifetime: u64,
    next_id: u64,
    items: BTreeMap<u64, FoodItem>,
    by_cell: Vec<Vec<u64>>,
}

impl FoodLayer {
    pub fn new(torus: &Torus, lifetime: u64) -> Self {
        Self {
            lifetime,
            next_id: 0,
            items: BTreeMap::new(),
            by_cell: vec![Vec::new(); torus.cells()],
        }
    }

    pub fn lifetime(&self) -> u64 {
        self.lifetime
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn place(&mut self, torus: &Torus, pos: GridCoord, round: u64, source: DropSource) -> FoodItem {
        let item = FoodItem {
            id: self.next_id,
            pos,
            dropped_at: round,
            expires_at: round + self.lifetime,
            source,
        };
        self.next_id += 1;
        self.items.insert(item.id, item);
        self.by_cell[torus.index(pos)].push(item.id);
        item
    }

    /// Removes every item with `expires_at <= round`; returns how many.
    pub fn expire(&mut self, torus: &Torus, round: u64) -> usize {
        let mut removed = 0;
        while let Some((&id, item)) = self.items.first_key_value() {
            if item.expires_at > round {
                break;
            }
            let cell = &mut self.by_cell[torus.index(item.pos)];
            cell.retain(|&other| other != id);
            self.items.remove(&id);
            removed += 1;
        }
        removed
    }

    /// Takes the oldest item on `pos`, if any.
    pub fn take(&mut self, torus: &Torus, pos: GridCoord) -> Option<FoodItem> {
        let cell = &mut self.by_cell[torus.index(pos)];
        if cell.is_empty() {
            return None;
        }
        let id = cell.remove(0);
        self.items.remove(&id)
    }

    #[inline]
    pub fn count_at(&self, torus: &Torus, pos: GridCoord) -> usize {
        self.by_cell[torus.index(pos)].len()
    }

    /// Items within Chebyshev radius 1 of `pos`, including `pos` itself.
    pub fn count_in_neighborhood(&self, torus: &Torus, pos: GridCoord) -> usize {
        self.count_at(torus, pos)
            + torus
                .neighbors(pos)
                .iter()
                .map(|&n| self.count_at(torus, n))
                .sum::<usize>()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FoodItem> {
        self.items.values()
    }

    pub fn get(&self, id: u64) -> Option<&FoodItem> {
        self.items.get(&id)
    }
}
