//! Torus arithmetic: wrapped coordinates, Moore neighbourhoods, distances.

use serde::{Deserialize, Serialize};

/// A cell on the torus. Always stored wrapped into `[0, W) x [0, H)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridCoord {
    pub x: u32,
    pub y: u32,
}

impl GridCoord {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }
}

impl std::fmt::Display for GridCoord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// One of the eight Moore steps, numbered counter-clockwise from east.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Direction(u8);

impl Direction {
    pub const ALL: [Direction; 8] = [
        Direction(0),
        Direction(1),
        Direction(2),
        Direction(3),
        Direction(4),
        Direction(5),
        Direction(6),
        Direction(7),
    ];

    const OFFSETS: [(i64, i64); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn offset(self) -> (i64, i64) {
        Self::OFFSETS[self.0 as usize]
    }

    pub fn from_offset(dx: i64, dy: i64) -> Option<Direction> {
        Self::OFFSETS
            .iter()
            .position(|&o| o == (dx, dy))
            .map(|i| Direction(i as u8))
    }

    /// Number of 45 degree increments between two headings (0..=4).
    pub fn turn_to(self, other: Direction) -> u8 {
        let d = (self.0 as i16 - other.0 as i16).unsigned_abs() as u8;
        d.min(8 - d)
    }
}

/// Mathematical modulo of a raw integer pair onto a `width x height` torus.
pub fn wrap(x: i64, y: i64, width: u32, height: u32) -> GridCoord {
    debug_assert!(width > 0 && height > 0);
    GridCoord {
        x: x.rem_euclid(width as i64) as u32,
        y: y.rem_euclid(height as i64) as u32,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Torus {
    pub width: u32,
    pub height: u32,
}

impl Torus {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "torus dimensions must be positive");
        Self { width, height }
    }

    pub fn cells(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn wrap(&self, x: i64, y: i64) -> GridCoord {
        wrap(x, y, self.width, self.height)
    }

    #[inline]
    pub fn index(&self, p: GridCoord) -> usize {
        p.y as usize * self.width as usize + p.x as usize
    }

    pub fn coord(&self, index: usize) -> GridCoord {
        GridCoord {
            x: (index % self.width as usize) as u32,
            y: (index / self.width as usize) as u32,
        }
    }

    #[inline]
    pub fn step(&self, p: GridCoord, dir: Direction) -> GridCoord {
        let (dx, dy) = dir.offset();
        self.wrap(p.x as i64 + dx, p.y as i64 + dy)
    }

    pub fn neighbors(&self, p: GridCoord) -> [GridCoord; 8] {
        Direction::ALL.map(|d| self.step(p, d))
    }

    /// Shortest signed per-axis displacement from `a` to `b`.
    pub fn delta(&self, a: GridCoord, b: GridCoord) -> (i64, i64) {
        (
            Self::axis_delta(a.x, b.x, self.width),
            Self::axis_delta(a.y, b.y, self.height),
        )
    }

    fn axis_delta(a: u32, b: u32, extent: u32) -> i64 {
        let extent = extent as i64;
        let mut d = (b as i64 - a as i64).rem_euclid(extent);
        if d > extent / 2 {
            d -= extent;
        }
        d
    }

    /// Direction of a single Moore step from `a` to adjacent cell `b`.
    pub fn direction_between(&self, a: GridCoord, b: GridCoord) -> Option<Direction> {
        let (dx, dy) = self.delta(a, b);
        Direction::from_offset(dx, dy)
    }

    pub fn distance_sq(&self, a: GridCoord, b: GridCoord) -> u64 {
        let (dx, dy) = self.delta(a, b);
        (dx * dx + dy * dy) as u64
    }

    pub fn distance(&self, a: GridCoord, b: GridCoord) -> f64 {
        (self.distance_sq(a, b) as f64).sqrt()
    }

    /// Chebyshev distance, i.e. the number of Moore steps between two cells.
    pub fn chebyshev(&self, a: GridCoord, b: GridCoord) -> u64 {
        let (dx, dy) = self.delta(a, b);
        dx.unsigned_abs().max(dy.unsigned_abs())
    }

    pub fn are_adjacent(&self, a: GridCoord, b: GridCoord) -> bool {
        self.chebyshev(a, b) == 1
    }
}

/// Free-function form of [`Torus::distance`].
pub fn toroidal_distance(torus: &Torus, a: GridCoord, b: GridCoord) -> f64 {
    torus.distance(a, b)
}
