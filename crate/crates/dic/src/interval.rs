//! Core domain types shared by the index, the engine, and the oracles.

use std::fmt;

/// A closed integer interval `[lo, hi]` carrying its current color and the
/// engine clock value at which it was inserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub id: u64,
    pub lo: i64,
    pub hi: i64,
    pub level: u32,
    pub offset: u8,
    pub inserted_at: u64,
}

/// A color: level plus an offset in {1,2,3} distinguishing up to two
/// same-level neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Color {
    pub level: u32,
    pub offset: u8,
}

impl Color {
    pub fn new(level: u32, offset: u8) -> Self {
        Color { level, offset }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.level, self.offset)
    }
}

impl Interval {
    pub fn color(&self) -> Color {
        Color { level: self.level, offset: self.offset }
    }

    pub fn contains(&self, t: i64) -> bool {
        self.lo <= t && t <= self.hi
    }

    /// Closed-interval intersection: touching endpoints count.
    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}
