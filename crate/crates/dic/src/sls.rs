//! Per-coordinate level occupancy. Each tracked endpoint keeps the set of
//! levels used by intervals covering it; `height` is the smallest level not
//! in that set. Two backends: an insert-only array with an intrusive free
//! list (O(1) height), and ordered sets that also support unmark.

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlsMode {
    Incremental,
    Dynamic,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlsError {
    #[error("unmark is not available on the insert-only backend")]
    ModeViolation,
    #[error("level {0} is not marked")]
    NotMarked(u32),
}

#[derive(Debug, Clone)]
pub struct SlsRecord {
    pub coord: i64,
    pub refcount: u32,
    backend: Backend,
}

#[derive(Debug, Clone)]
enum Backend {
    Incremental(BitLevels),
    Dynamic(SetLevels),
}

impl SlsRecord {
    pub fn new(mode: SlsMode, coord: i64) -> Self {
        let backend = match mode {
            SlsMode::Incremental => Backend::Incremental(BitLevels::default()),
            SlsMode::Dynamic => Backend::Dynamic(SetLevels::default()),
        };
        SlsRecord { coord, refcount: 0, backend }
    }

    /// Record for a coordinate currently covered by intervals at
    /// `levels_present`. Refcount starts at 0; the caller owns it.
    pub fn build(mode: SlsMode, coord: i64, levels_present: impl IntoIterator<Item = u32>) -> Self {
        let mut rec = Self::new(mode, coord);
        for l in levels_present {
            rec.mark(l);
        }
        rec
    }

    /// Smallest level not marked here.
    pub fn height(&self) -> u32 {
        match &self.backend {
            Backend::Incremental(b) => b.height(),
            Backend::Dynamic(b) => b.height(),
        }
    }

    /// Mark `level` occupied. Untracked levels below it become vacant
    /// (padding); marking an occupied level is a no-op.
    pub fn mark(&mut self, level: u32) {
        match &mut self.backend {
            Backend::Incremental(b) => b.mark(level),
            Backend::Dynamic(b) => b.mark(level),
        }
    }

    pub fn unmark(&mut self, level: u32) -> Result<(), SlsError> {
        match &mut self.backend {
            Backend::Incremental(_) => Err(SlsError::ModeViolation),
            Backend::Dynamic(b) => b.unmark(level),
        }
    }

    pub fn is_marked(&self, level: u32) -> bool {
        match &self.backend {
            Backend::Incremental(b) => b.is_marked(level),
            Backend::Dynamic(b) => b.is_marked(level),
        }
    }

    /// Occupied levels in ascending order.
    pub fn occupied(&self) -> Vec<u32> {
        match &self.backend {
            Backend::Incremental(b) => b.occupied(),
            Backend::Dynamic(b) => b.occupied.iter().copied().collect(),
        }
    }

    /// Vacant levels below the tracked ceiling, ascending.
    pub fn vacant_below(&self) -> Vec<u32> {
        match &self.backend {
            Backend::Incremental(b) => b.vacant(),
            Backend::Dynamic(b) => b.vacant.iter().copied().collect(),
        }
    }

    /// Number of tracked levels; occupied and vacant partition `0..tracked`.
    pub fn tracked(&self) -> u32 {
        match &self.backend {
            Backend::Incremental(b) => b.occupied.len() as u32,
            Backend::Dynamic(b) => (b.occupied.len() + b.vacant.len()) as u32,
        }
    }
}

const NIL: u32 = u32::MAX;

/// Bit array of occupied levels plus a doubly-linked free list threaded
/// through vacant level indices in ascending order; the list head is the
/// height. Vacant slots only ever appear by padding at the high end, so
/// ascending order is maintained by tail appends.
#[derive(Debug, Clone)]
struct BitLevels {
    occupied: BitVec,
    next: Vec<u32>,
    prev: Vec<u32>,
    head: u32,
    tail: u32,
}

impl Default for BitLevels {
    fn default() -> Self {
        BitLevels { occupied: BitVec::default(), next: Vec::new(), prev: Vec::new(), head: NIL, tail: NIL }
    }
}

impl BitLevels {
    fn tracked(&self) -> u32 {
        self.occupied.len() as u32
    }

    fn height(&self) -> u32 {
        if self.head != NIL {
            self.head
        } else {
            self.tracked()
        }
    }

    fn is_marked(&self, level: u32) -> bool {
        (level as usize) < self.occupied.len() && self.occupied.get(level as usize)
    }

    fn mark(&mut self, level: u32) {
        if (level as usize) < self.occupied.len() {
            if self.occupied.get(level as usize) {
                return;
            }
            self.occupied.set(level as usize, true);
            self.unlink(level);
            return;
        }
        while self.tracked() < level {
            let slot = self.tracked();
            self.occupied.push(false);
            self.next.push(NIL);
            self.prev.push(NIL);
            self.link_tail(slot);
        }
        self.occupied.push(true);
        self.next.push(NIL);
        self.prev.push(NIL);
    }

    fn link_tail(&mut self, slot: u32) {
        self.prev[slot as usize] = self.tail;
        self.next[slot as usize] = NIL;
        if self.tail == NIL {
            self.head = slot;
        } else {
            self.next[self.tail as usize] = slot;
        }
        self.tail = slot;
    }

    fn unlink(&mut self, slot: u32) {
        let p = self.prev[slot as usize];
        let n = self.next[slot as usize];
        if p == NIL {
            self.head = n;
        } else {
            self.next[p as usize] = n;
        }
        if n == NIL {
            self.tail = p;
        } else {
            self.prev[n as usize] = p;
        }
        self.prev[slot as usize] = NIL;
        self.next[slot as usize] = NIL;
    }

    fn occupied(&self) -> Vec<u32> {
        (0..self.tracked()).filter(|&l| self.occupied.get(l as usize)).collect()
    }

    fn vacant(&self) -> Vec<u32> {
        (0..self.tracked()).filter(|&l| !self.occupied.get(l as usize)).collect()
    }
}

/// Ordered-set backend: occupied and vacant levels as balanced sets, so both
/// mark and unmark run in O(log w).
#[derive(Debug, Clone, Default)]
struct SetLevels {
    occupied: BTreeSet<u32>,
    vacant: BTreeSet<u32>,
}

impl SetLevels {
    fn tracked(&self) -> u32 {
        (self.occupied.len() + self.vacant.len()) as u32
    }

    fn height(&self) -> u32 {
        if let Some(&min_vacant) = self.vacant.first() {
            min_vacant
        } else if let Some(&max_occ) = self.occupied.last() {
            max_occ + 1
        } else {
            0
        }
    }

    fn is_marked(&self, level: u32) -> bool {
        self.occupied.contains(&level)
    }

    fn mark(&mut self, level: u32) {
        if self.occupied.contains(&level) {
            return;
        }
        if !self.vacant.remove(&level) {
            for pad in self.tracked()..level {
                self.vacant.insert(pad);
            }
        }
        self.occupied.insert(level);
    }

    fn unmark(&mut self, level: u32) -> Result<(), SlsError> {
        if !self.occupied.remove(&level) {
            return Err(SlsError::NotMarked(level));
        }
        self.vacant.insert(level);
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    fn len(&self) -> usize {
        self.len
    }

    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, v: bool) {
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    fn push(&mut self, v: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, v);
    }
}
