//! The coloring engine. Maintains the live set, per-endpoint level
//! occupancy, and per-level interval sets; assigns each interval a
//! (level, offset) color on insert and repairs the coloring on delete by
//! re-leveling the affected higher-level intervals.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::index::IntervalTree;
use crate::interval::{Color, Interval};
use crate::sls::{SlsMode, SlsRecord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("interval {id}: lo {lo} exceeds hi {hi}")]
    InvalidInterval { id: u64, lo: i64, hi: i64 },
    #[error("id {0} is already live")]
    DuplicateId(u64),
    #[error("id {0} is not live")]
    UnknownId(u64),
    #[error("delete requires the dynamic mode")]
    ModeViolation,
}

/// One repaired interval: its id and the color transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Recolor {
    pub id: u64,
    pub from: Color,
    pub to: Color,
}

/// What a delete did: the removed interval, the repair candidates in the
/// order they were examined, and the subset actually recolored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeleteOutcome {
    pub removed: Interval,
    pub dirty: Vec<u64>,
    pub recolored: Vec<Recolor>,
}

/// Outcome of re-examining one repair candidate.
enum Landing {
    /// Level still witnessed, no move needed.
    Settled,
    /// Moved down; the color transition.
    Moved(Recolor),
    /// No admitting level right now; retry after the rest of the queue.
    Deferred,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub inserts: u64,
    pub deletes: u64,
    pub dirty_scanned: u64,
    pub recolored: u64,
    pub records_built: u64,
    pub records_evicted: u64,
    pub diverted_landings: u64,
    pub deferred_landings: u64,
    pub forced_landings: u64,
}

#[derive(Debug, Clone, Copy)]
struct Meta {
    level: u32,
    offset: u8,
    inserted_at: u64,
}

#[derive(Debug)]
pub struct Engine {
    mode: SlsMode,
    live: IntervalTree<Meta>,
    endpoints: IntervalTree<SlsRecord>,
    levels: BTreeMap<u32, IntervalTree<()>>,
    clock: u64,
    stats: Stats,
}

/// Key for a degenerate endpoint entry: zigzag keeps distinct coordinates on
/// distinct ids.
fn coord_key(t: i64) -> u64 {
    ((t as u64) << 1) ^ ((t >> 63) as u64)
}

fn endpoint_coords(lo: i64, hi: i64) -> impl Iterator<Item = i64> {
    let second = if hi == lo { None } else { Some(hi) };
    std::iter::once(lo).chain(second)
}

impl Engine {
    pub fn new(mode: SlsMode) -> Self {
        Engine {
            mode,
            live: IntervalTree::new(),
            endpoints: IntervalTree::new(),
            levels: BTreeMap::new(),
            clock: 0,
            stats: Stats::default(),
        }
    }

    pub fn mode(&self) -> SlsMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    pub fn contains(&self, id: u64) -> bool {
        self.live.contains(id)
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    pub fn get(&self, id: u64) -> Option<Interval> {
        let (lo, hi, meta) = self.live.get(id)?;
        Some(Interval { id, lo, hi, level: meta.level, offset: meta.offset, inserted_at: meta.inserted_at })
    }

    /// Snapshot of the live set in (lo, hi, id) order.
    pub fn live_intervals(&self) -> Vec<Interval> {
        self.live
            .iter()
            .map(|e| Interval {
                id: e.id,
                lo: e.lo,
                hi: e.hi,
                level: e.value.level,
                offset: e.value.offset,
                inserted_at: e.value.inserted_at,
            })
            .collect()
    }

    pub fn colors_in_use(&self) -> BTreeSet<Color> {
        self.live.iter().map(|e| Color { level: e.value.level, offset: e.value.offset }).collect()
    }

    pub fn max_level(&self) -> Option<u32> {
        self.levels.keys().next_back().copied()
    }

    /// Lower bound on the clique number witnessed by the level structure.
    pub fn omega_hint(&self) -> u32 {
        self.max_level().map_or(0, |l| l + 1)
    }

    pub fn insert(&mut self, id: u64, lo: i64, hi: i64) -> Result<Color, EngineError> {
        if lo > hi {
            return Err(EngineError::InvalidInterval { id, lo, hi });
        }
        if self.live.contains(id) {
            return Err(EngineError::DuplicateId(id));
        }
        let inserted_at = self.clock;
        self.clock += 1;
        self.stats.inserts += 1;

        self.live
            .insert(lo, hi, id, Meta { level: 0, offset: 0, inserted_at })
            .expect("live-set insert after freshness check");

        // Register both endpoints; new coordinates get a record built from
        // the levels of the intervals covering them (the new interval has no
        // level yet and is skipped).
        for t in endpoint_coords(lo, hi) {
            if let Some(rec) = self.endpoints.get_mut(coord_key(t)) {
                rec.refcount += 1;
            } else {
                let levels_present: BTreeSet<u32> = self
                    .live
                    .stab(t)
                    .iter()
                    .filter(|e| e.id != id)
                    .map(|e| e.value.level)
                    .collect();
                let mut rec = SlsRecord::build(self.mode, t, levels_present);
                rec.refcount = 1;
                self.endpoints
                    .insert(t, t, coord_key(t), rec)
                    .expect("fresh endpoint coordinate");
                self.stats.records_built += 1;
            }
        }

        // Level: max height over tracked endpoints inside the interval (the
        // interval's own endpoints guarantee the span is nonempty), lowered
        // if needed to a level class the interval can join legally. On
        // insert-only histories the height level is always legal; the search
        // only diverts in states rebuilt by deletions.
        let (span, height) = self.max_height_span(lo, hi);
        let level = match self.landing_level(height, lo, hi) {
            Some(level) => level,
            None => {
                self.stats.forced_landings += 1;
                log::error!("no level <= {height} admits [{lo},{hi}]; landing at {height}");
                height
            }
        };
        for t in &span {
            self.endpoints
                .get_mut(coord_key(*t))
                .expect("span coordinate is tracked")
                .mark(level);
        }

        let offset = self.free_offset(level, lo, hi, id);
        self.levels
            .entry(level)
            .or_default()
            .insert(lo, hi, id, ())
            .expect("id is fresh in its level set");
        let meta = self.live.get_mut(id).expect("just inserted");
        meta.level = level;
        meta.offset = offset;
        log::debug!("insert {id} [{lo},{hi}] -> ({level},{offset})");
        Ok(Color { level, offset })
    }

    pub fn delete(&mut self, id: u64) -> Result<DeleteOutcome, EngineError> {
        if self.mode != SlsMode::Dynamic {
            return Err(EngineError::ModeViolation);
        }
        if !self.live.contains(id) {
            return Err(EngineError::UnknownId(id));
        }
        self.clock += 1;
        self.stats.deletes += 1;

        let (lo, hi, meta) = self.live.remove(id).expect("checked live");
        let removed = Interval { id, lo, hi, level: meta.level, offset: meta.offset, inserted_at: meta.inserted_at };
        self.remove_from_level(meta.level, id);

        // Vacate the freed level at every tracked endpoint it no longer
        // covers.
        let covered: Vec<i64> =
            self.endpoints.overlapping(lo, hi).expect("lo <= hi").iter().map(|e| e.lo).collect();
        for t in covered {
            if !self.level_stabbed(meta.level, t) {
                self.endpoints
                    .get_mut(coord_key(t))
                    .expect("covered coordinate is tracked")
                    .unmark(meta.level)
                    .expect("freed level was marked at covered endpoint");
            }
        }

        // Repair candidates: higher-level intervals intersecting the deleted
        // one, lowest level first, insertion order within a level.
        let mut dirty: Vec<(u32, u64, u64, i64, i64)> = self
            .live
            .overlapping(lo, hi)
            .expect("lo <= hi")
            .iter()
            .filter(|e| e.value.level > meta.level)
            .map(|e| (e.value.level, e.value.inserted_at, e.id, e.lo, e.hi))
            .collect();
        dirty.sort_unstable();
        let dirty_ids: Vec<u64> = dirty.iter().map(|&(_, _, jid, _, _)| jid).collect();
        self.stats.dirty_scanned += dirty.len() as u64;

        let mut recolored = Vec::new();
        let mut deferred = Vec::new();
        for (old_level, _, jid, jlo, jhi) in dirty {
            match self.reland(old_level, jid, jlo, jhi, false) {
                Landing::Moved(rc) => recolored.push(rc),
                Landing::Deferred => deferred.push((old_level, jid, jlo, jhi)),
                Landing::Settled => {}
            }
        }
        // A landing can be blocked mid-repair while later queue members refill
        // the levels beneath it, so blocked intervals get a second look once
        // the queue has settled; most turn out to need no move at all.
        for (old_level, jid, jlo, jhi) in deferred {
            if let Landing::Moved(rc) = self.reland(old_level, jid, jlo, jhi, true) {
                recolored.push(rc);
            }
        }
        self.stats.recolored += recolored.len() as u64;

        // Release the deleted interval's endpoints last; records evicted at
        // refcount 0 are dominated by surviving live endpoints.
        for t in endpoint_coords(lo, hi) {
            let rec = self.endpoints.get_mut(coord_key(t)).expect("own endpoint is tracked");
            rec.refcount -= 1;
            if rec.refcount == 0 {
                self.endpoints.remove(coord_key(t)).expect("present");
                self.stats.records_evicted += 1;
            }
        }
        log::debug!("delete {id}: {} dirty, {} recolored", dirty_ids.len(), recolored.len());
        Ok(DeleteOutcome { removed, dirty: dirty_ids, recolored })
    }

    /// Re-examine one repair candidate. Nothing happens when its level is
    /// still witnessed. Otherwise it moves down to the best admitting level;
    /// with no admitting level it is deferred, or on the second look forced
    /// onto the height level with the conflict logged.
    fn reland(&mut self, old_level: u32, jid: u64, jlo: i64, jhi: i64, force: bool) -> Landing {
        let (span, h) = self.max_height_span(jlo, jhi);
        if h >= old_level {
            return Landing::Settled;
        }
        let target = match self.landing_level(h, jlo, jhi) {
            Some(level) => level,
            None if force => {
                self.stats.forced_landings += 1;
                log::error!("no level <= {h} admits [{jlo},{jhi}]; landing at {h}");
                h
            }
            None => {
                self.stats.deferred_landings += 1;
                return Landing::Deferred;
            }
        };
        self.remove_from_level(old_level, jid);
        self.levels
            .entry(target)
            .or_default()
            .insert(jlo, jhi, jid, ())
            .expect("id is fresh in its new level set");
        for t in span {
            let vacated = !self.level_stabbed(old_level, t);
            let rec = self.endpoints.get_mut(coord_key(t)).expect("span coordinate is tracked");
            if vacated {
                rec.unmark(old_level).expect("old level was marked at covered endpoint");
            }
            rec.mark(target);
        }
        let offset = self.free_offset(target, jlo, jhi, jid);
        let m = self.live.get_mut(jid).expect("dirty interval is live");
        let from = Color { level: m.level, offset: m.offset };
        m.level = target;
        m.offset = offset;
        log::debug!("recolor {jid} {from} -> ({target},{offset})");
        Landing::Moved(Recolor { id: jid, from, to: Color { level: target, offset } })
    }

    /// Highest level <= `cap` whose class `[lo, hi]` can join without
    /// breaking the class shape: level 0 stays an independent set, any other
    /// level keeps every member at no more than two same-level intersecting
    /// neighbors and free of containment. Levels at or below the height cap
    /// all keep the witness guarantee, so lowering the landing is always
    /// safe; it changes the outcome only in states rebuilt by deletions,
    /// where the height level itself can be crowded. `None` means every
    /// level under the cap is crowded and the caller decides the fallback.
    fn landing_level(&mut self, cap: u32, lo: i64, hi: i64) -> Option<u32> {
        let found = (0..=cap).rev().find(|&g| self.class_admits(g, lo, hi));
        if let Some(level) = found {
            if level != cap {
                self.stats.diverted_landings += 1;
                log::debug!("landing [{lo},{hi}] diverted {cap} -> {level}");
            }
        }
        found
    }

    fn class_admits(&self, level: u32, lo: i64, hi: i64) -> bool {
        let Some(tree) = self.levels.get(&level) else { return true };
        let nbrs = tree.overlapping(lo, hi).expect("lo <= hi");
        if level == 0 {
            return nbrs.is_empty();
        }
        if nbrs.len() > 2 {
            return false;
        }
        for n in &nbrs {
            if (n.lo <= lo && hi <= n.hi) || (lo <= n.lo && n.hi <= hi) {
                return false;
            }
            let peers = tree
                .overlapping(n.lo, n.hi)
                .expect("stored interval is ordered")
                .iter()
                .filter(|e| e.id != n.id)
                .count();
            if peers >= 2 {
                return false;
            }
        }
        true
    }

    /// Tracked endpoint coordinates inside `[lo, hi]` and the maximum record
    /// height among them.
    fn max_height_span(&self, lo: i64, hi: i64) -> (Vec<i64>, u32) {
        let mut coords = Vec::new();
        let mut best = 0;
        for e in self.endpoints.overlapping(lo, hi).expect("lo <= hi") {
            coords.push(e.lo);
            best = best.max(e.value.height());
        }
        (coords, best)
    }

    /// Smallest offset in {1,2,3} unused among intervals of `level`
    /// intersecting `[lo, hi]`, ignoring `skip`.
    fn free_offset(&self, level: u32, lo: i64, hi: i64, skip: u64) -> u8 {
        let mut used = [false; 4];
        if let Some(tree) = self.levels.get(&level) {
            for e in tree.overlapping(lo, hi).expect("lo <= hi") {
                if e.id == skip {
                    continue;
                }
                let (_, _, meta) = self.live.get(e.id).expect("level sets track live intervals");
                used[meta.offset as usize] = true;
            }
        }
        (1u8..=3).find(|&o| !used[o as usize]).expect("at most two same-level neighbors")
    }

    fn level_stabbed(&self, level: u32, t: i64) -> bool {
        self.levels.get(&level).is_some_and(|tree| !tree.stab(t).is_empty())
    }

    fn remove_from_level(&mut self, level: u32, id: u64) {
        let tree = self.levels.get_mut(&level).expect("level set exists");
        tree.remove(id).expect("interval tracked at its level");
        if tree.is_empty() {
            self.levels.remove(&level);
        }
    }

    /// Deep consistency audit for tests: cross-checks the level sets, the
    /// endpoint refcounts, and every occupancy record against the live set.
    pub fn self_check(&self) -> Result<(), String> {
        let live = self.live_intervals();
        let mut level_members: BTreeMap<u32, BTreeSet<u64>> = BTreeMap::new();
        for (level, tree) in &self.levels {
            if tree.is_empty() {
                return Err(format!("empty level set {level} retained"));
            }
            level_members.insert(*level, tree.iter().map(|e| e.id).collect());
        }
        let mut expect_levels: BTreeMap<u32, BTreeSet<u64>> = BTreeMap::new();
        for iv in &live {
            expect_levels.entry(iv.level).or_default().insert(iv.id);
        }
        if level_members != expect_levels {
            return Err("level sets disagree with live colors".into());
        }

        let mut refcounts: BTreeMap<i64, u32> = BTreeMap::new();
        for iv in &live {
            for t in endpoint_coords(iv.lo, iv.hi) {
                *refcounts.entry(t).or_insert(0) += 1;
            }
        }
        let recorded: BTreeMap<i64, u32> =
            self.endpoints.iter().map(|e| (e.lo, e.value.refcount)).collect();
        if recorded != refcounts {
            return Err("endpoint refcounts disagree with live endpoints".into());
        }

        for e in self.endpoints.iter() {
            let t = e.lo;
            let expect: BTreeSet<u32> =
                live.iter().filter(|iv| iv.contains(t)).map(|iv| iv.level).collect();
            let got: BTreeSet<u32> = e.value.occupied().into_iter().collect();
            if got != expect {
                return Err(format!(
                    "occupancy at {t} is {got:?}, live intervals give {expect:?}"
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn figure_history() -> Vec<(i64, i64)> {
        vec![(1, 2), (8, 9), (1, 7), (3, 9), (4, 6), (4, 6)]
    }

    fn figure_engine(mode: SlsMode) -> (Engine, Vec<Color>) {
        let mut engine = Engine::new(mode);
        let colors = figure_history()
            .into_iter()
            .enumerate()
            .map(|(i, (lo, hi))| engine.insert(i as u64 + 1, lo, hi).unwrap())
            .collect();
        (engine, colors)
    }

    #[test]
    fn first_interval_gets_color_0_1() {
        let mut engine = Engine::new(SlsMode::Incremental);
        assert_eq!(engine.insert(1, -3, 12).unwrap(), Color::new(0, 1));
    }

    #[test]
    fn figure_sequence_levels_and_colors() {
        for mode in [SlsMode::Incremental, SlsMode::Dynamic] {
            let (engine, colors) = figure_engine(mode);
            let levels: Vec<u32> = colors.iter().map(|c| c.level).collect();
            assert_eq!(levels, vec![0, 0, 1, 1, 0, 2]);
            assert_eq!(colors[5], Color::new(2, 1));
            assert_eq!(colors[2].offset, 1);
            assert_eq!(colors[3].offset, 2);
            engine.self_check().unwrap();
        }
    }

    #[test]
    fn figure_colors_in_use() {
        let (engine, _) = figure_engine(SlsMode::Dynamic);
        let expect: BTreeSet<Color> =
            [(0, 1), (1, 1), (1, 2), (2, 1)].map(|(l, o)| Color::new(l, o)).into();
        assert_eq!(engine.colors_in_use(), expect);
        assert_eq!(engine.omega_hint(), 3);
    }

    #[test]
    fn empty_engine_reports_nothing() {
        let engine = Engine::new(SlsMode::Dynamic);
        assert!(engine.colors_in_use().is_empty());
        assert_eq!(engine.omega_hint(), 0);
        assert_eq!(engine.max_level(), None);
    }

    #[test]
    fn validation_errors() {
        let mut engine = Engine::new(SlsMode::Dynamic);
        assert_eq!(
            engine.insert(1, 5, 2),
            Err(EngineError::InvalidInterval { id: 1, lo: 5, hi: 2 })
        );
        engine.insert(1, 0, 4).unwrap();
        assert_eq!(engine.insert(1, 9, 9), Err(EngineError::DuplicateId(1)));
        assert_eq!(engine.delete(2), Err(EngineError::UnknownId(2)));
    }

    #[test]
    fn delete_rejected_in_incremental_mode() {
        let mut engine = Engine::new(SlsMode::Incremental);
        engine.insert(1, 0, 4).unwrap();
        assert_eq!(engine.delete(1), Err(EngineError::ModeViolation));
    }

    #[test]
    fn insert_then_delete_leaves_nothing() {
        let mut engine = Engine::new(SlsMode::Dynamic);
        engine.insert(7, -2, 9).unwrap();
        let outcome = engine.delete(7).unwrap();
        assert!(outcome.recolored.is_empty());
        assert!(outcome.dirty.is_empty());
        assert_eq!(outcome.removed.color(), Color::new(0, 1));
        assert!(engine.is_empty());
        assert!(engine.live_intervals().is_empty());
        engine.self_check().unwrap();
    }

    #[test]
    fn deleting_i5_recolors_i6_to_ground_level() {
        let (mut engine, _) = figure_engine(SlsMode::Dynamic);
        let outcome = engine.delete(5).unwrap();
        assert_eq!(outcome.dirty, vec![3, 4, 6]);
        assert_eq!(
            outcome.recolored,
            vec![Recolor { id: 6, from: Color::new(2, 1), to: Color::new(0, 1) }]
        );
        let expect: BTreeSet<Color> = [(0, 1), (1, 1), (1, 2)].map(|(l, o)| Color::new(l, o)).into();
        assert_eq!(engine.colors_in_use(), expect);
        let level0: Vec<u64> = engine
            .live_intervals()
            .iter()
            .filter(|iv| iv.level == 0)
            .map(|iv| iv.id)
            .collect();
        assert_eq!(level0, vec![1, 6, 2]);
        engine.self_check().unwrap();
        oracle::check_property_p(&engine.live_intervals()).unwrap();
    }

    #[test]
    fn deleting_i3_recolors_nothing() {
        let (mut engine, _) = figure_engine(SlsMode::Dynamic);
        let outcome = engine.delete(3).unwrap();
        assert_eq!(outcome.dirty, vec![6]);
        assert!(outcome.recolored.is_empty());
        engine.self_check().unwrap();
    }

    #[test]
    fn shared_endpoint_refcounts_survive_partial_deletes() {
        let mut engine = Engine::new(SlsMode::Dynamic);
        engine.insert(1, 3, 8).unwrap();
        engine.insert(2, 3, 5).unwrap();
        engine.insert(3, 8, 8).unwrap();
        engine.self_check().unwrap();
        engine.delete(2).unwrap();
        engine.self_check().unwrap();
        engine.delete(1).unwrap();
        engine.self_check().unwrap();
        engine.delete(3).unwrap();
        assert!(engine.is_empty());
        engine.self_check().unwrap();
    }

    #[test]
    fn degenerate_intervals_share_one_endpoint_record() {
        let mut engine = Engine::new(SlsMode::Dynamic);
        engine.insert(1, 4, 4).unwrap();
        engine.insert(2, 4, 4).unwrap();
        engine.self_check().unwrap();
        let colors: BTreeSet<Color> = engine.colors_in_use();
        assert_eq!(colors.len(), 2);
        engine.delete(1).unwrap();
        engine.self_check().unwrap();
        engine.delete(2).unwrap();
        assert!(engine.is_empty());
    }

    fn random_trace_audit(seed: u64, updates: usize, delete_prob: f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut engine = Engine::new(SlsMode::Dynamic);
        let mut live_ids: Vec<u64> = Vec::new();
        let mut next_id = 0u64;
        for _ in 0..updates {
            if !live_ids.is_empty() && rng.random_bool(delete_prob) {
                let id = live_ids.swap_remove(rng.random_range(0..live_ids.len()));
                engine.delete(id).unwrap();
            } else {
                let lo = rng.random_range(-300..300);
                let hi = lo + rng.random_range(0..60);
                engine.insert(next_id, lo, hi).unwrap();
                live_ids.push(next_id);
                next_id += 1;
            }
            engine.self_check().unwrap();
            let snapshot = engine.live_intervals();
            oracle::check_proper(&snapshot).unwrap();
            oracle::check_property_p(&snapshot).unwrap();
            oracle::check_invariant_c(&snapshot).unwrap();
            oracle::check_color_bound(&snapshot).unwrap();
        }
    }

    #[test]
    fn randomized_mixed_traces_hold_every_invariant() {
        for seed in 0..6 {
            random_trace_audit(seed, 400, 0.35);
        }
    }

    #[test]
    fn dense_clique_teardown_stays_consistent() {
        let mut engine = Engine::new(SlsMode::Dynamic);
        for i in 0..40u64 {
            engine.insert(i, 0, 200 - i as i64).unwrap();
        }
        assert_eq!(engine.omega_hint(), 40);
        for i in 0..40u64 {
            engine.delete(i).unwrap();
            engine.self_check().unwrap();
            let snapshot = engine.live_intervals();
            oracle::check_property_p(&snapshot).unwrap();
            oracle::check_invariant_c(&snapshot).unwrap();
        }
    }

    #[test]
    fn levels_stay_within_the_recorded_clique_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let n = rng.random_range(1..120);
            let mut engine = Engine::new(SlsMode::Incremental);
            let mut placed: Vec<Interval> = Vec::new();
            for i in 0..n {
                let lo = rng.random_range(-200..200);
                let hi = lo + rng.random_range(0..50);
                engine.insert(i as u64, lo, hi).unwrap();
                placed.push(engine.get(i as u64).unwrap());
            }
            for i in 0..placed.len() {
                let bound = oracle::kt_level(&placed, i);
                let mine = placed[i].level;
                assert!(mine <= bound, "engine level {mine} above clique bound {bound}");
            }
        }
    }

    #[test]
    fn height_rule_can_exceed_the_from_scratch_greedy() {
        // The from-scratch greedy puts the sixth arrival at level 3 where the
        // height rule records 2; held-down level 2 then stacks levels 0..2 at
        // one point, so the last arrival records 3 while the greedy, having
        // spent 3 earlier, only needs 2. Neither assignment dominates the
        // other; the engine is only bounded by its own recorded history.
        let spans = [(-11, 9), (-8, 17), (30, 43), (14, 37), (-9, 28), (16, 53), (22, 34)];
        let mut engine = Engine::new(SlsMode::Incremental);
        let mut levels = Vec::new();
        for (i, &(lo, hi)) in spans.iter().enumerate() {
            levels.push(engine.insert(i as u64, lo, hi).unwrap().level);
        }
        assert_eq!(levels, vec![0, 1, 0, 1, 2, 2, 3]);
        let greedy = oracle::kt_levels(&spans);
        assert_eq!(greedy[5], 3);
        assert_eq!(greedy[6], 2);
        oracle::check_proper(&engine.live_intervals()).unwrap();
        oracle::check_color_bound(&engine.live_intervals()).unwrap();
    }

    #[test]
    fn modes_agree_on_insert_only_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let n = rng.random_range(1..150);
            let history: Vec<(i64, i64)> = (0..n)
                .map(|_| {
                    let lo = rng.random_range(-200..200);
                    (lo, lo + rng.random_range(0..70))
                })
                .collect();
            let mut inc = Engine::new(SlsMode::Incremental);
            let mut dyn_ = Engine::new(SlsMode::Dynamic);
            for (i, &(lo, hi)) in history.iter().enumerate() {
                let a = inc.insert(i as u64, lo, hi).unwrap();
                let b = dyn_.insert(i as u64, lo, hi).unwrap();
                assert_eq!(a, b);
            }
        }
    }
}
