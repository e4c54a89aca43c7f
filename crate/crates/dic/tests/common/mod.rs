#![allow(dead_code)]

use dic::engine::Engine;
use dic::interval::Interval;
use dic::sls::SlsMode;
use dic::trace::UpdateEvent;

/// The six-interval walkthrough used across the docs and tests:
/// levels (0,0,1,1,0,2), last interval colored (2,1).
pub fn figure_events() -> Vec<UpdateEvent> {
    [(1, 1, 2), (2, 8, 9), (3, 1, 7), (4, 3, 9), (5, 4, 6), (6, 4, 6)]
        .into_iter()
        .map(|(id, lo, hi)| UpdateEvent::Insert { id, lo, hi })
        .collect()
}

pub fn figure_trace_text() -> String {
    dic::trace::format_trace(&figure_events())
}

/// Spans of an insert-only trace, in arrival order.
pub fn insert_spans(events: &[UpdateEvent]) -> Vec<(i64, i64)> {
    events
        .iter()
        .map(|e| match *e {
            UpdateEvent::Insert { lo, hi, .. } => (lo, hi),
            UpdateEvent::Delete { .. } => panic!("trace has deletes"),
        })
        .collect()
}

/// Replay an insert-only history and return the intervals as placed.
pub fn place(mode: SlsMode, spans: &[(i64, i64)]) -> Vec<Interval> {
    let mut engine = Engine::new(mode);
    spans
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| {
            engine.insert(i as u64, lo, hi).unwrap();
            engine.get(i as u64).unwrap()
        })
        .collect()
}
