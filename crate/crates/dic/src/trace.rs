//! Trace format and generators. A trace is JSON Lines, one update per line:
//! `{"op":"insert","id":7,"l":-3,"r":12}` or `{"op":"delete","id":7}`.
//! Unknown keys are rejected.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum UpdateEvent {
    Insert {
        id: u64,
        #[serde(rename = "l")]
        lo: i64,
        #[serde(rename = "r")]
        hi: i64,
    },
    Delete { id: u64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("bad parameters: {0}")]
    BadParams(String),
}

/// Strict single-line shape; serde rejects unknown keys, the op dispatch
/// below rejects missing or stray ones.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvent {
    op: String,
    id: u64,
    #[serde(default)]
    l: Option<i64>,
    #[serde(default)]
    r: Option<i64>,
}

fn parse_event(line: &str, lineno: usize) -> Result<UpdateEvent, TraceError> {
    let err = |msg: String| TraceError::Parse { line: lineno, msg };
    let raw: RawEvent = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
    match raw.op.as_str() {
        "insert" => match (raw.l, raw.r) {
            (Some(lo), Some(hi)) => Ok(UpdateEvent::Insert { id: raw.id, lo, hi }),
            _ => Err(err("insert requires both \"l\" and \"r\"".into())),
        },
        "delete" => {
            if raw.l.is_some() || raw.r.is_some() {
                Err(err("delete takes only \"id\"".into()))
            } else {
                Ok(UpdateEvent::Delete { id: raw.id })
            }
        }
        other => Err(err(format!("unknown op {other:?}"))),
    }
}

/// Parse a whole trace; blank lines are not allowed.
pub fn parse_trace(text: &str) -> Result<Vec<UpdateEvent>, TraceError> {
    text.lines()
        .enumerate()
        .map(|(i, line)| parse_event(line, i + 1))
        .collect()
}

pub fn format_event(event: &UpdateEvent) -> String {
    serde_json::to_string(event).expect("events serialize infallibly")
}

pub fn format_trace(events: &[UpdateEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&format_event(e));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    Uniform,
    Nested,
    Mixed,
}

#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub kind: TraceKind,
    pub n: usize,
    pub delete_prob: f64,
    pub coord_max: i64,
    pub seed: u64,
}

/// Deterministic trace generation. Uniform: bounded-length random inserts.
/// Nested: n intervals all sharing coordinate 0, strictly nested. Mixed:
/// uniform inserts interleaved with deletes of random live ids.
pub fn generate(params: GenParams) -> Result<Vec<UpdateEvent>, GenError> {
    let GenParams { kind, n, delete_prob, coord_max, seed } = params;
    if !(0.0..=1.0).contains(&delete_prob) {
        return Err(GenError::BadParams(format!("delete_prob {delete_prob} outside [0, 1]")));
    }
    if coord_max < 1 {
        return Err(GenError::BadParams(format!("coord_max {coord_max} must be >= 1")));
    }
    if delete_prob != 0.0 && kind != TraceKind::Mixed {
        return Err(GenError::BadParams("delete_prob only applies to the mixed kind".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_len = (coord_max / 64).max(1);
    let random_insert = |id: u64, rng: &mut ChaCha8Rng| {
        let len = rng.random_range(0..=max_len);
        let lo = rng.random_range(0..=coord_max - len);
        UpdateEvent::Insert { id, lo, hi: lo + len }
    };
    match kind {
        TraceKind::Uniform => Ok((0..n).map(|i| random_insert(i as u64, &mut rng)).collect()),
        TraceKind::Nested => {
            if coord_max < n as i64 {
                return Err(GenError::BadParams(format!(
                    "nested needs coord_max >= n, got {coord_max} < {n}"
                )));
            }
            Ok((0..n)
                .map(|i| UpdateEvent::Insert { id: i as u64, lo: 0, hi: coord_max - i as i64 })
                .collect())
        }
        TraceKind::Mixed => {
            let mut events = Vec::with_capacity(n);
            let mut live: Vec<u64> = Vec::new();
            let mut next_id = 0u64;
            for _ in 0..n {
                if !live.is_empty() && rng.random_bool(delete_prob) {
                    let id = live.swap_remove(rng.random_range(0..live.len()));
                    events.push(UpdateEvent::Delete { id });
                } else {
                    let ev = random_insert(next_id, &mut rng);
                    events.push(ev);
                    live.push(next_id);
                    next_id += 1;
                }
            }
            Ok(events)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn events_serialize_to_the_wire_shape() {
        let ins = UpdateEvent::Insert { id: 7, lo: -3, hi: 12 };
        assert_eq!(format_event(&ins), r#"{"op":"insert","id":7,"l":-3,"r":12}"#);
        let del = UpdateEvent::Delete { id: 7 };
        assert_eq!(format_event(&del), r#"{"op":"delete","id":7}"#);
    }

    #[test]
    fn parse_rejects_unknown_keys() {
        let err = parse_trace(r#"{"op":"insert","id":1,"l":0,"r":2,"color":9}"#).unwrap_err();
        let TraceError::Parse { line, msg } = err;
        assert_eq!(line, 1);
        assert!(msg.contains("color"), "{msg}");
    }

    #[test]
    fn parse_rejects_malformed_events() {
        assert!(parse_trace(r#"{"op":"insert","id":1,"l":0}"#).is_err());
        assert!(parse_trace(r#"{"op":"delete","id":1,"l":0,"r":1}"#).is_err());
        assert!(parse_trace(r#"{"op":"upsert","id":1}"#).is_err());
        assert!(parse_trace("not json").is_err());
    }

    #[test]
    fn roundtrip_is_byte_identical() {
        let params =
            GenParams { kind: TraceKind::Mixed, n: 500, delete_prob: 0.3, coord_max: 10_000, seed: 5 };
        let events = generate(params).unwrap();
        let text = format_trace(&events);
        let reparsed = parse_trace(&text).unwrap();
        assert_eq!(events, reparsed);
        assert_eq!(format_trace(&reparsed), text);
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let params =
            GenParams { kind: TraceKind::Mixed, n: 1000, delete_prob: 0.3, coord_max: 1_000_000, seed: 42 };
        let a = format_trace(&generate(params).unwrap());
        let b = format_trace(&generate(params).unwrap());
        assert_eq!(a, b);
        let other = generate(GenParams { seed: 43, ..params }).unwrap();
        assert_ne!(a, format_trace(&other));
    }

    #[test]
    fn empty_uniform_trace() {
        let params =
            GenParams { kind: TraceKind::Uniform, n: 0, delete_prob: 0.0, coord_max: 100, seed: 7 };
        assert!(generate(params).unwrap().is_empty());
    }

    #[test]
    fn nested_traces_share_a_point() {
        let params =
            GenParams { kind: TraceKind::Nested, n: 16, delete_prob: 0.0, coord_max: 100, seed: 0 };
        let events = generate(params).unwrap();
        assert_eq!(events.len(), 16);
        for e in &events {
            let UpdateEvent::Insert { lo, hi, .. } = *e else { panic!("nested is insert-only") };
            assert_eq!(lo, 0);
            assert!(hi >= 0);
        }
    }

    #[test]
    fn mixed_deletes_target_live_ids() {
        let params =
            GenParams { kind: TraceKind::Mixed, n: 2000, delete_prob: 0.4, coord_max: 5000, seed: 11 };
        let events = generate(params).unwrap();
        let mut live = std::collections::HashSet::new();
        let mut seen = std::collections::HashSet::new();
        for e in events {
            match e {
                UpdateEvent::Insert { id, lo, hi } => {
                    assert!(seen.insert(id), "insert id reused");
                    assert!(lo <= hi);
                    live.insert(id);
                }
                UpdateEvent::Delete { id } => assert!(live.remove(&id), "delete of dead id"),
            }
        }
    }

    #[test]
    fn bad_params_are_rejected() {
        let base =
            GenParams { kind: TraceKind::Uniform, n: 10, delete_prob: 0.0, coord_max: 100, seed: 0 };
        assert!(generate(GenParams { delete_prob: 1.5, ..base }).is_err());
        assert!(generate(GenParams { delete_prob: 0.2, ..base }).is_err());
        assert!(generate(GenParams { coord_max: 0, ..base }).is_err());
        assert!(generate(GenParams { kind: TraceKind::Nested, coord_max: 5, ..base }).is_err());
    }
}
