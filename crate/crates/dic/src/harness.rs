//! Trace replay with optional verification, benchmarking, and the report
//! document.

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{Engine, EngineError};
use crate::interval::{Color, Interval};
use crate::oracle::{self, Violation};
use crate::sls::SlsMode;
use crate::trace::{format_event, TraceError, UpdateEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckLevel {
    None,
    Final,
    EveryUpdate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckOutcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSet {
    pub proper: CheckOutcome,
    pub property_p: CheckOutcome,
    pub invariant_c: CheckOutcome,
    pub color_bound: CheckOutcome,
    pub level_domination: CheckOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub p50: u64,
    pub p90: u64,
    pub p99: u64,
    pub max: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub updates: u64,
    pub final_n: u64,
    pub omega: u64,
    pub colors_used: u64,
    pub bound: u64,
    pub max_level: Option<u32>,
    pub per_update_ns: Timing,
    pub checks: CheckSet,
    pub seed: Option<u64>,
    pub mode: String,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes infallibly")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("update {index} ({event}): {source}")]
    Invalid { index: usize, event: String, source: EngineError },
    #[error("update {index}: insert id {id} was already used by this trace")]
    IdReused { index: usize, id: u64 },
    #[error("bench repeat count must be >= 1")]
    BadRepeat,
}

#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub mode: SlsMode,
    pub check: CheckLevel,
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    pub violation: Option<Violation>,
    pub engine: Engine,
    pub samples: Vec<u64>,
}

fn mode_name(mode: SlsMode) -> &'static str {
    match mode {
        SlsMode::Incremental => "incremental",
        SlsMode::Dynamic => "dynamic",
    }
}

/// Nearest-rank percentile over raw samples.
fn percentile(sorted: &[u64], p: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

fn timing_summary(samples: &[u64]) -> Timing {
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    Timing {
        p50: percentile(&sorted, 50.0),
        p90: percentile(&sorted, 90.0),
        p99: percentile(&sorted, 99.0),
        max: sorted.last().copied().unwrap_or(0),
    }
}

/// First failing state checker, plus the outcome of each.
fn state_checks(live: &[Interval]) -> ([CheckOutcome; 4], Option<Violation>) {
    let results = [
        oracle::check_proper(live),
        oracle::check_property_p(live),
        oracle::check_invariant_c(live),
        oracle::check_color_bound(live),
    ];
    let mut outcomes = [CheckOutcome::Pass; 4];
    let mut first = None;
    for (i, r) in results.into_iter().enumerate() {
        if let Err(v) = r {
            outcomes[i] = CheckOutcome::Fail;
            if first.is_none() {
                first = Some(v);
            }
        }
    }
    (outcomes, first)
}

/// Replay a trace through a fresh engine. Per-update wall times are always
/// collected; checks run at the configured checkpoints and the first
/// violation stops the replay (reported in the outcome, not as an error).
pub fn run(events: &[UpdateEvent], config: RunConfig) -> Result<RunOutcome, RunError> {
    let mut engine = Engine::new(config.mode);
    let mut used_ids: HashSet<u64> = HashSet::new();
    let mut samples: Vec<u64> = Vec::with_capacity(events.len());
    let mut applied_inserts: Vec<u64> = Vec::new();
    let mut insert_only = true;
    let mut violation: Option<Violation> = None;
    let mut state_outcomes = [CheckOutcome::Skipped; 4];

    for (index, &event) in events.iter().enumerate() {
        let invalid = |source| RunError::Invalid { index, event: format_event(&event), source };
        match event {
            UpdateEvent::Insert { id, lo, hi } => {
                if !used_ids.insert(id) {
                    return Err(RunError::IdReused { index, id });
                }
                let t0 = Instant::now();
                engine.insert(id, lo, hi).map_err(invalid)?;
                samples.push(t0.elapsed().as_nanos() as u64);
                applied_inserts.push(id);
            }
            UpdateEvent::Delete { id } => {
                insert_only = false;
                let t0 = Instant::now();
                engine.delete(id).map_err(invalid)?;
                samples.push(t0.elapsed().as_nanos() as u64);
            }
        }
        if config.check == CheckLevel::EveryUpdate {
            let (outcomes, first) = state_checks(&engine.live_intervals());
            state_outcomes = outcomes;
            if first.is_some() {
                violation = first;
                break;
            }
        }
    }

    if config.check == CheckLevel::Final && violation.is_none() {
        let (outcomes, first) = state_checks(&engine.live_intervals());
        state_outcomes = outcomes;
        violation = first;
    }

    let mut domination = CheckOutcome::Skipped;
    if config.check != CheckLevel::None && insert_only {
        let placed: Vec<Interval> = applied_inserts
            .iter()
            .map(|&id| engine.get(id).expect("insert-only replay keeps every interval live"))
            .collect();
        domination = CheckOutcome::Pass;
        for (i, iv) in placed.iter().enumerate() {
            let bound = oracle::kt_level(&placed, i);
            if iv.level > bound {
                domination = CheckOutcome::Fail;
                if violation.is_none() {
                    violation = Some(Violation {
                        rule: "level_domination",
                        ids: vec![iv.id],
                        detail: format!("level {} exceeds the clique bound {bound}", iv.level),
                    });
                }
                break;
            }
        }
    }

    let live = engine.live_intervals();
    let omega = oracle::omega(&live) as u64;
    let colors: BTreeSet<Color> = live.iter().map(|iv| iv.color()).collect();
    let report = Report {
        updates: samples.len() as u64,
        final_n: live.len() as u64,
        omega,
        colors_used: colors.len() as u64,
        bound: if omega == 0 { 0 } else { 3 * omega - 2 },
        max_level: engine.max_level(),
        per_update_ns: timing_summary(&samples),
        checks: CheckSet {
            proper: state_outcomes[0],
            property_p: state_outcomes[1],
            invariant_c: state_outcomes[2],
            color_bound: state_outcomes[3],
            level_domination: domination,
        },
        seed: config.seed,
        mode: mode_name(config.mode).to_string(),
    };
    Ok(RunOutcome { report, violation, engine, samples })
}

/// Timed replays: one warm-up (excluded), then `repeat` measured replays,
/// pooled raw samples. Replays run on independent engines, in parallel when
/// the host has the cores for it.
pub fn bench(
    events: &[UpdateEvent],
    mode: SlsMode,
    repeat: usize,
    seed: Option<u64>,
) -> Result<Report, RunError> {
    if repeat == 0 {
        return Err(RunError::BadRepeat);
    }
    let config = RunConfig { mode, check: CheckLevel::None, seed };
    let warmup = run(events, config)?;

    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(repeat);
    let mut shares = vec![repeat / workers; workers];
    for share in shares.iter_mut().take(repeat % workers) {
        *share += 1;
    }
    let mut pooled: Vec<u64> = Vec::with_capacity(events.len() * repeat);
    let results: Vec<Result<Vec<u64>, RunError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = shares
            .iter()
            .map(|&share| {
                scope.spawn(move || {
                    let mut local = Vec::with_capacity(events.len() * share);
                    for _ in 0..share {
                        local.extend(run(events, config)?.samples);
                    }
                    Ok(local)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect()
    });
    for r in results {
        pooled.extend(r?);
    }

    let mut report = warmup.report;
    report.per_update_ns = timing_summary(&pooled);
    Ok(report)
}
