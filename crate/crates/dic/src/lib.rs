//! Dynamic interval coloring.
//!
//! The engine in [`engine`] maintains a proper coloring of a changing set of
//! closed integer intervals using at most `3w - 2` colors, where `w` is the
//! current maximum number of pairwise-intersecting intervals. Colors are
//! `(level, offset)` pairs; an interval's level is decided when it arrives by
//! probing the recorded heights at its endpoints, and deletions repair the
//! small set of neighbors whose level witness disappeared.
//!
//! Around the engine:
//!
//! * [`index`]: the augmented balanced search tree used for stabbing and
//!   overlap queries,
//! * [`sls`]: per-endpoint level occupancy records,
//! * [`oracle`]: slow, independent reference implementations used to audit
//!   engine states,
//! * [`trace`]: the JSONL update-trace format and workload generators,
//! * [`harness`]: trace replay, verification checkpoints, benchmarking, and
//!   the report document,
//! * [`omv`]: an application: online matrix-vector multiplication for
//!   consecutive-ones matrices via interval stabbing.

pub mod engine;
pub mod harness;
pub mod index;
pub mod interval;
pub mod omv;
pub mod oracle;
pub mod sls;
pub mod trace;

pub use engine::{DeleteOutcome, Engine, EngineError, Recolor, Stats};
pub use harness::{bench, run, CheckLevel, CheckOutcome, Report, RunConfig, RunError, RunOutcome};
pub use interval::{Color, Interval};
pub use sls::SlsMode;
