//! Assertion monitors, coverage collection and the cross-product classifier.

pub mod classify;
pub mod coverage;
pub mod monitor;
pub mod report;

use thiserror::Error;

pub use classify::{classify_cross_product, tuple_id, Outcome, TUPLE_COUNT, TUPLE_LABELS};
pub use coverage::{merge_coverage, CoverageState, ReqSummary, VerdictTable};
pub use monitor::{
    monitor, monitor_all, monitor_req1, monitor_req2, monitor_req3, monitor_req4, MonitorParams, MonitorResult,
    ReqId, Spawn, SpawnMode, TestFlags, Verdict,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("test {test_id}: trace does not fit any cross-product tuple: {reason}")]
    UnclassifiableTrace { test_id: String, reason: String },
    #[error("cannot merge coverage from universes `{left}` and `{right}`")]
    IncompatibleUniverse { left: String, right: String },
}
