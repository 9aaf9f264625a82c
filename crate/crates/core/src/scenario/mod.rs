//! Simulated handover cell: world model, sensors, robot controller and the
//! tick-driven simulator that executes concrete tests.

pub mod config;
pub mod fsm;
pub mod sensors;
pub mod sim;
pub mod trace;
pub mod trajectory;
pub mod world;

use thiserror::Error;

pub use config::{Mutant, RobotConfig, ScenarioConfig, SensorConfig, TimeoutConfig};
pub use fsm::{FsmState, RobotFsm, POINT_UNIVERSE, RELEASE_BRANCH_POINTS, UNIVERSE_VERSION};
pub use sensors::{sense_gpl, GplReading};
pub use sim::{run_test, ConcreteTest, SimResult};
pub use trace::{DiscardReason, EndReason, EventKind, SimTrace, TraceEvent};
pub use trajectory::{plan_trajectory, JointPath};
pub use world::{apply_stimulus, Stimulus, VoiceCommand, WorldState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("invalid scenario config: {0}")]
    Config(String),
    #[error("stimulus at {stimulus_ms} ms is earlier than the clock ({now_ms} ms)")]
    StaleTimestamp { stimulus_ms: u64, now_ms: u64 },
    #[error("unknown stimulus channel `{0}`")]
    UnknownChannel(String),
    #[error("bad value on channel `{channel}`: {reason}")]
    BadValue { channel: String, reason: String },
    #[error("malformed test: {0}")]
    MalformedTest(String),
}
