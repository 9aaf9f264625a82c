use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::fsm::FsmState;
use super::sensors::GplReading;
use super::world::VoiceCommand;

pub const SIM_TRACE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscardReason {
    Decision,
    ReadyTimeout,
    SenseTimeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndReason {
    Fsm,
    Horizon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EventKind {
    Stimulus {
        channel: String,
        value: Value,
    },
    VoiceRecognized {
        command: VoiceCommand,
    },
    VoiceDropped {
        command: VoiceCommand,
    },
    Transition {
        from: FsmState,
        to: FsmState,
        point: String,
    },
    Sensing {
        gpl: GplReading,
    },
    Signal,
    GripperClose {
        hand_distance_m: f64,
    },
    GripperOpen,
    Release {
        attempt: u8,
    },
    Discard {
        attempt: u8,
        reason: DiscardReason,
    },
    /// Per-joint speed over the last tick while the arm moves.
    Speed {
        joint_speeds: [f64; 3],
    },
    TimedOut,
    ReportComplete,
    End {
        reason: EndReason,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub t: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub test_id: String,
    pub events: Vec<TraceEvent>,
}

impl SimTrace {
    pub fn push(&mut self, t: u64, kind: EventKind) {
        debug_assert!(self.events.last().is_none_or(|e| e.t <= t));
        self.events.push(TraceEvent { t, kind });
    }

    pub fn end_time(&self) -> u64 {
        self.events.last().map(|e| e.t).unwrap_or(0)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::json!({
            "schema": "sim-trace",
            "version": SIM_TRACE_SCHEMA_VERSION,
            "test_id": self.test_id,
        })
        .to_string();
        out.push('\n');
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Value = match lines.next() {
            Some(l) => serde_json::from_str(l)?,
            None => Value::Null,
        };
        let test_id = header
            .get("test_id")
            .and_then(Value::as_str)
            .unwrap_or_default()
            .to_string();
        let events = lines
            .map(serde_json::from_str)
            .collect::<Result<Vec<TraceEvent>, _>>()?;
        Ok(Self { test_id, events })
    }
}
