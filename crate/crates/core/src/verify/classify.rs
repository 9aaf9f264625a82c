//! Cross-product coverage over ⟨human behaviour, robot outcome⟩ tuples.

use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::scenario::{DiscardReason, EndReason, EventKind, FsmState, SimTrace};

pub const TUPLE_COUNT: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// Every attempt sensed all-ok and released.
    AllOk,
    /// Some attempt sensed a bad pose.
    NotOk,
    /// The human went away: ready or sensing timed out, or the run hit the
    /// horizon mid-attempt.
    TimedOut,
}

/// Human and robot halves of each tuple, in table order.
pub const TUPLE_LABELS: [(&str, &str); TUPLE_COUNT] = [
    ("4 legs", "GPL=(1,1,1) x4"),
    ("4 legs", "GPL!=(1,1,1) in >=1 attempt"),
    ("4 legs + bored", "Sensing timed out"),
    ("3 legs", "GPL=(1,1,1) x3"),
    ("3 legs", "GPL!=(1,1,1) in >=1 attempt"),
    ("3 legs + bored", "Sensing timed out"),
    ("2 legs", "GPL=(1,1,1) x2"),
    ("2 legs", "GPL!=(1,1,1) in >=1 attempt"),
    ("2 legs + bored", "Sensing timed out"),
    ("1 leg", "GPL=(1,1,1) x1"),
    ("1 leg", "GPL!=(1,1,1)"),
    ("1 leg + bored", "Sensing timed out"),
    ("No leg", "Timed out"),
];

/// Tuple id for `n` attempts with `outcome`.
pub fn tuple_id(n: u8, outcome: Outcome) -> u8 {
    assert!((1..=4).contains(&n), "attempts must be 1..=4");
    let col = match outcome {
        Outcome::AllOk => 1,
        Outcome::NotOk => 2,
        Outcome::TimedOut => 3,
    };
    (4 - n) * 3 + col
}

/// Map a completed run to one of the 13 tuples. `n` counts legs the robot
/// picked up for the human. A run whose shape the protocol does not allow
/// is reported, not guessed.
pub fn classify_cross_product(trace: &SimTrace) -> Result<u8, VerifyError> {
    let bad = |why: &str| VerifyError::UnclassifiableTrace {
        test_id: trace.test_id.clone(),
        reason: why.to_string(),
    };
    let mut attempts = 0u8;
    let mut open = false;
    let mut last_sensing = None;
    let mut timed_out_attempt = false;
    let mut not_ok = false;
    let mut robot_timed_out = false;
    let mut horizon = false;
    for e in &trace.events {
        match &e.kind {
            EventKind::Transition { to: FsmState::PickUp, .. } => {
                attempts += 1;
                open = true;
                last_sensing = None;
            }
            EventKind::Sensing { gpl } => last_sensing = Some(*gpl),
            EventKind::Release { .. } => {
                match last_sensing {
                    Some(g) if g.all_ok() => {}
                    _ => return Err(bad("release without an all-ok reading")),
                }
                open = false;
            }
            EventKind::Discard { reason, .. } => {
                match reason {
                    DiscardReason::Decision => not_ok = true,
                    DiscardReason::ReadyTimeout | DiscardReason::SenseTimeout => timed_out_attempt = true,
                }
                open = false;
            }
            EventKind::TimedOut => robot_timed_out = true,
            EventKind::End { reason: EndReason::Horizon } => horizon = true,
            _ => {}
        }
    }
    if !trace.events.iter().any(|e| matches!(e.kind, EventKind::End { .. })) {
        return Err(bad("trace has no end"));
    }
    if horizon && open {
        timed_out_attempt = true;
    }
    match attempts {
        0 if robot_timed_out => Ok(13),
        0 => Err(bad("no attempt and no robot timeout")),
        1..=4 => {
            let outcome = if timed_out_attempt {
                Outcome::TimedOut
            } else if not_ok {
                Outcome::NotOk
            } else {
                Outcome::AllOk
            };
            Ok(tuple_id(attempts, outcome))
        }
        _ => Err(bad("more than four attempts")),
    }
}
