//! Abstract human/environment actions and sequences.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::beliefs::{BeliefVector, ROUNDS};
use super::TestgenError;
use crate::agentlang::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quality {
    Ok,
    Bad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distance {
    Close,
    Far,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Speed {
    Slow,
    Fast,
}

/// One symbol of the generation alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name")]
pub enum ActionName {
    RequestLeg,
    AwaitRobotSignal,
    SetGaze { quality: Quality },
    SetPressure { quality: Quality },
    MoveHand { distance: Distance, speed: Speed },
    SayReady,
    GoBored,
    Idle,
}

impl ActionName {
    pub const ALPHABET: [ActionName; 13] = [
        ActionName::RequestLeg,
        ActionName::AwaitRobotSignal,
        ActionName::SetGaze { quality: Quality::Ok },
        ActionName::SetGaze { quality: Quality::Bad },
        ActionName::SetPressure { quality: Quality::Ok },
        ActionName::SetPressure { quality: Quality::Bad },
        ActionName::MoveHand { distance: Distance::Close, speed: Speed::Slow },
        ActionName::MoveHand { distance: Distance::Close, speed: Speed::Fast },
        ActionName::MoveHand { distance: Distance::Far, speed: Speed::Slow },
        ActionName::MoveHand { distance: Distance::Far, speed: Speed::Fast },
        ActionName::SayReady,
        ActionName::GoBored,
        ActionName::Idle,
    ];

    /// Base name without parameters, e.g. `move_hand`.
    pub fn base(&self) -> &'static str {
        match self {
            ActionName::RequestLeg => "request_leg",
            ActionName::AwaitRobotSignal => "await_robot_signal",
            ActionName::SetGaze { .. } => "set_gaze",
            ActionName::SetPressure { .. } => "set_pressure",
            ActionName::MoveHand { .. } => "move_hand",
            ActionName::SayReady => "say_ready",
            ActionName::GoBored => "go_bored",
            ActionName::Idle => "idle",
        }
    }

    /// Whether the action only makes sense after this round's request.
    pub fn needs_request(&self) -> bool {
        matches!(self, ActionName::AwaitRobotSignal | ActionName::SayReady)
    }
}

impl fmt::Display for ActionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = |q: &Quality| match q {
            Quality::Ok => "ok",
            Quality::Bad => "bad",
        };
        match self {
            ActionName::SetGaze { quality } | ActionName::SetPressure { quality } => {
                write!(f, "{}({})", self.base(), q(quality))
            }
            ActionName::MoveHand { distance, speed } => {
                let d = if *distance == Distance::Close { "close" } else { "far" };
                let s = if *speed == Speed::Slow { "slow" } else { "fast" };
                write!(f, "move_hand({d},{s})")
            }
            _ => f.write_str(self.base()),
        }
    }
}

impl FromStr for ActionName {
    type Err = TestgenError;

    /// Accepts the display form, with or without spaces after commas.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        ActionName::ALPHABET
            .into_iter()
            .find(|a| a.to_string() == compact)
            .ok_or_else(|| TestgenError::UnregisteredAction(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbstractAction {
    #[serde(flatten)]
    pub name: ActionName,
    pub round: u8,
}

impl AbstractAction {
    pub fn new(name: ActionName, round: u8) -> Self {
        Self { name, round }
    }

    /// Decode an external action emitted by the human agent. The round is
    /// the trailing integer argument; actions without one take `current`.
    pub fn from_term(t: &Term, current: u8) -> Result<Self, TestgenError> {
        let mut args: Vec<&str> = t.args.iter().map(|a| a.functor.as_str()).collect();
        let round = match args.last().and_then(|a| a.parse::<u8>().ok()) {
            Some(r) => {
                args.pop();
                r
            }
            None => current,
        };
        let text = if args.is_empty() {
            t.functor.clone()
        } else {
            format!("{}({})", t.functor, args.join(","))
        };
        Ok(Self::new(text.parse()?, round))
    }
}

impl fmt::Display for AbstractAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.name, self.round)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    Bdi,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbstractTestSequence {
    pub id: String,
    pub generator: Generator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beliefs: Option<BeliefVector>,
    pub actions: Vec<AbstractAction>,
}

impl AbstractTestSequence {
    pub fn count(&self, name: ActionName) -> usize {
        self.actions.iter().filter(|a| a.name == name).count()
    }
}

/// Protocol ordering: rounds start at 1 and never go back, a new round
/// begins with its request, each round is requested at most once, and
/// awaiting the signal or saying ready needs this round's request first.
pub fn validate_sequence(actions: &[AbstractAction]) -> Result<(), TestgenError> {
    let invalid = |i: usize, why: &str| TestgenError::InvalidSequence {
        index: i,
        reason: why.to_string(),
    };
    let mut round = 1u8;
    let mut requested = false;
    for (i, a) in actions.iter().enumerate() {
        if a.round < 1 || a.round > ROUNDS {
            return Err(invalid(i, "round outside 1..=4"));
        }
        if a.round < round {
            return Err(invalid(i, "round index decreases"));
        }
        if a.round > round {
            if a.round != round + 1 || !requested || a.name != ActionName::RequestLeg {
                return Err(invalid(i, "a new round must start with its request"));
            }
            round = a.round;
            requested = false;
        }
        match a.name {
            ActionName::RequestLeg if requested => return Err(invalid(i, "round requested twice")),
            ActionName::RequestLeg => requested = true,
            n if n.needs_request() && !requested => {
                return Err(invalid(i, "action before this round's request"))
            }
            _ => {}
        }
    }
    Ok(())
}
