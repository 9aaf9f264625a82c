//! World state and stimulus application.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::ScenarioError;

pub type Vec3 = [f64; 3];

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale(a: Vec3, k: f64) -> Vec3 {
    [a[0] * k, a[1] * k, a[2] * k]
}

pub fn norm(a: Vec3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

pub fn dist(a: Vec3, b: Vec3) -> f64 {
    norm(sub(a, b))
}

pub fn normalize(a: Vec3) -> Option<Vec3> {
    let n = norm(a);
    (n > 1e-12 && n.is_finite()).then(|| scale(a, 1.0 / n))
}

/// Angle between two vectors, degrees.
pub fn angle_deg(a: Vec3, b: Vec3) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 180.0;
    }
    let c = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (na * nb);
    c.clamp(-1.0, 1.0).acos().to_degrees()
}

/// Fixed geometry of the assembly cell.
pub mod cell {
    use super::Vec3;

    pub const ROBOT_BASE: Vec3 = [0.0, 0.0, 1.0];
    pub const UPPER_ARM_M: f64 = 0.4;
    pub const FOREARM_M: f64 = 0.4;
    pub const HUMAN_HEAD: Vec3 = [1.5, 0.0, 1.6];
    pub const HUMAN_HAND_START: Vec3 = [1.1, 0.25, 1.0];

    /// Joint configurations: base yaw, shoulder pitch, elbow pitch.
    pub const REST: [f64; 3] = [0.6, 0.0, -0.5];
    pub const PICK: [f64; 3] = [0.8, -0.2, -0.6];
    pub const HOLD_OUT: [f64; 3] = [0.0, 0.2, -0.4];
}

/// Gripper position for a joint configuration.
pub fn gripper_position(q: [f64; 3]) -> Vec3 {
    let reach = cell::UPPER_ARM_M * q[1].cos() + cell::FOREARM_M * (q[1] + q[2]).cos();
    let height = cell::UPPER_ARM_M * q[1].sin() + cell::FOREARM_M * (q[1] + q[2]).sin();
    add(
        cell::ROBOT_BASE,
        [reach * q[0].cos(), reach * q[0].sin(), height],
    )
}

/// Where the leg sits when the robot holds it out to the human.
pub fn handover_point() -> Vec3 {
    gripper_position(cell::HOLD_OUT)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gripper {
    Open,
    Closed,
    HoldingLeg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VoiceCommand {
    RequestLeg,
    Ready,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandMotion {
    pub from: Vec3,
    pub to: Vec3,
    pub start_ms: u64,
    pub speed_m_s: f64,
}

impl HandMotion {
    pub fn position_at(&self, t_ms: u64) -> Vec3 {
        let total = dist(self.from, self.to);
        if total == 0.0 {
            return self.to;
        }
        let travelled = self.speed_m_s * t_ms.saturating_sub(self.start_ms) as f64 / 1000.0;
        if travelled >= total {
            self.to
        } else {
            add(self.from, scale(sub(self.to, self.from), travelled / total))
        }
    }

    pub fn arrival_ms(&self) -> u64 {
        let total = dist(self.from, self.to);
        self.start_ms + (total / self.speed_m_s * 1000.0).ceil() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub sim_time_ms: u64,
    pub human_hand_pos: Vec3,
    pub hand_motion: Option<HandMotion>,
    pub human_gaze_dir: Vec3,
    pub human_grip_force_n: f64,
    pub leg_pos: Vec3,
    pub robot_joints: [f64; 3],
    pub robot_gripper: Gripper,
    pub legs_delivered: u8,
    pub voice_channel: Option<VoiceCommand>,
}

impl Default for WorldState {
    fn default() -> Self {
        let gaze = normalize(sub(cell::ROBOT_BASE, cell::HUMAN_HEAD)).expect("nonzero");
        Self {
            sim_time_ms: 0,
            human_hand_pos: cell::HUMAN_HAND_START,
            hand_motion: None,
            human_gaze_dir: gaze,
            human_grip_force_n: 0.0,
            leg_pos: gripper_position(cell::PICK),
            robot_joints: cell::REST,
            robot_gripper: Gripper::Open,
            legs_delivered: 0,
            voice_channel: None,
        }
    }
}

impl WorldState {
    /// Move the clock forward, updating the hand along its current motion.
    pub fn advance_to(&mut self, t_ms: u64) {
        debug_assert!(t_ms >= self.sim_time_ms);
        self.sim_time_ms = t_ms;
        if let Some(m) = self.hand_motion {
            self.human_hand_pos = m.position_at(t_ms);
            if t_ms >= m.arrival_ms() {
                self.hand_motion = None;
            }
        }
    }

    pub fn gripper_pos(&self) -> Vec3 {
        gripper_position(self.robot_joints)
    }
}

/// Wire form of one timed input: `{t_ms, channel, value}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stimulus {
    pub t_ms: u64,
    pub channel: String,
    pub value: Value,
}

/// Decoded stimulus.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Voice(VoiceCommand),
    Hand { target: Vec3, speed_m_s: f64 },
    Gaze(Vec3),
    Grip(f64),
}

impl Stimulus {
    pub fn voice(t_ms: u64, cmd: VoiceCommand) -> Self {
        Self {
            t_ms,
            channel: "voice".into(),
            value: serde_json::to_value(cmd).expect("serializes"),
        }
    }

    pub fn hand(t_ms: u64, target: Vec3, speed_m_s: f64) -> Self {
        Self {
            t_ms,
            channel: "hand".into(),
            value: serde_json::json!({ "target": target, "speed": speed_m_s }),
        }
    }

    pub fn gaze(t_ms: u64, dir: Vec3) -> Self {
        Self {
            t_ms,
            channel: "gaze".into(),
            value: serde_json::json!(dir),
        }
    }

    pub fn grip(t_ms: u64, force_n: f64) -> Self {
        Self {
            t_ms,
            channel: "grip".into(),
            value: serde_json::json!(force_n),
        }
    }

    pub fn decode(&self) -> Result<Input, ScenarioError> {
        let bad = |why: &str| ScenarioError::BadValue {
            channel: self.channel.clone(),
            reason: why.to_string(),
        };
        let vec3 = |v: &Value| -> Option<Vec3> {
            let a = v.as_array()?;
            if a.len() != 3 {
                return None;
            }
            let mut out = [0.0; 3];
            for (o, x) in out.iter_mut().zip(a) {
                *o = x.as_f64().filter(|f| f.is_finite())?;
            }
            Some(out)
        };
        match self.channel.as_str() {
            "voice" => serde_json::from_value(self.value.clone())
                .map(Input::Voice)
                .map_err(|_| bad("expected \"request-leg\" or \"ready\"")),
            "hand" => {
                let target = self
                    .value
                    .get("target")
                    .and_then(vec3)
                    .ok_or_else(|| bad("target must be [x, y, z]"))?;
                let speed = self
                    .value
                    .get("speed")
                    .and_then(Value::as_f64)
                    .filter(|s| *s > 0.0 && s.is_finite())
                    .ok_or_else(|| bad("speed must be positive"))?;
                Ok(Input::Hand {
                    target,
                    speed_m_s: speed,
                })
            }
            "gaze" => {
                let v = vec3(&self.value).ok_or_else(|| bad("direction must be [x, y, z]"))?;
                normalize(v)
                    .map(Input::Gaze)
                    .ok_or_else(|| bad("direction must be nonzero"))
            }
            "grip" => self
                .value
                .as_f64()
                .filter(|f| *f >= 0.0 && f.is_finite())
                .map(Input::Grip)
                .ok_or_else(|| bad("force must be a non-negative number")),
            other => Err(ScenarioError::UnknownChannel(other.to_string())),
        }
    }
}

/// Route one stimulus to the world component it drives.
pub fn apply_stimulus(world: &WorldState, stimulus: &Stimulus) -> Result<WorldState, ScenarioError> {
    if stimulus.t_ms < world.sim_time_ms {
        return Err(ScenarioError::StaleTimestamp {
            stimulus_ms: stimulus.t_ms,
            now_ms: world.sim_time_ms,
        });
    }
    let input = stimulus.decode()?;
    let mut w = world.clone();
    w.advance_to(stimulus.t_ms);
    match input {
        Input::Voice(cmd) => w.voice_channel = Some(cmd),
        Input::Hand { target, speed_m_s } => {
            if dist(target, w.human_hand_pos) > 0.0 {
                w.hand_motion = Some(HandMotion {
                    from: w.human_hand_pos,
                    to: target,
                    start_ms: stimulus.t_ms,
                    speed_m_s,
                });
            }
        }
        Input::Gaze(dir) => w.human_gaze_dir = dir,
        Input::Grip(f) => w.human_grip_force_n = f,
    }
    Ok(w)
}
