//! Robot control state machine: the code under test.
//!
//! Every state entry, transition and decision branch marks an
//! instrumentation point; the set of points is fixed by [`POINT_UNIVERSE`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::config::{Mutant, ScenarioConfig};
use super::sensors::GplReading;
use super::trace::{DiscardReason, EventKind};
use super::trajectory::{plan_trajectory, JointPath};
use super::world::{cell, dist, gripper_position, Gripper, VoiceCommand, WorldState};

pub const MAX_ATTEMPTS: u8 = 4;
pub const TABLE_LEGS: u8 = 4;

pub const UNIVERSE_VERSION: &str = "robot-fsm/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FsmState {
    WaitRequest,
    PickUp,
    HoldOut,
    SignalHuman,
    WaitReady,
    Sense,
    Decide,
    Release,
    Discard,
    ReportComplete,
    TimedOut,
    End,
}

impl FsmState {
    pub const ALL: [FsmState; 12] = [
        FsmState::WaitRequest,
        FsmState::PickUp,
        FsmState::HoldOut,
        FsmState::SignalHuman,
        FsmState::WaitReady,
        FsmState::Sense,
        FsmState::Decide,
        FsmState::Release,
        FsmState::Discard,
        FsmState::ReportComplete,
        FsmState::TimedOut,
        FsmState::End,
    ];
}

impl fmt::Display for FsmState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub const POINT_UNIVERSE: &[&str] = &[
    "state:WaitRequest",
    "state:PickUp",
    "state:HoldOut",
    "state:SignalHuman",
    "state:WaitReady",
    "state:Sense",
    "state:Decide",
    "state:Release",
    "state:Discard",
    "state:ReportComplete",
    "state:TimedOut",
    "state:End",
    "tr:WaitRequest->PickUp",
    "tr:WaitRequest->TimedOut",
    "tr:TimedOut->End",
    "tr:PickUp->HoldOut",
    "tr:HoldOut->SignalHuman",
    "tr:SignalHuman->WaitReady",
    "tr:WaitReady->Sense",
    "tr:WaitReady->Discard",
    "tr:Sense->Decide",
    "tr:Sense->Discard",
    "tr:Decide->Release",
    "tr:Decide->Discard",
    "tr:Release->WaitRequest",
    "tr:Release->ReportComplete",
    "tr:Release->End",
    "tr:Discard->WaitRequest",
    "tr:Discard->End",
    "tr:ReportComplete->End",
    "branch:voice:request-recognized",
    "branch:voice:ready-recognized",
    "branch:voice:ignored",
    "branch:pickup:gripper-closed",
    "branch:sense:face-lost",
    "branch:decide:all-ok",
    "branch:decide:not-ok",
    "branch:complete:in-time",
    "branch:complete:late",
    "branch:attempts:exhausted",
];

/// Points on the release path of the handover decision.
pub const RELEASE_BRANCH_POINTS: &[&str] = &[
    "state:Decide",
    "branch:decide:all-ok",
    "tr:Decide->Release",
    "state:Release",
];

pub fn point_id(p: &str) -> &'static str {
    POINT_UNIVERSE
        .iter()
        .find(|u| **u == p)
        .copied()
        .unwrap_or_else(|| panic!("instrumentation point `{p}` is not in the universe"))
}

#[derive(Debug, Clone, Default)]
pub struct FsmInputs {
    /// Voice command recognised this tick.
    pub voice: Option<VoiceCommand>,
    /// Reading delivered when the sensing window completes.
    pub gpl: Option<GplReading>,
}

#[derive(Debug, Clone)]
pub struct RobotFsm {
    pub state: FsmState,
    pub attempt_counter: u8,
    pub entered_ms: u64,
    motion: Option<(u64, JointPath)>,
    pending_discard: DiscardReason,
    reading: Option<GplReading>,
    face_lost_noted: bool,
    pub hits: BTreeMap<&'static str, u64>,
}

impl Default for RobotFsm {
    fn default() -> Self {
        Self::new()
    }
}

impl RobotFsm {
    pub fn new() -> Self {
        let mut fsm = Self {
            state: FsmState::WaitRequest,
            attempt_counter: 0,
            entered_ms: 0,
            motion: None,
            pending_discard: DiscardReason::Decision,
            reading: None,
            face_lost_noted: false,
            hits: BTreeMap::new(),
        };
        fsm.hit("state:WaitRequest");
        fsm
    }

    fn hit(&mut self, p: &str) {
        *self.hits.entry(point_id(p)).or_insert(0) += 1;
    }

    pub fn is_done(&self) -> bool {
        self.state == FsmState::End
    }

    pub fn is_moving(&self) -> bool {
        self.motion.is_some()
    }

    /// True when the simulator should take a sensor reading this tick.
    pub fn wants_reading(&self, now_ms: u64, cfg: &ScenarioConfig) -> bool {
        self.state == FsmState::Sense && now_ms >= self.entered_ms + cfg.robot.sense_window_ms
    }

    fn enter(&mut self, to: FsmState, now: u64, events: &mut Vec<EventKind>) {
        let from = self.state;
        let point = format!("tr:{from}->{to}");
        self.hit(&point);
        self.hit(&format!("state:{to}"));
        events.push(EventKind::Transition {
            from,
            to,
            point: point_id(&point).to_string(),
        });
        self.state = to;
        self.entered_ms = now;
    }

    fn start_motion(&mut self, world: &WorldState, target: [f64; 3], cfg: &ScenarioConfig) {
        let path = plan_trajectory(world.robot_joints, target, cfg.robot.speed_cap_rad_s);
        self.motion = Some((world.sim_time_ms, path));
    }

    /// Advance the arm along its current path. Returns true once the path is
    /// finished (or when there is none).
    fn follow_motion(&mut self, world: &mut WorldState) -> bool {
        let Some((start, path)) = &self.motion else {
            return true;
        };
        let offset = world.sim_time_ms - start;
        world.robot_joints = path.position_at(offset);
        if world.robot_gripper == Gripper::HoldingLeg {
            world.leg_pos = world.gripper_pos();
        }
        if offset >= path.duration_ms() {
            self.motion = None;
            true
        } else {
            false
        }
    }

    fn finish_attempt(&mut self, world: &WorldState, now: u64, cfg: &ScenarioConfig, events: &mut Vec<EventKind>) {
        if world.legs_delivered >= TABLE_LEGS {
            if now <= cfg.timeouts.table_ms {
                self.hit("branch:complete:in-time");
                self.enter(FsmState::ReportComplete, now, events);
                events.push(EventKind::ReportComplete);
            } else {
                self.hit("branch:complete:late");
                self.enter(FsmState::End, now, events);
            }
        } else if self.attempt_counter >= MAX_ATTEMPTS {
            self.hit("branch:attempts:exhausted");
            self.enter(FsmState::End, now, events);
        } else {
            self.enter(FsmState::WaitRequest, now, events);
        }
    }

    /// One control period of `dt_ms` ending at `world.sim_time_ms`.
    pub fn tick(
        &mut self,
        world: &mut WorldState,
        inputs: &FsmInputs,
        dt_ms: u64,
        cfg: &ScenarioConfig,
    ) -> Vec<EventKind> {
        assert!(dt_ms > 0, "tick period must be positive");
        let now = world.sim_time_ms;
        let mut events = Vec::new();

        let before = world.robot_joints;
        let arrived = self.follow_motion(world);
        let after = world.robot_joints;
        if before != after {
            let dt = dt_ms as f64 / 1000.0;
            events.push(EventKind::Speed {
                joint_speeds: [
                    (after[0] - before[0]).abs() / dt,
                    (after[1] - before[1]).abs() / dt,
                    (after[2] - before[2]).abs() / dt,
                ],
            });
        }

        let expected_voice = match self.state {
            FsmState::WaitRequest => Some(VoiceCommand::RequestLeg),
            FsmState::WaitReady => Some(VoiceCommand::Ready),
            _ => None,
        };
        let heard = inputs.voice.filter(|v| Some(*v) == expected_voice);
        if inputs.voice.is_some() && heard.is_none() {
            self.hit("branch:voice:ignored");
        }

        let in_state = now.saturating_sub(self.entered_ms);
        match self.state {
            FsmState::WaitRequest => {
                if heard.is_some() {
                    self.hit("branch:voice:request-recognized");
                    self.enter(FsmState::PickUp, now, &mut events);
                    self.start_motion(world, cell::PICK, cfg);
                } else if in_state >= cfg.timeouts.wait_request_ms {
                    self.enter(FsmState::TimedOut, now, &mut events);
                    events.push(EventKind::TimedOut);
                }
            }
            FsmState::PickUp => {
                if arrived {
                    self.hit("branch:pickup:gripper-closed");
                    events.push(EventKind::GripperClose {
                        hand_distance_m: dist(world.human_hand_pos, world.gripper_pos()),
                    });
                    world.robot_gripper = Gripper::HoldingLeg;
                    world.leg_pos = world.gripper_pos();
                    self.enter(FsmState::HoldOut, now, &mut events);
                    self.start_motion(world, cell::HOLD_OUT, cfg);
                }
            }
            FsmState::HoldOut => {
                if arrived {
                    self.enter(FsmState::SignalHuman, now, &mut events);
                    events.push(EventKind::Signal);
                }
            }
            FsmState::SignalHuman => {
                self.enter(FsmState::WaitReady, now, &mut events);
            }
            FsmState::WaitReady => {
                if heard.is_some() {
                    self.hit("branch:voice:ready-recognized");
                    self.face_lost_noted = false;
                    self.enter(FsmState::Sense, now, &mut events);
                } else if in_state >= cfg.timeouts.wait_ready_ms {
                    self.pending_discard = DiscardReason::ReadyTimeout;
                    self.enter(FsmState::Discard, now, &mut events);
                    self.discard(world, now, &mut events);
                }
            }
            FsmState::Sense => {
                if let Some(r) = inputs.gpl {
                    self.reading = Some(r);
                    events.push(EventKind::Sensing { gpl: r });
                    self.enter(FsmState::Decide, now, &mut events);
                } else if in_state >= cfg.timeouts.sense_ms {
                    self.pending_discard = DiscardReason::SenseTimeout;
                    self.enter(FsmState::Discard, now, &mut events);
                    self.discard(world, now, &mut events);
                } else if self.wants_reading(now, cfg) && !self.face_lost_noted {
                    self.face_lost_noted = true;
                    self.hit("branch:sense:face-lost");
                }
            }
            FsmState::Decide => {
                if in_state >= cfg.robot.release_latency_ms {
                    let ok = self.reading.is_some_and(|r| r.all_ok());
                    let release = ok || cfg.robot.mutant == Mutant::UnconditionalRelease;
                    if ok {
                        self.hit("branch:decide:all-ok");
                    } else {
                        self.hit("branch:decide:not-ok");
                    }
                    self.reading = None;
                    if release {
                        self.enter(FsmState::Release, now, &mut events);
                        self.release(world, now, cfg, &mut events);
                    } else {
                        self.pending_discard = DiscardReason::Decision;
                        self.enter(FsmState::Discard, now, &mut events);
                        self.discard(world, now, &mut events);
                    }
                }
            }
            FsmState::Release | FsmState::Discard => {
                self.finish_attempt(world, now, cfg, &mut events);
            }
            FsmState::ReportComplete | FsmState::TimedOut => {
                self.enter(FsmState::End, now, &mut events);
            }
            FsmState::End => {}
        }
        events
    }

    fn release(&mut self, world: &mut WorldState, _now: u64, cfg: &ScenarioConfig, events: &mut Vec<EventKind>) {
        world.robot_gripper = Gripper::Open;
        events.push(EventKind::GripperOpen);
        world.legs_delivered = (world.legs_delivered + 1).min(TABLE_LEGS);
        world.leg_pos = world.human_hand_pos;
        self.attempt_counter += 1;
        events.push(EventKind::Release {
            attempt: self.attempt_counter,
        });
        if cfg.robot.mutant == Mutant::RegripAfterRelease {
            events.push(EventKind::GripperClose {
                hand_distance_m: dist(world.human_hand_pos, world.gripper_pos()),
            });
            world.robot_gripper = Gripper::Closed;
        }
    }

    fn discard(&mut self, world: &mut WorldState, _now: u64, events: &mut Vec<EventKind>) {
        world.robot_gripper = Gripper::Open;
        events.push(EventKind::GripperOpen);
        world.leg_pos = gripper_position(cell::PICK);
        self.attempt_counter += 1;
        events.push(EventKind::Discard {
            attempt: self.attempt_counter,
            reason: self.pending_discard,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ScenarioConfig {
        ScenarioConfig::default()
    }

    /// Drive the machine into Decide with the given reading.
    fn to_decide(fsm: &mut RobotFsm, world: &mut WorldState, reading: GplReading) {
        let cfg = cfg();
        let mut t = world.sim_time_ms;
        let mut step = |fsm: &mut RobotFsm, world: &mut WorldState, inputs: FsmInputs| {
            t += 10;
            world.advance_to(t);
            fsm.tick(world, &inputs, 10, &cfg)
        };
        step(fsm, world, FsmInputs {
            voice: Some(VoiceCommand::RequestLeg),
            gpl: None,
        });
        while fsm.state != FsmState::WaitReady {
            step(fsm, world, FsmInputs::default());
        }
        step(fsm, world, FsmInputs {
            voice: Some(VoiceCommand::Ready),
            gpl: None,
        });
        assert_eq!(fsm.state, FsmState::Sense);
        step(fsm, world, FsmInputs {
            voice: None,
            gpl: Some(reading),
        });
        assert_eq!(fsm.state, FsmState::Decide);
    }

    fn run_decide(fsm: &mut RobotFsm, world: &mut WorldState) -> Vec<EventKind> {
        let cfg = cfg();
        let mut all = Vec::new();
        while fsm.state == FsmState::Decide {
            let t = world.sim_time_ms + 10;
            world.advance_to(t);
            all.extend(fsm.tick(world, &FsmInputs::default(), 10, &cfg));
        }
        all
    }

    #[test]
    fn all_ok_releases() {
        let (mut fsm, mut world) = (RobotFsm::new(), WorldState::default());
        to_decide(&mut fsm, &mut world, GplReading::ALL_OK);
        let ev = run_decide(&mut fsm, &mut world);
        assert_eq!(fsm.state, FsmState::Release);
        assert_eq!(world.legs_delivered, 1);
        assert!(ev.iter().any(|e| matches!(e, EventKind::Release { attempt: 1 })));
    }

    #[test]
    fn pressure_not_ok_discards() {
        let (mut fsm, mut world) = (RobotFsm::new(), WorldState::default());
        let r = GplReading {
            gaze: true,
            pressure: false,
            location: true,
        };
        to_decide(&mut fsm, &mut world, r);
        let ev = run_decide(&mut fsm, &mut world);
        assert_eq!(fsm.state, FsmState::Discard);
        assert_eq!(world.legs_delivered, 0);
        assert!(ev.iter().any(|e| matches!(
            e,
            EventKind::Discard {
                reason: DiscardReason::Decision,
                ..
            }
        )));
    }

    #[test]
    fn silent_human_times_out_wait_ready() {
        let cfg = cfg();
        let (mut fsm, mut world) = (RobotFsm::new(), WorldState::default());
        let mut t = 10;
        world.advance_to(t);
        fsm.tick(&mut world, &FsmInputs { voice: Some(VoiceCommand::RequestLeg), gpl: None }, 10, &cfg);
        let mut discarded = None;
        while discarded.is_none() && t < 100_000 {
            t += 10;
            world.advance_to(t);
            for e in fsm.tick(&mut world, &FsmInputs::default(), 10, &cfg) {
                if let EventKind::Discard { reason, .. } = e {
                    discarded = Some(reason);
                }
            }
        }
        assert_eq!(discarded, Some(DiscardReason::ReadyTimeout));
        assert!(fsm.hits.contains_key("tr:WaitReady->Discard"));
    }

    #[test]
    fn four_releases_report_complete() {
        let cfg = cfg();
        let (mut fsm, mut world) = (RobotFsm::new(), WorldState::default());
        for _ in 0..4 {
            to_decide(&mut fsm, &mut world, GplReading::ALL_OK);
            run_decide(&mut fsm, &mut world);
            let t = world.sim_time_ms + 10;
            world.advance_to(t);
            fsm.tick(&mut world, &FsmInputs::default(), 10, &cfg);
        }
        assert_eq!(world.legs_delivered, 4);
        assert_eq!(fsm.state, FsmState::ReportComplete);
        assert_eq!(fsm.attempt_counter, 4);
    }

    #[test]
    fn unconditional_release_mutant() {
        let mut cfg = cfg();
        cfg.robot.mutant = Mutant::UnconditionalRelease;
        let (mut fsm, mut world) = (RobotFsm::new(), WorldState::default());
        to_decide(&mut fsm, &mut world, GplReading::default());
        while fsm.state == FsmState::Decide {
            let t = world.sim_time_ms + 10;
            world.advance_to(t);
            fsm.tick(&mut world, &FsmInputs::default(), 10, &cfg);
        }
        assert_eq!(fsm.state, FsmState::Release);
    }

    #[test]
    fn universe_contains_every_reachable_id() {
        let unique: std::collections::BTreeSet<_> = POINT_UNIVERSE.iter().collect();
        assert_eq!(unique.len(), POINT_UNIVERSE.len());
        for s in FsmState::ALL {
            point_id(&format!("state:{s}"));
        }
        for p in RELEASE_BRANCH_POINTS {
            point_id(p);
        }
    }
}
