//! Tick-driven simulation of one concrete test.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::fsm::{FsmInputs, FsmState, RobotFsm};
use super::sensors::{face_tracked, sense_gpl};
use super::trace::{EndReason, EventKind, SimTrace};
use super::world::{apply_stimulus, Stimulus, WorldState};
use super::ScenarioError;

/// A fully timed test: stimuli sorted by time plus the seed for sensor noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcreteTest {
    pub id: String,
    pub seed: u64,
    pub stimuli: Vec<Stimulus>,
}

impl ConcreteTest {
    pub fn check(&self) -> Result<(), ScenarioError> {
        if let Some(w) = self.stimuli.windows(2).find(|w| w[1].t_ms < w[0].t_ms) {
            return Err(ScenarioError::MalformedTest(format!(
                "{}: stimuli out of order ({} ms after {} ms)",
                self.id, w[1].t_ms, w[0].t_ms
            )));
        }
        for s in &self.stimuli {
            s.decode()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub trace: SimTrace,
    pub hits: BTreeMap<&'static str, u64>,
    pub legs_delivered: u8,
    pub final_state: FsmState,
}

/// Execute `test` against the robot controller. The same `(test, cfg, seed)`
/// always yields the same trace.
pub fn run_test(test: &ConcreteTest, cfg: &ScenarioConfig, seed: u64) -> Result<SimResult, ScenarioError> {
    cfg.validate()?;
    test.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut world = WorldState::default();
    let mut fsm = RobotFsm::new();
    let mut trace = SimTrace {
        test_id: test.id.clone(),
        events: Vec::new(),
    };
    let mut next = 0;
    let mut t = 0;
    let mut ended = false;

    while t < cfg.max_test_ms {
        t += cfg.tick_ms;
        while let Some(s) = test.stimuli.get(next).filter(|s| s.t_ms <= t) {
            world = apply_stimulus(&world, s)?;
            trace.push(
                s.t_ms,
                EventKind::Stimulus {
                    channel: s.channel.clone(),
                    value: s.value.clone(),
                },
            );
            next += 1;
        }
        world.advance_to(t);

        let mut inputs = FsmInputs::default();
        if let Some(cmd) = world.voice_channel.take() {
            if rng.gen::<f64>() < cfg.sensors.p_voice {
                trace.push(t, EventKind::VoiceDropped { command: cmd });
            } else {
                trace.push(t, EventKind::VoiceRecognized { command: cmd });
                inputs.voice = Some(cmd);
            }
        }
        if fsm.wants_reading(t, cfg) && face_tracked(&world, &cfg.sensors) {
            inputs.gpl = Some(sense_gpl(&world, &cfg.sensors, &mut rng));
        }

        for e in fsm.tick(&mut world, &inputs, cfg.tick_ms, cfg) {
            trace.push(t, e);
        }
        if fsm.is_done() {
            trace.push(t, EventKind::End { reason: EndReason::Fsm });
            ended = true;
            break;
        }
    }
    if !ended {
        trace.push(t, EventKind::End { reason: EndReason::Horizon });
    }
    Ok(SimResult {
        trace,
        hits: fsm.hits,
        legs_delivered: world.legs_delivered,
        final_state: fsm.state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::world::{cell, handover_point, normalize, sub, VoiceCommand};

    fn handover_stimuli(t0: u64) -> Vec<Stimulus> {
        let hp = handover_point();
        vec![
            Stimulus::voice(t0, VoiceCommand::RequestLeg),
            Stimulus::hand(t0 + 5_000, hp, 0.1),
            Stimulus::gaze(t0 + 5_000, normalize(sub(hp, cell::HUMAN_HEAD)).unwrap()),
            Stimulus::grip(t0 + 5_000, 3.0),
            Stimulus::voice(t0 + 15_000, VoiceCommand::Ready),
            Stimulus::hand(t0 + 16_000, cell::HUMAN_HAND_START, 0.4),
            Stimulus::grip(t0 + 16_000, 0.0),
        ]
    }

    fn error_free() -> ScenarioConfig {
        let mut cfg = ScenarioConfig::default();
        cfg.sensors = cfg.sensors.error_free();
        cfg.sensors.p_voice = 0.0;
        cfg
    }

    #[test]
    fn no_stimuli_times_out() {
        let test = ConcreteTest {
            id: "t".into(),
            seed: 0,
            stimuli: vec![],
        };
        let r = run_test(&test, &ScenarioConfig::default(), 0).unwrap();
        assert_eq!(r.final_state, FsmState::End);
        assert!(r.trace.events.iter().any(|e| e.kind == EventKind::TimedOut));
        assert_eq!(r.trace.end_time(), 60_000 + 10);
    }

    #[test]
    fn one_clean_handover_releases() {
        let test = ConcreteTest {
            id: "t".into(),
            seed: 3,
            stimuli: handover_stimuli(0),
        };
        let r = run_test(&test, &error_free(), 3).unwrap();
        assert_eq!(r.legs_delivered, 1);
        assert!(r
            .trace
            .events
            .iter()
            .any(|e| matches!(e.kind, EventKind::Release { attempt: 1 })));
    }

    #[test]
    fn four_handovers_complete_the_table() {
        let mut stimuli = Vec::new();
        for k in 0..4 {
            stimuli.extend(handover_stimuli(k * 25_000));
        }
        let test = ConcreteTest {
            id: "t".into(),
            seed: 1,
            stimuli,
        };
        let r = run_test(&test, &error_free(), 1).unwrap();
        assert_eq!(r.legs_delivered, 4);
        assert!(r.trace.events.iter().any(|e| e.kind == EventKind::ReportComplete));
        assert!(r.hits.contains_key("branch:complete:in-time"));
    }

    #[test]
    fn deterministic_per_seed() {
        let test = ConcreteTest {
            id: "t".into(),
            seed: 5,
            stimuli: handover_stimuli(100),
        };
        let cfg = ScenarioConfig::default();
        let a = run_test(&test, &cfg, 5).unwrap();
        let b = run_test(&test, &cfg, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unsorted_stimuli_rejected() {
        let mut stimuli = handover_stimuli(0);
        stimuli.swap(0, 4);
        let test = ConcreteTest {
            id: "bad".into(),
            seed: 0,
            stimuli,
        };
        assert!(matches!(
            run_test(&test, &ScenarioConfig::default(), 0),
            Err(ScenarioError::MalformedTest(_))
        ));
    }

    #[test]
    fn trace_round_trips_through_jsonl() {
        let test = ConcreteTest {
            id: "rt".into(),
            seed: 2,
            stimuli: handover_stimuli(0),
        };
        let r = run_test(&test, &ScenarioConfig::default(), 2).unwrap();
        let back = SimTrace::from_jsonl(&r.trace.to_jsonl()).unwrap();
        assert_eq!(back, r.trace);
    }
}
