//! Instantiation of abstract sequences into timed stimuli.
//!
//! Each parameter is drawn from a fixed equivalence class; times advance by
//! a gap drawn from the action's legal range.

use std::f64::consts::PI;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::alphabet::{AbstractTestSequence, ActionName, Distance, Quality, Speed};
use crate::scenario::world::{add, cell, dist, handover_point, normalize, scale, sub, Vec3};
use crate::scenario::{ConcreteTest, Stimulus, VoiceCommand};

/// Hand distance from the handover point, metres. Far is open below.
pub const CLOSE_M: (f64, f64) = (0.0, 0.1);
pub const FAR_M: (f64, f64) = (0.3, 1.0);
/// Hand speed, m/s. Fast is open below.
pub const SLOW_M_S: (f64, f64) = (0.05, 0.15);
pub const FAST_M_S: (f64, f64) = (0.3, 0.6);
/// Gaze offset from the head-to-handover direction, degrees.
pub const GAZE_OK_DEG: (f64, f64) = (0.0, 12.0);
pub const GAZE_BAD_DEG: (f64, f64) = (25.0, 80.0);
/// Grip force, newtons.
pub const GRIP_OK_N: (f64, f64) = (2.0, 5.5);
pub const GRIP_BAD_LOW_N: (f64, f64) = (0.0, 1.2);
pub const GRIP_BAD_HIGH_N: (f64, f64) = (7.0, 10.0);

/// Gaps before each action, milliseconds.
pub const GAP_MS: Range<u64> = 500..5001;
pub const REQUEST_GAP_MS: Range<u64> = 2000..5001;
pub const AWAIT_SIGNAL_MS: Range<u64> = 8000..11001;
pub const BORED_GAP_MS: Range<u64> = 0..301;
/// Ready is said only once the hand has stopped, plus this margin.
pub const SETTLE_MS: u64 = 200;
/// After saying ready the hand goes back to rest with the leg.
pub const RETRACT_AFTER_MS: u64 = 2000;
pub const RETRACT_SPEED_M_S: f64 = 0.4;

fn closed(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.gen_range(lo..=hi)
}

/// Uniform on `(lo, hi]`.
fn open_below(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    hi - rng.gen_range(0.0..(hi - lo))
}

fn unit_vector(rng: &mut ChaCha8Rng) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi = rng.gen_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

/// Direction at `deg` from `axis`, at a random azimuth around it.
fn cone_direction(rng: &mut ChaCha8Rng, axis: Vec3, deg: f64) -> Vec3 {
    let helper = if axis[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let u = normalize(cross(axis, helper)).expect("axis not parallel to helper");
    let v = cross(axis, u);
    let phi = rng.gen_range(0.0..2.0 * PI);
    let (s, c) = deg.to_radians().sin_cos();
    let side = add(scale(u, phi.cos()), scale(v, phi.sin()));
    normalize(add(scale(axis, c), scale(side, s))).expect("unit combination")
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn gaze_axis() -> Vec3 {
    normalize(sub(handover_point(), cell::HUMAN_HEAD)).expect("head is away from the handover point")
}

/// Map each abstract action to stimuli, in order, from the seeded stream.
pub fn concretize(abstract_seq: &AbstractTestSequence, seed: u64) -> ConcreteTest {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stimuli = Vec::new();
    let mut t = 0u64;
    let mut hand = cell::HUMAN_HAND_START;
    let mut hand_still_at = 0u64;
    let mut deferred: Vec<Stimulus> = Vec::new();

    for action in &abstract_seq.actions {
        match action.name {
            ActionName::RequestLeg => {
                t += rng.gen_range(REQUEST_GAP_MS);
                stimuli.push(Stimulus::voice(t, VoiceCommand::RequestLeg));
            }
            ActionName::AwaitRobotSignal => {
                t += rng.gen_range(AWAIT_SIGNAL_MS);
            }
            ActionName::MoveHand { distance, speed } => {
                t += rng.gen_range(GAP_MS);
                let d = match distance {
                    Distance::Close => closed(&mut rng, CLOSE_M),
                    Distance::Far => open_below(&mut rng, FAR_M),
                };
                let v = match speed {
                    Speed::Slow => closed(&mut rng, SLOW_M_S),
                    Speed::Fast => open_below(&mut rng, FAST_M_S),
                };
                let target = add(handover_point(), scale(unit_vector(&mut rng), d));
                stimuli.push(Stimulus::hand(t, target, v));
                hand_still_at = t + (dist(hand, target) / v * 1000.0).ceil() as u64;
                hand = target;
            }
            ActionName::SetGaze { quality } => {
                t += rng.gen_range(GAP_MS);
                let deg = match quality {
                    Quality::Ok => closed(&mut rng, GAZE_OK_DEG),
                    Quality::Bad => closed(&mut rng, GAZE_BAD_DEG),
                };
                stimuli.push(Stimulus::gaze(t, cone_direction(&mut rng, gaze_axis(), deg)));
            }
            ActionName::SetPressure { quality } => {
                t += rng.gen_range(GAP_MS);
                let f = match quality {
                    Quality::Ok => closed(&mut rng, GRIP_OK_N),
                    Quality::Bad if rng.gen_bool(0.5) => closed(&mut rng, GRIP_BAD_LOW_N),
                    Quality::Bad => closed(&mut rng, GRIP_BAD_HIGH_N),
                };
                stimuli.push(Stimulus::grip(t, f));
            }
            ActionName::SayReady => {
                t = (t + rng.gen_range(GAP_MS)).max(hand_still_at + SETTLE_MS);
                stimuli.push(Stimulus::voice(t, VoiceCommand::Ready));
                let back = t + RETRACT_AFTER_MS;
                deferred.push(Stimulus::hand(back, cell::HUMAN_HAND_START, RETRACT_SPEED_M_S));
                deferred.push(Stimulus::grip(back, 0.0));
                hand_still_at = back + (dist(hand, cell::HUMAN_HAND_START) / RETRACT_SPEED_M_S * 1000.0).ceil() as u64;
                hand = cell::HUMAN_HAND_START;
            }
            ActionName::GoBored => {
                t += rng.gen_range(BORED_GAP_MS);
                stimuli.push(Stimulus::gaze(t, scale(gaze_axis(), -1.0)));
                // a bored human keeps the hand where it is
                deferred.retain(|s| s.t_ms <= t);
            }
            ActionName::Idle => {
                t += rng.gen_range(GAP_MS);
            }
        }
    }
    stimuli.extend(deferred);
    // stable: equal times keep action order
    stimuli.sort_by_key(|s| s.t_ms);
    ConcreteTest {
        id: abstract_seq.id.clone(),
        seed,
        stimuli,
    }
}
