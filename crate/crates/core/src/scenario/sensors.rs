use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::SensorConfig;
use super::world::{angle_deg, cell, dist, sub, WorldState};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GplReading {
    pub gaze: bool,
    pub pressure: bool,
    pub location: bool,
}

impl GplReading {
    pub const ALL_OK: Self = Self {
        gaze: true,
        pressure: true,
        location: true,
    };

    pub fn all_ok(&self) -> bool {
        self.gaze && self.pressure && self.location
    }

    /// `(g,p,l)` with `1` for ok and `0` for not ok.
    pub fn code(&self) -> String {
        let b = |v: bool| if v { '1' } else { '0' };
        format!("({},{},{})", b(self.gaze), b(self.pressure), b(self.location))
    }
}

/// Angle between the human's gaze and the head-to-leg direction.
pub fn gaze_offset_deg(world: &WorldState) -> f64 {
    angle_deg(world.human_gaze_dir, sub(world.leg_pos, cell::HUMAN_HEAD))
}

/// Threshold classification of the current pose, before sensor errors.
pub fn classify_pose(world: &WorldState, model: &SensorConfig) -> GplReading {
    GplReading {
        gaze: gaze_offset_deg(world) < model.gaze_threshold_deg,
        pressure: (model.pressure_low_n..=model.pressure_high_n).contains(&world.human_grip_force_n),
        location: dist(world.human_hand_pos, world.leg_pos) < model.location_threshold_m,
    }
}

/// Whether the vision system can see the human's face at all.
pub fn face_tracked(world: &WorldState, model: &SensorConfig) -> bool {
    gaze_offset_deg(world) < model.face_tracking_deg
}

/// One sensing window. Each channel is independently degraded to not-ok
/// with its error probability; errors never turn a not-ok reading into ok.
/// Always consumes exactly three draws so the stream stays aligned.
pub fn sense_gpl<R: Rng + ?Sized>(world: &WorldState, model: &SensorConfig, rng: &mut R) -> GplReading {
    let ideal = classify_pose(world, model);
    let flip_g = rng.gen::<f64>() < model.p_gaze;
    let flip_p = rng.gen::<f64>() < model.p_press;
    let flip_l = rng.gen::<f64>() < model.p_loc;
    GplReading {
        gaze: ideal.gaze && !flip_g,
        pressure: ideal.pressure && !flip_p,
        location: ideal.location && !flip_l,
    }
}
