use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ScenarioError;

/// Fault injected into the robot controller, used to validate monitors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutant {
    #[default]
    None,
    /// Decide releases regardless of the sensor reading.
    UnconditionalRelease,
    /// Gripper closes again right after releasing, with the hand still there.
    RegripAfterRelease,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorConfig {
    pub gaze_threshold_deg: f64,
    pub location_threshold_m: f64,
    pub pressure_low_n: f64,
    pub pressure_high_n: f64,
    /// Head orientation beyond this angle from the leg loses face tracking.
    pub face_tracking_deg: f64,
    pub p_gaze: f64,
    pub p_loc: f64,
    pub p_press: f64,
    pub p_voice: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            gaze_threshold_deg: 15.0,
            location_threshold_m: 0.15,
            pressure_low_n: 1.5,
            pressure_high_n: 6.0,
            face_tracking_deg: 90.0,
            p_gaze: 0.15,
            p_loc: 0.15,
            p_press: 0.10,
            p_voice: 0.05,
        }
    }
}

impl SensorConfig {
    pub fn error_free(mut self) -> Self {
        self.p_gaze = 0.0;
        self.p_loc = 0.0;
        self.p_press = 0.0;
        self.p_voice = 0.0;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeoutConfig {
    pub wait_request_ms: u64,
    pub wait_ready_ms: u64,
    pub sense_ms: u64,
    /// Release must follow an all-ok reading within this window.
    pub decision_ms: u64,
    pub table_ms: u64,
}

impl Default for TimeoutConfig {
    fn default() -> Self {
        Self {
            wait_request_ms: 60_000,
            wait_ready_ms: 30_000,
            sense_ms: 20_000,
            decision_ms: 5_000,
            table_ms: 300_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotConfig {
    /// Joint speed cap applied by the trajectory planner, rad/s.
    pub speed_cap_rad_s: f64,
    /// Time spent in Decide before acting on the reading.
    pub release_latency_ms: u64,
    pub sense_window_ms: u64,
    /// Hand-to-gripper distance below which a closing gripper is unsafe.
    pub proximity_threshold_m: f64,
    pub mutant: Mutant,
}

impl Default for RobotConfig {
    fn default() -> Self {
        Self {
            speed_cap_rad_s: 0.25,
            release_latency_ms: 100,
            sense_window_ms: 500,
            proximity_threshold_m: 0.05,
            mutant: Mutant::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub tick_ms: u64,
    pub max_test_ms: u64,
    /// Speed limit checked by the joint-speed monitor, rad/s.
    pub speed_limit_rad_s: f64,
    /// Spawn period of the joint-speed monitor.
    pub speed_monitor_dt_ms: u64,
    pub sensors: SensorConfig,
    pub timeouts: TimeoutConfig,
    pub robot: RobotConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            tick_ms: 10,
            max_test_ms: 300_000,
            speed_limit_rad_s: 0.25,
            speed_monitor_dt_ms: 100,
            sensors: SensorConfig::default(),
            timeouts: TimeoutConfig::default(),
            robot: RobotConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let s = &self.sensors;
        for (name, p) in [
            ("p_gaze", s.p_gaze),
            ("p_loc", s.p_loc),
            ("p_press", s.p_press),
            ("p_voice", s.p_voice),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(ScenarioError::Config(format!("{name} = {p} not in [0, 1]")));
            }
        }
        let positive = [
            ("gaze_threshold_deg", s.gaze_threshold_deg),
            ("location_threshold_m", s.location_threshold_m),
            ("face_tracking_deg", s.face_tracking_deg),
            ("speed_cap_rad_s", self.robot.speed_cap_rad_s),
            ("speed_limit_rad_s", self.speed_limit_rad_s),
            ("proximity_threshold_m", self.robot.proximity_threshold_m),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ScenarioError::Config(format!("{name} must be positive")));
            }
        }
        if s.pressure_low_n.partial_cmp(&s.pressure_high_n) != Some(std::cmp::Ordering::Less) {
            return Err(ScenarioError::Config("pressure band is empty".into()));
        }
        if self.tick_ms == 0 || self.speed_monitor_dt_ms == 0 {
            return Err(ScenarioError::Config("tick and monitor periods must be positive".into()));
        }
        Ok(())
    }
}
