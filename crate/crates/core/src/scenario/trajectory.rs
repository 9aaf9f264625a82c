use serde::{Deserialize, Serialize};

pub type Joints = [f64; 3];

/// Piecewise-linear joint path; times are offsets from the path start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPath {
    pub points: Vec<(u64, Joints)>,
}

impl JointPath {
    pub fn duration_ms(&self) -> u64 {
        self.points.last().map(|p| p.0).unwrap_or(0)
    }

    pub fn end(&self) -> Joints {
        self.points.last().expect("path has a point").1
    }

    pub fn position_at(&self, offset_ms: u64) -> Joints {
        let first = self.points[0];
        if offset_ms <= first.0 {
            return first.1;
        }
        for w in self.points.windows(2) {
            let ((t0, a), (t1, b)) = (w[0], w[1]);
            if offset_ms <= t1 {
                let s = (offset_ms - t0) as f64 / (t1 - t0) as f64;
                return [
                    a[0] + (b[0] - a[0]) * s,
                    a[1] + (b[1] - a[1]) * s,
                    a[2] + (b[2] - a[2]) * s,
                ];
            }
        }
        self.end()
    }

    /// Largest per-joint |Δθ|/Δt over consecutive path points, rad/s.
    pub fn peak_speed(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| {
                let dt = (w[1].0 - w[0].0) as f64 / 1000.0;
                (0..3)
                    .map(|j| (w[1].1[j] - w[0].1[j]).abs() / dt)
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Straight joint-space move whose slowest-allowed joint sets the duration,
/// so every joint stays at or below `speed_cap` rad/s.
pub fn plan_trajectory(from: Joints, to: Joints, speed_cap: f64) -> JointPath {
    assert!(speed_cap > 0.0, "speed cap must be positive");
    let max_delta = (0..3).map(|j| (to[j] - from[j]).abs()).fold(0.0, f64::max);
    if max_delta == 0.0 {
        return JointPath {
            points: vec![(0, from)],
        };
    }
    let duration_ms = (max_delta / speed_cap * 1000.0).ceil().max(1.0) as u64;
    JointPath {
        points: vec![(0, from), (duration_ms, to)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_pose_is_a_point() {
        let p = plan_trajectory([0.1, 0.2, 0.3], [0.1, 0.2, 0.3], 0.25);
        assert_eq!(p.points.len(), 1);
        assert_eq!(p.duration_ms(), 0);
    }

    #[test]
    fn half_radian_at_quarter_cap_takes_two_seconds() {
        let p = plan_trajectory([0.0; 3], [0.5, -0.2, 0.0], 0.25);
        // lower bound max|Δθ| / cap = 0.5 / 0.25 = 2.0 s
        assert!(p.duration_ms() >= 2000);
        assert!(p.peak_speed() <= 0.25 + 1e-9);
    }

    #[test]
    fn interpolates() {
        let p = plan_trajectory([0.0; 3], [1.0, 0.0, 0.0], 1.0);
        assert_eq!(p.position_at(500), [0.5, 0.0, 0.0]);
        assert_eq!(p.position_at(5000), [1.0, 0.0, 0.0]);
    }
}
