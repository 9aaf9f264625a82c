//! Assertion monitors run offline over a finished trace.
//!
//! Each monitor is a small automaton. Instances are spawned by a trigger
//! and each ends in a verdict, or `NotChecked` if the trace stops first.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scenario::{EventKind, ScenarioConfig, SimTrace, TraceEvent};

/// Allowance on the joint-speed limit for floating-point rounding.
pub const SPEED_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ReqId {
    Req1,
    Req2,
    Req3,
    Req4,
}

impl ReqId {
    pub const ALL: [ReqId; 4] = [ReqId::Req1, ReqId::Req2, ReqId::Req3, ReqId::Req4];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }
}

impl fmt::Display for ReqId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "req{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Passed,
    Failed,
    NotChecked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpawnMode {
    /// One instance per rising edge of the trigger.
    OncePerRise,
    /// One instance every `dt_ms` for as long as the trigger holds.
    EveryDelta { dt_ms: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorParams {
    pub decision_ms: u64,
    pub proximity_m: f64,
    pub speed_limit_rad_s: f64,
    pub speed_dt_ms: u64,
    pub tick_ms: u64,
}

impl MonitorParams {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self {
            decision_ms: cfg.timeouts.decision_ms,
            proximity_m: cfg.robot.proximity_threshold_m,
            speed_limit_rad_s: cfg.speed_limit_rad_s,
            speed_dt_ms: cfg.speed_monitor_dt_ms,
            tick_ms: cfg.tick_ms,
        }
    }
}

impl Default for MonitorParams {
    fn default() -> Self {
        Self::from_config(&ScenarioConfig::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spawn {
    pub at_ms: u64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonitorResult {
    pub req: ReqId,
    pub spawns: Vec<Spawn>,
}

impl MonitorResult {
    pub fn passed(&self) -> usize {
        self.count(Verdict::Passed)
    }

    pub fn failed(&self) -> usize {
        self.count(Verdict::Failed)
    }

    fn count(&self, v: Verdict) -> usize {
        self.spawns.iter().filter(|s| s.verdict == v).count()
    }

    pub fn flags(&self) -> TestFlags {
        TestFlags {
            passed: self.passed() > 0,
            failed: self.failed() > 0,
            not_checked: self.spawns.is_empty(),
        }
    }
}

/// Per-test summary of one requirement. Passed and failed can both hold;
/// not-checked means nothing was spawned and excludes both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TestFlags {
    pub passed: bool,
    pub failed: bool,
    pub not_checked: bool,
}

impl fmt::Display for TestFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match (self.not_checked, self.passed, self.failed) {
            (true, _, _) => "NC",
            (false, true, true) => "P+F",
            (false, true, false) => "P",
            (false, false, true) => "F",
            (false, false, false) => "open",
        };
        f.write_str(s)
    }
}

/// A running instance: returns a verdict once it can decide.
trait Instance {
    fn step(&mut self, e: &TraceEvent) -> Option<Verdict>;
}

struct Req1Instance {
    deadline: u64,
}

impl Instance for Req1Instance {
    fn step(&mut self, e: &TraceEvent) -> Option<Verdict> {
        if e.t > self.deadline {
            return Some(Verdict::Failed);
        }
        match e.kind {
            EventKind::Release { .. } => Some(Verdict::Passed),
            EventKind::Discard { .. } => Some(Verdict::Failed),
            _ => None,
        }
    }
}

struct Req2Instance;

impl Instance for Req2Instance {
    fn step(&mut self, e: &TraceEvent) -> Option<Verdict> {
        match e.kind {
            EventKind::Release { .. } => Some(Verdict::Failed),
            EventKind::Discard { .. } => Some(Verdict::Passed),
            _ => None,
        }
    }
}

/// Drive event-spawned instances over the trace. `spawn` inspects each
/// event and may start an instance; the spawning event itself is not fed
/// to the new instance.
fn run_event_monitor<F>(req: ReqId, trace: &SimTrace, mut spawn: F) -> MonitorResult
where
    F: FnMut(&TraceEvent) -> Option<Result<Box<dyn Instance>, Verdict>>,
{
    let mut spawns: Vec<Spawn> = Vec::new();
    let mut live: Vec<(usize, Box<dyn Instance>)> = Vec::new();
    for e in &trace.events {
        live.retain_mut(|(idx, inst)| match inst.step(e) {
            Some(v) => {
                spawns[*idx].verdict = v;
                false
            }
            None => true,
        });
        match spawn(e) {
            Some(Ok(inst)) => {
                spawns.push(Spawn {
                    at_ms: e.t,
                    verdict: Verdict::NotChecked,
                });
                live.push((spawns.len() - 1, inst));
            }
            Some(Err(immediate)) => spawns.push(Spawn {
                at_ms: e.t,
                verdict: immediate,
            }),
            None => {}
        }
    }
    MonitorResult { req, spawns }
}

/// Release within the decision threshold after every all-ok sensing.
pub fn monitor_req1(trace: &SimTrace, p: &MonitorParams) -> MonitorResult {
    run_event_monitor(ReqId::Req1, trace, |e| match e.kind {
        EventKind::Sensing { gpl } if gpl.all_ok() => Some(Ok(Box::new(Req1Instance {
            deadline: e.t + p.decision_ms,
        }) as Box<dyn Instance>)),
        _ => None,
    })
}

/// No release in an attempt whose sensing was not all-ok.
pub fn monitor_req2(trace: &SimTrace, _p: &MonitorParams) -> MonitorResult {
    run_event_monitor(ReqId::Req2, trace, |e| match e.kind {
        EventKind::Sensing { gpl } if !gpl.all_ok() => Some(Ok(Box::new(Req2Instance) as Box<dyn Instance>)),
        _ => None,
    })
}

/// The gripper never closes with the human hand within the proximity limit.
pub fn monitor_req3(trace: &SimTrace, p: &MonitorParams) -> MonitorResult {
    run_event_monitor(ReqId::Req3, trace, |e| match e.kind {
        EventKind::GripperClose { hand_distance_m } => Some(Err(if hand_distance_m < p.proximity_m {
            Verdict::Failed
        } else {
            Verdict::Passed
        })),
        _ => None,
    })
}

/// Maximal runs of the moving signal as `[start, end)` in ms. A speed
/// sample at `t` covers the tick `(t - tick, t]`; samples one tick apart
/// belong to the same run.
pub fn moving_intervals(trace: &SimTrace, tick_ms: u64) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::new();
    for e in &trace.events {
        if !matches!(e.kind, EventKind::Speed { .. }) {
            continue;
        }
        let start = e.t.saturating_sub(tick_ms);
        match out.last_mut() {
            Some(last) if start <= last.1 => last.1 = last.1.max(e.t),
            _ => out.push((start, e.t)),
        }
    }
    out
}

/// Spawn instants for `mode` over the trigger's true-intervals.
pub fn spawn_times(intervals: &[(u64, u64)], mode: SpawnMode) -> Vec<u64> {
    let mut out = Vec::new();
    for &(a, b) in intervals {
        match mode {
            SpawnMode::OncePerRise => out.push(a),
            SpawnMode::EveryDelta { dt_ms } => {
                assert!(dt_ms > 0, "spawn period must be positive");
                out.extend((a..b).step_by(dt_ms as usize));
            }
        }
    }
    out
}

/// Joint speed stays at or below the limit, checked by an instance spawned
/// every `speed_dt_ms` while the arm moves. Each instance judges the
/// samples in its own window.
pub fn monitor_req4(trace: &SimTrace, p: &MonitorParams) -> MonitorResult {
    let intervals = moving_intervals(trace, p.tick_ms);
    let mode = SpawnMode::EveryDelta { dt_ms: p.speed_dt_ms };
    let samples: Vec<(u64, f64)> = trace
        .events
        .iter()
        .filter_map(|e| match e.kind {
            EventKind::Speed { joint_speeds } => Some((e.t, joint_speeds.iter().copied().fold(0.0, f64::max))),
            _ => None,
        })
        .collect();
    let mut spawns = Vec::new();
    for &(a, b) in &intervals {
        for at in spawn_times(&[(a, b)], mode) {
            let end = (at + p.speed_dt_ms).min(b);
            // sample at t covers (t - tick, t]; it belongs to the window holding its start
            let too_fast = samples
                .iter()
                .filter(|(t, _)| {
                    let s = t.saturating_sub(p.tick_ms);
                    s >= at && s < end
                })
                .any(|(_, v)| *v > p.speed_limit_rad_s + SPEED_EPS);
            spawns.push(Spawn {
                at_ms: at,
                verdict: if too_fast { Verdict::Failed } else { Verdict::Passed },
            });
        }
    }
    MonitorResult {
        req: ReqId::Req4,
        spawns,
    }
}

pub fn monitor(req: ReqId, trace: &SimTrace, p: &MonitorParams) -> MonitorResult {
    match req {
        ReqId::Req1 => monitor_req1(trace, p),
        ReqId::Req2 => monitor_req2(trace, p),
        ReqId::Req3 => monitor_req3(trace, p),
        ReqId::Req4 => monitor_req4(trace, p),
    }
}

pub fn monitor_all(trace: &SimTrace, p: &MonitorParams) -> Vec<MonitorResult> {
    ReqId::ALL.iter().map(|r| monitor(*r, trace, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{DiscardReason, GplReading};

    fn trace(events: Vec<(u64, EventKind)>) -> SimTrace {
        let mut t = SimTrace::default();
        for (at, k) in events {
            t.push(at, k);
        }
        t
    }

    fn sensing(ok: bool) -> EventKind {
        EventKind::Sensing {
            gpl: if ok {
                GplReading::ALL_OK
            } else {
                GplReading {
                    gaze: true,
                    pressure: false,
                    location: true,
                }
            },
        }
    }

    fn discard() -> EventKind {
        EventKind::Discard {
            attempt: 1,
            reason: DiscardReason::Decision,
        }
    }

    #[test]
    fn req1_release_in_time_passes() {
        let p = MonitorParams::default();
        let t = trace(vec![(1000, sensing(true)), (3000, EventKind::Release { attempt: 1 })]);
        assert_eq!(monitor_req1(&t, &p).spawns[0].verdict, Verdict::Passed);
    }

    #[test]
    fn req1_release_one_tick_late_fails() {
        let p = MonitorParams::default();
        let t = trace(vec![
            (1000, sensing(true)),
            (1000 + p.decision_ms + p.tick_ms, EventKind::Release { attempt: 1 }),
        ]);
        assert_eq!(monitor_req1(&t, &p).spawns[0].verdict, Verdict::Failed);
        let on_time = trace(vec![(1000, sensing(true)), (1000 + p.decision_ms, EventKind::Release { attempt: 1 })]);
        assert_eq!(monitor_req1(&on_time, &p).spawns[0].verdict, Verdict::Passed);
    }

    #[test]
    fn req1_no_trigger_is_nc() {
        let t = trace(vec![(10, sensing(false)), (20, discard())]);
        let r = monitor_req1(&t, &MonitorParams::default());
        assert!(r.flags().not_checked);
        assert_eq!(r.flags().to_string(), "NC");
    }

    #[test]
    fn req1_trace_ends_before_deadline() {
        let t = trace(vec![(10, sensing(true))]);
        assert_eq!(monitor_req1(&t, &MonitorParams::default()).spawns[0].verdict, Verdict::NotChecked);
    }

    #[test]
    fn req2_discard_passes_release_fails() {
        let p = MonitorParams::default();
        let t = trace(vec![(10, sensing(false)), (200, discard())]);
        assert_eq!(monitor_req2(&t, &p).flags().to_string(), "P");
        let t = trace(vec![(10, sensing(false)), (200, EventKind::Release { attempt: 1 })]);
        assert_eq!(monitor_req2(&t, &p).flags().to_string(), "F");
        assert!(monitor_req2(&SimTrace::default(), &p).flags().not_checked);
    }

    #[test]
    fn req3_distance() {
        let p = MonitorParams::default();
        let t = trace(vec![
            (10, EventKind::GripperClose { hand_distance_m: 0.5 }),
            (20, EventKind::GripperClose { hand_distance_m: 0.02 }),
        ]);
        let r = monitor_req3(&t, &p);
        assert_eq!(r.passed(), 1);
        assert_eq!(r.failed(), 1);
        assert_eq!(r.flags().to_string(), "P+F");
    }

    fn speeds(from: u64, to: u64, v: f64) -> Vec<(u64, EventKind)> {
        (from..=to)
            .step_by(10)
            .map(|t| (t, EventKind::Speed { joint_speeds: [v, 0.0, 0.0] }))
            .collect()
    }

    #[test]
    fn req4_spawns_every_delta() {
        let p = MonitorParams::default();
        // moving over [0, 1000): 100 samples, 10 windows of 100 ms
        let r = monitor_req4(&trace(speeds(10, 1000, 0.2)), &p);
        assert_eq!(r.spawns.len(), 10);
        assert_eq!(r.passed(), 10);
        // [0, 1050) needs an eleventh, partial window
        let r = monitor_req4(&trace(speeds(10, 1050, 0.2)), &p);
        assert_eq!(r.spawns.len(), 11);
    }

    #[test]
    fn req4_cap_disabled_half_radian_in_a_second() {
        // 0.5 rad over 1 s is 0.5 rad/s on every sample
        let r = monitor_req4(&trace(speeds(10, 1000, 0.5)), &MonitorParams::default());
        assert_eq!(r.failed(), 10);
    }

    #[test]
    fn req4_stationary_is_nc() {
        let t = trace(vec![(10, sensing(true))]);
        assert!(monitor_req4(&t, &MonitorParams::default()).flags().not_checked);
    }

    #[test]
    fn intervals_split_on_gaps() {
        let mut ev = speeds(10, 100, 0.1);
        ev.extend(speeds(500, 600, 0.1));
        assert_eq!(moving_intervals(&trace(ev), 10), vec![(0, 100), (490, 600)]);
    }

    #[test]
    fn spawn_counts() {
        let iv = [(0, 250), (1000, 1100)];
        assert_eq!(spawn_times(&iv, SpawnMode::OncePerRise), vec![0, 1000]);
        assert_eq!(spawn_times(&iv, SpawnMode::EveryDelta { dt_ms: 100 }), vec![0, 100, 200, 1000]);
    }
}
