//! Property checks shared by `properties.rs` and the acceptance runner.
//! Each check runs a fixed number of cases from a deterministic RNG and
//! returns the failure message, if any.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};
use sha2::{Digest, Sha256};

use handover_core::agentlang::{
    parse_agent, unparse, AgentProgram, BodyStep, Context, Literal, Performative, Plan, Term, TriggerEvent,
    TriggerKind,
};
use handover_core::bdi::AgentState;
use handover_core::scenario::{
    run_test, DiscardReason, EventKind, GplReading, ScenarioConfig, SimTrace, POINT_UNIVERSE,
};
use handover_core::testgen::bdi_gen::{choose_vector, run_vector};
use handover_core::testgen::{
    bdi_generate, concretize, default_mas, random_generate, AbstractTestSequence, BdiGenOptions, BeliefVector,
    CoverageState as PlanCoverage, Generator, SelectionStrategy, DOMAIN_SIZE,
};
use handover_core::verify::{
    classify_cross_product, merge_coverage, monitor_req1, monitor_req2, monitor_req3, monitor_req4, CoverageState,
    MonitorParams, MonitorResult, ReqId, Spawn, Verdict,
};
use handover_core::verify::monitor::SPEED_EPS;

pub const PARSER_CASES: u32 = 1000;
pub const MAS_DETERMINISM_CASES: u32 = 100;
pub const PLAN_SELECTION_CASES: u32 = 500;
pub const MONITOR_CASES: u32 = 500;
pub const MERGE_CASES: u32 = 200;
pub const CLASSIFY_CASES: u32 = 1000;
pub const SPEED_CASES: u32 = 200;
pub const MONOTONICITY_CASES: u32 = 20;

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

// ---- agent language ----

const RESERVED: [&str; 4] = ["true", "not", "tell", "achieve"];

fn ident() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,6}".prop_filter("reserved", |s| !RESERVED.contains(&s.as_str()))
}

fn leaf() -> impl Strategy<Value = Term> {
    prop_oneof![ident().prop_map(Term::atom), (0u32..1000).prop_map(|n| Term::atom(n.to_string()))]
}

fn term() -> impl Strategy<Value = Term> {
    let inner = (ident(), prop::collection::vec(leaf(), 0..3)).prop_map(|(f, a)| Term::compound(f, a));
    let arg = prop_oneof![3 => leaf(), 1 => inner];
    (ident(), prop::collection::vec(arg, 0..3)).prop_map(|(f, a)| Term::compound(f, a))
}

fn step() -> impl Strategy<Value = BodyStep> {
    prop_oneof![
        term().prop_map(|payload| BodyStep::AchieveGoal { payload }),
        term().prop_map(|payload| BodyStep::AddBelief { payload }),
        term().prop_map(|payload| BodyStep::DelBelief { payload }),
        (ident(), any::<bool>(), term()).prop_map(|(recipient, tell, payload)| BodyStep::Send {
            recipient,
            performative: if tell { Performative::Tell } else { Performative::Achieve },
            payload,
        }),
        (0u64..1_000_000).prop_map(|ms| BodyStep::Wait { ms }),
        term().prop_map(|payload| BodyStep::ExternalAction { payload }),
    ]
}

fn trigger_kind() -> impl Strategy<Value = TriggerKind> {
    prop_oneof![
        Just(TriggerKind::AddGoal),
        Just(TriggerKind::AddBelief),
        Just(TriggerKind::DelBelief)
    ]
}

fn program() -> impl Strategy<Value = AgentProgram> {
    let literal = (term(), any::<bool>()).prop_map(|(term, negated)| Literal { term, negated });
    let plan = (
        trigger_kind(),
        term(),
        prop::collection::vec(literal, 0..4),
        prop::collection::vec(step(), 0..5),
    );
    (
        prop::collection::vec(term(), 0..4),
        prop::collection::vec(term(), 0..3),
        prop::collection::vec(plan, 0..8),
    )
        .prop_map(|(initial_beliefs, initial_goals, plans)| AgentProgram {
            name: "gen".into(),
            initial_beliefs,
            initial_goals,
            plans: plans
                .into_iter()
                .enumerate()
                .map(|(id, (kind, payload, literals, body))| Plan {
                    id,
                    trigger: TriggerEvent { kind, payload },
                    context: Context { literals },
                    body,
                })
                .collect(),
        })
}

/// parse(unparse(p)) == p, and printing is a fixpoint.
pub fn parser_round_trip() -> Result<(), String> {
    check(PARSER_CASES, program(), |p| {
        let text = unparse(&p);
        let back = parse_agent("gen", &text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(unparse(&back), text);
        Ok(())
    })
}

fn vector() -> impl Strategy<Value = BeliefVector> {
    (0..DOMAIN_SIZE).prop_map(|b| BeliefVector::new(b as u16))
}

/// Same vector, same agents: byte-identical traces.
pub fn mas_determinism() -> Result<(), String> {
    let mas = default_mas();
    check(MAS_DETERMINISM_CASES, vector(), |v| {
        let hash = || {
            let (actions, trace) = run_vector(&mas, v, 10_000).unwrap();
            (actions, hex::encode(Sha256::digest(trace.to_jsonl().as_bytes())))
        };
        prop_assert_eq!(hash(), hash());
        Ok(())
    })
}

const POOL: [&str; 4] = ["a", "b", "c", "d"];
const EVENTS: [&str; 3] = ["e", "f", "g"];

fn small_plan() -> impl Strategy<Value = (TriggerKind, usize, Vec<(usize, bool)>)> {
    (
        trigger_kind(),
        0..EVENTS.len(),
        prop::collection::vec((0..POOL.len(), any::<bool>()), 0..4),
    )
}

/// `select_plan` returns the lowest-id applicable plan.
pub fn plan_selection() -> Result<(), String> {
    let strategy = (
        prop::collection::vec(small_plan(), 0..10),
        prop::collection::vec(any::<bool>(), POOL.len()),
        trigger_kind(),
        0..EVENTS.len(),
    );
    check(PLAN_SELECTION_CASES, strategy, |(plans, held, kind, ev)| {
        let mut program = AgentProgram::new("sel");
        for (id, (k, e, lits)) in plans.iter().enumerate() {
            program.plans.push(Plan {
                id,
                trigger: TriggerEvent {
                    kind: *k,
                    payload: Term::atom(EVENTS[*e]),
                },
                context: Context {
                    literals: lits
                        .iter()
                        .map(|(i, neg)| Literal {
                            term: Term::atom(POOL[*i]),
                            negated: *neg,
                        })
                        .collect(),
                },
                body: vec![],
            });
        }
        let mut agent = AgentState::new(program);
        agent.beliefs = POOL
            .iter()
            .zip(&held)
            .filter(|(_, h)| **h)
            .map(|(a, _)| Term::atom(*a))
            .collect();
        let event = TriggerEvent {
            kind,
            payload: Term::atom(EVENTS[ev]),
        };
        let mut best: Option<usize> = None;
        for (id, (k, e, lits)) in plans.iter().enumerate() {
            if *k != kind || *e != ev {
                continue;
            }
            let mut ok = true;
            for (i, neg) in lits {
                if held[*i] == *neg {
                    ok = false;
                }
            }
            if ok && best.is_none_or(|b| id < b) {
                best = Some(id);
            }
        }
        prop_assert_eq!(agent.select_plan(&event).map(|p| p.id), best);
        Ok(())
    })
}

// ---- monitors ----

fn event_kind() -> impl Strategy<Value = EventKind> {
    let gpl = (any::<bool>(), any::<bool>(), any::<bool>()).prop_map(|(gaze, pressure, location)| GplReading {
        gaze,
        pressure,
        location,
    });
    prop_oneof![
        3 => gpl.prop_map(|gpl| EventKind::Sensing { gpl }),
        2 => (1u8..=4).prop_map(|attempt| EventKind::Release { attempt }),
        2 => (1u8..=4, prop_oneof![
            Just(DiscardReason::Decision),
            Just(DiscardReason::ReadyTimeout),
            Just(DiscardReason::SenseTimeout)
        ])
            .prop_map(|(attempt, reason)| EventKind::Discard { attempt, reason }),
        2 => (0.0f64..0.2).prop_map(|hand_distance_m| EventKind::GripperClose { hand_distance_m }),
        6 => prop::array::uniform3(0.0f64..0.4).prop_map(|joint_speeds| EventKind::Speed { joint_speeds }),
        1 => Just(EventKind::Signal),
        1 => Just(EventKind::GripperOpen),
    ]
}

fn random_trace() -> impl Strategy<Value = SimTrace> {
    let gap = prop_oneof![
        4 => Just(10u64),
        2 => Just(0u64),
        1 => Just(20u64),
        1 => Just(250u64),
        1 => Just(2_000u64),
        1 => Just(6_000u64),
    ];
    prop::collection::vec((gap, event_kind()), 0..80).prop_map(|evs| {
        let mut trace = SimTrace {
            test_id: "prop".into(),
            events: Vec::new(),
        };
        let mut t = 0;
        for (g, k) in evs {
            t += g;
            trace.push(t, k);
        }
        trace
    })
}

fn verdicts(m: &MonitorResult) -> Vec<(u64, Verdict)> {
    m.spawns.iter().map(|s| (s.at_ms, s.verdict)).collect()
}

/// Req 1 by forward scan from every all-ok sensing.
pub fn oracle_req1(trace: &SimTrace, decision_ms: u64) -> Vec<(u64, Verdict)> {
    let ev = &trace.events;
    let mut out = Vec::new();
    for (i, e) in ev.iter().enumerate() {
        let EventKind::Sensing { gpl } = e.kind else { continue };
        if !gpl.all_ok() {
            continue;
        }
        let deadline = e.t + decision_ms;
        let late = ev[i + 1..].iter().position(|x| x.t > deadline);
        let settle = ev[i + 1..]
            .iter()
            .position(|x| matches!(x.kind, EventKind::Release { .. } | EventKind::Discard { .. }));
        let v = match (settle, late) {
            (Some(s), l) if l.is_none_or(|l| s < l) => {
                if matches!(ev[i + 1 + s].kind, EventKind::Release { .. }) {
                    Verdict::Passed
                } else {
                    Verdict::Failed
                }
            }
            (_, Some(_)) => Verdict::Failed,
            _ => Verdict::NotChecked,
        };
        out.push((e.t, v));
    }
    out
}

/// Req 2: the attempt after a bad reading must end in a discard.
pub fn oracle_req2(trace: &SimTrace) -> Vec<(u64, Verdict)> {
    let ev = &trace.events;
    let mut out = Vec::new();
    for (i, e) in ev.iter().enumerate() {
        let EventKind::Sensing { gpl } = e.kind else { continue };
        if gpl.all_ok() {
            continue;
        }
        let v = ev[i + 1..]
            .iter()
            .find_map(|x| match x.kind {
                EventKind::Release { .. } => Some(Verdict::Failed),
                EventKind::Discard { .. } => Some(Verdict::Passed),
                _ => None,
            })
            .unwrap_or(Verdict::NotChecked);
        out.push((e.t, v));
    }
    out
}

pub fn oracle_req3(trace: &SimTrace, proximity_m: f64) -> Vec<(u64, Verdict)> {
    trace
        .events
        .iter()
        .filter_map(|e| match e.kind {
            EventKind::GripperClose { hand_distance_m } => Some((
                e.t,
                if hand_distance_m < proximity_m {
                    Verdict::Failed
                } else {
                    Verdict::Passed
                },
            )),
            _ => None,
        })
        .collect()
}

/// Req 4 on a per-millisecond bitmap: a sample at `t` marks `[t - tick, t)`
/// as moving; windows start every `dt` ms inside each moving run.
pub fn oracle_req4(trace: &SimTrace, p: &MonitorParams) -> Vec<(u64, Verdict)> {
    let samples: Vec<(u64, f64)> = trace
        .events
        .iter()
        .filter_map(|e| match e.kind {
            EventKind::Speed { joint_speeds } => Some((e.t, joint_speeds.iter().fold(0.0f64, |a, b| a.max(*b)))),
            _ => None,
        })
        .collect();
    let horizon = samples.iter().map(|s| s.0).max().unwrap_or(0) as usize + 1;
    let mut moving = vec![false; horizon];
    for &(t, _) in &samples {
        for m in t.saturating_sub(p.tick_ms)..t {
            moving[m as usize] = true;
        }
    }
    let mut out = Vec::new();
    let mut m = 0;
    while m < horizon {
        if !moving[m] {
            m += 1;
            continue;
        }
        let start = m;
        while m < horizon && moving[m] {
            m += 1;
        }
        let end = m as u64;
        let mut at = start as u64;
        while at < end {
            let w_end = (at + p.speed_dt_ms).min(end);
            let bad = samples.iter().any(|&(t, v)| {
                let s = t.saturating_sub(p.tick_ms);
                s >= at && s < w_end && v > p.speed_limit_rad_s + SPEED_EPS
            });
            out.push((at, if bad { Verdict::Failed } else { Verdict::Passed }));
            at += p.speed_dt_ms;
        }
    }
    out
}

/// Every monitor agrees with its brute-force oracle on random traces.
pub fn monitor_oracles() -> Result<(), String> {
    let p = MonitorParams::default();
    check(MONITOR_CASES, random_trace(), |trace| {
        prop_assert_eq!(verdicts(&monitor_req1(&trace, &p)), oracle_req1(&trace, p.decision_ms));
        prop_assert_eq!(verdicts(&monitor_req2(&trace, &p)), oracle_req2(&trace));
        prop_assert_eq!(verdicts(&monitor_req3(&trace, &p)), oracle_req3(&trace, p.proximity_m));
        prop_assert_eq!(verdicts(&monitor_req4(&trace, &p)), oracle_req4(&trace, &p));
        Ok(())
    })
}

// ---- coverage merge ----

fn coverage_state() -> impl Strategy<Value = CoverageState> {
    let single = (
        0usize..6,
        prop::collection::vec((0..POINT_UNIVERSE.len(), 1u64..5), 0..12),
        prop::collection::vec(any::<bool>(), 4),
        prop::option::of(1u8..=13),
    )
        .prop_map(|(id, hits, spawned, tuple)| {
            let monitors: Vec<MonitorResult> = ReqId::ALL
                .iter()
                .zip(&spawned)
                .map(|(req, s)| MonitorResult {
                    req: *req,
                    spawns: if *s {
                        vec![Spawn {
                            at_ms: 0,
                            verdict: Verdict::Passed,
                        }]
                    } else {
                        vec![]
                    },
                })
                .collect();
            CoverageState::from_test(
                &format!("t{id}"),
                hits.iter().map(|(i, n)| (POINT_UNIVERSE[*i], *n)),
                &monitors,
                tuple,
            )
        });
    prop_oneof![1 => Just(CoverageState::empty()), 6 => single]
}

/// Merge is commutative, associative and has `empty` as identity.
pub fn merge_laws() -> Result<(), String> {
    let strategy = (coverage_state(), coverage_state(), coverage_state());
    check(MERGE_CASES, strategy, |(a, b, c)| {
        let m = |x: &CoverageState, y: &CoverageState| merge_coverage(x, y).unwrap();
        prop_assert_eq!(m(&a, &b), m(&b, &a));
        prop_assert_eq!(m(&m(&a, &b), &c), m(&a, &m(&b, &c)));
        prop_assert_eq!(m(&a, &CoverageState::empty()), a.clone());
        prop_assert_eq!(m(&CoverageState::empty(), &a), a);
        Ok(())
    })
}

// ---- simulation ----

/// A test as a suite would produce it: from a belief vector or a random
/// sequence, concretized with some seed.
fn suite_test() -> impl Strategy<Value = AbstractTestSequence> {
    let mas = default_mas();
    let bdi = vector().prop_map(move |v| AbstractTestSequence {
        id: format!("v{}", v.0),
        generator: Generator::Bdi,
        beliefs: Some(v),
        actions: run_vector(&mas, v, 10_000).unwrap().0,
    });
    let rnd = (1usize..=30, any::<u64>()).prop_map(|(len, seed)| AbstractTestSequence {
        id: format!("r{seed}"),
        generator: Generator::Random,
        beliefs: None,
        actions: random_generate(&[], len..=len, seed).unwrap(),
    });
    prop_oneof![bdi, rnd]
}

fn noisy_config() -> impl Strategy<Value = ScenarioConfig> {
    prop::array::uniform4(0.0f64..0.5).prop_map(|[g, l, p, v]| {
        let mut cfg = ScenarioConfig::default();
        cfg.sensors.p_gaze = g;
        cfg.sensors.p_loc = l;
        cfg.sensors.p_press = p;
        cfg.sensors.p_voice = v;
        cfg
    })
}

/// Every trace of the unmutated controller lands in exactly one tuple.
pub fn classification_totality() -> Result<(), String> {
    check(CLASSIFY_CASES, (suite_test(), any::<u64>(), noisy_config()), |(a, seed, cfg)| {
        let test = concretize(&a, seed);
        let r = run_test(&test, &cfg, seed).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let tuple = classify_cross_product(&r.trace).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!((1..=13).contains(&tuple));
        Ok(())
    })
}

/// Largest per-joint speed sample in the trace.
pub fn peak_speed(trace: &SimTrace) -> f64 {
    trace
        .events
        .iter()
        .filter_map(|e| match e.kind {
            EventKind::Speed { joint_speeds } => Some(joint_speeds.iter().fold(0.0f64, |a, b| a.max(*b))),
            _ => None,
        })
        .fold(0.0, f64::max)
}

/// With the cap at or below the limit no sample exceeds the cap.
pub fn speed_bound() -> Result<(), String> {
    check(SPEED_CASES, (suite_test(), any::<u64>(), 0.05f64..=0.25), |(a, seed, cap)| {
        let mut cfg = ScenarioConfig::default();
        cfg.robot.speed_cap_rad_s = cap;
        let r = run_test(&concretize(&a, seed), &cfg, seed).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let peak = peak_speed(&r.trace);
        prop_assert!(peak <= cap + SPEED_EPS, "peak {} over cap {}", peak, cap);
        prop_assert!(peak <= 0.25 + SPEED_EPS);
        Ok(())
    })
}

// ---- generation ----

/// Gray-order choice visits every vector once, then reports exhaustion.
pub fn exhaustibility() -> Result<(), String> {
    let mas = default_mas();
    let mut cov = PlanCoverage::new(&mas);
    let mut seen = BTreeSet::new();
    for _ in 0..DOMAIN_SIZE {
        let v = choose_vector(&SelectionStrategy::GrayCode, &mut cov, &mas).map_err(|e| e.to_string())?;
        if !seen.insert(v.0) {
            return Err(format!("vector {} chosen twice", v.0));
        }
        cov.mark_tried(v);
    }
    match choose_vector(&SelectionStrategy::GrayCode, &mut cov, &mas) {
        Err(_) if seen.len() == DOMAIN_SIZE as usize => Ok(()),
        other => Err(format!("expected exhaustion, got {other:?}")),
    }
}

/// Plan coverage never shrinks across generation iterations.
pub fn coverage_monotonicity() -> Result<(), String> {
    let mas = default_mas();
    check(MONOTONICITY_CASES, prop::collection::vec(vector(), 1..12), |list| {
        let mut cov = PlanCoverage::new(&mas);
        let opts = BdiGenOptions {
            max_vectors: 1,
            stop_on_total: false,
            ..Default::default()
        };
        let strategy = SelectionStrategy::Fixed(list.clone());
        let mut last = (BTreeSet::new(), BTreeSet::new());
        for _ in 0..list.len() {
            if bdi_generate(&mas, &strategy, &mut cov, &opts).is_err() {
                break;
            }
            prop_assert!(cov.human_hits.is_superset(&last.0));
            prop_assert!(cov.robot_hits.is_superset(&last.1));
            last = (cov.human_hits.clone(), cov.robot_hits.clone());
        }
        Ok(())
    })
}

pub type Property = fn() -> Result<(), String>;

/// Every property suite with its name, in a fixed order.
pub fn all_properties() -> Vec<(&'static str, Property)> {
    vec![
        ("parser round-trip", parser_round_trip),
        ("MAS determinism", mas_determinism),
        ("plan selection vs brute force", plan_selection),
        ("monitor oracles", monitor_oracles),
        ("coverage merge laws", merge_laws),
        ("classification totality", classification_totality),
        ("speed bound", speed_bound),
        ("exhaustibility", exhaustibility),
        ("coverage monotonicity", coverage_monotonicity),
    ]
}

/// Verdict kinds the random traces drive each oracle to, so the monitor
/// comparison is not vacuous.
pub fn oracle_verdict_kinds(samples: usize) -> Vec<(ReqId, std::collections::HashSet<Verdict>)> {
    use proptest::strategy::ValueTree;
    let p = MonitorParams::default();
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(Config::default().rng_algorithm));
    let mut kinds: Vec<(ReqId, std::collections::HashSet<Verdict>)> =
        ReqId::ALL.iter().map(|r| (*r, Default::default())).collect();
    for _ in 0..samples {
        let trace = random_trace().new_tree(&mut runner).unwrap().current();
        let all = [
            oracle_req1(&trace, p.decision_ms),
            oracle_req2(&trace),
            oracle_req3(&trace, p.proximity_m),
            oracle_req4(&trace, &p),
        ];
        for (slot, found) in kinds.iter_mut().zip(all) {
            slot.1.extend(found.into_iter().map(|(_, v)| v));
        }
    }
    kinds
}
