mod common;

macro_rules! property {
    ($name:ident) => {
        #[test]
        fn $name() {
            if let Err(e) = common::$name() {
                panic!("{e}");
            }
        }
    };
}

property!(parser_round_trip);
property!(mas_determinism);
property!(plan_selection);
property!(monitor_oracles);
property!(merge_laws);
property!(classification_totality);
property!(speed_bound);
property!(exhaustibility);
property!(coverage_monotonicity);

#[test]
fn random_traces_reach_every_verdict() {
    use handover_core::verify::{ReqId, Verdict};
    for (req, kinds) in common::oracle_verdict_kinds(300) {
        assert!(kinds.contains(&Verdict::Passed), "{req:?} never passes");
        assert!(kinds.contains(&Verdict::Failed), "{req:?} never fails");
        if matches!(req, ReqId::Req1 | ReqId::Req2) {
            assert!(kinds.contains(&Verdict::NotChecked), "{req:?} never open at trace end");
        }
    }
}

#[test]
fn req4_oracle_on_a_hand_trace() {
    use handover_core::scenario::{EventKind, SimTrace};
    use handover_core::verify::{MonitorParams, Verdict};
    let mut t = SimTrace::default();
    for k in 1..=25u64 {
        let v = if k == 13 { 0.3 } else { 0.2 };
        t.push(k * 10, EventKind::Speed { joint_speeds: [v, 0.0, 0.0] });
    }
    // moving over [0, 250): windows at 0, 100, 200; the fast sample at 130 starts at 120
    let got = common::oracle_req4(&t, &MonitorParams::default());
    assert_eq!(got, vec![(0, Verdict::Passed), (100, Verdict::Failed), (200, Verdict::Passed)]);
}
