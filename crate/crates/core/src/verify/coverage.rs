//! Code, assertion and cross-product coverage, mergeable across tests.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::classify::TUPLE_COUNT;
use super::monitor::{MonitorResult, ReqId};
use super::VerifyError;
use crate::scenario::UNIVERSE_VERSION;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CoverageState {
    /// Instrumentation universe the hits refer to; `None` for the empty state.
    pub universe: Option<String>,
    pub code_hits: BTreeMap<String, u64>,
    /// Tests in which each requirement's monitor spawned at least once.
    pub assertion: BTreeMap<ReqId, BTreeSet<String>>,
    pub tuples: [u64; TUPLE_COUNT],
    pub tests: u64,
}

impl CoverageState {
    /// Identity for `merge`.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_test<'a>(
        test_id: &str,
        hits: impl IntoIterator<Item = (&'a str, u64)>,
        monitors: &[MonitorResult],
        tuple: Option<u8>,
    ) -> Self {
        let mut s = Self {
            universe: Some(UNIVERSE_VERSION.to_string()),
            tests: 1,
            ..Self::default()
        };
        for (p, n) in hits {
            *s.code_hits.entry(p.to_string()).or_insert(0) += n;
        }
        for m in monitors {
            if !m.spawns.is_empty() {
                s.assertion.entry(m.req).or_default().insert(test_id.to_string());
            }
        }
        if let Some(t) = tuple {
            s.tuples[t as usize - 1] += 1;
        }
        s
    }

    pub fn points_covered(&self) -> usize {
        self.code_hits.values().filter(|n| **n > 0).count()
    }
}

/// Union of hit sets and sum of counts. Fails if both sides name different
/// instrumentation universes.
pub fn merge_coverage(a: &CoverageState, b: &CoverageState) -> Result<CoverageState, VerifyError> {
    let universe = match (&a.universe, &b.universe) {
        (Some(x), Some(y)) if x != y => {
            return Err(VerifyError::IncompatibleUniverse {
                left: x.clone(),
                right: y.clone(),
            })
        }
        (Some(x), _) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    };
    let mut out = a.clone();
    out.universe = universe;
    for (p, n) in &b.code_hits {
        *out.code_hits.entry(p.clone()).or_insert(0) += n;
    }
    for (r, tests) in &b.assertion {
        out.assertion.entry(*r).or_default().extend(tests.iter().cloned());
    }
    for (o, n) in out.tuples.iter_mut().zip(b.tuples) {
        *o += n;
    }
    out.tests += b.tests;
    Ok(out)
}

/// Per-test verdicts, one row per test and requirement.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VerdictTable {
    pub rows: Vec<(String, Vec<MonitorResult>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReqSummary {
    pub passed_tests: usize,
    pub failed_tests: usize,
    pub not_checked_tests: usize,
    pub tests: usize,
}

impl VerdictTable {
    pub fn push(&mut self, test_id: impl Into<String>, results: Vec<MonitorResult>) {
        self.rows.push((test_id.into(), results));
    }

    /// Table-I style counts: a test is counted as passed if any spawn
    /// passed and as failed if any spawn failed, so both can apply.
    pub fn summary(&self, req: ReqId) -> ReqSummary {
        let mut s = ReqSummary::default();
        for (_, results) in &self.rows {
            let Some(m) = results.iter().find(|m| m.req == req) else { continue };
            let f = m.flags();
            s.tests += 1;
            s.passed_tests += f.passed as usize;
            s.failed_tests += f.failed as usize;
            s.not_checked_tests += f.not_checked as usize;
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::monitor::{Spawn, Verdict};

    fn one(id: &str, hits: &[(&'static str, u64)], tuple: u8) -> CoverageState {
        let m = MonitorResult {
            req: ReqId::Req4,
            spawns: vec![Spawn {
                at_ms: 0,
                verdict: Verdict::Passed,
            }],
        };
        CoverageState::from_test(id, hits.iter().copied(), &[m], Some(tuple))
    }

    #[test]
    fn identity_and_commutativity() {
        let a = one("a", &[("state:End", 1), ("state:PickUp", 2)], 13);
        let b = one("b", &[("state:End", 1)], 1);
        assert_eq!(merge_coverage(&a, &CoverageState::empty()).unwrap(), a);
        assert_eq!(merge_coverage(&CoverageState::empty(), &a).unwrap(), a);
        assert_eq!(merge_coverage(&a, &b).unwrap(), merge_coverage(&b, &a).unwrap());
        let m = merge_coverage(&a, &b).unwrap();
        assert_eq!(m.code_hits["state:End"], 2);
        assert_eq!(m.tuples[0], 1);
        assert_eq!(m.tuples[12], 1);
        assert_eq!(m.assertion[&ReqId::Req4].len(), 2);
    }

    #[test]
    fn incompatible_universe() {
        let a = one("a", &[], 13);
        let mut b = a.clone();
        b.universe = Some("other".into());
        assert!(matches!(merge_coverage(&a, &b), Err(VerifyError::IncompatibleUniverse { .. })));
    }

    #[test]
    fn both_flags_counted() {
        let mut t = VerdictTable::default();
        let spawns = vec![
            Spawn { at_ms: 0, verdict: Verdict::Passed },
            Spawn { at_ms: 5, verdict: Verdict::Failed },
        ];
        t.push("x", vec![MonitorResult { req: ReqId::Req3, spawns }]);
        t.push("y", vec![MonitorResult { req: ReqId::Req3, spawns: vec![] }]);
        let s = t.summary(ReqId::Req3);
        assert_eq!((s.passed_tests, s.failed_tests, s.not_checked_tests, s.tests), (1, 1, 1, 2));
    }
}
