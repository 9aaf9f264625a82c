//! Text renderings of verdicts and coverage. All output is deterministic
//! for a given input so report files can be compared by hash.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde_json::json;

use super::classify::{TUPLE_COUNT, TUPLE_LABELS};
use super::coverage::{CoverageState, VerdictTable};
use super::monitor::ReqId;
use crate::scenario::{POINT_UNIVERSE, UNIVERSE_VERSION};

pub fn verdicts_csv(table: &VerdictTable) -> String {
    let mut out = String::from("test_id,req_id,passed_spawns,failed_spawns,flag\n");
    for (test, results) in &table.rows {
        for m in results {
            writeln!(out, "{test},{},{},{},{}", m.req, m.passed(), m.failed(), m.flags()).unwrap();
        }
    }
    out
}

/// Per requirement: tests flagged passed, failed, not checked.
pub fn assertion_summary_csv(table: &VerdictTable) -> String {
    let mut out = String::from("req_id,passed_tests,failed_tests,not_checked_tests,tests\n");
    for r in ReqId::ALL {
        let s = table.summary(r);
        writeln!(out, "{r},{},{},{},{}", s.passed_tests, s.failed_tests, s.not_checked_tests, s.tests).unwrap();
    }
    out
}

/// One row per tuple, one count column per suite.
pub fn cross_product_csv(columns: &[(&str, [u64; TUPLE_COUNT])]) -> String {
    let mut out = String::from("tuple,human,robot");
    for (name, _) in columns {
        write!(out, ",{name}").unwrap();
    }
    out.push('\n');
    for (i, (h, r)) in TUPLE_LABELS.iter().enumerate() {
        write!(out, "{},{h},{r}", i + 1).unwrap();
        for (_, counts) in columns {
            write!(out, ",{}", counts[i]).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Distinct points covered after each test, in order.
pub fn cumulative_curve<'a, I, S>(per_test: I) -> Vec<usize>
where
    I: IntoIterator<Item = S>,
    S: IntoIterator<Item = &'a str>,
{
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    per_test
        .into_iter()
        .map(|hits| {
            seen.extend(hits);
            seen.len()
        })
        .collect()
}

fn fraction(covered: usize) -> f64 {
    covered as f64 / POINT_UNIVERSE.len() as f64
}

pub fn coverage_json(cov: &CoverageState, curve: &[usize]) -> String {
    let hits: serde_json::Map<String, serde_json::Value> = POINT_UNIVERSE
        .iter()
        .map(|p| (p.to_string(), json!(cov.code_hits.get(*p).copied().unwrap_or(0))))
        .collect();
    let samples: Vec<_> = curve
        .iter()
        .enumerate()
        .map(|(i, c)| json!({ "tests": i + 1, "covered": c, "fraction": format!("{:.6}", fraction(*c)) }))
        .collect();
    let doc = json!({
        "universe_version": cov.universe.clone().unwrap_or_else(|| UNIVERSE_VERSION.to_string()),
        "universe_size": POINT_UNIVERSE.len(),
        "points_covered": cov.points_covered(),
        "tests": cov.tests,
        "hits": hits,
        "curve": samples,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json");
    s.push('\n');
    s
}

/// `tests` column then one coverage-fraction column per suite; a suite
/// shorter than the longest leaves its cells empty.
pub fn coverage_curve_csv(curves: &[(&str, &[usize])]) -> String {
    let mut out = String::from("tests");
    for (name, _) in curves {
        write!(out, ",{name}").unwrap();
    }
    out.push('\n');
    let len = curves.iter().map(|(_, c)| c.len()).max().unwrap_or(0);
    for i in 0..len {
        write!(out, "{}", i + 1).unwrap();
        for (_, c) in curves {
            match c.get(i) {
                Some(v) => write!(out, ",{:.6}", fraction(*v)).unwrap(),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}
