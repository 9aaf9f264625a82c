//! Coverage-speed comparison between suites.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::scenario::POINT_UNIVERSE;

/// 1-based index of the first test at which the curve reaches its final
/// value; `None` for an empty curve.
pub fn plateau(curve: &[usize]) -> Option<usize> {
    let last = *curve.last()?;
    curve.iter().position(|c| *c >= last).map(|i| i + 1)
}

/// 1-based index of the first test reaching `target` points, if any.
pub fn tests_to_reach(curve: &[usize], target: usize) -> Option<usize> {
    curve.iter().position(|c| *c >= target).map(|i| i + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteCurve {
    pub name: String,
    pub tests: usize,
    pub final_points: usize,
    pub plateau: Option<usize>,
    /// Tests needed to reach the comparison target.
    pub to_target: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    /// Larger of the suites' final coverage, in points.
    pub target: usize,
    pub suites: Vec<SuiteCurve>,
    /// Suites with no tests.
    pub empty: Vec<String>,
}

impl Comparison {
    pub fn get(&self, name: &str) -> Option<&SuiteCurve> {
        self.suites.iter().find(|s| s.name == name)
    }

    /// Whether `a` reaches the common target in strictly fewer tests than
    /// `b`. A suite that never reaches it counts as infinitely slow.
    pub fn faster(&self, a: &str, b: &str) -> bool {
        let key = |n: &str| self.get(n).and_then(|s| s.to_target).unwrap_or(usize::MAX);
        key(a) < key(b)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,tests,final_points,final_fraction,plateau_test,tests_to_target,target_points\n");
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_else(|| "never".into());
        for s in &self.suites {
            writeln!(
                out,
                "{},{},{},{:.6},{},{},{}",
                s.name,
                s.tests,
                s.final_points,
                s.final_points as f64 / POINT_UNIVERSE.len() as f64,
                opt(s.plateau),
                opt(s.to_target),
                self.target
            )
            .unwrap();
        }
        out
    }
}

pub fn compare_curves(curves: &[(&str, &[usize])]) -> Comparison {
    let target = curves.iter().filter_map(|(_, c)| c.last().copied()).max().unwrap_or(0);
    Comparison {
        target,
        suites: curves
            .iter()
            .map(|(name, c)| SuiteCurve {
                name: name.to_string(),
                tests: c.len(),
                final_points: c.last().copied().unwrap_or(0),
                plateau: plateau(c),
                to_target: tests_to_reach(c, target),
            })
            .collect(),
        empty: curves.iter().filter(|(_, c)| c.is_empty()).map(|(n, _)| n.to_string()).collect(),
    }
}
