//! Suite orchestration: generate, run in parallel, collect, report.

pub mod compare;
pub mod generate;
pub mod files;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::{run_test, ConcreteTest, ScenarioConfig, ScenarioError};
use crate::testgen::TestgenError;
use crate::verify::report::{
    assertion_summary_csv, coverage_curve_csv, coverage_json, cross_product_csv, cumulative_curve, verdicts_csv,
};
use crate::verify::{
    classify_cross_product, merge_coverage, monitor_all, CoverageState, MonitorParams, MonitorResult, VerdictTable,
    VerifyError, TUPLE_COUNT,
};

pub use compare::{compare_curves, plateau, tests_to_reach, Comparison, SuiteCurve};
pub use files::{load_tests, read_json, write_json, write_tests};
pub use generate::{generate, generate_paper, run_paper_suite, Generated, PaperRun, RANDOM_LENGTHS};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Testgen(#[from] TestgenError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("missing suite: {0}")]
    MissingSuite(String),
    #[error("invalid suite config: {0}")]
    Config(String),
}

impl HarnessError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    PaperSuite,
    Bdi,
    Random,
    Single,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub mode: Mode,
    pub count: usize,
    /// Seed of test 1; test `k` uses `first_seed + k - 1`.
    pub first_seed: u64,
    pub config_path: Option<PathBuf>,
    pub out: PathBuf,
    pub jobs: usize,
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.jobs == 0 {
            return Err(HarnessError::Config("jobs must be at least 1".into()));
        }
        if self.mode == Mode::Single && self.count != 1 {
            return Err(HarnessError::Config("single mode runs exactly one test".into()));
        }
        Ok(())
    }

    pub fn scenario(&self) -> Result<ScenarioConfig, HarnessError> {
        match &self.config_path {
            Some(p) => Ok(ScenarioConfig::load(p)?),
            None => Ok(ScenarioConfig::default()),
        }
    }
}

/// What one test produced, or why it could not run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub test_id: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify_error: Option<String>,
    pub legs_delivered: u8,
    pub end_ms: u64,
    pub monitors: Vec<MonitorResult>,
    pub hits: BTreeMap<String, u64>,
}

impl TestOutcome {
    fn failed(test: &ConcreteTest, error: String) -> Self {
        Self {
            test_id: test.id.clone(),
            seed: test.seed,
            error: Some(error),
            tuple: None,
            classify_error: None,
            legs_delivered: 0,
            end_ms: 0,
            monitors: Vec::new(),
            hits: BTreeMap::new(),
        }
    }

    pub fn any_monitor_failed(&self) -> bool {
        self.monitors.iter().any(|m| m.failed() > 0)
    }
}

/// Simulate, monitor and classify one test. Errors and panics inside the
/// test are recorded in the outcome.
pub fn run_one(test: &ConcreteTest, cfg: &ScenarioConfig) -> TestOutcome {
    let params = MonitorParams::from_config(cfg);
    let attempt = catch_unwind(AssertUnwindSafe(|| run_test(test, cfg, test.seed)));
    let result = match attempt {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => return TestOutcome::failed(test, e.to_string()),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            return TestOutcome::failed(test, format!("simulator panicked: {msg}"));
        }
    };
    let (tuple, classify_error) = match classify_cross_product(&result.trace) {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e.to_string())),
    };
    TestOutcome {
        test_id: test.id.clone(),
        seed: test.seed,
        error: None,
        tuple,
        classify_error,
        legs_delivered: result.legs_delivered,
        end_ms: result.trace.end_time(),
        monitors: monitor_all(&result.trace, &params),
        hits: result.hits.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub wall_ms: u128,
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub outcomes: Vec<TestOutcome>,
    #[serde(skip)]
    pub stats: Option<RunStats>,
}

impl SuiteResult {
    pub fn from_outcomes(name: impl Into<String>, outcomes: Vec<TestOutcome>) -> Self {
        Self {
            name: name.into(),
            outcomes,
            stats: None,
        }
    }

    pub fn verdicts(&self) -> VerdictTable {
        let mut t = VerdictTable::default();
        for o in self.outcomes.iter().filter(|o| o.error.is_none()) {
            t.push(o.test_id.clone(), o.monitors.clone());
        }
        t
    }

    /// Associative reduction of the per-test coverage.
    pub fn coverage(&self) -> Result<CoverageState, VerifyError> {
        self.outcomes
            .iter()
            .filter(|o| o.error.is_none())
            .map(|o| CoverageState::from_test(&o.test_id, o.hits.iter().map(|(k, v)| (k.as_str(), *v)), &o.monitors, o.tuple))
            .try_fold(CoverageState::empty(), |acc, c| merge_coverage(&acc, &c))
    }

    pub fn tuples(&self) -> [u64; TUPLE_COUNT] {
        let mut out = [0; TUPLE_COUNT];
        for t in self.outcomes.iter().filter_map(|o| o.tuple) {
            out[t as usize - 1] += 1;
        }
        out
    }

    /// Distinct instrumentation points after each test, in test order.
    pub fn curve(&self) -> Vec<usize> {
        cumulative_curve(self.outcomes.iter().map(|o| o.hits.keys().map(String::as_str)))
    }

    pub fn any_monitor_failed(&self) -> bool {
        self.outcomes.iter().any(TestOutcome::any_monitor_failed)
    }

    pub fn errors(&self) -> impl Iterator<Item = &TestOutcome> {
        self.outcomes
            .iter()
            .filter(|o| o.error.is_some() || o.classify_error.is_some())
    }
}

/// Run every test with `jobs` worker threads. Outcomes come back in input
/// order whatever the parallelism.
pub fn run_suite(name: &str, tests: &[ConcreteTest], cfg: &ScenarioConfig, jobs: usize) -> Result<SuiteResult, HarnessError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let start = Instant::now();
    let outcomes: Vec<TestOutcome> = pool.install(|| tests.par_iter().map(|t| run_one(t, cfg)).collect());
    let mut result = SuiteResult::from_outcomes(name, outcomes);
    result.stats = Some(RunStats {
        wall_ms: start.elapsed().as_millis(),
        jobs,
    });
    Ok(result)
}

/// Report files whose bytes depend only on the inputs.
pub const DETERMINISTIC_REPORTS: [&str; 7] = [
    "verdicts.csv",
    "assertions.csv",
    "coverage.json",
    "cross_product.csv",
    "coverage_curve.csv",
    "outcomes.json",
    "errors.csv",
];

fn errors_csv(suites: &[&SuiteResult]) -> String {
    let mut out = String::from("suite,test_id,error\n");
    for s in suites {
        for o in s.errors() {
            let msg = o.error.as_ref().or(o.classify_error.as_ref()).expect("filtered");
            out.push_str(&format!("{},{},\"{}\"\n", s.name, o.test_id, msg.replace('"', "'")));
        }
    }
    out
}

/// Write the report set for one or more suites into `dir`. Verdicts and
/// coverage cover all suites together; the cross-product table and the
/// curve get one column per suite (plus a total when there are several).
pub fn write_reports(dir: &Path, suites: &[&SuiteResult]) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut verdicts = VerdictTable::default();
    let mut coverage = CoverageState::empty();
    for s in suites {
        verdicts.rows.extend(s.verdicts().rows);
        coverage = merge_coverage(&coverage, &s.coverage()?)?;
    }
    let all_hits = suites
        .iter()
        .flat_map(|s| s.outcomes.iter())
        .map(|o| o.hits.keys().map(String::as_str));
    let combined_curve = cumulative_curve(all_hits);

    let mut tuple_cols: Vec<(&str, [u64; TUPLE_COUNT])> = suites.iter().map(|s| (s.name.as_str(), s.tuples())).collect();
    if suites.len() > 1 {
        tuple_cols.push(("total", coverage.tuples));
    }
    let curves: Vec<(String, Vec<usize>)> = suites.iter().map(|s| (s.name.clone(), s.curve())).collect();
    let curve_refs: Vec<(&str, &[usize])> = curves.iter().map(|(n, c)| (n.as_str(), c.as_slice())).collect();
    let outcomes: BTreeMap<&str, &Vec<TestOutcome>> = suites.iter().map(|s| (s.name.as_str(), &s.outcomes)).collect();

    let files: Vec<(&str, String)> = vec![
        ("verdicts.csv", verdicts_csv(&verdicts)),
        ("assertions.csv", assertion_summary_csv(&verdicts)),
        ("coverage.json", coverage_json(&coverage, &combined_curve)),
        ("cross_product.csv", cross_product_csv(&tuple_cols)),
        ("coverage_curve.csv", coverage_curve_csv(&curve_refs)),
        (
            "outcomes.json",
            serde_json::to_string_pretty(&outcomes).expect("outcomes serialize") + "\n",
        ),
        ("errors.csv", errors_csv(suites)),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| HarnessError::io(&path, e))?;
        written.push(path);
    }
    let stats: BTreeMap<&str, &Option<RunStats>> = suites.iter().map(|s| (s.name.as_str(), &s.stats)).collect();
    let path = dir.join("stats.json");
    write_json(&path, &stats)?;
    written.push(path);
    Ok(written)
}
