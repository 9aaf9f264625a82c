//! Suite generation per mode, and the end-to-end reference suite.

use std::path::Path;

use super::files::read_json;
use super::{run_suite, write_reports, HarnessError, Mode, SuiteConfig, SuiteResult};
use crate::scenario::{ConcreteTest, ScenarioConfig};
use crate::testgen::random_gen::random_sequence;
use crate::testgen::{
    bdi_generate, concretize, default_mas, paper_suite, AbstractTestSequence, BdiGenOptions, CoverageState,
    GenerationConstraint, PaperSuite, PaperSuiteConfig, SelectionStrategy,
};

/// Length range of unconstrained random sequences.
pub const RANDOM_LENGTHS: std::ops::RangeInclusive<usize> = 1..=30;

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub abstracts: Vec<AbstractTestSequence>,
    pub tests: Vec<ConcreteTest>,
}

/// Build the tests for `cfg.mode`. Random mode applies `constraints`;
/// single mode concretizes the sequence stored at `abstract_path`.
pub fn generate(
    cfg: &SuiteConfig,
    constraints: &[GenerationConstraint],
    abstract_path: Option<&Path>,
) -> Result<Generated, HarnessError> {
    cfg.validate()?;
    let seed = |k: usize| cfg.first_seed + k as u64 - 1;
    match cfg.mode {
        Mode::PaperSuite => generate_paper(Mode::PaperSuite),
        Mode::Bdi => {
            let mas = default_mas();
            let mut cov = CoverageState::new(&mas);
            let opts = BdiGenOptions {
                max_vectors: cfg.count,
                stop_on_total: true,
                ..Default::default()
            };
            let abstracts = if cfg.count == 0 {
                Vec::new()
            } else {
                bdi_generate(&mas, &SelectionStrategy::GreedyNovelty, &mut cov, &opts)?
            };
            let tests = abstracts
                .iter()
                .enumerate()
                .map(|(i, a)| concretize(a, seed(i + 1)))
                .collect();
            Ok(Generated { abstracts, tests })
        }
        Mode::Random => {
            let mut abstracts = Vec::new();
            let mut tests = Vec::new();
            for k in 1..=cfg.count {
                let a = random_sequence(format!("rnd-abs-{k:03}"), constraints, RANDOM_LENGTHS, seed(k))?;
                let mut t = concretize(&a, seed(k));
                t.id = format!("rnd-{k:03}");
                abstracts.push(a);
                tests.push(t);
            }
            Ok(Generated { abstracts, tests })
        }
        Mode::Single => {
            let path = abstract_path.ok_or_else(|| HarnessError::Config("single mode needs an abstract sequence file".into()))?;
            let a: AbstractTestSequence = read_json(path)?;
            let t = concretize(&a, cfg.first_seed);
            Ok(Generated {
                abstracts: vec![a],
                tests: vec![t],
            })
        }
    }
}

/// The reference suite, or one half of it: `Bdi` gives the 130 abstract and
/// 138 concrete BDI tests, `Random` the 30 constrained random ones.
pub fn generate_paper(part: Mode) -> Result<Generated, HarnessError> {
    let s = paper_suite(&PaperSuiteConfig::default())?;
    let (abstracts, tests) = match part {
        Mode::PaperSuite => {
            let mut abstracts = s.bdi_abstract;
            abstracts.extend(s.random_abstract);
            (abstracts, s.bdi.into_iter().chain(s.random).collect::<Vec<_>>())
        }
        Mode::Bdi => (s.bdi_abstract, s.bdi),
        Mode::Random => (s.random_abstract, s.random),
        Mode::Single => return Err(HarnessError::Config("the reference suite has no single mode".into())),
    };
    Ok(Generated {
        abstracts,
        tests: tests.into_iter().map(|t| t.test).collect(),
    })
}

pub struct PaperRun {
    pub suite: PaperSuite,
    pub bdi: SuiteResult,
    pub random: SuiteResult,
}

/// Generate the reference suite and run both halves.
pub fn run_paper_suite(cfg: &ScenarioConfig, jobs: usize) -> Result<PaperRun, HarnessError> {
    let suite = paper_suite(&PaperSuiteConfig::default())?;
    let bdi_tests: Vec<ConcreteTest> = suite.bdi.iter().map(|t| t.test.clone()).collect();
    let rnd_tests: Vec<ConcreteTest> = suite.random.iter().map(|t| t.test.clone()).collect();
    let bdi = run_suite("bdi", &bdi_tests, cfg, jobs)?;
    let random = run_suite("random", &rnd_tests, cfg, jobs)?;
    Ok(PaperRun { suite, bdi, random })
}

impl PaperRun {
    pub fn write_reports(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>, HarnessError> {
        write_reports(dir, &[&self.bdi, &self.random])
    }
}
