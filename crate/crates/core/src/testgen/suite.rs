//! The fixed reference suite: BDI-directed tests for the handover classes
//! plus constrained-random tests in which no leg is ever requested.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::alphabet::{AbstractTestSequence, ActionName};
use super::bdi_gen::{bdi_generate, default_mas, BdiGenOptions, CoverageState, SelectionStrategy};
use super::beliefs::{BeliefVector, VectorClass};
use super::concretize::concretize;
use super::random_gen::{random_sequence, GenerationConstraint};
use super::TestgenError;
use crate::scenario::ConcreteTest;

/// How many vectors of each class the suite draws.
pub fn paper_quota() -> Vec<(VectorClass, usize)> {
    use VectorClass::*;
    vec![
        (AllOk(4), 4),
        (AllOk(3), 1),
        (AllOk(2), 8),
        (AllOk(1), 16),
        (NotOk(4), 12),
        (NotOk(3), 12),
        (NotOk(2), 12),
        (NotOk(1), 12),
        (Bored(4), 13),
        (Bored(3), 13),
        (Bored(2), 13),
        (Bored(1), 12),
        (SkipReady(2), 1),
        (SkipReady(4), 1),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperSuiteConfig {
    /// Shuffles the domain before filling the class quotas.
    pub selection_seed: u64,
    /// Concrete tests per skip-ready abstract.
    pub seeds_per_skip_abstract: u64,
    pub random_tests: u64,
    pub random_min_len: usize,
    pub random_max_len: usize,
}

impl Default for PaperSuiteConfig {
    fn default() -> Self {
        Self {
            selection_seed: 0x00C0_FFEE,
            seeds_per_skip_abstract: 5,
            random_tests: 30,
            random_min_len: 1,
            random_max_len: 12,
        }
    }
}

impl PaperSuiteConfig {
    pub fn random_lengths(&self) -> RangeInclusive<usize> {
        self.random_min_len..=self.random_max_len
    }
}

/// Fill `quota` from a seeded shuffle of the domain. Skip-ready vectors go
/// last so they take the final test numbers.
pub fn class_quota_vectors(quota: &[(VectorClass, usize)], seed: u64) -> Vec<BeliefVector> {
    let mut domain: Vec<BeliefVector> = BeliefVector::all().collect();
    domain.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut left: BTreeMap<VectorClass, usize> = quota.iter().copied().collect();
    let mut main = Vec::new();
    let mut tail = Vec::new();
    for v in domain {
        let c = v.class();
        if let Some(n) = left.get_mut(&c).filter(|n| **n > 0) {
            *n -= 1;
            if matches!(c, VectorClass::SkipReady(_)) {
                tail.push(v);
            } else {
                main.push(v);
            }
        }
    }
    main.extend(tail);
    main
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteTest {
    /// 1-based position in its suite; also the seed.
    pub number: u64,
    pub abstract_id: String,
    pub test: ConcreteTest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperSuite {
    pub bdi_abstract: Vec<AbstractTestSequence>,
    pub random_abstract: Vec<AbstractTestSequence>,
    pub bdi: Vec<SuiteTest>,
    pub random: Vec<SuiteTest>,
}

impl PaperSuite {
    pub fn concrete_count(&self) -> usize {
        self.bdi.len() + self.random.len()
    }
}

fn numbered(prefix: &str, n: u64, abs: &AbstractTestSequence) -> SuiteTest {
    let mut test = concretize(abs, n);
    test.id = format!("{prefix}-{n:03}");
    SuiteTest {
        number: n,
        abstract_id: abs.id.clone(),
        test,
    }
}

/// Random suite: `count` sequences under `constraints`, test `k` drawn and
/// concretized with seed `k`.
pub fn random_suite(
    prefix: &str,
    count: u64,
    constraints: &[GenerationConstraint],
    lengths: RangeInclusive<usize>,
) -> Result<(Vec<AbstractTestSequence>, Vec<SuiteTest>), TestgenError> {
    let mut abs = Vec::new();
    let mut tests = Vec::new();
    for k in 1..=count {
        let a = random_sequence(format!("{prefix}-abs-{k:03}"), constraints, lengths.clone(), k)?;
        tests.push(numbered(prefix, k, &a));
        abs.push(a);
    }
    Ok((abs, tests))
}

pub fn paper_suite(cfg: &PaperSuiteConfig) -> Result<PaperSuite, TestgenError> {
    let mas = default_mas();
    let vectors = class_quota_vectors(&paper_quota(), cfg.selection_seed);
    let mut cov = CoverageState::new(&mas);
    let opts = BdiGenOptions {
        max_vectors: vectors.len(),
        stop_on_total: false,
        ..Default::default()
    };
    let bdi_abstract = bdi_generate(&mas, &SelectionStrategy::Fixed(vectors), &mut cov, &opts)?;

    let mut bdi = Vec::new();
    let mut n = 0;
    for a in &bdi_abstract {
        let class = a.beliefs.map(|b| b.class());
        let copies = if matches!(class, Some(VectorClass::SkipReady(_))) {
            cfg.seeds_per_skip_abstract
        } else {
            1
        };
        for _ in 0..copies {
            n += 1;
            bdi.push(numbered("bdi", n, a));
        }
    }

    let forbid = [GenerationConstraint::ForbidElement {
        action: ActionName::RequestLeg,
    }];
    let (random_abstract, random) = random_suite("rnd", cfg.random_tests, &forbid, cfg.random_lengths())?;
    Ok(PaperSuite {
        bdi_abstract,
        random_abstract,
        bdi,
        random,
    })
}
