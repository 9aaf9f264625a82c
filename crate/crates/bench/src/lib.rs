//! Shared fixtures for the criterion benchmarks.

use handover_core::scenario::ConcreteTest;
use handover_core::testgen::bdi_gen::run_vector;
use handover_core::testgen::{concretize, default_mas, AbstractTestSequence, BeliefVector, Generator};

/// Four all-ok rounds: the longest handover session.
pub const FOUR_LEGS: BeliefVector = BeliefVector(0x0FFF);

pub const STEP_BUDGET: u64 = 10_000;

pub fn abstract_for(v: BeliefVector) -> AbstractTestSequence {
    let (actions, _) = run_vector(&default_mas(), v, STEP_BUDGET).expect("shipped agents run");
    AbstractTestSequence {
        id: format!("bench-{:04x}", v.0),
        generator: Generator::Bdi,
        beliefs: Some(v),
        actions,
    }
}

pub fn four_leg_test() -> ConcreteTest {
    concretize(&abstract_for(FOUR_LEGS), 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_leg_fixture_has_stimuli() {
        let t = four_leg_test();
        assert_eq!(t.seed, 1);
        assert!(!t.stimuli.is_empty());
    }
}
