//! Two-tier test generation: abstract action sequences from the agent
//! system or from constrained random draws, then concrete timed stimuli.

pub mod alphabet;
pub mod bdi_gen;
pub mod beliefs;
pub mod concretize;
pub mod random_gen;
pub mod suite;

use thiserror::Error;

use crate::bdi::BdiError;

pub use alphabet::{validate_sequence, AbstractAction, AbstractTestSequence, ActionName, Generator};
pub use bdi_gen::{bdi_generate, default_mas, BdiGenOptions, CoverageState, SelectionStrategy};
pub use beliefs::{BeliefVector, VectorClass, DOMAIN_SIZE};
pub use concretize::concretize;
pub use random_gen::{parse_constraints, random_generate, random_sequence, GenerationConstraint};
pub use suite::{class_quota_vectors, paper_quota, paper_suite, random_suite, PaperSuite, PaperSuiteConfig, SuiteTest};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TestgenError {
    #[error("every belief vector has been tried")]
    NoUntriedVector,
    #[error("constraints cannot be satisfied: {0}")]
    UnsatisfiableConstraints(String),
    #[error("no concrete generator for action `{0}`")]
    UnregisteredAction(String),
    #[error("sequence breaks protocol order at element {index}: {reason}")]
    InvalidSequence { index: usize, reason: String },
    #[error("agent system has no `{0}` agent")]
    MissingAgent(String),
    #[error(transparent)]
    Bdi(#[from] BdiError),
}
