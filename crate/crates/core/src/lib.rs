//! Coverage-driven verification of a human-robot handover task.
//!
//! Tests are generated in two tiers: BDI agents (or constrained random
//! draws) produce abstract action sequences, which are then instantiated
//! into timed stimuli. A discrete-event simulator drives the robot control
//! state machine with those stimuli; offline automata monitors check the
//! safety and functional requirements and coverage collectors summarise
//! what the suite exercised.

pub mod agentlang;
pub mod bdi;
pub mod scenario;
pub mod testgen;
pub mod verify;
pub mod harness;
