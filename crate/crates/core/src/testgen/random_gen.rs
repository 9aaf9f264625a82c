//! Constrained pseudorandom abstract sequences.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::alphabet::{validate_sequence, AbstractAction, AbstractTestSequence, ActionName, Generator};
use super::beliefs::ROUNDS;
use super::TestgenError;

/// Redraws allowed before giving up on a constraint set.
pub const MAX_ATTEMPTS: usize = 1000;

mod action_str {
    use super::ActionName;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(a: &ActionName, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(a)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ActionName, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GenerationConstraint {
    /// `action` at zero-based `position`.
    FixElement {
        position: usize,
        #[serde(with = "action_str")]
        action: ActionName,
    },
    /// `after` may only occur once `before` has occurred.
    OrderRelation {
        #[serde(with = "action_str")]
        before: ActionName,
        #[serde(with = "action_str")]
        after: ActionName,
    },
    ForbidElement {
        #[serde(with = "action_str")]
        action: ActionName,
    },
}

#[derive(Default)]
struct Prefix {
    round: u8,
    requested: bool,
    seen: Vec<ActionName>,
}

impl Prefix {
    fn new() -> Self {
        Self {
            round: 1,
            ..Default::default()
        }
    }

    fn allows(&self, a: ActionName) -> bool {
        match a {
            ActionName::RequestLeg => !self.requested || self.round < ROUNDS,
            n if n.needs_request() => self.requested,
            _ => true,
        }
    }

    fn push(&mut self, a: ActionName) -> AbstractAction {
        if a == ActionName::RequestLeg {
            if self.requested {
                self.round += 1;
            }
            self.requested = true;
        }
        self.seen.push(a);
        AbstractAction::new(a, self.round)
    }
}

fn check_satisfiable(constraints: &[GenerationConstraint], lengths: &RangeInclusive<usize>) -> Result<(), TestgenError> {
    let unsat = |why: String| Err(TestgenError::UnsatisfiableConstraints(why));
    if lengths.is_empty() {
        return unsat(format!("empty length range {lengths:?}"));
    }
    let forbidden: Vec<ActionName> = constraints
        .iter()
        .filter_map(|c| match c {
            GenerationConstraint::ForbidElement { action } => Some(*action),
            _ => None,
        })
        .collect();
    if ActionName::ALPHABET.iter().all(|a| forbidden.contains(a)) && *lengths.end() > 0 && *lengths.start() > 0 {
        return unsat("every action is forbidden".into());
    }
    let mut fixed: Vec<(usize, ActionName)> = Vec::new();
    for c in constraints {
        if let GenerationConstraint::FixElement { position, action } = c {
            if *position >= *lengths.end() {
                return unsat(format!("position {position} beyond maximum length {}", lengths.end()));
            }
            if forbidden.contains(action) {
                return unsat(format!("{action} is both fixed and forbidden"));
            }
            if let Some((_, other)) = fixed.iter().find(|(p, o)| p == position && o != action) {
                return unsat(format!("position {position} fixed to both {other} and {action}"));
            }
            fixed.push((*position, *action));
        }
    }
    for c in constraints {
        if let GenerationConstraint::OrderRelation { before, after } = c {
            if before == after && fixed.iter().any(|(_, a)| a == after) {
                return unsat(format!("{after} must precede itself"));
            }
            if forbidden.contains(before) && fixed.iter().any(|(_, a)| a == after) {
                return unsat(format!("{after} is fixed but {before} is forbidden"));
            }
        }
    }
    Ok(())
}

fn draw_once(
    constraints: &[GenerationConstraint],
    len: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<AbstractAction>> {
    let mut prefix = Prefix::new();
    let mut out = Vec::with_capacity(len);
    for pos in 0..len {
        let fixed = constraints.iter().find_map(|c| match c {
            GenerationConstraint::FixElement { position, action } if *position == pos => Some(*action),
            _ => None,
        });
        let candidates: Vec<ActionName> = ActionName::ALPHABET
            .into_iter()
            .filter(|a| prefix.allows(*a))
            .filter(|a| {
                constraints.iter().all(|c| match c {
                    GenerationConstraint::ForbidElement { action } => action != a,
                    GenerationConstraint::OrderRelation { before, after } => {
                        after != a || prefix.seen.contains(before)
                    }
                    GenerationConstraint::FixElement { .. } => true,
                })
            })
            .collect();
        let pick = match fixed {
            Some(a) if candidates.contains(&a) => a,
            Some(_) => return None,
            None => *candidates.choose(rng)?,
        };
        out.push(prefix.push(pick));
    }
    Some(out)
}

/// Uniform draws over the alphabet, restricted at each position to the
/// symbols the constraints and the protocol still allow.
pub fn random_generate(
    constraints: &[GenerationConstraint],
    lengths: RangeInclusive<usize>,
    seed: u64,
) -> Result<Vec<AbstractAction>, TestgenError> {
    check_satisfiable(constraints, &lengths)?;
    let min_len = constraints
        .iter()
        .filter_map(|c| match c {
            GenerationConstraint::FixElement { position, .. } => Some(position + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0)
        .max(*lengths.start());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let len = rng.gen_range(min_len..=*lengths.end());
        if let Some(seq) = draw_once(constraints, len, &mut rng) {
            debug_assert!(validate_sequence(&seq).is_ok());
            return Ok(seq);
        }
    }
    Err(TestgenError::UnsatisfiableConstraints(format!(
        "no valid sequence in {MAX_ATTEMPTS} draws"
    )))
}

/// `random_generate` wrapped as a numbered sequence.
pub fn random_sequence(
    id: impl Into<String>,
    constraints: &[GenerationConstraint],
    lengths: RangeInclusive<usize>,
    seed: u64,
) -> Result<AbstractTestSequence, TestgenError> {
    Ok(AbstractTestSequence {
        id: id.into(),
        generator: Generator::Random,
        beliefs: None,
        actions: random_generate(constraints, lengths, seed)?,
    })
}

/// Parse a constraint file: a JSON list of `{kind, ...}` records.
pub fn parse_constraints(json: &str) -> Result<Vec<GenerationConstraint>, TestgenError> {
    serde_json::from_str(json).map_err(|e| TestgenError::UnsatisfiableConstraints(format!("bad constraint file: {e}")))
}
