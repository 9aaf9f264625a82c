use std::fmt;

use serde::{Deserialize, Serialize};

/// A ground first-order atom: `functor` or `functor(arg, ...)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Term {
    pub functor: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub args: Vec<Term>,
}

impl Term {
    pub fn atom(functor: impl Into<String>) -> Self {
        Self {
            functor: functor.into(),
            args: Vec::new(),
        }
    }

    pub fn compound(functor: impl Into<String>, args: Vec<Term>) -> Self {
        Self {
            functor: functor.into(),
            args,
        }
    }

    pub fn is_atom(&self) -> bool {
        self.args.is_empty()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.functor)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriggerKind {
    AddGoal,
    AddBelief,
    DelBelief,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TriggerEvent {
    pub kind: TriggerKind,
    pub payload: Term,
}

impl TriggerEvent {
    pub fn add_goal(t: Term) -> Self {
        Self {
            kind: TriggerKind::AddGoal,
            payload: t,
        }
    }

    pub fn add_belief(t: Term) -> Self {
        Self {
            kind: TriggerKind::AddBelief,
            payload: t,
        }
    }

    pub fn del_belief(t: Term) -> Self {
        Self {
            kind: TriggerKind::DelBelief,
            payload: t,
        }
    }
}

impl fmt::Display for TriggerEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.kind {
            TriggerKind::AddGoal => "+!",
            TriggerKind::AddBelief => "+",
            TriggerKind::DelBelief => "-",
        };
        write!(f, "{prefix}{}", self.payload)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub term: Term,
    pub negated: bool,
}

/// Conjunction of literals. Empty means `true`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Context {
    pub literals: Vec<Literal>,
}

impl Context {
    pub fn truth() -> Self {
        Self::default()
    }

    /// Negation as failure over belief-base membership.
    pub fn holds<F: Fn(&Term) -> bool>(&self, believes: F) -> bool {
        self.literals
            .iter()
            .all(|lit| believes(&lit.term) != lit.negated)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Performative {
    Tell,
    Achieve,
}

impl Performative {
    pub fn as_str(self) -> &'static str {
        match self {
            Performative::Tell => "tell",
            Performative::Achieve => "achieve",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BodyStep {
    AchieveGoal {
        payload: Term,
    },
    AddBelief {
        payload: Term,
    },
    DelBelief {
        payload: Term,
    },
    Send {
        recipient: String,
        performative: Performative,
        payload: Term,
    },
    /// `.wait(ms)`; emitted to the trace, no effect on agent state.
    Wait {
        ms: u64,
    },
    ExternalAction {
        payload: Term,
    },
}

impl fmt::Display for BodyStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyStep::AchieveGoal { payload } => write!(f, "!{payload}"),
            BodyStep::AddBelief { payload } => write!(f, "+{payload}"),
            BodyStep::DelBelief { payload } => write!(f, "-{payload}"),
            BodyStep::Send {
                recipient,
                performative,
                payload,
            } => write!(f, ".send({recipient},{},{payload})", performative.as_str()),
            BodyStep::Wait { ms } => write!(f, ".wait({ms})"),
            BodyStep::ExternalAction { payload } => write!(f, "{payload}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub id: usize,
    pub trigger: TriggerEvent,
    pub context: Context,
    pub body: Vec<BodyStep>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentProgram {
    pub name: String,
    pub initial_beliefs: Vec<Term>,
    pub initial_goals: Vec<Term>,
    pub plans: Vec<Plan>,
}

impl AgentProgram {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Default::default()
        }
    }

    /// Every `.send` recipient named in the plan library, in source order.
    pub fn send_targets(&self) -> impl Iterator<Item = &str> {
        self.plans.iter().flat_map(|p| {
            p.body.iter().filter_map(|s| match s {
                BodyStep::Send { recipient, .. } => Some(recipient.as_str()),
                _ => None,
            })
        })
    }
}
