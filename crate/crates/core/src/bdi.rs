//! Deterministic multi-agent interpreter.
//!
//! Scheduling is round-robin in declaration order: each round every agent
//! pops at most one event, fires the first applicable plan in source order
//! and executes its body atomically. Messages sent during a round are
//! delivered when the round ends, so they become visible the next round.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agentlang::{
    AgentProgram, BodyStep, MasConfig, Performative, Plan, Term, TriggerEvent,
};

pub const DEFAULT_STEP_BUDGET: u64 = 10_000;

pub const TRACE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BdiError {
    #[error("step budget must be positive")]
    BudgetNonPositive,
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub sender: String,
    pub performative: Performative,
    pub payload: Term,
}

#[derive(Debug, Clone)]
pub struct AgentState {
    pub program: AgentProgram,
    pub beliefs: BTreeSet<Term>,
    pub events: VecDeque<TriggerEvent>,
    /// Bodies under execution. Bodies run atomically, so this is empty
    /// between rounds.
    pub intentions: Vec<VecDeque<BodyStep>>,
    /// Every message received so far, in delivery order.
    pub mailbox: VecDeque<Message>,
}

impl AgentState {
    pub fn new(program: AgentProgram) -> Self {
        let beliefs = program.initial_beliefs.iter().cloned().collect();
        let events = program
            .initial_goals
            .iter()
            .cloned()
            .map(TriggerEvent::add_goal)
            .collect();
        Self {
            program,
            beliefs,
            events,
            intentions: Vec::new(),
            mailbox: VecDeque::new(),
        }
    }

    /// First plan (source order) whose trigger equals `event` and whose
    /// context holds against the current belief base.
    pub fn select_plan(&self, event: &TriggerEvent) -> Option<&Plan> {
        self.program
            .plans
            .iter()
            .find(|p| p.trigger == *event && p.context.holds(|t| self.beliefs.contains(t)))
    }

    fn add_belief(&mut self, t: Term) {
        if self.beliefs.insert(t.clone()) {
            self.push_event(TriggerEvent::add_belief(t));
        }
    }

    fn del_belief(&mut self, t: &Term) {
        if self.beliefs.remove(t) {
            self.push_event(TriggerEvent::del_belief(t.clone()));
        }
    }

    fn push_event(&mut self, ev: TriggerEvent) {
        self.events.push_back(ev);
    }

    fn is_idle(&self) -> bool {
        self.events.is_empty() && self.intentions.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Quiescent,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub step: u64,
    pub agent: String,
    /// `None` when no plan was applicable and the event was dropped.
    pub fired_plan: Option<usize>,
    pub trigger: TriggerEvent,
    pub actions: Vec<BodyStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MasTrace {
    pub agents: Vec<String>,
    pub entries: Vec<TraceEntry>,
    pub termination: Termination,
    pub rounds: u64,
}

impl MasTrace {
    /// Line-delimited JSON: a header line, one line per entry, a footer line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let header = serde_json::json!({
            "schema": "mas-trace",
            "version": TRACE_SCHEMA_VERSION,
            "agents": self.agents,
        });
        out.push_str(&header.to_string());
        out.push('\n');
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e).expect("trace entry serializes"));
            out.push('\n');
        }
        let footer = serde_json::json!({
            "termination": self.termination,
            "rounds": self.rounds,
        });
        out.push_str(&footer.to_string());
        out.push('\n');
        out
    }

    /// External actions emitted by `agent`, in execution order.
    pub fn external_actions<'a>(&'a self, agent: &'a str) -> impl Iterator<Item = &'a Term> + 'a {
        self.entries
            .iter()
            .filter(move |e| e.agent == agent)
            .flat_map(|e| e.actions.iter())
            .filter_map(|s| match s {
                BodyStep::ExternalAction { payload } => Some(payload),
                _ => None,
            })
    }
}

#[derive(Debug, Clone)]
pub struct MasState {
    pub agents: Vec<AgentState>,
    names: BTreeMap<String, usize>,
    pub step_counter: u64,
    pub step_budget: u64,
    /// Reserved; scheduling does not consume randomness.
    pub rng_seed: u64,
}

pub fn init_mas(mas: &MasConfig, step_budget: u64) -> Result<MasState, BdiError> {
    if step_budget == 0 {
        return Err(BdiError::BudgetNonPositive);
    }
    let mut names = BTreeMap::new();
    for (i, a) in mas.agents.iter().enumerate() {
        names.insert(a.name.clone(), i);
    }
    for (alias, target) in &mas.aliases {
        if let Some(&i) = names.get(target) {
            names.insert(alias.clone(), i);
        }
    }
    Ok(MasState {
        agents: mas.agents.iter().cloned().map(AgentState::new).collect(),
        names,
        step_counter: 0,
        step_budget,
        rng_seed: 0,
    })
}

impl MasState {
    pub fn agent(&self, name: &str) -> Option<&AgentState> {
        self.names.get(name).map(|&i| &self.agents[i])
    }

    /// Add a belief (and its `+b` event) before or between rounds.
    pub fn inject_belief(&mut self, agent: &str, t: Term) -> Result<(), BdiError> {
        let i = *self
            .names
            .get(agent)
            .ok_or_else(|| BdiError::UnknownAgent(agent.to_string()))?;
        self.agents[i].add_belief(t);
        Ok(())
    }

    /// Post an achievement goal before or between rounds.
    pub fn inject_goal(&mut self, agent: &str, t: Term) -> Result<(), BdiError> {
        let i = *self
            .names
            .get(agent)
            .ok_or_else(|| BdiError::UnknownAgent(agent.to_string()))?;
        self.agents[i].push_event(TriggerEvent::add_goal(t));
        Ok(())
    }

    pub fn is_quiescent(&self) -> bool {
        self.agents.iter().all(AgentState::is_idle)
    }

    /// One scheduling round. Returns the trace entries it produced.
    pub fn step(&mut self) -> Vec<TraceEntry> {
        self.step_counter += 1;
        let round = self.step_counter;
        let mut entries = Vec::new();
        let mut outbox: Vec<(usize, Message)> = Vec::new();

        for i in 0..self.agents.len() {
            let Some(event) = self.agents[i].events.pop_front() else {
                continue;
            };
            let agent = &mut self.agents[i];
            let Some(plan) = agent.select_plan(&event) else {
                entries.push(TraceEntry {
                    step: round,
                    agent: agent.program.name.clone(),
                    fired_plan: None,
                    trigger: event,
                    actions: Vec::new(),
                });
                continue;
            };
            let plan_id = plan.id;
            let body = plan.body.clone();
            agent.intentions.push(body.iter().cloned().collect());

            while let Some(step) = agent.intentions.last_mut().and_then(|b| b.pop_front()) {
                match step {
                    BodyStep::AchieveGoal { payload } => {
                        agent.push_event(TriggerEvent::add_goal(payload))
                    }
                    BodyStep::AddBelief { payload } => agent.add_belief(payload),
                    BodyStep::DelBelief { payload } => agent.del_belief(&payload),
                    BodyStep::Send {
                        recipient,
                        performative,
                        payload,
                    } => {
                        if let Some(&to) = self.names.get(&recipient) {
                            outbox.push((
                                to,
                                Message {
                                    sender: agent.program.name.clone(),
                                    performative,
                                    payload,
                                },
                            ));
                        }
                    }
                    BodyStep::Wait { .. } | BodyStep::ExternalAction { .. } => {}
                }
            }
            agent.intentions.pop();

            entries.push(TraceEntry {
                step: round,
                agent: agent.program.name.clone(),
                fired_plan: Some(plan_id),
                trigger: event,
                actions: body,
            });
        }

        for (to, msg) in outbox {
            let recipient = &mut self.agents[to];
            match msg.performative {
                Performative::Tell => recipient.add_belief(msg.payload.clone()),
                Performative::Achieve => {
                    recipient.push_event(TriggerEvent::add_goal(msg.payload.clone()))
                }
            }
            recipient.mailbox.push_back(msg);
        }
        entries
    }
}

/// Step until quiescent or until the budget is spent.
pub fn run(mut mas: MasState) -> (MasTrace, MasState) {
    let mut entries = Vec::new();
    while !mas.is_quiescent() && mas.step_counter < mas.step_budget {
        entries.extend(mas.step());
    }
    let termination = if mas.is_quiescent() {
        Termination::Quiescent
    } else {
        Termination::BudgetExhausted
    };
    let trace = MasTrace {
        agents: mas.agents.iter().map(|a| a.program.name.clone()).collect(),
        entries,
        termination,
        rounds: mas.step_counter,
    };
    (trace, mas)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanCoverage {
    pub fraction: f64,
    pub covered: BTreeSet<usize>,
    pub uncovered: BTreeSet<usize>,
}

/// Fraction of `program`'s plans fired at least once in `trace`.
pub fn plan_coverage(trace: &MasTrace, program: &AgentProgram) -> Result<PlanCoverage, BdiError> {
    if !trace.agents.contains(&program.name) {
        return Err(BdiError::UnknownAgent(program.name.clone()));
    }
    let covered: BTreeSet<usize> = trace
        .entries
        .iter()
        .filter(|e| e.agent == program.name)
        .filter_map(|e| e.fired_plan)
        .collect();
    Ok(coverage_from_hits(&covered, program.plans.len()))
}

pub(crate) fn coverage_from_hits(hits: &BTreeSet<usize>, total: usize) -> PlanCoverage {
    let covered: BTreeSet<usize> = hits.iter().copied().filter(|&i| i < total).collect();
    let uncovered = (0..total).filter(|i| !covered.contains(i)).collect();
    let fraction = if total == 0 {
        1.0
    } else {
        covered.len() as f64 / total as f64
    };
    PlanCoverage {
        fraction,
        covered,
        uncovered,
    }
}
