//! Coverage-directed abstract test generation with the agent system.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::alphabet::{validate_sequence, AbstractAction, AbstractTestSequence, Generator};
use super::beliefs::{gray, switch_index, BeliefVector, DOMAIN_SIZE};
use super::TestgenError;
use crate::agentlang::{parse_mas, AgentProgram, MasConfig, Plan};
use crate::bdi::{coverage_from_hits, init_mas, run, MasTrace, DEFAULT_STEP_BUDGET};

pub const META: &str = "meta";
pub const HUMAN: &str = "human";
pub const ROBOTCODE: &str = "robotcode";

pub const MAS_CFG: &str = include_str!("../../agents/mas.cfg");
pub const META_ASL: &str = include_str!("../../agents/meta.asl");
pub const HUMAN_ASL: &str = include_str!("../../agents/human.asl");
pub const ROBOTCODE_ASL: &str = include_str!("../../agents/robotcode.asl");

/// The bundled meta, human and robotcode agents.
pub fn default_mas() -> MasConfig {
    parse_mas(MAS_CFG, |path| match path {
        "meta.asl" => Ok(META_ASL.to_string()),
        "human.asl" => Ok(HUMAN_ASL.to_string()),
        "robotcode.asl" => Ok(ROBOTCODE_ASL.to_string()),
        other => Err(format!("no bundled program `{other}`")),
    })
    .expect("bundled agent programs parse")
}

fn require_agents(mas: &MasConfig) -> Result<(), TestgenError> {
    for name in [META, HUMAN, ROBOTCODE] {
        if mas.agent(name).is_none() {
            return Err(TestgenError::MissingAgent(name.to_string()));
        }
    }
    Ok(())
}

/// Switch literals in a plan context as `(mask, value)` over the vector
/// bits, and whether the context holds nothing but switch literals.
pub fn plan_guard(plan: &Plan) -> ((u16, u16), bool) {
    let mut mask = 0u16;
    let mut value = 0u16;
    let mut only_switches = true;
    for lit in &plan.context.literals {
        match switch_index(&lit.term.functor).filter(|_| lit.term.args.is_empty()) {
            Some(i) => {
                mask |= 1 << i;
                if !lit.negated {
                    value |= 1 << i;
                }
            }
            None => only_switches = false,
        }
    }
    ((mask, value), only_switches)
}

/// Vectors under which a plan can be the one selected for its trigger: its
/// own switch literals hold and no earlier plan for the same trigger, whose
/// context is decided by switches alone, applies instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanGuard {
    pub own: (u16, u16),
    pub shadowed_by: Vec<(u16, u16)>,
}

impl PlanGuard {
    pub fn admits(&self, v: BeliefVector) -> bool {
        let sat = |(m, val): (u16, u16)| v.0 & m == val;
        sat(self.own) && !self.shadowed_by.iter().any(|g| sat(*g))
    }
}

pub fn plan_guards(program: &AgentProgram) -> Vec<PlanGuard> {
    let raw: Vec<_> = program.plans.iter().map(plan_guard).collect();
    program
        .plans
        .iter()
        .enumerate()
        .map(|(k, plan)| PlanGuard {
            own: raw[k].0,
            shadowed_by: (0..k)
                .filter(|&j| program.plans[j].trigger == plan.trigger && raw[j].1)
                .map(|j| raw[j].0)
                .collect(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "vectors")]
pub enum SelectionStrategy {
    /// Prefer an untried vector whose switches satisfy the context of at
    /// least one human plan not yet fired; otherwise the next in Gray order.
    GreedyNovelty,
    /// Reflected Gray-code enumeration of the domain.
    GrayCode,
    /// A caller-supplied list, taken in order.
    Fixed(Vec<BeliefVector>),
}

/// Feedback carried across generation iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageState {
    tried: Vec<bool>,
    /// Vectors whose dry run fired nothing new. Coverage only grows, so
    /// they stay that way.
    stale: Vec<bool>,
    pub tried_count: usize,
    pub human_hits: BTreeSet<usize>,
    pub robot_hits: BTreeSet<usize>,
    pub human_plans: usize,
    pub robot_plans: usize,
}

impl CoverageState {
    pub fn new(mas: &MasConfig) -> Self {
        let n = |a: &str| mas.agent(a).map(|p| p.plans.len()).unwrap_or(0);
        Self {
            tried: vec![false; DOMAIN_SIZE as usize],
            stale: vec![false; DOMAIN_SIZE as usize],
            tried_count: 0,
            human_hits: BTreeSet::new(),
            robot_hits: BTreeSet::new(),
            human_plans: n(HUMAN),
            robot_plans: n(ROBOTCODE),
        }
    }

    pub fn is_tried(&self, v: BeliefVector) -> bool {
        self.tried[v.0 as usize]
    }

    pub fn mark_tried(&mut self, v: BeliefVector) {
        if !std::mem::replace(&mut self.tried[v.0 as usize], true) {
            self.tried_count += 1;
        }
    }

    pub fn human_coverage(&self) -> f64 {
        coverage_from_hits(&self.human_hits, self.human_plans).fraction
    }

    pub fn robot_coverage(&self) -> f64 {
        coverage_from_hits(&self.robot_hits, self.robot_plans).fraction
    }

    pub fn is_total(&self) -> bool {
        self.human_coverage() >= 1.0 && self.robot_coverage() >= 1.0
    }

    /// Whether `trace` fires a human or robotcode plan not yet covered.
    pub fn is_novel(&self, trace: &MasTrace) -> bool {
        trace.entries.iter().any(|e| match (e.agent.as_str(), e.fired_plan) {
            (HUMAN, Some(p)) => !self.human_hits.contains(&p),
            (ROBOTCODE, Some(p)) => !self.robot_hits.contains(&p),
            _ => false,
        })
    }

    pub fn record(&mut self, trace: &MasTrace) {
        for e in &trace.entries {
            let Some(p) = e.fired_plan else { continue };
            match e.agent.as_str() {
                HUMAN => self.human_hits.insert(p),
                ROBOTCODE => self.robot_hits.insert(p),
                _ => false,
            };
        }
    }
}

/// Guard-admitted candidates dry-run before falling back to the first one.
pub const NOVELTY_LOOKAHEAD: usize = 256;

/// Pick the next untried vector. Deterministic in `(strategy, cov)`.
///
/// Greedy novelty takes untried vectors in Gray order that the switch guard
/// of some unfired human plan admits, and returns the first whose dry run
/// fires a plan not yet covered (human or robotcode). Guards only see one
/// plan's context, so the dry run weeds out vectors whose session ends
/// before the plan's trigger is ever posted.
pub fn choose_vector(
    strategy: &SelectionStrategy,
    cov: &mut CoverageState,
    mas: &MasConfig,
) -> Result<BeliefVector, TestgenError> {
    let gray_order = || (0..DOMAIN_SIZE).map(|i| BeliefVector(gray(i) as u16));
    let untried = |v: &BeliefVector| !cov.is_tried(*v);
    let chosen = match strategy {
        SelectionStrategy::GrayCode => gray_order().find(untried),
        SelectionStrategy::Fixed(list) => list.iter().copied().find(untried),
        SelectionStrategy::GreedyNovelty => {
            let human = mas.agent(HUMAN).ok_or_else(|| TestgenError::MissingAgent(HUMAN.into()))?;
            let open: Vec<PlanGuard> = plan_guards(human)
                .into_iter()
                .enumerate()
                .filter(|(i, _)| !cov.human_hits.contains(i))
                .map(|(_, g)| g)
                .collect();
            let admitted: Vec<BeliefVector> = gray_order()
                .filter(|v| untried(v) && !cov.stale[v.0 as usize])
                .filter(|v| open.iter().any(|g| g.admits(*v)))
                .take(NOVELTY_LOOKAHEAD)
                .collect();
            let mut novel = None;
            for &v in &admitted {
                let (_, trace) = run_vector(mas, v, DEFAULT_STEP_BUDGET)?;
                if cov.is_novel(&trace) {
                    novel = Some(v);
                    break;
                }
                cov.stale[v.0 as usize] = true;
            }
            novel
                .or(admitted.first().copied())
                .or_else(|| gray_order().find(|v| !cov.is_tried(*v)))
        }
    };
    chosen.ok_or(TestgenError::NoUntriedVector)
}

/// Run the agents once with `v` loaded into the meta agent.
pub fn run_vector(mas: &MasConfig, v: BeliefVector, step_budget: u64) -> Result<(Vec<AbstractAction>, MasTrace), TestgenError> {
    let mut state = init_mas(mas, step_budget)?;
    for b in v.beliefs() {
        state.inject_belief(META, b)?;
    }
    let (trace, _) = run(state);
    let actions = human_actions(&trace)?;
    Ok((actions, trace))
}

/// The human agent's external actions as an abstract sequence.
pub fn human_actions(trace: &MasTrace) -> Result<Vec<AbstractAction>, TestgenError> {
    let mut round = 1;
    let mut out = Vec::new();
    for t in trace.external_actions(HUMAN) {
        let a = AbstractAction::from_term(t, round)?;
        round = a.round;
        out.push(a);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BdiGenOptions {
    /// Upper bound on vectors tried in this call.
    pub max_vectors: usize,
    /// Stop once both human and robotcode plan coverage are total.
    pub stop_on_total: bool,
    pub step_budget: u64,
    /// Number given to the first sequence; ids are `bdi-NNNN`.
    pub first_id: usize,
}

impl Default for BdiGenOptions {
    fn default() -> Self {
        Self {
            max_vectors: 130,
            stop_on_total: true,
            step_budget: DEFAULT_STEP_BUDGET,
            first_id: 1,
        }
    }
}

/// Choose a vector, run the agents, keep the human's actions, update plan
/// coverage; repeat until coverage is total or the vector budget runs out.
pub fn bdi_generate(
    mas: &MasConfig,
    strategy: &SelectionStrategy,
    cov: &mut CoverageState,
    opts: &BdiGenOptions,
) -> Result<Vec<AbstractTestSequence>, TestgenError> {
    require_agents(mas)?;
    let mut out = Vec::new();
    while out.len() < opts.max_vectors && !(opts.stop_on_total && cov.is_total()) {
        let v = match choose_vector(strategy, cov, mas) {
            Ok(v) => v,
            Err(TestgenError::NoUntriedVector) if !out.is_empty() => break,
            Err(e) => return Err(e),
        };
        cov.mark_tried(v);
        let (actions, trace) = run_vector(mas, v, opts.step_budget)?;
        validate_sequence(&actions)?;
        cov.record(&trace);
        out.push(AbstractTestSequence {
            id: format!("bdi-{:04}", opts.first_id + out.len()),
            generator: Generator::Bdi,
            beliefs: Some(v),
            actions,
        });
    }
    Ok(out)
}
