use std::fmt::Write;

use super::ast::{AgentProgram, Context};

fn context_text(ctx: &Context) -> String {
    if ctx.literals.is_empty() {
        return "true".to_string();
    }
    ctx.literals
        .iter()
        .map(|l| {
            if l.negated {
                format!("not {}", l.term)
            } else {
                l.term.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(" & ")
}

/// Render a program back to source. An empty program renders as empty text.
pub fn unparse(program: &AgentProgram) -> String {
    let mut out = String::new();
    for b in &program.initial_beliefs {
        let _ = writeln!(out, "{b}.");
    }
    for g in &program.initial_goals {
        let _ = writeln!(out, "!{g}.");
    }
    for plan in &program.plans {
        let _ = write!(out, "{} : {}", plan.trigger, context_text(&plan.context));
        if !plan.body.is_empty() {
            let steps: Vec<String> = plan.body.iter().map(|s| s.to_string()).collect();
            let _ = write!(out, " <- {}", steps.join("; "));
        }
        out.push_str(".\n");
    }
    out
}
