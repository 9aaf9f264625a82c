//! Multi-agent configuration files.
//!
//! ```text
//! # comment
//! agent meta meta.asl
//! agent human human.asl
//! agent robotcode robotcode.asl
//! alias robot_code robotcode
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use super::ast::AgentProgram;
use super::{parse_agent, AgentLangError, SyntaxError};

/// Parsed and wired agents. Agent order is declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MasConfig {
    pub agents: Vec<AgentProgram>,
    pub aliases: BTreeMap<String, String>,
}

impl MasConfig {
    /// Build from already-parsed programs, validating names and send targets.
    pub fn new(
        agents: Vec<AgentProgram>,
        aliases: BTreeMap<String, String>,
    ) -> Result<Self, AgentLangError> {
        let mut seen = std::collections::BTreeSet::new();
        for a in &agents {
            if !seen.insert(a.name.clone()) {
                return Err(AgentLangError::DuplicateAgentName(a.name.clone()));
            }
        }
        for (alias, target) in &aliases {
            if seen.contains(alias) {
                return Err(AgentLangError::DuplicateAgentName(alias.clone()));
            }
            if !seen.contains(target) {
                return Err(AgentLangError::UnknownAliasTarget {
                    alias: alias.clone(),
                    target: target.clone(),
                });
            }
        }
        let mas = Self { agents, aliases };
        for a in &mas.agents {
            for r in a.send_targets() {
                if mas.resolve(r).is_none() {
                    return Err(AgentLangError::UnknownRecipient {
                        agent: a.name.clone(),
                        recipient: r.to_string(),
                    });
                }
            }
        }
        Ok(mas)
    }

    /// Index of the agent a name (or alias) refers to.
    pub fn resolve(&self, name: &str) -> Option<usize> {
        let canonical = self.aliases.get(name).map(String::as_str).unwrap_or(name);
        self.agents.iter().position(|a| a.name == canonical)
    }

    pub fn agent(&self, name: &str) -> Option<&AgentProgram> {
        self.resolve(name).map(|i| &self.agents[i])
    }

    pub fn agent_mut(&mut self, name: &str) -> Option<&mut AgentProgram> {
        self.resolve(name).map(move |i| &mut self.agents[i])
    }
}

/// Parse a configuration, loading each agent source through `load`.
pub fn parse_mas<F>(config: &str, mut load: F) -> Result<MasConfig, AgentLangError>
where
    F: FnMut(&str) -> Result<String, String>,
{
    let mut agents = Vec::new();
    let mut aliases = BTreeMap::new();
    for (n, raw) in config.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let bad = |expected: &str| AgentLangError::Syntax {
            source_name: "mas config".into(),
            error: SyntaxError::new(n + 1, 1, expected, line),
        };
        match words.as_slice() {
            ["agent", name, path] => {
                if !is_ident(name) {
                    return Err(bad("lowercase agent name"));
                }
                let src = load(path).map_err(|message| AgentLangError::Load {
                    path: path.to_string(),
                    message,
                })?;
                let prog = parse_agent(name, &src).map_err(|error| AgentLangError::Syntax {
                    source_name: path.to_string(),
                    error,
                })?;
                agents.push(prog);
            }
            ["alias", alias, target] => {
                if !is_ident(alias) || !is_ident(target) {
                    return Err(bad("lowercase alias and target names"));
                }
                if aliases
                    .insert(alias.to_string(), target.to_string())
                    .is_some()
                {
                    return Err(AgentLangError::DuplicateAgentName(alias.to_string()));
                }
            }
            _ => return Err(bad("`agent <name> <path>` or `alias <name> <agent>`")),
        }
    }
    MasConfig::new(agents, aliases)
}

/// Parse a configuration file; agent paths are relative to its directory.
pub fn parse_mas_file(path: &Path) -> Result<MasConfig, AgentLangError> {
    let text = std::fs::read_to_string(path).map_err(|e| AgentLangError::Load {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_mas(&text, |p| {
        std::fs::read_to_string(base.join(p)).map_err(|e| e.to_string())
    })
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
