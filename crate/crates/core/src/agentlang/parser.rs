//! Recursive-descent parser for the agent language subset.
//!
//! The grammar is frozen in `docs/grammar.ebnf`. Anything outside it is a
//! hard error, including annotations, test goals, rules and unknown internal
//! actions.

use std::fmt;

use super::ast::*;
use super::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(u64),
    /// `.name` internal action.
    Internal(String),
    Dot,
    Comma,
    LParen,
    RParen,
    Colon,
    Arrow,
    Bang,
    Plus,
    Minus,
    Amp,
    Semi,
    Other(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Var(s) => write!(f, "variable `{s}`"),
            Tok::Int(n) => write!(f, "integer `{n}`"),
            Tok::Internal(s) => write!(f, "internal action `.{s}`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Arrow => f.write_str("`<-`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Other(c) => write!(f, "`{c}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let (l0, c0) = (line, col);
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(SyntaxError::new(l0, c0, "`*/` closing this comment", "end of input"));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }

        let (l0, c0) = (line, col);
        let word = |start: usize| {
            let mut j = start;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            j
        };

        let tok = if c.is_ascii_lowercase() {
            let end = word(i);
            let s: String = chars[i..end].iter().collect();
            while i < end {
                bump!();
            }
            Tok::Ident(s)
        } else if c.is_ascii_uppercase() || c == '_' {
            let end = word(i);
            let s: String = chars[i..end].iter().collect();
            while i < end {
                bump!();
            }
            Tok::Var(s)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            let n = s
                .parse::<u64>()
                .map_err(|_| SyntaxError::new(l0, c0, "integer fitting in 64 bits", &s))?;
            while i < j {
                bump!();
            }
            Tok::Int(n)
        } else if c == '.' && chars.get(i + 1).is_some_and(|n| n.is_ascii_lowercase()) {
            bump!();
            let end = word(i);
            let s: String = chars[i..end].iter().collect();
            while i < end {
                bump!();
            }
            Tok::Internal(s)
        } else if c == '<' && chars.get(i + 1) == Some(&'-') {
            bump!();
            bump!();
            Tok::Arrow
        } else {
            bump!();
            match c {
                '.' => Tok::Dot,
                ',' => Tok::Comma,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ':' => Tok::Colon,
                '!' => Tok::Bang,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '&' => Tok::Amp,
                ';' => Tok::Semi,
                other => Tok::Other(other),
            }
        };
        out.push(Spanned { tok, line: l0, col: c0 });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

const RESERVED: &[&str] = &["true", "not", "tell", "achieve"];

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &str) -> SyntaxError {
        let t = self.peek();
        SyntaxError::new(t.line, t.col, expected, &t.tok.to_string())
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), SyntaxError> {
        if self.peek().tok == tok {
            self.next();
            Ok(())
        } else {
            Err(self.err(expected))
        }
    }

    fn ident(&mut self, expected: &str) -> Result<String, SyntaxError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            Tok::Var(_) => Err(self.err("ground identifier (variables are not supported)")),
            _ => Err(self.err(expected)),
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let here = self.peek().clone();
        let functor = self.ident("term")?;
        if RESERVED.contains(&functor.as_str()) {
            return Err(SyntaxError::new(
                here.line,
                here.col,
                "term (reserved word not allowed here)",
                &functor,
            ));
        }
        let mut args = Vec::new();
        if self.peek().tok == Tok::LParen {
            self.next();
            args.push(self.arg()?);
            while self.peek().tok == Tok::Comma {
                self.next();
                args.push(self.arg()?);
            }
            self.expect(Tok::RParen, "`,` or `)`")?;
        }
        Ok(Term { functor, args })
    }

    /// Arguments may also be non-negative integers, kept as atoms.
    fn arg(&mut self) -> Result<Term, SyntaxError> {
        if let Tok::Int(n) = self.peek().tok {
            self.next();
            return Ok(Term::atom(n.to_string()));
        }
        self.term()
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn context(&mut self) -> Result<Context, SyntaxError> {
        if self.is_keyword("true") {
            self.next();
            return Ok(Context::truth());
        }
        let mut literals = vec![self.literal()?];
        while self.peek().tok == Tok::Amp {
            self.next();
            literals.push(self.literal()?);
        }
        Ok(Context { literals })
    }

    fn literal(&mut self) -> Result<Literal, SyntaxError> {
        let negated = if self.is_keyword("not") {
            self.next();
            true
        } else {
            false
        };
        Ok(Literal {
            term: self.term()?,
            negated,
        })
    }

    fn step(&mut self) -> Result<BodyStep, SyntaxError> {
        match self.peek().tok.clone() {
            Tok::Bang => {
                self.next();
                Ok(BodyStep::AchieveGoal {
                    payload: self.term()?,
                })
            }
            Tok::Plus => {
                self.next();
                Ok(BodyStep::AddBelief {
                    payload: self.term()?,
                })
            }
            Tok::Minus => {
                self.next();
                Ok(BodyStep::DelBelief {
                    payload: self.term()?,
                })
            }
            Tok::Internal(name) => match name.as_str() {
                "send" => {
                    self.next();
                    self.expect(Tok::LParen, "`(`")?;
                    let recipient = self.ident("recipient agent name")?;
                    self.expect(Tok::Comma, "`,`")?;
                    let performative = match &self.peek().tok {
                        Tok::Ident(s) if s == "tell" => Performative::Tell,
                        Tok::Ident(s) if s == "achieve" => Performative::Achieve,
                        _ => return Err(self.err("performative `tell` or `achieve`")),
                    };
                    self.next();
                    self.expect(Tok::Comma, "`,`")?;
                    let payload = self.term()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(BodyStep::Send {
                        recipient,
                        performative,
                        payload,
                    })
                }
                "wait" => {
                    self.next();
                    self.expect(Tok::LParen, "`(`")?;
                    let ms = match self.peek().tok {
                        Tok::Int(n) => n,
                        _ => return Err(self.err("duration in milliseconds")),
                    };
                    self.next();
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(BodyStep::Wait { ms })
                }
                _ => Err(self.err("`.send` or `.wait` (unknown internal action)")),
            },
            Tok::Ident(_) => Ok(BodyStep::ExternalAction {
                payload: self.term()?,
            }),
            _ => Err(self.err("plan body step")),
        }
    }

    fn plan(&mut self, id: usize) -> Result<Plan, SyntaxError> {
        let open = self.peek().clone();
        let kind = match (self.peek_at(0), self.peek_at(1)) {
            (Tok::Plus, Tok::Bang) => {
                self.next();
                self.next();
                TriggerKind::AddGoal
            }
            (Tok::Plus, _) => {
                self.next();
                TriggerKind::AddBelief
            }
            (Tok::Minus, Tok::Bang) => {
                return Err(self.err("trigger (goal deletion `-!` is not supported)"));
            }
            (Tok::Minus, _) => {
                self.next();
                TriggerKind::DelBelief
            }
            _ => return Err(self.err("plan trigger")),
        };
        let payload = self.term()?;
        let context = if self.peek().tok == Tok::Colon {
            self.next();
            self.context()?
        } else {
            Context::truth()
        };
        let mut body = Vec::new();
        if self.peek().tok == Tok::Arrow {
            self.next();
            if self.is_keyword("true") {
                self.next();
            } else {
                body.push(self.step()?);
                while self.peek().tok == Tok::Semi {
                    self.next();
                    body.push(self.step()?);
                }
            }
        }
        if self.peek().tok != Tok::Dot {
            let found = self.peek().tok.to_string();
            return Err(SyntaxError::new(
                open.line,
                open.col,
                "`;` or `.` terminating the plan opened here",
                &found,
            ));
        }
        self.next();
        Ok(Plan {
            id,
            trigger: TriggerEvent { kind, payload },
            context,
            body,
        })
    }

    fn program(&mut self, name: &str) -> Result<AgentProgram, SyntaxError> {
        let mut prog = AgentProgram::new(name);
        loop {
            match self.peek().tok {
                Tok::Eof => break,
                Tok::Bang => {
                    self.next();
                    let goal = self.term()?;
                    self.expect(Tok::Dot, "`.` after initial goal")?;
                    prog.initial_goals.push(goal);
                }
                Tok::Plus | Tok::Minus => {
                    let id = prog.plans.len();
                    prog.plans.push(self.plan(id)?);
                }
                Tok::Ident(_) => {
                    let belief = self.term()?;
                    if self.peek().tok == Tok::Other(':') || self.peek().tok == Tok::Colon {
                        return Err(self.err("`.` after initial belief (rules are not supported)"));
                    }
                    self.expect(Tok::Dot, "`.` after initial belief")?;
                    prog.initial_beliefs.push(belief);
                }
                _ => return Err(self.err("initial belief, initial goal or plan")),
            }
        }
        Ok(prog)
    }
}

/// Parse one agent's source text.
pub fn parse_agent(name: &str, source: &str) -> Result<AgentProgram, SyntaxError> {
    let toks = lex(source)?;
    Parser { toks, pos: 0 }.program(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HUMAN: &str = "//Agent human\n/* Initial beliefs and rules */\n/* Initial goals */\n!activate.\n/* Plans */\n+!activate : leg2 <- .send(robot_code,tell,leg).\n";
    const ROBOT: &str = "//Agent robotcode\n!waiting.\n+!waiting : not leg <- !waiting.\n+!waiting : leg <- !grabLeg.\n";

    #[test]
    fn human_snippet() {
        let p = parse_agent("human", HUMAN).unwrap();
        assert!(p.initial_beliefs.is_empty());
        assert_eq!(p.initial_goals, vec![Term::atom("activate")]);
        assert_eq!(p.plans.len(), 1);
        let plan = &p.plans[0];
        assert_eq!(plan.trigger, TriggerEvent::add_goal(Term::atom("activate")));
        assert_eq!(
            plan.context.literals,
            vec![Literal {
                term: Term::atom("leg2"),
                negated: false
            }]
        );
        assert_eq!(
            plan.body,
            vec![BodyStep::Send {
                recipient: "robot_code".into(),
                performative: Performative::Tell,
                payload: Term::atom("leg"),
            }]
        );
    }

    #[test]
    fn robotcode_snippet() {
        let p = parse_agent("robotcode", ROBOT).unwrap();
        assert_eq!(p.plans.len(), 2);
        assert!(p.plans[0].context.literals[0].negated);
        assert_eq!(p.plans[0].context.literals[0].term, Term::atom("leg"));
        assert!(!p.plans[1].context.literals[0].negated);
        assert_eq!(
            p.plans[1].body,
            vec![BodyStep::AchieveGoal {
                payload: Term::atom("grabLeg")
            }]
        );
        assert_eq!(p.plans.iter().map(|p| p.id).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn empty_source() {
        let p = parse_agent("x", "").unwrap();
        assert_eq!(p, AgentProgram::new("x"));
        let p = parse_agent("x", "// nothing\n/* here */").unwrap();
        assert!(p.plans.is_empty());
    }

    #[test]
    fn meta_snippet_with_true_context() {
        let p = parse_agent("meta", "+!control : true <- .send(human,tell,leg2).").unwrap();
        assert!(p.plans[0].context.literals.is_empty());
    }

    #[test]
    fn empty_bodies() {
        let p = parse_agent("a", "+!x.\n+!y : b <- true.\n+z : c.").unwrap();
        assert!(p.plans.iter().all(|p| p.body.is_empty()));
        assert_eq!(p.plans[2].trigger.kind, TriggerKind::AddBelief);
    }

    #[test]
    fn compound_terms_and_steps() {
        let p = parse_agent(
            "h",
            "b(x, y(z)).\n+!g : a & not b(x,y(z)) <- move_hand(close,slow); +c; -d; .wait(250); .send(r, achieve, go).",
        )
        .unwrap();
        assert_eq!(p.initial_beliefs[0].to_string(), "b(x,y(z))");
        assert_eq!(p.plans[0].body.len(), 5);
        assert_eq!(p.plans[0].body[3], BodyStep::Wait { ms: 250 });
    }

    #[test]
    fn unterminated_plan_reports_trigger_line() {
        let src = "!a.\n\n+!a : true <- b;\n c\n+!d <- e.";
        let err = parse_agent("x", src).unwrap_err();
        assert_eq!(err.line, 3);
        assert_eq!(err.column, 1);
        let err = parse_agent("x", "+!a <- b").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.found.contains("end of input"));
    }

    #[test]
    fn rejects_unknown_directives() {
        assert!(parse_agent("x", "+!a <- .print(hi).").is_err());
        assert!(parse_agent("x", "{ include(\"a.asl\") }").is_err());
        assert!(parse_agent("x", "+!a <- ?b.").is_err());
        assert!(parse_agent("x", "-!a <- b.").is_err());
        assert!(parse_agent("x", "+!a(X) <- b.").is_err());
        assert!(parse_agent("x", "+!a <- b\n").is_err());
        assert!(parse_agent("x", "/* open").is_err());
    }

    #[test]
    fn error_carries_position() {
        let err = parse_agent("x", "a.\n  +!b : <- c.").unwrap_err();
        assert_eq!((err.line, err.column), (2, 9));
        assert!(err.expected.contains("term"));
    }
}

#[cfg(test)]
mod int_arg_tests {
    use super::*;

    #[test]
    fn integer_arguments() {
        let p = parse_agent("h", "+!round_1 <- request_leg(1); move_hand(close, slow, 1).").unwrap();
        assert_eq!(p.plans[0].body[0].to_string(), "request_leg(1)");
        assert!(parse_agent("h", "7.").is_err());
    }
}
