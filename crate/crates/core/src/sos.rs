//! Structural operational semantics of the toy WHILE language, used as an
//! independent reference for program evaluation.

use std::fmt;

use crate::error::{Error, Result};
use crate::semantics::{eval_term, holds_mut, StepBudget, Valuation};
use crate::syntax::parser::Parser;
use crate::syntax::{Formula, Program, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Skip,
    Abort,
    Assign(Var, Term),
    Seq(Box<Command>, Box<Command>),
    If(Formula, Box<Command>, Box<Command>),
    While(Formula, Box<Command>),
}

impl Command {
    pub fn seq(a: Command, b: Command) -> Command {
        Command::Seq(Box::new(a), Box::new(b))
    }

    pub fn if_(b: Formula, t: Command, e: Command) -> Command {
        Command::If(b, Box::new(t), Box::new(e))
    }

    pub fn while_(b: Formula, c: Command) -> Command {
        Command::While(b, Box::new(c))
    }

    pub fn assign(v: &str, t: Term) -> Command {
        Command::Assign(Var::new(v), t)
    }
}

fn write_cmd(f: &mut fmt::Formatter<'_>, c: &Command, nested: bool) -> fmt::Result {
    match c {
        Command::Skip => f.write_str("SKIP"),
        Command::Abort => f.write_str("ABORT"),
        Command::Assign(v, t) => write!(f, "{v}:={t}"),
        Command::Seq(a, b) => {
            if nested {
                f.write_str("(")?;
            }
            write_cmd(f, a, true)?;
            f.write_str("; ")?;
            write_cmd(f, b, false)?;
            if nested {
                f.write_str(")")?;
            }
            Ok(())
        }
        Command::If(b, t, e) => {
            write!(f, "IF {b} THEN ")?;
            write_cmd(f, t, true)?;
            f.write_str(" ELSE ")?;
            write_cmd(f, e, true)
        }
        Command::While(b, c) => {
            write!(f, "WHILE {b} DO ")?;
            write_cmd(f, c, true)
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_cmd(f, self, false)
    }
}

/// Parses a toy-language command. Boolean expressions use the formula
/// syntax and additionally accept bare assignments `v:=t` as atoms.
pub fn parse_command(src: &str) -> Result<Command> {
    let mut p = Parser::new(src)?;
    p.bare_assign = true;
    let c = command(&mut p)?;
    p.finish()?;
    Ok(c)
}

fn command(p: &mut Parser) -> Result<Command> {
    let first = simple(p)?;
    if p.eat(&crate::syntax::lexer::Tok::Semi) {
        return Ok(Command::seq(first, command(p)?));
    }
    Ok(first)
}

fn simple(p: &mut Parser) -> Result<Command> {
    use crate::syntax::lexer::Tok;
    if p.is_keyword("SKIP") {
        p.bump();
        return Ok(Command::Skip);
    }
    if p.is_keyword("ABORT") {
        p.bump();
        return Ok(Command::Abort);
    }
    if p.is_keyword("IF") {
        p.bump();
        let b = p.formula()?;
        p.expect_keyword("THEN")?;
        let t = simple(p)?;
        p.expect_keyword("ELSE")?;
        let e = simple(p)?;
        return Ok(Command::if_(b, t, e));
    }
    if p.is_keyword("WHILE") {
        p.bump();
        let b = p.formula()?;
        p.expect_keyword("DO")?;
        let c = simple(p)?;
        return Ok(Command::while_(b, c));
    }
    if p.eat(&Tok::LParen) {
        let c = command(p)?;
        p.expect(&Tok::RParen, "')'")?;
        return Ok(c);
    }
    let v = p.ident()?;
    p.expect(&Tok::ColonEq, "':='")?;
    Ok(Command::Assign(v, p.term()?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub state: Valuation,
    /// `None` once the computation has finished.
    pub rest: Option<Command>,
}

impl Configuration {
    pub fn new(c: Command, g: Valuation) -> Self {
        Configuration { state: g, rest: Some(c) }
    }
}

/// No transition applies (abnormal termination).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stuck;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SosOutcome {
    Completed(Valuation),
    Stuck,
}

/// One transition. A finished configuration is returned unchanged.
pub fn sos_step(c: &Configuration) -> std::result::Result<Configuration, Stuck> {
    match &c.rest {
        None => Ok(c.clone()),
        Some(cmd) => step(cmd, &c.state, &mut 0),
    }
}

fn step(
    cmd: &Command,
    g: &Valuation,
    loops: &mut usize,
) -> std::result::Result<Configuration, Stuck> {
    let done = |state| Ok(Configuration { state, rest: None });
    match cmd {
        Command::Skip => done(g.clone()),
        Command::Abort => Err(Stuck),
        Command::Assign(v, t) => {
            let mut h = g.clone();
            h.set(v, eval_term(t, g));
            done(h)
        }
        Command::Seq(c1, c2) => {
            let next = step(c1, g, loops)?;
            let rest = match next.rest {
                None => (**c2).clone(),
                Some(c1p) => Command::Seq(Box::new(c1p), c2.clone()),
            };
            Ok(Configuration { state: next.state, rest: Some(rest) })
        }
        Command::If(b, t, e) => {
            let mut h = g.clone();
            let branch = if holds_mut(b, &mut h) { t } else { e };
            Ok(Configuration { state: h, rest: Some((**branch).clone()) })
        }
        Command::While(b, body) => {
            *loops += 1;
            let mut h = g.clone();
            if !holds_mut(b, &mut h) {
                return done(h);
            }
            let next = step(body, &h, loops)?;
            let rest = match next.rest {
                None => cmd.clone(),
                Some(cp) => Command::Seq(Box::new(cp), Box::new(cmd.clone())),
            };
            Ok(Configuration { state: next.state, rest: Some(rest) })
        }
    }
}

/// Iterates transitions to a final state. The budget bounds the number of
/// loop-guard evaluations.
pub fn sos_run(c: &Command, g: &Valuation, limits: StepBudget) -> Result<SosOutcome> {
    let mut conf = Configuration::new(c.clone(), g.clone());
    let mut loops = 0usize;
    while let Some(cmd) = &conf.rest {
        conf = match step(cmd, &conf.state, &mut loops) {
            Ok(next) => next,
            Err(Stuck) => return Ok(SosOutcome::Stuck),
        };
        if loops > limits.max_star_unfoldings {
            return Err(Error::BudgetExceeded { limit: limits.max_star_unfoldings });
        }
    }
    Ok(SosOutcome::Completed(conf.state))
}

/// IF and WHILE become guarded union and guarded star.
pub fn command_to_program(c: &Command) -> Program {
    match c {
        Command::Skip => Program::skip(),
        Command::Abort => Program::Test(Formula::Bot),
        Command::Assign(v, t) => Program::Assign(v.clone(), t.clone()),
        Command::Seq(a, b) => Program::seq(command_to_program(a), command_to_program(b)),
        Command::If(b, t, e) => Program::union(
            Program::seq(Program::Test(b.clone()), command_to_program(t)),
            Program::seq(Program::Test(Formula::not(b.clone())), command_to_program(e)),
        ),
        Command::While(b, body) => Program::seq(
            Program::star(Program::seq(Program::Test(b.clone()), command_to_program(body))),
            Program::Test(Formula::not(b.clone())),
        ),
    }
}
