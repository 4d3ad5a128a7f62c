use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

/// Variable name. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Var {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Num(u64),
    Var(Var),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    /// Truncated subtraction.
    Monus(Box<Term>, Box<Term>),
}

impl Term {
    pub fn num(n: u64) -> Term {
        Term::Num(n)
    }

    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn add(l: Term, r: Term) -> Term {
        Term::Add(Box::new(l), Box::new(r))
    }

    pub fn mul(l: Term, r: Term) -> Term {
        Term::Mul(Box::new(l), Box::new(r))
    }

    pub fn monus(l: Term, r: Term) -> Term {
        Term::Monus(Box::new(l), Box::new(r))
    }

    pub fn vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Num(_) => {}
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone())
                }
            }
            Term::Add(l, r) | Term::Mul(l, r) | Term::Monus(l, r) => {
                l.vars(out);
                r.vars(out);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    /// Abbreviation of `!T`; kept as its own node.
    Bot,
    Eq(Term, Term),
    Le(Term, Term),
    Not(Box<Formula>),
    /// Left-sequential conjunction.
    And(Box<Formula>, Box<Formula>),
    /// Left-sequential disjunction.
    Or(Box<Formula>, Box<Formula>),
    /// `[v:=t]T`, always true, updates `v`.
    Assign(Var, Term),
    /// `then <| cond |> else_`
    Cond(Box<Formula>, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn eq(l: Term, r: Term) -> Formula {
        Formula::Eq(l, r)
    }

    pub fn le(l: Term, r: Term) -> Formula {
        Formula::Le(l, r)
    }

    pub fn assign(v: &str, t: Term) -> Formula {
        Formula::Assign(Var::new(v), t)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn cond(then: Formula, cond: Formula, else_: Formula) -> Formula {
        Formula::Cond(Box::new(then), Box::new(cond), Box::new(else_))
    }

    pub fn as_primitive(&self) -> Option<Primitive> {
        match self {
            Formula::Top => Some(Primitive::Top),
            Formula::Eq(l, r) => Some(Primitive::Eq(l.clone(), r.clone())),
            Formula::Le(l, r) => Some(Primitive::Le(l.clone(), r.clone())),
            Formula::Assign(v, t) => Some(Primitive::Assign(v.clone(), t.clone())),
            _ => None,
        }
    }

    pub fn is_primitive(&self) -> bool {
        matches!(
            self,
            Formula::Top | Formula::Eq(..) | Formula::Le(..) | Formula::Assign(..)
        )
    }

    /// A primitive formula under zero or more negations, or `F`.
    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Not(f) => f.is_literal(),
            Formula::Bot => true,
            f => f.is_primitive(),
        }
    }

    pub fn has_cond(&self) -> bool {
        match self {
            Formula::Cond(..) => true,
            Formula::Not(f) => f.has_cond(),
            Formula::And(l, r) | Formula::Or(l, r) => l.has_cond() || r.has_cond(),
            _ => false,
        }
    }

    pub fn vars(&self, out: &mut Vec<Var>) {
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::Eq(l, r) | Formula::Le(l, r) => {
                l.vars(out);
                r.vars(out);
            }
            Formula::Assign(v, t) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
                t.vars(out);
            }
            Formula::Not(f) => f.vars(out),
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.vars(out);
                r.vars(out);
            }
            Formula::Cond(a, b, c) => {
                a.vars(out);
                b.vars(out);
                c.vars(out);
            }
        }
    }

    pub fn at(&self, path: &FormulaPath) -> Option<&Formula> {
        let mut cur = self;
        for step in &path.0 {
            cur = match (step, cur) {
                (Step::NotArg, Formula::Not(f)) => f,
                (Step::AndL, Formula::And(l, _)) => l,
                (Step::AndR, Formula::And(_, r)) => r,
                (Step::OrL, Formula::Or(l, _)) => l,
                (Step::OrR, Formula::Or(_, r)) => r,
                (Step::CondThen, Formula::Cond(t, _, _)) => t,
                (Step::CondIf, Formula::Cond(_, c, _)) => c,
                (Step::CondElse, Formula::Cond(_, _, e)) => e,
                _ => return None,
            };
        }
        Some(cur)
    }
}

/// Formulas without connectives: `T`, `t=t`, `t<=t`, `[v:=t]T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Primitive {
    Top,
    Eq(Term, Term),
    Le(Term, Term),
    Assign(Var, Term),
}

impl Primitive {
    pub fn to_formula(&self) -> Formula {
        match self {
            Primitive::Top => Formula::Top,
            Primitive::Eq(l, r) => Formula::Eq(l.clone(), r.clone()),
            Primitive::Le(l, r) => Formula::Le(l.clone(), r.clone()),
            Primitive::Assign(v, t) => Formula::Assign(v.clone(), t.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Program {
    Assign(Var, Term),
    Test(Formula),
    /// Termination instruction `!`, written `halt`.
    Halt,
    /// Instruction-formula: evaluated for its effect, always succeeds.
    Instr(Primitive),
    /// Write command `w[...]`: inert, always succeeds.
    Write(String),
    Seq(Box<Program>, Box<Program>),
    Union(Box<Program>, Box<Program>),
    Star(Box<Program>),
}

impl Program {
    pub fn assign(v: &str, t: Term) -> Program {
        Program::Assign(Var::new(v), t)
    }

    pub fn test(f: Formula) -> Program {
        Program::Test(f)
    }

    pub fn skip() -> Program {
        Program::Test(Formula::Top)
    }

    pub fn seq(l: Program, r: Program) -> Program {
        Program::Seq(Box::new(l), Box::new(r))
    }

    pub fn union(l: Program, r: Program) -> Program {
        Program::Union(Box::new(l), Box::new(r))
    }

    pub fn star(p: Program) -> Program {
        Program::Star(Box::new(p))
    }

    /// Right-nested concatenation; `?T` when empty.
    pub fn seq_all(items: Vec<Program>) -> Program {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Program::skip(),
            Some(last) => it.fold(last, |acc, p| Program::seq(p, acc)),
        }
    }

    /// Flattens nested concatenation, left to right.
    pub fn flatten_seq(&self) -> Vec<&Program> {
        fn go<'a>(p: &'a Program, out: &mut Vec<&'a Program>) {
            match p {
                Program::Seq(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                p => out.push(p),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn is_single(&self) -> bool {
        !matches!(self, Program::Seq(..) | Program::Union(..) | Program::Star(..))
    }

    pub fn vars(&self, out: &mut Vec<Var>) {
        match self {
            Program::Assign(v, t) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
                t.vars(out);
            }
            Program::Test(f) => f.vars(out),
            Program::Instr(p) => p.to_formula().vars(out),
            Program::Halt | Program::Write(_) => {}
            Program::Seq(l, r) | Program::Union(l, r) => {
                l.vars(out);
                r.vars(out);
            }
            Program::Star(b) => b.vars(out),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    NotArg,
    AndL,
    AndR,
    OrL,
    OrR,
    CondThen,
    CondIf,
    CondElse,
}

impl Step {
    pub fn name(self) -> &'static str {
        match self {
            Step::NotArg => "not",
            Step::AndL => "andl",
            Step::AndR => "andr",
            Step::OrL => "orl",
            Step::OrR => "orr",
            Step::CondThen => "then",
            Step::CondIf => "if",
            Step::CondElse => "else",
        }
    }

    pub fn from_name(s: &str) -> Option<Step> {
        Some(match s {
            "not" => Step::NotArg,
            "andl" => Step::AndL,
            "andr" => Step::AndR,
            "orl" => Step::OrL,
            "orr" => Step::OrR,
            "then" => Step::CondThen,
            "if" => Step::CondIf,
            "else" => Step::CondElse,
            _ => return None,
        })
    }
}

/// Position of a subformula, as steps from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FormulaPath(pub Vec<Step>);

impl FormulaPath {
    pub fn root() -> Self {
        FormulaPath(Vec::new())
    }

    pub fn new(steps: &[Step]) -> Self {
        FormulaPath(steps.to_vec())
    }

    pub fn child(&self, s: Step) -> Self {
        let mut v = self.0.clone();
        v.push(s);
        FormulaPath(v)
    }

    /// Parses `andl.not`-style paths; the empty string is the root.
    pub fn parse(s: &str) -> Result<Self, String> {
        if s.trim().is_empty() {
            return Ok(FormulaPath::root());
        }
        s.split('.')
            .map(|p| Step::from_name(p.trim()).ok_or_else(|| format!("unknown path step {p:?}")))
            .collect::<Result<Vec<_>, _>>()
            .map(FormulaPath)
    }
}

impl fmt::Display for FormulaPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0.iter().map(|s| s.name()).collect();
        f.write_str(&parts.join("."))
    }
}

impl Serialize for FormulaPath {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
