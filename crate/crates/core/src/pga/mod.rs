//! Instruction sequences with units and complex tests: canonical forms,
//! behavior extraction, projection of complex tests and translation into
//! dynamic-logic programs.

mod behavior;
mod canon;
mod project;
mod translate;

use std::fmt;

use serde::Serialize;

pub use behavior::{behavior_extract, bisimilar, BehaviorGraph, BehaviorNode};
pub use canon::{first_canonical, second_canonical};
pub use project::{project, project_program};
pub use translate::{prune_dead_branches, sufficiently_similar, translate_ft, SimilarityReport};

use crate::error::Result;
use crate::syntax::lexer::Tok;
use crate::syntax::parser::Parser;
use crate::syntax::{is_reserved, Primitive, Term, Var};

/// A basic instruction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PgaAtom {
    /// An uninterpreted action such as `a`.
    Named(String),
    /// A primitive formula used as an instruction; its reply is its truth.
    Formula(Primitive),
    Assign(Var, Term),
    /// `w[...]`: always replies true.
    Write(String),
}

impl fmt::Display for PgaAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PgaAtom::Named(s) => f.write_str(s),
            PgaAtom::Formula(p) => write!(f, "{p}"),
            PgaAtom::Assign(v, t) => write!(f, "{v}:={t}"),
            PgaAtom::Write(s) => write!(f, "w[{s}]"),
        }
    }
}

impl PgaAtom {
    fn bare(&self) -> bool {
        matches!(self, PgaAtom::Named(_) | PgaAtom::Write(_))
    }
}

/// Test formulas: `T`, atoms, `!`, `&&` and `||`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PgaFormula {
    Top,
    Atom(PgaAtom),
    Not(Box<PgaFormula>),
    And(Box<PgaFormula>, Box<PgaFormula>),
    Or(Box<PgaFormula>, Box<PgaFormula>),
}

impl PgaFormula {
    pub fn atom(a: PgaAtom) -> Self {
        PgaFormula::Atom(a)
    }

    pub fn named(s: &str) -> Self {
        PgaFormula::Atom(PgaAtom::Named(s.to_string()))
    }

    pub fn not(f: PgaFormula) -> Self {
        PgaFormula::Not(Box::new(f))
    }

    pub fn and(l: PgaFormula, r: PgaFormula) -> Self {
        PgaFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: PgaFormula, r: PgaFormula) -> Self {
        PgaFormula::Or(Box::new(l), Box::new(r))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, PgaFormula::Top | PgaFormula::Atom(_))
    }
}

fn write_pf(f: &mut fmt::Formatter<'_>, x: &PgaFormula, min: u8) -> fmt::Result {
    let prec = match x {
        PgaFormula::Or(..) => 1,
        PgaFormula::And(..) => 2,
        _ => 3,
    };
    if prec < min {
        f.write_str("(")?;
    }
    match x {
        PgaFormula::Top => f.write_str("T")?,
        PgaFormula::Atom(a) if a.bare() => write!(f, "{a}")?,
        PgaFormula::Atom(a @ PgaAtom::Formula(Primitive::Assign(..))) => write!(f, "{a}")?,
        PgaFormula::Atom(a) if min == 3 => write!(f, "({a})")?,
        PgaFormula::Atom(a) => write!(f, "{a}")?,
        PgaFormula::Not(g) => {
            f.write_str("!")?;
            write_pf(f, g, 3)?;
        }
        PgaFormula::And(l, r) => {
            write_pf(f, l, 2)?;
            f.write_str(" && ")?;
            write_pf(f, r, 3)?;
        }
        PgaFormula::Or(l, r) => {
            write_pf(f, l, 1)?;
            f.write_str(" || ")?;
            write_pf(f, r, 2)?;
        }
    }
    if prec < min {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for PgaFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pf(f, self, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PgaInstr {
    Basic(PgaAtom),
    PosTest(PgaFormula),
    NegTest(PgaFormula),
    Jump(usize),
    Halt,
    /// A finite, nonempty sequence counting as one instruction.
    Unit(Vec<PgaInstr>),
}

impl PgaInstr {
    pub fn named(s: &str) -> Self {
        PgaInstr::Basic(PgaAtom::Named(s.to_string()))
    }

    pub fn unit(body: Vec<PgaInstr>) -> Self {
        PgaInstr::Unit(body)
    }
}

fn write_test(f: &mut fmt::Formatter<'_>, sign: char, x: &PgaFormula) -> fmt::Result {
    match x {
        PgaFormula::Top => write!(f, "{sign}T"),
        PgaFormula::Atom(a) if a.bare() => write!(f, "{sign}{a}"),
        _ => write!(f, "{sign}({x})"),
    }
}

impl fmt::Display for PgaInstr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PgaInstr::Basic(a) => write!(f, "{a}"),
            PgaInstr::PosTest(x) => write_test(f, '+', x),
            PgaInstr::NegTest(x) => write_test(f, '-', x),
            PgaInstr::Jump(k) => write!(f, "#{k}"),
            PgaInstr::Halt => f.write_str("!"),
            PgaInstr::Unit(body) => write!(f, "u({})", Instrs(body)),
        }
    }
}

/// `; `-separated display of a list of instructions.
pub struct Instrs<'a>(pub &'a [PgaInstr]);

impl fmt::Display for Instrs<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// An instruction sequence as written: concatenation, repetition `X^w`
/// and powers `X^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PgaTerm {
    Instr(PgaInstr),
    Concat(Vec<PgaTerm>),
    Repeat(Box<PgaTerm>),
    Power(Box<PgaTerm>, usize),
}

impl fmt::Display for PgaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PgaTerm::Instr(i) => write!(f, "{i}"),
            PgaTerm::Concat(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            PgaTerm::Repeat(x) => write!(f, "({x})^w"),
            PgaTerm::Power(x, n) => write!(f, "({x})^{n}"),
        }
    }
}

impl From<PgaSeq> for PgaTerm {
    fn from(s: PgaSeq) -> Self {
        let mut parts: Vec<PgaTerm> = s.prefix.into_iter().map(PgaTerm::Instr).collect();
        if let Some(r) = s.repeat {
            let body = PgaTerm::Concat(r.into_iter().map(PgaTerm::Instr).collect());
            parts.push(PgaTerm::Repeat(Box::new(body)));
        }
        PgaTerm::Concat(parts)
    }
}

/// First canonical shape `X` or `X;Y^w` with `X`, `Y` free of repetition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PgaSeq {
    pub prefix: Vec<PgaInstr>,
    /// Nonempty when present.
    pub repeat: Option<Vec<PgaInstr>>,
}

impl PgaSeq {
    pub fn finite(prefix: Vec<PgaInstr>) -> Self {
        PgaSeq { prefix, repeat: None }
    }

    pub fn is_finite(&self) -> bool {
        self.repeat.is_none()
    }
}

impl fmt::Display for PgaSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Instrs(&self.prefix))?;
        if let Some(r) = &self.repeat {
            if !self.prefix.is_empty() {
                f.write_str("; ")?;
            }
            write!(f, "({})^w", Instrs(r))?;
        }
        Ok(())
    }
}

impl Serialize for PgaSeq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for PgaInstr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses an instruction sequence such as `+(a && b);u(c;!);d;(#2;e)^w`.
pub fn parse_pga(src: &str) -> Result<PgaTerm> {
    let mut p = Parser::new(src)?;
    let t = seq(&mut p)?;
    p.finish()?;
    Ok(t)
}

/// Parses and brings into first canonical form.
pub fn parse_pga_seq(src: &str) -> Result<PgaSeq> {
    parse_pga(src).map(|t| first_canonical(&t))
}

/// Parses a test formula on its own.
pub fn parse_pga_formula(src: &str) -> Result<PgaFormula> {
    let mut p = Parser::new(src)?;
    let f = pformula(&mut p)?;
    p.finish()?;
    Ok(f)
}

fn seq(p: &mut Parser) -> Result<PgaTerm> {
    let mut items = vec![item(p)?];
    while p.eat(&Tok::Semi) {
        items.push(item(p)?);
    }
    Ok(if items.len() == 1 { items.pop().unwrap() } else { PgaTerm::Concat(items) })
}

fn item(p: &mut Parser) -> Result<PgaTerm> {
    let mut t = if p.eat(&Tok::LParen) {
        let t = seq(p)?;
        p.expect(&Tok::RParen, "')'")?;
        t
    } else {
        PgaTerm::Instr(instr(p)?)
    };
    while p.eat(&Tok::Caret) {
        match p.bump() {
            Tok::Ident(w) if w == "w" => t = PgaTerm::Repeat(Box::new(t)),
            Tok::Num(n) if n > 0 => t = PgaTerm::Power(Box::new(t), n as usize),
            _ => return Err(p.error("expected 'w' or a positive count after '^'")),
        }
    }
    Ok(t)
}

fn instr(p: &mut Parser) -> Result<PgaInstr> {
    match p.peek().clone() {
        Tok::Bang => {
            p.bump();
            Ok(PgaInstr::Halt)
        }
        Tok::Hash => {
            p.bump();
            match p.bump() {
                Tok::Num(k) => Ok(PgaInstr::Jump(k as usize)),
                _ => Err(p.error("expected a jump counter after '#'")),
            }
        }
        Tok::Plus => {
            p.bump();
            Ok(PgaInstr::PosTest(patom(p)?))
        }
        Tok::Minus => {
            p.bump();
            Ok(PgaInstr::NegTest(patom(p)?))
        }
        Tok::Ident(s) if s == "u" && *p.peek_at(1) == Tok::LParen => {
            p.bump();
            p.bump();
            let at = p.mark();
            let body = first_canonical(&seq(p)?);
            p.expect(&Tok::RParen, "')' closing the unit")?;
            if body.repeat.is_some() {
                p.reset(at);
                return Err(p.error("repetition inside a unit is not supported"));
            }
            Ok(PgaInstr::Unit(body.prefix))
        }
        Tok::Ident(s) if !is_reserved(&s) && *p.peek_at(1) == Tok::ColonEq => {
            p.bump();
            p.bump();
            Ok(PgaInstr::Basic(PgaAtom::Assign(Var::new(&s), p.term()?)))
        }
        _ => Ok(PgaInstr::Basic(atom(p)?)),
    }
}

fn atom(p: &mut Parser) -> Result<PgaAtom> {
    match p.peek().clone() {
        Tok::Write(body) => {
            p.bump();
            Ok(PgaAtom::Write(body))
        }
        Tok::Ident(s)
            if !is_reserved(&s)
                && !matches!(p.peek_at(1), Tok::Eq | Tok::Le | Tok::Plus | Tok::Minus | Tok::Star) =>
        {
            p.bump();
            Ok(PgaAtom::Named(s))
        }
        _ => p.primitive().map(PgaAtom::Formula),
    }
}

fn pformula(p: &mut Parser) -> Result<PgaFormula> {
    let mut f = pconj(p)?;
    while p.eat(&Tok::OrOr) {
        f = PgaFormula::or(f, pconj(p)?);
    }
    Ok(f)
}

fn pconj(p: &mut Parser) -> Result<PgaFormula> {
    let mut f = pneg(p)?;
    while p.eat(&Tok::AndAnd) {
        f = PgaFormula::and(f, pneg(p)?);
    }
    Ok(f)
}

fn pneg(p: &mut Parser) -> Result<PgaFormula> {
    if p.eat(&Tok::Bang) {
        return Ok(PgaFormula::not(pneg(p)?));
    }
    patom(p)
}

fn patom(p: &mut Parser) -> Result<PgaFormula> {
    if p.is_keyword("T") {
        p.bump();
        return Ok(PgaFormula::Top);
    }
    if *p.peek() == Tok::LParen {
        let m = p.mark();
        if let Ok(a) = p.primitive() {
            return Ok(PgaFormula::Atom(PgaAtom::Formula(a)));
        }
        p.reset(m);
        p.bump();
        let f = pformula(p)?;
        p.expect(&Tok::RParen, "')'")?;
        return Ok(f);
    }
    atom(p).map(PgaFormula::Atom)
}

impl Serialize for PgaAtom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
