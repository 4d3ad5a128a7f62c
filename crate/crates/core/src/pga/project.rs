use super::{PgaFormula, PgaInstr, PgaSeq};

use PgaFormula::{And, Not, Or};

fn unit(body: Vec<PgaInstr>) -> PgaInstr {
    PgaInstr::Unit(body)
}

fn negated(f: &PgaFormula) -> Option<&PgaFormula> {
    match f {
        Not(g) => Some(g),
        _ => None,
    }
}

fn pos(f: &PgaFormula) -> PgaInstr {
    match f {
        Not(g) => neg(g),
        And(l, r) => match (negated(l), negated(r)) {
            (Some(l), None) => unit(vec![pos(l), PgaInstr::Jump(3), pos(r)]),
            (None, Some(r)) => unit(vec![neg(l), PgaInstr::Jump(3), neg(r)]),
            (Some(l), Some(r)) => neg(&PgaFormula::or(l.clone(), r.clone())),
            (None, None) => unit(vec![pos(l), unit(vec![pos(r), PgaInstr::Jump(2)]), PgaInstr::Jump(2)]),
        },
        Or(l, r) => match (negated(l), negated(r)) {
            (Some(l), None) => unit(vec![neg(l), PgaInstr::Jump(2), pos(r)]),
            (None, Some(r)) => unit(vec![pos(l), PgaInstr::Jump(2), neg(r)]),
            (Some(l), Some(r)) => neg(&PgaFormula::and(l.clone(), r.clone())),
            (None, None) => unit(vec![neg(l), pos(r)]),
        },
        atom => PgaInstr::PosTest(atom.clone()),
    }
}

fn neg(f: &PgaFormula) -> PgaInstr {
    match f {
        Not(g) => pos(g),
        And(l, r) => match (negated(l), negated(r)) {
            (Some(l), None) => unit(vec![pos(l), PgaInstr::Jump(2), neg(r)]),
            (None, Some(r)) => unit(vec![neg(l), PgaInstr::Jump(2), pos(r)]),
            (Some(l), Some(r)) => pos(&PgaFormula::or(l.clone(), r.clone())),
            (None, None) => unit(vec![pos(l), neg(r)]),
        },
        Or(l, r) => match (negated(l), negated(r)) {
            (Some(l), None) => unit(vec![neg(l), PgaInstr::Jump(3), neg(r)]),
            (None, Some(r)) => unit(vec![pos(l), PgaInstr::Jump(3), pos(r)]),
            (Some(l), Some(r)) => pos(&PgaFormula::and(l.clone(), r.clone())),
            (None, None) => unit(vec![neg(l), unit(vec![neg(r), PgaInstr::Jump(2)]), PgaInstr::Jump(2)]),
        },
        atom => PgaInstr::NegTest(atom.clone()),
    }
}

/// Replaces a test on a complex formula by a unit over atomic tests and
/// jumps. Everything else is returned unchanged, units included.
pub fn project(i: &PgaInstr) -> PgaInstr {
    match i {
        PgaInstr::PosTest(f) => pos(f),
        PgaInstr::NegTest(f) => neg(f),
        PgaInstr::Unit(body) => unit(body.iter().map(project).collect()),
        other => other.clone(),
    }
}

/// [`project`] applied to every instruction, inside units and loops too.
pub fn project_program(s: &PgaSeq) -> PgaSeq {
    PgaSeq {
        prefix: s.prefix.iter().map(project).collect(),
        repeat: s.repeat.as_ref().map(|r| r.iter().map(project).collect()),
    }
}
