use serde::Serialize;

use super::{project_program, PgaAtom, PgaFormula, PgaInstr, PgaSeq};
use crate::error::{Error, Result};
use crate::semantics::{instruction_trace, EvalOutcome, StepBudget, TraceItem, Valuation};
use crate::syntax::{Formula, Program};

fn unsupported(a: &PgaAtom, what: &str) -> Error {
    Error::UnsupportedConstruct(format!("{what} {a} has no meaning in the translation"))
}

fn formula(f: &PgaFormula) -> Result<Formula> {
    Ok(match f {
        PgaFormula::Top => Formula::Top,
        PgaFormula::Atom(PgaAtom::Formula(p)) => p.to_formula(),
        PgaFormula::Atom(PgaAtom::Assign(v, t)) => Formula::Assign(v.clone(), t.clone()),
        PgaFormula::Atom(a) => return Err(unsupported(a, "test on")),
        PgaFormula::Not(g) => Formula::not(formula(g)?),
        PgaFormula::And(l, r) => Formula::and(formula(l)?, formula(r)?),
        PgaFormula::Or(l, r) => Formula::or(formula(l)?, formula(r)?),
    })
}

fn basic(a: &PgaAtom) -> Result<Program> {
    match a {
        PgaAtom::Formula(p) => Ok(Program::Instr(p.clone())),
        PgaAtom::Assign(v, t) => Ok(Program::Assign(v.clone(), t.clone())),
        PgaAtom::Write(s) => Ok(Program::Write(s.clone())),
        PgaAtom::Named(_) => Err(unsupported(a, "instruction")),
    }
}

fn fail() -> Program {
    Program::test(Formula::Bot)
}

fn ft(xs: &[PgaInstr]) -> Result<Program> {
    let Some((head, rest)) = xs.split_first() else { return Ok(fail()) };
    let from = |k: usize| if k <= xs.len() { ft(&xs[k..]) } else { Ok(fail()) };
    match head {
        PgaInstr::Basic(a) => Ok(Program::seq(basic(a)?, ft(rest)?)),
        PgaInstr::PosTest(f) | PgaInstr::NegTest(f) => {
            let phi = formula(f)?;
            if rest.is_empty() {
                let t = if matches!(head, PgaInstr::PosTest(_)) { phi } else { Formula::not(phi) };
                return Ok(Program::seq(Program::test(t), fail()));
            }
            let (yes, no) = if matches!(head, PgaInstr::PosTest(_)) { (from(1)?, from(2)?) } else { (from(2)?, from(1)?) };
            Ok(Program::union(
                Program::seq(Program::test(phi.clone()), yes),
                Program::seq(Program::test(Formula::not(phi)), no),
            ))
        }
        PgaInstr::Jump(0) => Ok(fail()),
        PgaInstr::Jump(k) => from(*k),
        PgaInstr::Halt => Ok(Program::Halt),
        PgaInstr::Unit(body) => {
            let mut flat = body.clone();
            flat.extend_from_slice(rest);
            ft(&flat)
        }
    }
}

/// Translates a finite instruction sequence into a program. Running off the
/// end fails; only `!` terminates successfully.
pub fn translate_ft(s: &PgaSeq) -> Result<Program> {
    if s.repeat.is_some() {
        return Err(Error::UnsupportedRepetition);
    }
    ft(&s.prefix)
}

/// Truth of a formula when it does not depend on the state.
fn constant(f: &Formula) -> Option<bool> {
    match f {
        Formula::Top | Formula::Assign(..) => Some(true),
        Formula::Bot => Some(false),
        Formula::Not(g) => constant(g).map(|b| !b),
        Formula::And(l, r) => match (constant(l), constant(r)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
        Formula::Or(l, r) => match (constant(l), constant(r)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
        _ => None,
    }
}

fn dead(p: &Program) -> bool {
    match p {
        Program::Test(f) => constant(f) == Some(false),
        Program::Seq(l, _) => dead(l),
        _ => false,
    }
}

/// Drops union branches guarded by a test that can never succeed, such as
/// `?(!([x:=x+1]T))`.
pub fn prune_dead_branches(p: &Program) -> Program {
    match p {
        Program::Union(l, r) => match (dead(l), dead(r)) {
            (true, false) => prune_dead_branches(r),
            (false, true) => prune_dead_branches(l),
            _ => Program::union(prune_dead_branches(l), prune_dead_branches(r)),
        },
        Program::Seq(l, r) => Program::seq(prune_dead_branches(l), prune_dead_branches(r)),
        Program::Star(b) => Program::star(prune_dead_branches(b)),
        other => other.clone(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimilarityReport {
    pub dpi_ul: String,
    pub dpi_u: String,
    /// `dpi_u` without branches that can never be taken.
    pub dpi_u_pruned: String,
    pub outcome_ul: String,
    pub outcome_u: String,
    pub trace_ul: Vec<TraceItem>,
    pub trace_u: Vec<TraceItem>,
    /// The translation of the original does not fail outright.
    pub applicable: bool,
    pub similar: bool,
}

/// Translates a sequence with and without projecting its complex tests and
/// compares outcome and instruction trace at `g`.
pub fn sufficiently_similar(p_ul: &PgaSeq, g: &Valuation, limits: StepBudget) -> Result<SimilarityReport> {
    let dpi_ul = translate_ft(p_ul)?;
    let dpi_u = translate_ft(&project_program(p_ul))?;
    let (o1, t1) = instruction_trace(&dpi_ul, g, limits)?;
    let (o2, t2) = instruction_trace(&dpi_u, g, limits)?;
    Ok(SimilarityReport {
        dpi_ul: dpi_ul.to_string(),
        dpi_u: dpi_u.to_string(),
        dpi_u_pruned: prune_dead_branches(&dpi_u).to_string(),
        outcome_ul: o1.to_string(),
        outcome_u: o2.to_string(),
        applicable: o1 != EvalOutcome::Failed,
        similar: o1 == o2 && t1 == t2,
        trace_ul: t1,
        trace_u: t2,
    })
}
