//! History and remainder of occurrences, marginal and undetectible side
//! effects.

use std::fmt;

use serde::Serialize;

use crate::effects::{canonical_run, diff, effects_single, effects_test, CanonicalForm, DeterministicProgram, SideEffectSet};
use crate::error::{Error, Result};
use crate::semantics::{
    eval_term, expected_truth, holds, holds_mut, run, run_expected, EvalOutcome,
    ExpectationPolicy, StepBudget, Valuation,
};
use crate::syntax::{is_normal_form, to_normal_form, Formula, FormulaPath, Program, Step, Var};

/// An instruction of the canonical form, optionally narrowed to one
/// primitive formula inside its test. Paths index the normal form of the
/// test formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OccurrenceRef {
    pub instr_index: usize,
    pub formula_path: Option<FormulaPath>,
}

impl OccurrenceRef {
    pub fn instr(index: usize) -> Self {
        OccurrenceRef { instr_index: index, formula_path: None }
    }

    pub fn formula(index: usize, path: FormulaPath) -> Self {
        OccurrenceRef { instr_index: index, formula_path: Some(path) }
    }

    /// `3` or `3:andl.not`.
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let (idx, path) = match s.split_once(':') {
            Some((i, p)) => (i, Some(FormulaPath::parse(p)?)),
            None => (s, None),
        };
        let instr_index = idx.trim().parse().map_err(|_| format!("bad instruction index {idx:?}"))?;
        Ok(OccurrenceRef { instr_index, formula_path: path })
    }
}

impl fmt::Display for OccurrenceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.formula_path {
            Some(p) => write!(f, "{}:{p}", self.instr_index),
            None => write!(f, "{}", self.instr_index),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarginalVerdict {
    pub occurrence: OccurrenceRef,
    pub marginal: bool,
    #[serde(rename = "h_E_exists")]
    pub h_e_exists: bool,
    pub delta: SideEffectSet,
    pub effect: SideEffectSet,
}

fn canonical_of(p: &DeterministicProgram, g: &Valuation, limits: StepBudget) -> Result<CanonicalForm> {
    let (c, outcome) = canonical_run(p, g, limits)?;
    if outcome == EvalOutcome::Failed {
        return Err(Error::Undefined(format!("{} fails at {g}", p.program())));
    }
    Ok(c)
}

fn split_at(c: &CanonicalForm, index: usize) -> Result<(Program, Program, Program)> {
    if index >= c.len() {
        return Err(Error::IndexOutOfRange { index, len: c.len() });
    }
    Ok((
        Program::seq_all(c.instrs[..index].to_vec()),
        c.instrs[index].clone(),
        Program::seq_all(c.instrs[index + 1..].to_vec()),
    ))
}

/// Splits the canonical form at `g` around the instruction at `index`.
/// Empty sides become `?T`.
pub fn history_remainder_basic(
    p: &DeterministicProgram,
    index: usize,
    g: &Valuation,
    limits: StepBudget,
) -> Result<(Program, Program)> {
    let c = canonical_of(p, g, limits)?;
    let (h, _, r) = split_at(&c, index)?;
    Ok((h, r))
}

/// Evaluates a normal-form formula and reports the reply of the primitive
/// at `target`, or `None` when evaluation never reaches it.
fn reply_at(
    f: &Formula,
    g: &mut Valuation,
    here: &mut Vec<Step>,
    target: &[Step],
    hit: &mut Option<bool>,
) -> bool {
    let mut sub = |step, x: &Formula, g: &mut Valuation, hit: &mut Option<bool>| {
        here.push(step);
        let b = reply_at(x, g, here, target, hit);
        here.pop();
        b
    };
    match f {
        Formula::Not(x) => !sub(Step::NotArg, x, g, hit),
        Formula::And(l, r) => sub(Step::AndL, l, g, hit) && sub(Step::AndR, r, g, hit),
        Formula::Or(l, r) => sub(Step::OrL, l, g, hit) || sub(Step::OrR, r, g, hit),
        prim => {
            let b = holds_mut(prim, g);
            if here.as_slice() == target {
                *hit = Some(b);
            }
            b
        }
    }
}

fn split_formula(f: &Formula, path: &[Step], reply: bool) -> Result<(Formula, Formula)> {
    let bad = || Error::InvalidPath(format!("path does not lead to a primitive formula in {f}"));
    match (f, path.split_first()) {
        (Formula::Not(_), _) | (_, None) => {
            // A literal: the path runs through its negations to the primitive.
            let mut cur = f;
            let mut local = reply;
            for s in path {
                match (cur, s) {
                    (Formula::Not(x), Step::NotArg) => {
                        cur = x;
                        local = !local;
                    }
                    _ => return Err(bad()),
                }
            }
            if !cur.is_primitive() {
                return Err(bad());
            }
            let rem = if local { Formula::Top } else { Formula::Bot };
            Ok((Formula::Top, rem))
        }
        (Formula::And(l, r), Some((Step::AndL, rest))) => {
            let (h, rm) = split_formula(l, rest, reply)?;
            Ok((h, Formula::and(rm, (**r).clone())))
        }
        (Formula::And(l, r), Some((Step::AndR, rest))) => {
            let (h, rm) = split_formula(r, rest, reply)?;
            Ok((Formula::and((**l).clone(), h), rm))
        }
        (Formula::Or(l, r), Some((Step::OrL, rest))) => {
            let (h, rm) = split_formula(l, rest, reply)?;
            let rm = match rm {
                Formula::Bot => (**r).clone(),
                rm => Formula::or(rm, (**r).clone()),
            };
            Ok((h, rm))
        }
        (Formula::Or(l, r), Some((Step::OrR, rest))) => {
            let (h, rm) = split_formula(r, rest, reply)?;
            Ok((Formula::or((**l).clone(), h), rm))
        }
        _ => Err(bad()),
    }
}

/// Actual reply of the primitive at `path` when `f` is evaluated at `g`.
fn occurrence_reply(f: &Formula, path: &FormulaPath, g: &Valuation) -> Result<bool> {
    if !is_normal_form(f) {
        return Err(Error::NotNormalForm);
    }
    match f.at(path) {
        Some(x) if x.is_primitive() => {}
        _ => return Err(Error::InvalidPath(format!("{path} is not a primitive formula of {f}"))),
    }
    let mut hit = None;
    reply_at(f, &mut g.clone(), &mut Vec::new(), &path.0, &mut hit);
    hit.ok_or(Error::OccurrenceNotEvaluated)
}

/// History and remainder of the normal-form formula `f` given the primitive
/// occurrence at `path`, evaluated from `g`.
///
/// The base case of the remainder is `T` when the literal holding the
/// occurrence replies true and `F` otherwise; `F || phi` is written `phi`.
pub fn history_remainder_formula(
    f: &Formula,
    path: &FormulaPath,
    g: &Valuation,
) -> Result<(Formula, Formula)> {
    let reply = occurrence_reply(f, path, g)?;
    split_formula(f, &path.0, reply)
}

struct FormulaSplit {
    prefix: Program,
    suffix: Program,
    /// State in which the test instruction starts.
    at_instr: Valuation,
    nf: Formula,
    history: Formula,
    remainder: Formula,
}

fn split_primitive(
    p: &DeterministicProgram,
    index: usize,
    path: &FormulaPath,
    g: &Valuation,
    limits: StepBudget,
) -> Result<FormulaSplit> {
    let c = canonical_of(p, g, limits)?;
    let (prefix, instr, suffix) = split_at(&c, index)?;
    let Program::Test(f) = instr else {
        return Err(Error::InvalidPath(format!("instruction {index} ({instr}) is not a test")));
    };
    let nf = to_normal_form(&f)?;
    let at_instr = run(&prefix, g, limits)?
        .valuation()
        .cloned()
        .ok_or_else(|| Error::Undefined("history fails".into()))?;
    let (history, remainder) = history_remainder_formula(&nf, path, &at_instr)?;
    Ok(FormulaSplit { prefix, suffix, at_instr, nf, history, remainder })
}

/// History and remainder of a program given a primitive formula occurring
/// in one of its tests: `H;?Hf` and `?Rf;R`.
pub fn history_remainder_primitive(
    p: &DeterministicProgram,
    occ: &OccurrenceRef,
    g: &Valuation,
    limits: StepBudget,
) -> Result<(Program, Program)> {
    let Some(path) = &occ.formula_path else {
        return history_remainder_basic(p, occ.instr_index, g, limits);
    };
    let s = split_primitive(p, occ.instr_index, path, g, limits)?;
    Ok((
        Program::seq(s.prefix, Program::Test(s.history)),
        Program::seq(Program::Test(s.remainder), s.suffix),
    ))
}

/// Decides whether the side effect of an occurrence is marginal: after it,
/// the remainder ends (under expected evaluation from the expected state) in
/// a valuation differing from the actual end by the effect itself or not at
/// all.
pub fn is_marginal(
    p: &DeterministicProgram,
    occ: &OccurrenceRef,
    g: &Valuation,
    policy: ExpectationPolicy,
    limits: StepBudget,
) -> Result<MarginalVerdict> {
    // f: state where the occurrence runs; f_a / f_e: after it, actually and
    // as expected (None when the expected run fails).
    let (f, f_a, f_e, remainder) = match &occ.formula_path {
        None => {
            let c = canonical_of(p, g, limits)?;
            let (prefix, instr, suffix) = split_at(&c, occ.instr_index)?;
            let f = run(&prefix, g, limits)?
                .valuation()
                .cloned()
                .ok_or_else(|| Error::Undefined("history fails".into()))?;
            let (f_a, f_e) = match &instr {
                Program::Assign(v, t) => {
                    let actual = f.with(v.as_str(), eval_term(t, &f));
                    let expected = match policy {
                        ExpectationPolicy::Default => actual.clone(),
                        ExpectationPolicy::AssignInert => f.clone(),
                    };
                    (actual, Some(expected))
                }
                Program::Test(x) => {
                    let (b, h) = holds(x, &f);
                    if !b {
                        return Err(Error::Undefined(format!("test {instr} fails")));
                    }
                    (h, expected_truth(x, &f).then(|| f.clone()))
                }
                _ => (f.clone(), Some(f.clone())),
            };
            (f, f_a, f_e, suffix)
        }
        Some(path) => {
            let s = split_primitive(p, occ.instr_index, path, g, limits)?;
            let f = run(&Program::Test(s.history.clone()), &s.at_instr, limits)?
                .valuation()
                .cloned()
                .ok_or_else(|| Error::Undefined("formula history fails".into()))?;
            let prim = s.nf.at(path).expect("checked by split").clone();
            let (reply, f_a) = holds(&prim, &f);
            let lit = if reply { prim } else { Formula::not(prim) };
            let f_e = expected_truth(&lit, &f).then(|| f.clone());
            (f, f_a, f_e, Program::seq(Program::Test(s.remainder), s.suffix))
        }
    };
    let effect = diff(f_e.as_ref().unwrap_or(&f), &f_a);
    if effect.is_empty() {
        return Err(Error::NoSideEffect);
    }
    let h_a = run(&remainder, &f_a, limits)?;
    let h_a = h_a.valuation().ok_or_else(|| Error::Undefined("remainder fails".into()))?;
    let h_e = match f_e {
        Some(fe) => run_expected(&remainder, &fe, policy, limits)?.valuation().cloned(),
        None => None,
    };
    let (h_e_exists, delta) = match &h_e {
        Some(he) => (true, diff(he, h_a)),
        None => (false, SideEffectSet::new()),
    };
    let marginal = h_e_exists && (delta == effect || delta.is_empty());
    Ok(MarginalVerdict { occurrence: occ.clone(), marginal, h_e_exists, delta, effect })
}

fn assigned_vars(i: &Program) -> Vec<Var> {
    fn walk(f: &Formula, out: &mut Vec<Var>) {
        match f {
            Formula::Assign(v, _) => out.push(v.clone()),
            Formula::Not(x) => walk(x, out),
            Formula::And(l, r) | Formula::Or(l, r) => {
                walk(l, out);
                walk(r, out);
            }
            Formula::Cond(t, c, e) => {
                walk(t, out);
                walk(c, out);
                walk(e, out);
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    match i {
        Program::Assign(v, _) => out.push(v.clone()),
        Program::Test(f) => walk(f, &mut out),
        _ => {}
    }
    out.sort();
    out.dedup();
    out
}

fn instr_effects(i: &Program, g: &Valuation, policy: ExpectationPolicy) -> Result<SideEffectSet> {
    match i {
        Program::Test(f) if !f.is_literal() => effects_test(f, g),
        _ => effects_single(i, g, policy),
    }
}

/// An instruction without effect at `g` is undetectible when changing the
/// variable it updates to some other value in `0..=search_bound` makes it
/// have one. Valuations where the instruction fails are skipped.
pub fn is_undetectible(
    i: &Program,
    g: &Valuation,
    search_bound: u64,
    policy: ExpectationPolicy,
) -> Result<bool> {
    let vars = assigned_vars(i);
    let [v] = vars.as_slice() else {
        return Err(Error::PreconditionFailed(format!(
            "{i} must update exactly one variable, it updates {}",
            vars.len()
        )));
    };
    if !instr_effects(i, g, policy)?.is_empty() {
        return Err(Error::PreconditionFailed(format!("{i} has a side effect at {g}")));
    }
    let cur = g.get(v.as_str());
    for k in (0..=search_bound).filter(|&k| k != cur) {
        match instr_effects(i, &g.with(v.as_str(), k), policy) {
            Ok(s) if !s.is_empty() => return Ok(true),
            Ok(_) | Err(Error::Undefined(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(false)
}

pub const DEFAULT_SEARCH_BOUND: u64 = 16;
