use super::Valuation;
use crate::error::{Error, Result};
use crate::syntax::{Formula, Program, Term};

pub fn eval_term(t: &Term, g: &Valuation) -> u64 {
    match t {
        Term::Num(n) => *n,
        Term::Var(v) => g.get(v.as_str()),
        Term::Add(l, r) => eval_term(l, g).saturating_add(eval_term(r, g)),
        Term::Mul(l, r) => eval_term(l, g).saturating_mul(eval_term(r, g)),
        Term::Monus(l, r) => eval_term(l, g).saturating_sub(eval_term(r, g)),
    }
}

/// Short-circuit evaluation: the truth of `f` at `g` and the valuation
/// reached by running the programs met along the way.
pub fn holds(f: &Formula, g: &Valuation) -> (bool, Valuation) {
    let mut h = g.clone();
    let b = holds_mut(f, &mut h);
    (b, h)
}

pub fn holds_mut(f: &Formula, g: &mut Valuation) -> bool {
    eval_formula(f, g, &mut |_| {})
}

/// Like [`holds_mut`], calling `visit` on each primitive formula evaluated.
/// `F` counts as a visit to `T`.
pub(crate) fn eval_formula(
    f: &Formula,
    g: &mut Valuation,
    visit: &mut dyn FnMut(&Formula),
) -> bool {
    match f {
        Formula::Top => {
            visit(f);
            true
        }
        Formula::Bot => {
            visit(&Formula::Top);
            false
        }
        Formula::Eq(l, r) => {
            visit(f);
            eval_term(l, g) == eval_term(r, g)
        }
        Formula::Le(l, r) => {
            visit(f);
            eval_term(l, g) <= eval_term(r, g)
        }
        Formula::Assign(v, t) => {
            visit(f);
            let k = eval_term(t, g);
            g.set(v, k);
            true
        }
        Formula::Not(x) => !eval_formula(x, g, visit),
        Formula::And(l, r) => eval_formula(l, g, visit) && eval_formula(r, g, visit),
        Formula::Or(l, r) => eval_formula(l, g, visit) || eval_formula(r, g, visit),
        Formula::Cond(t, c, e) => {
            if eval_formula(c, g, visit) {
                eval_formula(t, g, visit)
            } else {
                eval_formula(e, g, visit)
            }
        }
    }
}

/// The program extraction function: the programs encountered while
/// evaluating `f` at `g`, with `?T` for program-free atoms.
pub fn extract_programs(f: &Formula, g: &Valuation) -> Program {
    let mut h = g.clone();
    extract(f, &mut h).1
}

fn extract(f: &Formula, g: &mut Valuation) -> (bool, Program) {
    match f {
        Formula::Top | Formula::Eq(..) | Formula::Le(..) => (holds_mut(f, g), Program::skip()),
        Formula::Bot => (false, Program::skip()),
        Formula::Assign(v, t) => {
            holds_mut(f, g);
            (true, Program::Assign(v.clone(), t.clone()))
        }
        Formula::Not(x) => {
            let (b, p) = extract(x, g);
            (!b, p)
        }
        Formula::And(l, r) => {
            let (b, p) = extract(l, g);
            if !b {
                return (false, p);
            }
            let (b2, q) = extract(r, g);
            (b2, Program::seq(p, q))
        }
        Formula::Or(l, r) => {
            let (b, p) = extract(l, g);
            if b {
                return (true, p);
            }
            let (b2, q) = extract(r, g);
            (b2, Program::seq(p, q))
        }
        Formula::Cond(t, c, e) => {
            let (b, p) = extract(c, g);
            let (b2, q) = extract(if b { t } else { e }, g);
            (b2, Program::seq(p, q))
        }
    }
}

/// Expected truth of a primitive formula or a negation of one.
/// Assignments are always true and nothing changes state.
pub fn holds_expected(f: &Formula, g: &Valuation) -> Result<bool> {
    if !f.is_literal() {
        return Err(Error::UnsupportedConstruct(format!(
            "expected evaluation of compound formula {f}"
        )));
    }
    Ok(expected_truth(f, g))
}

/// Expected truth extended compositionally to compound formulas: every
/// atom is judged at the same valuation.
pub fn expected_truth(f: &Formula, g: &Valuation) -> bool {
    match f {
        Formula::Top | Formula::Assign(..) => true,
        Formula::Bot => false,
        Formula::Eq(l, r) => eval_term(l, g) == eval_term(r, g),
        Formula::Le(l, r) => eval_term(l, g) <= eval_term(r, g),
        Formula::Not(x) => !expected_truth(x, g),
        Formula::And(l, r) => expected_truth(l, g) && expected_truth(r, g),
        Formula::Or(l, r) => expected_truth(l, g) || expected_truth(r, g),
        Formula::Cond(t, c, e) => {
            if expected_truth(c, g) {
                expected_truth(t, g)
            } else {
                expected_truth(e, g)
            }
        }
    }
}
