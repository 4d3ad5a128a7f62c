use super::ast::{Formula, Program};
use crate::error::{Error, Result};

/// Pushes negations down to primitive formulas with the left-sequential
/// De Morgan laws. Stacked negations on a primitive are kept as they are.
pub fn to_normal_form(f: &Formula) -> Result<Formula> {
    if f.has_cond() {
        return Err(Error::UnsupportedConstruct(format!(
            "normal form of conditional formula {f}"
        )));
    }
    Ok(nf(f))
}

fn nf(f: &Formula) -> Formula {
    match f {
        Formula::Not(g) => negate(nf(g)),
        Formula::And(l, r) => Formula::and(nf(l), nf(r)),
        Formula::Or(l, r) => Formula::or(nf(l), nf(r)),
        g => g.clone(),
    }
}

/// Negation of a normal-form formula, again in normal form.
pub fn negate(f: Formula) -> Formula {
    match f {
        Formula::And(l, r) => Formula::or(negate(*l), negate(*r)),
        Formula::Or(l, r) => Formula::and(negate(*l), negate(*r)),
        g => Formula::not(g),
    }
}

pub fn is_normal_form(f: &Formula) -> bool {
    match f {
        Formula::Not(g) => g.is_literal(),
        Formula::And(l, r) | Formula::Or(l, r) => is_normal_form(l) && is_normal_form(r),
        Formula::Cond(..) => false,
        _ => true,
    }
}

/// Replaces every compound test by tests on literals:
/// `?(a && b)` becomes `?a; ?b` and `?(a || b)` becomes `?a u (?!a; ?b)`.
pub fn eliminate_connectives(p: &Program) -> Result<Program> {
    Ok(match p {
        Program::Test(f) => split_test(&to_normal_form(f)?),
        Program::Seq(l, r) => Program::seq(eliminate_connectives(l)?, eliminate_connectives(r)?),
        Program::Union(l, r) => {
            Program::union(eliminate_connectives(l)?, eliminate_connectives(r)?)
        }
        Program::Star(b) => Program::star(eliminate_connectives(b)?),
        q => q.clone(),
    })
}

fn split_test(f: &Formula) -> Program {
    match f {
        Formula::And(l, r) => Program::seq(split_test(l), split_test(r)),
        Formula::Or(l, r) => Program::union(
            split_test(l),
            Program::seq(split_test(&negate((**l).clone())), split_test(r)),
        ),
        g => Program::Test(g.clone()),
    }
}
