//! Side-effect sets: the difference between actual and expected evaluation.

mod det;

use std::collections::BTreeSet;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

pub use det::{canonical_run, canonicalize, unfold_star, CanonicalForm, DetNode, DeterministicProgram};

use crate::error::{Error, Result};
use crate::semantics::{
    eval_term, holds, holds_expected, EvalOutcome, ExpectationPolicy, StepBudget, Valuation,
};
use crate::syntax::{to_normal_form, Formula, Program, Var};

/// A set of bindings `x -> k`, plus the order in which they were found.
#[derive(Clone, Debug, Default, Eq)]
pub struct SideEffectSet {
    entries: BTreeSet<(Var, u64)>,
    trace: Vec<(Var, u64)>,
}

impl PartialEq for SideEffectSet {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl SideEffectSet {
    pub fn new() -> Self {
        SideEffectSet::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, u64)>) -> Self {
        let mut s = SideEffectSet::new();
        for (k, v) in pairs {
            s.insert(Var::new(k), v);
        }
        s
    }

    pub fn insert(&mut self, var: Var, value: u64) {
        self.entries.insert((var.clone(), value));
        self.trace.push((var, value));
    }

    pub fn union_with(&mut self, other: &SideEffectSet) {
        for (k, v) in &other.trace {
            self.insert(k.clone(), *v);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn contains(&self, var: &str, value: u64) -> bool {
        self.entries.iter().any(|(k, v)| k.as_str() == var && *v == value)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Var, u64)> {
        self.entries.iter().map(|(k, v)| (k, *v))
    }

    /// Every binding in discovery order, repetitions included.
    pub fn trace(&self) -> &[(Var, u64)] {
        &self.trace
    }
}

impl fmt::Display for SideEffectSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}->{v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Serialize)]
struct Binding<'a> {
    var: &'a str,
    value: u64,
}

impl Serialize for SideEffectSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.entries.len()))?;
        for (k, v) in &self.entries {
            seq.serialize_element(&Binding { var: k.as_str(), value: *v })?;
        }
        seq.end()
    }
}

/// Bindings of `h` on the variables where `g` and `h` disagree.
pub fn diff(g: &Valuation, h: &Valuation) -> SideEffectSet {
    let mut names: BTreeSet<&Var> = g.support().map(|(k, _)| k).collect();
    names.extend(h.support().map(|(k, _)| k));
    let mut s = SideEffectSet::new();
    for k in names {
        let (a, b) = (g.get(k.as_str()), h.get(k.as_str()));
        if a != b {
            s.insert(k.clone(), b);
        }
    }
    s
}

/// Effects and, for reporting, the expected values they replaced.
#[derive(Clone, Debug, Default)]
struct Pair {
    actual: SideEffectSet,
    expected: SideEffectSet,
}

impl Pair {
    fn of(expected: &Valuation, actual: &Valuation) -> Pair {
        Pair { actual: diff(expected, actual), expected: diff(actual, expected) }
    }

    fn union_with(&mut self, o: &Pair) {
        self.actual.union_with(&o.actual);
        self.expected.union_with(&o.expected);
    }
}

fn single(i: &Program, g: &Valuation, policy: ExpectationPolicy) -> Result<Pair> {
    match i {
        Program::Assign(v, t) => {
            let mut actual = g.clone();
            actual.set(v, eval_term(t, g));
            let expected = match policy {
                ExpectationPolicy::Default => actual.clone(),
                ExpectationPolicy::AssignInert => g.clone(),
            };
            Ok(Pair::of(&expected, &actual))
        }
        Program::Test(f) if f.is_literal() => {
            let (b, h) = holds(f, g);
            if !b || !holds_expected(f, g)? {
                return Err(Error::Undefined(format!("test ?({f}) fails at {g}")));
            }
            Ok(Pair::of(g, &h))
        }
        Program::Test(f) => Err(Error::UnsupportedConstruct(format!(
            "?({f}) is not a single instruction; use effects_test"
        ))),
        Program::Halt | Program::Instr(_) | Program::Write(_) => Ok(Pair::default()),
        p => Err(Error::UnsupportedConstruct(format!("{p} is not a single instruction"))),
    }
}

/// Effects of one instruction: an assignment, a test on a (negated)
/// primitive formula, `halt`, an instruction-formula or a write.
pub fn effects_single(
    i: &Program,
    g: &Valuation,
    policy: ExpectationPolicy,
) -> Result<SideEffectSet> {
    single(i, g, policy).map(|p| p.actual)
}

/// Evaluates a normal-form formula collecting the effects of every literal
/// visited; the truth of the whole is returned too.
fn literal_effects(f: &Formula, g: &mut Valuation, acc: &mut Pair) -> bool {
    match f {
        Formula::And(l, r) => literal_effects(l, g, acc) && literal_effects(r, g, acc),
        Formula::Or(l, r) => literal_effects(l, g, acc) || literal_effects(r, g, acc),
        lit => {
            let (b, h) = holds(lit, g);
            acc.union_with(&Pair::of(g, &h));
            *g = h;
            b
        }
    }
}

fn test_pair(f: &Formula, g: &Valuation) -> Result<Pair> {
    let nf = to_normal_form(f)?;
    let mut acc = Pair::default();
    let mut h = g.clone();
    if !literal_effects(&nf, &mut h, &mut acc) {
        return Err(Error::Undefined(format!("test ?({f}) fails at {g}")));
    }
    Ok(acc)
}

/// Effects of a successful test `?f`, following short-circuit evaluation
/// through the normal form of `f`.
pub fn effects_test(f: &Formula, g: &Valuation) -> Result<SideEffectSet> {
    test_pair(f, g).map(|p| p.actual)
}

/// Full effects analysis of a deterministic program at one valuation.
#[derive(Clone, Debug)]
pub struct EffectsReport {
    pub canonical: CanonicalForm,
    pub outcome: EvalOutcome,
    pub effects: SideEffectSet,
    /// Values the expected evaluation would have produced for the same
    /// variables; informational only.
    pub expected: SideEffectSet,
}

pub fn analyze_effects(
    p: &DeterministicProgram,
    g: &Valuation,
    policy: ExpectationPolicy,
    limits: StepBudget,
) -> Result<EffectsReport> {
    let (canonical, outcome) = canonical_run(p, g, limits)?;
    let mut acc = Pair::default();
    let mut cur = g.clone();
    for i in &canonical.instrs {
        match i {
            Program::Test(f) => {
                acc.union_with(&test_pair(f, &cur)?);
                cur = holds(f, &cur).1;
            }
            Program::Assign(v, t) => {
                acc.union_with(&single(i, &cur, policy)?);
                let k = eval_term(t, &cur);
                cur.set(v, k);
            }
            Program::Halt => break,
            _ => {}
        }
    }
    Ok(EffectsReport { canonical, outcome, effects: acc.actual, expected: acc.expected })
}

/// Effects of a deterministic program: the union over the instructions of
/// its canonical form, each taken at the valuation where it runs.
pub fn effects_program(
    p: &DeterministicProgram,
    g: &Valuation,
    policy: ExpectationPolicy,
    limits: StepBudget,
) -> Result<SideEffectSet> {
    analyze_effects(p, g, policy, limits).map(|r| r.effects)
}
