use std::fmt;

use serde::Serialize;

use super::eval::{eval_formula, eval_term, expected_truth};
use super::Valuation;
use crate::error::{Error, Result};
use crate::syntax::{Formula, Primitive, Program, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StepBudget {
    pub max_star_unfoldings: usize,
}

impl StepBudget {
    pub fn new(max_star_unfoldings: usize) -> Self {
        StepBudget { max_star_unfoldings: max_star_unfoldings.max(1) }
    }
}

impl Default for StepBudget {
    fn default() -> Self {
        StepBudget { max_star_unfoldings: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalOutcome {
    Completed(Valuation),
    /// `halt` was executed.
    Terminated(Valuation),
    Failed,
}

impl EvalOutcome {
    pub fn valuation(&self) -> Option<&Valuation> {
        match self {
            EvalOutcome::Completed(h) | EvalOutcome::Terminated(h) => Some(h),
            EvalOutcome::Failed => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            EvalOutcome::Completed(_) => "completed",
            EvalOutcome::Terminated(_) => "terminated",
            EvalOutcome::Failed => "failed",
        }
    }
}

impl fmt::Display for EvalOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.valuation() {
            Some(h) => write!(f, "{} {h}", self.kind()),
            None => f.write_str(self.kind()),
        }
    }
}

/// Which expected-evaluation rules to apply.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectationPolicy {
    /// Tests leave the state alone, assignments behave as usual.
    #[default]
    Default,
    /// Assignments are expected to leave the state alone too.
    AssignInert,
}

impl ExpectationPolicy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "default" => Some(ExpectationPolicy::Default),
            "assign-inert" => Some(ExpectationPolicy::AssignInert),
            _ => None,
        }
    }
}

/// One entry of an instruction trace.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TraceItem {
    Assign(Var, Term),
    /// A primitive formula evaluated in a test or as an instruction.
    Formula(Primitive),
    Write(String),
    Halt,
}

impl fmt::Display for TraceItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceItem::Assign(v, t) => write!(f, "{v}:={t}"),
            TraceItem::Formula(p) => write!(f, "{p}"),
            TraceItem::Write(s) => write!(f, "w[{s}]"),
            TraceItem::Halt => f.write_str("!"),
        }
    }
}

impl Serialize for TraceItem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Actual,
    Expected(ExpectationPolicy),
}

struct Choice<'a> {
    g: Valuation,
    stack: Vec<&'a Program>,
    trace_len: usize,
}

/// Runs `p` from `g` under the actual semantics.
pub fn run(p: &Program, g: &Valuation, limits: StepBudget) -> Result<EvalOutcome> {
    execute(p, g, Mode::Actual, limits, false).map(|(o, _)| o)
}

/// Runs `p` from `g` under the expected semantics of `policy`.
pub fn run_expected(
    p: &Program,
    g: &Valuation,
    policy: ExpectationPolicy,
    limits: StepBudget,
) -> Result<EvalOutcome> {
    execute(p, g, Mode::Expected(policy), limits, false).map(|(o, _)| o)
}

/// Runs `p` and records the non-test instructions executed and the primitive
/// formulas evaluated inside tests, in order. Abandoned union branches are
/// dropped; on failure the trace of the attempt that got furthest is kept.
pub fn instruction_trace(
    p: &Program,
    g: &Valuation,
    limits: StepBudget,
) -> Result<(EvalOutcome, Vec<TraceItem>)> {
    execute(p, g, Mode::Actual, limits, true)
}

fn execute(
    p: &Program,
    g0: &Valuation,
    mode: Mode,
    limits: StepBudget,
    tracing: bool,
) -> Result<(EvalOutcome, Vec<TraceItem>)> {
    let mut g = g0.clone();
    let mut stack: Vec<&Program> = vec![p];
    let mut choices: Vec<Choice> = Vec::new();
    let mut trace: Vec<TraceItem> = Vec::new();
    let mut failed_trace: Vec<TraceItem> = Vec::new();
    let mut unfoldings = 0usize;

    loop {
        let Some(cur) = stack.pop() else {
            return Ok((EvalOutcome::Completed(g), trace));
        };
        let ok = match cur {
            Program::Assign(v, t) => {
                if tracing {
                    trace.push(TraceItem::Assign(v.clone(), t.clone()));
                }
                if mode != Mode::Expected(ExpectationPolicy::AssignInert) {
                    let k = eval_term(t, &g);
                    g.set(v, k);
                }
                true
            }
            Program::Test(f) => match mode {
                Mode::Actual => eval_formula(f, &mut g, &mut |a: &Formula| {
                    if tracing {
                        if let Some(p) = a.as_primitive() {
                            trace.push(TraceItem::Formula(p));
                        }
                    }
                }),
                Mode::Expected(_) => expected_truth(f, &g),
            },
            Program::Halt => {
                if tracing {
                    trace.push(TraceItem::Halt);
                }
                return Ok((EvalOutcome::Terminated(g), trace));
            }
            Program::Instr(a) => {
                if tracing {
                    trace.push(TraceItem::Formula(a.clone()));
                }
                true
            }
            Program::Write(s) => {
                if tracing {
                    trace.push(TraceItem::Write(s.clone()));
                }
                true
            }
            Program::Seq(l, r) => {
                stack.push(r);
                stack.push(l);
                true
            }
            Program::Union(l, r) => {
                let mut alt = stack.clone();
                alt.push(r);
                choices.push(Choice { g: g.clone(), stack: alt, trace_len: trace.len() });
                stack.push(l);
                true
            }
            Program::Star(body) => {
                unfoldings += 1;
                if unfoldings > limits.max_star_unfoldings {
                    return Err(Error::BudgetExceeded { limit: limits.max_star_unfoldings });
                }
                choices.push(Choice { g: g.clone(), stack: stack.clone(), trace_len: trace.len() });
                stack.push(cur);
                stack.push(body);
                true
            }
        };
        if !ok {
            if tracing && trace.len() >= failed_trace.len() {
                failed_trace = trace.clone();
            }
            match choices.pop() {
                Some(c) => {
                    g = c.g;
                    stack = c.stack;
                    trace.truncate(c.trace_len);
                }
                None => return Ok((EvalOutcome::Failed, failed_trace)),
            }
        }
    }
}
