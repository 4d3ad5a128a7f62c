use std::fmt;

use crate::error::{Error, Result};
use crate::semantics::{holds_mut, eval_term, EvalOutcome, StepBudget, Valuation};
use crate::syntax::{Formula, Program};

/// Structure of a deterministic program: basic instructions, guarded
/// unions and guarded stars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DetNode {
    Basic(Program),
    /// `(?guard; then) u (?!guard; else_)`
    If { guard: Formula, then: Vec<DetNode>, else_: Vec<DetNode> },
    /// `(?guard; body)*; ?!guard`
    While { guard: Formula, body: Vec<DetNode> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicProgram {
    program: Program,
    nodes: Vec<DetNode>,
}

impl DeterministicProgram {
    pub fn new(p: &Program) -> Result<Self> {
        let items = p.flatten_seq();
        Ok(DeterministicProgram { program: p.clone(), nodes: nodes_of(&items)? })
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn nodes(&self) -> &[DetNode] {
        &self.nodes
    }
}

impl TryFrom<&Program> for DeterministicProgram {
    type Error = Error;
    fn try_from(p: &Program) -> Result<Self> {
        DeterministicProgram::new(p)
    }
}

fn guard_of<'a>(items: &[&'a Program], what: &str) -> Result<&'a Formula> {
    match items.first() {
        Some(Program::Test(f)) => Ok(f),
        _ => Err(Error::NotDeterministic(format!("{what} does not start with a test"))),
    }
}

fn is_negation_of(f: &Formula, guard: &Formula) -> bool {
    matches!(f, Formula::Not(g) if **g == *guard)
}

fn nodes_of(items: &[&Program]) -> Result<Vec<DetNode>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < items.len() {
        match items[i] {
            Program::Union(l, r) => {
                let li = l.flatten_seq();
                let ri = r.flatten_seq();
                let guard = guard_of(&li, "union branch")?;
                match ri.first() {
                    Some(Program::Test(ng)) if is_negation_of(ng, guard) => {}
                    _ => {
                        return Err(Error::NotDeterministic(format!(
                            "right branch of union must start with ?!({guard})"
                        )))
                    }
                }
                out.push(DetNode::If {
                    guard: guard.clone(),
                    then: nodes_of(&li[1..])?,
                    else_: nodes_of(&ri[1..])?,
                });
            }
            Program::Star(b) => {
                let bi = b.flatten_seq();
                let guard = guard_of(&bi, "star body")?;
                match items.get(i + 1) {
                    Some(Program::Test(ng)) if is_negation_of(ng, guard) => {}
                    _ => {
                        return Err(Error::NotDeterministic(format!(
                            "star must be followed by ?!({guard})"
                        )))
                    }
                }
                out.push(DetNode::While { guard: guard.clone(), body: nodes_of(&bi[1..])? });
                i += 1;
            }
            Program::Seq(..) => unreachable!("flattened"),
            p => out.push(DetNode::Basic(p.clone())),
        }
        i += 1;
    }
    Ok(out)
}

/// The basic instructions an evaluation executes, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub instrs: Vec<Program>,
}

impl CanonicalForm {
    pub fn to_program(&self) -> Program {
        Program::seq_all(self.instrs.clone())
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.instrs.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

enum Flow {
    Next,
    Halted,
}

struct Walker {
    out: Vec<Program>,
    guards: usize,
    depth: usize,
    top_iterations: usize,
    limits: StepBudget,
}

impl Walker {
    fn walk(&mut self, nodes: &[DetNode], g: &mut Valuation) -> Result<Flow> {
        for node in nodes {
            if let Flow::Halted = self.node(node, g)? {
                return Ok(Flow::Halted);
            }
        }
        Ok(Flow::Next)
    }

    fn nested(&mut self, nodes: &[DetNode], g: &mut Valuation) -> Result<Flow> {
        self.depth += 1;
        let r = self.walk(nodes, g);
        self.depth -= 1;
        r
    }

    fn node(&mut self, node: &DetNode, g: &mut Valuation) -> Result<Flow> {
        match node {
            DetNode::Basic(p) => {
                self.out.push(p.clone());
                match p {
                    Program::Assign(v, t) => {
                        let k = eval_term(t, g);
                        g.set(v, k);
                    }
                    Program::Test(f) => {
                        if !holds_mut(f, g) {
                            return Err(Error::Undefined(format!("test ?({f}) fails")));
                        }
                    }
                    Program::Halt => return Ok(Flow::Halted),
                    _ => {}
                }
                Ok(Flow::Next)
            }
            DetNode::If { guard, then, else_ } => {
                if holds_mut(guard, g) {
                    self.out.push(Program::Test(guard.clone()));
                    self.nested(then, g)
                } else {
                    self.out.push(Program::Test(Formula::not(guard.clone())));
                    self.nested(else_, g)
                }
            }
            DetNode::While { guard, body } => loop {
                self.guards += 1;
                if self.guards > self.limits.max_star_unfoldings {
                    return Err(Error::BudgetExceeded { limit: self.limits.max_star_unfoldings });
                }
                if holds_mut(guard, g) {
                    self.out.push(Program::Test(guard.clone()));
                    if self.depth == 0 {
                        self.top_iterations += 1;
                    }
                    if let Flow::Halted = self.nested(body, g)? {
                        return Ok(Flow::Halted);
                    }
                } else {
                    self.out.push(Program::Test(Formula::not(guard.clone())));
                    return Ok(Flow::Next);
                }
            },
        }
    }
}

/// Canonical form together with the outcome it reaches.
pub fn canonical_run(
    p: &DeterministicProgram,
    g: &Valuation,
    limits: StepBudget,
) -> Result<(CanonicalForm, EvalOutcome)> {
    walk_program(p, g, limits).map(|(c, o, _)| (c, o))
}

fn walk_program(
    p: &DeterministicProgram,
    g: &Valuation,
    limits: StepBudget,
) -> Result<(CanonicalForm, EvalOutcome, usize)> {
    let mut w = Walker { out: Vec::new(), guards: 0, depth: 0, top_iterations: 0, limits };
    let mut h = g.clone();
    let outcome = match w.walk(&p.nodes, &mut h)? {
        Flow::Next => EvalOutcome::Completed(h),
        Flow::Halted => EvalOutcome::Terminated(h),
    };
    Ok((CanonicalForm { instrs: w.out }, outcome, w.top_iterations))
}

pub fn canonicalize(
    p: &DeterministicProgram,
    g: &Valuation,
    limits: StepBudget,
) -> Result<CanonicalForm> {
    canonical_run(p, g, limits).map(|(c, _)| c)
}

/// For a program of the form `(?phi; body)*; ?!phi`: the number of
/// iterations at `g` and the executed instructions.
pub fn unfold_star(
    p: &DeterministicProgram,
    g: &Valuation,
    limits: StepBudget,
) -> Result<(usize, CanonicalForm)> {
    if !matches!(p.nodes.as_slice(), [DetNode::While { .. }]) {
        return Err(Error::UnsupportedConstruct("unfold_star expects a single guarded star".into()));
    }
    let (c, _, n) = walk_program(p, g, limits)?;
    Ok((n, c))
}
