use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::{PgaAtom, PgaFormula, PgaInstr, PgaSeq};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum BehaviorNode {
    S,
    D,
    /// `a ∘ P`
    Action { action: PgaAtom, next: usize },
    /// `P ⊴ a ⊵ Q`
    Post { action: PgaAtom, on_true: usize, on_false: usize },
}

/// A regular thread as a finite graph of nodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BehaviorGraph {
    pub nodes: Vec<BehaviorNode>,
    pub entry: usize,
}

/// Position of an instruction: a top-level index followed by indices into
/// nested units.
type Pos = Vec<usize>;

enum Target {
    Stop,
    Dead,
    At(Pos),
}

struct Walker<'a> {
    s: &'a PgaSeq,
}

impl<'a> Walker<'a> {
    fn top(&self, i: usize) -> &'a PgaInstr {
        match &self.s.repeat {
            Some(r) if i >= self.s.prefix.len() => &r[i - self.s.prefix.len()],
            _ => &self.s.prefix[i],
        }
    }

    fn at(&self, pos: &[usize]) -> &'a PgaInstr {
        let mut x = self.top(pos[0]);
        for &i in &pos[1..] {
            match x {
                PgaInstr::Unit(body) => x = &body[i],
                _ => unreachable!("position descends into a non-unit"),
            }
        }
        x
    }

    /// Resolves overflow out of units and folds into the loop. `None` when
    /// the position runs off a finite sequence.
    fn normalize(&self, mut pos: Pos) -> Option<Pos> {
        loop {
            if pos.len() == 1 {
                let (p, i) = (self.s.prefix.len(), pos[0]);
                match &self.s.repeat {
                    None if i >= p => return None,
                    Some(r) if i >= p => pos[0] = p + (i - p) % r.len(),
                    _ => {}
                }
                break;
            }
            let PgaInstr::Unit(body) = self.at(&pos[..pos.len() - 1]) else { unreachable!() };
            let last = *pos.last().unwrap();
            if last < body.len() {
                break;
            }
            // leaving the unit: land after it, keeping the surplus count
            let over = last - body.len();
            pos.pop();
            *pos.last_mut().unwrap() += 1 + over;
        }
        while let PgaInstr::Unit(_) = self.at(&pos) {
            pos.push(0);
        }
        Some(pos)
    }

    fn advance(&self, pos: &[usize], k: usize) -> Option<Pos> {
        let mut next = pos.to_vec();
        *next.last_mut().unwrap() += k;
        self.normalize(next)
    }

    /// Follows jumps (and tests on `T`) to the next action, halt or deadlock.
    fn resolve(&self, start: Option<Pos>) -> Target {
        let mut seen: HashSet<Pos> = HashSet::new();
        let mut cur = start;
        loop {
            let Some(pos) = cur else { return Target::Dead };
            let k = match self.at(&pos) {
                PgaInstr::Halt => return Target::Stop,
                PgaInstr::Jump(0) => return Target::Dead,
                PgaInstr::Jump(k) => *k,
                PgaInstr::PosTest(PgaFormula::Top) => 1,
                PgaInstr::NegTest(PgaFormula::Top) => 2,
                _ => return Target::At(pos),
            };
            if !seen.insert(pos.clone()) {
                return Target::Dead;
            }
            cur = self.advance(&pos, k);
        }
    }
}

struct Builder<'a> {
    w: Walker<'a>,
    nodes: Vec<Option<BehaviorNode>>,
    ids: HashMap<Pos, usize>,
    leaves: [Option<usize>; 2],
    todo: Vec<(usize, Pos)>,
}

impl Builder<'_> {
    fn id(&mut self, t: Target) -> usize {
        let leaf = |b: &mut Self, slot: usize, node: BehaviorNode| {
            *b.leaves[slot].get_or_insert_with(|| {
                b.nodes.push(Some(node));
                b.nodes.len() - 1
            })
        };
        match t {
            Target::Stop => leaf(self, 0, BehaviorNode::S),
            Target::Dead => leaf(self, 1, BehaviorNode::D),
            Target::At(pos) => {
                if let Some(&id) = self.ids.get(&pos) {
                    return id;
                }
                self.nodes.push(None);
                let id = self.nodes.len() - 1;
                self.ids.insert(pos.clone(), id);
                self.todo.push((id, pos));
                id
            }
        }
    }

    fn follow(&mut self, pos: &[usize], k: usize) -> usize {
        let t = self.w.resolve(self.w.advance(pos, k));
        self.id(t)
    }
}

/// Extracts the behavior of an instruction sequence. Complex tests must be
/// projected first.
pub fn behavior_extract(s: &PgaSeq) -> Result<BehaviorGraph> {
    let w = Walker { s };
    let entry_target = if s.prefix.is_empty() && s.repeat.is_none() {
        Target::Dead
    } else {
        w.resolve(w.normalize(vec![0]))
    };
    let mut b = Builder { w, nodes: Vec::new(), ids: HashMap::new(), leaves: [None, None], todo: Vec::new() };
    let entry = b.id(entry_target);
    while let Some((id, pos)) = b.todo.pop() {
        let node = match b.w.at(&pos) {
            PgaInstr::Basic(a) => BehaviorNode::Action { action: a.clone(), next: b.follow(&pos, 1) },
            PgaInstr::PosTest(PgaFormula::Atom(a)) => {
                BehaviorNode::Post { action: a.clone(), on_true: b.follow(&pos, 1), on_false: b.follow(&pos, 2) }
            }
            PgaInstr::NegTest(PgaFormula::Atom(a)) => {
                BehaviorNode::Post { action: a.clone(), on_true: b.follow(&pos, 2), on_false: b.follow(&pos, 1) }
            }
            other => return Err(Error::NotProjected(other.to_string())),
        };
        b.nodes[id] = Some(node);
    }
    let nodes = b.nodes.into_iter().map(|n| n.expect("every node is filled")).collect();
    Ok(BehaviorGraph { nodes, entry })
}

fn label(n: &BehaviorNode) -> Option<(&PgaAtom, usize, usize)> {
    match n {
        BehaviorNode::Action { action, next } => Some((action, *next, *next)),
        BehaviorNode::Post { action, on_true, on_false } => Some((action, *on_true, *on_false)),
        _ => None,
    }
}

/// Strong bisimilarity. `a ∘ P` counts as `P ⊴ a ⊵ P`.
pub fn bisimilar(g1: &BehaviorGraph, g2: &BehaviorGraph) -> bool {
    let mut seen = HashSet::new();
    let mut stack = vec![(g1.entry, g2.entry)];
    while let Some((i, j)) = stack.pop() {
        if !seen.insert((i, j)) {
            continue;
        }
        let (x, y) = (&g1.nodes[i], &g2.nodes[j]);
        match (label(x), label(y)) {
            (Some((a, t1, f1)), Some((b, t2, f2))) => {
                if a != b {
                    return false;
                }
                stack.push((t1, t2));
                stack.push((f1, f2));
            }
            (None, None) => {
                if x != y {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

impl BehaviorGraph {
    /// Nodes reached again from inside their own expansion.
    fn loop_heads(&self) -> HashSet<usize> {
        fn go(g: &BehaviorGraph, n: usize, path: &mut Vec<usize>, done: &mut HashSet<usize>, heads: &mut HashSet<usize>) {
            if path.contains(&n) {
                heads.insert(n);
                return;
            }
            if done.contains(&n) {
                return;
            }
            path.push(n);
            if let Some((_, t, f)) = label(&g.nodes[n]) {
                go(g, t, path, done, heads);
                if f != t {
                    go(g, f, path, done, heads);
                }
            }
            path.pop();
            done.insert(n);
        }
        let mut heads = HashSet::new();
        go(self, self.entry, &mut Vec::new(), &mut HashSet::new(), &mut heads);
        heads
    }

    fn show(&self, f: &mut fmt::Formatter<'_>, n: usize, operand: bool, heads: &HashSet<usize>, path: &mut Vec<usize>) -> fmt::Result {
        if path.contains(&n) {
            return write!(f, "X{n}");
        }
        let head = heads.contains(&n);
        if head {
            write!(f, "μX{n}.(")?;
        }
        path.push(n);
        match &self.nodes[n] {
            BehaviorNode::S => f.write_str("S")?,
            BehaviorNode::D => f.write_str("D")?,
            BehaviorNode::Action { action, next } => {
                write!(f, "{action} ∘ ")?;
                self.show(f, *next, true, heads, path)?;
            }
            BehaviorNode::Post { action, on_true, on_false } => {
                let paren = operand && !head;
                if paren {
                    f.write_str("(")?;
                }
                self.show(f, *on_true, true, heads, path)?;
                write!(f, " ⊴ {action} ⊵ ")?;
                self.show(f, *on_false, true, heads, path)?;
                if paren {
                    f.write_str(")")?;
                }
            }
        }
        path.pop();
        if head {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for BehaviorGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let heads = self.loop_heads();
        self.show(f, self.entry, false, &heads, &mut Vec::new())
    }
}
