//! Conditional terms and semantic checks of the CP, SCL and RP schemes.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gen::{gen_atom, gen_formula, GenConfig};
use crate::semantics::{holds_mut, Valuation};
use crate::syntax::{Formula, Primitive, Var};

/// Terms over `T`, `F`, atoms and `x <| y |> z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConditionalTerm {
    T,
    F,
    Atom(Primitive),
    /// `Cond(x, y, z)` is `x <| y |> z`: `y` decides, then `x` or `z`.
    Cond(Box<ConditionalTerm>, Box<ConditionalTerm>, Box<ConditionalTerm>),
}

impl ConditionalTerm {
    pub fn cond(x: ConditionalTerm, y: ConditionalTerm, z: ConditionalTerm) -> Self {
        ConditionalTerm::Cond(Box::new(x), Box::new(y), Box::new(z))
    }

    pub fn vars(&self, out: &mut Vec<Var>) {
        match self {
            ConditionalTerm::Atom(p) => p.to_formula().vars(out),
            ConditionalTerm::Cond(x, y, z) => {
                x.vars(out);
                y.vars(out);
                z.vars(out);
            }
            _ => {}
        }
    }
}

impl fmt::Display for ConditionalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionalTerm::T => f.write_str("T"),
            ConditionalTerm::F => f.write_str("F"),
            ConditionalTerm::Atom(p) => write!(f, "{p}"),
            ConditionalTerm::Cond(x, y, z) => write!(f, "({x} <| {y} |> {z})"),
        }
    }
}

impl Serialize for ConditionalTerm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `!x = F <| x |> T`, `x && y = y <| x |> F`, `x || y = T <| x |> y`.
pub fn defn_expand(f: &Formula) -> ConditionalTerm {
    use ConditionalTerm as C;
    match f {
        Formula::Top => C::T,
        Formula::Bot => C::F,
        Formula::Not(x) => C::cond(C::F, defn_expand(x), C::T),
        Formula::And(x, y) => C::cond(defn_expand(y), defn_expand(x), C::F),
        Formula::Or(x, y) => C::cond(C::T, defn_expand(x), defn_expand(y)),
        Formula::Cond(t, c, e) => C::cond(defn_expand(t), defn_expand(c), defn_expand(e)),
        atom => C::Atom(atom.as_primitive().expect("remaining formulas are primitive")),
    }
}

fn eval_mut(t: &ConditionalTerm, g: &mut Valuation) -> bool {
    match t {
        ConditionalTerm::T => true,
        ConditionalTerm::F => false,
        ConditionalTerm::Atom(p) => holds_mut(&p.to_formula(), g),
        ConditionalTerm::Cond(x, y, z) => {
            if eval_mut(y, g) {
                eval_mut(x, g)
            } else {
                eval_mut(z, g)
            }
        }
    }
}

/// Evaluates the condition first, then exactly one branch, threading the
/// state through.
pub fn eval_conditional(t: &ConditionalTerm, g: &Valuation) -> (bool, Valuation) {
    let mut h = g.clone();
    let b = eval_mut(t, &mut h);
    (b, h)
}

/// All valuations of the variables of `terms` over `0..=max`.
pub fn state_space(terms: &[&ConditionalTerm], max: u64) -> Vec<Valuation> {
    let mut vars = Vec::new();
    for t in terms {
        t.vars(&mut vars);
    }
    vars.sort();
    vars.dedup();
    Valuation::enumerate(&vars, max)
}

/// The first state where the two terms differ in truth or final state.
pub fn first_difference<'a>(
    t1: &ConditionalTerm,
    t2: &ConditionalTerm,
    states: &'a [Valuation],
) -> Option<&'a Valuation> {
    states.iter().find(|g| eval_conditional(t1, g) != eval_conditional(t2, g))
}

pub fn semantically_equal(t1: &ConditionalTerm, t2: &ConditionalTerm, states: &[Valuation]) -> bool {
    first_difference(t1, t2, states).is_none()
}

/// Largest value in the enumerated state space.
pub const STATE_MAX: u64 = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Schema {
    CP1,
    CP2,
    CP3,
    CP4,
    CPrp1,
    CPrp2,
    CPmem,
    CPstat,
    Contraction,
    ContractionAtom,
    SCL1,
    SCL2,
    SCL3,
    SCL4,
    SCL5,
    SCL6,
    SCL7,
    /// Associativity of `||`.
    SCL7d,
    SCL8,
    SCL9,
    SCL10,
    RP1,
    RP2,
    RP3,
    RP4,
    RP5,
    RP6,
    RP7,
    RP8,
    RP9,
    RP10,
    RP11,
    RP12,
}

impl Schema {
    pub const ALL: [Schema; 33] = {
        use Schema::*;
        [
            CP1, CP2, CP3, CP4, CPrp1, CPrp2, CPmem, CPstat, Contraction, ContractionAtom, SCL1,
            SCL2, SCL3, SCL4, SCL5, SCL6, SCL7, SCL7d, SCL8, SCL9, SCL10, RP1, RP2, RP3, RP4, RP5,
            RP6, RP7, RP8, RP9, RP10, RP11, RP12,
        ]
    };

    pub fn name(self) -> &'static str {
        use Schema::*;
        match self {
            CP1 => "CP1",
            CP2 => "CP2",
            CP3 => "CP3",
            CP4 => "CP4",
            CPrp1 => "CPrp1",
            CPrp2 => "CPrp2",
            CPmem => "CPmem",
            CPstat => "CPstat",
            Contraction => "contraction",
            ContractionAtom => "contraction_atom",
            SCL1 => "SCL1",
            SCL2 => "SCL2",
            SCL3 => "SCL3",
            SCL4 => "SCL4",
            SCL5 => "SCL5",
            SCL6 => "SCL6",
            SCL7 => "SCL7",
            SCL7d => "SCL7d",
            SCL8 => "SCL8",
            SCL9 => "SCL9",
            SCL10 => "SCL10",
            RP1 => "RP1",
            RP2 => "RP2",
            RP3 => "RP3",
            RP4 => "RP4",
            RP5 => "RP5",
            RP6 => "RP6",
            RP7 => "RP7",
            RP8 => "RP8",
            RP9 => "RP9",
            RP10 => "RP10",
            RP11 => "RP11",
            RP12 => "RP12",
        }
    }

    /// Case-insensitive lookup by name.
    pub fn parse(s: &str) -> Result<Schema> {
        Schema::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownSchema(s.to_string()))
    }

    /// Schemas that are not valid for formulas with assignments; the check
    /// passes when a counterexample is found.
    pub fn expected_valid(self) -> bool {
        !matches!(self, Schema::CPmem | Schema::CPstat | Schema::Contraction | Schema::ContractionAtom)
    }

    /// Whether the metavariable `a` ranges over atoms.
    pub fn uses_atom(self) -> bool {
        use Schema::*;
        matches!(self, CPrp1 | CPrp2 | ContractionAtom | RP1 | RP2 | RP3 | RP4 | RP5 | RP6 | RP7 | RP8 | RP9 | RP10 | RP11 | RP12)
    }

    /// Both sides of the schema for the given metavariables.
    pub fn instantiate(self, m: &Metavars) -> (Formula, Formula) {
        use Formula as F;
        use Schema::*;
        let (x, y, z, u, v, w) = (m.x.clone(), m.y.clone(), m.z.clone(), m.u.clone(), m.v.clone(), m.w.clone());
        let a = m.a.to_formula();
        let na = || F::not(a.clone());
        let c = F::cond;
        let and = F::and;
        let or = F::or;
        let not = F::not;
        match self {
            CP1 => (c(x.clone(), F::Top, y), x),
            CP2 => (c(x, F::Bot, y.clone()), y),
            CP3 => (c(F::Top, x.clone(), F::Bot), x),
            CP4 => (
                c(x.clone(), c(y.clone(), z.clone(), u.clone()), v.clone()),
                c(c(x.clone(), y, v.clone()), z, c(x, u, v)),
            ),
            CPrp1 => (c(c(x.clone(), a.clone(), y), a.clone(), z.clone()), c(c(x.clone(), a.clone(), x), a, z)),
            CPrp2 => (c(x.clone(), a.clone(), c(y, a.clone(), z.clone())), c(x, a.clone(), c(z.clone(), a, z))),
            CPmem => (
                c(x.clone(), y.clone(), c(z.clone(), u.clone(), c(v, y.clone(), w.clone()))),
                c(x, y, c(z, u, w)),
            ),
            CPstat => (
                c(c(x.clone(), y.clone(), z.clone()), u.clone(), v.clone()),
                c(c(x, u.clone(), v.clone()), y, c(z, u, v)),
            ),
            Contraction => (c(c(w.clone(), y.clone(), v), y.clone(), x.clone()), c(w, y, x)),
            ContractionAtom => (and(a.clone(), a.clone()), a),
            SCL1 => (F::Bot, not(F::Top)),
            SCL2 => (or(x.clone(), y.clone()), not(and(not(x), not(y)))),
            SCL3 => (not(not(x.clone())), x),
            SCL4 => (and(F::Top, x.clone()), x),
            SCL5 => (and(x.clone(), F::Top), x),
            SCL6 => (and(F::Bot, x), F::Bot),
            SCL7 => (and(and(x.clone(), y.clone()), z.clone()), and(x, and(y, z))),
            SCL7d => (or(or(x.clone(), y.clone()), z.clone()), or(x, or(y, z))),
            SCL8 => {
                let zf = and(z, F::Bot);
                (and(or(x.clone(), y.clone()), zf.clone()), and(or(not(x), zf.clone()), and(y, zf)))
            }
            SCL9 => {
                let zt = or(z, F::Top);
                (and(or(x.clone(), y.clone()), zt.clone()), or(and(x, zt.clone()), and(y, zt)))
            }
            SCL10 => {
                let xf = and(x, F::Bot);
                (and(or(xf.clone(), y.clone()), z.clone()), or(xf, and(y, z)))
            }
            RP1 => (and(a.clone(), or(a.clone(), x)), and(a.clone(), or(a, y))),
            RP2 => (or(a.clone(), and(a.clone(), x)), or(a.clone(), and(a, y))),
            RP3 => (and(or(a.clone(), na()), x.clone()), or(and(na(), a.clone()), x)),
            RP4 => (and(or(na(), a.clone()), x.clone()), or(and(a.clone(), na()), x)),
            RP5 => (and(and(a.clone(), na()), x), and(a.clone(), na())),
            RP6 => (and(and(na(), a.clone()), x), and(na(), a.clone())),
            RP7 | RP8 => {
                let k = if self == RP7 { and(a.clone(), na()) } else { and(na(), a.clone()) };
                (and(or(x.clone(), y.clone()), k.clone()), and(or(not(x), k.clone()), and(y, k)))
            }
            RP9 | RP10 => {
                let k = if self == RP9 { or(a.clone(), na()) } else { or(na(), a.clone()) };
                (and(or(x.clone(), y.clone()), k.clone()), or(and(x, k.clone()), and(y, k)))
            }
            RP11 | RP12 => {
                let k = if self == RP11 { and(a.clone(), na()) } else { and(na(), a.clone()) };
                (and(or(k.clone(), y.clone()), z.clone()), or(k, and(y, z)))
            }
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Values for the metavariables of a schema; unused ones are ignored.
#[derive(Clone, Debug)]
pub struct Metavars {
    pub x: Formula,
    pub y: Formula,
    pub z: Formula,
    pub u: Formula,
    pub v: Formula,
    pub w: Formula,
    pub a: Primitive,
}

impl Metavars {
    pub fn generate<R: rand::Rng>(rng: &mut R, cfg: &GenConfig) -> Self {
        Metavars {
            x: gen_formula(rng, cfg),
            y: gen_formula(rng, cfg),
            z: gen_formula(rng, cfg),
            u: gen_formula(rng, cfg),
            v: gen_formula(rng, cfg),
            w: gen_formula(rng, cfg),
            a: gen_atom(rng, cfg),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub lhs: Formula,
    pub rhs: Formula,
    /// The atom `a`, for schemas that use one.
    pub atom: Option<Primitive>,
    pub valuation: Valuation,
    pub lhs_result: (bool, Valuation),
    pub rhs_result: (bool, Valuation),
}

#[derive(Clone, Debug, Serialize)]
pub struct SchemaReport {
    pub schema: Schema,
    pub expected_valid: bool,
    pub trials: usize,
    pub seed: u64,
    /// Instances with a differing state.
    pub violations: usize,
    pub counterexample: Option<Counterexample>,
    /// Valid schemas pass with no violation, the others with at least one.
    pub passed: bool,
}

/// Instantiates `schema` `trials` times from `seed` and compares both sides
/// on every valuation of their variables over `0..=STATE_MAX`.
pub fn check_schema(schema: Schema, trials: usize, seed: u64) -> SchemaReport {
    check_schema_with(schema, trials, seed, &GenConfig::default())
}

pub fn check_schema_with(schema: Schema, trials: usize, seed: u64, cfg: &GenConfig) -> SchemaReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instances: Vec<Metavars> = (0..trials).map(|_| Metavars::generate(&mut rng, cfg)).collect();
    let results: Vec<Option<Counterexample>> = instances
        .par_iter()
        .enumerate()
        .map(|(trial, m)| {
            let (lhs, rhs) = schema.instantiate(m);
            let (l, r) = (defn_expand(&lhs), defn_expand(&rhs));
            let states = state_space(&[&l, &r], STATE_MAX);
            first_difference(&l, &r, &states).map(|g| Counterexample {
                trial,
                atom: schema.uses_atom().then(|| m.a.clone()),
                valuation: g.clone(),
                lhs_result: eval_conditional(&l, g),
                rhs_result: eval_conditional(&r, g),
                lhs,
                rhs,
            })
        })
        .collect();
    let violations = results.iter().filter(|r| r.is_some()).count();
    let counterexample = results.into_iter().flatten().next();
    let passed = if schema.expected_valid() { violations == 0 } else { violations > 0 };
    SchemaReport { schema, expected_valid: schema.expected_valid(), trials, seed, violations, counterexample, passed }
}
