//! Seeded random generators for terms, formulas, commands and instruction
//! sequences.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::pga::{PgaAtom, PgaFormula, PgaInstr, PgaSeq, PgaTerm};
use crate::sos::Command;
use crate::syntax::{Formula, Primitive, Program, Term, Var};

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub vars: Vec<Var>,
    /// Constants are drawn from `0..=max_const`.
    pub max_const: u64,
    pub depth: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { vars: ["x", "y", "z"].iter().map(|v| Var::new(v)).collect(), max_const: 7, depth: 4 }
    }
}

impl GenConfig {
    pub fn var<R: Rng>(&self, rng: &mut R) -> Var {
        self.vars.choose(rng).expect("at least one variable").clone()
    }

    fn num<R: Rng>(&self, rng: &mut R) -> Term {
        Term::Num(rng.gen_range(0..=self.max_const))
    }
}

/// Small terms: a constant, a variable, or a variable plus or minus a
/// constant.
pub fn gen_term<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Term {
    let v = Term::Var(cfg.var(rng));
    match rng.gen_range(0..5) {
        0 => cfg.num(rng),
        1 => v,
        2 => Term::add(v, Term::Num(1)),
        3 => Term::add(v, cfg.num(rng)),
        _ => Term::monus(v, Term::Num(1)),
    }
}

/// Atoms from the templates `x=c`, `x<=c` and `[x:=e]T`.
pub fn gen_atom<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Primitive {
    let x = Term::Var(cfg.var(rng));
    match rng.gen_range(0..3) {
        0 => Primitive::Eq(x, cfg.num(rng)),
        1 => Primitive::Le(x, cfg.num(rng)),
        _ => Primitive::Assign(cfg.var(rng), gen_term(rng, cfg)),
    }
}

fn leaf<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Formula {
    match rng.gen_range(0..10) {
        0 => Formula::Top,
        1 => Formula::Bot,
        _ => gen_atom(rng, cfg).to_formula(),
    }
}

fn formula_rec<R: Rng>(rng: &mut R, cfg: &GenConfig, depth: usize, cond: bool) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng, cfg);
    }
    let d = depth - 1;
    match rng.gen_range(0..if cond { 4 } else { 3 }) {
        0 => Formula::not(formula_rec(rng, cfg, d, cond)),
        1 => Formula::and(formula_rec(rng, cfg, d, cond), formula_rec(rng, cfg, d, cond)),
        2 => Formula::or(formula_rec(rng, cfg, d, cond), formula_rec(rng, cfg, d, cond)),
        _ => Formula::cond(
            formula_rec(rng, cfg, d, cond),
            formula_rec(rng, cfg, d, cond),
            formula_rec(rng, cfg, d, cond),
        ),
    }
}

/// Formulas over `T`, `F`, atoms, `!`, `&&` and `||`.
pub fn gen_formula<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Formula {
    formula_rec(rng, cfg, cfg.depth, false)
}

/// Like [`gen_formula`], with the conditional connective as well.
pub fn gen_cond_formula<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Formula {
    formula_rec(rng, cfg, cfg.depth, true)
}

/// Toy-language commands. Loops count a variable down so most terminate.
pub fn gen_command<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Command {
    command_rec(rng, cfg, cfg.depth)
}

fn command_rec<R: Rng>(rng: &mut R, cfg: &GenConfig, depth: usize) -> Command {
    let small = GenConfig { depth: 2, ..cfg.clone() };
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..8) {
            0 => Command::Skip,
            1 if rng.gen_bool(0.3) => Command::Abort,
            _ => Command::Assign(cfg.var(rng), gen_term(rng, cfg)),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..3) {
        0 => Command::seq(command_rec(rng, cfg, d), command_rec(rng, cfg, d)),
        1 => Command::if_(gen_formula(rng, &small), command_rec(rng, cfg, d), command_rec(rng, cfg, d)),
        _ => {
            let v = cfg.var(rng);
            let guard = Formula::not(Formula::eq(Term::Var(v.clone()), Term::Num(0)));
            let body = Command::seq(
                command_rec(rng, cfg, d),
                Command::Assign(v.clone(), Term::monus(Term::Var(v), Term::Num(1))),
            );
            Command::while_(guard, body)
        }
    }
}

/// Alphabet and shape of random instruction sequences.
#[derive(Clone, Debug)]
pub struct PgaGen {
    /// Atoms that may be tested.
    pub tests: Vec<PgaAtom>,
    /// Atoms that may be executed as basic instructions.
    pub actions: Vec<PgaAtom>,
    /// Allow `!`, `&&` and `||` inside tests.
    pub complex: bool,
    pub units: bool,
    pub max_len: usize,
    pub max_jump: usize,
}

impl PgaGen {
    /// Uninterpreted atoms `a`, `b`, `c`, `d`.
    pub fn named() -> Self {
        let atoms: Vec<PgaAtom> = ["a", "b", "c", "d"].iter().map(|s| PgaAtom::Named(s.to_string())).collect();
        PgaGen { tests: atoms.clone(), actions: atoms, complex: false, units: true, max_len: 6, max_jump: 4 }
    }

    /// Atoms over `x` and `y` that can be run: tests on `x=c`, `y<=c` and
    /// `[x:=x+1]T`, actions assigning, testing for effect, and writing.
    pub fn concrete() -> Self {
        let p = |s: &str| match crate::syntax::parse_formula(s).ok().and_then(|f| f.as_primitive()) {
            Some(p) => PgaAtom::Formula(p),
            None => unreachable!("bad template {s}"),
        };
        let tests = vec![p("x=1"), p("x=2"), p("y<=1"), p("[x:=x+1]T"), p("[y:=y-1]T")];
        let actions = vec![
            PgaAtom::Assign(Var::new("x"), Term::monus(Term::var("x"), Term::Num(1))),
            PgaAtom::Assign(Var::new("y"), Term::add(Term::var("y"), Term::Num(1))),
            p("[x:=2]T"),
            PgaAtom::Write("x=2".to_string()),
            PgaAtom::Write("y".to_string()),
        ];
        PgaGen { tests, actions, complex: true, units: true, max_len: 6, max_jump: 4 }
    }
}

/// Test formulas over `atoms`, with `T` now and then.
pub fn gen_pga_formula<R: Rng>(rng: &mut R, atoms: &[PgaAtom], depth: usize) -> PgaFormula {
    if depth == 0 || rng.gen_bool(0.35) {
        if rng.gen_bool(0.05) {
            return PgaFormula::Top;
        }
        return PgaFormula::Atom(atoms.choose(rng).expect("at least one atom").clone());
    }
    let d = depth - 1;
    match rng.gen_range(0..3) {
        0 => PgaFormula::not(gen_pga_formula(rng, atoms, d)),
        1 => PgaFormula::and(gen_pga_formula(rng, atoms, d), gen_pga_formula(rng, atoms, d)),
        _ => PgaFormula::or(gen_pga_formula(rng, atoms, d), gen_pga_formula(rng, atoms, d)),
    }
}

fn pga_instr<R: Rng>(rng: &mut R, cfg: &PgaGen, unit_depth: usize) -> PgaInstr {
    let depth = if cfg.complex { 3 } else { 0 };
    match rng.gen_range(0..10) {
        0 | 1 | 2 => PgaInstr::Basic(cfg.actions.choose(rng).expect("at least one action").clone()),
        3 | 4 => PgaInstr::PosTest(gen_pga_formula(rng, &cfg.tests, depth)),
        5 => PgaInstr::NegTest(gen_pga_formula(rng, &cfg.tests, depth)),
        6 | 7 => PgaInstr::Jump(rng.gen_range(0..=cfg.max_jump)),
        8 if cfg.units && unit_depth > 0 => {
            let n = rng.gen_range(1..=3);
            PgaInstr::Unit((0..n).map(|_| pga_instr(rng, cfg, unit_depth - 1)).collect())
        }
        _ => PgaInstr::Halt,
    }
}

/// Between one and `max_len` instructions.
pub fn gen_pga_instrs<R: Rng>(rng: &mut R, cfg: &PgaGen) -> Vec<PgaInstr> {
    let n = rng.gen_range(1..=cfg.max_len);
    (0..n).map(|_| pga_instr(rng, cfg, 2)).collect()
}

/// A sequence in first canonical shape, with a loop when `looping`.
pub fn gen_pga_seq<R: Rng>(rng: &mut R, cfg: &PgaGen, looping: bool) -> PgaSeq {
    let prefix = if rng.gen_bool(0.3) { Vec::new() } else { gen_pga_instrs(rng, cfg) };
    let repeat = looping.then(|| gen_pga_instrs(rng, cfg));
    if !looping && prefix.is_empty() {
        return PgaSeq::finite(gen_pga_instrs(rng, cfg));
    }
    PgaSeq { prefix, repeat }
}

/// Raw terms with nested concatenation, powers and repetition.
pub fn gen_pga_term<R: Rng>(rng: &mut R, cfg: &PgaGen, depth: usize) -> PgaTerm {
    if depth == 0 || rng.gen_bool(0.3) {
        return PgaTerm::Instr(pga_instr(rng, cfg, 1));
    }
    let d = depth - 1;
    match rng.gen_range(0..4) {
        0 | 1 => PgaTerm::Concat((0..rng.gen_range(2..=3)).map(|_| gen_pga_term(rng, cfg, d)).collect()),
        2 => PgaTerm::Power(Box::new(gen_pga_term(rng, cfg, d)), rng.gen_range(1..=3)),
        _ => PgaTerm::Repeat(Box::new(gen_pga_term(rng, cfg, d))),
    }
}

/// Programs over the whole grammar, including `halt`, instruction-formulas,
/// writes and unguarded stars. Meant for syntax and algebraic laws; runs
/// may fail or exhaust a budget.
pub fn gen_program<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Program {
    program_rec(rng, cfg, cfg.depth)
}

fn program_rec<R: Rng>(rng: &mut R, cfg: &GenConfig, depth: usize) -> Program {
    let small = GenConfig { depth: 2, ..cfg.clone() };
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..12) {
            0..=4 => Program::Assign(cfg.var(rng), gen_term(rng, cfg)),
            5..=7 => Program::Test(gen_formula(rng, &small)),
            8 => Program::Halt,
            9 => Program::Instr(gen_atom(rng, cfg)),
            10 => Program::Write(format!("{}", cfg.var(rng))),
            _ => Program::skip(),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0..=2 => Program::seq(program_rec(rng, cfg, d), program_rec(rng, cfg, d)),
        3 | 4 => Program::union(program_rec(rng, cfg, d), program_rec(rng, cfg, d)),
        _ => Program::star(program_rec(rng, cfg, d.min(1))),
    }
}
