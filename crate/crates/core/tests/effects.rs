use dlaf::effects::*;
use dlaf::gen::{gen_command, gen_formula, gen_term, GenConfig};
use dlaf::semantics::{holds, run, ExpectationPolicy, StepBudget, Valuation};
use dlaf::sos::command_to_program;
use dlaf::syntax::*;
use dlaf::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn p(s: &str) -> Program {
    parse_program(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn det(s: &str) -> DeterministicProgram {
    DeterministicProgram::new(&p(s)).unwrap()
}

fn val(s: &str) -> Valuation {
    Valuation::parse(s).unwrap()
}

fn set(pairs: &[(&str, u64)]) -> SideEffectSet {
    SideEffectSet::from_pairs(pairs.iter().copied())
}

const DEFAULT: ExpectationPolicy = ExpectationPolicy::Default;
const RUNNING: &str = "x:=1; ((?([x:=x+1]T && x=2); y:=1) u (?(!([x:=x+1]T && x=2)); y:=2))";
const WHILE3: &str = "x:=0; y:=0; (?([x:=x+1]T && x<=3); y:=y+1)*; ?(!([x:=x+1]T && x<=3))";

fn lim() -> StepBudget {
    StepBudget::default()
}

#[test]
fn diff_goldens() {
    let g = val("x=0,y=3");
    assert!(diff(&g, &g).is_empty());
    assert_eq!(diff(&val("x=0"), &val("x=2")), set(&[("x", 2)]));
    assert_eq!(diff(&g, &val("x=0,y=5")), set(&[("y", 5)]));
    // values come from the second argument
    assert_eq!(diff(&val("x=2"), &val("x=0")), set(&[("x", 0)]));
}

#[test]
fn single_instruction_goldens() {
    let g = val("x=0");
    assert!(effects_single(&p("x:=1"), &g, DEFAULT).unwrap().is_empty());
    assert_eq!(effects_single(&p("?([x:=1]T)"), &g, DEFAULT).unwrap(), set(&[("x", 1)]));
    assert!(effects_single(&p("?(x=0)"), &g, DEFAULT).unwrap().is_empty());
    assert_eq!(effects_single(&p("?(!(!([x:=3]T)))"), &g, DEFAULT).unwrap(), set(&[("x", 3)]));
    assert!(effects_single(&p("halt"), &g, DEFAULT).unwrap().is_empty());
    assert!(effects_single(&p("[x:=5]T"), &g, DEFAULT).unwrap().is_empty());
    assert!(effects_single(&p("w[x]"), &g, DEFAULT).unwrap().is_empty());
    assert_eq!(effects_single(&p("x:=1"), &g, ExpectationPolicy::AssignInert).unwrap(), set(&[("x", 1)]));
    // undefined when the test fails, in either reading
    assert!(matches!(effects_single(&p("?(x=1)"), &g, DEFAULT), Err(Error::Undefined(_))));
    assert!(matches!(effects_single(&p("?(!([x:=1]T))"), &g, DEFAULT), Err(Error::Undefined(_))));
    assert!(effects_single(&p("x:=1; x:=2"), &g, DEFAULT).is_err());
}

#[test]
fn test_goldens() {
    let both = effects_test(&f("[x:=x+1]T && [x:=x-1]T"), &val("x=1")).unwrap();
    assert_eq!(both, set(&[("x", 2), ("x", 1)]));
    assert_eq!(both.len(), 2);
    assert!(effects_test(&f("x=2 || [x:=2]T"), &val("x=2")).unwrap().is_empty());
    assert_eq!(effects_test(&f("x=5 || [x:=2]T"), &val("x=0")).unwrap(), set(&[("x", 2)]));
    assert!(matches!(effects_test(&f("x=5 && [x:=2]T"), &val("x=0")), Err(Error::Undefined(_))));
    // negated connectives go through the normal form
    assert_eq!(effects_test(&f("!(x=5 && [x:=2]T)"), &val("x=0")).unwrap(), SideEffectSet::new());
    assert_eq!(effects_test(&f("!(!([y:=1]T) || x=5)"), &val("x=0")).unwrap(), set(&[("y", 1)]));
}

#[test]
fn deterministic_shape() {
    assert!(DeterministicProgram::new(&p(RUNNING)).is_ok());
    assert!(DeterministicProgram::new(&p(WHILE3)).is_ok());
    assert!(DeterministicProgram::new(&p("(?(F); x:=1)*; ?(!(F))")).is_ok());
    // empty branches are allowed
    assert!(DeterministicProgram::new(&p("?(x=1) u ?(!(x=1))")).is_ok());
    for bad in ["x:=1 u x:=2", "(?(x=1); x:=1) u (?(x=2); x:=2)", "(?(x=1); x:=1)*", "(x:=1)*; ?(T)"] {
        assert!(matches!(DeterministicProgram::new(&p(bad)), Err(Error::NotDeterministic(_))), "{bad}");
    }
}

#[test]
fn unfold_goldens() {
    let g = Valuation::new();
    let (n, _) = unfold_star(&det("(?([x:=x+1]T && x<=3); y:=y+1)*; ?(!([x:=x+1]T && x<=3))"), &g, lim()).unwrap();
    assert_eq!(n, 3);
    let (n, c) = unfold_star(&det("(?(F); x:=1)*; ?(!(F))"), &val("x=4"), lim()).unwrap();
    assert_eq!((n, c.to_string()), (0, "[?(!F)]".to_string()));
    let (n, _) = unfold_star(&det("(?([x:=x+1]T && x<=2); y:=y+1)*; ?(!([x:=x+1]T && x<=2))"), &g, lim()).unwrap();
    assert_eq!(n, 2);
    assert!(unfold_star(&det("x:=1"), &g, lim()).is_err());
    assert_eq!(
        unfold_star(&det("(?(T); x:=1)*; ?(!(T))"), &g, StepBudget::new(20)).unwrap_err(),
        Error::BudgetExceeded { limit: 20 }
    );
}

#[test]
fn canonical_goldens() {
    let g = Valuation::new();
    let c = canonicalize(&det(RUNNING), &g, lim()).unwrap();
    assert_eq!(c.instrs, vec![p("x:=1"), p("?([x:=x+1]T && x=2)"), p("y:=1")]);
    let c = canonicalize(&det("x:=1; x:=2"), &val("z=9"), lim()).unwrap();
    assert_eq!(c.instrs, vec![p("x:=1"), p("x:=2")]);
    let phi = "?([x:=x+1]T && x<=3)";
    let c = canonicalize(&det(WHILE3), &g, lim()).unwrap();
    let want: Vec<Program> = ["x:=0", "y:=0", phi, "y:=y+1", phi, "y:=y+1", phi, "y:=y+1", "?(!([x:=x+1]T && x<=3))"]
        .iter()
        .map(|s| p(s))
        .collect();
    assert_eq!(c.instrs, want);
    assert!(matches!(canonicalize(&det("?(x=1)"), &g, lim()), Err(Error::Undefined(_))));
}

#[test]
fn program_goldens() {
    let g = Valuation::new();
    assert_eq!(effects_program(&det(RUNNING), &g, DEFAULT, lim()).unwrap(), set(&[("x", 2)]));
    assert_eq!(
        effects_program(&det(WHILE3), &g, DEFAULT, lim()).unwrap(),
        set(&[("x", 1), ("x", 2), ("x", 3), ("x", 4)])
    );
    assert_eq!(
        effects_program(&det("?([x:=x+1]T); ?([x:=x+1]T)"), &g, DEFAULT, lim()).unwrap(),
        set(&[("x", 1), ("x", 2)])
    );
    assert_eq!(
        effects_program(&det("x:=1"), &val("x=0"), ExpectationPolicy::AssignInert, lim()).unwrap(),
        set(&[("x", 1)])
    );
    assert!(effects_program(&det("?([x:=1]T); halt"), &g, DEFAULT, lim()).unwrap().contains("x", 1));
}

#[test]
fn cancelling_effects_are_both_reported() {
    let g = val("x=3");
    let q = det("?([x:=x+1]T); ?([x:=x-1]T)");
    let r = analyze_effects(&q, &g, DEFAULT, lim()).unwrap();
    assert_eq!(r.effects, set(&[("x", 4), ("x", 3)]));
    assert_eq!(r.outcome, dlaf::semantics::EvalOutcome::Completed(g));
    // the values that were expected instead
    assert_eq!(r.expected, set(&[("x", 3), ("x", 4)]));
}

#[test]
fn trace_keeps_repeats() {
    let e = effects_program(&det("?([x:=1]T); x:=0; ?([x:=1]T)"), &Valuation::new(), DEFAULT, lim()).unwrap();
    assert_eq!(e.len(), 1);
    assert_eq!(e.trace().len(), 2);
    assert_eq!(e.to_string(), "{x->1}");
}

/// Effects of a test computed on the formula itself: negation over a
/// connective flips the truth and keeps the walk.
fn oracle_test(x: &Formula, g: &Valuation, acc: &mut Vec<(String, u64)>) -> (bool, Valuation) {
    match x {
        Formula::And(l, r) => match oracle_test(l, g, acc) {
            (true, h) => oracle_test(r, &h, acc),
            no => no,
        },
        Formula::Or(l, r) => match oracle_test(l, g, acc) {
            (false, h) => oracle_test(r, &h, acc),
            yes => yes,
        },
        Formula::Not(y) if matches!(**y, Formula::And(..) | Formula::Or(..) | Formula::Not(_)) => {
            let (b, h) = oracle_test(y, g, acc);
            (!b, h)
        }
        lit => {
            let (b, h) = holds(lit, g);
            for (k, v) in h.support() {
                if g.get(k.as_str()) != v {
                    acc.push((k.to_string(), v));
                }
            }
            for (k, _) in g.support() {
                if h.get(k.as_str()) == 0 {
                    acc.push((k.to_string(), 0));
                }
            }
            (b, h)
        }
    }
}

/// Straight-line effects: run each instruction from the current state.
fn oracle_program(instrs: &[Program], g: &Valuation, policy: ExpectationPolicy) -> Option<SideEffectSet> {
    let mut acc = Vec::new();
    let mut cur = g.clone();
    for i in instrs {
        match i {
            Program::Assign(v, t) => {
                let k = dlaf::semantics::eval_term(t, &cur);
                if policy == ExpectationPolicy::AssignInert && k != cur.get(v.as_str()) {
                    acc.push((v.to_string(), k));
                }
                cur.set(v, k);
            }
            Program::Test(x) => {
                let (b, h) = oracle_test(x, &cur, &mut acc);
                if !b {
                    return None;
                }
                cur = h;
            }
            _ => {}
        }
    }
    Some(SideEffectSet::from_pairs(acc.iter().map(|(k, v)| (k.as_str(), *v))))
}

fn state(a: u64, b: u64, c: u64) -> Valuation {
    Valuation::from_pairs([("x", a), ("y", b), ("z", c)])
}

fn straight_line(rng: &mut ChaCha8Rng) -> Program {
    let cfg = GenConfig::default();
    let n = rng.gen_range(1..6);
    let parts = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Program::Assign(cfg.var(rng), gen_term(rng, &cfg))
            } else {
                Program::test(gen_formula(rng, &cfg))
            }
        })
        .collect();
    Program::seq_all(parts)
}

fn has_test(q: &Program) -> bool {
    match q {
        Program::Test(_) => true,
        Program::Seq(l, r) | Program::Union(l, r) => has_test(l) || has_test(r),
        Program::Star(b) => has_test(b),
        _ => false,
    }
}

proptest! {
    #[test]
    fn diff_is_asymmetric(a in 0u64..4, b in 0u64..4, c in 0u64..4, d in 0u64..4) {
        let g = Valuation::from_pairs([("x", a), ("y", b)]);
        let h = Valuation::from_pairs([("x", c), ("y", d)]);
        let names = |s: &SideEffectSet| s.entries().map(|(k, _)| k.clone()).collect::<Vec<_>>();
        prop_assert_eq!(names(&diff(&g, &h)), names(&diff(&h, &g)));
        for (k, v) in diff(&g, &h).entries() {
            prop_assert_eq!(v, h.get(k.as_str()));
            prop_assert_ne!(v, g.get(k.as_str()));
        }
    }

    #[test]
    fn single_tests_match_oracle(seed in any::<u64>(), a in 0u64..8, b in 0u64..8, c in 0u64..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = gen_formula(&mut rng, &GenConfig::default());
        let g = state(a, b, c);
        let mut acc = Vec::new();
        let (truth, _) = oracle_test(&x, &g, &mut acc);
        match effects_test(&x, &g) {
            Ok(e) => {
                prop_assert!(truth);
                prop_assert_eq!(e, SideEffectSet::from_pairs(acc.iter().map(|(k, v)| (k.as_str(), *v))));
            }
            Err(err) => {
                prop_assert!(!truth);
                prop_assert!(matches!(err, Error::Undefined(_)));
            }
        }
    }

    #[test]
    fn programs_match_oracle(seed in any::<u64>(), a in 0u64..8, b in 0u64..8, c in 0u64..8, inert in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cmd = gen_command(&mut rng, &GenConfig::default());
        let q = DeterministicProgram::new(&command_to_program(&cmd)).unwrap();
        let g = state(a, b, c);
        let policy = if inert { ExpectationPolicy::AssignInert } else { DEFAULT };
        let Ok(canon) = canonicalize(&q, &g, lim()) else { return Ok(()) };
        let want = oracle_program(&canon.instrs, &g, policy).unwrap();
        prop_assert_eq!(effects_program(&q, &g, policy, lim()).unwrap(), want);
    }

    #[test]
    fn canonical_form_runs_like_the_program(seed in any::<u64>(), a in 0u64..8, b in 0u64..8, c in 0u64..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cmd = gen_command(&mut rng, &GenConfig::default());
        let prog = command_to_program(&cmd);
        let q = DeterministicProgram::new(&prog).unwrap();
        let g = state(a, b, c);
        match canonical_run(&q, &g, lim()) {
            Ok((canon, outcome)) => {
                prop_assert!(canon.instrs.iter().all(|i| !matches!(i, Program::Union(..) | Program::Star(_))));
                prop_assert_eq!(run(&canon.to_program(), &g, lim()).unwrap(), outcome.clone());
                prop_assert_eq!(run(&prog, &g, lim()).unwrap(), outcome);
            }
            Err(Error::Undefined(_)) => {
                prop_assert_eq!(run(&prog, &g, lim()).unwrap(), dlaf::semantics::EvalOutcome::Failed);
            }
            Err(e) => {
                let diverged = matches!(e, Error::BudgetExceeded { .. });
                prop_assert!(diverged);
            }
        }
    }

    #[test]
    fn pure_assignments_have_no_effects(seed in any::<u64>(), a in 0u64..8, b in 0u64..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GenConfig::default();
        let n = rng.gen_range(0..6);
        let parts: Vec<Program> = (0..n).map(|_| Program::Assign(cfg.var(&mut rng), gen_term(&mut rng, &cfg))).collect();
        let q = Program::seq_all(parts);
        prop_assert!(!has_test(&q) || n == 0);
        let d = DeterministicProgram::new(&q).unwrap();
        prop_assert!(effects_program(&d, &state(a, b, 0), DEFAULT, lim()).unwrap().is_empty());
    }

    #[test]
    fn elimination_preserves_effects(seed in any::<u64>(), a in 0u64..8, b in 0u64..8, c in 0u64..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = straight_line(&mut rng);
        let g = state(a, b, c);
        let Ok(before) = effects_program(&DeterministicProgram::new(&q).unwrap(), &g, DEFAULT, lim()) else {
            return Ok(());
        };
        let e = eliminate_connectives(&q).unwrap();
        // nested disjunctions are not in deterministic shape after elimination
        if let Ok(d) = DeterministicProgram::new(&e) {
            prop_assert_eq!(effects_program(&d, &g, DEFAULT, lim()).unwrap(), before, "{}", e);
        }
    }
}

#[test]
fn elimination_check_is_not_vacuous() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for _ in 0..400 {
        let q = straight_line(&mut rng);
        let e = eliminate_connectives(&q).unwrap();
        if e != q && DeterministicProgram::new(&e).is_ok() {
            checked += 1;
        }
    }
    assert!(checked >= 50, "only {checked} programs changed shape and stayed deterministic");
}
