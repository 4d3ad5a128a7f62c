use dlaf::gen::{gen_command, gen_formula, gen_program, GenConfig};
use dlaf::semantics::*;
use dlaf::sos::command_to_program;
use dlaf::syntax::*;
use dlaf::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn p(s: &str) -> Program {
    parse_program(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn val(s: &str) -> Valuation {
    Valuation::parse(s).unwrap()
}

fn lim() -> StepBudget {
    StepBudget::default()
}

#[test]
fn valuation_basics() {
    let g = val("x=1,y=0");
    assert_eq!(g.get("x"), 1);
    assert_eq!(g.get("nothing"), 0);
    // extensional: a stored zero is no binding at all
    assert_eq!(g, val("x=1"));
    assert_eq!(g.with("x", 0), Valuation::new());
    assert_eq!(val("y=2,x=1"), val("x=1,y=2"));
    assert!(Valuation::parse("x=").is_err());
    assert_eq!(Valuation::enumerate(&[Var::new("x"), Var::new("y")], 7).len(), 64);
}

#[test]
fn term_goldens() {
    let any = val("x=5");
    assert_eq!(eval_term(&parse_term("1").unwrap(), &any), 1);
    assert_eq!(eval_term(&parse_term("x+1").unwrap(), &val("x=1")), 2);
    assert_eq!(eval_term(&parse_term("0-5").unwrap(), &any), 0);
    assert_eq!(eval_term(&parse_term("x*x-3").unwrap(), &any), 22);
    assert_eq!(eval_term(&parse_term("x-(x-2)").unwrap(), &any), 2);
}

#[test]
fn holds_goldens() {
    let phi = f("[x:=x+1]T && x=2");
    assert_eq!(holds(&phi, &val("x=1")), (true, val("x=2")));
    assert_eq!(holds(&phi, &val("x=5")), (false, val("x=6")));
    assert_eq!(holds(&Formula::Top, &val("y=3")), (true, val("y=3")));
    // the right operand of || is skipped when the left holds
    assert_eq!(holds(&f("[x:=4]T || [y:=1]T"), &Valuation::new()), (true, val("x=4")));
    // negation is transparent to the state
    assert_eq!(holds(&f("!([x:=4]T)"), &Valuation::new()), (false, val("x=4")));
    // the conditional visits its condition, then one branch
    assert_eq!(holds(&f("[y:=1]T <| x=0 |> [y:=2]T"), &Valuation::new()), (true, val("y=1")));
    assert_eq!(holds(&f("[y:=1]T <| [x:=1]T && x=0 |> [y:=2]T"), &Valuation::new()), (true, val("x=1,y=2")));
}

#[test]
fn extraction_goldens() {
    assert_eq!(extract_programs(&f("x=2"), &Valuation::new()), p("?(T)"));
    assert_eq!(extract_programs(&f("[x:=x+1]T && x=2"), &val("x=1")), p("x:=x+1; ?(T)"));
    assert_eq!(extract_programs(&f("!([x:=6]T)"), &Valuation::new()), p("x:=6"));
    assert_eq!(extract_programs(&f("[x:=6]T || [y:=1]T"), &Valuation::new()), p("x:=6"));
    assert_eq!(extract_programs(&f("x=1 || [y:=1]T"), &Valuation::new()), p("?(T); y:=1"));
}

#[test]
fn run_goldens() {
    let g0 = Valuation::new();
    let running = p("x:=1; ((?([x:=x+1]T && x=2); y:=1) u (?(!([x:=x+1]T && x=2)); y:=2))");
    assert_eq!(run(&running, &g0, lim()).unwrap(), EvalOutcome::Completed(val("x=2,y=1")));
    let looping = p("x:=0; y:=0; (?([x:=x+1]T && x<=2); y:=y+1)*; ?(!([x:=x+1]T && x<=2))");
    assert_eq!(run(&looping, &g0, lim()).unwrap(), EvalOutcome::Completed(val("x=3,y=2")));
    assert_eq!(run(&p("?(T); halt; x:=9"), &val("y=4"), lim()).unwrap(), EvalOutcome::Terminated(val("y=4")));
    assert_eq!(run(&p("?(x=1); y:=1"), &g0, lim()).unwrap(), EvalOutcome::Failed);
    // the left branch is taken when it succeeds
    assert_eq!(run(&p("x:=1 u x:=2"), &g0, lim()).unwrap(), EvalOutcome::Completed(val("x=1")));
    // backtracking into the right branch when the rest fails
    assert_eq!(run(&p("(x:=1 u x:=2); ?(x=2)"), &g0, lim()).unwrap(), EvalOutcome::Completed(val("x=2")));
    // instruction-formulas and writes leave the state alone
    assert_eq!(run(&p("[x:=3]T; x=5; w[hi]"), &g0, lim()).unwrap(), EvalOutcome::Completed(g0.clone()));
}

#[test]
fn divergence_exceeds_the_budget() {
    let err = run(&p("(?(T); ?(T))*; ?(F)"), &Valuation::new(), StepBudget::new(50)).unwrap_err();
    assert_eq!(err, Error::BudgetExceeded { limit: 50 });
}

#[test]
fn expected_run_goldens() {
    let g = val("x=0");
    assert_eq!(
        run_expected(&p("?([x:=1]T)"), &g, ExpectationPolicy::Default, lim()).unwrap(),
        EvalOutcome::Completed(g.clone())
    );
    assert_eq!(
        run_expected(&p("x:=1"), &g, ExpectationPolicy::Default, lim()).unwrap(),
        EvalOutcome::Completed(val("x=1"))
    );
    assert_eq!(
        run_expected(&p("x:=1"), &g, ExpectationPolicy::AssignInert, lim()).unwrap(),
        EvalOutcome::Completed(g.clone())
    );
    // tests are decided by their expected truth
    assert_eq!(
        run_expected(&p("?([x:=x+1]T && x=1)"), &g, ExpectationPolicy::Default, lim()).unwrap(),
        EvalOutcome::Failed
    );
    assert_eq!(ExpectationPolicy::parse("assign-inert"), Some(ExpectationPolicy::AssignInert));
    assert_eq!(ExpectationPolicy::parse("other"), None);
}

#[test]
fn expected_truth_goldens() {
    assert!(holds_expected(&f("[x:=1]T"), &val("x=7")).unwrap());
    assert!(holds_expected(&f("x=2"), &val("x=2")).unwrap());
    assert!(holds_expected(&f("!(x<=1)"), &val("x=5")).unwrap());
    assert!(!holds_expected(&f("!([x:=1]T)"), &val("x=5")).unwrap());
    assert!(matches!(holds_expected(&f("x=1 && x=2"), &val("x=1")), Err(Error::UnsupportedConstruct(_))));
}

#[test]
fn instruction_trace_goldens() {
    let (o, t) = instruction_trace(&p("?(T)"), &Valuation::new(), lim()).unwrap();
    assert_eq!(o, EvalOutcome::Completed(Valuation::new()));
    assert_eq!(t, vec![TraceItem::Formula(Primitive::Top)]);
    let (_, t) = instruction_trace(&p("x:=1; ?(x=1 || [y:=2]T); w[ok]; halt"), &Valuation::new(), lim()).unwrap();
    let shown: Vec<String> = t.iter().map(|i| i.to_string()).collect();
    assert_eq!(shown, ["x:=1", "x=1", "w[ok]", "!"]);
}

fn small() -> StepBudget {
    StepBudget::new(200)
}

fn state(a: u64, b: u64, c: u64) -> Valuation {
    Valuation::from_pairs([("x", a), ("y", b), ("z", c)])
}

/// Truth and final state of a formula by the recursive definition, written
/// out once more without sharing code with the library.
fn reference(x: &Formula, g: &Valuation) -> (bool, Valuation) {
    let num = |t: &Term| reference_term(t, g);
    match x {
        Formula::Top => (true, g.clone()),
        Formula::Bot => (false, g.clone()),
        Formula::Eq(l, r) => (num(l) == num(r), g.clone()),
        Formula::Le(l, r) => (num(l) <= num(r), g.clone()),
        Formula::Assign(v, t) => (true, g.with(v.as_str(), num(t))),
        Formula::Not(y) => {
            let (b, h) = reference(y, g);
            (!b, h)
        }
        Formula::And(l, r) => match reference(l, g) {
            (true, h) => reference(r, &h),
            no => no,
        },
        Formula::Or(l, r) => match reference(l, g) {
            (false, h) => reference(r, &h),
            yes => yes,
        },
        Formula::Cond(t, c, e) => {
            let (b, h) = reference(c, g);
            reference(if b { t } else { e }, &h)
        }
    }
}

fn reference_term(t: &Term, g: &Valuation) -> u64 {
    match t {
        Term::Num(n) => *n,
        Term::Var(v) => g.get(v.as_str()),
        Term::Add(l, r) => reference_term(l, g).saturating_add(reference_term(r, g)),
        Term::Mul(l, r) => reference_term(l, g).saturating_mul(reference_term(r, g)),
        Term::Monus(l, r) => reference_term(l, g).saturating_sub(reference_term(r, g)),
    }
}

proptest! {
    #[test]
    fn holds_matches_reference(seed in any::<u64>(), a in 0u64..8, b in 0u64..8, c in 0u64..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = gen_formula(&mut rng, &GenConfig::default());
        let g = state(a, b, c);
        prop_assert_eq!(holds(&x, &g), reference(&x, &g));
    }

    #[test]
    fn empty_program_is_empty(seed in any::<u64>(), a in 0u64..8, b in 0u64..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = gen_program(&mut rng, &GenConfig::default());
        let g = state(a, b, 0);
        let base = run(&q, &g, small());
        prop_assert_eq!(&run(&Program::seq(q.clone(), Program::skip()), &g, small()), &base);
        prop_assert_eq!(&run(&Program::seq(Program::skip(), q), &g, small()), &base);
    }

    #[test]
    fn concatenation_is_associative(seed in any::<u64>(), a in 0u64..8, b in 0u64..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GenConfig { depth: 3, ..GenConfig::default() };
        let (q, r, s) = (gen_program(&mut rng, &cfg), gen_program(&mut rng, &cfg), gen_program(&mut rng, &cfg));
        let g = state(a, b, 0);
        let left = Program::seq(Program::seq(q.clone(), r.clone()), s.clone());
        let right = Program::seq(q, Program::seq(r, s));
        prop_assert_eq!(run(&left, &g, small()), run(&right, &g, small()));
    }

    #[test]
    fn tests_run_as_formulas(seed in any::<u64>(), a in 0u64..8, b in 0u64..8, c in 0u64..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = gen_formula(&mut rng, &GenConfig::default());
        let g = state(a, b, c);
        let want = match holds(&x, &g) {
            (true, h) => EvalOutcome::Completed(h),
            (false, _) => EvalOutcome::Failed,
        };
        prop_assert_eq!(run(&Program::test(x.clone()), &g, small()).unwrap(), want);
        // and the programs met on the way reach the same state
        if let EvalOutcome::Completed(h) = run(&Program::test(x.clone()), &g, small()).unwrap() {
            prop_assert_eq!(run(&extract_programs(&x, &g), &g, small()).unwrap(), EvalOutcome::Completed(h));
        }
    }

    #[test]
    fn de_morgan_keeps_state(seed in any::<u64>(), a in 0u64..8, b in 0u64..8, c in 0u64..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GenConfig::default();
        let (l, r) = (gen_formula(&mut rng, &cfg), gen_formula(&mut rng, &cfg));
        let g = state(a, b, c);
        let lhs = Formula::not(Formula::and(l.clone(), r.clone()));
        let rhs = Formula::or(Formula::not(l.clone()), Formula::not(r.clone()));
        prop_assert_eq!(holds(&lhs, &g), holds(&rhs, &g));
        let lhs = Formula::not(Formula::or(l.clone(), r.clone()));
        let rhs = Formula::and(Formula::not(l), Formula::not(r));
        prop_assert_eq!(holds(&lhs, &g), holds(&rhs, &g));
    }

    #[test]
    fn expected_equals_actual_without_tests(seed in any::<u64>(), a in 0u64..8, b in 0u64..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GenConfig::default();
        // assignment-only programs from the toy language
        let c = gen_command(&mut rng, &cfg);
        let q = strip_tests(&command_to_program(&c));
        let g = state(a, b, 0);
        prop_assert_eq!(
            run_expected(&q, &g, ExpectationPolicy::Default, small()),
            run(&q, &g, small())
        );
    }
}

/// Keeps only the assignments, in order.
fn strip_tests(q: &Program) -> Program {
    fn go(q: &Program, out: &mut Vec<Program>) {
        match q {
            Program::Assign(..) => out.push(q.clone()),
            Program::Seq(l, r) | Program::Union(l, r) => {
                go(l, out);
                go(r, out);
            }
            Program::Star(b) => go(b, out),
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(q, &mut out);
    Program::seq_all(out)
}
