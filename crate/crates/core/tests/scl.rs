use dlaf::gen::{gen_cond_formula, gen_formula, GenConfig};
use dlaf::scl::*;
use dlaf::semantics::{holds, Valuation};
use dlaf::syntax::{parse_formula, Formula, Primitive};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ConditionalTerm as C;

fn atom(s: &str) -> ConditionalTerm {
    C::Atom(parse_formula(s).unwrap().as_primitive().unwrap())
}

#[test]
fn expansion_goldens() {
    let a = atom("x=1");
    let b = atom("y<=2");
    assert_eq!(defn_expand(&parse_formula("!(x=1)").unwrap()), C::cond(C::F, a.clone(), C::T));
    assert_eq!(defn_expand(&parse_formula("x=1 && y<=2").unwrap()), C::cond(b.clone(), a.clone(), C::F));
    assert_eq!(defn_expand(&parse_formula("x=1 || y<=2").unwrap()), C::cond(C::T, a, b));
    assert_eq!(defn_expand(&Formula::Top), C::T);
    assert_eq!(defn_expand(&Formula::Bot), C::F);
}

#[test]
fn conditional_evaluation_goldens() {
    let t = C::cond(C::T, atom("[x:=x+1]T"), C::F);
    let g = Valuation::parse("x=0").unwrap();
    assert_eq!(eval_conditional(&t, &g), (true, g.with("x", 1)));
    for k in 0..4 {
        let g = Valuation::parse(&format!("x={k}")).unwrap();
        assert_eq!(eval_conditional(&C::F, &g), (false, g.clone()));
    }
}

#[test]
fn semantic_equality_goldens() {
    let a = atom("[x:=x+1]T");
    let states = state_space(&[&a], STATE_MAX);
    assert_eq!(states.len(), 8);
    let and_false = defn_expand(&Formula::and(parse_formula("[x:=x+1]T").unwrap(), Formula::Bot));
    assert!(!semantically_equal(&and_false, &C::F, &states));
    assert!(semantically_equal(&a, &a, &states));
    let b = atom("y=3");
    let s2 = state_space(&[&a, &b], STATE_MAX);
    assert!(semantically_equal(&C::cond(a.clone(), C::T, b), &a, &s2));
}

#[test]
fn schema_names_round_trip() {
    for s in Schema::ALL {
        assert_eq!(Schema::parse(s.name()).unwrap(), s);
    }
    assert_eq!(Schema::parse("cprp1").unwrap(), Schema::CPrp1);
    assert!(Schema::parse("CP9").is_err());
}

#[test]
fn valid_schemas_hold() {
    for s in Schema::ALL.into_iter().filter(|s| s.expected_valid()) {
        let r = check_schema(s, 300, 7);
        assert!(r.passed, "{s}: {:?}", r.counterexample);
        assert_eq!(r.violations, 0);
    }
}

#[test]
fn cp4_and_cprp1_hold_over_500_trials() {
    assert!(check_schema(Schema::CP4, 500, 11).passed);
    assert!(check_schema(Schema::CPrp1, 500, 11).passed);
}

#[test]
fn invalid_schemas_have_witnesses() {
    for s in [Schema::CPmem, Schema::CPstat, Schema::Contraction, Schema::ContractionAtom] {
        let r = check_schema(s, 500, 3);
        assert!(r.passed, "{s} found no counterexample");
        assert!(r.violations > 0);
        let c = r.counterexample.unwrap();
        assert_ne!(c.lhs_result, c.rhs_result);
    }
}

#[test]
fn contraction_atom_witness_is_an_assignment() {
    let r = check_schema(Schema::ContractionAtom, 500, 5);
    let c = r.counterexample.expect("witness");
    assert!(matches!(c.atom, Some(Primitive::Assign(..))), "{:?}", c.atom);
    // the textbook witness
    let a = parse_formula("[x:=x+1]T").unwrap();
    let l = defn_expand(&Formula::and(a.clone(), a.clone()));
    let states = state_space(&[&l], STATE_MAX);
    assert!(!semantically_equal(&l, &defn_expand(&a), &states));
}

#[test]
fn reports_are_reproducible() {
    let a = check_schema(Schema::CPstat, 200, 42);
    let b = check_schema(Schema::CPstat, 200, 42);
    assert_eq!(a.violations, b.violations);
    assert_eq!(a.counterexample.map(|c| c.trial), b.counterexample.map(|c| c.trial));
}

/// Direct three-valued truth table of a formula at a state, independent of
/// the conditional translation: the reference for expansion.
fn reference(f: &Formula, g: &Valuation) -> (bool, Valuation) {
    match f {
        Formula::Cond(t, c, e) => {
            let (b, h) = reference(c, g);
            reference(if b { t } else { e }, &h)
        }
        Formula::Not(x) => {
            let (b, h) = reference(x, g);
            (!b, h)
        }
        Formula::And(l, r) => {
            let (b, h) = reference(l, g);
            if b { reference(r, &h) } else { (false, h) }
        }
        Formula::Or(l, r) => {
            let (b, h) = reference(l, g);
            if b { (true, h) } else { reference(r, &h) }
        }
        atom => holds(atom, g),
    }
}

proptest! {
    #[test]
    fn expansion_commutes_with_holds(seed in any::<u64>(), x in 0u64..8, y in 0u64..8, z in 0u64..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = gen_cond_formula(&mut rng, &GenConfig::default());
        let g = Valuation::from_pairs([("x", x), ("y", y), ("z", z)]);
        let via = eval_conditional(&defn_expand(&f), &g);
        prop_assert_eq!(&via, &reference(&f, &g));
        if !f.has_cond() {
            prop_assert_eq!(via, holds(&f, &g));
        }
    }

    #[test]
    fn duality_holds(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GenConfig::default();
        let (x, y) = (gen_formula(&mut rng, &cfg), gen_formula(&mut rng, &cfg));
        let l = defn_expand(&Formula::or(x.clone(), y.clone()));
        let r = defn_expand(&Formula::not(Formula::and(Formula::not(x), Formula::not(y))));
        let states = state_space(&[&l, &r], STATE_MAX);
        prop_assert!(semantically_equal(&l, &r, &states));
    }
}
