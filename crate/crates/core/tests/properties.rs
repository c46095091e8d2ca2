mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_formula, random_structure, ATOMS, STANDPOINTS};
use standpoint::ast::{desugar, nnf, subformulas, Formula, StandpointExpr};
use standpoint::fosl::{
    fo_ssnf, fo_translate, is_sentential, parse_fo_formula, FoFormula,
};
use standpoint::frontend::{parse_formula, parse_structure, print_formula, print_structure};
use standpoint::reasoner::{decide, prepare, DecideConfig};
use standpoint::sat::{emit_dimacs, parse_dimacs, solve, to_cnf, Assignment, CnfFormula, SolveResult};
use standpoint::semantics::{eval, eval_global, sat_oracle, sigma_eval, Mode, OracleConfig, Structure};
use standpoint::ssnf::{conjuncts, modal_depth, ssnf};
use standpoint::translate::{encode_model, trans, Vocabulary};

/// Growth factor allowed between a formula and its normal form, in subformulas.
const SSNF_SIZE_FACTOR: usize = 6;
/// Growth factor allowed by desugaring, in subformulas.
const DESUGAR_SIZE_FACTOR: usize = 3;

fn formula(nodes: usize) -> impl Strategy<Value = Formula> {
    (any::<u64>(), 1..=nodes).prop_map(|(seed, n)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_formula(&mut rng, &ATOMS, &STANDPOINTS, n)
    })
}

fn formula_and_structure(nodes: usize, max_pi: usize) -> impl Strategy<Value = (Formula, Structure)> {
    (any::<u64>(), 1..=nodes, 1..=max_pi).prop_map(|(seed, n, k)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_formula(&mut rng, &ATOMS, &STANDPOINTS, n);
        let m = random_structure(&mut rng, &ATOMS, &STANDPOINTS, k);
        (f, m)
    })
}

fn agrees_everywhere(m: &Structure, a: &Formula, b: &Formula) -> bool {
    (0..m.len()).all(|pi| eval(m, pi, a).unwrap() == eval(m, pi, b).unwrap())
}

fn cnf(num_vars: u32, clauses: Vec<Vec<i32>>) -> CnfFormula {
    CnfFormula {
        num_vars,
        clauses,
        ..Default::default()
    }
}

fn clauses(vars: u32) -> impl Strategy<Value = Vec<Vec<i32>>> {
    let lit = (1..=vars as i32, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
    prop::collection::vec(prop::collection::vec(lit, 0..=3), 0..=8)
}

fn brute_force(c: &CnfFormula) -> bool {
    (0..1u32 << c.num_vars).any(|bits| {
        let a = Assignment::from_values((0..c.num_vars).map(|v| bits >> v & 1 == 1).collect());
        a.satisfies(c)
    })
}

fn oracle(f: &Formula, mode: Mode) -> bool {
    let config = OracleConfig {
        mode,
        ..Default::default()
    };
    sat_oracle(f, &config).unwrap().is_some()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_parse_round_trip(f in formula(20)) {
        let text = print_formula(&f);
        prop_assert_eq!(parse_formula(&text).unwrap(), f);
    }

    #[test]
    fn desugar_is_idempotent_and_bounded(f in formula(20), lower in any::<bool>()) {
        let once = desugar(&f, lower);
        prop_assert_eq!(desugar(&once, lower), once.clone());
        prop_assert!(once.size() <= DESUGAR_SIZE_FACTOR * f.size());
    }

    #[test]
    fn desugar_and_nnf_preserve_truth((f, m) in formula_and_structure(20, 4)) {
        prop_assert!(agrees_everywhere(&m, &f, &desugar(&f, false)));
        prop_assert!(agrees_everywhere(&m, &f, &desugar(&f, true)));
        prop_assert!(agrees_everywhere(&m, &f, &nnf(&f)));
    }

    #[test]
    fn subformulas_precede_their_parents(f in formula(25)) {
        let index = subformulas(&f);
        prop_assert_eq!(index.get(index.root()), &f);
        let distinct: BTreeSet<_> = index.entries().iter().collect();
        prop_assert_eq!(distinct.len(), index.len());
        for (i, _) in index.iter() {
            for &c in index.children(i) {
                prop_assert!(c < i);
            }
        }
    }

    #[test]
    fn box_and_diamond_are_dual((f, m) in formula_and_structure(10, 4), pick in 0..3usize) {
        let e = [StandpointExpr::Star, StandpointExpr::named("s"), StandpointExpr::named("t")][pick].clone();
        let diamond = Formula::diamond(e.clone(), f.clone());
        let dual = Formula::not(Formula::boxed(e, Formula::not(f)));
        prop_assert!(agrees_everywhere(&m, &diamond, &dual));
    }

    #[test]
    fn empty_standpoints_make_boxes_vacuous((f, m) in formula_and_structure(10, 4)) {
        let empty = StandpointExpr::diff(StandpointExpr::named("s"), StandpointExpr::named("s"));
        prop_assert!(sigma_eval(&m, &empty).is_empty());
        prop_assert!(eval_global(&m, &Formula::boxed(empty.clone(), f.clone())));
        prop_assert!(!eval_global(&m, &Formula::diamond(empty, f)) || m.is_empty());
    }

    #[test]
    fn modal_formulas_do_not_depend_on_the_precisification((f, m) in formula_and_structure(10, 4), pick in 0..3usize) {
        let e = [StandpointExpr::Star, StandpointExpr::named("s"), StandpointExpr::named("t")][pick].clone();
        let g = Formula::boxed(e, f);
        let first = eval(&m, 0, &g).unwrap();
        for pi in 0..m.len() {
            prop_assert_eq!(eval(&m, pi, &g).unwrap(), first);
        }
    }

    #[test]
    fn ssnf_is_flat_and_linear(f in formula(30)) {
        let g = ssnf(&f);
        prop_assert!(modal_depth(&g) <= 1);
        prop_assert!(g.size() <= SSNF_SIZE_FACTOR * f.size());
    }

    #[test]
    fn ssnf_of_nnf_uses_positive_definitions(f in formula(20)) {
        let g = ssnf(&nnf(&f));
        for def in conjuncts(&g).into_iter().skip(1) {
            match def {
                Formula::Implies(label, _) => {
                    prop_assert!(matches!(&**label, Formula::Atom(a) if a.starts_with("_def_")));
                }
                other => prop_assert!(false, "unexpected conjunct {}", print_formula(other)),
            }
        }
    }

    #[test]
    fn ssnf_is_equisatisfiable(f in formula(6)) {
        for mode in [Mode::Global, Mode::Local] {
            let expected = oracle(&f, mode);
            // local satisfiability is global satisfiability of the wrapped goal
            let goal = prepare(&f, &DecideConfig { mode, ..Default::default() });
            let config = DecideConfig {
                normalize: false,
                // models of the goal over |Sub(goal)| precisifications extend to the labels
                precisifications: Some(goal.size()),
                ..Default::default()
            };
            let via_pipeline = decide(&ssnf(&goal), &config).unwrap().is_sat();
            prop_assert_eq!(via_pipeline, expected, "{} in {:?}", print_formula(&f), mode);
        }
    }

    #[test]
    fn translation_matches_the_semantics((f, m) in formula_and_structure(15, 5)) {
        let n = m.len();
        let vocab = Vocabulary::of(&f, n);
        let v = encode_model(&m, &vocab).unwrap();
        for pi in 0..n {
            prop_assert_eq!(trans(pi, &f, n).eval(&v), eval(&m, pi, &f).unwrap());
        }
    }

    #[test]
    fn solver_agrees_with_truth_tables(cs in clauses(4)) {
        let c = cnf(4, cs);
        let result = solve(&c).unwrap();
        prop_assert_eq!(result.is_sat(), brute_force(&c));
        if let SolveResult::Sat(a) = &result {
            prop_assert!(a.satisfies(&c));
        }
        prop_assert_eq!(solve(&c).unwrap(), result);
    }

    #[test]
    fn dimacs_round_trip(cs in clauses(5)) {
        let c = cnf(5, cs);
        let back = parse_dimacs(&emit_dimacs(&c)).unwrap();
        prop_assert_eq!(back.num_vars, c.num_vars);
        prop_assert_eq!(back.clauses, c.clauses);
    }

    #[test]
    fn tseitin_preserves_satisfiability(f in formula(12)) {
        let g = desugar(&f, false);
        let translated = trans(0, &g, 3);
        let c = to_cnf(&translated);
        let sat = solve(&c).unwrap();
        if let SolveResult::Sat(a) = sat {
            prop_assert!(translated.eval(&c.valuation(&a)));
        }
    }

    #[test]
    fn structure_json_round_trip((_, m) in formula_and_structure(1, 6)) {
        prop_assert_eq!(parse_structure(&print_structure(&m)).unwrap(), m);
    }
}

fn fo_formula(depth: u32) -> impl Strategy<Value = FoFormula> {
    let leaf = prop_oneof![
        Just("P(a)"),
        Just("P(x)"),
        Just("R(x, a)"),
        Just("Q"),
        Just("(s <= *)"),
    ]
    .prop_map(|t| parse_fo_formula(t).unwrap());
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(FoFormula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| FoFormula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| FoFormula::or(l, r)),
            inner.clone().prop_map(|f| FoFormula::forall("x", f)),
            inner.clone().prop_map(|f| FoFormula::exists("x", f)),
            inner.clone().prop_map(|f| FoFormula::boxed(StandpointExpr::named("s"), f)),
            inner.prop_map(|f| FoFormula::diamond(StandpointExpr::Star, f)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fo_ssnf_keeps_sentential_formulas_sentential(f in fo_formula(4)) {
        if is_sentential(&f).is_accepted() {
            let g = fo_ssnf(&f).unwrap();
            prop_assert!(is_sentential(&g).is_accepted());
        }
    }

    #[test]
    fn fo_translation_removes_every_modality(f in fo_formula(4)) {
        if is_sentential(&f).is_accepted() && f.is_closed() {
            if let Ok(g) = fo_ssnf(&f) {
                let t = fo_translate(&g, Some(3)).unwrap();
                prop_assert!(t.formula.is_modality_free());
            }
        }
    }
}
