//! Properties of the naive and grounded engines on random second-order
//! sentences over small digraphs.

use proptest::prelude::*;
use somc::corpus::Corpus;
use somc::eval::{eval_grounded, eval_naive, eval_naive_ordered, ground, Budget, Environment, Order};
use somc::logic::Formula;
use somc::structures::FiniteStructure;

fn instance(seed: u64) -> (Formula, FiniteStructure) {
    let mut c = Corpus::new(seed);
    let f = c.so_sentence(2);
    let n = 1 + (seed % 3) as usize;
    (f, c.digraph(n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engines_agree(seed in any::<u64>()) {
        let (f, s) = instance(seed);
        let budget = Budget::default();
        if let (Ok(a), Ok(b)) = (eval_naive(&s, &f, &Environment::new(), budget), eval_grounded(&s, &f, budget)) {
            prop_assert_eq!(a, b, "{}", f);
        }
    }

    #[test]
    fn negation_flips_the_verdict(seed in any::<u64>()) {
        let (f, s) = instance(seed);
        let budget = Budget::default();
        let env = Environment::new();
        if let (Ok(a), Ok(b)) = (eval_naive(&s, &f, &env, budget), eval_naive(&s, &Formula::not(f.clone()), &env, budget)) {
            prop_assert_eq!(a, !b);
        }
        if let (Ok(a), Ok(b)) = (eval_grounded(&s, &f, budget), eval_grounded(&s, &Formula::not(f.clone()), budget)) {
            prop_assert_eq!(a, !b);
        }
    }

    #[test]
    fn enumeration_order_is_irrelevant(seed in any::<u64>()) {
        let (f, s) = instance(seed);
        let env = Environment::new();
        let budget = Budget::default();
        let forward = eval_naive_ordered(&s, &f, &env, budget, Order::Forward);
        let reverse = eval_naive_ordered(&s, &f, &env, budget, Order::Reverse);
        if let (Ok(a), Ok(b)) = (forward, reverse) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn larger_budgets_keep_the_verdict(seed in any::<u64>(), small in 1u64..200) {
        let (f, s) = instance(seed);
        let env = Environment::new();
        if let Ok(v) = eval_naive(&s, &f, &env, Budget::with_candidates(small)) {
            prop_assert_eq!(eval_naive(&s, &f, &env, Budget::with_candidates(small * 4)), Ok(v));
            prop_assert_eq!(eval_naive(&s, &f, &env, Budget::default()), Ok(v));
        }
    }

    #[test]
    fn grounding_is_deterministic(seed in any::<u64>()) {
        let (f, s) = instance(seed);
        let a = ground(&s, &f, Budget::default());
        let b = ground(&s, &f, Budget::default());
        prop_assert_eq!(a.map(|g| g.to_string()).ok(), b.map(|g| g.to_string()).ok());
    }
}

#[test]
fn tiny_budgets_report_exhaustion() {
    let mut c = Corpus::new(11);
    let s = c.digraph(3);
    let f = somc::library::regular();
    let e = eval_naive(&s, &f, &Environment::new(), Budget::with_candidates(1)).unwrap_err();
    assert!(e.is_budget_exceeded(), "{e}");
}
