mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use probtaylor::resource::{is_regular, is_uniform, multinomial};
use probtaylor::syntax::{Resource, Simple, Term};
use probtaylor::taylor::{
    barycentric_equiv_check, explicit_taylor, generic_taylor, generic_taylor_direct, taylor_nf, TruncationBudget,
};
use proptest::prelude::*;
use rand::Rng;

fn random_term(seed: u64) -> Term {
    let mut rng = common::rng(seed);
    let size = rng.gen_range(1..=7);
    common::term(&mut rng, size, 0, &["x", "y"])
}

fn widest_bag(s: &Resource) -> usize {
    match s {
        Resource::Var(_) | Resource::Free(_) => 0,
        Resource::Abs(t) | Resource::Left(_, t) | Resource::Right(_, t) => widest_bag(t),
        Resource::App(f, bag) => widest_bag(f).max(bag.len()).max(bag.iter().map(widest_bag).max().unwrap_or(0)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn erasing_the_explicit_expansion_gives_the_generic_one(seed in any::<u64>()) {
        let m = random_term(seed);
        let b = TruncationBudget::new(8, 3);
        prop_assert_eq!(generic_taylor(&m, b), generic_taylor_direct(&m, b));
    }

    #[test]
    fn explicit_expansions_are_uniform_and_regular(seed in any::<u64>()) {
        let m = random_term(seed);
        let e = explicit_taylor(&m, TruncationBudget::new(9, 3));
        prop_assert!(is_uniform(&e));
        prop_assert!(is_regular(&e));
    }

    #[test]
    fn a_smaller_budget_is_a_restriction(seed in any::<u64>()) {
        let m = random_term(seed);
        let (small, big) = (TruncationBudget::new(6, 2), TruncationBudget::new(9, 3));
        let restricted = explicit_taylor(&m, big).filter(|s| s.size() <= 6 && widest_bag(s) <= 2);
        prop_assert_eq!(explicit_taylor(&m, small), restricted);
    }

    #[test]
    fn normal_form_bounds_tighten_with_fuel(seed in any::<u64>()) {
        let m = random_term(seed);
        let b = TruncationBudget::new(8, 2);
        let low = taylor_nf(&m, b, 3);
        let high = taylor_nf(&m, b, 12);
        prop_assert!(high.residual <= low.residual);
        for (s, c) in low.terms.iter() {
            prop_assert!(c <= &high.terms.coefficient(s), "{} at {}", m, s);
        }
        for (s, c) in high.terms.iter() {
            // the probability of producing s is at most one
            let scaled = c * BigRational::from_integer(BigInt::from(multinomial(s)));
            prop_assert!(scaled <= BigRational::one(), "{} at {}", m, s);
            prop_assert!(s.is_choice_free());
        }
    }

    #[test]
    fn commuted_choices_have_the_same_generic_expansion(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let m = common::term(&mut rng, 4, 0, &["x", "y"]);
        let n = common::term(&mut rng, 4, 0, &["x", "y"]);
        let p = common::prob(&mut rng);
        let a = Term::choice(p.clone(), m.clone(), n.clone());
        let b = Term::choice(p.complement_prob(), n, m);
        prop_assert!(barycentric_equiv_check(&a, &b, TruncationBudget::new(9, 3)));
    }
}
