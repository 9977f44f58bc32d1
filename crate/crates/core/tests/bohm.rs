mod common;

use num_rational::BigRational;
use num_traits::{One, Zero};
use probtaylor::bohm::{
    approximants_compatible, btt_to_rbtt_family, eval_btt, parse_btt, polyterm_to_rbtt, pt_approximant, rbht_to_term,
    rbtt_to_polyterm, term_to_rbht, FamilyBudget, HnfTest, TermTest,
};
use probtaylor::resource::is_normal;
use probtaylor::syntax::{symbol, Bag, HeadVar, Resource, Term};
use proptest::prelude::*;
use rand::Rng;

fn random_term(rng: &mut impl Rng) -> Term {
    let size = rng.gen_range(1..=8);
    common::term(rng, size, 0, &["x", "y"])
}

/// A random Böhm test over the heads `x`, `y` and the bound variables in
/// scope, with `ω` and conjunctions at both levels.
fn random_test(rng: &mut impl Rng, depth: usize, scope: usize) -> TermTest {
    match rng.gen_range(0..6) {
        0 => TermTest::Omega,
        1 if depth > 0 => TermTest::and(random_test(rng, depth - 1, scope), random_test(rng, depth - 1, scope)),
        _ => TermTest::ev(random_hnf_test(rng, depth, scope)),
    }
}

fn random_hnf_test(rng: &mut impl Rng, depth: usize, scope: usize) -> HnfTest {
    if rng.gen_bool(0.2) {
        return HnfTest::Omega;
    }
    let binders = rng.gen_range(0..=1);
    let inner = scope + binders;
    let head = if inner > 0 && rng.gen_bool(0.5) {
        HeadVar::Bound(rng.gen_range(0..inner))
    } else {
        HeadVar::Free(symbol(["x", "y"][rng.gen_range(0..2)]))
    };
    let arity = if depth == 0 { 0 } else { rng.gen_range(0..=2) };
    let args = (0..arity).map(|_| random_test(rng, depth - 1, inner)).collect();
    HnfTest::head(binders, head, args)
}

fn normal_resource(rng: &mut impl Rng) -> Resource {
    loop {
        let size = rng.gen_range(1..=9);
        let s = common::resource(rng, size, 0, &["x", "y"], false);
        if is_normal(&s) {
            return s;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn test_intervals_narrow_with_fuel(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let m = random_term(&mut rng);
        let t = random_test(&mut rng, 2, 0);
        let low = eval_btt(&t, &m, 2);
        let high = eval_btt(&t, &m, 12);
        prop_assert!(BigRational::zero() <= high.lower && high.upper <= BigRational::one());
        prop_assert!(low.lower <= high.lower && high.upper <= low.upper, "{} on {}: {} then {}", t, m, low, high);
    }

    #[test]
    fn tests_print_and_parse_back(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let t = random_test(&mut rng, 3, 0);
        prop_assert_eq!(parse_btt(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn normal_terms_and_resource_tests_correspond(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let s = normal_resource(&mut rng);
        let test = term_to_rbht(&s).unwrap();
        prop_assert_eq!(rbht_to_term(&test).unwrap(), s.clone());
        let bag = Bag::new(vec![s.clone(), normal_resource(&mut rng)]);
        let t = polyterm_to_rbtt(&bag).unwrap();
        prop_assert!(t.is_resource());
        prop_assert_eq!(rbtt_to_polyterm(&t).unwrap(), bag);
    }

    #[test]
    fn a_family_never_exceeds_its_test(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let m = random_term(&mut rng);
        let t = random_test(&mut rng, 2, 0);
        let budget = FamilyBudget::new(2, 2, vec![symbol("x"), symbol("y")]);
        let mut sum = BigRational::zero();
        for member in btt_to_rbtt_family(&t, &budget) {
            prop_assert!(member.is_resource());
            sum += eval_btt(&member, &m, 10).lower;
        }
        prop_assert!(sum <= eval_btt(&t, &m, 10).lower, "{} on {}", t, m);
    }

    #[test]
    fn approximants_are_subdistributions(seed in any::<u64>(), depth in 1usize..4) {
        let mut rng = common::rng(seed);
        let m = random_term(&mut rng);
        let a = pt_approximant(&m, depth, 6);
        prop_assert!(a.mass() + a.uncertainty() <= BigRational::one() || a.uncertainty() <= BigRational::one());
        prop_assert!(a.mass() <= BigRational::one());
        prop_assert!(approximants_compatible(&a, &pt_approximant(&m, depth, 14)), "{}", m);
    }

    #[test]
    fn commuted_choices_have_the_same_approximants(seed in any::<u64>(), depth in 1usize..4) {
        let mut rng = common::rng(seed);
        let (m, n) = (random_term(&mut rng), random_term(&mut rng));
        let p = common::prob(&mut rng);
        let a = pt_approximant(&Term::choice(p.clone(), m.clone(), n.clone()), depth, 10);
        let b = pt_approximant(&Term::choice(p.complement_prob(), n, m), depth, 10);
        prop_assert_eq!(a, b);
    }
}
