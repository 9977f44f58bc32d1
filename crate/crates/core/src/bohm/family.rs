//! Decomposition of an arbitrary Böhm test into resource tests whose
//! success probabilities sum to its own.
//!
//! `ω` at head-normal-form level passes on every head normal form, so it is
//! replaced by one shape test `(λx₁…xₙ.y)(ω, …, ω)` per possible shape.
//! There are infinitely many shapes; the budget bounds `n`, `m` and the
//! alphabet of free heads, so partial sums approach the probability from
//! below as the budget grows.

use super::testing::{HnfTest, TermTest};
use crate::syntax::{HeadVar, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyBudget {
    pub max_binders: usize,
    pub max_args: usize,
    /// Free variables allowed as heads; bound heads are always included.
    pub free_heads: Vec<Symbol>,
}

impl FamilyBudget {
    pub fn new(max_binders: usize, max_args: usize, free_heads: Vec<Symbol>) -> FamilyBudget {
        FamilyBudget { max_binders, max_args, free_heads }
    }
}

/// The resource tests `(Tᵢ)` with `Σᵢ Pr(Tᵢ, M) = Pr(T, M)` within the
/// budget, enumerated by growing shape size.
pub fn btt_to_rbtt_family(test: &TermTest, budget: &FamilyBudget) -> impl Iterator<Item = TermTest> {
    term_family(test, budget, 0).into_iter()
}

fn term_family(test: &TermTest, budget: &FamilyBudget, scope: usize) -> Vec<TermTest> {
    match test {
        TermTest::Omega => vec![TermTest::Omega],
        TermTest::And(a, b) => diagonal(&term_family(a, budget, scope), &term_family(b, budget, scope), |x, y| {
            Some(TermTest::and(x.clone(), y.clone()))
        }),
        TermTest::Ev(t) => hnf_family(t, budget, scope).into_iter().map(TermTest::ev).collect(),
    }
}

fn hnf_family(test: &HnfTest, budget: &FamilyBudget, scope: usize) -> Vec<HnfTest> {
    match test {
        HnfTest::Omega => shapes(budget, scope),
        HnfTest::And(a, b) => diagonal(&hnf_family(a, budget, scope), &hnf_family(b, budget, scope), merge),
        HnfTest::Head { binders, head, args } => {
            let inner = scope + binders;
            let mut acc: Vec<Vec<TermTest>> = vec![Vec::new()];
            for arg in args {
                let fam = term_family(arg, budget, inner);
                acc = diagonal(&acc, &fam, |prefix, t| {
                    let mut v = prefix.clone();
                    v.push(t.clone());
                    Some(v)
                });
            }
            acc.into_iter().map(|args| HnfTest::head(*binders, head.clone(), args)).collect()
        }
    }
}

/// Every shape `(λx⃗.y)(ω…ω)` within the budget, smallest `n + m` first.
fn shapes(budget: &FamilyBudget, scope: usize) -> Vec<HnfTest> {
    let mut out = Vec::new();
    for total in 0..=budget.max_binders + budget.max_args {
        for n in 0..=total.min(budget.max_binders) {
            let m = total - n;
            if m > budget.max_args {
                continue;
            }
            let heads = (0..scope + n).map(HeadVar::Bound).chain(budget.free_heads.iter().cloned().map(HeadVar::Free));
            for y in heads {
                out.push(HnfTest::head(n, y, vec![TermTest::Omega; m]));
            }
        }
    }
    out
}

/// `t ∧ u` for two shape tests: the argument tests are conjoined position
/// by position when the shapes agree; otherwise nothing passes both.
fn merge(a: &HnfTest, b: &HnfTest) -> Option<HnfTest> {
    match (a, b) {
        (HnfTest::Head { binders: n, head: y, args: xs }, HnfTest::Head { binders: n2, head: y2, args: ys })
            if n == n2 && y == y2 && xs.len() == ys.len() =>
        {
            let args = xs.iter().zip(ys).map(|(x, y)| TermTest::and(x.clone(), y.clone()).normalized()).collect();
            Some(HnfTest::head(*n, y.clone(), args))
        }
        _ => None,
    }
}

/// All combinations of one element from each side, ordered by the sum of
/// their positions so that neither side is exhausted first.
fn diagonal<A, B, C>(xs: &[A], ys: &[B], mut combine: impl FnMut(&A, &B) -> Option<C>) -> Vec<C> {
    let mut out = Vec::new();
    if xs.is_empty() || ys.is_empty() {
        return out;
    }
    for d in 0..xs.len() + ys.len() - 1 {
        let lo = d.saturating_sub(ys.len() - 1);
        for i in lo..=d.min(xs.len() - 1) {
            if let Some(c) = combine(&xs[i], &ys[d - i]) {
                out.push(c);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohm::{eval_btt, parse_btt};
    use crate::operational::convergence_prob;
    use crate::syntax::{parse_lambda, symbol};
    use num_rational::BigRational;
    use num_traits::Zero;

    fn budget() -> FamilyBudget {
        FamilyBudget::new(2, 2, vec![symbol("x"), symbol("y")])
    }

    #[test]
    fn omega_is_its_own_family() {
        let fam: Vec<_> = btt_to_rbtt_family(&TermTest::Omega, &budget()).collect();
        assert_eq!(fam, vec![TermTest::Omega]);
    }

    #[test]
    fn clashing_heads_give_nothing() {
        let t = parse_btt(r"ev((\a. a)() & (\a b. a)())").unwrap();
        assert_eq!(btt_to_rbtt_family(&t, &budget()).count(), 0);
        let t = parse_btt(r"ev(x() & y())").unwrap();
        assert_eq!(btt_to_rbtt_family(&t, &budget()).count(), 0);
    }

    #[test]
    fn members_are_resource_tests() {
        let t = parse_btt(r"ev(w) & ev((\a. a)(ev(w & x(w))))").unwrap();
        let fam: Vec<_> = btt_to_rbtt_family(&t, &budget()).collect();
        assert!(!fam.is_empty());
        assert!(fam.iter().all(TermTest::is_resource));
    }

    #[test]
    fn convergence_is_split_by_shape() {
        for src in [r"x (+ 1/3) \z. z", r"Delta (I (+ 1/2) Omega)", r"(\z. y z z) (+ 1/4) Omega"] {
            let m = parse_lambda(src).unwrap();
            let test = parse_btt("ev(w)").unwrap();
            let total = btt_to_rbtt_family(&test, &budget())
                .map(|t| eval_btt(&t, &m, 10).lower)
                .fold(BigRational::zero(), |a, b| a + b);
            assert_eq!(total, convergence_prob(&m, 10).0, "{src}");
        }
    }
}
