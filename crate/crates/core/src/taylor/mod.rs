//! Explicit and generic Taylor expansions of probabilistic λ-terms, cut to
//! finite supports, and their normal forms.
//!
//! Expansions are infinite sums, so every function here takes a
//! [`TruncationBudget`] and returns exactly the part of the expansion made
//! of terms within the budget: each reported coefficient is the true one.

mod normal;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::resource::multinomial;
use crate::syntax::{Bag, Combination, Resource, Simple, Term};

pub(crate) use normal::hnf_expansion;
pub use normal::{explicit_taylor_nf, explicit_taylor_nf_with, taylor_nf, with_prefix, NormalExpansion};

/// Bounds on the terms kept from an expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruncationBudget {
    pub max_term_size: usize,
    /// Maximal number of elements in any bag.
    pub max_bag_copies: usize,
}

impl TruncationBudget {
    pub fn new(max_term_size: usize, max_bag_copies: usize) -> TruncationBudget {
        TruncationBudget { max_term_size, max_bag_copies }
    }
}

/// How the size bound of a budget is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SizeMeasure {
    /// [`Simple::size`], choice tags included.
    Full,
    /// [`Simple::erased_size`]: choice tags are free, so that erasing a
    /// truncated explicit expansion gives every generic term within the
    /// bound.
    Erased,
}

impl SizeMeasure {
    pub fn of<T: Simple>(self, t: &T) -> usize {
        match self {
            SizeMeasure::Full => t.size(),
            SizeMeasure::Erased => t.erased_size(),
        }
    }

    fn tag_cost(self) -> usize {
        match self {
            SizeMeasure::Full => 1,
            SizeMeasure::Erased => 0,
        }
    }
}

/// A choice-free simple term with the probability of the choices erased
/// from it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ErasedWeight {
    pub term: Resource,
    pub weight: BigRational,
}

/// Removes every choice tag, multiplying `p` for each left tag and
/// `1 - p` for each right tag, bags included.
pub fn erase(sigma: &Resource) -> ErasedWeight {
    let mut weight = BigRational::one();
    let term = erase_into(sigma, &mut weight);
    ErasedWeight { term, weight }
}

fn erase_into(t: &Resource, weight: &mut BigRational) -> Resource {
    match t {
        Resource::Var(_) | Resource::Free(_) => t.clone(),
        Resource::Abs(b) => Resource::abs(erase_into(b, weight)),
        Resource::App(f, bag) => {
            let f = erase_into(f, weight);
            Resource::app(f, bag.iter().map(|u| erase_into(u, weight)).collect())
        }
        Resource::Left(p, b) => {
            *weight *= p.value();
            erase_into(b, weight)
        }
        Resource::Right(p, b) => {
            *weight *= p.complement();
            erase_into(b, weight)
        }
    }
}

/// `Σ S_σ P(σ).⌊σ⌋`.
pub fn erase_combination(s: &Combination<Resource>) -> Combination<Resource> {
    let mut out = Combination::zero();
    for (sigma, c) in s.iter() {
        let e = erase(sigma);
        out.add_term(e.term, c * e.weight);
    }
    out
}

/// Entries of an expansion with their measured size, sorted by size.
pub(crate) type Sized = Vec<(Resource, BigRational, usize)>;

pub(crate) fn sized(c: &Combination<Resource>, measure: SizeMeasure) -> Sized {
    let mut v: Sized = c.iter().map(|(t, k)| (t.clone(), k.clone(), measure.of(t))).collect();
    v.sort_by_key(|e| e.2);
    v
}

/// Every bag over `elems` with at most `copies` elements and total size at
/// most `budget`, with coefficient `Π cᵢ^kᵢ / kᵢ!` (the bag's coefficient
/// in the exponential).
pub(crate) fn bags_within(elems: &Sized, budget: usize, copies: usize) -> Vec<(Bag, BigRational, usize)> {
    let usable: Vec<&(Resource, BigRational, usize)> = elems.iter().filter(|e| e.2 <= budget).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    choose_bags(&usable, budget, copies, 0, BigRational::one(), &mut chosen, &mut out);
    out
}

fn choose_bags(
    rest: &[&(Resource, BigRational, usize)],
    budget: usize,
    copies: usize,
    used: usize,
    coef: BigRational,
    chosen: &mut Vec<Resource>,
    out: &mut Vec<(Bag, BigRational, usize)>,
) {
    let Some((first, tail)) = rest.split_first() else {
        out.push((Bag::new(chosen.clone()), coef, used));
        return;
    };
    let (t, c, size) = *first;
    let base = chosen.len();
    let mut weight = coef;
    let mut k = 0;
    loop {
        choose_bags(tail, budget, copies, used + k * size, weight.clone(), chosen, out);
        k += 1;
        if chosen.len() >= copies || used + k * size > budget {
            break;
        }
        chosen.push(t.clone());
        weight = weight * c / BigRational::from_integer(BigInt::from(k));
    }
    chosen.truncate(base);
}

fn expand(m: &Term, limit: usize, b: TruncationBudget, measure: SizeMeasure, tagged: bool) -> Combination<Resource> {
    let mut out = Combination::zero();
    if limit == 0 {
        return out;
    }
    match m {
        Term::Var(_) | Term::Free(_) => {
            let v = match m {
                Term::Var(i) => Resource::Var(*i),
                Term::Free(x) => Resource::Free(x.clone()),
                _ => unreachable!(),
            };
            out.add_term(v, BigRational::one());
        }
        Term::Abs(body) => {
            out = expand(body, limit - 1, b, measure, tagged).map(|s| Resource::abs(s.clone()));
        }
        Term::App(f, a) => {
            if limit < 2 {
                return out;
            }
            let heads = sized(&expand(f, limit - 1, b, measure, tagged), measure);
            let Some(smallest) = heads.first().map(|h| h.2) else {
                return out;
            };
            let room = limit - 1 - smallest;
            let args = if room >= 1 { sized(&expand(a, room, b, measure, tagged), measure) } else { Vec::new() };
            for (bag, cb, size_b) in bags_within(&args, room, b.max_bag_copies) {
                for (s, cs, size_s) in &heads {
                    if 1 + size_s + size_b > limit {
                        break;
                    }
                    out.add_term(Resource::app(s.clone(), bag.clone()), cs * &cb);
                }
            }
        }
        Term::Choice(p, l, r) => {
            if tagged {
                let cost = measure.tag_cost();
                if limit < cost + 1 {
                    return out;
                }
                let left = expand(l, limit - cost, b, measure, tagged);
                let right = expand(r, limit - cost, b, measure, tagged);
                out.add(&left.map(|s| Resource::left(p.clone(), s.clone())));
                out.add(&right.map(|s| Resource::right(p.clone(), s.clone())));
            } else {
                out.add_scaled(&expand(l, limit, b, measure, tagged), p.value());
                out.add_scaled(&expand(r, limit, b, measure, tagged), &p.complement());
            }
        }
    }
    out
}

/// The explicit Taylor expansion `T⊕(M)` restricted to simple terms of
/// size at most `b.max_term_size` and bags of at most `b.max_bag_copies`
/// elements.
pub fn explicit_taylor(m: &Term, b: TruncationBudget) -> Combination<Resource> {
    explicit_taylor_with(m, b, SizeMeasure::Full)
}

pub fn explicit_taylor_with(m: &Term, b: TruncationBudget, measure: SizeMeasure) -> Combination<Resource> {
    expand(m, b.max_term_size, b, measure, true)
}

/// The support of [`explicit_taylor`], computed from the inductive clauses
/// alone.
pub fn explicit_taylor_support(m: &Term, b: TruncationBudget) -> BTreeSet<Resource> {
    support(m, b.max_term_size, b.max_bag_copies)
}

fn support(m: &Term, limit: usize, copies: usize) -> BTreeSet<Resource> {
    let mut out = BTreeSet::new();
    if limit == 0 {
        return out;
    }
    match m {
        Term::Var(i) => {
            out.insert(Resource::Var(*i));
        }
        Term::Free(x) => {
            out.insert(Resource::Free(x.clone()));
        }
        Term::Abs(body) => out.extend(support(body, limit - 1, copies).into_iter().map(Resource::abs)),
        Term::Choice(p, l, r) => {
            out.extend(support(l, limit - 1, copies).into_iter().map(|s| Resource::left(p.clone(), s)));
            out.extend(support(r, limit - 1, copies).into_iter().map(|s| Resource::right(p.clone(), s)));
        }
        Term::App(f, a) if limit >= 2 => {
            let heads = support(f, limit - 1, copies);
            let args: Vec<Resource> = support(a, limit - 2, copies).into_iter().collect();
            // all multisets of args, as nondecreasing index sequences
            let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
            while let Some((idx, size)) = stack.pop() {
                let bag = Bag::new(idx.iter().map(|&i| args[i].clone()).collect());
                for s in &heads {
                    if 1 + s.size() + size <= limit {
                        out.insert(Resource::app(s.clone(), bag.clone()));
                    }
                }
                if idx.len() == copies {
                    continue;
                }
                let from = idx.last().copied().unwrap_or(0);
                for (j, t) in args.iter().enumerate().skip(from) {
                    if size + t.size() + 2 <= limit {
                        let mut next = idx.clone();
                        next.push(j);
                        stack.push((next, size + t.size()));
                    }
                }
            }
        }
        Term::App(..) => {}
    }
    out
}

/// The generic Taylor expansion `T(M)`, obtained by erasing the explicit
/// one: the restriction to choice-free terms of size at most
/// `b.max_term_size`.
pub fn generic_taylor(m: &Term, b: TruncationBudget) -> Combination<Resource> {
    erase_combination(&explicit_taylor_with(m, b, SizeMeasure::Erased))
}

/// `T(M)` from its own inductive definition, a choice `M ⊕_p N` expanding
/// to `p.T(M) + (1-p).T(N)`.
pub fn generic_taylor_direct(m: &Term, b: TruncationBudget) -> Combination<Resource> {
    expand(m, b.max_term_size, b, SizeMeasure::Full, false)
}

/// Whether two terms have the same generic Taylor expansion within `b`.
pub fn barycentric_equiv_check(m: &Term, n: &Term, b: TruncationBudget) -> bool {
    generic_taylor(m, b) == generic_taylor(n, b)
}

/// Coefficient `1/m(s)` that every element of an explicit expansion has.
pub fn regular_coefficient(s: &Resource) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(multinomial(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_lambda, parse_resource, parse_term_combination, rat, Prob};

    fn t(src: &str) -> Term {
        parse_lambda(src).unwrap()
    }

    const B: TruncationBudget = TruncationBudget { max_term_size: 8, max_bag_copies: 3 };

    #[test]
    fn variables_and_choices() {
        assert_eq!(explicit_taylor(&t("x"), B), parse_term_combination("1.x").unwrap());
        assert_eq!(explicit_taylor(&t("x (+ 1/2) y"), B), parse_term_combination("1.l{1/2} x + 1.r{1/2} y").unwrap());
        assert_eq!(generic_taylor(&t("x (+ 1/2) y"), B), parse_term_combination("1/2.x + 1/2.y").unwrap());
        assert_eq!(generic_taylor(&t("x (+ 1) y"), B), parse_term_combination("1.x").unwrap());
    }

    #[test]
    fn application_coefficients_are_inverse_multinomials() {
        let e = explicit_taylor(&t("f x"), B);
        assert_eq!(e.coefficient(&parse_resource("f [x, x]").unwrap()), rat(1, 2));
        assert_eq!(e.coefficient(&parse_resource("f [x, x, x]").unwrap()), rat(1, 6));
        assert_eq!(e.coefficient(&parse_resource("f []").unwrap()), rat(1, 1));
        assert!(!e.contains(&parse_resource("f [x, x, x, x]").unwrap()));
        for (s, c) in e.iter() {
            assert_eq!(*c, regular_coefficient(s));
        }
    }

    #[test]
    fn support_clauses_agree_with_expansion() {
        for src in [r"\x. x x", r"Delta (I (+ 1/2) Omega)", r"f (x (+ 1/3) y) z"] {
            let m = t(src);
            let e = explicit_taylor(&m, B);
            let s = explicit_taylor_support(&m, B);
            assert_eq!(e.support().cloned().collect::<BTreeSet<_>>(), s, "{src}");
        }
    }

    #[test]
    fn erasure_weights() {
        let e = erase(&parse_resource("r{1/4} l{1/2} x").unwrap());
        assert_eq!(e.term, Resource::free("x"));
        assert_eq!(e.weight, rat(3, 8));
        assert_eq!(erase(&Resource::free("x")).weight, rat(1, 1));
        let e = erase(&Resource::left(Prob::half(), Resource::free("x")));
        assert_eq!(e.weight, rat(1, 2));
    }

    #[test]
    fn erased_route_matches_direct_definition() {
        for src in [r"f (x (+ 1/3) y)", r"(\x. x x) (a (+ 1/2) b)", r"\z. z ((a (+ 1/4) b) (+ 1/2) z)"] {
            let m = t(src);
            assert_eq!(generic_taylor(&m, B), generic_taylor_direct(&m, B), "{src}");
        }
    }

    #[test]
    fn barycentric_axioms() {
        let b = TruncationBudget::new(7, 3);
        assert!(barycentric_equiv_check(&t("f a (+ 1/3) f a"), &t("f a"), b));
        assert!(barycentric_equiv_check(&t("a (+ 1/3) b"), &t("b (+ 2/3) a"), b));
        assert!(!barycentric_equiv_check(&t("x"), &t("y"), b));
    }
}
