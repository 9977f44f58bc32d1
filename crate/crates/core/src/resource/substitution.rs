use num_bigint::BigInt;
use num_rational::BigRational;

use crate::syntax::{Bag, Combination, Resource, Simple, Symbol};

/// The variable a bag is substituted for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// Loose index `k`. Loose indices above `k` are decremented, as when
    /// the binder of `k` disappears in a β-step.
    Bound(usize),
    Free(Symbol),
}

impl Target {
    fn matches(&self, t: &Resource, depth: usize) -> bool {
        match (self, t) {
            (Target::Bound(k), Resource::Var(i)) => *i == k + depth,
            (Target::Free(x), Resource::Free(y)) => x == y,
            _ => false,
        }
    }
}

/// Number of free occurrences of the target in `t`.
pub fn occurrences(t: &Resource, target: &Target) -> usize {
    count(t, target, 0)
}

fn count(t: &Resource, target: &Target, depth: usize) -> usize {
    match t {
        Resource::Var(_) | Resource::Free(_) => target.matches(t, depth) as usize,
        Resource::Abs(b) => count(b, target, depth + 1),
        Resource::Left(_, b) | Resource::Right(_, b) => count(b, target, depth),
        Resource::App(f, bag) => count(f, target, depth) + count_bag(bag, target, depth),
    }
}

fn count_bag(bag: &Bag, target: &Target, depth: usize) -> usize {
    bag.iter().map(|u| count(u, target, depth)).sum()
}

/// Linear substitution `⟨t̄/x⟩` of a bag for a variable in a simple term.
///
/// Every way of sending the bag's elements, as distinct resources, onto
/// the occurrences of the variable contributes one summand, so the result
/// is 0 unless the bag has exactly as many elements as there are
/// occurrences.
pub fn substitute(sigma: &Resource, bag: &Bag, target: &Target) -> Combination<Resource> {
    if occurrences(sigma, target) != bag.len() {
        return Combination::zero();
    }
    let items: Vec<&Resource> = bag.iter().collect();
    to_combination(subst(sigma, &items, target, 0))
}

/// [`substitute`] on a simple poly-term.
pub fn substitute_in_bag(sigma: &Bag, bag: &Bag, target: &Target) -> Combination<Bag> {
    if count_bag(sigma, target, 0) != bag.len() {
        return Combination::zero();
    }
    let items: Vec<&Resource> = bag.iter().collect();
    let lists = subst_list(sigma.elements(), &items, target, 0);
    to_combination(merge(lists.into_iter().map(|(l, n)| (Bag::new(l), n)).collect()))
}

// Outcomes with the number of assignments producing them. Counts stay
// machine integers until the end: they are bounded by `n!` for a bag of
// `n` elements.
type Outcomes<T> = Vec<(T, u128)>;

fn to_combination<T: Ord + Clone>(outcomes: Outcomes<T>) -> Combination<T> {
    let mut out = Combination::zero();
    for (t, n) in outcomes {
        out.add_term(t, BigRational::from_integer(BigInt::from(n)));
    }
    out
}

fn merge<T: Ord>(mut outcomes: Outcomes<T>) -> Outcomes<T> {
    outcomes.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut out: Outcomes<T> = Vec::with_capacity(outcomes.len());
    for (t, n) in outcomes {
        match out.last_mut() {
            Some((last, m)) if *last == t => *m += n,
            _ => out.push((t, n)),
        }
    }
    out
}

// `items` must have exactly as many elements as `t` has occurrences.
fn subst(t: &Resource, items: &[&Resource], target: &Target, depth: usize) -> Outcomes<Resource> {
    if items.is_empty() {
        let untouched = match target {
            Target::Bound(k) => t.shift(-1, k + depth + 1),
            Target::Free(_) => t.clone(),
        };
        return vec![(untouched, 1)];
    }
    match t {
        Resource::Var(_) | Resource::Free(_) => match items {
            [only] if target.matches(t, depth) => vec![(only.shift(depth as isize, 0), 1)],
            _ => Vec::new(),
        },
        Resource::Abs(b) => map(subst(b, items, target, depth + 1), Resource::abs),
        Resource::Left(p, b) => map(subst(b, items, target, depth), |s| Resource::left(p.clone(), s)),
        Resource::Right(p, b) => map(subst(b, items, target, depth), |s| Resource::right(p.clone(), s)),
        Resource::App(f, bag) => {
            let need = count(f, target, depth);
            let mut out = Vec::new();
            for_each_split(items, need, |mine, rest| {
                let heads = subst(f, mine, target, depth);
                if heads.is_empty() {
                    return;
                }
                let args = subst_list(bag.elements(), rest, target, depth);
                for (h, n) in &heads {
                    for (list, m) in &args {
                        out.push((Resource::app(h.clone(), Bag::new(list.clone())), n * m));
                    }
                }
            });
            merge(out)
        }
    }
}

fn map(outcomes: Outcomes<Resource>, f: impl Fn(Resource) -> Resource) -> Outcomes<Resource> {
    outcomes.into_iter().map(|(s, n)| (f(s), n)).collect()
}

// Substitution into a sequence: each element takes exactly as many items
// as it has occurrences, every allocation of item indices counted once.
fn subst_list(elems: &[Resource], items: &[&Resource], target: &Target, depth: usize) -> Outcomes<Vec<Resource>> {
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(elems.len());
    extend_list(elems, items, target, depth, &mut prefix, 1, &mut out);
    out
}

fn extend_list(
    elems: &[Resource],
    items: &[&Resource],
    target: &Target,
    depth: usize,
    prefix: &mut Vec<Resource>,
    weight: u128,
    out: &mut Outcomes<Vec<Resource>>,
) {
    let Some((first, rest)) = elems.split_first() else {
        if items.is_empty() {
            out.push((prefix.clone(), weight));
        }
        return;
    };
    let need = count(first, target, depth);
    for_each_split(items, need, |mine, others| {
        for (s, n) in subst(first, mine, target, depth) {
            prefix.push(s);
            extend_list(rest, others, target, depth, prefix, weight * n, out);
            prefix.pop();
        }
    });
}

/// Calls `f(chosen, rest)` for every subset of `items` (by position) of
/// size `k`.
fn for_each_split<'a>(items: &[&'a Resource], k: usize, mut f: impl FnMut(&[&'a Resource], &[&'a Resource])) {
    let n = items.len();
    if k > n {
        return;
    }
    if k == 0 || k == n {
        let (all, none): (&[&Resource], &[&Resource]) = if k == 0 { (&[], items) } else { (items, &[]) };
        f(all, none);
        return;
    }
    assert!(n < 64, "bag of {n} elements is too large to split");
    let mut chosen = Vec::with_capacity(k);
    let mut rest = Vec::with_capacity(n - k);
    // masks with k bits set, in increasing order
    let mut mask: u64 = (1 << k) - 1;
    while mask < 1 << n {
        chosen.clear();
        rest.clear();
        for (i, t) in items.iter().enumerate() {
            if mask >> i & 1 == 1 {
                chosen.push(*t);
            } else {
                rest.push(*t);
            }
        }
        f(&chosen, &rest);
        let low = mask & mask.wrapping_neg();
        let ripple = mask + low;
        mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_bag, parse_resource, rat, symbol};

    fn x() -> Target {
        Target::Free(symbol("x"))
    }

    #[test]
    fn two_occurrences_two_outcomes() {
        let r = substitute(&parse_resource("x [x]").unwrap(), &parse_bag("[y, z]").unwrap(), &x());
        assert_eq!(r.len(), 2);
        assert_eq!(r.coefficient(&parse_resource("y [z]").unwrap()), rat(1, 1));
        assert_eq!(r.coefficient(&parse_resource("z [y]").unwrap()), rat(1, 1));
    }

    #[test]
    fn identical_resources_are_still_distinct() {
        let r = substitute_in_bag(&parse_bag("[x, x]").unwrap(), &parse_bag("[y, y]").unwrap(), &x());
        assert_eq!(r.coefficient(&parse_bag("[y, y]").unwrap()), rat(2, 1));
        let r = substitute_in_bag(&parse_bag("[x, x]").unwrap(), &parse_bag("[y, z]").unwrap(), &x());
        assert_eq!(r.coefficient(&parse_bag("[y, z]").unwrap()), rat(2, 1));
    }

    #[test]
    fn arity_mismatch_is_zero() {
        let bag = parse_bag("[y]").unwrap();
        assert!(substitute(&parse_resource("x [x]").unwrap(), &bag, &x()).is_zero());
        // the bound x of \x. x is not the free x
        assert!(substitute(&parse_resource(r"\x. x").unwrap(), &bag, &x()).is_zero());
    }

    #[test]
    fn bound_target_decrements_and_shifts() {
        // body of \a. \b. a [b] [c] with c loose index 1 of the body
        let body = Resource::abs(Resource::app(
            Resource::app(Resource::Var(1), Bag::singleton(Resource::Var(0))),
            Bag::singleton(Resource::Var(2)),
        ));
        let arg = Bag::singleton(Resource::Var(5));
        let r = substitute(&body, &arg, &Target::Bound(0));
        let expected = Resource::abs(Resource::app(
            Resource::app(Resource::Var(6), Bag::singleton(Resource::Var(0))),
            Bag::singleton(Resource::Var(1)),
        ));
        assert_eq!(r, Combination::unit(expected));
    }
}
