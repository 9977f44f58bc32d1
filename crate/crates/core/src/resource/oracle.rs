//! Brute-force substitution: sum over every permutation of the bag,
//! filling the occurrences of the variable from left to right. Exponential,
//! meant as an independent reference for [`super::substitute`].

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;

use super::substitution::Target;
use crate::syntax::{Bag, Combination, Resource};

pub fn substitute_oracle(sigma: &Resource, bag: &Bag, target: &Target) -> Combination<Resource> {
    let n = bag.len();
    if holes(sigma, target, 0) != n {
        return Combination::zero();
    }
    let items = bag.elements();
    let mut counts: BTreeMap<Resource, u64> = BTreeMap::new();
    for perm in (0..n).permutations(n) {
        let mut queue = perm.iter().map(|&i| &items[i]);
        *counts.entry(fill(sigma, target, 0, &mut queue)).or_default() += 1;
    }
    let mut out = Combination::zero();
    for (u, k) in counts {
        out.add_term(u, BigRational::from_integer(BigInt::from(k)));
    }
    out
}

/// Oracle on a simple poly-term, through a dummy application head.
pub fn substitute_in_bag_oracle(sigma: &Bag, bag: &Bag, target: &Target) -> Combination<Bag> {
    let dummy = Resource::app(Resource::free("\u{0}"), sigma.clone());
    substitute_oracle(&dummy, bag, target).map(|t| match t {
        Resource::App(_, b) => b.clone(),
        _ => unreachable!(),
    })
}

fn is_hole(t: &Resource, target: &Target, depth: usize) -> bool {
    match (target, t) {
        (Target::Bound(k), Resource::Var(i)) => *i == k + depth,
        (Target::Free(x), Resource::Free(y)) => x == y,
        _ => false,
    }
}

fn holes(t: &Resource, target: &Target, depth: usize) -> usize {
    match t {
        Resource::Var(_) | Resource::Free(_) => is_hole(t, target, depth) as usize,
        Resource::Abs(b) => holes(b, target, depth + 1),
        Resource::Left(_, b) | Resource::Right(_, b) => holes(b, target, depth),
        Resource::App(f, bag) => holes(f, target, depth) + bag.iter().map(|u| holes(u, target, depth)).sum::<usize>(),
    }
}

fn fill<'a>(t: &Resource, target: &Target, depth: usize, queue: &mut impl Iterator<Item = &'a Resource>) -> Resource {
    match t {
        Resource::Var(i) => {
            if is_hole(t, target, depth) {
                let item = queue.next().expect("one item per occurrence");
                crate::syntax::Simple::shift(item, depth as isize, 0)
            } else {
                match target {
                    Target::Bound(k) if *i > k + depth => Resource::Var(i - 1),
                    _ => t.clone(),
                }
            }
        }
        Resource::Free(_) => {
            if is_hole(t, target, depth) {
                let item = queue.next().expect("one item per occurrence");
                crate::syntax::Simple::shift(item, depth as isize, 0)
            } else {
                t.clone()
            }
        }
        Resource::Abs(b) => Resource::abs(fill(b, target, depth + 1, queue)),
        Resource::Left(p, b) => Resource::left(p.clone(), fill(b, target, depth, queue)),
        Resource::Right(p, b) => Resource::right(p.clone(), fill(b, target, depth, queue)),
        Resource::App(f, bag) => {
            let f = fill(f, target, depth, queue);
            let elems: Vec<Resource> = bag.iter().map(|u| fill(u, target, depth, queue)).collect();
            Resource::app(f, Bag::new(elems))
        }
    }
}
