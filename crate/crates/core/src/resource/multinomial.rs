use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow};

use super::{is_uniform, Reducible};
use crate::syntax::{Bag, Combination, Resource};

/// The multinomial coefficient `m(σ)`: the number of ways to permute the
/// identical resources of `σ` among themselves, nested bags included.
pub fn multinomial<T: Reducible>(sigma: &T) -> BigUint {
    sigma.multinomial()
}

pub(super) fn of_term(t: &Resource) -> BigUint {
    match t {
        Resource::Var(_) | Resource::Free(_) => BigUint::one(),
        Resource::Abs(s) | Resource::Left(_, s) | Resource::Right(_, s) => of_term(s),
        Resource::App(s, bag) => of_term(s) * of_bag(bag),
    }
}

pub(super) fn of_bag(bag: &Bag) -> BigUint {
    bag.multiplicities().into_iter().map(|(u, k)| factorial(k) * Pow::pow(of_term(u), k)).product()
}

pub(crate) fn factorial(n: usize) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

/// Uniform, and every coefficient is exactly `1/m(σ)`.
pub fn is_regular<T: Reducible>(s: &Combination<T>) -> bool {
    is_uniform(s)
        && s.iter().all(|(sigma, c)| {
            let expected = BigRational::new(BigInt::one(), BigInt::from(sigma.multinomial()));
            *c == expected
        })
}

/// `Σ_{n ≤ max_copies} [Sⁿ]/n!` as a combination of bags.
///
/// Bags are multisets, so the `n!/Π kᵢ!` orderings of a bag with
/// multiplicities `kᵢ` collapse, leaving the coefficient `Π cᵢ^kᵢ/kᵢ!`.
pub fn exponential(s: &Combination<Resource>, max_copies: usize) -> Combination<Bag> {
    let support: Vec<(&Resource, &BigRational)> = s.iter().collect();
    let mut out = Combination::zero();
    let mut chosen = Vec::new();
    expand(&support, max_copies, BigRational::one(), &mut chosen, &mut out);
    out
}

fn expand(
    rest: &[(&Resource, &BigRational)],
    budget: usize,
    coef: BigRational,
    chosen: &mut Vec<Resource>,
    out: &mut Combination<Bag>,
) {
    let Some(((t, c), tail)) = rest.split_first() else {
        out.add_term(Bag::new(chosen.clone()), coef);
        return;
    };
    let base = chosen.len();
    let mut weight = coef;
    for k in 0..=budget {
        if k > 0 {
            chosen.push((*t).clone());
            weight = weight * *c / BigRational::from_integer(BigInt::from(k));
        }
        expand(tail, budget - k, weight.clone(), chosen, out);
    }
    chosen.truncate(base);
}
