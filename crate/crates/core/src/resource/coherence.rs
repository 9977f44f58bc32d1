use super::Reducible;
use crate::syntax::{Bag, Combination, Resource};

/// The coherence relation `a ⌢ b`.
///
/// Beyond the structural rules, a left tag and a right tag with the same
/// probability are coherent when both bodies are uniform, in either order.
pub fn coherent<T: Reducible>(a: &T, b: &T) -> bool {
    a.coherent_with(b)
}

pub(super) fn terms(a: &Resource, b: &Resource) -> bool {
    match (a, b) {
        (Resource::Var(i), Resource::Var(j)) => i == j,
        (Resource::Free(x), Resource::Free(y)) => x == y,
        (Resource::Abs(s), Resource::Abs(t)) => terms(s, t),
        (Resource::App(s, u), Resource::App(t, v)) => terms(s, t) && bags(u, v),
        (Resource::Left(p, s), Resource::Left(q, t)) | (Resource::Right(p, s), Resource::Right(q, t)) => {
            p == q && terms(s, t)
        }
        (Resource::Left(p, s), Resource::Right(q, t)) | (Resource::Right(p, s), Resource::Left(q, t)) => {
            p == q && terms(s, s) && terms(t, t)
        }
        _ => false,
    }
}

pub(super) fn bags(a: &Bag, b: &Bag) -> bool {
    let mut all: Vec<&Resource> = a.iter().chain(b.iter()).collect();
    all.sort();
    all.dedup();
    all.iter().enumerate().all(|(i, s)| all[i..].iter().all(|t| terms(s, t)))
}

/// Every pair drawn from the union of the two supports is coherent.
pub fn pairwise_coherent<T: Reducible>(a: &Combination<T>, b: &Combination<T>) -> bool {
    let all: Vec<&T> = a.support().chain(b.support()).collect();
    all.iter().enumerate().all(|(i, s)| all[i..].iter().all(|t| s.coherent_with(t)))
}

/// `S ⌢ S`.
pub fn is_uniform<T: Reducible>(s: &Combination<T>) -> bool {
    pairwise_coherent(s, &Combination::zero())
}
