//! The probabilistic resource calculus: linear substitution, β and
//! choice-commutation steps, complete left reduction and normal forms,
//! coherence and uniformity, multinomial coefficients, regularity and the
//! exponential of a term.

mod coherence;
mod multinomial;
pub mod oracle;
mod size;
mod substitution;

use std::collections::BTreeSet;

use num_bigint::BigUint;

use crate::syntax::{Bag, Combination, Resource, Simple};

pub use coherence::{coherent, is_uniform, pairwise_coherent};
pub(crate) use multinomial::factorial;
pub use multinomial::{exponential, is_regular, multinomial};
pub use oracle::substitute_oracle;
pub use size::{ssize, SizeMultiset};
pub use substitution::{occurrences, substitute, substitute_in_bag, Target};

/// Simple terms and simple poly-terms, the two kinds a combination can
/// range over.
pub trait Reducible: Simple {
    /// Every one-step reduct, one per redex occurrence (duplicates
    /// removed).
    fn reducts(&self) -> Vec<Combination<Self>>;
    /// The complete left reduct `L(σ)`.
    fn left_reduct(&self) -> Combination<Self>;
    fn multinomial(&self) -> BigUint;
    fn coherent_with(&self, other: &Self) -> bool;
}

impl Reducible for Resource {
    fn reducts(&self) -> Vec<Combination<Resource>> {
        let mut out = BTreeSet::new();
        resource_reducts(self, &mut |c| {
            out.insert(c);
        });
        out.into_iter().collect()
    }

    fn left_reduct(&self) -> Combination<Resource> {
        left_reduct_term(self)
    }

    fn multinomial(&self) -> BigUint {
        multinomial::of_term(self)
    }

    fn coherent_with(&self, other: &Resource) -> bool {
        coherence::terms(self, other)
    }
}

impl Reducible for Bag {
    fn reducts(&self) -> Vec<Combination<Bag>> {
        let mut out = BTreeSet::new();
        bag_reducts(self, &mut |c| {
            out.insert(c);
        });
        out.into_iter().collect()
    }

    fn left_reduct(&self) -> Combination<Bag> {
        left_reduct_bag(self)
    }

    fn multinomial(&self) -> BigUint {
        multinomial::of_bag(self)
    }

    fn coherent_with(&self, other: &Bag) -> bool {
        coherence::bags(self, other)
    }
}

fn resource_reducts(t: &Resource, emit: &mut dyn FnMut(Combination<Resource>)) {
    // redexes at the root
    match t {
        Resource::App(f, bag) => match &**f {
            Resource::Abs(body) => emit(substitute(body, bag, &Target::Bound(0))),
            Resource::Left(p, s) => {
                emit(Combination::unit(Resource::left(p.clone(), Resource::app((**s).clone(), bag.clone()))))
            }
            Resource::Right(p, s) => {
                emit(Combination::unit(Resource::right(p.clone(), Resource::app((**s).clone(), bag.clone()))))
            }
            _ => {}
        },
        Resource::Abs(b) => match &**b {
            Resource::Left(p, s) => emit(Combination::unit(Resource::left(p.clone(), Resource::abs((**s).clone())))),
            Resource::Right(p, s) => emit(Combination::unit(Resource::right(p.clone(), Resource::abs((**s).clone())))),
            _ => {}
        },
        _ => {}
    }
    // redexes below
    match t {
        Resource::Var(_) | Resource::Free(_) => {}
        Resource::Abs(b) => resource_reducts(b, &mut |c| emit(c.map(|s| Resource::abs(s.clone())))),
        Resource::Left(p, b) => resource_reducts(b, &mut |c| emit(c.map(|s| Resource::left(p.clone(), s.clone())))),
        Resource::Right(p, b) => resource_reducts(b, &mut |c| emit(c.map(|s| Resource::right(p.clone(), s.clone())))),
        Resource::App(f, bag) => {
            resource_reducts(f, &mut |c| emit(c.map(|s| Resource::app(s.clone(), bag.clone()))));
            bag_reducts(bag, &mut |c| emit(c.map(|u| Resource::app((**f).clone(), u.clone()))));
        }
    }
}

fn bag_reducts(bag: &Bag, emit: &mut dyn FnMut(Combination<Bag>)) {
    for (elem, _) in bag.multiplicities() {
        let mut others = bag.elements().to_vec();
        let at = others.iter().position(|u| u == elem).expect("element of the bag");
        others.remove(at);
        resource_reducts(elem, &mut |c| {
            emit(c.map(|s| {
                let mut v = others.clone();
                v.push(s.clone());
                Bag::new(v)
            }))
        });
    }
}

fn left_reduct_term(t: &Resource) -> Combination<Resource> {
    match t {
        Resource::Left(p, s) => return s.left_reduct().map(|u| Resource::left(p.clone(), u.clone())),
        Resource::Right(p, s) => return s.left_reduct().map(|u| Resource::right(p.clone(), u.clone())),
        _ => {}
    }
    let (binders, head, bags) = t.spine();
    let rebuild = |head: Resource, bags: &[Bag]| Resource::lambdas(binders, Resource::apps(head, bags.iter().cloned()));
    match head {
        Resource::Var(_) | Resource::Free(_) => {
            let mut acc: Combination<Vec<Bag>> = Combination::unit(Vec::new());
            for bag in &bags {
                acc = acc.product(&bag.left_reduct(), |prefix, b| {
                    let mut v = prefix.clone();
                    v.push(b.clone());
                    v
                });
            }
            acc.map(|reduced| rebuild(head.clone(), reduced))
        }
        Resource::Abs(body) => {
            let (first, rest) = bags.split_first().expect("an abstraction head has arguments");
            let rest: Vec<Bag> = rest.iter().map(|b| (*b).clone()).collect();
            substitute(body, first, &Target::Bound(0)).map(|s| rebuild(s.clone(), &rest))
        }
        Resource::Left(p, s) | Resource::Right(p, s) => {
            let owned: Vec<Bag> = bags.iter().map(|b| (*b).clone()).collect();
            let inner = rebuild((**s).clone(), &owned);
            let tagged = if matches!(head, Resource::Left(..)) {
                Resource::left(p.clone(), inner)
            } else {
                Resource::right(p.clone(), inner)
            };
            Combination::unit(tagged)
        }
        Resource::App(..) => unreachable!("spine heads are never applications"),
    }
}

fn left_reduct_bag(bag: &Bag) -> Combination<Bag> {
    let mut acc: Combination<Bag> = Combination::unit(Bag::empty());
    for u in bag.iter() {
        acc = acc.product(&u.left_reduct(), |b, s| {
            let mut v = b.elements().to_vec();
            v.push(s.clone());
            Bag::new(v)
        });
    }
    acc
}

/// All one-step reducts `S - S_σ.σ + S_σ.T` of a finite combination, one
/// per redex occurrence in its support. Empty exactly when `S` is normal.
pub fn reduce_one<T: Reducible>(s: &Combination<T>) -> Vec<Combination<T>> {
    let mut out = BTreeSet::new();
    for (sigma, c) in s.iter() {
        for reduct in sigma.reducts() {
            let mut next = s.clone();
            next.remove(sigma);
            next.add_scaled(&reduct, c);
            out.insert(next);
        }
    }
    out.into_iter().collect()
}

/// `L(S)`, extended linearly.
pub fn left_reduct<T: Reducible>(s: &Combination<T>) -> Combination<T> {
    s.flat_map(|sigma| sigma.left_reduct())
}

/// The normal form, as the fixpoint of complete left reduction.
pub fn normalize<T: Reducible>(s: &Combination<T>) -> Combination<T> {
    let mut current = s.clone();
    loop {
        let next = left_reduct(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

/// Whether no reduction applies to `σ`.
pub fn is_normal<T: Reducible>(sigma: &T) -> bool {
    sigma.reducts().is_empty()
}
