//! Normal forms of Taylor expansions, computed from head reduction: the
//! normal form of `T⊕(M)` is the sum over every labelled head reduction
//! `M ⇓ρ h` of the normal form of `T⊕(h)` prefixed by the tags of `ρ`.
//! Normalizing a truncated expansion instead would miss contributions,
//! since β-reduction shrinks terms.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{bags_within, erase_combination, sized, SizeMeasure, TruncationBudget};
use crate::operational::{head_reductions, ChoiceSeq, HeadNormalForm, Side};
use crate::syntax::{Bag, Combination, HeadVar, Resource, Term};

/// A truncated normal form with a bound on what it misses.
///
/// For every normal term within the budget the true coefficient lies in
/// `[coefficient, coefficient + residual]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalExpansion {
    pub terms: Combination<Resource>,
    /// Probability mass of the head-reduction branches that were not
    /// resolved within the fuel, or whose arguments were not.
    pub residual: BigRational,
}

impl NormalExpansion {
    fn empty() -> NormalExpansion {
        NormalExpansion { terms: Combination::zero(), residual: BigRational::zero() }
    }

    pub fn is_exact(&self) -> bool {
        self.residual.is_zero()
    }
}

/// The normal form of `T⊕(M)` within `b`, exploring at most `fuel` head
/// steps per branch at every level.
pub fn explicit_taylor_nf(m: &Term, b: TruncationBudget, fuel: usize) -> NormalExpansion {
    explicit_taylor_nf_with(m, b, fuel, SizeMeasure::Full)
}

pub fn explicit_taylor_nf_with(m: &Term, b: TruncationBudget, fuel: usize, measure: SizeMeasure) -> NormalExpansion {
    Normalizer { b, fuel, measure, memo: HashMap::new() }.nf(m, b.max_term_size)
}

/// The normal form of the generic expansion `T(M)`: every choice-free
/// normal term of size at most `b.max_term_size`, with its coefficient
/// bounded below.
pub fn taylor_nf(m: &Term, b: TruncationBudget, fuel: usize) -> NormalExpansion {
    let explicit = explicit_taylor_nf_with(m, b, fuel, SizeMeasure::Erased);
    NormalExpansion { terms: erase_combination(&explicit.terms), residual: explicit.residual }
}

struct Normalizer {
    b: TruncationBudget,
    fuel: usize,
    measure: SizeMeasure,
    memo: HashMap<(Term, usize), NormalExpansion>,
}

impl Normalizer {
    fn nf(&mut self, m: &Term, limit: usize) -> NormalExpansion {
        if limit == 0 {
            return NormalExpansion::empty();
        }
        let key = (m.clone(), limit);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let frontier = head_reductions(m, self.fuel);
        let mut out = NormalExpansion { terms: Combination::zero(), residual: frontier.residual() };
        let tag_cost = match self.measure {
            SizeMeasure::Full => 1,
            SizeMeasure::Erased => 0,
        };
        for r in &frontier.resolved {
            let prefix = r.choices.len() * tag_cost;
            if prefix >= limit {
                continue;
            }
            let (inner, complete) = self.hnf_nf(&r.hnf, limit - prefix);
            out.terms.add(&inner.map(|s| with_prefix(&r.choices, s.clone())));
            if !complete {
                out.residual += r.choices.prob();
            }
        }
        debug_assert!(!out.residual.is_negative());
        self.memo.insert(key, out.clone());
        out
    }

    fn hnf_nf(&mut self, h: &HeadNormalForm, limit: usize) -> (Combination<Resource>, bool) {
        let base = h.binders + 1 + h.args.len();
        if base > limit {
            return (Combination::zero(), true);
        }
        let room = limit - base;
        let mut complete = true;
        let mut subs = Vec::with_capacity(h.args.len());
        for arg in &h.args {
            if room >= 1 {
                let sub = self.nf(arg, room);
                complete &= sub.is_exact();
                subs.push(sub.terms);
            } else {
                subs.push(Combination::zero());
            }
        }
        let terms = hnf_expansion(h.binders, &h.head, &subs, limit, self.b.max_bag_copies, self.measure);
        (terms, complete)
    }
}

/// `⟨ρ⟩s`: the tags of `ρ` around `s`, first choice outermost.
pub fn with_prefix(choices: &ChoiceSeq, s: Resource) -> Resource {
    choices.steps().iter().rev().fold(s, |acc, (side, p)| match side {
        Side::Left => Resource::left(p.clone(), acc),
        Side::Right => Resource::right(p.clone(), acc),
    })
}

/// `λx⃗. y !A₁ … !Aₘ` restricted to terms of measured size at most `limit`
/// and bags of at most `copies` elements.
pub(crate) fn hnf_expansion(
    binders: usize,
    head: &HeadVar,
    args: &[Combination<Resource>],
    limit: usize,
    copies: usize,
    measure: SizeMeasure,
) -> Combination<Resource> {
    let base = binders + 1 + args.len();
    let mut out = Combination::zero();
    if base > limit {
        return out;
    }
    let sized_args: Vec<_> = args.iter().map(|a| sized(a, measure)).collect();
    let mut chosen: Vec<Bag> = Vec::with_capacity(args.len());
    spread(&sized_args, limit - base, copies, BigRational::from_integer(1.into()), &mut chosen, &mut |bags, c| {
        let t = Resource::lambdas(binders, Resource::apps(Resource::from_head(head), bags.iter().cloned()));
        out.add_term(t, c);
    });
    out
}

fn spread(
    args: &[super::Sized],
    room: usize,
    copies: usize,
    coef: BigRational,
    chosen: &mut Vec<Bag>,
    emit: &mut dyn FnMut(&[Bag], BigRational),
) {
    let Some((first, rest)) = args.split_first() else {
        emit(chosen, coef);
        return;
    };
    for (bag, c, used) in bags_within(first, room, copies) {
        chosen.push(bag);
        spread(rest, room - used, copies, &coef * c, chosen, emit);
        chosen.pop();
    }
}
