//! Seeded generators and small independent reference computations shared
//! by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigUint;
use num_rational::BigRational;
use probtaylor::syntax::{parse_lambda, rat, Bag, Combination, Prob, Resource, Term};
use probtaylor::tts::TreeTransitionSystem;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const PROBS: [(i64, i64); 5] = [(1, 2), (1, 3), (2, 3), (1, 4), (3, 4)];

pub fn prob(rng: &mut impl Rng) -> Prob {
    let (n, d) = *PROBS.choose(rng).unwrap();
    Prob::ratio(n, d)
}

/// A random probabilistic λ-term with about `size` constructors, over the
/// bound variables in `scope` and the free variables `free`. Leaves are
/// sometimes the combinators `I`, `Delta` or `Omega`.
pub fn term(rng: &mut impl Rng, size: usize, scope: usize, free: &[&str]) -> Term {
    if size <= 1 {
        let roll = rng.gen_range(0..20);
        return match roll {
            0 => parse_lambda("I").unwrap(),
            1 => parse_lambda("Delta").unwrap(),
            2 => parse_lambda("Omega").unwrap(),
            _ if scope > 0 && (free.is_empty() || roll % 2 == 0) => Term::Var(rng.gen_range(0..scope)),
            _ if !free.is_empty() => Term::free(free.choose(rng).unwrap()),
            _ => parse_lambda("I").unwrap(),
        };
    }
    match rng.gen_range(0..10) {
        0..=2 => Term::abs(term(rng, size - 1, scope + 1, free)),
        3..=4 => {
            let left = rng.gen_range(1..size);
            Term::choice(prob(rng), term(rng, left, scope, free), term(rng, size - left, scope, free))
        }
        _ => {
            let left = rng.gen_range(1..size);
            Term::app(term(rng, left, scope, free), term(rng, size - left, scope, free))
        }
    }
}

/// A random simple resource term of at most `size` constructors; choice
/// tags only when `tags` is set.
pub fn resource(rng: &mut impl Rng, size: usize, scope: usize, free: &[&str], tags: bool) -> Resource {
    if size <= 1 {
        if scope > 0 && (free.is_empty() || rng.gen_bool(0.5)) {
            return Resource::Var(rng.gen_range(0..scope));
        }
        return Resource::free(free.choose(rng).copied().unwrap_or("z"));
    }
    match rng.gen_range(0..10) {
        0..=2 => Resource::abs(resource(rng, size - 1, scope + 1, free, tags)),
        3 if tags => {
            let body = resource(rng, size - 1, scope, free, tags);
            if rng.gen_bool(0.5) {
                Resource::left(prob(rng), body)
            } else {
                Resource::right(prob(rng), body)
            }
        }
        _ => {
            let head_size = rng.gen_range(1..size);
            let mut room = size - 1 - head_size;
            // abstractions in head position often enough to make redexes
            let head = if head_size > 1 && rng.gen_bool(0.4) {
                Resource::abs(resource(rng, head_size - 1, scope + 1, free, tags))
            } else {
                resource(rng, head_size, scope, free, tags)
            };
            let mut elems = Vec::new();
            while room > 0 && elems.len() < 3 && rng.gen_bool(0.7) {
                let s = rng.gen_range(1..=room);
                elems.push(resource(rng, s, scope, free, tags));
                room -= elems.last().map(probtaylor::syntax::Simple::size).unwrap();
            }
            Resource::app(head, Bag::new(elems))
        }
    }
}

/// A random finite combination of closed-up-to-free-variables resource
/// terms with support at most `support` and sizes at most `size`.
pub fn combination(rng: &mut impl Rng, support: usize, size: usize) -> Combination<Resource> {
    let mut out = Combination::zero();
    let n = rng.gen_range(1..=support);
    for _ in 0..n {
        let n = rng.gen_range(1..=size);
        let s = resource(rng, n, 0, &["x", "y"], true);
        let (a, b) = *PROBS.choose(rng).unwrap();
        out.add_term(s, rat(a, b));
    }
    out
}

/// Every simple resource term of exactly `size` constructors over the
/// bound variables of `scope`, the free variables `free`, and, when
/// `tags` is set, the tags `l_{1/2}` and `r_{1/2}`.
pub struct Enumerator<'a> {
    free: &'a [&'a str],
    tags: bool,
    memo: HashMap<(usize, usize), Vec<Resource>>,
}

impl<'a> Enumerator<'a> {
    pub fn new(free: &'a [&'a str], tags: bool) -> Enumerator<'a> {
        Enumerator { free, tags, memo: HashMap::new() }
    }

    pub fn terms(&mut self, size: usize, scope: usize) -> Vec<Resource> {
        if let Some(hit) = self.memo.get(&(size, scope)) {
            return hit.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            out.extend((0..scope).map(Resource::Var));
            out.extend(self.free.iter().map(|x| Resource::free(x)));
        } else if size > 1 {
            for body in self.terms(size - 1, scope + 1) {
                out.push(Resource::abs(body));
            }
            if self.tags {
                for body in self.terms(size - 1, scope) {
                    out.push(Resource::left(Prob::half(), body.clone()));
                    out.push(Resource::right(Prob::half(), body));
                }
            }
            for head_size in 1..size {
                let heads = self.terms(head_size, scope);
                let bags = self.bags(size - 1 - head_size, scope, usize::MAX);
                for h in &heads {
                    for b in &bags {
                        out.push(Resource::app(h.clone(), b.clone()));
                    }
                }
            }
        }
        self.memo.insert((size, scope), out.clone());
        out
    }

    /// Bags of total size `size` with at most `max_len` elements.
    pub fn bags(&mut self, size: usize, scope: usize, max_len: usize) -> Vec<Bag> {
        // multisets as nonincreasing sequences of (size, index) pairs
        let mut pool: Vec<Resource> = Vec::new();
        for s in 1..=size {
            pool.extend(self.terms(s, scope));
        }
        let mut out = Vec::new();
        let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
        while let Some((picked, used)) = stack.pop() {
            if used == size {
                out.push(Bag::new(picked.iter().map(|&i| pool[i].clone()).collect()));
                continue;
            }
            if picked.len() == max_len {
                continue;
            }
            let from = picked.last().copied().unwrap_or(0);
            for (i, t) in pool.iter().enumerate().skip(from) {
                let s = probtaylor::syntax::Simple::size(t);
                if used + s <= size {
                    let mut next = picked.clone();
                    next.push(i);
                    stack.push((next, used + s));
                }
            }
        }
        out
    }
}

/// `m(σ)` from the definition: the product, over every bag, of the
/// factorials of its multiplicities times the multinomials of its elements
/// raised to their multiplicities.
pub fn multinomial_reference(s: &Resource) -> BigUint {
    match s {
        Resource::Var(_) | Resource::Free(_) => BigUint::from(1u32),
        Resource::Abs(b) | Resource::Left(_, b) | Resource::Right(_, b) => multinomial_reference(b),
        Resource::App(f, bag) => multinomial_reference(f) * bag_multinomial_reference(bag),
    }
}

pub fn bag_multinomial_reference(bag: &Bag) -> BigUint {
    let mut counts: BTreeMap<&Resource, u32> = BTreeMap::new();
    for u in bag.iter() {
        *counts.entry(u).or_default() += 1;
    }
    let mut out = BigUint::from(1u32);
    for (u, k) in counts {
        for i in 1..=k {
            out *= BigUint::from(i);
        }
        out *= multinomial_reference(u).pow(k);
    }
    out
}

/// A random transition system with at most `max_states` states in
/// total, one or two labels of each kind, positive-mass distributions and
/// sequences of length at most two.
pub fn tts(rng: &mut impl Rng, max_states: usize) -> TreeTransitionSystem {
    let nq = rng.gen_range(1..max_states);
    let ns = rng.gen_range(1..=max_states - nq);
    let lin_labels = ["a", "b"][..rng.gen_range(1..=2)].to_vec();
    let bra_labels = ["i", "j"][..rng.gen_range(1..=2)].to_vec();
    let mut sys = TreeTransitionSystem::new();
    let qs: Vec<usize> = (0..nq).map(|q| sys.linear_state(&format!("q{q}")).unwrap()).collect();
    let ss: Vec<usize> = (0..ns).map(|s| sys.branching_state(&format!("s{s}")).unwrap()).collect();
    let ls: Vec<usize> = lin_labels.iter().map(|l| sys.linear_label(l).unwrap()).collect();
    let is: Vec<usize> = bra_labels.iter().map(|l| sys.branching_label(l).unwrap()).collect();
    for &q in &qs {
        for &l in &ls {
            if rng.gen_bool(0.6) {
                let targets = rng.gen_range(1..=2.min(ns));
                let chosen: Vec<usize> = ss.choose_multiple(rng, targets).copied().collect();
                let weights: Vec<BigRational> = if targets == 1 {
                    vec![[rat(1, 1), rat(1, 2)].choose(rng).unwrap().clone()]
                } else {
                    [vec![rat(1, 2), rat(1, 2)], vec![rat(1, 4), rat(3, 4)], vec![rat(1, 2), rat(1, 4)]]
                        .choose(rng)
                        .unwrap()
                        .clone()
                };
                sys.set_delta(q, l, chosen.into_iter().zip(weights)).unwrap();
            }
        }
    }
    for &s in &ss {
        for &i in &is {
            if rng.gen_bool(0.6) {
                let len = rng.gen_range(0..=2);
                let seq = (0..len).map(|_| *qs.choose(rng).unwrap()).collect();
                sys.set_gamma(s, i, seq).unwrap();
            }
        }
    }
    sys
}

/// Tree bisimilarity straight from the definition, as the greatest fixpoint
/// over arbitrary relations: a pair of linear states stays related while
/// every pair of distributions admits a coupling supported on the current
/// branching relation. Returns the linear and the branching relation.
#[allow(clippy::needless_range_loop)]
pub fn bisimilarity_by_couplings(tts: &TreeTransitionSystem) -> (Vec<Vec<bool>>, Vec<Vec<bool>>) {
    let (nq, ns) = (tts.linear_count(), tts.branching_count());
    let (nl, ni) = (tts.linear_labels().len(), tts.branching_labels().len());
    let mut lin = vec![vec![true; nq]; nq];
    let mut bra = vec![vec![true; ns]; ns];
    loop {
        let mut changed = false;
        for q in 0..nq {
            for r in 0..nq {
                if lin[q][r] {
                    let ok = (0..nl).all(|l| match (tts.delta(q, l), tts.delta(r, l)) {
                        (None, None) => true,
                        (Some(a), Some(b)) => coupling_exists(a, b, &bra),
                        _ => false,
                    });
                    if !ok {
                        lin[q][r] = false;
                        changed = true;
                    }
                }
            }
        }
        for s in 0..ns {
            for t in 0..ns {
                if bra[s][t] {
                    let ok = (0..ni).all(|i| match (tts.gamma(s, i), tts.gamma(t, i)) {
                        (None, None) => true,
                        (Some(a), Some(b)) => a.len() == b.len() && a.iter().zip(b).all(|(&x, &y)| lin[x][y]),
                        _ => false,
                    });
                    if !ok {
                        bra[s][t] = false;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return (lin, bra);
        }
    }
}

/// Hall's condition: equal masses, and every set of sources weighs at most
/// the targets related to it.
fn coupling_exists(a: &BTreeMap<usize, BigRational>, b: &BTreeMap<usize, BigRational>, rel: &[Vec<bool>]) -> bool {
    let total = |m: &BTreeMap<usize, BigRational>| m.values().cloned().sum::<BigRational>();
    if total(a) != total(b) {
        return false;
    }
    let sources: Vec<(&usize, &BigRational)> = a.iter().collect();
    (1u32..1 << sources.len()).all(|mask| {
        let chosen = sources.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| *s);
        let (mut weight, mut reached) = (BigRational::from_integer(0.into()), BTreeSet::new());
        for (&x, p) in chosen {
            weight += p;
            reached.extend(b.keys().filter(|&&y| rel[x][y]));
        }
        weight <= reached.iter().map(|y| b[*y].clone()).sum::<BigRational>()
    })
}
