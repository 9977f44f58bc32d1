//! Labelled Markov chains, and the encoding of a tree transition system
//! as one: a branching state `s` with `γ(s, ι) = (q₁, …, qₙ)` announces
//! its arity with a self-loop labelled `(ι, n)` and exposes each `qₖ`
//! through a Dirac step labelled `(ι, n, k)`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Bipartition, TreeTransitionSystem};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LmcLabel {
    /// A linear label, unchanged.
    Linear(usize),
    /// `(ι, n)`: the state branches under `ι` into `n` states.
    Arity(usize, usize),
    /// `(ι, n, k)`: the `k`-th of those states, counting from 1.
    Project(usize, usize, usize),
}

/// States `0..linear` are the linear states of the source system, the
/// rest its branching states in order. Missing transitions are empty
/// distributions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledMarkovChain {
    pub states: usize,
    pub linear: usize,
    pub labels: Vec<LmcLabel>,
    pub eta: BTreeMap<(usize, LmcLabel), BTreeMap<usize, BigRational>>,
}

impl LabelledMarkovChain {
    pub fn step(&self, x: usize, label: &LmcLabel) -> Option<&BTreeMap<usize, BigRational>> {
        self.eta.get(&(x, label.clone()))
    }
}

pub fn lmc_translation(tts: &TreeTransitionSystem) -> LabelledMarkovChain {
    let nq = tts.linear_count();
    let mut eta = BTreeMap::new();
    let mut labels: Vec<LmcLabel> = (0..tts.linear_labels().len()).map(LmcLabel::Linear).collect();
    for q in 0..nq {
        for l in 0..tts.linear_labels().len() {
            if let Some(dist) = tts.delta(q, l) {
                let shifted = dist.iter().map(|(s, p)| (nq + s, p.clone())).collect();
                eta.insert((q, LmcLabel::Linear(l)), shifted);
            }
        }
    }
    for s in 0..tts.branching_count() {
        for l in 0..tts.branching_labels().len() {
            let Some(seq) = tts.gamma(s, l) else { continue };
            let n = seq.len();
            let arity = LmcLabel::Arity(l, n);
            eta.insert((nq + s, arity.clone()), BTreeMap::from([(nq + s, BigRational::one())]));
            labels.push(arity);
            for (k, q) in seq.iter().enumerate() {
                let proj = LmcLabel::Project(l, n, k + 1);
                eta.insert((nq + s, proj.clone()), BTreeMap::from([(*q, BigRational::one())]));
                labels.push(proj);
            }
        }
    }
    labels.sort();
    labels.dedup();
    LabelledMarkovChain { states: nq + tts.branching_count(), linear: nq, labels, eta }
}

/// Probabilistic bisimilarity on a chain, as a block number per state.
///
/// Splitter-based: a block is split whenever its members send different
/// mass into some block under some label, one splitter at a time, until
/// no splitter applies. Absent transitions count as mass zero.
pub fn lmc_bisimilarity(chain: &LabelledMarkovChain) -> Vec<usize> {
    let mut blocks: Vec<Vec<usize>> = if chain.states == 0 { Vec::new() } else { vec![(0..chain.states).collect()] };
    let mass = |x: usize, label: &LmcLabel, target: &[usize]| -> BigRational {
        chain.step(x, label).map_or_else(BigRational::zero, |d| {
            target.iter().filter_map(|y| d.get(y)).fold(BigRational::zero(), |a, b| a + b)
        })
    };
    'outer: loop {
        for splitter in 0..blocks.len() {
            for label in &chain.labels {
                for b in 0..blocks.len() {
                    let mut parts: BTreeMap<BigRational, Vec<usize>> = BTreeMap::new();
                    for &x in &blocks[b] {
                        parts.entry(mass(x, label, &blocks[splitter])).or_default().push(x);
                    }
                    if parts.len() > 1 {
                        blocks.remove(b);
                        blocks.extend(parts.into_values());
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    let mut out = vec![0; chain.states];
    let mut order: Vec<&Vec<usize>> = blocks.iter().collect();
    order.sort_by_key(|b| b.iter().min().copied());
    for (i, b) in order.into_iter().enumerate() {
        for &x in b {
            out[x] = i;
        }
    }
    out
}

/// Whether the chain's bisimilarity, restricted to each kind of state,
/// is the given bipartition.
pub fn lmc_agrees(chain: &LabelledMarkovChain, ids: &[usize], p: &Bipartition) -> bool {
    let nq = chain.linear;
    let same = |a: &[usize], b: &dyn Fn(usize) -> usize, len: usize| {
        (0..len).all(|x| (0..len).all(|y| (a[x] == a[y]) == (b(x) == b(y))))
    };
    same(&p.linear, &|x| ids[x], nq) && same(&p.branching, &|x| ids[nq + x], chain.states - nq)
}
