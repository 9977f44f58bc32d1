//! Tree bisimilarity by signature-based partition refinement.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::Zero;

use super::TreeTransitionSystem;

/// Class numbers for every linear and every branching state. Classes are
/// numbered in order of their first member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub linear: Vec<usize>,
    pub branching: Vec<usize>,
}

impl Bipartition {
    /// Everything in one class of each kind.
    pub fn coarsest(tts: &TreeTransitionSystem) -> Bipartition {
        Bipartition { linear: vec![0; tts.linear_count()], branching: vec![0; tts.branching_count()] }
    }

    pub fn linear_equiv(&self, q: usize, r: usize) -> bool {
        self.linear[q] == self.linear[r]
    }

    pub fn branching_equiv(&self, s: usize, t: usize) -> bool {
        self.branching[s] == self.branching[t]
    }

    pub fn linear_classes(&self) -> Vec<Vec<usize>> {
        classes(&self.linear)
    }

    pub fn branching_classes(&self) -> Vec<Vec<usize>> {
        classes(&self.branching)
    }

    fn class_count(&self) -> usize {
        count(&self.linear) + count(&self.branching)
    }
}

fn count(ids: &[usize]) -> usize {
    ids.iter().max().map_or(0, |m| m + 1)
}

fn classes(ids: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); count(ids)];
    for (x, &c) in ids.iter().enumerate() {
        out[c].push(x);
    }
    out
}

fn renumber<K: Eq + std::hash::Hash>(keys: Vec<K>) -> Vec<usize> {
    let mut seen: HashMap<K, usize> = HashMap::new();
    keys.into_iter()
        .map(|k| {
            let next = seen.len();
            *seen.entry(k).or_insert(next)
        })
        .collect()
}

/// One refinement step: linear states are split by the mass each label
/// sends to each branching class, branching states by the linear classes
/// along each label's sequence. Definedness is part of both signatures.
pub fn refine_once(tts: &TreeTransitionSystem, p: &Bipartition) -> Bipartition {
    let n_lin_labels = tts.linear_labels().len();
    let n_bra_labels = tts.branching_labels().len();

    let linear = renumber(
        (0..tts.linear_count())
            .map(|q| {
                let sig: Vec<Option<BTreeMap<usize, BigRational>>> = (0..n_lin_labels)
                    .map(|l| {
                        tts.delta(q, l).map(|dist| {
                            let mut by_class: BTreeMap<usize, BigRational> = BTreeMap::new();
                            for (s, pr) in dist {
                                *by_class.entry(p.branching[*s]).or_insert_with(BigRational::zero) += pr;
                            }
                            by_class
                        })
                    })
                    .collect();
                (p.linear[q], sig)
            })
            .collect(),
    );

    let branching = renumber(
        (0..tts.branching_count())
            .map(|s| {
                let sig: Vec<Option<Vec<usize>>> = (0..n_bra_labels)
                    .map(|l| tts.gamma(s, l).map(|seq| seq.iter().map(|q| p.linear[*q]).collect()))
                    .collect();
                (p.branching[s], sig)
            })
            .collect(),
    );

    Bipartition { linear, branching }
}

/// The largest tree bisimulation, as a partition of each kind of state.
pub fn bisimilarity(tts: &TreeTransitionSystem) -> Bipartition {
    let mut p = Bipartition::coarsest(tts);
    loop {
        let next = refine_once(tts, &p);
        if next.class_count() == p.class_count() {
            return next;
        }
        p = next;
    }
}
