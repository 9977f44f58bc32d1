//! The transition system of Böhm trees, unfolded from given terms: a term
//! steps under `ev` to the distribution of its head normal forms, and a
//! head normal form `λx⃗. y M₁ … Mₘ` branches under its shape into its
//! arguments.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_rational::BigRational;
use num_traits::Zero;

use super::TreeTransitionSystem;
use crate::operational::{head_reductions, HeadNormalForm};
use crate::syntax::{HeadVar, Term};

/// A system unfolded from terms, with the state of each starting term and
/// the term or head normal form behind every state.
#[derive(Debug, Clone)]
pub struct TermSystem {
    pub tts: TreeTransitionSystem,
    pub roots: Vec<usize>,
    pub terms: Vec<Term>,
    pub hnfs: Vec<HeadNormalForm>,
}

/// The shape label `lam n y` of a head normal form.
pub fn shape_label(h: &HeadNormalForm) -> String {
    let head = match &h.head {
        HeadVar::Bound(i) => format!("#{i}"),
        HeadVar::Free(x) => x.to_string(),
    };
    format!("lam {} {head}", h.binders)
}

/// Unfolds the system from `terms` breadth first. Terms first reached at
/// depth `depth` or more get no `ev` step. `δ(M, ev)` is the resolved
/// part of `M`'s head reductions within `fuel`, so it loses mass when
/// branches are unresolved.
pub fn tts_of_terms(terms: &[Term], depth: usize, fuel: usize) -> TermSystem {
    let mut b = Unfolding::default();
    let ev = b.tts.linear_label("ev").expect("fresh system");
    let roots: Vec<usize> = terms.iter().map(|m| b.linear(m, 0)).collect();
    while let Some((q, d)) = b.queue.pop_front() {
        if d >= depth {
            continue;
        }
        let frontier = head_reductions(&b.terms[q], fuel);
        let mut dist: BTreeMap<usize, BigRational> = BTreeMap::new();
        for r in &frontier.resolved {
            let s = b.branching(&r.hnf, d);
            *dist.entry(s).or_insert_with(BigRational::zero) += r.choices.prob();
        }
        b.tts.set_delta(q, ev, dist).expect("resolved mass is at most one");
    }
    TermSystem { tts: b.tts, roots, terms: b.terms, hnfs: b.hnfs }
}

#[derive(Default)]
struct Unfolding {
    tts: TreeTransitionSystem,
    lin_ids: HashMap<Term, usize>,
    bra_ids: HashMap<HeadNormalForm, usize>,
    terms: Vec<Term>,
    hnfs: Vec<HeadNormalForm>,
    queue: VecDeque<(usize, usize)>,
}

impl Unfolding {
    fn linear(&mut self, m: &Term, d: usize) -> usize {
        if let Some(&q) = self.lin_ids.get(m) {
            return q;
        }
        let q = self.tts.linear_state(&format!("q{}", self.terms.len())).expect("fresh name");
        self.lin_ids.insert(m.clone(), q);
        self.terms.push(m.clone());
        self.queue.push_back((q, d));
        q
    }

    /// The state of `h`, reached from a term at depth `d`.
    fn branching(&mut self, h: &HeadNormalForm, d: usize) -> usize {
        if let Some(&s) = self.bra_ids.get(h) {
            return s;
        }
        let s = self.tts.branching_state(&format!("h{}", self.hnfs.len())).expect("fresh name");
        self.bra_ids.insert(h.clone(), s);
        self.hnfs.push(h.clone());
        let label = self.tts.branching_label(&shape_label(h)).expect("shape labels are not `ev`");
        let args: Vec<usize> = h.args.iter().map(|a| self.linear(a, d + 1)).collect();
        self.tts.set_gamma(s, label, args).expect("first branching step of a new state");
        s
    }
}

impl TermSystem {
    /// State names with the term or head normal form they stand for.
    pub fn legend(&self) -> Vec<String> {
        let mut out: Vec<String> =
            self.terms.iter().enumerate().map(|(q, m)| format!("{} = {m}", self.tts.linear_name(q))).collect();
        out.extend(self.hnfs.iter().enumerate().map(|(s, h)| format!("{} = {h}", self.tts.branching_name(s))));
        out
    }
}
