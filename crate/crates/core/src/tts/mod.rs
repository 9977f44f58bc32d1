//! Finite tree transition systems: linear states take probabilistic steps
//! to branching states, and branching states split deterministically into
//! sequences of linear states. Bisimilarity, a test language that
//! characterizes it, and a translation to labelled Markov chains.
//!
//! Text format, one transition per line (`#` starts a comment):
//!
//! ```text
//! lin q --ev-> {h1: 1/4, h2: 1/2}
//! bra h --(lam 2 y)-> q1 q2
//! lin r
//! ```
//!
//! States and labels are declared by use; a bare `lin r` or `bra h`
//! declares a state without transitions.

mod bisim;
mod lmc;
mod terms;
mod testing;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::syntax::{fmt_rational, parse_rational};

pub use bisim::{bisimilarity, refine_once, Bipartition};
pub use lmc::{lmc_agrees, lmc_bisimilarity, lmc_translation, LabelledMarkovChain, LmcLabel};
pub use terms::{shape_label, tts_of_terms, TermSystem};
pub use testing::{
    distinguishing_test_search, enumerate_tests, eval_branching, eval_linear, eval_tts_test, BranchingTest, LinearTest,
    TestBudget, TestPool, TtsTest,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TtsError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("label `{0}` is used both as a linear and as a branching label")]
    LabelClash(String),
    #[error("state `{0}` is used both as a linear and as a branching state")]
    StateClash(String),
    #[error("transition of `{state}` under `{label}` is given twice")]
    Duplicate { state: String, label: String },
    #[error("distribution of `{state}` under `{label}` has mass {mass} > 1")]
    MassExceedsOne { state: String, label: String, mass: String },
    #[error("negative probability in the distribution of `{0}`")]
    NegativeProbability(String),
    #[error("no such state: {0}")]
    UnknownState(String),
    #[error("a {test} test cannot be evaluated on a {state} state")]
    KindMismatch { test: &'static str, state: &'static str },
}

/// A state of either kind, by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum State {
    Linear(usize),
    Branching(usize),
}

/// States and labels are indices into the name tables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeTransitionSystem {
    linear_states: Vec<String>,
    branching_states: Vec<String>,
    linear_labels: Vec<String>,
    branching_labels: Vec<String>,
    delta: BTreeMap<(usize, usize), BTreeMap<usize, BigRational>>,
    gamma: BTreeMap<(usize, usize), Vec<usize>>,
}

fn intern(table: &mut Vec<String>, name: &str) -> usize {
    match table.iter().position(|n| n == name) {
        Some(i) => i,
        None => {
            table.push(name.to_string());
            table.len() - 1
        }
    }
}

impl TreeTransitionSystem {
    pub fn new() -> TreeTransitionSystem {
        TreeTransitionSystem::default()
    }

    pub fn linear_state(&mut self, name: &str) -> Result<usize, TtsError> {
        if self.branching_states.iter().any(|n| n == name) {
            return Err(TtsError::StateClash(name.to_string()));
        }
        Ok(intern(&mut self.linear_states, name))
    }

    pub fn branching_state(&mut self, name: &str) -> Result<usize, TtsError> {
        if self.linear_states.iter().any(|n| n == name) {
            return Err(TtsError::StateClash(name.to_string()));
        }
        Ok(intern(&mut self.branching_states, name))
    }

    pub fn linear_label(&mut self, name: &str) -> Result<usize, TtsError> {
        if self.branching_labels.iter().any(|n| n == name) {
            return Err(TtsError::LabelClash(name.to_string()));
        }
        Ok(intern(&mut self.linear_labels, name))
    }

    pub fn branching_label(&mut self, name: &str) -> Result<usize, TtsError> {
        if self.linear_labels.iter().any(|n| n == name) {
            return Err(TtsError::LabelClash(name.to_string()));
        }
        Ok(intern(&mut self.branching_labels, name))
    }

    /// Sets `δ(q, ℓ)`. Repeated targets are summed; zero entries dropped.
    pub fn set_delta(
        &mut self,
        q: usize,
        label: usize,
        dist: impl IntoIterator<Item = (usize, BigRational)>,
    ) -> Result<(), TtsError> {
        let state = self.linear_states[q].clone();
        let label_name = self.linear_labels[label].clone();
        if self.delta.contains_key(&(q, label)) {
            return Err(TtsError::Duplicate { state, label: label_name });
        }
        let mut out: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (s, p) in dist {
            assert!(s < self.branching_states.len(), "unknown branching state {s}");
            if p < BigRational::zero() {
                return Err(TtsError::NegativeProbability(state));
            }
            *out.entry(s).or_insert_with(BigRational::zero) += p;
        }
        out.retain(|_, p| !p.is_zero());
        let mass: BigRational = out.values().sum();
        if mass > BigRational::one() {
            return Err(TtsError::MassExceedsOne { state, label: label_name, mass: fmt_rational(&mass) });
        }
        self.delta.insert((q, label), out);
        Ok(())
    }

    /// Sets `γ(s, ι)`.
    pub fn set_gamma(&mut self, s: usize, label: usize, seq: Vec<usize>) -> Result<(), TtsError> {
        if self.gamma.contains_key(&(s, label)) {
            return Err(TtsError::Duplicate {
                state: self.branching_states[s].clone(),
                label: self.branching_labels[label].clone(),
            });
        }
        assert!(seq.iter().all(|&q| q < self.linear_states.len()), "unknown linear state");
        self.gamma.insert((s, label), seq);
        Ok(())
    }

    pub fn delta(&self, q: usize, label: usize) -> Option<&BTreeMap<usize, BigRational>> {
        self.delta.get(&(q, label))
    }

    pub fn gamma(&self, s: usize, label: usize) -> Option<&[usize]> {
        self.gamma.get(&(s, label)).map(Vec::as_slice)
    }

    pub fn linear_count(&self) -> usize {
        self.linear_states.len()
    }

    pub fn branching_count(&self) -> usize {
        self.branching_states.len()
    }

    pub fn linear_labels(&self) -> &[String] {
        &self.linear_labels
    }

    pub fn branching_labels(&self) -> &[String] {
        &self.branching_labels
    }

    pub fn linear_name(&self, q: usize) -> &str {
        &self.linear_states[q]
    }

    pub fn branching_name(&self, s: usize) -> &str {
        &self.branching_states[s]
    }

    pub fn find_linear(&self, name: &str) -> Option<usize> {
        self.linear_states.iter().position(|n| n == name)
    }

    pub fn find_branching(&self, name: &str) -> Option<usize> {
        self.branching_states.iter().position(|n| n == name)
    }

    pub fn find_state(&self, name: &str) -> Result<State, TtsError> {
        self.find_linear(name)
            .map(State::Linear)
            .or_else(|| self.find_branching(name).map(State::Branching))
            .ok_or_else(|| TtsError::UnknownState(name.to_string()))
    }

    /// Arities with which each branching label occurs.
    pub(crate) fn arities(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for ((_, label), seq) in &self.gamma {
            let v = out.entry(*label).or_default();
            if !v.contains(&seq.len()) {
                v.push(seq.len());
            }
        }
        for v in out.values_mut() {
            v.sort();
        }
        out
    }

    pub fn parse(text: &str) -> Result<TreeTransitionSystem, TtsError> {
        let mut tts = TreeTransitionSystem::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            parse_line(&mut tts, line).map_err(|msg| match msg {
                LineError::Msg(msg) => TtsError::Parse { line: i + 1, msg },
                LineError::Tts(e) => e,
            })?;
        }
        Ok(tts)
    }
}

enum LineError {
    Msg(String),
    Tts(TtsError),
}

impl From<TtsError> for LineError {
    fn from(e: TtsError) -> LineError {
        LineError::Tts(e)
    }
}

fn parse_line(tts: &mut TreeTransitionSystem, line: &str) -> Result<(), LineError> {
    let msg = |m: &str| LineError::Msg(m.to_string());
    let (kind, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
    let rest = rest.trim();
    let Some((state, arrow)) = rest.split_once("--") else {
        if rest.is_empty() || rest.contains(char::is_whitespace) {
            return Err(msg("expected a state name"));
        }
        return match kind {
            "lin" => tts.linear_state(rest).map(|_| ()).map_err(Into::into),
            "bra" => tts.branching_state(rest).map(|_| ()).map_err(Into::into),
            _ => Err(msg("lines start with `lin` or `bra`")),
        };
    };
    let state = state.trim();
    let Some((label, target)) = arrow.split_once("->") else {
        return Err(msg("expected `--label->`"));
    };
    let label = label.trim();
    let label = label.strip_prefix('(').and_then(|l| l.strip_suffix(')')).unwrap_or(label).trim();
    if state.is_empty() || label.is_empty() {
        return Err(msg("missing state or label"));
    }
    match kind {
        "lin" => {
            let q = tts.linear_state(state)?;
            let l = tts.linear_label(label)?;
            let body = target
                .trim()
                .strip_prefix('{')
                .and_then(|b| b.strip_suffix('}'))
                .ok_or_else(|| msg("expected a distribution `{s: p, ...}`"))?;
            let mut dist = Vec::new();
            for entry in body.split(',').map(str::trim).filter(|e| !e.is_empty()) {
                let (s, p) = entry.split_once(':').ok_or_else(|| msg("expected `state: probability`"))?;
                let p = parse_rational(p).ok_or_else(|| msg("bad probability"))?;
                dist.push((tts.branching_state(s.trim())?, p));
            }
            tts.set_delta(q, l, dist)?;
        }
        "bra" => {
            let s = tts.branching_state(state)?;
            let l = tts.branching_label(label)?;
            let seq = target.split_whitespace().map(|q| tts.linear_state(q)).collect::<Result<Vec<_>, _>>()?;
            tts.set_gamma(s, l, seq)?;
        }
        _ => return Err(msg("lines start with `lin` or `bra`")),
    }
    Ok(())
}

fn fmt_label(name: &str) -> String {
    if name.contains(char::is_whitespace) {
        format!("({name})")
    } else {
        name.to_string()
    }
}

impl fmt::Display for TreeTransitionSystem {
    /// Transitions are listed by label, and states are declared up front
    /// when first use would number them differently, so that parsing the
    /// output gives back the same indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut lines = Vec::new();
        let mut lin_order = Vec::new();
        let mut bra_order = Vec::new();
        let mut seen_lin = vec![false; self.linear_states.len()];
        let mut seen_bra = vec![false; self.branching_states.len()];
        let see = |seen: &mut Vec<bool>, order: &mut Vec<usize>, i: usize| {
            if !std::mem::replace(&mut seen[i], true) {
                order.push(i);
            }
        };
        let mut delta: Vec<_> = self.delta.iter().collect();
        delta.sort_by_key(|((q, l), _)| (*l, *q));
        for ((q, l), dist) in delta {
            see(&mut seen_lin, &mut lin_order, *q);
            let body: Vec<String> = dist
                .iter()
                .map(|(s, p)| {
                    see(&mut seen_bra, &mut bra_order, *s);
                    format!("{}: {}", self.branching_states[*s], fmt_rational(p))
                })
                .collect();
            lines.push(format!(
                "lin {} --{}-> {{{}}}",
                self.linear_states[*q],
                fmt_label(&self.linear_labels[*l]),
                body.join(", ")
            ));
        }
        let mut gamma: Vec<_> = self.gamma.iter().collect();
        gamma.sort_by_key(|((s, l), _)| (*l, *s));
        for ((s, l), seq) in gamma {
            see(&mut seen_bra, &mut bra_order, *s);
            let targets: Vec<&str> = seq
                .iter()
                .map(|q| {
                    see(&mut seen_lin, &mut lin_order, *q);
                    self.linear_states[*q].as_str()
                })
                .collect();
            let sep = if targets.is_empty() { "" } else { " " };
            lines.push(format!(
                "bra {} --{}->{sep}{}",
                self.branching_states[*s],
                fmt_label(&self.branching_labels[*l]),
                targets.join(" ")
            ));
        }
        let in_order = |order: &[usize], n: usize| order.len() == n && order.iter().enumerate().all(|(i, &q)| i == q);
        if !in_order(&lin_order, self.linear_states.len()) {
            for name in &self.linear_states {
                writeln!(f, "lin {name}")?;
            }
        }
        if !in_order(&bra_order, self.branching_states.len()) {
            for name in &self.branching_states {
                writeln!(f, "bra {name}")?;
            }
        }
        for line in lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}
