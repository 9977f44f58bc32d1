//! Tests on tree transition systems: `ω`, conjunction, a linear step
//! `ℓ(T)` that averages a branching test over `δ(q, ℓ)`, and a branching
//! step `ι(T₁, …, Tₖ)` that multiplies linear tests along `γ(s, ι)`.

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{fmt_label, State, TreeTransitionSystem, TtsError};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinearTest {
    Omega,
    And(Box<LinearTest>, Box<LinearTest>),
    Step(usize, Box<BranchingTest>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BranchingTest {
    Omega,
    And(Box<BranchingTest>, Box<BranchingTest>),
    Step(usize, Vec<LinearTest>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TtsTest {
    Linear(LinearTest),
    Branching(BranchingTest),
}

impl LinearTest {
    pub fn and(a: LinearTest, b: LinearTest) -> LinearTest {
        LinearTest::And(Box::new(a), Box::new(b))
    }

    pub fn step(label: usize, t: BranchingTest) -> LinearTest {
        LinearTest::Step(label, Box::new(t))
    }

    /// Nesting depth of steps of either kind.
    pub fn depth(&self) -> usize {
        match self {
            LinearTest::Omega => 0,
            LinearTest::And(a, b) => a.depth().max(b.depth()),
            LinearTest::Step(_, t) => 1 + t.depth(),
        }
    }

    pub fn show(&self, tts: &TreeTransitionSystem) -> String {
        match self {
            LinearTest::Omega => "w".into(),
            LinearTest::And(a, b) => format!("{} & {}", a.show_nested(tts), b.show(tts)),
            LinearTest::Step(l, t) => format!("{}({})", fmt_label(&tts.linear_labels()[*l]), t.show(tts)),
        }
    }

    fn show_nested(&self, tts: &TreeTransitionSystem) -> String {
        match self {
            LinearTest::And(..) => format!("({})", self.show(tts)),
            _ => self.show(tts),
        }
    }
}

impl BranchingTest {
    pub fn and(a: BranchingTest, b: BranchingTest) -> BranchingTest {
        BranchingTest::And(Box::new(a), Box::new(b))
    }

    pub fn depth(&self) -> usize {
        match self {
            BranchingTest::Omega => 0,
            BranchingTest::And(a, b) => a.depth().max(b.depth()),
            BranchingTest::Step(_, ts) => 1 + ts.iter().map(LinearTest::depth).max().unwrap_or(0),
        }
    }

    pub fn show(&self, tts: &TreeTransitionSystem) -> String {
        match self {
            BranchingTest::Omega => "w".into(),
            BranchingTest::And(a, b) => {
                let left = match **a {
                    BranchingTest::And(..) => format!("({})", a.show(tts)),
                    _ => a.show(tts),
                };
                format!("{left} & {}", b.show(tts))
            }
            BranchingTest::Step(l, ts) => {
                let args: Vec<String> = ts.iter().map(|t| t.show(tts)).collect();
                format!("{}({})", fmt_label(&tts.branching_labels()[*l]), args.join(", "))
            }
        }
    }
}

impl TtsTest {
    pub fn show(&self, tts: &TreeTransitionSystem) -> String {
        match self {
            TtsTest::Linear(t) => t.show(tts),
            TtsTest::Branching(t) => t.show(tts),
        }
    }

    /// Parses a test of the given kind, resolving labels against `tts`.
    pub fn parse(tts: &TreeTransitionSystem, text: &str, linear: bool) -> Result<TtsTest, TtsError> {
        let mut p = TestParser { tts, src: text.as_bytes(), pos: 0 };
        let t = if linear { TtsTest::Linear(p.linear()?) } else { TtsTest::Branching(p.branching()?) };
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(t)
    }
}

pub fn eval_linear(tts: &TreeTransitionSystem, q: usize, test: &LinearTest) -> BigRational {
    match test {
        LinearTest::Omega => BigRational::one(),
        LinearTest::And(a, b) => eval_linear(tts, q, a) * eval_linear(tts, q, b),
        LinearTest::Step(l, t) => match tts.delta(q, *l) {
            None => BigRational::zero(),
            Some(dist) => dist.iter().map(|(s, p)| p * eval_branching(tts, *s, t)).sum(),
        },
    }
}

pub fn eval_branching(tts: &TreeTransitionSystem, s: usize, test: &BranchingTest) -> BigRational {
    match test {
        BranchingTest::Omega => BigRational::one(),
        BranchingTest::And(a, b) => eval_branching(tts, s, a) * eval_branching(tts, s, b),
        BranchingTest::Step(l, ts) => match tts.gamma(s, *l) {
            Some(seq) if seq.len() == ts.len() => seq.iter().zip(ts).map(|(q, t)| eval_linear(tts, *q, t)).product(),
            _ => BigRational::zero(),
        },
    }
}

/// `Pr(T, state)`; the test and the state must be of the same kind.
pub fn eval_tts_test(tts: &TreeTransitionSystem, state: State, test: &TtsTest) -> Result<BigRational, TtsError> {
    match (state, test) {
        (State::Linear(q), TtsTest::Linear(t)) => Ok(eval_linear(tts, q, t)),
        (State::Branching(s), TtsTest::Branching(t)) => Ok(eval_branching(tts, s, t)),
        (State::Linear(_), TtsTest::Branching(_)) => Err(TtsError::KindMismatch { test: "branching", state: "linear" }),
        (State::Branching(_), TtsTest::Linear(_)) => Err(TtsError::KindMismatch { test: "linear", state: "branching" }),
    }
}

/// Bounds for test enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestBudget {
    pub depth: usize,
    /// Conjunctions of at most this many tests are formed at each level.
    pub max_conjuncts: usize,
    /// Distinct tests kept per kind; later candidates are dropped.
    pub pool_limit: usize,
}

impl TestBudget {
    pub fn new(depth: usize) -> TestBudget {
        TestBudget { depth, max_conjuncts: 2, pool_limit: 256 }
    }
}

/// Enumerated tests, one per distinct vector of success probabilities
/// over the states of the system.
///
/// The value of a compound test at a state only depends on the values of
/// its parts, so keeping a single test per vector loses nothing.
#[derive(Debug, Clone)]
pub struct TestPool {
    pub linear: Vec<(LinearTest, Vec<BigRational>)>,
    pub branching: Vec<(BranchingTest, Vec<BigRational>)>,
}

struct Deduped<T> {
    items: Vec<(T, Vec<BigRational>)>,
    seen: HashSet<Vec<BigRational>>,
    limit: usize,
}

impl<T> Deduped<T> {
    fn new(limit: usize) -> Deduped<T> {
        Deduped { items: Vec::new(), seen: HashSet::new(), limit }
    }

    fn push(&mut self, t: T, values: Vec<BigRational>) {
        if self.items.len() >= self.limit || self.seen.contains(&values) {
            return;
        }
        self.seen.insert(values.clone());
        self.items.push((t, values));
    }

    fn full(&self) -> bool {
        self.items.len() >= self.limit
    }
}

fn product(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn conjoin<T: Clone>(pool: &mut Deduped<T>, from: usize, max_conjuncts: usize, and: impl Fn(T, T) -> T) {
    if max_conjuncts < 2 {
        return;
    }
    // one round of pairing per extra conjunct, new items against all
    let mut start = from;
    for _ in 1..max_conjuncts {
        let end = pool.items.len();
        for i in start..end {
            for j in 0..end {
                if pool.full() {
                    return;
                }
                if j >= start && j <= i {
                    continue;
                }
                let (a, va) = &pool.items[j];
                let (b, vb) = &pool.items[i];
                let (t, v) = (and(a.clone(), b.clone()), product(va, vb));
                pool.push(t, v);
            }
        }
        start = end;
    }
}

/// Every test of depth at most `budget.depth`, up to equal values.
/// Order: by depth, then label, then conjunctions.
pub fn enumerate_tests(tts: &TreeTransitionSystem, budget: &TestBudget) -> TestPool {
    let nq = tts.linear_count();
    let ns = tts.branching_count();
    let arities = tts.arities();

    let mut lin: Deduped<LinearTest> = Deduped::new(budget.pool_limit);
    let mut bra: Deduped<BranchingTest> = Deduped::new(budget.pool_limit);
    lin.push(LinearTest::Omega, vec![BigRational::one(); nq]);
    bra.push(BranchingTest::Omega, vec![BigRational::one(); ns]);

    for _ in 0..budget.depth {
        let prev_lin = lin.items.clone();
        let prev_bra = bra.items.clone();

        let lin_start = lin.items.len();
        for l in 0..tts.linear_labels().len() {
            for (b, vb) in &prev_bra {
                let values = (0..nq)
                    .map(|q| match tts.delta(q, l) {
                        None => BigRational::zero(),
                        Some(dist) => dist.iter().map(|(s, p)| p * &vb[*s]).sum(),
                    })
                    .collect();
                lin.push(LinearTest::step(l, b.clone()), values);
            }
        }
        conjoin(&mut lin, lin_start, budget.max_conjuncts, LinearTest::and);

        let bra_start = bra.items.len();
        for (label, ks) in &arities {
            for &k in ks {
                for_each_tuple(prev_lin.len(), k, &mut |combo| {
                    let values = (0..ns)
                        .map(|s| match tts.gamma(s, *label) {
                            Some(seq) if seq.len() == k => {
                                seq.iter().zip(combo).map(|(q, &i)| prev_lin[i].1[*q].clone()).product()
                            }
                            _ => BigRational::zero(),
                        })
                        .collect();
                    let args = combo.iter().map(|&i| prev_lin[i].0.clone()).collect();
                    bra.push(BranchingTest::Step(*label, args), values);
                    !bra.full()
                });
            }
        }
        conjoin(&mut bra, bra_start, budget.max_conjuncts, BranchingTest::and);
    }
    TestPool { linear: lin.items, branching: bra.items }
}

/// Visits the `k`-tuples over `0..n`, smallest index sum first, until
/// `visit` returns false.
fn for_each_tuple(n: usize, k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) {
    fn go(n: usize, left: usize, sum: usize, acc: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if left == 0 {
            return sum != 0 || visit(acc);
        }
        for i in 0..n.min(sum + 1) {
            if left == 1 && i != sum {
                continue;
            }
            acc.push(i);
            let go_on = go(n, left - 1, sum - i, acc, visit);
            acc.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
    if n == 0 && k > 0 {
        return;
    }
    let mut acc = Vec::with_capacity(k);
    for total in 0..=k * n.saturating_sub(1) {
        if !go(n, k, total, &mut acc, visit) {
            return;
        }
    }
}

/// A linear test of depth at most `depth` on which `q` and `r` have
/// different success probabilities, if the enumeration finds one.
pub fn distinguishing_test_search(tts: &TreeTransitionSystem, q: usize, r: usize, depth: usize) -> Option<LinearTest> {
    let pool = enumerate_tests(tts, &TestBudget::new(depth));
    pool.linear.into_iter().find(|(_, v)| v[q] != v[r]).map(|(t, _)| t)
}

struct TestParser<'a> {
    tts: &'a TreeTransitionSystem,
    src: &'a [u8],
    pos: usize,
}

impl TestParser<'_> {
    fn error(&self, msg: &str) -> TtsError {
        TtsError::Parse { line: 1, msg: format!("column {}: {msg}", self.pos + 1) }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), TtsError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    /// Index just past the parenthesis matching the one at `pos`.
    fn matching(&self, pos: usize) -> Option<usize> {
        let mut level = 0;
        for (i, &c) in self.src.iter().enumerate().skip(pos) {
            match c {
                b'(' => level += 1,
                b')' => {
                    level -= 1;
                    if level == 0 {
                        return Some(i + 1);
                    }
                }
                _ => {}
            }
        }
        None
    }

    /// A label followed by `(`, or `None` when the input continues with
    /// something else.
    fn label(&mut self) -> Result<Option<String>, TtsError> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'(') {
            let end = self.matching(start).ok_or_else(|| self.error("unbalanced parenthesis"))?;
            let after = self.src[end..].iter().position(|c| !c.is_ascii_whitespace()).map(|i| end + i);
            if after.map(|i| self.src[i]) != Some(b'(') {
                return Ok(None);
            }
            self.pos = end;
            let inner = std::str::from_utf8(&self.src[start + 1..end - 1]).expect("ascii slice");
            return Ok(Some(inner.trim().to_string()));
        }
        let mut end = start;
        while end < self.src.len() && !b"()&, \t\n".contains(&self.src[end]) {
            end += 1;
        }
        if end == start {
            return Ok(None);
        }
        let word = std::str::from_utf8(&self.src[start..end]).map_err(|_| self.error("bad label"))?;
        self.pos = end;
        if self.peek() != Some(b'(') {
            if word == "w" || word == "ω" {
                return Ok(Some(String::new()));
            }
            return Err(self.error("expected `(` after the label"));
        }
        Ok(Some(word.to_string()))
    }

    fn linear(&mut self) -> Result<LinearTest, TtsError> {
        let mut t = self.linear_atom()?;
        let mut rest = Vec::new();
        while self.eat(b'&') {
            rest.push(self.linear_atom()?);
        }
        if let Some(last) = rest.pop() {
            let tail = rest.into_iter().rev().fold(last, |acc, x| LinearTest::and(x, acc));
            t = LinearTest::and(t, tail);
        }
        Ok(t)
    }

    fn linear_atom(&mut self) -> Result<LinearTest, TtsError> {
        match self.label()? {
            Some(l) if l.is_empty() => Ok(LinearTest::Omega),
            Some(l) => {
                let label = self
                    .tts
                    .linear_labels()
                    .iter()
                    .position(|x| *x == l)
                    .ok_or_else(|| self.error(&format!("unknown linear label `{l}`")))?;
                self.expect(b'(')?;
                let inner = self.branching()?;
                self.expect(b')')?;
                Ok(LinearTest::step(label, inner))
            }
            None => {
                self.expect(b'(')?;
                let t = self.linear()?;
                self.expect(b')')?;
                Ok(t)
            }
        }
    }

    fn branching(&mut self) -> Result<BranchingTest, TtsError> {
        let mut t = self.branching_atom()?;
        let mut rest = Vec::new();
        while self.eat(b'&') {
            rest.push(self.branching_atom()?);
        }
        if let Some(last) = rest.pop() {
            let tail = rest.into_iter().rev().fold(last, |acc, x| BranchingTest::and(x, acc));
            t = BranchingTest::and(t, tail);
        }
        Ok(t)
    }

    fn branching_atom(&mut self) -> Result<BranchingTest, TtsError> {
        match self.label()? {
            Some(l) if l.is_empty() => Ok(BranchingTest::Omega),
            Some(l) => {
                let label = self
                    .tts
                    .branching_labels()
                    .iter()
                    .position(|x| *x == l)
                    .ok_or_else(|| self.error(&format!("unknown branching label `{l}`")))?;
                self.expect(b'(')?;
                let mut args = Vec::new();
                if !self.eat(b')') {
                    loop {
                        args.push(self.linear()?);
                        if self.eat(b',') {
                            continue;
                        }
                        self.expect(b')')?;
                        break;
                    }
                }
                Ok(BranchingTest::Step(label, args))
            }
            None => {
                self.expect(b'(')?;
                let t = self.branching()?;
                self.expect(b')')?;
                Ok(t)
            }
        }
    }
}
