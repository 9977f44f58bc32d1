//! Böhm tests: `T ::= ω | T ∧ T | ev(t)` on terms and
//! `t ::= ω | t ∧ t | (λx₁…xₙ.y)(T₁, …, Tₘ)` on head normal forms.
//!
//! Surface syntax: `w`, `T & U`, `ev(t)`, `(\x y. z)(T1, T2)`, and
//! `z(T1, ...)` when there are no binders.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::operational::{head_reductions, HeadNormalForm};
use crate::syntax::lexer::{Cursor, Tok};
use crate::syntax::{binder_name, fmt_rational, symbol, HeadVar, Symbol, SyntaxError, Term};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermTest {
    Omega,
    And(Box<TermTest>, Box<TermTest>),
    Ev(Box<HnfTest>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HnfTest {
    Omega,
    And(Box<HnfTest>, Box<HnfTest>),
    /// Succeeds on `λx₁…xₙ. y M₁ … Mₘ` with probability `Π Pr(Tᵢ, Mᵢ)`.
    Head {
        binders: usize,
        head: HeadVar,
        args: Vec<TermTest>,
    },
}

/// A closed interval of probabilities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lower: BigRational,
    pub upper: BigRational,
}

impl Interval {
    pub fn exact(v: BigRational) -> Interval {
        Interval { lower: v.clone(), upper: v }
    }

    pub fn one() -> Interval {
        Interval::exact(BigRational::one())
    }

    pub fn zero() -> Interval {
        Interval::exact(BigRational::zero())
    }

    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }

    /// Product of intervals of nonnegative numbers.
    pub fn times(&self, other: &Interval) -> Interval {
        Interval { lower: &self.lower * &other.lower, upper: &self.upper * &other.upper }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lower == self.upper {
            write!(f, "{}", fmt_rational(&self.lower))
        } else {
            write!(f, "[{}, {}]", fmt_rational(&self.lower), fmt_rational(&self.upper))
        }
    }
}

impl TermTest {
    pub fn and(a: TermTest, b: TermTest) -> TermTest {
        TermTest::And(Box::new(a), Box::new(b))
    }

    pub fn ev(t: HnfTest) -> TermTest {
        TermTest::Ev(Box::new(t))
    }

    /// Right-nested conjunction; `ω` when empty.
    pub fn all(tests: Vec<TermTest>) -> TermTest {
        let mut it = tests.into_iter().rev();
        match it.next() {
            None => TermTest::Omega,
            Some(last) => it.fold(last, |acc, t| TermTest::and(t, acc)),
        }
    }

    /// The conjuncts, with nested conjunctions flattened and `ω` dropped.
    pub fn conjuncts(&self) -> Vec<&TermTest> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a TermTest, out: &mut Vec<&'a TermTest>) {
            match t {
                TermTest::Omega => {}
                TermTest::And(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                TermTest::Ev(_) => out.push(t),
            }
        }
        go(self, &mut out);
        out
    }

    /// Canonical representative modulo associativity and commutativity of
    /// `∧` and `ω ∧ T ≃ T`.
    pub fn normalized(&self) -> TermTest {
        let mut parts: Vec<TermTest> = self
            .conjuncts()
            .into_iter()
            .map(|t| match t {
                TermTest::Ev(h) => TermTest::ev(h.normalized()),
                _ => unreachable!(),
            })
            .collect();
        parts.sort();
        TermTest::all(parts)
    }

    /// Whether the test lies in the resource fragment: no `ω` or `∧` at
    /// head-normal-form level.
    pub fn is_resource(&self) -> bool {
        match self {
            TermTest::Omega => true,
            TermTest::And(a, b) => a.is_resource() && b.is_resource(),
            TermTest::Ev(h) => h.is_resource(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            TermTest::Omega => 1,
            TermTest::And(a, b) => 1 + a.size() + b.size(),
            TermTest::Ev(h) => 1 + h.size(),
        }
    }

    fn collect_free(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            TermTest::Omega => {}
            TermTest::And(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            TermTest::Ev(h) => h.collect_free(out),
        }
    }
}

impl HnfTest {
    pub fn and(a: HnfTest, b: HnfTest) -> HnfTest {
        HnfTest::And(Box::new(a), Box::new(b))
    }

    pub fn head(binders: usize, head: HeadVar, args: Vec<TermTest>) -> HnfTest {
        HnfTest::Head { binders, head, args }
    }

    pub fn all(tests: Vec<HnfTest>) -> HnfTest {
        let mut it = tests.into_iter().rev();
        match it.next() {
            None => HnfTest::Omega,
            Some(last) => it.fold(last, |acc, t| HnfTest::and(t, acc)),
        }
    }

    pub fn conjuncts(&self) -> Vec<&HnfTest> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a HnfTest, out: &mut Vec<&'a HnfTest>) {
            match t {
                HnfTest::Omega => {}
                HnfTest::And(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                HnfTest::Head { .. } => out.push(t),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn normalized(&self) -> HnfTest {
        let mut parts: Vec<HnfTest> = self
            .conjuncts()
            .into_iter()
            .map(|t| match t {
                HnfTest::Head { binders, head, args } => HnfTest::Head {
                    binders: *binders,
                    head: head.clone(),
                    args: args.iter().map(TermTest::normalized).collect(),
                },
                _ => unreachable!(),
            })
            .collect();
        parts.sort();
        HnfTest::all(parts)
    }

    pub fn is_resource(&self) -> bool {
        match self {
            HnfTest::Head { args, .. } => args.iter().all(TermTest::is_resource),
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            HnfTest::Omega => 1,
            HnfTest::And(a, b) => 1 + a.size() + b.size(),
            HnfTest::Head { args, .. } => 1 + args.iter().map(TermTest::size).sum::<usize>(),
        }
    }

    fn collect_free(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            HnfTest::Omega => {}
            HnfTest::And(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            HnfTest::Head { head, args, .. } => {
                if let HeadVar::Free(x) = head {
                    out.insert(x.clone());
                }
                for a in args {
                    a.collect_free(out);
                }
            }
        }
    }
}

/// `Pr(T, M)`, as an interval: head-reduction branches left unresolved by
/// the fuel may or may not pass.
pub fn eval_btt(test: &TermTest, m: &Term, fuel: usize) -> Interval {
    match test {
        TermTest::Omega => Interval::one(),
        TermTest::And(a, b) => eval_btt(a, m, fuel).times(&eval_btt(b, m, fuel)),
        TermTest::Ev(t) => {
            let frontier = head_reductions(m, fuel);
            let mut out = Interval::zero();
            for r in &frontier.resolved {
                let inner = eval_bht(t, &r.hnf, fuel);
                let p = r.choices.prob();
                out.lower += &p * inner.lower;
                out.upper += p * inner.upper;
            }
            out.upper += frontier.residual();
            out
        }
    }
}

/// `Pr(t, h)`.
pub fn eval_bht(test: &HnfTest, h: &HeadNormalForm, fuel: usize) -> Interval {
    match test {
        HnfTest::Omega => Interval::one(),
        HnfTest::And(a, b) => eval_bht(a, h, fuel).times(&eval_bht(b, h, fuel)),
        HnfTest::Head { binders, head, args } => {
            if *binders != h.binders || *head != h.head || args.len() != h.args.len() {
                return Interval::zero();
            }
            args.iter().zip(&h.args).fold(Interval::one(), |acc, (t, m)| acc.times(&eval_btt(t, m, fuel)))
        }
    }
}

/// Parses a term test.
pub fn parse_btt(text: &str) -> Result<TermTest, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let t = term_test(&mut cur, &mut Vec::new())?;
    cur.finish()?;
    Ok(t)
}

fn is_omega(tok: &Tok) -> bool {
    matches!(tok, Tok::Ident(s) if s == "w" || s == "ω")
}

fn term_test(cur: &mut Cursor, env: &mut Vec<String>) -> Result<TermTest, SyntaxError> {
    let mut parts = vec![term_test_atom(cur, env)?];
    while cur.eat(&Tok::Amp) {
        parts.push(term_test_atom(cur, env)?);
    }
    Ok(TermTest::all(parts))
}

fn term_test_atom(cur: &mut Cursor, env: &mut Vec<String>) -> Result<TermTest, SyntaxError> {
    if is_omega(cur.peek()) {
        cur.bump();
        return Ok(TermTest::Omega);
    }
    if matches!(cur.peek(), Tok::Ident(s) if s == "ev") {
        cur.bump();
        cur.expect(&Tok::LParen, "`(` after ev")?;
        let t = hnf_test(cur, env)?;
        cur.expect(&Tok::RParen, "`)`")?;
        return Ok(TermTest::ev(t));
    }
    if cur.eat(&Tok::LParen) {
        let t = term_test(cur, env)?;
        cur.expect(&Tok::RParen, "`)`")?;
        return Ok(t);
    }
    Err(cur.error("expected `w`, `ev(...)` or a parenthesized test"))
}

fn hnf_test(cur: &mut Cursor, env: &mut Vec<String>) -> Result<HnfTest, SyntaxError> {
    let mut parts = vec![hnf_test_atom(cur, env)?];
    while cur.eat(&Tok::Amp) {
        parts.push(hnf_test_atom(cur, env)?);
    }
    Ok(HnfTest::all(parts))
}

fn hnf_test_atom(cur: &mut Cursor, env: &mut Vec<String>) -> Result<HnfTest, SyntaxError> {
    if is_omega(cur.peek()) {
        cur.bump();
        return Ok(HnfTest::Omega);
    }
    let (names, head_name) = match (cur.peek().clone(), cur.peek_at(1).clone()) {
        (Tok::LParen, Tok::Backslash) => {
            cur.bump();
            cur.bump();
            let names = crate::syntax::parse::binders(cur)?;
            let head = cur.ident("a head variable")?;
            cur.expect(&Tok::RParen, "`)` after the head variable")?;
            (names, head)
        }
        (Tok::LParen, _) => {
            cur.bump();
            let t = hnf_test(cur, env)?;
            cur.expect(&Tok::RParen, "`)`")?;
            return Ok(t);
        }
        (Tok::Ident(y), _) => {
            cur.bump();
            (Vec::new(), y)
        }
        _ => return Err(cur.error("expected a head test")),
    };
    let n = names.len();
    env.extend(names);
    let result = (|| {
        let head = match crate::syntax::parse::lookup(env, &head_name) {
            Some(i) => HeadVar::Bound(i),
            None => HeadVar::Free(symbol(&head_name)),
        };
        cur.expect(&Tok::LParen, "`(` opening the argument tests")?;
        let mut args = Vec::new();
        if !cur.eat(&Tok::RParen) {
            loop {
                args.push(term_test(cur, env)?);
                if cur.eat(&Tok::Comma) {
                    continue;
                }
                cur.expect(&Tok::RParen, "`,` or `)`")?;
                break;
            }
        }
        Ok(HnfTest::head(n, head, args))
    })();
    env.truncate(env.len() - n);
    result
}

struct Printer<'a> {
    avoid: &'a BTreeSet<Symbol>,
    bound: Vec<String>,
}

impl Printer<'_> {
    fn term_test(&mut self, t: &TermTest, nested: bool, out: &mut String) {
        match t {
            TermTest::Omega => out.push('w'),
            TermTest::And(a, b) => {
                if nested {
                    out.push('(');
                }
                self.term_test(a, true, out);
                out.push_str(" & ");
                self.term_test(b, false, out);
                if nested {
                    out.push(')');
                }
            }
            TermTest::Ev(h) => {
                out.push_str("ev(");
                self.hnf_test(h, false, out);
                out.push(')');
            }
        }
    }

    fn hnf_test(&mut self, t: &HnfTest, nested: bool, out: &mut String) {
        match t {
            HnfTest::Omega => out.push('w'),
            HnfTest::And(a, b) => {
                if nested {
                    out.push('(');
                }
                self.hnf_test(a, true, out);
                out.push_str(" & ");
                self.hnf_test(b, false, out);
                if nested {
                    out.push(')');
                }
            }
            HnfTest::Head { binders, head, args } => {
                let mut names = Vec::new();
                for _ in 0..*binders {
                    let name = binder_name(self.bound.len(), self.avoid);
                    self.bound.push(name.clone());
                    names.push(name);
                }
                let head_name = match head {
                    HeadVar::Bound(i) => match self.bound.len().checked_sub(i + 1) {
                        Some(k) => self.bound[k].clone(),
                        None => format!("#{}", i - self.bound.len()),
                    },
                    HeadVar::Free(x) => x.to_string(),
                };
                if names.is_empty() {
                    out.push_str(&head_name);
                } else {
                    out.push_str(&format!("(\\{}. {head_name})", names.join(" ")));
                }
                out.push('(');
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    self.term_test(a, false, out);
                }
                out.push(')');
                self.bound.truncate(self.bound.len() - binders);
            }
        }
    }
}

fn test_avoid(t: &TermTest) -> BTreeSet<Symbol> {
    let mut avoid = BTreeSet::new();
    t.collect_free(&mut avoid);
    avoid.insert(symbol("w"));
    avoid.insert(symbol("ev"));
    avoid
}

impl fmt::Display for TermTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let avoid = test_avoid(self);
        let mut p = Printer { avoid: &avoid, bound: Vec::new() };
        let mut out = String::new();
        p.term_test(self, false, &mut out);
        f.write_str(&out)
    }
}

impl fmt::Display for HnfTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let avoid = test_avoid(&TermTest::ev(self.clone()));
        let mut p = Printer { avoid: &avoid, bound: Vec::new() };
        let mut out = String::new();
        p.hnf_test(self, false, &mut out);
        f.write_str(&out)
    }
}
