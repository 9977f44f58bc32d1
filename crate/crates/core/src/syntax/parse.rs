//! Surface syntax.
//!
//! λ-terms: `x | \x y. M | M N | M (+ p) N`, application left-associative,
//! abstraction bodies extending as far right as possible, choice binding
//! weaker than application and associating to the right.
//!
//! Resource terms: `x | \x. s | s [t1, ..., tn] | l{p} s | r{p} s`, tags
//! scoping like abstractions. Combinations: `0` or `c1.s1 + c2.s2 + ...`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::lexer::{Cursor, Tok};
use super::{symbol, Bag, Combination, Prob, Resource, SyntaxError, Term};

/// Named combinators substituted for capitalised identifiers.
#[derive(Debug, Clone, Default)]
pub struct Prelude {
    terms: BTreeMap<String, Term>,
}

impl Prelude {
    pub fn empty() -> Prelude {
        Prelude::default()
    }

    /// `I`, `K`, `S`, `Delta`/`Δ` and `Omega`/`Ω`/`W`.
    pub fn standard() -> Prelude {
        let mut p = Prelude::empty();
        let i = Term::abs(Term::Var(0));
        let k = Term::lambdas(2, Term::Var(1));
        let s =
            Term::lambdas(3, Term::app(Term::app(Term::Var(2), Term::Var(0)), Term::app(Term::Var(1), Term::Var(0))));
        let delta = Term::abs(Term::app(Term::Var(0), Term::Var(0)));
        let omega = Term::app(delta.clone(), delta.clone());
        p.define("I", i);
        p.define("K", k);
        p.define("S", s);
        p.define("Delta", delta.clone());
        p.define("Δ", delta);
        p.define("Omega", omega.clone());
        p.define("Ω", omega.clone());
        p.define("W", omega);
        p
    }

    /// Defines `name`; the term must be closed.
    pub fn define(&mut self, name: &str, term: Term) {
        assert_eq!(term.loose_bound(), 0, "prelude terms must be closed");
        self.terms.insert(name.to_string(), term);
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.terms.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().map(String::as_str)
    }
}

/// Parses a λ-term with the standard prelude.
pub fn parse_lambda(text: &str) -> Result<Term, SyntaxError> {
    parse_lambda_with(text, &Prelude::standard())
}

pub fn parse_lambda_with(text: &str, prelude: &Prelude) -> Result<Term, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let mut env = Vec::new();
    let t = lambda_expr(&mut cur, &mut env, prelude)?;
    cur.finish()?;
    Ok(t)
}

pub(crate) fn rational_literal(cur: &mut Cursor) -> Result<BigRational, SyntaxError> {
    let pos = cur.pos();
    let num = cur.number()?;
    let den = if cur.eat(&Tok::Slash) { cur.number()? } else { "1".to_string() };
    let text = format!("{num}/{den}");
    super::parse_rational(&text).ok_or_else(|| SyntaxError::parse(pos, format!("invalid rational `{text}`")))
}

pub(crate) fn probability(cur: &mut Cursor) -> Result<Prob, SyntaxError> {
    let pos = cur.pos();
    let r = rational_literal(cur)?;
    let shown = super::fmt_rational(&r);
    Prob::new(r).ok_or(SyntaxError::ProbabilityOutOfRange { pos, value: shown })
}

pub(crate) fn binders(cur: &mut Cursor) -> Result<Vec<String>, SyntaxError> {
    let mut names = vec![cur.ident("a bound variable")?];
    while let Tok::Ident(_) = cur.peek() {
        names.push(cur.ident("a bound variable")?);
    }
    cur.expect(&Tok::Dot, "`.` after binders")?;
    Ok(names)
}

pub(crate) fn lookup(env: &[String], name: &str) -> Option<usize> {
    env.iter().rev().position(|n| n == name)
}

fn lambda_expr(cur: &mut Cursor, env: &mut Vec<String>, prelude: &Prelude) -> Result<Term, SyntaxError> {
    if cur.eat(&Tok::Backslash) {
        let names = binders(cur)?;
        let n = names.len();
        env.extend(names);
        let body = lambda_expr(cur, env, prelude);
        env.truncate(env.len() - n);
        return Ok(Term::lambdas(n, body?));
    }
    let left = lambda_app(cur, env, prelude)?;
    if *cur.peek() == Tok::LParen && *cur.peek_at(1) == Tok::Plus {
        cur.bump();
        cur.bump();
        let p = probability(cur)?;
        cur.expect(&Tok::RParen, "`)` closing the choice")?;
        let right = lambda_expr(cur, env, prelude)?;
        return Ok(Term::choice(p, left, right));
    }
    Ok(left)
}

fn lambda_app(cur: &mut Cursor, env: &mut Vec<String>, prelude: &Prelude) -> Result<Term, SyntaxError> {
    let mut t = lambda_atom(cur, env, prelude)?;
    loop {
        match cur.peek() {
            Tok::LParen if *cur.peek_at(1) == Tok::Plus => break,
            Tok::Ident(_) | Tok::LParen => {
                let a = lambda_atom(cur, env, prelude)?;
                t = Term::app(t, a);
            }
            Tok::Backslash => {
                let a = lambda_expr(cur, env, prelude)?;
                t = Term::app(t, a);
                break;
            }
            _ => break,
        }
    }
    Ok(t)
}

fn lambda_atom(cur: &mut Cursor, env: &mut Vec<String>, prelude: &Prelude) -> Result<Term, SyntaxError> {
    match cur.peek().clone() {
        Tok::Ident(name) => {
            cur.bump();
            if let Some(i) = lookup(env, &name) {
                Ok(Term::Var(i))
            } else if let Some(t) = prelude.get(&name) {
                Ok(t.clone())
            } else {
                Ok(Term::Free(symbol(&name)))
            }
        }
        Tok::LParen => {
            cur.bump();
            let t = lambda_expr(cur, env, prelude)?;
            cur.expect(&Tok::RParen, "`)`")?;
            Ok(t)
        }
        _ => Err(cur.error(format!("expected a term, found {}", super::lexer::describe(cur.peek())))),
    }
}

/// Parses a simple resource term. `I` stands for `\x. x`.
pub fn parse_resource(text: &str) -> Result<Resource, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let t = resource_expr(&mut cur, &mut Vec::new())?;
    cur.finish()?;
    Ok(t)
}

/// Parses a simple poly-term `[t1, ..., tn]`.
pub fn parse_bag(text: &str) -> Result<Bag, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let b = bag(&mut cur, &mut Vec::new())?;
    cur.finish()?;
    Ok(b)
}

fn is_tag(cur: &Cursor) -> Option<bool> {
    match (cur.peek(), cur.peek_at(1)) {
        (Tok::Ident(s), Tok::LBrace) if s == "l" => Some(true),
        (Tok::Ident(s), Tok::LBrace) if s == "r" => Some(false),
        _ => None,
    }
}

fn resource_expr(cur: &mut Cursor, env: &mut Vec<String>) -> Result<Resource, SyntaxError> {
    if cur.eat(&Tok::Backslash) {
        let names = binders(cur)?;
        let n = names.len();
        env.extend(names);
        let body = resource_expr(cur, env);
        env.truncate(env.len() - n);
        return Ok(Resource::lambdas(n, body?));
    }
    if let Some(left) = is_tag(cur) {
        cur.bump();
        cur.bump();
        let p = probability(cur)?;
        cur.expect(&Tok::RBrace, "`}` closing the tag probability")?;
        let body = resource_expr(cur, env)?;
        return Ok(if left { Resource::left(p, body) } else { Resource::right(p, body) });
    }
    let mut t = resource_atom(cur, env)?;
    while *cur.peek() == Tok::LBracket {
        let b = bag(cur, env)?;
        t = Resource::app(t, b);
    }
    Ok(t)
}

fn resource_atom(cur: &mut Cursor, env: &mut Vec<String>) -> Result<Resource, SyntaxError> {
    match cur.peek().clone() {
        Tok::Ident(name) => {
            cur.bump();
            if let Some(i) = lookup(env, &name) {
                Ok(Resource::Var(i))
            } else if name == "I" {
                Ok(Resource::abs(Resource::Var(0)))
            } else {
                Ok(Resource::Free(symbol(&name)))
            }
        }
        Tok::LParen => {
            cur.bump();
            let t = resource_expr(cur, env)?;
            cur.expect(&Tok::RParen, "`)`")?;
            Ok(t)
        }
        _ => Err(cur.error(format!("expected a resource term, found {}", super::lexer::describe(cur.peek())))),
    }
}

fn bag(cur: &mut Cursor, env: &mut Vec<String>) -> Result<Bag, SyntaxError> {
    cur.expect(&Tok::LBracket, "`[`")?;
    let mut elems = Vec::new();
    if !cur.eat(&Tok::RBracket) {
        loop {
            elems.push(resource_expr(cur, env)?);
            if cur.eat(&Tok::Comma) {
                continue;
            }
            cur.expect(&Tok::RBracket, "`,` or `]`")?;
            break;
        }
    }
    Ok(Bag::new(elems))
}

fn combination<T: Ord + Clone>(
    text: &str,
    mut item: impl FnMut(&mut Cursor) -> Result<T, SyntaxError>,
) -> Result<Combination<T>, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let mut out = Combination::zero();
    if matches!(cur.peek(), Tok::Number(n) if n == "0") && *cur.peek_at(1) == Tok::Eof {
        return Ok(out);
    }
    loop {
        let pos = cur.pos();
        let c = rational_literal(&mut cur)?;
        if c <= BigRational::zero() {
            return Err(SyntaxError::parse(pos, "coefficients must be positive"));
        }
        cur.expect(&Tok::Dot, "`.` after the coefficient")?;
        let t = item(&mut cur)?;
        out.add_term(t, c);
        if !cur.eat(&Tok::Plus) {
            break;
        }
    }
    cur.finish()?;
    Ok(out)
}

/// Parses `c1.s1 + ... + cn.sn` (or `0`) over simple terms.
pub fn parse_term_combination(text: &str) -> Result<Combination<Resource>, SyntaxError> {
    combination(text, |cur| resource_expr(cur, &mut Vec::new()))
}

/// Parses `c1.[..] + ... + cn.[..]` (or `0`) over simple poly-terms.
pub fn parse_bag_combination(text: &str) -> Result<Combination<Bag>, SyntaxError> {
    combination(text, |cur| bag(cur, &mut Vec::new()))
}
