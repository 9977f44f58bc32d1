//! Printing in the same syntax the parser reads.
//!
//! Binders are named from their depth, skipping names that occur free, so
//! printing is a function of the α-class and the output parses back to the
//! same term.

use std::collections::BTreeSet;
use std::fmt::{self, Display, Write};

use num_rational::BigRational;
use num_traits::One;

use super::{Bag, Combination, Resource, Simple, Symbol, Term};

const BASE_NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

/// Name for the binder at `depth` that avoids every name in `avoid`.
pub fn binder_name(depth: usize, avoid: &BTreeSet<Symbol>) -> String {
    (0..)
        .map(|k: usize| {
            let base = BASE_NAMES[k % BASE_NAMES.len()];
            match k / BASE_NAMES.len() {
                0 => base.to_string(),
                n => format!("{base}{n}"),
            }
        })
        .filter(|n| !avoid.contains(n.as_str()) && !matches!(n.as_str(), "l" | "r"))
        .nth(depth)
        .expect("infinitely many candidates")
}

/// `n` or `n/d`.
pub fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

struct Names<'a> {
    avoid: &'a BTreeSet<Symbol>,
    bound: Vec<String>,
}

impl Names<'_> {
    fn push(&mut self) -> &str {
        let n = binder_name(self.bound.len(), self.avoid);
        self.bound.push(n);
        self.bound.last().unwrap()
    }

    fn pop(&mut self, n: usize) {
        self.bound.truncate(self.bound.len() - n);
    }

    fn var(&self, i: usize) -> String {
        match self.bound.len().checked_sub(i + 1) {
            Some(k) => self.bound[k].clone(),
            None => format!("#{}", i - self.bound.len()),
        }
    }
}

// Precedence: 0 anywhere, 1 function position, 2 argument position.
fn term(t: &Term, names: &mut Names, prec: u8, out: &mut String) {
    match t {
        Term::Var(i) => out.push_str(&names.var(*i)),
        Term::Free(x) => out.push_str(x),
        Term::Abs(_) => {
            let (n, body) = peel_abs(t);
            if prec > 0 {
                out.push('(');
            }
            out.push('\\');
            for k in 0..n {
                if k > 0 {
                    out.push(' ');
                }
                let name = names.push().to_string();
                out.push_str(&name);
            }
            out.push_str(". ");
            term(body, names, 0, out);
            names.pop(n);
            if prec > 0 {
                out.push(')');
            }
        }
        Term::App(f, a) => {
            if prec > 1 {
                out.push('(');
            }
            term(f, names, 1, out);
            out.push(' ');
            term(a, names, 2, out);
            if prec > 1 {
                out.push(')');
            }
        }
        Term::Choice(p, l, r) => {
            if prec > 0 {
                out.push('(');
            }
            term(l, names, 1, out);
            let _ = write!(out, " (+ {p}) ");
            term(r, names, 0, out);
            if prec > 0 {
                out.push(')');
            }
        }
    }
}

fn peel_abs(mut t: &Term) -> (usize, &Term) {
    let mut n = 0;
    while let Term::Abs(b) = t {
        n += 1;
        t = b;
    }
    (n, t)
}

// Precedence: 0 anywhere, 1 function position.
fn resource(t: &Resource, names: &mut Names, prec: u8, out: &mut String) {
    match t {
        Resource::Var(i) => out.push_str(&names.var(*i)),
        Resource::Free(x) => out.push_str(x),
        Resource::Abs(_) => {
            let mut n = 0;
            let mut body = t;
            while let Resource::Abs(b) = body {
                n += 1;
                body = b;
            }
            if prec > 0 {
                out.push('(');
            }
            out.push('\\');
            for k in 0..n {
                if k > 0 {
                    out.push(' ');
                }
                let name = names.push().to_string();
                out.push_str(&name);
            }
            out.push_str(". ");
            resource(body, names, 0, out);
            names.pop(n);
            if prec > 0 {
                out.push(')');
            }
        }
        Resource::Left(p, b) | Resource::Right(p, b) => {
            if prec > 0 {
                out.push('(');
            }
            let side = if matches!(t, Resource::Left(..)) { 'l' } else { 'r' };
            let _ = write!(out, "{side}{{{p}}} ");
            resource(b, names, 0, out);
            if prec > 0 {
                out.push(')');
            }
        }
        Resource::App(f, bag) => {
            resource(f, names, 1, out);
            out.push(' ');
            bag_into(bag, names, out);
        }
    }
}

fn bag_into(bag: &Bag, names: &mut Names, out: &mut String) {
    out.push('[');
    for (k, u) in bag.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        resource(u, names, 0, out);
    }
    out.push(']');
}

impl Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let avoid = self.free_names();
        let mut names = Names { avoid: &avoid, bound: Vec::new() };
        let mut out = String::new();
        term(self, &mut names, 0, &mut out);
        f.write_str(&out)
    }
}

impl Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let avoid = self.free_names();
        let mut names = Names { avoid: &avoid, bound: Vec::new() };
        let mut out = String::new();
        resource(self, &mut names, 0, &mut out);
        f.write_str(&out)
    }
}

impl Display for Bag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let avoid = self.free_names();
        let mut names = Names { avoid: &avoid, bound: Vec::new() };
        let mut out = String::new();
        bag_into(self, &mut names, &mut out);
        f.write_str(&out)
    }
}

impl<T: Ord + Clone + Display> Display for Combination<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (t, c)) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}.{}", fmt_rational(c), t)?;
        }
        Ok(())
    }
}

impl<T: Ord + Clone + Display> Combination<T> {
    /// `[{"term": .., "num": .., "den": ..}, ..]` in canonical order.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.iter()
                .map(|(t, c)| {
                    serde_json::json!({
                        "term": t.to_string(),
                        "num": c.numer().to_string(),
                        "den": c.denom().to_string(),
                    })
                })
                .collect(),
        )
    }
}
