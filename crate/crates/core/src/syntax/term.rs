use std::collections::BTreeSet;

use super::{Prob, Symbol};

/// The head variable of a head normal form `λx⃗.y P⃗`.
///
/// `Bound(i)` is a de Bruijn index counted from the innermost binder of
/// `x⃗`; indices at or beyond the number of binders point further out.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HeadVar {
    Bound(usize),
    Free(Symbol),
}

/// A probabilistic λ-term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// Bound variable, as a de Bruijn index.
    Var(usize),
    /// Free variable.
    Free(Symbol),
    Abs(Box<Term>),
    App(Box<Term>, Box<Term>),
    /// `M ⊕_p N`: `M` with probability `p`, `N` with probability `1 - p`.
    Choice(Prob, Box<Term>, Box<Term>),
}

impl Term {
    pub fn free(name: &str) -> Term {
        Term::Free(super::symbol(name))
    }

    pub fn abs(body: Term) -> Term {
        Term::Abs(Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    pub fn choice(p: Prob, left: Term, right: Term) -> Term {
        Term::Choice(p, Box::new(left), Box::new(right))
    }

    pub fn lambdas(binders: usize, body: Term) -> Term {
        (0..binders).fold(body, |t, _| Term::abs(t))
    }

    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn from_head(head: &HeadVar) -> Term {
        match head {
            HeadVar::Bound(i) => Term::Var(*i),
            HeadVar::Free(x) => Term::Free(x.clone()),
        }
    }

    /// Number of constructors.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Free(_) => 1,
            Term::Abs(b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Choice(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Decomposes the term as `λx⃗. head P₁ … Pₘ` where `head` is not an
    /// application and, when `m = 0`, not an abstraction.
    pub fn spine(&self) -> (usize, &Term, Vec<&Term>) {
        let mut binders = 0;
        let mut t = self;
        while let Term::Abs(b) = t {
            binders += 1;
            t = b;
        }
        let mut args = Vec::new();
        while let Term::App(f, a) = t {
            args.push(&**a);
            t = f;
        }
        args.reverse();
        (binders, t, args)
    }

    /// Adds `by` to every index `>= cutoff`.
    pub fn shift(&self, by: isize, cutoff: usize) -> Term {
        if by == 0 {
            return self.clone();
        }
        match self {
            Term::Var(i) if *i >= cutoff => Term::Var(shift_index(*i, by)),
            Term::Var(_) | Term::Free(_) => self.clone(),
            Term::Abs(b) => Term::abs(b.shift(by, cutoff + 1)),
            Term::App(f, a) => Term::app(f.shift(by, cutoff), a.shift(by, cutoff)),
            Term::Choice(p, l, r) => Term::choice(p.clone(), l.shift(by, cutoff), r.shift(by, cutoff)),
        }
    }

    /// `self[arg/0]`, where `self` is the body of an abstraction: index 0 is
    /// replaced by `arg` and the other loose indices are decremented.
    pub fn instantiate(&self, arg: &Term) -> Term {
        self.instantiate_at(0, arg)
    }

    fn instantiate_at(&self, depth: usize, arg: &Term) -> Term {
        match self {
            Term::Var(i) if *i == depth => arg.shift(depth as isize, 0),
            Term::Var(i) if *i > depth => Term::Var(i - 1),
            Term::Var(_) | Term::Free(_) => self.clone(),
            Term::Abs(b) => Term::abs(b.instantiate_at(depth + 1, arg)),
            Term::App(f, a) => Term::app(f.instantiate_at(depth, arg), a.instantiate_at(depth, arg)),
            Term::Choice(p, l, r) => {
                Term::choice(p.clone(), l.instantiate_at(depth, arg), r.instantiate_at(depth, arg))
            }
        }
    }

    /// Replaces the free variable `name` by `arg`.
    pub fn substitute_free(&self, name: &str, arg: &Term) -> Term {
        self.subst_free_at(name, arg, 0)
    }

    fn subst_free_at(&self, name: &str, arg: &Term, depth: usize) -> Term {
        match self {
            Term::Free(x) if &**x == name => arg.shift(depth as isize, 0),
            Term::Var(_) | Term::Free(_) => self.clone(),
            Term::Abs(b) => Term::abs(b.subst_free_at(name, arg, depth + 1)),
            Term::App(f, a) => Term::app(f.subst_free_at(name, arg, depth), a.subst_free_at(name, arg, depth)),
            Term::Choice(p, l, r) => {
                Term::choice(p.clone(), l.subst_free_at(name, arg, depth), r.subst_free_at(name, arg, depth))
            }
        }
    }

    pub fn free_names(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Term::Var(_) => {}
            Term::Free(x) => {
                out.insert(x.clone());
            }
            Term::Abs(b) => b.collect_free(out),
            Term::App(f, a) => {
                f.collect_free(out);
                a.collect_free(out);
            }
            Term::Choice(_, l, r) => {
                l.collect_free(out);
                r.collect_free(out);
            }
        }
    }

    /// Number of enclosing binders the term needs: one more than its largest
    /// loose index, or 0 when it has none.
    pub fn loose_bound(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::Free(_) => 0,
            Term::Abs(b) => b.loose_bound().saturating_sub(1),
            Term::App(f, a) => f.loose_bound().max(a.loose_bound()),
            Term::Choice(_, l, r) => l.loose_bound().max(r.loose_bound()),
        }
    }

    pub fn has_choice(&self) -> bool {
        match self {
            Term::Var(_) | Term::Free(_) => false,
            Term::Abs(b) => b.has_choice(),
            Term::App(f, a) => f.has_choice() || a.has_choice(),
            Term::Choice(..) => true,
        }
    }
}

pub(crate) fn shift_index(i: usize, by: isize) -> usize {
    let shifted = i as isize + by;
    debug_assert!(shifted >= 0, "negative de Bruijn index");
    shifted as usize
}
