use std::collections::BTreeSet;
use std::fmt;

use super::term::shift_index;
use super::{HeadVar, Prob, Symbol};

/// A probabilistic simple resource term.
///
/// The derived order (constructor tag, then probability, then children) is
/// the total order used to store bags canonically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Resource {
    Var(usize),
    Free(Symbol),
    Abs(Box<Resource>),
    /// Linear application `s t̄` of a term to a bag.
    App(Box<Resource>, Bag),
    /// Explicit left choice tag `l_p s`.
    Left(Prob, Box<Resource>),
    /// Explicit right choice tag `r_p s`.
    Right(Prob, Box<Resource>),
}

/// A simple poly-term: a finite multiset of simple terms, kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bag(Vec<Resource>);

/// Operations shared by simple terms and simple poly-terms.
pub trait Simple: Clone + Ord + fmt::Debug + fmt::Display + Send + Sync {
    /// Constructor count: variables are 1, abstractions, tags and
    /// applications add 1, a bag is the sum of its elements.
    fn size(&self) -> usize;
    /// Same as [`Simple::size`] but choice tags count 0.
    fn erased_size(&self) -> usize;
    fn shift(&self, by: isize, cutoff: usize) -> Self;
    fn collect_free(&self, out: &mut BTreeSet<Symbol>);
    fn is_choice_free(&self) -> bool;

    fn free_names(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }
}

impl Resource {
    pub fn free(name: &str) -> Resource {
        Resource::Free(super::symbol(name))
    }

    pub fn abs(body: Resource) -> Resource {
        Resource::Abs(Box::new(body))
    }

    pub fn app(fun: Resource, bag: Bag) -> Resource {
        Resource::App(Box::new(fun), bag)
    }

    pub fn left(p: Prob, body: Resource) -> Resource {
        Resource::Left(p, Box::new(body))
    }

    pub fn right(p: Prob, body: Resource) -> Resource {
        Resource::Right(p, Box::new(body))
    }

    pub fn lambdas(binders: usize, body: Resource) -> Resource {
        (0..binders).fold(body, |t, _| Resource::abs(t))
    }

    pub fn apps(head: Resource, bags: impl IntoIterator<Item = Bag>) -> Resource {
        bags.into_iter().fold(head, Resource::app)
    }

    pub fn from_head(head: &HeadVar) -> Resource {
        match head {
            HeadVar::Bound(i) => Resource::Var(*i),
            HeadVar::Free(x) => Resource::Free(x.clone()),
        }
    }

    /// Decomposes the term as `λx⃗. head ū₁ … ūₘ` where `head` is not an
    /// application and, when `m = 0`, not an abstraction.
    pub fn spine(&self) -> (usize, &Resource, Vec<&Bag>) {
        let mut binders = 0;
        let mut t = self;
        while let Resource::Abs(b) = t {
            binders += 1;
            t = b;
        }
        let mut bags = Vec::new();
        while let Resource::App(f, bag) = t {
            bags.push(bag);
            t = f;
        }
        bags.reverse();
        (binders, t, bags)
    }

    /// Layers of nested bags: `λx⃗.y ū₁…ūₘ` has depth one more than the
    /// deepest element of its bags.
    pub fn nesting_depth(&self) -> usize {
        match self {
            Resource::Var(_) | Resource::Free(_) => 1,
            Resource::Abs(b) | Resource::Left(_, b) | Resource::Right(_, b) => b.nesting_depth(),
            Resource::App(f, bag) => {
                let inner = bag.iter().map(|u| u.nesting_depth()).max().unwrap_or(0);
                f.nesting_depth().max(1 + inner)
            }
        }
    }
}

impl Simple for Resource {
    fn size(&self) -> usize {
        match self {
            Resource::Var(_) | Resource::Free(_) => 1,
            Resource::Abs(b) | Resource::Left(_, b) | Resource::Right(_, b) => 1 + b.size(),
            Resource::App(f, bag) => 1 + f.size() + bag.size(),
        }
    }

    fn erased_size(&self) -> usize {
        match self {
            Resource::Var(_) | Resource::Free(_) => 1,
            Resource::Abs(b) => 1 + b.erased_size(),
            Resource::Left(_, b) | Resource::Right(_, b) => b.erased_size(),
            Resource::App(f, bag) => 1 + f.erased_size() + bag.erased_size(),
        }
    }

    fn shift(&self, by: isize, cutoff: usize) -> Resource {
        if by == 0 {
            return self.clone();
        }
        match self {
            Resource::Var(i) if *i >= cutoff => Resource::Var(shift_index(*i, by)),
            Resource::Var(_) | Resource::Free(_) => self.clone(),
            Resource::Abs(b) => Resource::abs(b.shift(by, cutoff + 1)),
            Resource::App(f, bag) => Resource::app(f.shift(by, cutoff), bag.shift(by, cutoff)),
            Resource::Left(p, b) => Resource::left(p.clone(), b.shift(by, cutoff)),
            Resource::Right(p, b) => Resource::right(p.clone(), b.shift(by, cutoff)),
        }
    }

    fn collect_free(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Resource::Var(_) => {}
            Resource::Free(x) => {
                out.insert(x.clone());
            }
            Resource::Abs(b) | Resource::Left(_, b) | Resource::Right(_, b) => b.collect_free(out),
            Resource::App(f, bag) => {
                f.collect_free(out);
                bag.collect_free(out);
            }
        }
    }

    fn is_choice_free(&self) -> bool {
        match self {
            Resource::Var(_) | Resource::Free(_) => true,
            Resource::Abs(b) => b.is_choice_free(),
            Resource::App(f, bag) => f.is_choice_free() && bag.is_choice_free(),
            Resource::Left(..) | Resource::Right(..) => false,
        }
    }
}

impl Bag {
    pub fn new(mut elements: Vec<Resource>) -> Bag {
        elements.sort();
        Bag(elements)
    }

    pub fn empty() -> Bag {
        Bag(Vec::new())
    }

    pub fn singleton(t: Resource) -> Bag {
        Bag(vec![t])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Resource> {
        self.0.iter()
    }

    pub fn elements(&self) -> &[Resource] {
        &self.0
    }

    pub fn into_elements(self) -> Vec<Resource> {
        self.0
    }

    /// Distinct elements with their multiplicities, in canonical order.
    pub fn multiplicities(&self) -> Vec<(&Resource, usize)> {
        let mut out: Vec<(&Resource, usize)> = Vec::new();
        for t in &self.0 {
            match out.last_mut() {
                Some((last, n)) if *last == t => *n += 1,
                _ => out.push((t, 1)),
            }
        }
        out
    }

    /// Multiset union.
    pub fn union(&self, other: &Bag) -> Bag {
        let mut all = self.0.clone();
        all.extend(other.0.iter().cloned());
        Bag::new(all)
    }
}

impl FromIterator<Resource> for Bag {
    fn from_iter<I: IntoIterator<Item = Resource>>(iter: I) -> Bag {
        Bag::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Bag {
    type Item = &'a Resource;
    type IntoIter = std::slice::Iter<'a, Resource>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Simple for Bag {
    fn size(&self) -> usize {
        self.0.iter().map(Simple::size).sum()
    }

    fn erased_size(&self) -> usize {
        self.0.iter().map(Simple::erased_size).sum()
    }

    fn shift(&self, by: isize, cutoff: usize) -> Bag {
        Bag::new(self.0.iter().map(|t| t.shift(by, cutoff)).collect())
    }

    fn collect_free(&self, out: &mut BTreeSet<Symbol>) {
        for t in &self.0 {
            t.collect_free(out);
        }
    }

    fn is_choice_free(&self) -> bool {
        self.0.iter().all(Simple::is_choice_free)
    }
}
