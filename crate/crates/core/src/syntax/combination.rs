use std::collections::btree_map;
use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A finitely supported linear combination with positive rational
/// coefficients. Zero coefficients are never stored, so the empty
/// combination is the zero term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Combination<T: Ord> {
    entries: BTreeMap<T, BigRational>,
}

impl<T: Ord> Default for Combination<T> {
    fn default() -> Self {
        Combination { entries: BTreeMap::new() }
    }
}

impl<T: Ord + Clone> Combination<T> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `1.t`
    pub fn unit(t: T) -> Self {
        Self::single(t, BigRational::one())
    }

    pub fn single(t: T, coefficient: BigRational) -> Self {
        let mut c = Self::zero();
        c.add_term(t, coefficient);
        c
    }

    /// Adds `coefficient.t`. Nonpositive coefficients are ignored.
    pub fn add_term(&mut self, t: T, coefficient: BigRational) {
        if !coefficient.is_positive() {
            debug_assert!(!coefficient.is_negative(), "negative coefficient");
            return;
        }
        match self.entries.entry(t) {
            btree_map::Entry::Vacant(v) => {
                v.insert(coefficient);
            }
            btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coefficient;
            }
        }
    }

    /// Adds `scale.other`.
    pub fn add_scaled(&mut self, other: &Combination<T>, scale: &BigRational) {
        if !scale.is_positive() {
            return;
        }
        for (t, c) in other.iter() {
            self.add_term(t.clone(), c * scale);
        }
    }

    pub fn add(&mut self, other: &Combination<T>) {
        self.add_scaled(other, &BigRational::one());
    }

    pub fn scaled(&self, scale: &BigRational) -> Combination<T> {
        let mut out = Self::zero();
        out.add_scaled(self, scale);
        out
    }

    /// Removes `t` from the support and returns its coefficient.
    pub fn remove(&mut self, t: &T) -> Option<BigRational> {
        self.entries.remove(t)
    }

    pub fn coefficient(&self, t: &T) -> BigRational {
        self.entries.get(t).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn contains(&self, t: &T) -> bool {
        self.entries.contains_key(t)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, T, BigRational> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.entries.keys()
    }

    /// Size of the support; `is_zero` tests for the empty one.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of all coefficients.
    pub fn mass(&self) -> BigRational {
        self.entries.values().fold(BigRational::zero(), |acc, c| acc + c)
    }

    /// Extends `f` linearly: `Σ cᵢ.tᵢ ↦ Σ cᵢ.f(tᵢ)`.
    pub fn flat_map<U: Ord + Clone>(&self, mut f: impl FnMut(&T) -> Combination<U>) -> Combination<U> {
        let mut out = Combination::zero();
        for (t, c) in self.iter() {
            out.add_scaled(&f(t), c);
        }
        out
    }

    /// Applies an injective constructor to every support element.
    pub fn map<U: Ord + Clone>(&self, mut f: impl FnMut(&T) -> U) -> Combination<U> {
        let mut out = Combination::zero();
        for (t, c) in self.iter() {
            out.add_term(f(t), c.clone());
        }
        out
    }

    /// Bilinear product through `f`.
    pub fn product<U: Ord + Clone, V: Ord + Clone>(
        &self,
        other: &Combination<U>,
        mut f: impl FnMut(&T, &U) -> V,
    ) -> Combination<V> {
        let mut out = Combination::zero();
        for (a, ca) in self.iter() {
            for (b, cb) in other.iter() {
                out.add_term(f(a, b), ca * cb);
            }
        }
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&T) -> bool) -> Combination<T> {
        Combination {
            entries: self.entries.iter().filter(|(t, _)| keep(t)).map(|(t, c)| (t.clone(), c.clone())).collect(),
        }
    }
}

impl<T: Ord + Clone> FromIterator<(T, BigRational)> for Combination<T> {
    fn from_iter<I: IntoIterator<Item = (T, BigRational)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (t, c) in iter {
            out.add_term(t, c);
        }
        out
    }
}

impl<'a, T: Ord> IntoIterator for &'a Combination<T> {
    type Item = (&'a T, &'a BigRational);
    type IntoIter = btree_map::Iter<'a, T, BigRational>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
