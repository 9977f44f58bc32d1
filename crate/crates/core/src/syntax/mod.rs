//! Terms of the probabilistic λ-calculus and of the probabilistic resource
//! calculus, their finite linear combinations, and the surface syntax used
//! to read and write them.
//!
//! Bound variables are de Bruijn indices and free variables are names, so
//! α-equivalent terms are structurally equal. All probabilities and
//! coefficients are exact rationals.

mod combination;
pub(crate) mod lexer;
pub(crate) mod parse;
mod print;
mod simple;
mod term;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use combination::Combination;
pub use parse::{
    parse_bag, parse_bag_combination, parse_lambda, parse_lambda_with, parse_resource, parse_term_combination, Prelude,
};
pub use print::{binder_name, fmt_rational};
pub use simple::{Bag, Resource, Simple};
pub use term::{HeadVar, Term};

/// Name of a free variable.
pub type Symbol = Arc<str>;

pub fn symbol(name: &str) -> Symbol {
    Arc::from(name)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("syntax error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("probability {value} at offset {pos} is outside [0, 1]")]
    ProbabilityOutOfRange { pos: usize, value: String },
}

impl SyntaxError {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        SyntaxError::Parse { pos, msg: msg.into() }
    }
}

/// An exact probability in `[0, 1]`. Shared, since terms copy their tags
/// a lot.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prob(Arc<BigRational>);

impl Prob {
    pub fn new(value: BigRational) -> Option<Prob> {
        if value < BigRational::zero() || value > BigRational::one() {
            None
        } else {
            Some(Prob(Arc::new(value)))
        }
    }

    /// Shorthand for `numer/denom`; panics when the ratio is not a probability.
    pub fn ratio(numer: i64, denom: i64) -> Prob {
        Prob::new(BigRational::new(BigInt::from(numer), BigInt::from(denom))).expect("ratio is not in [0, 1]")
    }

    pub fn half() -> Prob {
        Prob::ratio(1, 2)
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    /// `1 - p`.
    pub fn complement(&self) -> BigRational {
        BigRational::one() - &*self.0
    }

    pub fn complement_prob(&self) -> Prob {
        Prob(Arc::new(self.complement()))
    }
}

impl fmt::Debug for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_rational(&self.0))
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_rational(&self.0))
    }
}

/// `numer/denom` as a [`BigRational`].
pub fn rat(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `a`, `a/b` (and a leading `-`) into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}
