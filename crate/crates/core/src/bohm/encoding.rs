//! Resource Böhm tests as normal simple terms, and the agreement between
//! testing a term and reading a coefficient of its Taylor normal form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};

use super::testing::{eval_btt, HnfTest, Interval, TermTest};
use crate::resource::{factorial, multinomial};
use crate::syntax::{Bag, HeadVar, Resource, Simple, Term};
use crate::taylor::{taylor_nf, TruncationBudget};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodingError {
    #[error("test `{0}` is not a resource test")]
    NotResource(String),
    #[error("`{0}` is not a choice-free normal simple term")]
    NotNormal(String),
}

/// `s_T`: `ω ↦ []`, `T ∧ U ↦ s_T · s_U`, `ev(t) ↦ [s_t]`.
pub fn rbtt_to_polyterm(test: &TermTest) -> Result<Bag, EncodingError> {
    match test {
        TermTest::Omega => Ok(Bag::empty()),
        TermTest::And(a, b) => Ok(rbtt_to_polyterm(a)?.union(&rbtt_to_polyterm(b)?)),
        TermTest::Ev(t) => Ok(Bag::singleton(rbht_to_term(t)?)),
    }
}

/// `s_{(λx⃗.y)(T₁,…,Tₘ)} = λx⃗. y s_{T₁} … s_{Tₘ}`.
pub fn rbht_to_term(test: &HnfTest) -> Result<Resource, EncodingError> {
    match test {
        HnfTest::Head { binders, head, args } => {
            let bags = args.iter().map(rbtt_to_polyterm).collect::<Result<Vec<_>, _>>()?;
            Ok(Resource::lambdas(*binders, Resource::apps(Resource::from_head(head), bags)))
        }
        other => Err(EncodingError::NotResource(other.to_string())),
    }
}

/// The resource test encoded by a normal choice-free poly-term.
pub fn polyterm_to_rbtt(bag: &Bag) -> Result<TermTest, EncodingError> {
    let parts = bag.iter().map(|s| term_to_rbht(s).map(TermTest::ev)).collect::<Result<Vec<_>, _>>()?;
    Ok(TermTest::all(parts))
}

pub fn term_to_rbht(s: &Resource) -> Result<HnfTest, EncodingError> {
    let (binders, head, bags) = s.spine();
    let head = match head {
        Resource::Var(i) => HeadVar::Bound(*i),
        Resource::Free(x) => HeadVar::Free(x.clone()),
        _ => return Err(EncodingError::NotNormal(s.to_string())),
    };
    let args = bags.into_iter().map(polyterm_to_rbtt).collect::<Result<Vec<_>, _>>()?;
    Ok(HnfTest::head(binders, head, args))
}

/// The two readings of a resource test `T` on a term `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    /// The coefficient of `s_T` in `!nf(T(M))`.
    pub coefficient: Interval,
    /// `Pr(T, M) / m(s_T)`.
    pub testing: Interval,
}

impl Correspondence {
    pub fn agrees(&self) -> bool {
        self.coefficient.overlaps(&self.testing)
    }
}

/// Computes both readings. The budget is widened as needed to contain
/// `s_T`.
pub fn correspondence_bounds(
    test: &TermTest,
    m: &Term,
    fuel: usize,
    b: TruncationBudget,
) -> Result<Correspondence, EncodingError> {
    if !test.is_resource() {
        return Err(EncodingError::NotResource(test.to_string()));
    }
    let encoded = rbtt_to_polyterm(test)?;
    let b = TruncationBudget {
        max_term_size: b.max_term_size.max(encoded.iter().map(Simple::size).max().unwrap_or(0)),
        max_bag_copies: b.max_bag_copies.max(widest_bag(&encoded)),
    };
    let nf = taylor_nf(m, b, fuel);

    let mut lower = BigRational::one();
    let mut upper = BigRational::one();
    for (u, k) in encoded.multiplicities() {
        let c = nf.terms.coefficient(u);
        let fact = BigRational::from_integer(BigInt::from(factorial(k)));
        lower *= Pow::pow(&c, k) / &fact;
        let hi = (c + &nf.residual).min(BigRational::one());
        upper *= Pow::pow(&hi, k) / &fact;
    }
    let scale = BigRational::from_integer(BigInt::from(multinomial(&encoded)));
    let pr = eval_btt(test, m, fuel);
    Ok(Correspondence {
        coefficient: Interval { lower, upper },
        testing: Interval { lower: pr.lower / &scale, upper: pr.upper / &scale },
    })
}

/// Whether both readings agree: overlapping intervals, identical when
/// exact.
pub fn coefficient_test_correspondence(test: &TermTest, m: &Term, fuel: usize, b: TruncationBudget) -> bool {
    correspondence_bounds(test, m, fuel, b).map(|c| c.agrees()).unwrap_or(false)
}

fn widest_bag(bag: &Bag) -> usize {
    fn term(s: &Resource) -> usize {
        match s {
            Resource::Var(_) | Resource::Free(_) => 0,
            Resource::Abs(b) | Resource::Left(_, b) | Resource::Right(_, b) => term(b),
            Resource::App(f, bag) => term(f).max(widest_bag(bag)),
        }
    }
    bag.iter().map(term).max().unwrap_or(0).max(bag.len())
}
