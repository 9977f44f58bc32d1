//! Head reduction labelled by choice sequences, the complete left reduct of
//! λ-terms, and interval bounds on convergence probabilities.

use std::collections::VecDeque;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::syntax::{HeadVar, Prob, Term};

/// Exploration stops adding branches beyond this many; the rest are left
/// unresolved.
pub const MAX_BRANCHES: usize = 1 << 16;
/// Branches whose term grows beyond this size are left unresolved.
pub const MAX_TERM_SIZE: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

/// The choices made along a branch of head reduction, outermost first.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChoiceSeq(Vec<(Side, Prob)>);

impl ChoiceSeq {
    pub fn empty() -> ChoiceSeq {
        ChoiceSeq(Vec::new())
    }

    pub fn steps(&self) -> &[(Side, Prob)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn then(&self, side: Side, p: Prob) -> ChoiceSeq {
        let mut v = self.0.clone();
        v.push((side, p));
        ChoiceSeq(v)
    }

    /// `Pr(ρ)`: `p` for every left choice, `1 - p` for every right one.
    pub fn prob(&self) -> BigRational {
        self.0.iter().fold(BigRational::one(), |acc, (side, p)| match side {
            Side::Left => acc * p.value(),
            Side::Right => acc * p.complement(),
        })
    }

    pub fn is_prefix_of(&self, other: &ChoiceSeq) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for ChoiceSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (k, (side, p)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            let s = if *side == Side::Left { 'l' } else { 'r' };
            write!(f, "{s}{{{p}}}")?;
        }
        Ok(())
    }
}

/// `λx⃗. y P₁ … Pₘ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HeadNormalForm {
    pub binders: usize,
    pub head: HeadVar,
    pub args: Vec<Term>,
}

impl HeadNormalForm {
    pub fn from_term(t: &Term) -> Option<HeadNormalForm> {
        let (binders, head, args) = t.spine();
        let head = match head {
            Term::Var(i) => HeadVar::Bound(*i),
            Term::Free(x) => HeadVar::Free(x.clone()),
            _ => return None,
        };
        Some(HeadNormalForm { binders, head, args: args.into_iter().cloned().collect() })
    }

    pub fn to_term(&self) -> Term {
        Term::lambdas(self.binders, Term::apps(Term::from_head(&self.head), self.args.iter().cloned()))
    }
}

impl fmt::Display for HeadNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_term().fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeadStep {
    AlreadyHnf(HeadNormalForm),
    /// The head redex contracted.
    Beta(Term),
    /// The head choice, with the term rebuilt around either side.
    Choice(Prob, Term, Term),
}

/// One step of head reduction under the maximal head context.
pub fn head_step(m: &Term) -> HeadStep {
    let (binders, head, args) = m.spine();
    let rebuild =
        |head: Term, args: &[&Term]| Term::lambdas(binders, Term::apps(head, args.iter().map(|a| (*a).clone())));
    match head {
        Term::Var(_) | Term::Free(_) => HeadStep::AlreadyHnf(HeadNormalForm::from_term(m).expect("variable head")),
        Term::Abs(body) => {
            let (arg, rest) = args.split_first().expect("an abstraction head has arguments");
            HeadStep::Beta(rebuild(body.instantiate(arg), rest))
        }
        Term::Choice(p, l, r) => {
            HeadStep::Choice(p.clone(), rebuild((**l).clone(), &args), rebuild((**r).clone(), &args))
        }
        Term::App(..) => unreachable!("spine heads are never applications"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolved {
    pub choices: ChoiceSeq,
    pub hnf: HeadNormalForm,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unresolved {
    pub choices: ChoiceSeq,
    pub term: Term,
    pub steps: usize,
}

/// The finite part of the head-reduction tree explored so far.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionFrontier {
    pub resolved: Vec<Resolved>,
    pub unresolved: Vec<Unresolved>,
}

impl ReductionFrontier {
    pub fn resolved_mass(&self) -> BigRational {
        self.resolved.iter().map(|r| r.choices.prob()).fold(BigRational::zero(), |a, b| a + b)
    }

    /// Probability mass of the branches still running.
    pub fn residual(&self) -> BigRational {
        self.unresolved.iter().map(|u| u.choices.prob()).fold(BigRational::zero(), |a, b| a + b)
    }
}

/// Breadth-first exploration of the head-reduction tree, at most `fuel`
/// steps (β or choice) per branch.
pub fn head_reductions(m: &Term, fuel: usize) -> ReductionFrontier {
    let mut out = ReductionFrontier::default();
    let mut queue = VecDeque::from([(ChoiceSeq::empty(), m.clone(), 0usize)]);
    let mut branches = 1usize;
    while let Some((choices, term, steps)) = queue.pop_front() {
        let step = head_step(&term);
        if let HeadStep::AlreadyHnf(hnf) = step {
            out.resolved.push(Resolved { choices, hnf, steps });
            continue;
        }
        if steps >= fuel || term.size() > MAX_TERM_SIZE {
            out.unresolved.push(Unresolved { choices, term, steps });
            continue;
        }
        match step {
            HeadStep::AlreadyHnf(_) => unreachable!(),
            HeadStep::Beta(next) => queue.push_back((choices, next, steps + 1)),
            HeadStep::Choice(p, l, r) => {
                if branches >= MAX_BRANCHES {
                    out.unresolved.push(Unresolved { choices, term, steps });
                    continue;
                }
                branches += 1;
                queue.push_back((choices.then(Side::Left, p.clone()), l, steps + 1));
                queue.push_back((choices.then(Side::Right, p), r, steps + 1));
            }
        }
    }
    out
}

/// The complete left reduct `L(M)`: every head redex and head choice is
/// fired once, and head normal forms are reduced in their arguments.
pub fn left_reduct_term(m: &Term) -> Term {
    if let Term::Choice(p, l, r) = m {
        return Term::choice(p.clone(), left_reduct_term(l), left_reduct_term(r));
    }
    let (binders, head, args) = m.spine();
    let rebuild = |head: Term, args: Vec<Term>| Term::lambdas(binders, Term::apps(head, args));
    match head {
        Term::Var(_) | Term::Free(_) => rebuild(head.clone(), args.iter().map(|a| left_reduct_term(a)).collect()),
        Term::Abs(body) => {
            let (arg, rest) = args.split_first().expect("an abstraction head has arguments");
            rebuild(body.instantiate(arg), rest.iter().map(|a| (*a).clone()).collect())
        }
        Term::Choice(p, l, r) => {
            let owned: Vec<Term> = args.iter().map(|a| (*a).clone()).collect();
            Term::choice(p.clone(), rebuild((**l).clone(), owned.clone()), rebuild((**r).clone(), owned))
        }
        Term::App(..) => unreachable!("spine heads are never applications"),
    }
}

/// Bounds on the probability that `m` head-reduces to `h`: the true value
/// lies in `[lower, lower + residual]`.
pub fn hnf_prob(m: &Term, h: &HeadNormalForm, fuel: usize) -> (BigRational, BigRational) {
    let frontier = head_reductions(m, fuel);
    let lower = frontier
        .resolved
        .iter()
        .filter(|r| &r.hnf == h)
        .map(|r| r.choices.prob())
        .fold(BigRational::zero(), |a, b| a + b);
    (lower, frontier.residual())
}

/// Bounds on the probability that `m` has a head normal form.
pub fn convergence_prob(m: &Term, fuel: usize) -> (BigRational, BigRational) {
    let frontier = head_reductions(m, fuel);
    (frontier.resolved_mass(), frontier.residual())
}

/// The head-reduction tree of a term, cut at `fuel` steps per branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionTree {
    Hnf(HeadNormalForm),
    Beta(Term, Box<ReductionTree>),
    Choice(Term, Prob, Box<ReductionTree>, Box<ReductionTree>),
    OutOfFuel(Term),
}

pub fn reduction_tree(m: &Term, fuel: usize) -> ReductionTree {
    match head_step(m) {
        HeadStep::AlreadyHnf(h) => ReductionTree::Hnf(h),
        _ if fuel == 0 || m.size() > MAX_TERM_SIZE => ReductionTree::OutOfFuel(m.clone()),
        HeadStep::Beta(next) => ReductionTree::Beta(m.clone(), Box::new(reduction_tree(&next, fuel - 1))),
        HeadStep::Choice(p, l, r) => ReductionTree::Choice(
            m.clone(),
            p,
            Box::new(reduction_tree(&l, fuel - 1)),
            Box::new(reduction_tree(&r, fuel - 1)),
        ),
    }
}

impl ReductionTree {
    fn render(&self, indent: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pad = "  ".repeat(indent);
        match self {
            ReductionTree::Hnf(h) => writeln!(f, "{pad}{h}  [hnf]"),
            ReductionTree::OutOfFuel(t) => writeln!(f, "{pad}{t}  [out of fuel]"),
            ReductionTree::Beta(t, next) => {
                writeln!(f, "{pad}{t}")?;
                next.render(indent, f)
            }
            ReductionTree::Choice(t, p, l, r) => {
                writeln!(f, "{pad}{t}")?;
                writeln!(f, "{pad}l{{{p}}}:")?;
                l.render(indent + 1, f)?;
                writeln!(f, "{pad}r{{{p}}}:")?;
                r.render(indent + 1, f)
            }
        }
    }
}

impl fmt::Display for ReductionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.render(0, f)
    }
}
