//! Finite-depth probabilistic Böhm trees, their Taylor expansion, and the
//! test languages that characterize them.

mod encoding;
mod family;
mod testing;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::operational::head_reductions;
use crate::syntax::{fmt_rational, Combination, HeadVar, Resource, Term};
use crate::taylor::{hnf_expansion, SizeMeasure, TruncationBudget};

pub use encoding::{
    coefficient_test_correspondence, correspondence_bounds, polyterm_to_rbtt, rbht_to_term, rbtt_to_polyterm,
    term_to_rbht, Correspondence, EncodingError,
};
pub use family::{btt_to_rbtt_family, FamilyBudget};
pub use testing::{eval_bht, eval_btt, parse_btt, HnfTest, Interval, TermTest};

/// `λx⃗. y 𝐓₁ … 𝐓ₘ` with subtrees one level shallower.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueTree {
    pub binders: usize,
    pub head: HeadVar,
    pub children: Vec<BohmApprox>,
}

/// A depth-`d` approximant: a subprobability distribution over value
/// trees, known up to `residual`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BohmApprox {
    pub depth: usize,
    /// Lower bounds on the probability of each value tree.
    pub dist: BTreeMap<ValueTree, BigRational>,
    /// Mass of head-reduction branches not resolved at this level.
    pub residual: BigRational,
}

impl BohmApprox {
    /// The empty distribution of depth 0.
    pub fn bottom() -> BohmApprox {
        BohmApprox { depth: 0, dist: BTreeMap::new(), residual: BigRational::zero() }
    }

    pub fn mass(&self) -> BigRational {
        self.dist.values().fold(BigRational::zero(), |a, b| a + b)
    }

    /// Mass that may still move: the unresolved mass here plus the whole
    /// mass of every tree some subtree of which is uncertain.
    pub fn uncertainty(&self) -> BigRational {
        let mut u = self.residual.clone();
        for (t, p) in &self.dist {
            if t.children.iter().any(|c| !c.is_exact()) {
                u += p;
            }
        }
        u
    }

    pub fn is_exact(&self) -> bool {
        self.residual.is_zero() && self.dist.keys().all(|t| t.children.iter().all(BohmApprox::is_exact))
    }

    fn render(&self, indent: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pad = "  ".repeat(indent);
        if self.dist.is_empty() {
            writeln!(f, "{pad}⊥ (residual {})", fmt_rational(&self.residual))?;
            return Ok(());
        }
        for (t, p) in &self.dist {
            let head = match &t.head {
                HeadVar::Bound(i) => format!("#{i}"),
                HeadVar::Free(x) => x.to_string(),
            };
            writeln!(f, "{pad}{}: λ^{} {head} ({} children)", fmt_rational(p), t.binders, t.children.len())?;
            for c in &t.children {
                c.render(indent + 1, f)?;
            }
        }
        if !self.residual.is_zero() {
            writeln!(f, "{pad}residual {}", fmt_rational(&self.residual))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let trees: Vec<serde_json::Value> = self
            .dist
            .iter()
            .map(|(t, p)| {
                let head = match &t.head {
                    HeadVar::Bound(i) => serde_json::json!({ "bound": i }),
                    HeadVar::Free(x) => serde_json::json!({ "free": x.to_string() }),
                };
                serde_json::json!({
                    "prob": fmt_rational(p),
                    "binders": t.binders,
                    "head": head,
                    "children": t.children.iter().map(BohmApprox::to_json).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({
            "depth": self.depth,
            "trees": trees,
            "residual": fmt_rational(&self.residual),
        })
    }
}

impl fmt::Display for BohmApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.render(0, f)
    }
}

/// `PT_d(M)`: each head normal form `λx⃗. y M₁ … Mₘ` reached with fuel
/// contributes its probability to the tree `λx⃗. y PT_{d-1}(M₁) …`.
pub fn pt_approximant(m: &Term, depth: usize, fuel: usize) -> BohmApprox {
    Approximator { fuel, memo: HashMap::new() }.approx(m, depth)
}

struct Approximator {
    fuel: usize,
    memo: HashMap<(Term, usize), BohmApprox>,
}

impl Approximator {
    fn approx(&mut self, m: &Term, depth: usize) -> BohmApprox {
        if depth == 0 {
            return BohmApprox::bottom();
        }
        let key = (m.clone(), depth);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let frontier = head_reductions(m, self.fuel);
        let mut dist: BTreeMap<ValueTree, BigRational> = BTreeMap::new();
        for r in &frontier.resolved {
            let children = r.hnf.args.iter().map(|a| self.approx(a, depth - 1)).collect();
            let tree = ValueTree { binders: r.hnf.binders, head: r.hnf.head.clone(), children };
            *dist.entry(tree).or_insert_with(BigRational::zero) += r.choices.prob();
        }
        let out = BohmApprox { depth, dist, residual: frontier.residual() };
        self.memo.insert(key, out.clone());
        out
    }
}

/// `T(𝐓) = Σ 𝐓(𝐭) T(𝐭)` with `T(λx⃗. y 𝐓₁ … 𝐓ₘ) = λx⃗. y !T(𝐓₁) … !T(𝐓ₘ)`,
/// restricted to the budget.
pub fn taylor_of_tree(tree: &BohmApprox, b: TruncationBudget) -> Combination<Resource> {
    expand_tree(tree, b.max_term_size, b.max_bag_copies)
}

fn expand_tree(tree: &BohmApprox, limit: usize, copies: usize) -> Combination<Resource> {
    let mut out = Combination::zero();
    for (t, p) in &tree.dist {
        let base = t.binders + 1 + t.children.len();
        if base > limit {
            continue;
        }
        let room = limit - base;
        let subs: Vec<Combination<Resource>> = t
            .children
            .iter()
            .map(|c| if room >= 1 { expand_tree(c, room, copies) } else { Combination::zero() })
            .collect();
        out.add_scaled(&hnf_expansion(t.binders, &t.head, &subs, limit, copies, SizeMeasure::Full), p);
    }
    out
}

/// Whether the intervals of two approximants leave room for equality:
/// identical shapes with overlapping intervals for every tree.
pub fn approximants_compatible(a: &BohmApprox, b: &BohmApprox) -> bool {
    if a.is_exact() && b.is_exact() {
        return a == b;
    }
    let ua = a.uncertainty();
    let ub = b.uncertainty();
    let keys: std::collections::BTreeSet<&ValueTree> = a.dist.keys().chain(b.dist.keys()).collect();
    let zero = BigRational::zero();
    keys.into_iter().all(|k| {
        let pa = a.dist.get(k).unwrap_or(&zero);
        let pb = b.dist.get(k).unwrap_or(&zero);
        pa <= &(pb + &ub) && pb <= &(pa + &ua)
    }) && a.mass() <= b.mass() + &ub
        && b.mass() <= a.mass() + &ua
}
