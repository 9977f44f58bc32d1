//! Probabilistic head reduction: the head normal forms a term reaches
//! within some fuel, with their probabilities.

use probtaylor::operational::head_reductions;
use probtaylor::syntax::{fmt_rational, parse_lambda};

fn main() {
    let m = parse_lambda(r"Delta (I (+1/2) Omega) (+1/3) x").unwrap();
    let frontier = head_reductions(&m, 20);
    for r in &frontier.resolved {
        println!("{}  {}  after {} steps", fmt_rational(&r.choices.prob()), r.hnf, r.steps);
    }
    println!("unresolved {}", fmt_rational(&frontier.residual()));
}
