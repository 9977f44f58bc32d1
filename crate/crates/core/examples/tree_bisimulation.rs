//! Bisimilarity of a tree transition system, and a test telling two
//! states apart.

use probtaylor::syntax::fmt_rational;
use probtaylor::tts::{bisimilarity, distinguishing_test_search, eval_linear, TreeTransitionSystem};

const SYSTEM: &str = "\
lin p --ev-> {leaf: 1/2, fork: 1/2}
lin q --ev-> {fork: 1/2, leaf2: 1/2}
lin r --ev-> {leaf: 1/2, fork: 1/4}
bra leaf --x->
bra leaf2 --x->
bra fork --y-> p p
";

fn main() {
    let sys = TreeTransitionSystem::parse(SYSTEM).unwrap();
    let b = bisimilarity(&sys);
    for class in b.linear_classes() {
        let names: Vec<&str> = class.iter().map(|&q| sys.linear_name(q)).collect();
        println!("class {{{}}}", names.join(", "));
    }
    let (p, r) = (sys.find_linear("p").unwrap(), sys.find_linear("r").unwrap());
    if let Some(test) = distinguishing_test_search(&sys, p, r, 4) {
        println!(
            "{} gives {} on p and {} on r",
            test.show(&sys),
            fmt_rational(&eval_linear(&sys, p, &test)),
            fmt_rational(&eval_linear(&sys, r, &test))
        );
    }
}
