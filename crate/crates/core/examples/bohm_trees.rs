//! Böhm approximants and the success probabilities of Böhm tests.

use probtaylor::bohm::{eval_btt, parse_btt, pt_approximant};
use probtaylor::syntax::parse_lambda;

fn main() {
    let m = parse_lambda(r"(\f. f (x (+1/2) y)) (+1/3) (\f. f x)").unwrap();
    println!("approximant of depth 2:\n{}", pt_approximant(&m, 2, 16));
    for src in [r"ev((\f. f)(ev(x())))", r"ev((\f. f)(ev(x()) & ev(x())))", "ev(y())"] {
        let t = parse_btt(src).unwrap();
        println!("Pr({t}) in {}", eval_btt(&t, &m, 16));
    }
}
