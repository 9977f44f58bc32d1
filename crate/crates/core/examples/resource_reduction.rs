//! Substitutes a bag into a resource term and normalizes a combination.

use probtaylor::resource::{multinomial, normalize, substitute, Target};
use probtaylor::syntax::{parse_bag, parse_resource, parse_term_combination, symbol};

fn main() {
    let sigma = parse_resource("x [x, y]").unwrap();
    let bag = parse_bag("[a, b]").unwrap();
    let out = substitute(&sigma, &bag, &Target::Free(symbol("x")));
    println!("{sigma} with x := {bag}\n  = {out}");

    let redex = parse_term_combination(r"1/2.(\x. x [x]) [y, y] + 1.(\x. x) [z]").unwrap();
    println!("{redex}\n  ->* {}", normalize(&redex));

    let s = parse_resource("f [y, y, z]").unwrap();
    println!("m({s}) = {}", multinomial(&s));
}
