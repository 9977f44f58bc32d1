//! Truncated Taylor expansions of a probabilistic term, before and after
//! normalization.

use probtaylor::syntax::parse_lambda;
use probtaylor::taylor::{explicit_taylor, generic_taylor, taylor_nf, TruncationBudget};

fn main() {
    let m = parse_lambda(r"(\x. x x) (I (+1/2) Omega)").unwrap();
    let budget = TruncationBudget::new(7, 2);
    println!("explicit:\n  {}", explicit_taylor(&m, budget));
    println!("erased:\n  {}", generic_taylor(&m, budget));
    let nf = taylor_nf(&m, TruncationBudget::new(12, 3), 16);
    println!("normal form:\n  {}\n  residual {}", nf.terms, nf.residual);
}
