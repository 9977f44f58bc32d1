//! Unfolds two terms into one transition system and checks their Böhm
//! trees for bisimilarity.

use probtaylor::syntax::parse_lambda;
use probtaylor::tts::{bisimilarity, tts_of_terms};

fn main() {
    let pairs = [
        (r"x (+1/2) y", r"y (+1/2) x"),
        (r"x (+1/2) y", r"x (+1/3) y"),
        (r"\z. z (+1/2) x", r"\z. (z (+1/2) x) (+1/3) (x (+1/2) z)"),
    ];
    for (a, b) in pairs {
        let terms = [parse_lambda(a).unwrap(), parse_lambda(b).unwrap()];
        let sys = tts_of_terms(&terms, 4, 20);
        let same = bisimilarity(&sys.tts).linear_equiv(sys.roots[0], sys.roots[1]);
        println!("{a}  vs  {b}: {}", if same { "bisimilar" } else { "apart" });
    }
}
