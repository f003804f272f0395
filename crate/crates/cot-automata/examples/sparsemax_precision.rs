//! Exact sparsemax projection and the bit precision of rational vectors.

use cot_automata::rational::{format_rational, rat};
use cot_automata::{hardmax, precision_of, sparsemax, Rational};

fn show(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("[{}]", parts.join(", "))
}

fn main() {
    let inputs = [
        vec![rat(1, 2), rat(1, 4), rat(1, 4)],
        vec![rat(3, 1), rat(1, 1), rat(0, 1)],
        vec![rat(1, 3), rat(1, 2), rat(-1, 1)],
    ];
    for x in &inputs {
        let p = sparsemax(x);
        println!("sparsemax{} = {}  (precision {} bits)", show(x), show(&p), precision_of(&p));
        println!("  hardmax = {}", show(&hardmax(x)));
    }
}
