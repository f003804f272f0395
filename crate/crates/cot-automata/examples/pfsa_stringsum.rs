//! Stringsums, enumeration and sampling for a small PFSA.

use cot_automata::automata::pfsa::reference_a1;
use cot_automata::rational::format_rational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> cot_automata::Result<()> {
    let a = reference_a1();
    let sigma = a.alphabet();
    for text in ["", "a", "ab", "aab", "ba"] {
        let y = sigma.parse_string(text)?;
        println!("p({text:?}) = {}", format_rational(&a.stringsum(&y)));
    }

    let table = a.enumerate(4);
    println!("\nall strings up to length 4:");
    for y in table.keys_length_lex() {
        println!("  {:6} {}", sigma.render(y), format_rational(&table.entries[y]));
    }
    println!("mass on longer strings: {}", format_rational(&table.residual_mass));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    print!("\nsamples:");
    for _ in 0..8 {
        let (_, y) = a.sample(&mut rng, 64)?;
        print!(" {:?}", sigma.render(&y));
    }
    println!();
    Ok(())
}
