//! Write the reference machines in the JSON file format and read them back.
//!
//! `cargo run --example json_formats -- <dir>` writes `a1.json` and
//! `m1.json` into `<dir>`; without an argument it prints them.

use cot_automata::automata::pfsa::reference_a1;
use cot_automata::automata::ptm::reference_m1;
use cot_automata::json::{model_to_json, parse_model, to_canonical_string};
use cot_automata::model::Model;

fn main() -> cot_automata::Result<()> {
    let dir = std::env::args().nth(1);
    for (name, model) in [("a1.json", Model::Pfsa(reference_a1())), ("m1.json", Model::Ptm(reference_m1()))] {
        let text = to_canonical_string(&model_to_json(&model));
        let back = parse_model(&text)?;
        assert_eq!(to_canonical_string(&model_to_json(&back)), text);
        match &dir {
            Some(d) => std::fs::write(std::path::Path::new(d).join(name), &text).expect("write"),
            None => print!("{name}:\n{text}"),
        }
    }
    Ok(())
}
