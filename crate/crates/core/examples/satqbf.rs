//! Builds the sentences defining true QBFs with k quantifier blocks and
//! attempts a budgeted grounding on a small word model.

use somc::eval::{eval_grounded, Budget};
use somc::library::satqbf_k;
use somc::logic::{analyze, to_sexp};
use somc::qbf::{encode_word_model, parse_qbf};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for k in 1..=3 {
        let f = satqbf_k(k)?;
        let stats = analyze(&f);
        println!(
            "k={k}: {} characters, {} second-order binders, maximal arity {}, sentence {}",
            to_sexp(&f).len(),
            stats.so_bindings.len(),
            stats.max_so_arity,
            stats.is_sentence()
        );
    }
    let word = encode_word_model(&parse_qbf("E x1 (x1)")?)?;
    match eval_grounded(word.structure(), &satqbf_k(1)?, Budget::default()) {
        Ok(v) => println!("{word}: {v}"),
        Err(e) => println!("{word}: {e}"),
    }
    Ok(())
}
