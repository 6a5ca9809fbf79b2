//! Encodes a QBF as a word model and decodes it back.

use somc::qbf::{decode_word_model, encode_word_model, parse_qbf};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = parse_qbf("E x1 A x2 ((!x1)|x2)")?;
    let w = encode_word_model(&q)?;
    println!("{q} is the word {w}");
    print!("{}", w.describe(1));
    println!("decoded: {}", decode_word_model(&w)?);
    Ok(())
}
