//! Word-model encoding of QBFs: `x_n` is written `X` followed by `n` bars.

use crate::logic::Quantifier;
use crate::structures::{Symbol, WordModel};

use super::ast::{parse_tokens, Tok};
use super::{Matrix, QbfAst, QbfError};

fn push_var(out: &mut Vec<Symbol>, v: u32) {
    out.push(Symbol::X);
    out.extend(std::iter::repeat_n(Symbol::Bar, v as usize));
}

fn push_matrix(out: &mut Vec<Symbol>, m: &Matrix) -> Result<(), QbfError> {
    match m {
        Matrix::Const(_) => return Err(QbfError::Unencodable("the word alphabet has no Boolean constants".into())),
        Matrix::Var(v) => push_var(out, *v),
        Matrix::Not(a) => {
            out.extend([Symbol::Open, Symbol::Not]);
            push_matrix(out, a)?;
            out.push(Symbol::Close);
        }
        Matrix::And(a, b) | Matrix::Or(a, b) => {
            out.push(Symbol::Open);
            push_matrix(out, a)?;
            out.push(if matches!(m, Matrix::And(..)) { Symbol::And } else { Symbol::Or });
            push_matrix(out, b)?;
            out.push(Symbol::Close);
        }
    }
    Ok(())
}

/// The letter sequence of `q`, one letter per position.
pub fn qbf_symbols(q: &QbfAst) -> Result<Vec<Symbol>, QbfError> {
    let mut out = Vec::new();
    for b in q.blocks() {
        for &v in &b.vars {
            out.push(match b.quantifier {
                Quantifier::Exists => Symbol::Exists,
                Quantifier::Forall => Symbol::Forall,
            });
            push_var(&mut out, v);
        }
    }
    match q.matrix() {
        m @ (Matrix::Var(_) | Matrix::Const(_)) => {
            out.push(Symbol::Open);
            push_matrix(&mut out, m)?;
            out.push(Symbol::Close);
        }
        m => push_matrix(&mut out, m)?,
    }
    Ok(out)
}

/// Fails only on matrices containing the constants 0 or 1.
pub fn encode_word_model(q: &QbfAst) -> Result<WordModel, QbfError> {
    WordModel::from_symbols(&qbf_symbols(q)?).map_err(|e| QbfError::Unencodable(e.to_string()))
}

pub fn decode_symbols(symbols: &[Symbol]) -> Result<QbfAst, QbfError> {
    let mut toks = Vec::new();
    let mut i = 0;
    while i < symbols.len() {
        let pos = i;
        let tok = match symbols[i] {
            Symbol::Exists => Tok::Exists,
            Symbol::Forall => Tok::Forall,
            Symbol::Not => Tok::Not,
            Symbol::Or => Tok::Or,
            Symbol::And => Tok::And,
            Symbol::Open => Tok::Open,
            Symbol::Close => Tok::Close,
            Symbol::X => {
                let mut n = 0u32;
                while i + 1 < symbols.len() && symbols[i + 1] == Symbol::Bar {
                    i += 1;
                    n += 1;
                }
                if n == 0 {
                    return Err(QbfError::Lex { position: pos, message: "X without bars".into() });
                }
                Tok::Var(n)
            }
            Symbol::Bar => return Err(QbfError::Lex { position: pos, message: "bar with no preceding X".into() }),
        };
        toks.push((tok, pos));
        i += 1;
    }
    parse_tokens(toks, symbols.len())
}

/// Inverse of [`encode_word_model`]. Accepts only formulas whose first
/// block is existential.
pub fn decode_word_model(w: &WordModel) -> Result<QbfAst, QbfError> {
    let q = decode_symbols(w.symbols())?;
    if !q.starts_existential() {
        return Err(QbfError::NotNormalForm("the first block must be existential".into()));
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::super::parse_qbf;
    use super::*;

    #[test]
    fn single_variable_has_seven_positions() {
        let w = encode_word_model(&parse_qbf("E x1 (x1)").unwrap()).unwrap();
        assert_eq!(w.to_string(), "∃X|(X|)");
        assert_eq!(decode_word_model(&w).unwrap(), parse_qbf("E x1 (x1)").unwrap());
    }

    #[test]
    fn eighteen_position_example_sets() {
        let q = parse_qbf("E x1 A x2 ((!x1)|x2)").unwrap();
        let w = encode_word_model(&q).unwrap();
        assert_eq!(w.len(), 18);
        assert_eq!(w.to_string(), "∃X|∀X||((¬X|)∨X||)");
        assert_eq!(w.positions(Symbol::Not, 1), BTreeSet::from([10]));
        assert_eq!(w.positions(Symbol::Open, 1), BTreeSet::from([8, 9]));
        assert_eq!(w.positions(Symbol::Close, 1), BTreeSet::from([13, 18]));
        assert_eq!(decode_word_model(&w).unwrap(), q);
    }

    #[test]
    fn stray_bar_is_a_lexing_error() {
        let sym = [Symbol::Exists, Symbol::Bar];
        assert!(matches!(decode_symbols(&sym), Err(QbfError::Lex { position: 1, .. })));
    }

    #[test]
    fn universal_first_block_is_rejected_on_decode() {
        let w = encode_word_model(&parse_qbf("A x1 E x2 (x1&x2)").unwrap()).unwrap();
        assert!(matches!(decode_word_model(&w), Err(QbfError::NotNormalForm(_))));
    }

    #[test]
    fn constants_cannot_be_encoded() {
        let q = parse_qbf("E x1 (x1|1)").unwrap();
        assert!(matches!(encode_word_model(&q), Err(QbfError::Unencodable(_))));
    }
}
