//! Word models over the QBF alphabet.
//!
//! A word of length `n` is the structure with domain `{0, …, n-1}`, the
//! order `leq`, and one unary relation per letter holding at the positions
//! that carry that letter.

use std::collections::BTreeSet;
use std::fmt;

use super::{Element, FiniteStructure, Relation, RelationSymbol, StructureError, Vocabulary};

/// Name of the order relation of a word model.
pub const LEQ: &str = "leq";

/// Relation names of the word vocabulary, order first, then one unary
/// relation per letter in `Symbol::ALL` order.
pub const WORD_RELATIONS: [&str; 10] =
    [LEQ, "P_not", "P_or", "P_and", "P_exists", "P_forall", "P_open", "P_close", "P_X", "P_bar"];

/// A letter of the QBF alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Not,
    Or,
    And,
    Exists,
    Forall,
    Open,
    Close,
    X,
    Bar,
}

impl Symbol {
    pub const ALL: [Symbol; 9] = [
        Symbol::Not,
        Symbol::Or,
        Symbol::And,
        Symbol::Exists,
        Symbol::Forall,
        Symbol::Open,
        Symbol::Close,
        Symbol::X,
        Symbol::Bar,
    ];

    /// The unary relation holding at positions carrying this letter.
    pub fn relation(self) -> &'static str {
        WORD_RELATIONS[1 + self as usize]
    }

    pub fn glyph(self) -> char {
        match self {
            Symbol::Not => '¬',
            Symbol::Or => '∨',
            Symbol::And => '∧',
            Symbol::Exists => '∃',
            Symbol::Forall => '∀',
            Symbol::Open => '(',
            Symbol::Close => ')',
            Symbol::X => 'X',
            Symbol::Bar => '|',
        }
    }

    pub fn from_glyph(c: char) -> Option<Symbol> {
        Symbol::ALL.into_iter().find(|s| s.glyph() == c)
    }
}

/// The vocabulary `{leq, P_not, …, P_bar}` of word models.
pub fn word_vocabulary() -> Vocabulary {
    let mut rels = vec![RelationSymbol::new(LEQ, 2)];
    rels.extend(Symbol::ALL.iter().map(|s| RelationSymbol::new(s.relation(), 1)));
    Vocabulary::new(rels, vec![]).expect("word vocabulary is well formed")
}

/// A structure over the word vocabulary whose letter relations partition the
/// domain. The order is kept implicit as the natural order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordModel {
    symbols: Vec<Symbol>,
    structure: FiniteStructure,
}

impl WordModel {
    pub fn from_symbols(symbols: &[Symbol]) -> Result<Self, StructureError> {
        let mut s = FiniteStructure::empty(word_vocabulary(), symbols.len())?;
        s.set_relation(LEQ, Relation::NaturalOrder)?;
        for (i, sym) in symbols.iter().enumerate() {
            s.insert(sym.relation(), vec![i])?;
        }
        Ok(WordModel { symbols: symbols.to_vec(), structure: s })
    }

    /// Reads a word model back from an arbitrary structure over the word
    /// vocabulary. `leq` must be a total order; positions are taken in that
    /// order.
    pub fn from_structure(s: &FiniteStructure) -> Result<Self, StructureError> {
        if *s.vocabulary() != word_vocabulary() {
            return Err(StructureError::InvalidParameter("structure is not over the word vocabulary".into()));
        }
        let n = s.size();
        let rank = order_ranks(s)?;
        let mut at_rank: Vec<Option<Symbol>> = vec![None; n];
        for e in 0..n {
            let carried: Vec<Symbol> = Symbol::ALL.into_iter().filter(|sym| s.holds(sym.relation(), &[e])).collect();
            match carried.as_slice() {
                [one] => at_rank[rank[e]] = Some(*one),
                [] => {
                    return Err(StructureError::Precondition(format!(
                        "partition violation: position {e} carries no letter"
                    )))
                }
                _ => {
                    return Err(StructureError::Precondition(format!(
                        "partition violation: position {e} carries {} letters",
                        carried.len()
                    )))
                }
            }
        }
        let symbols: Vec<Symbol> = at_rank.into_iter().map(|s| s.expect("ranks are a bijection")).collect();
        WordModel::from_symbols(&symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn structure(&self) -> &FiniteStructure {
        &self.structure
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Positions carrying `sym`, shifted by `base` (0 or 1).
    pub fn positions(&self, sym: Symbol, base: usize) -> BTreeSet<Element> {
        self.symbols.iter().enumerate().filter(|(_, s)| **s == sym).map(|(i, _)| i + base).collect()
    }

    /// One line per letter relation, e.g. `P_not = {10}`.
    pub fn describe(&self, base: usize) -> String {
        let mut out = format!("domain {{{}..{}}}\n", base, self.len() + base - 1);
        for sym in Symbol::ALL {
            let items: Vec<String> = self.positions(sym, base).iter().map(|p| p.to_string()).collect();
            out.push_str(&format!("{} = {{{}}}\n", sym.relation(), items.join(",")));
        }
        out
    }
}

impl fmt::Display for WordModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.symbols.iter().try_for_each(|s| write!(f, "{}", s.glyph()))
    }
}

fn order_ranks(s: &FiniteStructure) -> Result<Vec<usize>, StructureError> {
    let n = s.size();
    let not_total = || StructureError::Precondition("leq is not a total order".into());
    let rank: Vec<usize> = (0..n).map(|e| (0..n).filter(|&d| s.holds(LEQ, &[d, e])).count()).collect();
    let mut seen = vec![false; n];
    for &r in &rank {
        if r == 0 || r > n || seen[r - 1] {
            return Err(not_total());
        }
        seen[r - 1] = true;
    }
    for a in 0..n {
        for b in 0..n {
            if s.holds(LEQ, &[a, b]) != (rank[a] <= rank[b]) {
                return Err(not_total());
            }
        }
    }
    Ok(rank.into_iter().map(|r| r - 1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(text: &str) -> Vec<Symbol> {
        text.chars().map(|c| Symbol::from_glyph(c).unwrap()).collect()
    }

    #[test]
    fn letters_partition_positions() {
        let w = WordModel::from_symbols(&word("∃X|(X|)")).unwrap();
        assert_eq!(w.len(), 7);
        assert_eq!(w.positions(Symbol::Bar, 0), BTreeSet::from([2, 5]));
        assert_eq!(w.to_string(), "∃X|(X|)");
    }

    #[test]
    fn structure_round_trip_through_permuted_order() {
        let w = WordModel::from_symbols(&word("∃X|(X|)")).unwrap();
        // Relabel position i as 6 - i; the order reverses accordingly.
        let mut s = FiniteStructure::empty(word_vocabulary(), 7).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                if i >= j {
                    s.insert(LEQ, vec![i, j]).unwrap();
                }
            }
            s.insert(w.symbols()[6 - i].relation(), vec![i]).unwrap();
        }
        assert_eq!(WordModel::from_structure(&s).unwrap(), w);
    }

    #[test]
    fn double_letter_is_a_partition_violation() {
        let w = WordModel::from_symbols(&word("∃X|(X|)")).unwrap();
        let mut s = w.structure().clone();
        s.insert(Symbol::X.relation(), vec![0]).unwrap();
        let e = WordModel::from_structure(&s).unwrap_err();
        assert!(e.to_string().contains("partition violation"));
    }
}
