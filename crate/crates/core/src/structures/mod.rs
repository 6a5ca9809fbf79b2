//! Finite relational structures over a fixed vocabulary.
//!
//! The domain of a structure of size `n` is always `{0, …, n-1}`. Undirected
//! graphs are stored as a symmetric binary relation `E`.

mod generate;
mod io;
mod oracle;
mod word;

use std::borrow::Cow;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use generate::{generate, Family};
pub use io::{parse_structure, serialize_structure};
pub use oracle::{are_isomorphic, is_hypercube, is_regular, ISOMORPHISM_LIMIT};
pub use word::{word_vocabulary, Symbol, WordModel, LEQ, WORD_RELATIONS};

/// A domain element.
pub type Element = usize;

/// A tuple of domain elements.
pub type Tuple = Vec<Element>;

/// Relation name used for graph edges.
pub const EDGE: &str = "E";
/// Relation name used for the successor chain of a linear digraph.
pub const SUCC: &str = "succ";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A relation symbol with its arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

impl RelationSymbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        RelationSymbol { name: name.into(), arity }
    }
}

/// Relation and constant symbols. Names are unique across both lists and
/// every relation has arity at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    relations: Vec<RelationSymbol>,
    constants: Vec<String>,
}

impl Vocabulary {
    pub fn new(relations: Vec<RelationSymbol>, constants: Vec<String>) -> Result<Self, StructureError> {
        let mut seen = BTreeSet::new();
        for r in &relations {
            if r.arity == 0 {
                return Err(StructureError::InvalidParameter(format!("relation {} has arity 0", r.name)));
            }
            if !seen.insert(r.name.as_str()) {
                return Err(StructureError::InvalidParameter(format!("duplicate symbol {}", r.name)));
            }
        }
        for c in &constants {
            if !seen.insert(c.as_str()) {
                return Err(StructureError::InvalidParameter(format!("duplicate symbol {c}")));
            }
        }
        Ok(Vocabulary { relations, constants })
    }

    /// The vocabulary `{E}` of graphs.
    pub fn graph() -> Self {
        Vocabulary { relations: vec![RelationSymbol::new(EDGE, 2)], constants: vec![] }
    }

    /// The vocabulary `{succ}` of linear digraphs.
    pub fn successor() -> Self {
        Vocabulary { relations: vec![RelationSymbol::new(SUCC, 2)], constants: vec![] }
    }

    pub fn relations(&self) -> &[RelationSymbol] {
        &self.relations
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.relation_index(name).map(|i| self.relations[i].arity)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c == name)
    }
}

/// Interpretation of one relation symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relation {
    Explicit(BTreeSet<Tuple>),
    /// The natural order `i <= j` on the domain; only valid for arity 2.
    NaturalOrder,
}

/// A finite structure: domain `{0, …, n-1}` plus interpretations for every
/// symbol of the vocabulary.
#[derive(Debug, Clone)]
pub struct FiniteStructure {
    vocab: Vocabulary,
    size: usize,
    interp: Vec<Relation>,
    consts: Vec<Element>,
}

impl FiniteStructure {
    /// A structure with every relation empty and every constant at 0.
    pub fn empty(vocab: Vocabulary, size: usize) -> Result<Self, StructureError> {
        if size == 0 {
            return Err(StructureError::InvalidParameter("domain size must be positive".into()));
        }
        let interp = vocab.relations.iter().map(|_| Relation::Explicit(BTreeSet::new())).collect();
        let consts = vec![0; vocab.constants.len()];
        Ok(FiniteStructure { vocab, size, interp, consts })
    }

    /// A graph on `size` vertices with the given undirected edges.
    pub fn graph(size: usize, edges: &[(Element, Element)]) -> Result<Self, StructureError> {
        let mut g = FiniteStructure::empty(Vocabulary::graph(), size)?;
        for &(a, b) in edges {
            g.insert(EDGE, vec![a, b])?;
            g.insert(EDGE, vec![b, a])?;
        }
        Ok(g)
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn insert(&mut self, rel: &str, tuple: Tuple) -> Result<(), StructureError> {
        let i = self.index_of(rel)?;
        self.check_tuple(i, &tuple)?;
        match &mut self.interp[i] {
            Relation::Explicit(set) => {
                set.insert(tuple);
                Ok(())
            }
            Relation::NaturalOrder => {
                Err(StructureError::InvalidParameter(format!("relation {rel} is fixed to the natural order")))
            }
        }
    }

    pub fn remove(&mut self, rel: &str, tuple: &[Element]) -> Result<bool, StructureError> {
        let i = self.index_of(rel)?;
        let materialized = self.tuples_at(i).into_owned();
        let mut set = materialized;
        let removed = set.remove(tuple);
        self.interp[i] = Relation::Explicit(set);
        Ok(removed)
    }

    pub fn set_relation(&mut self, rel: &str, relation: Relation) -> Result<(), StructureError> {
        let i = self.index_of(rel)?;
        match &relation {
            Relation::Explicit(set) => {
                for t in set {
                    self.check_tuple(i, t)?;
                }
            }
            Relation::NaturalOrder => {
                if self.vocab.relations[i].arity != 2 {
                    return Err(StructureError::InvalidParameter(format!(
                        "natural order needs arity 2, {rel} has {}",
                        self.vocab.relations[i].arity
                    )));
                }
            }
        }
        self.interp[i] = relation;
        Ok(())
    }

    pub fn set_constant(&mut self, name: &str, value: Element) -> Result<(), StructureError> {
        let i = self
            .vocab
            .constant_index(name)
            .ok_or_else(|| StructureError::InvalidParameter(format!("unknown constant {name}")))?;
        if value >= self.size {
            return Err(StructureError::InvalidParameter(format!("constant {name} = {value} out of range")));
        }
        self.consts[i] = value;
        Ok(())
    }

    pub fn constant(&self, name: &str) -> Option<Element> {
        self.vocab.constant_index(name).map(|i| self.consts[i])
    }

    /// Membership test; unknown relations hold of nothing.
    pub fn holds(&self, rel: &str, tuple: &[Element]) -> bool {
        match self.vocab.relation_index(rel) {
            Some(i) => self.holds_at(i, tuple),
            None => false,
        }
    }

    pub fn holds_at(&self, index: usize, tuple: &[Element]) -> bool {
        match &self.interp[index] {
            Relation::Explicit(set) => set.contains(tuple),
            Relation::NaturalOrder => tuple.len() == 2 && tuple[0] <= tuple[1],
        }
    }

    /// The tuples of a relation in lexicographic order, materializing an
    /// implicit order if needed.
    pub fn tuples(&self, rel: &str) -> Option<Cow<'_, BTreeSet<Tuple>>> {
        self.vocab.relation_index(rel).map(|i| self.tuples_at(i))
    }

    pub fn tuples_at(&self, index: usize) -> Cow<'_, BTreeSet<Tuple>> {
        match &self.interp[index] {
            Relation::Explicit(set) => Cow::Borrowed(set),
            Relation::NaturalOrder => {
                Cow::Owned((0..self.size).flat_map(|i| (i..self.size).map(move |j| vec![i, j])).collect())
            }
        }
    }

    /// Neighbour lists of the binary relation `E`, each sorted.
    pub fn adjacency(&self) -> Result<Vec<Vec<Element>>, StructureError> {
        let edges = self
            .tuples(EDGE)
            .ok_or_else(|| StructureError::InvalidParameter("structure has no edge relation E".into()))?;
        let mut adj = vec![Vec::new(); self.size];
        for t in edges.iter() {
            adj[t[0]].push(t[1]);
        }
        Ok(adj)
    }

    fn index_of(&self, rel: &str) -> Result<usize, StructureError> {
        self.vocab
            .relation_index(rel)
            .ok_or_else(|| StructureError::InvalidParameter(format!("unknown relation {rel}")))
    }

    fn check_tuple(&self, index: usize, tuple: &[Element]) -> Result<(), StructureError> {
        let sym = &self.vocab.relations[index];
        if tuple.len() != sym.arity {
            return Err(StructureError::InvalidParameter(format!(
                "tuple of length {} for {} of arity {}",
                tuple.len(),
                sym.name,
                sym.arity
            )));
        }
        if let Some(&c) = tuple.iter().find(|&&c| c >= self.size) {
            return Err(StructureError::InvalidParameter(format!(
                "component {c} out of range for domain of size {}",
                self.size
            )));
        }
        Ok(())
    }
}

/// Structures are equal when they agree on vocabulary, domain, constants and
/// the tuple sets of every relation, however those are stored.
impl PartialEq for FiniteStructure {
    fn eq(&self, other: &Self) -> bool {
        self.vocab == other.vocab
            && self.size == other.size
            && self.consts == other.consts
            && (0..self.interp.len()).all(|i| self.tuples_at(i) == other.tuples_at(i))
    }
}

impl Eq for FiniteStructure {}

impl fmt::Display for FiniteStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_structure(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_rejects_duplicates_and_zero_arity() {
        let dup = Vocabulary::new(vec![RelationSymbol::new("E", 2)], vec!["E".into()]);
        assert!(matches!(dup, Err(StructureError::InvalidParameter(_))));
        let zero = Vocabulary::new(vec![RelationSymbol::new("P", 0)], vec![]);
        assert!(zero.is_err());
    }

    #[test]
    fn insert_checks_range_and_arity() {
        let mut g = FiniteStructure::empty(Vocabulary::graph(), 2).unwrap();
        assert!(g.insert(EDGE, vec![0, 2]).is_err());
        assert!(g.insert(EDGE, vec![0]).is_err());
        g.insert(EDGE, vec![0, 1]).unwrap();
        assert!(g.holds(EDGE, &[0, 1]));
        assert!(!g.holds(EDGE, &[1, 0]));
    }

    #[test]
    fn natural_order_materializes() {
        let vocab = Vocabulary::new(vec![RelationSymbol::new("leq", 2)], vec![]).unwrap();
        let mut s = FiniteStructure::empty(vocab, 3).unwrap();
        s.set_relation("leq", Relation::NaturalOrder).unwrap();
        assert_eq!(s.tuples("leq").unwrap().len(), 6);
        assert!(s.holds("leq", &[1, 2]));
        assert!(!s.holds("leq", &[2, 1]));
    }
}
