use crate::logic::Formula;
use crate::structures::{EDGE, LEQ, SUCC};

use super::arith::{arithmetic, Arithmetic};
use super::auxiliary::{auxiliary, Auxiliary, PAIR_EDGES, PAIR_VERTICES};
use super::graphs::{hypercube, regular, Strategy};
use super::satqbf::satqbf_k;
use super::LibraryError;

/// What a catalog entry constructs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topic {
    Auxiliary,
    Arithmetic,
    Regularity,
    Hypercube,
    Satqbf,
}

/// Builder parameters. `n` is the value of a numeral, `k` the number of
/// quantifier blocks, `relation` replaces the default relation symbol of
/// auxiliary and arithmetic entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params {
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub relation: Option<String>,
}

impl Params {
    pub fn k(k: usize) -> Params {
        Params { k: Some(k), ..Params::default() }
    }

    pub fn n(n: usize) -> Params {
        Params { n: Some(n), ..Params::default() }
    }

    fn require(value: Option<usize>, name: &str, entry: &str) -> Result<usize, LibraryError> {
        value.ok_or_else(|| LibraryError::InvalidParameter(format!("{entry} needs --{name}")))
    }
}

type Builder = fn(&Params) -> Result<Formula, LibraryError>;

/// One named builder together with the signature of its output.
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub topic: Topic,
    pub summary: &'static str,
    pub parameters: &'static [&'static str],
    /// Relation symbols the output mentions under default parameters.
    pub vocabulary: &'static [(&'static str, usize)],
    pub free_fo: &'static [&'static str],
    pub free_so: &'static [(&'static str, usize)],
    builder: Builder,
}

impl CatalogEntry {
    pub fn build(&self, params: &Params) -> Result<Formula, LibraryError> {
        (self.builder)(params)
    }

    pub fn is_sentence(&self) -> bool {
        self.free_fo.is_empty() && self.free_so.is_empty()
    }
}

fn aux(name: Auxiliary, p: &Params) -> Result<Formula, LibraryError> {
    Ok(auxiliary(name, p.relation.as_deref()))
}

fn arith(op: Arithmetic, p: &Params) -> Result<Formula, LibraryError> {
    Ok(arithmetic(op, p.relation.as_deref()))
}

const ORDER: &[(&str, usize)] = &[(LEQ, 2)];
const SUCCESSOR: &[(&str, usize)] = &[(SUCC, 2)];
const GRAPH: &[(&str, usize)] = &[(EDGE, 2)];
const PAIR_GRAPH: &[(&str, usize)] = &[(PAIR_VERTICES, 2), (PAIR_EDGES, 4)];

static CATALOG: [CatalogEntry; 17] = [
    CatalogEntry {
        name: "sucLeq",
        topic: Topic::Auxiliary,
        summary: "y immediately follows x in the order leq",
        parameters: &[],
        vocabulary: ORDER,
        free_fo: &["x", "y"],
        free_so: &[],
        builder: |p| aux(Auxiliary::SucLeq, p),
    },
    CatalogEntry {
        name: "predLeq",
        topic: Topic::Auxiliary,
        summary: "x immediately precedes y in the order leq",
        parameters: &[],
        vocabulary: ORDER,
        free_fo: &["x", "y"],
        free_so: &[],
        builder: |p| aux(Auxiliary::PredLeq, p),
    },
    CatalogEntry {
        name: "isZero",
        topic: Topic::Auxiliary,
        summary: "x is the least element of leq",
        parameters: &[],
        vocabulary: ORDER,
        free_fo: &["x"],
        free_so: &[],
        builder: |p| aux(Auxiliary::IsZero, p),
    },
    CatalogEntry {
        name: "isOne",
        topic: Topic::Auxiliary,
        summary: "x is the second element of leq",
        parameters: &[],
        vocabulary: ORDER,
        free_fo: &["x"],
        free_so: &[],
        builder: |p| aux(Auxiliary::IsOne, p),
    },
    CatalogEntry {
        name: "numeral",
        topic: Topic::Auxiliary,
        summary: "x is the n-th position of a linear digraph",
        parameters: &["n"],
        vocabulary: SUCCESSOR,
        free_fo: &["x"],
        free_so: &[],
        builder: |p| aux(Auxiliary::Numeral(Params::require(p.n, "n", "numeral")?), p),
    },
    CatalogEntry {
        name: "pathE",
        topic: Topic::Auxiliary,
        summary: "w is reachable from v",
        parameters: &[],
        vocabulary: SUCCESSOR,
        free_fo: &["v", "w"],
        free_so: &[],
        builder: |p| aux(Auxiliary::PathE, p),
    },
    CatalogEntry {
        name: "linear",
        topic: Topic::Auxiliary,
        summary: "the structure is a linear digraph",
        parameters: &[],
        vocabulary: SUCCESSOR,
        free_fo: &[],
        free_so: &[],
        builder: |p| aux(Auxiliary::Linear, p),
    },
    CatalogEntry {
        name: "linear2",
        topic: Topic::Auxiliary,
        summary: "(C, E_C) is a linear graph on pairs",
        parameters: &[],
        vocabulary: &[],
        free_fo: &[],
        free_so: PAIR_GRAPH,
        builder: |p| aux(Auxiliary::Linear2, p),
    },
    CatalogEntry {
        name: "pathEC",
        topic: Topic::Auxiliary,
        summary: "(w1, w2) is reachable from (v1, v2) in (C, E_C)",
        parameters: &[],
        vocabulary: &[],
        free_fo: &["v1", "v2", "w1", "w2"],
        free_so: PAIR_GRAPH,
        builder: |p| aux(Auxiliary::PathEC, p),
    },
    CatalogEntry {
        name: "sum",
        topic: Topic::Arithmetic,
        summary: "z = x + y on a linear digraph",
        parameters: &[],
        vocabulary: SUCCESSOR,
        free_fo: &["x", "y", "z"],
        free_so: &[],
        builder: |p| arith(Arithmetic::Sum, p),
    },
    CatalogEntry {
        name: "times",
        topic: Topic::Arithmetic,
        summary: "z = x * y on a linear digraph",
        parameters: &[],
        vocabulary: SUCCESSOR,
        free_fo: &["x", "y", "z"],
        free_so: &[],
        builder: |p| arith(Arithmetic::Times, p),
    },
    CatalogEntry {
        name: "exp",
        topic: Topic::Arithmetic,
        summary: "z = x ^ y on a linear digraph",
        parameters: &[],
        vocabulary: SUCCESSOR,
        free_fo: &["x", "y", "z"],
        free_so: &[],
        builder: |p| arith(Arithmetic::Exp, p),
    },
    CatalogEntry {
        name: "regular",
        topic: Topic::Regularity,
        summary: "all vertices have the same out-degree",
        parameters: &[],
        vocabulary: GRAPH,
        free_fo: &[],
        free_so: &[],
        builder: |_| Ok(regular()),
    },
    CatalogEntry {
        name: "hypercube/so1",
        topic: Topic::Hypercube,
        summary: "hypercube via binary encodings, existential second order",
        parameters: &[],
        vocabulary: GRAPH,
        free_fo: &[],
        free_so: &[],
        builder: |_| Ok(hypercube(Strategy::So1)),
    },
    CatalogEntry {
        name: "hypercube/so2",
        topic: Topic::Hypercube,
        summary: "hypercube via subset labels, prefix exists-exists-forall",
        parameters: &[],
        vocabulary: GRAPH,
        free_fo: &[],
        free_so: &[],
        builder: |_| Ok(hypercube(Strategy::So2)),
    },
    CatalogEntry {
        name: "hypercube/to",
        topic: Topic::Hypercube,
        summary: "hypercube via a chain of doubled graphs, third order",
        parameters: &[],
        vocabulary: GRAPH,
        free_fo: &[],
        free_so: &[],
        builder: |_| Ok(hypercube(Strategy::To)),
    },
    CatalogEntry {
        name: "satqbf_k",
        topic: Topic::Satqbf,
        summary: "word models of true prenex QBFs with at most k blocks",
        parameters: &["k"],
        vocabulary: &[
            (LEQ, 2),
            ("P_not", 1),
            ("P_or", 1),
            ("P_and", 1),
            ("P_exists", 1),
            ("P_forall", 1),
            ("P_open", 1),
            ("P_close", 1),
            ("P_X", 1),
            ("P_bar", 1),
        ],
        free_fo: &[],
        free_so: &[],
        builder: |p| satqbf_k(Params::require(p.k, "k", "satqbf_k")?),
    },
];

pub fn catalog() -> &'static [CatalogEntry] {
    &CATALOG
}

pub fn lookup(name: &str) -> Result<&'static CatalogEntry, LibraryError> {
    CATALOG.iter().find(|e| e.name == name).ok_or_else(|| LibraryError::UnknownName(name.to_string()))
}

/// Builds the catalog entry `name`.
pub fn build(name: &str, params: &Params) -> Result<Formula, LibraryError> {
    lookup(name)?.build(params)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::logic::{analyze, parse_formula, pretty_print, rebound_variables};

    fn sample(entry: &CatalogEntry) -> Formula {
        entry.build(&Params { k: Some(2), n: Some(3), relation: None }).unwrap()
    }

    #[test]
    fn declared_signatures_match() {
        for entry in catalog() {
            let f = sample(entry);
            let stats = analyze(&f);
            let fo: BTreeSet<&str> = stats.free_fo_vars.iter().map(String::as_str).collect();
            assert_eq!(fo, entry.free_fo.iter().copied().collect(), "{}", entry.name);
            let so: BTreeSet<(&str, usize)> = stats.free_so_vars.iter().map(|(n, a)| (n.as_str(), *a)).collect();
            assert_eq!(so, entry.free_so.iter().copied().collect(), "{}", entry.name);
            assert_eq!(stats.is_sentence(), entry.is_sentence(), "{}", entry.name);
        }
    }

    #[test]
    fn well_formed() {
        for entry in catalog() {
            let f = sample(entry);
            assert!(rebound_variables(&f).is_empty(), "{}: {:?}", entry.name, rebound_variables(&f));
            assert_eq!(parse_formula(&pretty_print(&f)).unwrap(), f, "{}", entry.name);
        }
    }

    #[test]
    fn lookup_errors() {
        assert!(matches!(build("nope", &Params::default()), Err(LibraryError::UnknownName(_))));
        assert!(matches!(build("numeral", &Params::default()), Err(LibraryError::InvalidParameter(_))));
        assert!(matches!(build("satqbf_k", &Params::k(0)), Err(LibraryError::InvalidParameter(_))));
    }
}
