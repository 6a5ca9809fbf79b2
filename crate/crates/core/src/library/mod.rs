//! Builders for the formulas of the construction: auxiliary predicates,
//! arithmetic on linear digraphs, regularity, three hypercube sentences and
//! the second-order sentence for satisfiable QBFs with `k` blocks.
//!
//! Every builder returns a [`Formula`]. Bound names come from a [`Scope`],
//! so no name is bound twice on one root-to-leaf path and a builder never
//! captures the free variables of its arguments.
//!
//! Sub-formulas described only in words by the construction are marked
//! "implementer-supplied" in the builder documentation.

mod arith;
mod auxiliary;
mod catalog;
mod graphs;
mod satqbf;

use thiserror::Error;

use crate::logic::{Binder, Formula, Quantifier, ToShape};

pub use arith::{arithmetic, exp, successor_order, sum, times, Arithmetic};
pub use auxiliary::{
    auxiliary, is_one, is_zero, linear, numeral, path, pred_leq, suc_leq, Auxiliary, PAIR_EDGES, PAIR_VERTICES,
};
pub use catalog::{build, catalog, lookup, CatalogEntry, Params, Topic};
pub use graphs::{hypercube, hypercube_so1, hypercube_so2, hypercube_to, regular, Strategy};
pub use satqbf::satqbf_k;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LibraryError {
    #[error("unknown builder {0}")]
    UnknownName(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// A relation used by a builder: a vocabulary symbol or a second-order
/// variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rel {
    Vocab(String),
    Var(String),
}

impl Rel {
    pub fn vocab(name: impl Into<String>) -> Rel {
        Rel::Vocab(name.into())
    }

    pub fn var(name: impl Into<String>) -> Rel {
        Rel::Var(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Rel::Vocab(n) | Rel::Var(n) => n,
        }
    }

    pub fn atom<T: AsRef<str>>(&self, args: &[T]) -> Formula {
        let args: Vec<&str> = args.iter().map(AsRef::as_ref).collect();
        match self {
            Rel::Vocab(n) => Formula::rel(n, &args),
            Rel::Var(n) => Formula::so(n, &args),
        }
    }
}

/// A graph whose nodes are `width`-tuples of elements. The vertex relation
/// has arity `width` and the edge relation `2 * width`; without a vertex
/// relation every tuple is a vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub vertices: Option<Rel>,
    pub edges: Rel,
    pub width: usize,
}

impl Graph {
    /// Graph on the whole domain with the given edge relation.
    pub fn on_domain(edges: Rel) -> Graph {
        Graph { vertices: None, edges, width: 1 }
    }

    pub fn new(vertices: Rel, edges: Rel, width: usize) -> Graph {
        Graph { vertices: Some(vertices), edges, width }
    }

    pub fn vertex<T: AsRef<str>>(&self, node: &[T]) -> Formula {
        match &self.vertices {
            Some(v) => v.atom(node),
            None => Formula::truth(),
        }
    }

    pub fn edge<A: AsRef<str>, B: AsRef<str>>(&self, a: &[A], b: &[B]) -> Formula {
        let args: Vec<&str> = a.iter().map(AsRef::as_ref).chain(b.iter().map(AsRef::as_ref)).collect();
        self.edges.atom(&args)
    }
}

/// Componentwise equality of two tuples of variables.
pub(crate) fn eq_nodes<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B]) -> Formula {
    match a.len() {
        1 => Formula::eq(a[0].as_ref(), b[0].as_ref()),
        _ => Formula::and(a.iter().zip(b).map(|(x, y)| Formula::eq(x.as_ref(), y.as_ref())).collect()),
    }
}

pub(crate) fn neq_nodes<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B]) -> Formula {
    Formula::not(eq_nodes(a, b))
}

/// Names bound or free along the current path of a formula under
/// construction. Binding helpers pick a name not yet in use, push it for
/// the duration of the body and pop it afterwards.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    used: Vec<String>,
}

impl Scope {
    pub fn new() -> Scope {
        Scope::default()
    }

    /// A scope in which `names` (free variables, vocabulary symbols) are
    /// already taken.
    pub fn with_names<S: AsRef<str>>(names: &[S]) -> Scope {
        Scope { used: names.iter().map(|n| n.as_ref().to_string()).collect() }
    }

    /// `base` if unused, else `base_2`, `base_3`, … .
    pub fn fresh(&self, base: &str) -> String {
        if !self.used.iter().any(|u| u == base) {
            return base.to_string();
        }
        (2..).map(|i| format!("{base}_{i}")).find(|c| !self.used.contains(c)).expect("unbounded candidate sequence")
    }

    fn enter(&mut self, bases: &[&str]) -> Vec<String> {
        bases
            .iter()
            .map(|b| {
                let n = self.fresh(b);
                self.used.push(n.clone());
                n
            })
            .collect()
    }

    fn leave(&mut self, count: usize) {
        self.used.truncate(self.used.len() - count);
    }

    fn first_order(
        &mut self,
        q: Quantifier,
        bases: &[&str],
        body: impl FnOnce(&mut Scope, &[String]) -> Formula,
    ) -> Formula {
        let names = self.enter(bases);
        let f = body(self, &names);
        self.leave(names.len());
        names.iter().rev().fold(f, |acc, n| Formula::quant(q, Binder::First(n.clone()), acc))
    }

    pub fn exists(&mut self, bases: &[&str], body: impl FnOnce(&mut Scope, &[String]) -> Formula) -> Formula {
        self.first_order(Quantifier::Exists, bases, body)
    }

    pub fn forall(&mut self, bases: &[&str], body: impl FnOnce(&mut Scope, &[String]) -> Formula) -> Formula {
        self.first_order(Quantifier::Forall, bases, body)
    }

    /// Second-order quantifiers over `(base, arity)` pairs, outermost first.
    pub fn second_order(
        &mut self,
        q: Quantifier,
        specs: &[(&str, usize)],
        body: impl FnOnce(&mut Scope, &[Rel]) -> Formula,
    ) -> Formula {
        let bases: Vec<&str> = specs.iter().map(|(b, _)| *b).collect();
        let names = self.enter(&bases);
        let rels: Vec<Rel> = names.iter().cloned().map(Rel::Var).collect();
        let f = body(self, &rels);
        self.leave(names.len());
        names
            .iter()
            .zip(specs)
            .rev()
            .fold(f, |acc, (n, (_, arity))| Formula::quant(q, Binder::Second { name: n.clone(), arity: *arity }, acc))
    }

    pub fn exists_rel(&mut self, specs: &[(&str, usize)], body: impl FnOnce(&mut Scope, &[Rel]) -> Formula) -> Formula {
        self.second_order(Quantifier::Exists, specs, body)
    }

    pub fn forall_rel(&mut self, specs: &[(&str, usize)], body: impl FnOnce(&mut Scope, &[Rel]) -> Formula) -> Formula {
        self.second_order(Quantifier::Forall, specs, body)
    }

    /// One third-order quantifier.
    pub fn third_order(
        &mut self,
        q: Quantifier,
        base: &str,
        shape: ToShape,
        body: impl FnOnce(&mut Scope, &str) -> Formula,
    ) -> Formula {
        let names = self.enter(&[base]);
        let f = body(self, &names[0]);
        self.leave(1);
        Formula::quant(q, Binder::Third { name: names[0].clone(), shape }, f)
    }

    /// `width` first-order variables named `base1 … basew`, or `base`
    /// when `width == 1`.
    pub(crate) fn node_bases(base: &str, width: usize) -> Vec<String> {
        if width == 1 {
            vec![base.to_string()]
        } else {
            (1..=width).map(|i| format!("{base}{i}")).collect()
        }
    }

    /// Quantifies one node of each base, each node a tuple of `width`
    /// variables.
    pub fn nodes(
        &mut self,
        q: Quantifier,
        bases: &[&str],
        width: usize,
        body: impl FnOnce(&mut Scope, &[Vec<String>]) -> Formula,
    ) -> Formula {
        let flat: Vec<String> = bases.iter().flat_map(|b| Scope::node_bases(b, width)).collect();
        let flat_refs: Vec<&str> = flat.iter().map(String::as_str).collect();
        self.first_order(q, &flat_refs, |s, names| {
            let nodes: Vec<Vec<String>> = names.chunks(width).map(<[String]>::to_vec).collect();
            body(s, &nodes)
        })
    }
}

/// Properties a binary relation `f` may be required to have as a map from
/// `dom` to `ran`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct MapProps {
    pub total: bool,
    pub injective: bool,
    pub surjective: bool,
}

impl MapProps {
    pub const FUNCTION: MapProps = MapProps { total: true, injective: false, surjective: false };
    pub const INJECTION: MapProps = MapProps { total: true, injective: true, surjective: false };
    pub const BIJECTION: MapProps = MapProps { total: true, injective: true, surjective: true };
}

pub(crate) type Pred<'a> = &'a dyn Fn(&mut Scope, &str) -> Formula;

/// `f` is a functional relation contained in `dom × ran` with the given
/// extra properties. Each property is its own universally quantified
/// conjunct, as in the bijection of the regularity sentence.
pub(crate) fn map_constraints(s: &mut Scope, f: &Rel, dom: Pred<'_>, ran: Pred<'_>, props: MapProps) -> Formula {
    let mut parts = vec![
        s.forall(&["a", "b"], |s, v| {
            let (a, b) = (v[0].as_str(), v[1].as_str());
            Formula::implies(f.atom(&[a, b]), Formula::and(vec![dom(s, a), ran(s, b)]))
        }),
        s.forall(&["a", "b", "c"], |_, v| {
            let (a, b, c) = (v[0].as_str(), v[1].as_str(), v[2].as_str());
            Formula::implies(Formula::and(vec![f.atom(&[a, b]), f.atom(&[a, c])]), Formula::eq(b, c))
        }),
    ];
    if props.total {
        parts.push(s.forall(&["a"], |s, v| {
            let a = v[0].as_str();
            let image = s.exists(&["b"], |_, w| f.atom(&[a, w[0].as_str()]));
            Formula::implies(dom(s, a), image)
        }));
    }
    if props.injective {
        parts.push(s.forall(&["a", "b", "c"], |_, v| {
            let (a, b, c) = (v[0].as_str(), v[1].as_str(), v[2].as_str());
            Formula::implies(Formula::and(vec![f.atom(&[a, c]), f.atom(&[b, c])]), Formula::eq(a, b))
        }));
    }
    if props.surjective {
        parts.push(s.forall(&["b"], |s, v| {
            let b = v[0].as_str();
            let preimage = s.exists(&["a"], |_, w| f.atom(&[w[0].as_str(), b]));
            Formula::implies(ran(s, b), preimage)
        }));
    }
    Formula::and(parts)
}

/// Every element satisfies `p`.
pub(crate) fn anything(_: &mut Scope, _: &str) -> Formula {
    Formula::truth()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{rebound_variables, to_sexp};

    #[test]
    fn fresh_names_avoid_the_path() {
        let mut s = Scope::with_names(&["x"]);
        let f = s.exists(&["x"], |s, v| s.exists(&["x"], |_, w| Formula::eq(v[0].as_str(), w[0].as_str())));
        assert_eq!(to_sexp(&f), "(ex1 x_2 (ex1 x_3 (eq x_2 x_3)))");
        assert!(rebound_variables(&f).is_empty());
    }

    #[test]
    fn siblings_may_reuse_names() {
        let mut s = Scope::new();
        let a = s.exists(&["x"], |_, v| Formula::eq(v[0].as_str(), v[0].as_str()));
        let b = s.exists(&["x"], |_, v| Formula::eq(v[0].as_str(), v[0].as_str()));
        assert_eq!(a, b);
    }

    #[test]
    fn nodes_of_width_two() {
        let mut s = Scope::new();
        let g = Graph::new(Rel::var("C"), Rel::var("EC"), 2);
        let f = s.nodes(Quantifier::Exists, &["a", "b"], 2, |_, n| g.edge(&n[0], &n[1]));
        assert_eq!(to_sexp(&f), "(ex1 a1 (ex1 a2 (ex1 b1 (ex1 b2 (var2 EC a1 a2 b1 b2)))))");
    }
}
