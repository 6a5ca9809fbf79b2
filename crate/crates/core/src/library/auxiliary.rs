use std::str::FromStr;

use crate::logic::{Formula, Quantifier};

use super::{eq_nodes, neq_nodes, Graph, LibraryError, Rel, Scope};

/// Names accepted by [`auxiliary`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Auxiliary {
    SucLeq,
    PredLeq,
    IsZero,
    IsOne,
    Numeral(usize),
    PathE,
    Linear,
    Linear2,
    PathEC,
}

impl FromStr for Auxiliary {
    type Err = LibraryError;

    /// Parses a name; `numeral` takes its value as `numeral(n)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "sucLeq" => Auxiliary::SucLeq,
            "predLeq" => Auxiliary::PredLeq,
            "isZero" => Auxiliary::IsZero,
            "isOne" => Auxiliary::IsOne,
            "pathE" => Auxiliary::PathE,
            "linear" => Auxiliary::Linear,
            "linear2" => Auxiliary::Linear2,
            "pathEC" => Auxiliary::PathEC,
            _ => {
                let n = s
                    .strip_prefix("numeral(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|r| r.parse().ok())
                    .ok_or_else(|| LibraryError::UnknownName(s.to_string()))?;
                Auxiliary::Numeral(n)
            }
        })
    }
}

/// Relation names for the vertex set and edges of the width-2 graph that
/// `linear2` and `pathEC` are stated over.
pub const PAIR_VERTICES: &str = "C";
pub const PAIR_EDGES: &str = "E_C";

/// Builds an auxiliary formula over `relation`, or over the default
/// (`leq` for the order-based entries, `succ` otherwise).
///
/// Free variables: `x y` for `sucLeq`, `y x` for `predLeq`, `x` for
/// `isZero`, `isOne` and numerals, `v w` for `pathE`, `v1 v2 w1 w2` for
/// `pathEC`. `linear2` and `pathEC` are also free in the relation
/// variables `C` (arity 2) and `E_C` (arity 4).
pub fn auxiliary(name: Auxiliary, relation: Option<&str>) -> Formula {
    let order = || Rel::vocab(relation.unwrap_or(crate::structures::LEQ));
    let succ = || Rel::vocab(relation.unwrap_or(crate::structures::SUCC));
    let pair = || Graph::new(Rel::var(PAIR_VERTICES), Rel::var(PAIR_EDGES), 2);
    let mut s = Scope::with_names(&[
        "x",
        "y",
        "v",
        "w",
        "v1",
        "v2",
        "w1",
        "w2",
        PAIR_VERTICES,
        PAIR_EDGES,
        relation.unwrap_or(""),
    ]);
    match name {
        Auxiliary::SucLeq => suc_leq(&mut s, &order(), "x", "y"),
        Auxiliary::PredLeq => pred_leq(&mut s, &order(), "y", "x"),
        Auxiliary::IsZero => is_zero(&mut s, &order(), "x"),
        Auxiliary::IsOne => is_one(&mut s, &order(), "x"),
        Auxiliary::Numeral(n) => numeral(&mut s, &NumberLine::successor(succ()), "x", n),
        Auxiliary::PathE => path(&mut s, &Graph::on_domain(succ()), &["v"], &["w"]),
        Auxiliary::Linear => linear(&mut s, &Graph::on_domain(succ())),
        Auxiliary::Linear2 => linear(&mut s, &pair()),
        Auxiliary::PathEC => path(&mut s, &pair(), &["v1", "v2"], &["w1", "w2"]),
    }
}

/// `y` is the immediate successor of `x` in the order `leq`.
pub fn suc_leq(s: &mut Scope, leq: &Rel, x: &str, y: &str) -> Formula {
    let between = s.exists(&["z"], |_, v| {
        let z = v[0].as_str();
        Formula::and(vec![Formula::neq(z, x), Formula::neq(z, y), leq.atom(&[x, z]), leq.atom(&[z, y])])
    });
    Formula::and(vec![leq.atom(&[x, y]), Formula::neq(y, x), Formula::not(between)])
}

/// `x` is the immediate predecessor of `y` in the order `leq`.
pub fn pred_leq(s: &mut Scope, leq: &Rel, y: &str, x: &str) -> Formula {
    suc_leq(s, leq, x, y)
}

/// `x` is the least element of `leq`.
pub fn is_zero(s: &mut Scope, leq: &Rel, x: &str) -> Formula {
    Formula::not(s.exists(&["y"], |_, v| Formula::and(vec![Formula::neq(&v[0], x), leq.atom(&[v[0].as_str(), x])])))
}

/// `x` is the second element of `leq`.
pub fn is_one(s: &mut Scope, leq: &Rel, x: &str) -> Formula {
    s.exists(&["y"], |s, v| {
        let y = v[0].as_str();
        let between = s.exists(&["z"], |_, w| {
            let z = w[0].as_str();
            Formula::and(vec![Formula::neq(z, x), Formula::neq(z, y), leq.atom(&[y, z]), leq.atom(&[z, x])])
        });
        let below_y =
            s.exists(&["z"], |_, w| Formula::and(vec![Formula::neq(&w[0], y), leq.atom(&[w[0].as_str(), y])]));
        Formula::and(vec![Formula::neq(y, x), leq.atom(&[y, x]), Formula::not(between), Formula::not(below_y)])
    })
}

/// A linear order given by `leq`, with its successor relation either given
/// or derived from `leq`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberLine {
    pub leq: Option<Rel>,
    pub succ: Option<Rel>,
}

impl NumberLine {
    /// Successor relation only; [`NumberLine::leq`] must not be needed.
    pub fn successor(succ: Rel) -> NumberLine {
        NumberLine { leq: None, succ: Some(succ) }
    }

    pub fn new(leq: Rel, succ: Option<Rel>) -> NumberLine {
        NumberLine { leq: Some(leq), succ }
    }

    pub fn leq(&self, a: &str, b: &str) -> Formula {
        self.leq.as_ref().expect("number line without an order").atom(&[a, b])
    }

    pub fn succ(&self, s: &mut Scope, a: &str, b: &str) -> Formula {
        match (&self.succ, &self.leq) {
            (Some(r), _) => r.atom(&[a, b]),
            (None, Some(leq)) => suc_leq(s, leq, a, b),
            (None, None) => unreachable!("number line without relations"),
        }
    }
}

/// `x` is the `n`-th element along the successor relation: `n` nested
/// existential steps back to an element without predecessor.
pub fn numeral(s: &mut Scope, line: &NumberLine, x: &str, n: usize) -> Formula {
    if n == 0 {
        return Formula::not(s.exists(&["y"], |s, v| line.succ(s, &v[0], x)));
    }
    s.exists(&["y"], |s, v| {
        let step = line.succ(s, &v[0], x);
        Formula::and(vec![step, numeral(s, line, &v[0], n - 1)])
    })
}

/// `w` is reachable from `v` in `g`: either `v = w` or some loop-free
/// subgraph `(V', E')` is a path with `v` as its only minimal node and `w`
/// as its only maximal node. Nodes are tuples of `g.width` variables.
pub fn path(s: &mut Scope, g: &Graph, v: &[&str], w: &[&str]) -> Formula {
    let k = g.width;
    let sub = s.exists_rel(&[("V'", k), ("E'", 2 * k)], |s, r| {
        let h = Graph::new(r[0].clone(), r[1].clone(), k);
        let mut subgraph = vec![s.nodes(Quantifier::Forall, &["x", "y"], k, |_, n| {
            Formula::implies(
                h.edge(&n[0], &n[1]),
                Formula::and(vec![h.vertex(&n[0]), h.vertex(&n[1]), g.edge(&n[0], &n[1])]),
            )
        })];
        if g.vertices.is_some() {
            subgraph.push(
                s.nodes(Quantifier::Forall, &["x"], k, |_, n| Formula::implies(h.vertex(&n[0]), g.vertex(&n[0]))),
            );
        }
        subgraph.push(s.nodes(Quantifier::Forall, &["x"], k, |_, n| Formula::not(h.edge(&n[0], &n[0]))));
        Formula::and(vec![h.vertex(v), h.vertex(w), Formula::and(subgraph), ends(s, &h, v, w)])
    });
    Formula::or(vec![eq_nodes(v, w), sub])
}

/// `v` is the only source and `w` the only sink of `h`, and every other
/// node has in-degree and out-degree one.
fn ends(s: &mut Scope, h: &Graph, v: &[&str], w: &[&str]) -> Formula {
    let k = h.width;
    let minimal = Formula::and(vec![
        Formula::not(s.nodes(Quantifier::Exists, &["x"], k, |_, n| h.edge(&n[0], v))),
        every_other(s, h, v, |s, y| s.nodes(Quantifier::Exists, &["x"], k, |_, n| h.edge(&n[0], y))),
    ]);
    let maximal = Formula::and(vec![
        Formula::not(s.nodes(Quantifier::Exists, &["x"], k, |_, n| h.edge(w, &n[0]))),
        every_other(s, h, w, |s, y| s.nodes(Quantifier::Exists, &["x"], k, |_, n| h.edge(y, &n[0]))),
    ]);
    Formula::and(vec![minimal, maximal, in_degree_one(s, h, v), out_degree_one(s, h, w)])
}

/// `∀y((V(y) ∧ y ≠ except) → body(y))`.
fn every_other(
    s: &mut Scope,
    h: &Graph,
    except: &[&str],
    body: impl FnOnce(&mut Scope, &[String]) -> Formula,
) -> Formula {
    s.nodes(Quantifier::Forall, &["y"], h.width, |s, n| {
        Formula::implies(Formula::and(vec![h.vertex(&n[0]), neq_nodes(&n[0], except)]), body(s, &n[0]))
    })
}

fn in_degree_one(s: &mut Scope, h: &Graph, except: &[&str]) -> Formula {
    degree_one(s, h, except, |z, x| h.edge(x, z))
}

fn out_degree_one(s: &mut Scope, h: &Graph, except: &[&str]) -> Formula {
    degree_one(s, h, except, |z, x| h.edge(z, x))
}

/// Every vertex `z ≠ except` has exactly one `link(z, ·)` neighbour.
fn degree_one(s: &mut Scope, h: &Graph, except: &[&str], link: impl Fn(&[String], &[String]) -> Formula) -> Formula {
    let k = h.width;
    s.nodes(Quantifier::Forall, &["z"], k, |s, zs| {
        let z = &zs[0];
        let unique = s.nodes(Quantifier::Exists, &["x"], k, |s, xs| {
            let x = &xs[0];
            let others = s.nodes(Quantifier::Forall, &["y"], k, |_, ys| {
                let y = &ys[0];
                Formula::implies(Formula::and(vec![h.vertex(y), link(z, y)]), eq_nodes(y, x))
            });
            Formula::and(vec![link(z, x), others])
        });
        Formula::implies(Formula::and(vec![h.vertex(z), neq_nodes(z, except)]), unique)
    })
}

/// `g` is a linear graph: edges join vertices, any two vertices are
/// connected by a path in one direction, loops occur only on a graph with
/// a single vertex, and some source `v` and sink `w` bound a path shape.
///
/// Differs from the literal construction in three points that make the
/// formula hold exactly of linear graphs: edges are required to lie
/// within the vertex set, comparability is asked only of vertices, and the
/// source and sink conditions ignore loops.
pub fn linear(s: &mut Scope, g: &Graph) -> Formula {
    let k = g.width;
    let mut parts = Vec::new();
    if g.vertices.is_some() {
        parts.push(s.nodes(Quantifier::Forall, &["x", "y"], k, |_, n| {
            Formula::implies(g.edge(&n[0], &n[1]), Formula::and(vec![g.vertex(&n[0]), g.vertex(&n[1])]))
        }));
    }
    parts.push(s.nodes(Quantifier::Forall, &["x", "y"], k, |s, n| {
        let (a, b) = (refs(&n[0]), refs(&n[1]));
        let comparable = Formula::or(vec![path(s, g, &a, &b), path(s, g, &b, &a)]);
        Formula::implies(Formula::and(vec![g.vertex(&a), g.vertex(&b)]), comparable)
    }));
    let two = s.nodes(Quantifier::Exists, &["x", "y"], k, |_, n| {
        Formula::and(vec![g.vertex(&n[0]), g.vertex(&n[1]), neq_nodes(&n[0], &n[1])])
    });
    let no_loops = s.nodes(Quantifier::Forall, &["x"], k, |_, n| Formula::not(g.edge(&n[0], &n[0])));
    parts.push(Formula::implies(two, no_loops));
    parts.push(s.nodes(Quantifier::Exists, &["v", "w"], k, |s, n| {
        let (v, w) = (refs(&n[0]), refs(&n[1]));
        let source =
            Formula::not(s.nodes(Quantifier::Exists, &["x"], k, |_, x| {
                Formula::and(vec![g.edge(&x[0], &v), neq_nodes(&x[0], &v)])
            }));
        let reached = every_other(s, g, &v, |s, y| s.nodes(Quantifier::Exists, &["x"], k, |_, x| g.edge(&x[0], y)));
        let sink =
            Formula::not(s.nodes(Quantifier::Exists, &["x"], k, |_, x| {
                Formula::and(vec![g.edge(&w, &x[0]), neq_nodes(&x[0], &w)])
            }));
        let leaves = every_other(s, g, &w, |s, y| s.nodes(Quantifier::Exists, &["x"], k, |_, x| g.edge(y, &x[0])));
        Formula::and(vec![
            g.vertex(&v),
            g.vertex(&w),
            source,
            reached,
            sink,
            leaves,
            in_degree_one(s, g, &v),
            out_degree_one(s, g, &w),
        ])
    }));
    Formula::and(parts)
}

pub(crate) fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::eval::{eval_grounded_with, eval_naive, Budget, Environment};
    use crate::logic::{analyze, rebound_variables};
    use crate::structures::{generate, Family, FiniteStructure, RelationSymbol, Vocabulary, LEQ};

    /// Grounded truth value, checked against the naive engine on domains
    /// small enough for witness enumeration.
    fn holds(s: &FiniteStructure, f: &Formula, env: &Environment) -> bool {
        let grounded = eval_grounded_with(s, f, env, Budget::default()).unwrap();
        if s.size() <= 3 {
            assert_eq!(eval_naive(s, f, env, Budget::default()).unwrap(), grounded, "engines disagree on {f}");
        }
        grounded
    }

    fn digraph(n: usize, edges: &[(usize, usize)]) -> FiniteStructure {
        let mut s = FiniteStructure::empty(Vocabulary::graph(), n).unwrap();
        for &(a, b) in edges {
            s.insert("E", vec![a, b]).unwrap();
        }
        s
    }

    fn chain_leq(n: usize) -> FiniteStructure {
        let vocab = Vocabulary::new(vec![RelationSymbol::new(LEQ, 2)], vec![]).unwrap();
        let mut s = FiniteStructure::empty(vocab, n).unwrap();
        for a in 0..n {
            for b in a..n {
                s.insert(LEQ, vec![a, b]).unwrap();
            }
        }
        s
    }

    #[test]
    fn path_on_a_chain() {
        let s = generate(Family::LinearDigraph(3)).unwrap();
        let f = auxiliary(Auxiliary::PathE, None);
        assert!(holds(&s, &f, &Environment::with_elements([("v", 0), ("w", 2)])));
        assert!(!holds(&s, &f, &Environment::with_elements([("v", 2), ("w", 0)])));
        assert!(holds(&s, &f, &Environment::with_elements([("v", 1), ("w", 1)])));
    }

    #[test]
    fn linear_graphs() {
        let f = auxiliary(Auxiliary::Linear, Some("E"));
        let yes = [
            digraph(4, &[(0, 1), (1, 2), (2, 3)]),
            digraph(1, &[(0, 0)]),
            digraph(1, &[]),
            digraph(3, &[(2, 0), (0, 1)]),
        ];
        let no = [
            digraph(4, &[(0, 1), (2, 3)]),
            digraph(2, &[(0, 1), (1, 1)]),
            digraph(3, &[(0, 1), (1, 2), (2, 0)]),
            digraph(3, &[(0, 1), (0, 2)]),
            digraph(2, &[]),
        ];
        for s in &yes {
            assert!(holds(s, &f, &Environment::new()), "{s:?}");
        }
        for s in &no {
            assert!(!holds(s, &f, &Environment::new()), "{s:?}");
        }
    }

    #[test]
    fn linear_on_generated_chain() {
        let s = generate(Family::LinearDigraph(4)).unwrap();
        let f = auxiliary(Auxiliary::Linear, None);
        assert!(eval_grounded_with(&s, &f, &Environment::new(), Budget::default()).unwrap());
    }

    #[test]
    fn linear_over_pairs() {
        let s = FiniteStructure::graph(2, &[]).unwrap();
        let f = auxiliary(Auxiliary::Linear2, None);
        let mut env = Environment::new();
        let verts: BTreeSet<Vec<usize>> = [vec![0, 0], vec![0, 1], vec![1, 1]].into();
        let edges: BTreeSet<Vec<usize>> = [vec![0, 0, 0, 1], vec![0, 1, 1, 1]].into();
        env.bind_relation(PAIR_VERTICES, 2, verts.clone()).unwrap();
        env.bind_relation(PAIR_EDGES, 4, edges).unwrap();
        assert!(eval_grounded_with(&s, &f, &env, Budget::default()).unwrap());
        let broken: BTreeSet<Vec<usize>> = [vec![0, 0, 0, 1]].into();
        env.bind_relation(PAIR_EDGES, 4, broken).unwrap();
        assert!(!eval_grounded_with(&s, &f, &env, Budget::default()).unwrap());

        let p = auxiliary(Auxiliary::PathEC, None);
        let edges: BTreeSet<Vec<usize>> = [vec![0, 0, 0, 1], vec![0, 1, 1, 1]].into();
        env.bind_relation(PAIR_EDGES, 4, edges).unwrap();
        for (v, w, expected) in [((0, 0), (1, 1), true), ((1, 1), (0, 0), false), ((1, 0), (1, 0), true)] {
            env.bind_element("v1", v.0).bind_element("v2", v.1).bind_element("w1", w.0).bind_element("w2", w.1);
            assert_eq!(eval_grounded_with(&s, &p, &env, Budget::default()).unwrap(), expected);
        }
    }

    #[test]
    fn order_auxiliaries_on_a_chain() {
        for n in 1..=4 {
            let s = chain_leq(n);
            for a in 0..n {
                let x = Environment::with_elements([("x", a)]);
                assert_eq!(holds(&s, &auxiliary(Auxiliary::IsZero, None), &x), a == 0);
                assert_eq!(holds(&s, &auxiliary(Auxiliary::IsOne, None), &x), a == 1);
                for b in 0..n {
                    let xy = Environment::with_elements([("x", a), ("y", b)]);
                    assert_eq!(holds(&s, &auxiliary(Auxiliary::SucLeq, None), &xy), b == a + 1);
                    assert_eq!(holds(&s, &auxiliary(Auxiliary::PredLeq, None), &xy), b == a + 1);
                }
            }
        }
    }

    #[test]
    fn numerals_pick_one_position() {
        for n in 1..=6 {
            let s = generate(Family::LinearDigraph(n)).unwrap();
            for j in 0..n {
                let f = auxiliary(Auxiliary::Numeral(j), None);
                for p in 0..n {
                    let env = Environment::with_elements([("x", p)]);
                    assert_eq!(eval_naive(&s, &f, &env, Budget::default()).unwrap(), p == j, "n={n} j={j} p={p}");
                }
            }
        }
    }

    #[test]
    fn declared_free_variables() {
        let cases = [
            ("sucLeq", vec!["x", "y"], 0),
            ("predLeq", vec!["x", "y"], 0),
            ("isZero", vec!["x"], 0),
            ("numeral(3)", vec!["x"], 0),
            ("pathE", vec!["v", "w"], 0),
            ("linear", vec![], 0),
            ("linear2", vec![], 2),
            ("pathEC", vec!["v1", "v2", "w1", "w2"], 2),
        ];
        for (name, fo, so) in cases {
            let f = auxiliary(name.parse().unwrap(), None);
            let stats = analyze(&f);
            let mut free: Vec<&str> = stats.free_fo_vars.iter().map(String::as_str).collect();
            free.sort_unstable();
            assert_eq!(free, fo, "{name}");
            assert_eq!(stats.free_so_vars.len(), so, "{name}");
            assert!(rebound_variables(&f).is_empty(), "{name}");
        }
        assert!(matches!("nope".parse::<Auxiliary>(), Err(LibraryError::UnknownName(_))));
    }
}
