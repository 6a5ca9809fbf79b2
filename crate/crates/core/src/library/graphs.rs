use std::str::FromStr;

use crate::logic::{Formula, Quantifier, ToArg, ToShape};
use crate::structures::EDGE;

use super::arith::{exp, sum, times};
use super::auxiliary::{linear, numeral, NumberLine};
use super::{anything, map_constraints, Graph, LibraryError, MapProps, Rel, Scope};

/// Regular graphs: some set `A` has, for every vertex `x`, the cardinality
/// of the neighbourhood `B` of `x`, witnessed by a bijection `F` from `A`
/// to `B`.
pub fn regular() -> Formula {
    let e = Rel::vocab(EDGE);
    let mut s = Scope::with_names(&[EDGE]);
    s.exists_rel(&[("A", 1)], |s, r| {
        let a = &r[0];
        s.forall(&["x"], |s, v| {
            let x = v[0].as_str();
            s.exists_rel(&[("B", 1)], |s, r| {
                let b = &r[0];
                let a1 = s.forall(&["z"], |_, w| Formula::iff(b.atom(&[w[0].as_str()]), e.atom(&[x, w[0].as_str()])));
                let a2 = s.exists_rel(&[("F", 2)], |s, r| bijection_template(s, &r[0], a, b));
                Formula::and(vec![a1, a2])
            })
        })
    })
}

/// `∀xyz` over the five conditions making `f` a bijection from `a` to `b`.
fn bijection_template(s: &mut Scope, f: &Rel, a: &Rel, b: &Rel) -> Formula {
    s.forall(&["x", "y", "z"], |s, v| {
        let (x, y, z) = (v[0].as_str(), v[1].as_str(), v[2].as_str());
        Formula::and(vec![
            Formula::implies(f.atom(&[x, y]), Formula::and(vec![a.atom(&[x]), b.atom(&[y])])),
            Formula::implies(Formula::and(vec![f.atom(&[x, y]), f.atom(&[x, z])]), Formula::eq(y, z)),
            Formula::implies(a.atom(&[x]), s.exists(&["y"], |_, w| f.atom(&[x, w[0].as_str()]))),
            Formula::implies(Formula::and(vec![f.atom(&[x, z]), f.atom(&[y, z])]), Formula::eq(x, y)),
            Formula::implies(b.atom(&[y]), s.exists(&["x"], |_, w| f.atom(&[w[0].as_str(), y]))),
        ])
    })
}

/// The three hypercube sentences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Binary encodings of the vertices under an existential order.
    So1,
    /// Vertices labelled by subsets of a set `V'`.
    So2,
    /// A chain of graphs, each two copies of its predecessor.
    To,
}

impl FromStr for Strategy {
    type Err = LibraryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "so1" => Ok(Strategy::So1),
            "so2" => Ok(Strategy::So2),
            "to" => Ok(Strategy::To),
            _ => Err(LibraryError::UnknownName(s.to_string())),
        }
    }
}

pub fn hypercube(strategy: Strategy) -> Formula {
    match strategy {
        Strategy::So1 => hypercube_so1(),
        Strategy::So2 => hypercube_so2(),
        Strategy::To => hypercube_to(),
    }
}

/// `R` labels every vertex but one with a distinct nonempty subset of a
/// proper nonempty subset `V'` of the domain, every such subset labels a
/// vertex, the remaining vertex `z` has the empty label, and two vertices
/// are adjacent in both directions iff their labels differ in exactly one
/// element.
pub fn hypercube_so2() -> Formula {
    let e = Rel::vocab(EDGE);
    let mut s = Scope::with_names(&[EDGE]);
    let labelled = |r: &Rel, x: &str, set: &Rel, s: &mut Scope| {
        s.forall(&["v"], |_, w| Formula::iff(r.atom(&[x, w[0].as_str()]), set.atom(&[w[0].as_str()])))
    };
    let nonempty_subset = |s: &mut Scope, set: &Rel, of: &Rel| {
        Formula::and(vec![
            s.forall(&["v"], |_, w| Formula::implies(set.atom(&[w[0].as_str()]), of.atom(&[w[0].as_str()]))),
            s.exists(&["v"], |_, w| set.atom(&[w[0].as_str()])),
        ])
    };
    s.exists_rel(&[("R", 2)], |s, r| {
        let r = &r[0];
        let labels = s.exists_rel(&[("V'", 1)], |s, vp| {
            let vp = &vp[0];
            let a1 = Formula::and(vec![
                s.exists(&["v"], |_, w| Formula::not(vp.atom(&[w[0].as_str()]))),
                s.exists(&["v"], |_, w| vp.atom(&[w[0].as_str()])),
            ]);
            let every_subset = s.forall_rel(&[("S", 1)], |s, set| {
                let set = &set[0];
                let a2 = nonempty_subset(s, set, vp);
                let named = s.exists(&["x"], |s, v| {
                    let x = v[0].as_str();
                    let a3 = labelled(r, x, set, s);
                    let a4 = Formula::not(s.exists(&["y"], |s, w| {
                        let y = w[0].as_str();
                        Formula::and(vec![Formula::neq(x, y), labelled(r, y, set, s)])
                    }));
                    Formula::and(vec![a3, a4])
                });
                Formula::implies(a2, named)
            });
            let a5 = s.exists(&["z"], |s, v| {
                let z = v[0].as_str();
                let empty = Formula::not(s.exists(&["v"], |_, w| r.atom(&[z, w[0].as_str()])));
                let others = s.forall(&["z'"], |s, w| {
                    let z1 = w[0].as_str();
                    let label = s.exists_rel(&[("S", 1)], |s, set| {
                        let set = &set[0];
                        Formula::and(vec![nonempty_subset(s, set, vp), labelled(r, z1, set, s)])
                    });
                    Formula::implies(Formula::neq(z, z1), label)
                });
                Formula::and(vec![empty, others])
            });
            Formula::and(vec![a1, every_subset, a5])
        });
        let adjacency = s.forall(&["x", "y"], |s, v| {
            let (x, y) = (v[0].as_str(), v[1].as_str());
            let a6 = s.exists(&["v"], |s, w| {
                let u = w[0].as_str();
                let differs = Formula::or(vec![
                    Formula::and(vec![r.atom(&[x, u]), Formula::not(r.atom(&[y, u]))]),
                    Formula::and(vec![r.atom(&[y, u]), Formula::not(r.atom(&[x, u]))]),
                ]);
                let rest = s.forall(&["v'"], |_, w| {
                    let u1 = w[0].as_str();
                    Formula::implies(Formula::neq(u1, u), Formula::iff(r.atom(&[x, u1]), r.atom(&[y, u1])))
                });
                Formula::and(vec![differs, rest])
            });
            Formula::iff(Formula::and(vec![e.atom(&[x, y]), e.atom(&[y, x])]), a6)
        });
        Formula::and(vec![labels, adjacency])
    })
}

/// `leq` is a reflexive total order of the domain. Implementer-supplied.
fn total_order(s: &mut Scope, leq: &Rel) -> Formula {
    s.forall(&["a", "b", "c"], |_, v| {
        let (a, b, c) = (v[0].as_str(), v[1].as_str(), v[2].as_str());
        Formula::and(vec![
            leq.atom(&[a, a]),
            Formula::implies(Formula::and(vec![leq.atom(&[a, b]), leq.atom(&[b, a])]), Formula::eq(a, b)),
            Formula::implies(Formula::and(vec![leq.atom(&[a, b]), leq.atom(&[b, c])]), leq.atom(&[a, c])),
            Formula::or(vec![leq.atom(&[a, b]), leq.atom(&[b, a])]),
        ])
    })
}

/// `∃c(c = n ∧ body(c))`.
fn with_numeral(s: &mut Scope, line: &NumberLine, n: usize, body: impl FnOnce(&mut Scope, &str) -> Formula) -> Formula {
    s.exists(&["c"], |s, v| {
        let c = v[0].as_str();
        Formula::and(vec![numeral(s, line, c, n), body(s, c)])
    })
}

/// `rel(a, ·)` is the element `n`.
fn maps_to_numeral(s: &mut Scope, line: &NumberLine, rel: &Rel, a: &str, n: usize) -> Formula {
    s.exists(&["b"], |s, v| {
        let b = v[0].as_str();
        Formula::and(vec![rel.atom(&[a, b]), numeral(s, line, b, n)])
    })
}

/// `v` has no predecessor and `w` no successor in `(vs, es)`, both nodes.
fn first_and_last(s: &mut Scope, vs: &Rel, es: &Rel, v: &str, w: &str) -> Formula {
    Formula::and(vec![
        vs.atom(&[v]),
        vs.atom(&[w]),
        Formula::not(s.exists(&["a"], |_, x| es.atom(&[x[0].as_str(), v]))),
        Formula::not(s.exists(&["a"], |_, x| es.atom(&[w, x[0].as_str()]))),
    ])
}

/// `b` is a function from `vs` to `{0, 1}`.
fn bits(s: &mut Scope, line: &NumberLine, b: &Rel, vs: &Rel) -> Formula {
    let dom = |_: &mut Scope, a: &str| vs.atom(&[a]);
    let ran = |s: &mut Scope, a: &str| Formula::or(vec![numeral(s, line, a, 0), numeral(s, line, a, 1)]);
    map_constraints(s, b, &dom, &ran, MapProps::FUNCTION)
}

/// Relation symbols of one binary encoding: nodes `vs`, order `es` and
/// bit assignment `bs`.
struct Encoding<'a> {
    vs: &'a Rel,
    es: &'a Rel,
    bs: &'a Rel,
}

/// `(vs, es, bs)` is the `m`-bit binary encoding of the element `value`,
/// most significant bit first. A weight function `W` sends the `i`-th
/// node to `b_i · 2^(m-i)`, the weights live on a linear digraph `V'` of
/// the powers of two below `2^m`, and a running sum `U` along the nodes
/// ends in `value`.
///
/// The exponent `n_x = m - i` is chosen per node. Bijections and
/// functions are implementer-supplied.
fn encoding(s: &mut Scope, line: &NumberLine, enc: &Encoding<'_>, value: &str, m: &str) -> Formula {
    let Encoding { vs, es, bs } = *enc;
    s.exists_rel(&[("W_x", 2), ("I_x", 2)], |s, r| {
        let (wx, ix) = (&r[0], &r[1]);
        s.exists(&["v", "w"], |s, n| {
            let (v, w) = (n[0].as_str(), n[1].as_str());
            s.forall(&["x'"], |s, p| {
                let x1 = p[0].as_str();
                let a341 = {
                    let dom = |_: &mut Scope, a: &str| vs.atom(&[a]);
                    let ran = |s: &mut Scope, a: &str| {
                        Formula::and(vec![Formula::not(numeral(s, line, a, 0)), line.leq(a, m)])
                    };
                    map_constraints(s, ix, &dom, &ran, MapProps::BIJECTION)
                };
                let indexed = s.forall(&["s", "s'", "q", "q'"], |s, q| {
                    let (a, a1, b, b1) = (q[0].as_str(), q[1].as_str(), q[2].as_str(), q[3].as_str());
                    let premise = Formula::and(vec![es.atom(&[a, b]), ix.atom(&[a, a1]), ix.atom(&[b, b1])]);
                    Formula::implies(premise, line.succ(s, a1, b1))
                });
                let a342 = first_and_last(s, vs, es, v, w);
                let a343 = maps_to_numeral(s, line, ix, v, 1);
                let powers = s.exists_rel(&[("V'", 1), ("E'", 2)], |s, r| {
                    let (vp, ep) = (&r[0], &r[1]);
                    s.exists(&["v1", "v2", "w"], |s, n| {
                        let (v1, v2, w1) = (n[0].as_str(), n[1].as_str(), n[2].as_str());
                        let a344 = linear(s, &Graph::new(vp.clone(), ep.clone(), 1));
                        let a345 =
                            Formula::and(vec![first_and_last(s, vp, ep, v1, w1), vp.atom(&[v2]), ep.atom(&[v1, v2])]);
                        let doubling = s.forall(&["u"], |s, q| {
                            let u = q[0].as_str();
                            let a346 = with_numeral(s, line, 2, |s, two| {
                                s.exists(&["m'"], |s, q| {
                                    let m1 = q[0].as_str();
                                    Formula::and(vec![line.succ(s, m1, m), exp(s, line, two, m1, u)])
                                })
                            });
                            let a347 =
                                |s: &mut Scope, y1: &str| with_numeral(s, line, 2, |s, two| times(s, line, two, y1, u));
                            let step = s.exists(&["y'"], |s, q| {
                                let y1 = q[0].as_str();
                                Formula::and(vec![ep.atom(&[y1, u]), a347(s, y1)])
                            });
                            Formula::or(vec![
                                Formula::not(vp.atom(&[u])),
                                Formula::and(vec![
                                    Formula::implies(Formula::eq(u, v1), numeral(s, line, u, 0)),
                                    Formula::implies(Formula::eq(u, v2), numeral(s, line, u, 1)),
                                    Formula::implies(Formula::eq(u, w1), a346),
                                    Formula::implies(
                                        Formula::and(vec![Formula::neq(u, v1), Formula::neq(u, v2)]),
                                        step,
                                    ),
                                ]),
                            ])
                        });
                        let a348 = Formula::and(vec![
                            maps_to_numeral(s, line, bs, x1, 0),
                            maps_to_numeral(s, line, wx, x1, 0),
                        ]);
                        let weighted = s.exists(&["n_x"], |s, q| {
                            let nx = q[0].as_str();
                            let a349 = Formula::and(vec![
                                maps_to_numeral(s, line, bs, x1, 1),
                                s.exists(&["i"], |s, q| {
                                    let i = q[0].as_str();
                                    Formula::and(vec![ix.atom(&[x1, i]), sum(s, line, nx, i, m)])
                                }),
                            ]);
                            let weight = s.exists(&["t"], |s, q| {
                                let t = q[0].as_str();
                                let a3410 = with_numeral(s, line, 2, |s, two| exp(s, line, two, nx, t));
                                Formula::and(vec![wx.atom(&[x1, t]), a3410])
                            });
                            Formula::and(vec![a349, weight])
                        });
                        let bit = Formula::implies(vs.atom(&[x1]), Formula::or(vec![a348, weighted]));
                        let a3411 = running_sum(s, line, enc, wx, v, w, value);
                        let a3412 = {
                            let dom = |_: &mut Scope, a: &str| vs.atom(&[a]);
                            let ran = |_: &mut Scope, a: &str| vp.atom(&[a]);
                            map_constraints(s, wx, &dom, &ran, MapProps::FUNCTION)
                        };
                        Formula::and(vec![a344, a345, doubling, bit, a3411, a3412])
                    })
                });
                Formula::and(vec![a341, indexed, a342, a343, ix.atom(&[w, m]), powers])
            })
        })
    })
}

/// `value` is the sum of the weights `wx` along `(vs, es)` from `first`
/// to `last`, accumulated in `U_x`.
fn running_sum(
    s: &mut Scope,
    line: &NumberLine,
    enc: &Encoding<'_>,
    wx: &Rel,
    first: &str,
    last: &str,
    value: &str,
) -> Formula {
    let Encoding { vs, es, .. } = *enc;
    s.exists_rel(&[("U_x", 2)], |s, r| {
        let ux = &r[0];
        let a34111 = {
            let dom = |_: &mut Scope, a: &str| vs.atom(&[a]);
            map_constraints(s, ux, &dom, &anything, MapProps::FUNCTION)
        };
        let nodes = s.forall(&["x'"], |s, p| {
            let x1 = p[0].as_str();
            let a34112 = Formula::implies(
                Formula::eq(x1, first),
                s.exists(&["a"], |_, q| {
                    Formula::and(vec![ux.atom(&[x1, q[0].as_str()]), wx.atom(&[x1, q[0].as_str()])])
                }),
            );
            let a34113 = Formula::implies(Formula::eq(x1, last), ux.atom(&[x1, value]));
            let a34114 = Formula::neq(x1, first);
            let step = s.exists(&["x''"], |s, q| {
                let x2 = q[0].as_str();
                let a34115 = s.exists(&["a", "b", "c"], |s, q| {
                    let (a, b, c) = (q[0].as_str(), q[1].as_str(), q[2].as_str());
                    Formula::and(vec![ux.atom(&[x2, a]), wx.atom(&[x1, b]), ux.atom(&[x1, c]), sum(s, line, a, b, c)])
                });
                Formula::and(vec![es.atom(&[x2, x1]), a34115])
            });
            Formula::or(vec![
                Formula::not(vs.atom(&[x1])),
                Formula::and(vec![a34112, a34113, Formula::implies(a34114, step)]),
            ])
        });
        Formula::and(vec![a34111, nodes])
    })
}

/// An existential order `Ord` numbers the vertices `0 … n-1`; a bijection
/// `F` relabels them, every vertex's label has an `m`-bit encoding, two
/// vertices are adjacent iff their encodings differ in exactly one bit,
/// and some vertex's encoding is all ones.
///
/// The order and bijection axioms, the per-node exponent of the weights
/// and the requirement that the differing bit lie on the encoding are
/// implementer-supplied. The numeral `2` occurs in the weight conditions,
/// so the sentence needs at least three vertices to hold.
pub fn hypercube_so1() -> Formula {
    let e = Rel::vocab(EDGE);
    let mut s = Scope::with_names(&[EDGE]);
    s.exists_rel(&[("Ord", 2)], |s, r| {
        let ord = r[0].clone();
        let line = NumberLine::new(ord.clone(), None);
        let a1 = total_order(s, &ord);
        let rest = s.exists_rel(&[("F", 2)], |s, r| {
            let f = &r[0];
            s.exists(&["m"], |s, v| {
                let m = v[0].as_str();
                let a2 = map_constraints(s, f, &anything, &anything, MapProps::BIJECTION);
                let adjacency = s.forall(&["x", "y"], |s, v| {
                    let (x, y) = (v[0].as_str(), v[1].as_str());
                    Formula::iff(e.atom(&[x, y]), one_bit_apart(s, &line, f, x, y, m))
                });
                let a4 = s.exists(&["z"], |s, v| {
                    let z = v[0].as_str();
                    s.exists_rel(&[("V_z", 1), ("E_z", 2), ("B_z", 2)], |s, r| {
                        let enc = Encoding { vs: &r[0], es: &r[1], bs: &r[2] };
                        let ones = s.forall(&["a"], |s, q| {
                            let a = q[0].as_str();
                            Formula::implies(enc.vs.atom(&[a]), maps_to_numeral(s, &line, enc.bs, a, 1))
                        });
                        let encoded = s.exists(&["f"], |s, q| {
                            let fz = q[0].as_str();
                            Formula::and(vec![f.atom(&[z, fz]), encoding(s, &line, &enc, fz, m)])
                        });
                        Formula::and(vec![
                            linear(s, &Graph::new(r[0].clone(), r[1].clone(), 1)),
                            bits(s, &line, enc.bs, enc.vs),
                            ones,
                            encoded,
                        ])
                    })
                });
                Formula::and(vec![a2, adjacency, a4])
            })
        });
        Formula::and(vec![a1, rest])
    })
}

/// The encodings of `F(x)` and `F(y)` have length `m` and differ in
/// exactly one bit.
fn one_bit_apart(s: &mut Scope, line: &NumberLine, f: &Rel, x: &str, y: &str, m: &str) -> Formula {
    let specs = [("V_x", 1), ("E_x", 2), ("V_y", 1), ("E_y", 2), ("B_x", 2), ("B_y", 2)];
    s.exists_rel(&specs, |s, r| {
        let (vx, ex, vy, ey, bx, by) = (&r[0], &r[1], &r[2], &r[3], &r[4], &r[5]);
        let a31 = Formula::and(vec![
            linear(s, &Graph::new(vx.clone(), ex.clone(), 1)),
            linear(s, &Graph::new(vy.clone(), ey.clone(), 1)),
        ]);
        let a32 = bits(s, line, bx, vx);
        let a33 = bits(s, line, by, vy);
        let encoded = |s: &mut Scope, who: &str, enc: &Encoding<'_>| {
            s.exists(&["f"], |s, q| {
                let value = q[0].as_str();
                Formula::and(vec![f.atom(&[who, value]), encoding(s, line, enc, value, m)])
            })
        };
        let a34 = encoded(s, x, &Encoding { vs: vx, es: ex, bs: bx });
        let a35 = encoded(s, y, &Encoding { vs: vy, es: ey, bs: by });
        let aligned = s.exists_rel(&[("G", 2)], |s, r| {
            let g = &r[0];
            let a36 = {
                let dom = |_: &mut Scope, a: &str| vx.atom(&[a]);
                let ran = |_: &mut Scope, a: &str| vy.atom(&[a]);
                map_constraints(s, g, &dom, &ran, MapProps::BIJECTION)
            };
            let preserves = s.forall(&["u", "v"], |s, q| {
                let (u, v) = (q[0].as_str(), q[1].as_str());
                let forth = s.exists(&["u'", "v'"], |_, p| {
                    let (u1, v1) = (p[0].as_str(), p[1].as_str());
                    Formula::and(vec![g.atom(&[u, u1]), g.atom(&[v, v1]), ey.atom(&[u1, v1])])
                });
                let back = s.exists(&["u'", "v'"], |_, p| {
                    let (u1, v1) = (p[0].as_str(), p[1].as_str());
                    Formula::and(vec![g.atom(&[u1, u]), g.atom(&[v1, v]), ex.atom(&[u1, v1])])
                });
                Formula::and(vec![Formula::implies(ex.atom(&[u, v]), forth), Formula::implies(ey.atom(&[u, v]), back)])
            });
            let one_bit = s.exists(&["v"], |s, q| {
                let v = q[0].as_str();
                let each = s.forall(&["v'"], |s, p| {
                    let v1 = p[0].as_str();
                    let compare = |s: &mut Scope, same: bool| {
                        s.exists(&["g", "p", "q"], |_, o| {
                            let (gv, pb, qb) = (o[0].as_str(), o[1].as_str(), o[2].as_str());
                            let rel = if same { Formula::eq(pb, qb) } else { Formula::neq(pb, qb) };
                            Formula::and(vec![g.atom(&[v1, gv]), bx.atom(&[v1, pb]), by.atom(&[gv, qb]), rel])
                        })
                    };
                    let a37 = compare(s, true);
                    let a38 = compare(s, false);
                    Formula::and(vec![
                        Formula::implies(a37, Formula::neq(v1, v)),
                        Formula::implies(a38, Formula::eq(v1, v)),
                    ])
                });
                Formula::and(vec![vx.atom(&[v]), each])
            });
            Formula::and(vec![a36, preserves, one_bit])
        });
        Formula::and(vec![a31, a32, a33, a34, a35, aligned])
    })
}

/// A graph held by two second-order variables: vertices (arity 1) and
/// edges (arity 2).
#[derive(Clone)]
struct GraphVar {
    v: Rel,
    e: Rel,
}

impl GraphVar {
    fn args(&self) -> Vec<ToArg> {
        vec![ToArg::Relation(self.v.name().to_string()), ToArg::Relation(self.e.name().to_string())]
    }
}

fn graph_quant(
    s: &mut Scope,
    q: Quantifier,
    names: &[(&str, &str)],
    body: impl FnOnce(&mut Scope, &[GraphVar]) -> Formula,
) -> Formula {
    let specs: Vec<(&str, usize)> = names.iter().flat_map(|(v, e)| [(*v, 1), (*e, 2)]).collect();
    s.second_order(q, &specs, |s, r| {
        let graphs: Vec<GraphVar> = r.chunks(2).map(|c| GraphVar { v: c[0].clone(), e: c[1].clone() }).collect();
        body(s, &graphs)
    })
}

fn same_graph(s: &mut Scope, g: &GraphVar, h: &GraphVar) -> Formula {
    Formula::and(vec![
        s.forall(&["a"], |_, v| Formula::iff(g.v.atom(&[v[0].as_str()]), h.v.atom(&[v[0].as_str()]))),
        s.forall(&["a", "b"], |_, v| {
            let (a, b) = (v[0].as_str(), v[1].as_str());
            Formula::iff(g.e.atom(&[a, b]), h.e.atom(&[a, b]))
        }),
    ])
}

/// Third-order sentence: a class `C` of undirected graphs, totally ordered
/// by `O`, starts with a one-edge graph on two vertices, ends with the
/// input graph, and each graph arises from its immediate predecessor by
/// joining two isomorphic copies along corresponding vertices.
///
/// A graph is a pair `(V, E)` of a vertex set and an edge relation, so `C`
/// has shape `(1, 2)` and `O` shape `(1, 2, 1, 2)`. All sub-formulae are
/// implementer-supplied.
pub fn hypercube_to() -> Formula {
    let input = Rel::vocab(EDGE);
    let mut s = Scope::with_names(&[EDGE]);
    let class_shape = ToShape::new(vec![1, 2]).expect("nonempty shape");
    let order_shape = ToShape::new(vec![1, 2, 1, 2]).expect("nonempty shape");
    s.third_order(Quantifier::Exists, "C", class_shape, |s, c| {
        s.third_order(Quantifier::Exists, "O", order_shape, |s, o| {
            let member = |g: &GraphVar| Formula::to(c, g.args());
            let before = |g: &GraphVar, h: &GraphVar| Formula::to(o, [g.args(), h.args()].concat());
            let a1 = graph_quant(s, Quantifier::Forall, &[("V", "E")], |s, g| {
                let g = &g[0];
                let undirected = Formula::and(vec![
                    s.forall(&["x", "y"], |_, v| {
                        let (x, y) = (v[0].as_str(), v[1].as_str());
                        Formula::implies(
                            g.e.atom(&[x, y]),
                            Formula::and(vec![g.v.atom(&[x]), g.v.atom(&[y]), g.e.atom(&[y, x])]),
                        )
                    }),
                    s.forall(&["x"], |_, v| Formula::not(g.e.atom(&[v[0].as_str(), v[0].as_str()]))),
                ]);
                Formula::implies(member(g), undirected)
            });
            let a2 = graph_quant(s, Quantifier::Forall, &[("V", "E"), ("V'", "E'"), ("V''", "E''")], |s, gs| {
                let (g, h, k) = (&gs[0], &gs[1], &gs[2]);
                let same = same_graph(s, g, h);
                Formula::and(vec![
                    Formula::implies(before(g, h), Formula::and(vec![member(g), member(h)])),
                    Formula::implies(member(g), before(g, g)),
                    Formula::implies(Formula::and(vec![before(g, h), before(h, g)]), same),
                    Formula::implies(Formula::and(vec![before(g, h), before(h, k)]), before(g, k)),
                    Formula::implies(
                        Formula::and(vec![member(g), member(h)]),
                        Formula::or(vec![before(g, h), before(h, g)]),
                    ),
                ])
            });
            let steps = graph_quant(s, Quantifier::Forall, &[("V_1", "E_1"), ("V_2", "E_2")], |s, gs| {
                let (g1, g2) = (&gs[0], &gs[1]);
                let a3 = {
                    let distinct = Formula::not(same_graph(s, g1, g2));
                    let between = graph_quant(s, Quantifier::Exists, &[("V_3", "E_3")], |s, g3| {
                        let g3 = &g3[0];
                        Formula::and(vec![
                            member(g3),
                            before(g1, g3),
                            before(g3, g2),
                            Formula::not(same_graph(s, g3, g1)),
                            Formula::not(same_graph(s, g3, g2)),
                        ])
                    });
                    Formula::and(vec![before(g1, g2), distinct, Formula::not(between)])
                };
                let a4 = doubling(s, g1, g2);
                Formula::implies(Formula::and(vec![member(g1), member(g2), a3]), a4)
            });
            let a5 = graph_quant(s, Quantifier::Exists, &[("V", "E")], |s, g| {
                let g = &g[0];
                let least = graph_quant(s, Quantifier::Forall, &[("V'", "E'")], |_, h| {
                    Formula::implies(member(&h[0]), before(g, &h[0]))
                });
                Formula::and(vec![member(g), least, single_edge(s, g)])
            });
            let a6 = graph_quant(s, Quantifier::Exists, &[("V", "E")], |s, g| {
                let g = &g[0];
                let greatest = graph_quant(s, Quantifier::Forall, &[("V'", "E'")], |_, h| {
                    Formula::implies(member(&h[0]), before(&h[0], g))
                });
                let everything = s.forall(&["x"], |_, v| g.v.atom(&[v[0].as_str()]));
                let edges = s.forall(&["x", "y"], |_, v| {
                    let (x, y) = (v[0].as_str(), v[1].as_str());
                    Formula::iff(g.e.atom(&[x, y]), input.atom(&[x, y]))
                });
                Formula::and(vec![member(g), greatest, everything, edges])
            });
            Formula::and(vec![a1, a2, steps, a5, a6])
        })
    })
}

/// `g` is a single undirected edge between two vertices.
fn single_edge(s: &mut Scope, g: &GraphVar) -> Formula {
    s.exists(&["a", "b"], |s, v| {
        let (a, b) = (v[0].as_str(), v[1].as_str());
        let only_vertices = s.forall(&["c"], |_, w| {
            let c = w[0].as_str();
            Formula::implies(g.v.atom(&[c]), Formula::or(vec![Formula::eq(c, a), Formula::eq(c, b)]))
        });
        let only_edge = s.forall(&["c", "d"], |_, w| {
            let (c, d) = (w[0].as_str(), w[1].as_str());
            let ab = Formula::and(vec![Formula::eq(c, a), Formula::eq(d, b)]);
            let ba = Formula::and(vec![Formula::eq(c, b), Formula::eq(d, a)]);
            Formula::implies(g.e.atom(&[c, d]), Formula::or(vec![ab, ba]))
        });
        Formula::and(vec![
            Formula::neq(a, b),
            g.v.atom(&[a]),
            g.v.atom(&[b]),
            only_vertices,
            g.e.atom(&[a, b]),
            g.e.atom(&[b, a]),
            only_edge,
        ])
    })
}

/// `g2` consists of two copies of `g1`, images of injections `F_1` and
/// `F_2`, joined exactly along corresponding vertices.
fn doubling(s: &mut Scope, g1: &GraphVar, g2: &GraphVar) -> Formula {
    s.exists_rel(&[("F_1", 2), ("F_2", 2)], |s, r| {
        let (f1, f2) = (&r[0], &r[1]);
        let dom = |_: &mut Scope, a: &str| g1.v.atom(&[a]);
        let ran = |_: &mut Scope, a: &str| g2.v.atom(&[a]);
        let a41 = Formula::and(vec![
            map_constraints(s, f1, &dom, &ran, MapProps::INJECTION),
            map_constraints(s, f2, &dom, &ran, MapProps::INJECTION),
        ]);
        let a42 = {
            let covered = s.forall(&["b"], |s, v| {
                let b = v[0].as_str();
                let hit = |s: &mut Scope, f: &Rel| s.exists(&["a"], |_, w| f.atom(&[w[0].as_str(), b]));
                let either = Formula::or(vec![hit(s, f1), hit(s, f2)]);
                Formula::implies(g2.v.atom(&[b]), either)
            });
            let disjoint = Formula::not(s.exists(&["a", "a'", "b"], |_, v| {
                let (a, a1, b) = (v[0].as_str(), v[1].as_str(), v[2].as_str());
                Formula::and(vec![f1.atom(&[a, b]), f2.atom(&[a1, b])])
            }));
            Formula::and(vec![covered, disjoint])
        };
        let a43 = {
            let iso = |s: &mut Scope, f: &Rel| {
                s.forall(&["a", "b", "c", "d"], |_, v| {
                    let (a, b, c, d) = (v[0].as_str(), v[1].as_str(), v[2].as_str(), v[3].as_str());
                    Formula::implies(
                        Formula::and(vec![f.atom(&[a, c]), f.atom(&[b, d])]),
                        Formula::iff(g1.e.atom(&[a, b]), g2.e.atom(&[c, d])),
                    )
                })
            };
            Formula::and(vec![iso(s, f1), iso(s, f2)])
        };
        let joined = |s: &mut Scope, x: &str, y: &str| {
            s.exists(&["c", "d"], |_, v| {
                let (c, d) = (v[0].as_str(), v[1].as_str());
                Formula::and(vec![f1.atom(&[x, c]), f2.atom(&[y, d]), g2.e.atom(&[c, d])])
            })
        };
        let a44 = s.forall(&["x"], |s, v| {
            let x = v[0].as_str();
            Formula::implies(g1.v.atom(&[x]), joined(s, x, x))
        });
        let a45 = Formula::not(s.exists(&["x", "y"], |s, v| {
            let (x, y) = (v[0].as_str(), v[1].as_str());
            Formula::and(vec![g1.v.atom(&[x]), g1.v.atom(&[y]), Formula::neq(x, y), joined(s, x, y)])
        }));
        Formula::and(vec![a41, a42, a43, a44, a45])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval_grounded, Budget};
    use crate::logic::{analyze, parse_formula, pretty_print, rebound_variables, Quantifier};
    use crate::structures::{generate, is_hypercube, is_regular, Family, FiniteStructure};

    fn labeled_graphs(n: usize) -> impl Iterator<Item = FiniteStructure> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        (0u32..1 << pairs.len()).map(move |mask| {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
            FiniteStructure::graph(n, &edges).unwrap()
        })
    }

    fn grounded(s: &FiniteStructure, f: &Formula) -> bool {
        eval_grounded(s, f, Budget::default()).unwrap()
    }

    #[test]
    fn regular_examples() {
        let f = regular();
        assert!(grounded(&generate(Family::Cycle(4)).unwrap(), &f));
        assert!(!grounded(&FiniteStructure::graph(3, &[(0, 1), (1, 2)]).unwrap(), &f));
    }

    #[test]
    fn regular_matches_degrees_on_four_vertices() {
        let f = regular();
        for g in labeled_graphs(4) {
            assert_eq!(grounded(&g, &f), is_regular(&g).unwrap(), "{g:?}");
        }
    }

    #[test]
    fn so2_examples() {
        let f = hypercube_so2();
        for m in 1..=3 {
            assert!(grounded(&generate(Family::Hypercube(m)).unwrap(), &f), "Q{m}");
        }
        for family in [Family::Cycle(6), Family::Complete(4)] {
            assert!(!grounded(&generate(family).unwrap(), &f), "{family}");
        }
        let mut q3 = generate(Family::Hypercube(3)).unwrap();
        q3.remove(EDGE, &[0, 1]).unwrap();
        q3.remove(EDGE, &[1, 0]).unwrap();
        assert!(!grounded(&q3, &f));
    }

    #[test]
    fn so2_matches_the_oracle_on_small_graphs() {
        let f = hypercube_so2();
        for n in 1..=4 {
            for g in labeled_graphs(n) {
                assert_eq!(grounded(&g, &f), is_hypercube(&g).unwrap(), "{g:?}");
            }
        }
    }

    #[test]
    fn second_order_prefixes() {
        let so1 = analyze(&hypercube_so1());
        assert!(!so1.so_bindings.is_empty());
        assert!(so1.so_bindings.iter().all(|b| b.quantifier == Quantifier::Exists));
        // The label witness inside the empty-vertex clause nests one more ∃S.
        let so2 = analyze(&hypercube_so2());
        let leading: Vec<(&str, Quantifier)> =
            so2.so_bindings.iter().take(3).map(|b| (b.name.as_str(), b.quantifier)).collect();
        assert_eq!(leading, [("R", Quantifier::Exists), ("V'", Quantifier::Exists), ("S", Quantifier::Forall)]);
    }

    #[test]
    fn so1_grounding_stops_within_budget() {
        let q1 = generate(Family::Hypercube(1)).unwrap();
        match eval_grounded(&q1, &hypercube_so1(), Budget::default()) {
            Ok(v) => assert!(v),
            Err(e) => assert!(e.is_budget_exceeded(), "{e}"),
        }
    }

    #[test]
    fn builders_are_well_formed_sentences() {
        for strategy in [Strategy::So1, Strategy::So2, Strategy::To] {
            let f = hypercube(strategy);
            assert!(analyze(&f).is_sentence(), "{strategy:?}");
            assert!(rebound_variables(&f).is_empty(), "{strategy:?}");
            assert_eq!(parse_formula(&pretty_print(&f)).unwrap(), f, "{strategy:?}");
        }
        assert!(hypercube_to().has_third_order());
        assert!(!hypercube_so2().has_third_order());
        assert!(matches!("so3".parse::<Strategy>(), Err(LibraryError::UnknownName(_))));
    }
}
