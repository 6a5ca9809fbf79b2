use std::str::FromStr;

use crate::logic::Formula;

use super::auxiliary::{linear, numeral, NumberLine};
use super::{anything, map_constraints, Graph, LibraryError, MapProps, Rel, Scope};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arithmetic {
    Sum,
    Times,
    Exp,
}

impl FromStr for Arithmetic {
    type Err = LibraryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sum" => Ok(Arithmetic::Sum),
            "times" => Ok(Arithmetic::Times),
            "exp" => Ok(Arithmetic::Exp),
            _ => Err(LibraryError::UnknownName(s.to_string())),
        }
    }
}

/// `op(x, y, z)` over a linear digraph with successor relation `relation`
/// (default `succ`), free in `x y z`. Positions along the digraph stand
/// for `0, 1, …`; the formula holds iff `z = x + y`, `x · y` or `x^y`.
///
/// The reachability order is introduced once as an existential
/// second-order variable, see [`successor_order`].
pub fn arithmetic(op: Arithmetic, relation: Option<&str>) -> Formula {
    let succ = Rel::vocab(relation.unwrap_or(crate::structures::SUCC));
    let mut s = Scope::with_names(&["x", "y", "z", succ.name()]);
    successor_order(&mut s, &succ, |s, line| match op {
        Arithmetic::Sum => sum(s, line, "x", "y", "z"),
        Arithmetic::Times => times(s, line, "x", "y", "z"),
        Arithmetic::Exp => exp(s, line, "x", "y", "z"),
    })
}

/// `∃L(ORDER ∧ body)` where ORDER states that `L` is a reflexive total
/// order containing `succ`. On a linear digraph the only such order is
/// reachability along `succ`. Implementer-supplied.
pub fn successor_order(s: &mut Scope, succ: &Rel, body: impl FnOnce(&mut Scope, &NumberLine) -> Formula) -> Formula {
    s.exists_rel(&[("L", 2)], |s, r| {
        let l = &r[0];
        let order = s.forall(&["a", "b", "c"], |_, v| {
            let (a, b, c) = (v[0].as_str(), v[1].as_str(), v[2].as_str());
            Formula::and(vec![
                l.atom(&[a, a]),
                Formula::implies(Formula::and(vec![l.atom(&[a, b]), l.atom(&[b, a])]), Formula::eq(a, b)),
                Formula::implies(Formula::and(vec![l.atom(&[a, b]), l.atom(&[b, c])]), l.atom(&[a, c])),
                Formula::or(vec![l.atom(&[a, b]), l.atom(&[b, a])]),
                Formula::implies(succ.atom(&[a, b]), l.atom(&[a, b])),
            ])
        });
        let line = NumberLine::new(l.clone(), Some(succ.clone()));
        Formula::and(vec![order, body(s, &line)])
    })
}

fn is(s: &mut Scope, line: &NumberLine, x: &str, n: usize) -> Formula {
    numeral(s, line, x, n)
}

fn is_not(s: &mut Scope, line: &NumberLine, x: &str, n: usize) -> Formula {
    Formula::not(numeral(s, line, x, n))
}

/// `x ≥ 2`.
fn at_least_two(s: &mut Scope, line: &NumberLine, x: &str) -> Formula {
    Formula::and(vec![is_not(s, line, x, 0), is_not(s, line, x, 1)])
}

/// `1 ≤ a ≤ bound`.
fn one_to(s: &mut Scope, line: &NumberLine, a: &str, bound: &str) -> Formula {
    Formula::and(vec![is_not(s, line, a, 0), line.leq(a, bound)])
}

/// `z = x + y`: for nonzero summands an injection `F` on
/// `{succ(x), …, z}` counts `1, 2, …` along successors and sends `z` to
/// `y`. The domain and injectivity constraints on `F` are
/// implementer-supplied.
pub fn sum(s: &mut Scope, line: &NumberLine, x: &str, y: &str, z: &str) -> Formula {
    let x_zero = Formula::and(vec![is(s, line, x, 0), Formula::eq(z, y)]);
    let y_zero = Formula::and(vec![is(s, line, y, 0), Formula::eq(z, x)]);
    let guard = Formula::and(vec![is_not(s, line, x, 0), is_not(s, line, y, 0)]);
    let counted = s.exists_rel(&[("F", 2)], |s, r| {
        let f = &r[0];
        let dom = |s: &mut Scope, a: &str| {
            let after_x = s.exists(&["s"], |s, v| Formula::and(vec![line.succ(s, x, &v[0]), line.leq(&v[0], a)]));
            Formula::and(vec![after_x, line.leq(a, z)])
        };
        let a1 = map_constraints(s, f, &dom, &anything, MapProps::INJECTION);
        let start = s.exists(&["x'", "y'"], |s, v| {
            let (x1, y1) = (v[0].as_str(), v[1].as_str());
            Formula::and(vec![line.succ(s, x, x1), f.atom(&[x1, y1]), is(s, line, y1, 1)])
        });
        let steps = s.forall(&["x'", "y'", "x''", "y''"], |s, v| {
            let (x1, y1, x2, y2) = (v[0].as_str(), v[1].as_str(), v[2].as_str(), v[3].as_str());
            let premise = Formula::and(vec![line.succ(s, x1, y1), f.atom(&[x1, x2]), f.atom(&[y1, y2])]);
            Formula::implies(premise, line.succ(s, x2, y2))
        });
        Formula::and(vec![a1, f.atom(&[z, y]), start, steps])
    });
    Formula::or(vec![x_zero, y_zero, Formula::and(vec![guard, counted])])
}

/// `z = x · y`: for `x, y ≥ 2` every `u ∈ {2, …, x}` owns a contiguous
/// block of `y` children under `S`, the blocks follow each other from
/// `succ(y)` on and the last child of `x` is `z`. The bijection and the
/// first/last-child conditions are implementer-supplied.
pub fn times(s: &mut Scope, line: &NumberLine, x: &str, y: &str, z: &str) -> Formula {
    let x_one = Formula::and(vec![is(s, line, x, 1), is_not(s, line, y, 0), Formula::eq(z, y)]);
    let y_one = Formula::and(vec![is(s, line, y, 1), is_not(s, line, x, 0), Formula::eq(z, x)]);
    let zero = Formula::and(vec![Formula::or(vec![is(s, line, x, 0), is(s, line, y, 0)]), is(s, line, z, 0)]);
    let guard = Formula::and(vec![at_least_two(s, line, x), at_least_two(s, line, y)]);
    let forest = s.exists_rel(&[("S", 2)], |s, r| {
        let sr = &r[0];
        let first = |s: &mut Scope, u: &str, c: &str| {
            let least = s.forall(&["c'"], |_, v| Formula::implies(sr.atom(&[u, v[0].as_str()]), line.leq(c, &v[0])));
            Formula::and(vec![sr.atom(&[u, c]), least])
        };
        let last = |s: &mut Scope, u: &str, c: &str| {
            let greatest = s.forall(&["c'"], |_, v| Formula::implies(sr.atom(&[u, v[0].as_str()]), line.leq(&v[0], c)));
            Formula::and(vec![sr.atom(&[u, c]), greatest])
        };
        let roots = s.forall(&["u"], |s, v| {
            let u = v[0].as_str();
            let in_range = Formula::and(vec![at_least_two(s, line, u), line.leq(u, x)]);
            let some_child = s.exists(&["y'"], |_, w| sr.atom(&[u, w[0].as_str()]));
            let contiguous = s.forall(&["x'", "y'"], |s, w| {
                let (a, b) = (w[0].as_str(), w[1].as_str());
                let premise =
                    Formula::and(vec![line.leq(a, b), Formula::neq(a, b), sr.atom(&[u, a]), sr.atom(&[u, b])]);
                let gap = s.exists(&["z'"], |_, g| {
                    let c = g[0].as_str();
                    Formula::and(vec![line.leq(a, c), line.leq(c, b), Formula::not(sr.atom(&[u, c]))])
                });
                Formula::implies(premise, Formula::not(gap))
            });
            let degree = s.exists_rel(&[("F", 2)], |s, r| {
                let children = |_: &mut Scope, n: &str| sr.atom(&[u, n]);
                let counted = |s: &mut Scope, n: &str| one_to(s, line, n, y);
                map_constraints(s, &r[0], &children, &counted, MapProps::BIJECTION)
            });
            let a2 = Formula::implies(
                is(s, line, u, 2),
                s.exists(&["c"], |s, w| {
                    let c = w[0].as_str();
                    Formula::and(vec![first(s, u, c), line.succ(s, y, c)])
                }),
            );
            let a3 = Formula::implies(Formula::eq(u, x), last(s, u, z));
            let a4 = Formula::implies(
                is_not(s, line, u, 2),
                s.exists(&["p", "c", "c'"], |s, w| {
                    let (p, c, c1) = (w[0].as_str(), w[1].as_str(), w[2].as_str());
                    Formula::and(vec![line.succ(s, p, u), last(s, p, c), first(s, u, c1), line.succ(s, c, c1)])
                }),
            );
            Formula::implies(in_range, Formula::and(vec![some_child, contiguous, degree, a2, a3, a4]))
        });
        let a5 = s.forall(&["v", "a", "b"], |_, w| {
            let (v, a, b) = (w[0].as_str(), w[1].as_str(), w[2].as_str());
            Formula::implies(Formula::and(vec![sr.atom(&[a, v]), sr.atom(&[b, v])]), Formula::eq(a, b))
        });
        let owners = s.forall(&["u", "v"], |s, w| {
            let (u, v) = (w[0].as_str(), w[1].as_str());
            Formula::implies(sr.atom(&[u, v]), Formula::and(vec![at_least_two(s, line, u), line.leq(u, x)]))
        });
        Formula::and(vec![roots, a5, owners])
    });
    Formula::or(vec![x_one, y_one, zero, Formula::and(vec![guard, forest])])
}

/// `z = x^y`: for `x, y ≥ 2` a linear digraph `(V', E')` from `x` to `z`
/// with `y` nodes, each node `x` times its predecessor. The linearity and
/// bijection conditions are implementer-supplied. Beyond the base cases
/// `y = 1` and `x = 1`, the formula takes `0^0 = 1` and `0^y = 0` for
/// `y ≥ 1`.
pub fn exp(s: &mut Scope, line: &NumberLine, x: &str, y: &str, z: &str) -> Formula {
    let y_zero = Formula::and(vec![is(s, line, y, 0), is(s, line, z, 1)]);
    let x_zero = Formula::and(vec![is(s, line, x, 0), is_not(s, line, y, 0), is(s, line, z, 0)]);
    let y_one = Formula::and(vec![is(s, line, y, 1), Formula::eq(z, x)]);
    let x_one = Formula::and(vec![is(s, line, x, 1), is(s, line, z, 1)]);
    let guard = Formula::and(vec![at_least_two(s, line, x), at_least_two(s, line, y)]);
    let chain = s.exists_rel(&[("V'", 1), ("E'", 2)], |s, r| {
        let (v, e) = (&r[0], &r[1]);
        let a1 = Formula::and(vec![
            linear(s, &Graph::new(v.clone(), e.clone(), 1)),
            v.atom(&[x]),
            v.atom(&[z]),
            Formula::not(s.exists(&["a"], |_, w| e.atom(&[w[0].as_str(), x]))),
            Formula::not(s.exists(&["a"], |_, w| e.atom(&[z, w[0].as_str()]))),
        ]);
        let a2 = s.exists_rel(&[("F", 2)], |s, f| {
            let nodes = |_: &mut Scope, n: &str| v.atom(&[n]);
            let counted = |s: &mut Scope, n: &str| one_to(s, line, n, y);
            map_constraints(s, &f[0], &nodes, &counted, MapProps::BIJECTION)
        });
        let powers = s.forall(&["u"], |s, w| {
            let u = w[0].as_str();
            let step = s.exists(&["x'"], |s, p| {
                let prev = p[0].as_str();
                Formula::and(vec![e.atom(&[prev, u]), times(s, line, x, prev, u)])
            });
            Formula::or(vec![Formula::not(v.atom(&[u])), Formula::eq(u, x), step])
        });
        Formula::and(vec![a1, a2, powers])
    });
    Formula::or(vec![y_zero, x_zero, y_one, x_one, Formula::and(vec![guard, chain])])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval_grounded_with, Budget, Environment};
    use crate::logic::{analyze, rebound_variables};
    use crate::structures::{generate, Family};

    fn check(op: Arithmetic, n: usize, oracle: impl Fn(u64, u64) -> Option<u64>) {
        let f = arithmetic(op, None);
        let s = generate(Family::LinearDigraph(n)).unwrap();
        for x in 0..n {
            for y in 0..n {
                let expected = oracle(x as u64, y as u64);
                for z in 0..n {
                    let env = Environment::with_elements([("x", x), ("y", y), ("z", z)]);
                    let got = eval_grounded_with(&s, &f, &env, Budget::default()).unwrap();
                    assert_eq!(got, expected == Some(z as u64), "{op:?}({x},{y},{z}) on {n}");
                }
            }
        }
    }

    #[test]
    fn sum_matches_integers() {
        for n in 1..=5 {
            check(Arithmetic::Sum, n, |x, y| x.checked_add(y));
        }
    }

    #[test]
    fn times_matches_integers() {
        for n in 1..=5 {
            check(Arithmetic::Times, n, |x, y| x.checked_mul(y));
        }
    }

    #[test]
    fn exp_matches_integers() {
        for n in 1..=5 {
            check(Arithmetic::Exp, n, |x, y| x.checked_pow(y as u32));
        }
    }

    #[test]
    fn examples_on_eight_positions() {
        let s = generate(Family::LinearDigraph(8)).unwrap();
        let cases = [
            (Arithmetic::Sum, (2, 3, 5), true),
            (Arithmetic::Sum, (2, 3, 4), false),
            (Arithmetic::Times, (2, 2, 4), true),
            (Arithmetic::Exp, (2, 2, 4), true),
        ]
        .into_iter()
        .chain((0..8).map(|z| (Arithmetic::Exp, (2, 3, z), false)));
        for (op, (x, y, z), expected) in cases {
            let env = Environment::with_elements([("x", x), ("y", y), ("z", z)]);
            // exp on eight positions grounds past the default node cap.
            let budget = Budget { max_ground_nodes: 1 << 26, ..Budget::default() };
            let got = eval_grounded_with(&s, &arithmetic(op, None), &env, budget).unwrap();
            assert_eq!(got, expected, "{op:?}({x},{y},{z})");
        }
    }

    #[test]
    fn free_in_xyz() {
        for op in ["sum", "times", "exp"] {
            let f = arithmetic(op.parse().unwrap(), None);
            let stats = analyze(&f);
            let mut free: Vec<&str> = stats.free_fo_vars.iter().map(String::as_str).collect();
            free.sort_unstable();
            assert_eq!(free, ["x", "y", "z"]);
            assert!(stats.free_so_vars.is_empty());
            assert!(rebound_variables(&f).is_empty(), "{op}");
        }
    }
}
