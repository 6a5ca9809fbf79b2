//! A second-order sentence whose word models are exactly the true prenex
//! QBFs with at most `k` alternating quantifier blocks, the first one
//! existential.
//!
//! The sentence guesses one valuation graph `(V_i, E_i, B_i)` per block,
//! quantified like the block itself, plus a leaf valuation `(Vt, Et, Bt)`
//! assembled from them through maps `U_i`. Whenever the guessed graphs
//! mirror the blocks of the input word, the leaf valuation must make the
//! matrix true, which is checked by rewriting the matrix with the chosen
//! bits substituted into a sequence of ever shorter Boolean words.

use crate::logic::{Formula, Quantifier};
use crate::structures::{Symbol, LEQ};

use super::auxiliary::{is_one, is_zero, linear, path, pred_leq, refs, suc_leq};
use super::{eq_nodes, Graph, LibraryError, Rel, Scope};

/// Builds the sentence for `k ≥ 1` quantifier blocks.
pub fn satqbf_k(k: usize) -> Result<Formula, LibraryError> {
    if k == 0 {
        return Err(LibraryError::InvalidParameter("k must be at least 1".into()));
    }
    let word = Word::new();
    Ok(valuations(&mut Scope::new(), &word, k, Vec::new()))
}

/// Positions of a word model under `leq`.
struct Word {
    leq: Rel,
    order: Graph,
}

impl Word {
    fn new() -> Word {
        let leq = Rel::vocab(LEQ);
        Word { order: Graph::on_domain(leq.clone()), leq }
    }

    fn at(&self, symbol: Symbol, x: &str) -> Formula {
        Formula::rel(symbol.relation(), &[x])
    }

    fn path(&self, s: &mut Scope, a: &str, b: &str) -> Formula {
        path(s, &self.order, &[a], &[b])
    }

    /// `b` immediately follows `a`.
    fn next(&self, s: &mut Scope, a: &str, b: &str) -> Formula {
        suc_leq(s, &self.leq, a, b)
    }

    /// `b` immediately precedes `a`.
    fn prev(&self, s: &mut Scope, a: &str, b: &str) -> Formula {
        pred_leq(s, &self.leq, a, b)
    }

    /// `x` lies strictly between `a` and `b`.
    fn inside(&self, s: &mut Scope, a: &str, x: &str, b: &str) -> Formula {
        Formula::and(vec![self.path(s, a, x), self.path(s, x, b), Formula::neq(x, a), Formula::neq(x, b)])
    }

    fn first(&self, s: &mut Scope, x: &str) -> Formula {
        is_zero(s, &self.leq, x)
    }

    fn zero(&self, s: &mut Scope, x: &str) -> Formula {
        is_zero(s, &self.leq, x)
    }

    fn one(&self, s: &mut Scope, x: &str) -> Formula {
        is_one(s, &self.leq, x)
    }

    /// Some `(` precedes `x`; the prefix contains no parenthesis.
    fn in_matrix(&self, s: &mut Scope, x: &str) -> Formula {
        s.exists(&["x'"], |s, v| Formula::and(vec![self.at(Symbol::Open, &v[0]), self.path(s, &v[0], x)]))
    }
}

/// Quantifier letter opening block `i`, counted from 1.
fn block_letter(i: usize) -> Symbol {
    if i % 2 == 1 {
        Symbol::Exists
    } else {
        Symbol::Forall
    }
}

/// A partial Boolean assignment stored as a linear graph with bits.
#[derive(Debug, Clone)]
struct Valuation {
    vertices: Rel,
    edges: Rel,
    bits: Rel,
}

impl Valuation {
    fn graph(&self) -> Graph {
        Graph::new(self.vertices.clone(), self.edges.clone(), 1)
    }

    /// `u` is the source of the graph.
    fn source(&self, s: &mut Scope, u: &str) -> Formula {
        let entered = s.exists(&["v"], |_, v| self.edges.atom(&[v[0].as_str(), u]));
        Formula::and(vec![self.vertices.atom(&[u]), Formula::not(entered)])
    }

    /// `x` is the sink of the graph.
    fn sink(&self, s: &mut Scope, x: &str) -> Formula {
        Formula::not(s.exists(&["v"], |_, v| self.edges.atom(&[x, v[0].as_str()])))
    }
}

fn valuations(s: &mut Scope, word: &Word, k: usize, mut blocks: Vec<Valuation>) -> Formula {
    let i = blocks.len() + 1;
    if i > k {
        let mut names = vec![("Vt".to_string(), 1), ("Et".to_string(), 2), ("Bt".to_string(), 2)];
        names.extend((1..=k).map(|i| (format!("U{i}"), 2)));
        let specs: Vec<(&str, usize)> = names.iter().map(|(n, a)| (n.as_str(), *a)).collect();
        return s.exists_rel(&specs, |s, r| {
            let leaf = Valuation { vertices: r[0].clone(), edges: r[1].clone(), bits: r[2].clone() };
            alternation(s, word, &blocks, &leaf, &r[3..])
        });
    }
    let q = if i % 2 == 1 { Quantifier::Exists } else { Quantifier::Forall };
    let names = [format!("V{i}"), format!("E{i}"), format!("B{i}")];
    s.second_order(q, &[(&names[0], 1), (&names[1], 2), (&names[2], 2)], |s, r| {
        blocks.push(Valuation { vertices: r[0].clone(), edges: r[1].clone(), bits: r[2].clone() });
        valuations(s, word, k, blocks)
    })
}

/// The matrix below the valuation prefix: shape constraints on the
/// existential blocks, and the implication from well-shaped universal
/// blocks to a satisfied matrix.
fn alternation(s: &mut Scope, word: &Word, blocks: &[Valuation], leaf: &Valuation, maps: &[Rel]) -> Formula {
    let k = blocks.len();
    let odd: Vec<&Valuation> = blocks.iter().step_by(2).collect();
    let even: Vec<&Valuation> = blocks.iter().skip(1).step_by(2).collect();

    let mut guessed =
        vec![linear(s, &leaf.graph()), s.exists_rel(&[("W", 2)], |s, r| prefix_map(s, word, &r[0], leaf))];
    for g in &odd {
        guessed.push(linear(s, &g.graph()));
    }
    guessed.push(bit_functions(s, word, &odd));
    guessed.extend(block_lengths(s, word, blocks, 1));

    let mut shaped = vec![disjoint(s, blocks)];
    for g in &even {
        shaped.push(linear(s, &g.graph()));
    }
    if !even.is_empty() {
        shaped.push(bit_functions(s, word, &even));
    }
    shaped.extend(block_lengths(s, word, blocks, 2));
    for i in 1..=k {
        shaped.push(embedding(s, blocks, leaf, maps, i));
    }
    for i in 1..=k {
        shaped.push(agreement(s, &blocks[i - 1], leaf, &maps[i - 1]));
    }
    shaped.push(bit_functions(s, word, &[leaf]));

    guessed.push(Formula::implies(Formula::and(shaped), satisfied(s, word, leaf)));
    Formula::and(guessed)
}

/// `vp` maps every variable `X` of the prefix injectively onto `Vt`, in
/// prefix order along `Et`.
fn prefix_map(s: &mut Scope, word: &Word, vp: &Rel, leaf: &Valuation) -> Formula {
    let pointwise = s.forall(&["x", "y", "z"], |s, v| {
        let (x, y, z) = (v[0].as_str(), v[1].as_str(), v[2].as_str());
        let function = Formula::implies(Formula::and(vec![vp.atom(&[x, y]), vp.atom(&[x, z])]), Formula::eq(y, z));
        let injective = Formula::implies(Formula::and(vec![vp.atom(&[x, y]), vp.atom(&[z, y])]), Formula::eq(x, z));
        let quantified = s.exists(&["z"], |s, w| {
            let q = w[0].as_str();
            let letter = Formula::or(vec![word.at(Symbol::Exists, q), word.at(Symbol::Forall, q)]);
            Formula::and(vec![word.prev(s, x, q), letter])
        });
        let mapped =
            s.exists(&["y"], |_, w| Formula::and(vec![leaf.vertices.atom(&[&w[0]]), vp.atom(&[x, w[0].as_str()])]));
        let domain = Formula::iff(Formula::and(vec![word.at(Symbol::X, x), quantified]), mapped);
        Formula::and(vec![function, injective, domain])
    });
    let order = s.forall(&["s", "t", "s'", "t'"], |s, v| {
        let (a, b, a2, b2) = (v[0].as_str(), v[1].as_str(), v[2].as_str(), v[3].as_str());
        let gap = s.forall(&["z'"], |s, w| {
            let z = w[0].as_str();
            let between =
                Formula::and(vec![Formula::neq(z, a), Formula::neq(z, b), word.path(s, a, z), word.path(s, z, b)]);
            Formula::implies(between, Formula::not(word.at(Symbol::X, z)))
        });
        Formula::implies(
            Formula::and(vec![vp.atom(&[a, a2]), vp.atom(&[b, b2]), leaf.edges.atom(&[a2, b2])]),
            Formula::and(vec![word.path(s, a, b), gap]),
        )
    });
    let onto = s.forall(&["y"], |s, v| {
        let y = v[0].as_str();
        let hit = s.exists(&["x"], |_, w| vp.atom(&[w[0].as_str(), y]));
        Formula::implies(leaf.vertices.atom(&[y]), hit)
    });
    Formula::and(vec![pointwise, order, onto])
}

/// Each `B` is a total function from its vertex set to `{0, 1}`.
fn bit_functions(s: &mut Scope, word: &Word, graphs: &[&Valuation]) -> Formula {
    s.forall(&["t", "p", "p'"], |s, v| {
        let (t, p, p2) = (v[0].as_str(), v[1].as_str(), v[2].as_str());
        let parts = graphs
            .iter()
            .map(|g| {
                let b = &g.bits;
                let function =
                    Formula::implies(Formula::and(vec![b.atom(&[t, p]), b.atom(&[t, p2])]), Formula::eq(p, p2));
                let image = s.exists(&["p"], |_, w| b.atom(&[t, w[0].as_str()]));
                let total = Formula::implies(g.vertices.atom(&[t]), image);
                let bit = Formula::or(vec![word.one(s, p), word.zero(s, p)]);
                Formula::and(vec![function, total, Formula::implies(b.atom(&[t, p]), bit)])
            })
            .collect();
        Formula::and(parts)
    })
}

fn disjoint(s: &mut Scope, blocks: &[Valuation]) -> Formula {
    let mut parts = Vec::new();
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            parts.push(s.forall(&["x"], |_, v| {
                let x = v[0].as_str();
                Formula::and(vec![
                    Formula::implies(a.vertices.atom(&[x]), Formula::not(b.vertices.atom(&[x]))),
                    Formula::implies(b.vertices.atom(&[x]), Formula::not(a.vertices.atom(&[x]))),
                ])
            }));
        }
    }
    Formula::and(parts)
}

/// The graphs of blocks `start, start + 2, …` are as long as their blocks.
/// When the last such block is the final block of the word, its end is
/// located by the last `|` of the prefix instead of the next quantifier.
fn block_lengths(s: &mut Scope, word: &Word, blocks: &[Valuation], start: usize) -> Option<Formula> {
    let k = blocks.len();
    if k < start {
        return None;
    }
    let last = if (k - start).is_multiple_of(2) { k } else { k - 1 };
    let mut parts = Vec::new();
    if last != k {
        for i in (start..=last).step_by(2) {
            parts.push(with_block_starts(s, last + 1, false, |s, l, v| {
                Formula::and(vec![
                    block_starts(s, word, v, false),
                    block_map(s, word, l, &v[i - 1], &v[i], &blocks[i - 1], true),
                ])
            }));
        }
    } else {
        for i in (start..=last.saturating_sub(2)).step_by(2) {
            parts.push(with_block_starts(s, last - 1, false, |s, l, v| {
                Formula::and(vec![
                    block_starts(s, word, v, false),
                    block_map(s, word, l, &v[i - 1], &v[i], &blocks[i - 1], true),
                ])
            }));
        }
        parts.push(with_block_starts(s, k + 1, true, |s, l, v| {
            Formula::and(vec![
                block_starts(s, word, v, true),
                block_map(s, word, l, &v[k - 1], &v[k], &blocks[k - 1], false),
                last_bar(s, word, &v[k], k),
            ])
        }));
    }
    Some(Formula::and(parts))
}

/// `∃L' v1 … vn body`, the last position named `ve` when it is a bar.
fn with_block_starts(
    s: &mut Scope,
    count: usize,
    ends_at_bar: bool,
    body: impl FnOnce(&mut Scope, &Rel, &[String]) -> Formula,
) -> Formula {
    let mut bases: Vec<String> = (1..=count).map(|j| format!("v{j}")).collect();
    if ends_at_bar {
        bases[count - 1] = "ve".to_string();
    }
    let bases: Vec<&str> = bases.iter().map(String::as_str).collect();
    s.exists_rel(&[("L'", 2)], |s, r| s.exists(&bases, |s, v| body(s, &r[0], v)))
}

/// `v[j]` is the first quantifier of block `j + 1`, starting at the first
/// position; with `ends_at_bar` the last entry is a `|` instead.
fn block_starts(s: &mut Scope, word: &Word, v: &[String], ends_at_bar: bool) -> Formula {
    let n = v.len();
    let mut parts: Vec<Formula> = v.iter().enumerate().map(|(j, x)| word.at(block_letter(j + 1), x)).collect();
    if ends_at_bar {
        parts[n - 1] = word.at(Symbol::Bar, &v[n - 1]);
    }
    parts.push(word.first(s, &v[0]));
    for j in 0..n - 1 {
        parts.push(word.path(s, &v[j], &v[j + 1]));
    }
    for j in 0..n - 1 {
        let letter = block_letter(j + 2);
        let (a, b) = (v[j].as_str(), v[j + 1].as_str());
        parts.push(Formula::not(
            s.exists(&["x"], |s, w| Formula::and(vec![word.inside(s, a, &w[0], b), word.at(letter, &w[0])])),
        ));
    }
    Formula::and(parts)
}

/// `l` is a bijection from the `X` positions between `lo` and `hi` onto the
/// block graph, sending consecutive `X`s along its edges.
fn block_map(s: &mut Scope, word: &Word, l: &Rel, lo: &str, hi: &str, g: &Valuation, exclusive: bool) -> Formula {
    let domain = s.forall(&["x"], |s, v| {
        let x = v[0].as_str();
        let mut span = vec![word.path(s, lo, x), word.path(s, x, hi)];
        if exclusive {
            span.push(Formula::neq(x, hi));
        }
        span.push(word.at(Symbol::X, x));
        let image = s.exists(&["y"], |_, w| l.atom(&[x, w[0].as_str()]));
        Formula::iff(Formula::and(span), image)
    });
    let onto = s.forall(&["y"], |s, v| {
        let y = v[0].as_str();
        let hit = s.exists(&["z"], |_, w| l.atom(&[w[0].as_str(), y]));
        Formula::implies(g.vertices.atom(&[y]), hit)
    });
    let order = s.forall(&["s", "t", "s'", "t'"], |s, v| {
        let (a, b, a2, b2) = (v[0].as_str(), v[1].as_str(), v[2].as_str(), v[3].as_str());
        let skipped =
            s.exists(&["z"], |s, w| Formula::and(vec![word.inside(s, a, &w[0], a2), word.at(Symbol::X, &w[0])]));
        let consecutive = Formula::and(vec![
            l.atom(&[a, b]),
            l.atom(&[a2, b2]),
            Formula::neq(a, a2),
            word.path(s, lo, a),
            word.path(s, a2, hi),
            word.path(s, a, a2),
            Formula::not(skipped),
        ]);
        Formula::implies(consecutive, g.edges.atom(&[b, b2]))
    });
    let range = s.forall(&["x", "y"], |_, v| Formula::implies(l.atom(&[&v[0], &v[1]]), g.vertices.atom(&[&v[1]])));
    let function = s.forall(&["x", "y", "z"], |_, v| {
        let (x, y, z) = (v[0].as_str(), v[1].as_str(), v[2].as_str());
        Formula::implies(Formula::and(vec![l.atom(&[x, y]), l.atom(&[x, z])]), Formula::eq(y, z))
    });
    Formula::and(vec![domain, onto, order, range, function])
}

/// `ve` is the last `|` of the prefix, closing a variable of block `k`.
fn last_bar(s: &mut Scope, word: &Word, ve: &str, k: usize) -> Formula {
    let followed =
        s.forall(&["v'"], |s, v| Formula::implies(word.next(s, ve, &v[0]), Formula::not(word.at(Symbol::Bar, &v[0]))));
    let no_quantifier_after = s.forall(&["v'"], |s, v| {
        let x = v[0].as_str();
        Formula::implies(
            word.path(s, ve, x),
            Formula::and(vec![Formula::not(word.at(Symbol::Exists, x)), Formula::not(word.at(Symbol::Forall, x))]),
        )
    });
    let bar_run = s.exists(&["x", "y", "w"], |s, v| {
        let (x, y, w) = (v[0].as_str(), v[1].as_str(), v[2].as_str());
        s.forall(&["v'"], |s, u| {
            let b = u[0].as_str();
            let run = Formula::and(vec![word.path(s, b, ve), word.path(s, y, b)]);
            Formula::and(vec![
                word.at(Symbol::X, x),
                word.at(block_letter(k), w),
                word.next(s, x, y),
                word.next(s, w, x),
                word.path(s, y, ve),
                Formula::implies(run, word.at(Symbol::Bar, b)),
            ])
        })
    });
    Formula::and(vec![followed, word.at(Symbol::Bar, ve), no_quantifier_after, bar_run])
}

/// `U_i` embeds block graph `i` into the leaf graph, placing its source
/// right after the image of the sink of block `i - 1`, or at the source of
/// the leaf graph for the first block.
fn embedding(s: &mut Scope, blocks: &[Valuation], leaf: &Valuation, maps: &[Rel], i: usize) -> Formula {
    let (g, u_map) = (&blocks[i - 1], &maps[i - 1]);
    s.forall(&["x", "y", "t", "u"], |s, v| {
        let (x, y, t, u) = (v[0].as_str(), v[1].as_str(), v[2].as_str(), v[3].as_str());
        let image = s.exists(&["y"], |_, w| u_map.atom(&[x, w[0].as_str()]));
        let injection = Formula::and(vec![
            Formula::implies(Formula::and(vec![u_map.atom(&[x, y]), u_map.atom(&[x, t])]), Formula::eq(y, t)),
            Formula::implies(Formula::and(vec![u_map.atom(&[x, y]), u_map.atom(&[u, y])]), Formula::eq(x, u)),
            Formula::implies(g.vertices.atom(&[x]), image),
            Formula::implies(u_map.atom(&[x, y]), Formula::and(vec![g.vertices.atom(&[x]), leaf.vertices.atom(&[y])])),
        ]);
        let reflects = Formula::implies(
            Formula::and(vec![u_map.atom(&[x, y]), u_map.atom(&[u, t]), leaf.edges.atom(&[y, t])]),
            g.edges.atom(&[x, u]),
        );
        let preserves = Formula::implies(
            Formula::and(vec![u_map.atom(&[x, y]), u_map.atom(&[u, t]), g.edges.atom(&[x, u])]),
            leaf.edges.atom(&[y, t]),
        );
        let anchor = if i == 1 {
            Formula::and(vec![g.source(s, u), leaf.source(s, t)])
        } else {
            let prev = &blocks[i - 2];
            Formula::and(vec![maps[i - 2].atom(&[x, y]), prev.sink(s, x), leaf.edges.atom(&[y, t]), g.source(s, u)])
        };
        Formula::and(vec![injection, reflects, preserves, Formula::implies(anchor, u_map.atom(&[u, t]))])
    })
}

/// The leaf bits agree with the block bits along `u_map`.
fn agreement(s: &mut Scope, g: &Valuation, leaf: &Valuation, u_map: &Rel) -> Formula {
    s.forall(&["y", "t", "p", "p'"], |_, v| {
        let (y, t, p, p2) = (v[0].as_str(), v[1].as_str(), v[2].as_str(), v[3].as_str());
        Formula::implies(
            Formula::and(vec![g.bits.atom(&[t, p]), u_map.atom(&[t, y]), leaf.bits.atom(&[y, p2])]),
            Formula::eq(p, p2),
        )
    })
}

/// Cell labels of the rewriting tape.
struct Cells {
    and: Rel,
    or: Rel,
    not: Rel,
    open: Rel,
    close: Rel,
    one: Rel,
    zero: Rel,
}

impl Cells {
    fn all(&self) -> [&Rel; 7] {
        [&self.and, &self.or, &self.not, &self.open, &self.close, &self.one, &self.zero]
    }

    fn same(&self, a: &[String], b: &[String]) -> Formula {
        Formula::or(self.all().iter().map(|c| Formula::and(vec![c.atom(a), c.atom(b)])).collect())
    }

    fn bit(&self, value: bool) -> &Rel {
        if value {
            &self.one
        } else {
            &self.zero
        }
    }
}

/// Relations describing the substituted matrix and its rewriting.
struct Tape {
    vp: Rel,
    cells: Graph,
    stages: Graph,
    marker: Rel,
    labels: Cells,
    occurrence: Rel,
}

impl Tape {
    fn reach(&self, s: &mut Scope, a: &[String], b: &[String]) -> Formula {
        path(s, &self.cells, &refs(a), &refs(b))
    }

    fn step(&self, a: &[String], b: &[String]) -> Formula {
        self.cells.edge(a, b)
    }

    fn stage_edge(&self, a: &str, b: &str) -> Formula {
        self.stages.edge(&[a], &[b])
    }

    fn mark(&self, stage: &str, cell: &[String]) -> Formula {
        let args: Vec<&str> = std::iter::once(stage).chain(cell.iter().map(String::as_str)).collect();
        self.marker.atom(&args)
    }

    fn holds(&self, position: &str, cell: &[String]) -> Formula {
        let args: Vec<&str> = std::iter::once(position).chain(cell.iter().map(String::as_str)).collect();
        self.occurrence.atom(&args)
    }

    /// `x` has no successor stage.
    fn last_stage(&self, s: &mut Scope, x: &str) -> Formula {
        Formula::not(s.exists(&["y"], |_, v| self.stage_edge(x, &v[0])))
    }
}

/// The leaf valuation satisfies the matrix of the word.
fn satisfied(s: &mut Scope, word: &Word, leaf: &Valuation) -> Formula {
    let specs = [
        ("V_p", 2),
        ("C", 2),
        ("E_C", 4),
        ("ST", 1),
        ("E_ST", 2),
        ("M", 3),
        ("C_and", 2),
        ("C_or", 2),
        ("C_not", 2),
        ("C_open", 2),
        ("C_close", 2),
        ("C_1", 2),
        ("C_0", 2),
        ("H", 3),
    ];
    s.exists_rel(&specs, |s, r| {
        let tape = Tape {
            vp: r[0].clone(),
            cells: Graph::new(r[1].clone(), r[2].clone(), 2),
            stages: Graph::new(r[3].clone(), r[4].clone(), 1),
            marker: r[5].clone(),
            labels: Cells {
                and: r[6].clone(),
                or: r[7].clone(),
                not: r[8].clone(),
                open: r[9].clone(),
                close: r[10].clone(),
                one: r[11].clone(),
                zero: r[12].clone(),
            },
            occurrence: r[13].clone(),
        };
        Formula::and(vec![
            prefix_map(s, word, &tape.vp, leaf),
            transcription(s, word, &tape),
            substitution(s, word, &tape, leaf),
            linear(s, &tape.cells),
            linear(s, &tape.stages),
            markers(s, &tape),
            labelling(s, &tape),
            rewriting(s, &tape),
        ])
    })
}

/// `H` copies the matrix, bars dropped, onto the first stage of the tape,
/// turning every variable into a bit.
fn transcription(s: &mut Scope, word: &Word, tape: &Tape) -> Formula {
    let lb = &tape.labels;
    let pointwise = s.forall(&["x", "z"], |s, v| {
        let (x, z) = (v[0].as_str(), v[1].as_str());
        s.nodes(Quantifier::Forall, &["y", "z"], 2, |s, n| {
            let (y, z2) = (&n[0], &n[1]);
            let function = Formula::implies(
                Formula::and(vec![tape.holds(x, y), tape.holds(x, z2)]),
                Formula::and(vec![eq_nodes(y, z2), word.in_matrix(s, x), tape.cells.vertex(y)]),
            );
            let injective = Formula::implies(Formula::and(vec![tape.holds(x, y), tape.holds(z, y)]), Formula::eq(x, z));
            let covered = s.nodes(Quantifier::Forall, &["y'", "z'", "t'"], 2, |s, m| {
                let (start, next_start, end) = (&m[0], &m[1], &m[2]);
                s.forall(&["v'", "v2"], |s, w| {
                    let (first, second) = (w[0].as_str(), w[1].as_str());
                    let entered = s.exists(&["y"], |_, u| tape.stage_edge(&u[0], first));
                    let span = Formula::and(vec![
                        tape.stages.vertex(&[first]),
                        Formula::not(entered),
                        tape.stage_edge(first, second),
                        tape.mark(first, start),
                        tape.mark(second, next_start),
                        tape.step(end, next_start),
                        tape.reach(s, start, y),
                        tape.reach(s, y, end),
                    ]);
                    let hit = s.exists(&["x'"], |_, u| tape.holds(&u[0], y));
                    Formula::implies(span, hit)
                })
            });
            let image = s.nodes(Quantifier::Exists, &["y'"], 2, |_, m| tape.holds(x, &m[0]));
            let total = Formula::implies(
                Formula::and(vec![word.in_matrix(s, x), Formula::not(word.at(Symbol::Bar, x))]),
                image,
            );
            Formula::and(vec![function, injective, covered, total])
        })
    });
    let faithful = s.forall(&["x", "z"], |s, v| {
        let (x, z) = (v[0].as_str(), v[1].as_str());
        s.nodes(Quantifier::Forall, &["y", "z"], 2, |s, n| {
            let (y, z2) = (&n[0], &n[1]);
            let only_bars = s.forall(&["x'"], |s, w| {
                let b = w[0].as_str();
                let between =
                    Formula::and(vec![word.path(s, x, b), word.path(s, b, z), Formula::neq(b, x), Formula::neq(b, z)]);
                Formula::implies(between, word.at(Symbol::Bar, b))
            });
            let adjacent = Formula::or(vec![word.next(s, x, z), Formula::and(vec![word.path(s, x, z), only_bars])]);
            let order =
                Formula::implies(Formula::and(vec![tape.holds(x, y), tape.holds(z, z2), tape.step(y, z2)]), adjacent);
            let letters = [
                (Symbol::Open, &lb.open),
                (Symbol::Close, &lb.close),
                (Symbol::And, &lb.and),
                (Symbol::Or, &lb.or),
                (Symbol::Not, &lb.not),
            ];
            let mut cases: Vec<Formula> =
                letters.iter().map(|(sym, c)| Formula::and(vec![word.at(*sym, x), c.atom(y)])).collect();
            cases.push(Formula::and(vec![word.at(Symbol::X, x), Formula::or(vec![lb.zero.atom(y), lb.one.atom(y)])]));
            Formula::and(vec![order, Formula::implies(tape.holds(x, y), Formula::or(cases))])
        })
    });
    Formula::and(vec![pointwise, faithful])
}

/// For every bar run of a matrix occurrence matched with the bar run of a
/// prefix variable, the copied bit of the occurrence is the leaf bit of
/// that variable.
fn substitution(s: &mut Scope, word: &Word, tape: &Tape, leaf: &Valuation) -> Formula {
    s.forall_rel(&[("V_0", 2)], |s, r| {
        let v0 = &r[0];
        let bases = ["z0", "y0", "zf", "yf", "z0'", "y0'", "zf'", "yf'"];
        s.forall(&bases, |s, v| {
            let [z0, y0, zf, yf, z0p, y0p, zfp, yfp] = std::array::from_fn(|i| v[i].as_str());
            let before =
                s.exists(&["z'", "y'"], |s, w| Formula::and(vec![word.prev(s, z0, &w[0]), v0.atom(&[&w[0], &w[1]])]));
            let after =
                s.exists(&["z'", "y'"], |s, w| Formula::and(vec![word.next(s, zf, &w[0]), v0.atom(&[&w[0], &w[1]])]));
            let domain = s.forall(&["z'"], |s, w| {
                let z = w[0].as_str();
                let image = s.exists(&["y'"], |_, u| v0.atom(&[z, u[0].as_str()]));
                Formula::implies(Formula::and(vec![word.path(s, z0, z), word.path(s, z, zf)]), image)
            });
            let range = s.forall(&["y'"], |s, w| {
                let y = w[0].as_str();
                let preimage = s.exists(&["z'"], |_, u| v0.atom(&[u[0].as_str(), y]));
                Formula::implies(Formula::and(vec![word.path(s, y0, y), word.path(s, y, yf)]), preimage)
            });
            let ends = Formula::and(vec![
                v0.atom(&[z0, y0]),
                Formula::not(before),
                v0.atom(&[zf, yf]),
                Formula::not(after),
                domain,
                range,
            ]);
            let bijection = s.forall(&["x", "y", "v", "w"], |s, w| {
                let (x, y, a, b) = (w[0].as_str(), w[1].as_str(), w[2].as_str(), w[3].as_str());
                Formula::and(vec![
                    Formula::implies(
                        v0.atom(&[x, y]),
                        Formula::and(vec![word.at(Symbol::Bar, x), word.at(Symbol::Bar, y)]),
                    ),
                    Formula::implies(Formula::and(vec![v0.atom(&[x, y]), v0.atom(&[x, a])]), Formula::eq(y, a)),
                    Formula::implies(Formula::and(vec![v0.atom(&[x, y]), v0.atom(&[b, y])]), Formula::eq(x, b)),
                    Formula::implies(
                        Formula::and(vec![v0.atom(&[x, y]), v0.atom(&[a, b]), word.next(s, x, a)]),
                        word.next(s, y, b),
                    ),
                ])
            });
            let declared = Formula::and(vec![
                word.prev(s, z0, z0p),
                word.at(Symbol::X, z0p),
                Formula::not(word.in_matrix(s, z0p)),
            ]);
            let used = Formula::and(vec![word.prev(s, y0, y0p), word.at(Symbol::X, y0p), word.in_matrix(s, y0p)]);
            let dom_end = Formula::and(vec![word.next(s, zf, zfp), Formula::not(word.at(Symbol::Bar, zfp))]);
            let ran_end = Formula::and(vec![word.next(s, yf, yfp), Formula::not(word.at(Symbol::Bar, yfp))]);
            let copied = s.forall(&["x", "x'"], |s, w| {
                let (x, bit) = (w[0].as_str(), w[1].as_str());
                let cell = s.nodes(Quantifier::Exists, &["z"], 2, |s, n| {
                    let c = &n[0];
                    let zero = Formula::and(vec![word.zero(s, bit), tape.labels.zero.atom(c)]);
                    let one = Formula::and(vec![word.one(s, bit), tape.labels.one.atom(c)]);
                    Formula::and(vec![tape.holds(y0p, c), Formula::or(vec![zero, one])])
                });
                Formula::implies(Formula::and(vec![tape.vp.atom(&[z0p, x]), leaf.bits.atom(&[x, bit])]), cell)
            });
            Formula::implies(Formula::and(vec![ends, bijection, declared, used, dom_end, ran_end]), copied)
        })
    })
}

/// `M` injects the stages into the tape cells in order.
fn markers(s: &mut Scope, tape: &Tape) -> Formula {
    s.forall(&["s", "s'"], |s, v| {
        let (a, a2) = (v[0].as_str(), v[1].as_str());
        s.nodes(Quantifier::Forall, &["t", "k"], 2, |s, n| {
            let (t, c) = (&n[0], &n[1]);
            let function = Formula::implies(
                Formula::and(vec![tape.mark(a, t), tape.mark(a, c)]),
                Formula::and(vec![eq_nodes(t, c), tape.stages.vertex(&[a]), tape.cells.vertex(t)]),
            );
            let injective =
                Formula::implies(Formula::and(vec![tape.mark(a, c), tape.mark(&t[0], c)]), Formula::eq(a, &t[0]));
            let image = s.nodes(Quantifier::Exists, &["t'"], 2, |_, m| tape.mark(a, &m[0]));
            let total = Formula::implies(tape.stages.vertex(&[a]), image);
            let stage_order = path(s, &tape.stages, &[a], &[a2]);
            let monotone = Formula::implies(
                Formula::and(vec![tape.mark(a, t), tape.mark(a2, c), stage_order]),
                tape.reach(s, t, c),
            );
            Formula::and(vec![function, injective, total, monotone])
        })
    })
}

/// The seven labels partition the tape cells.
fn labelling(s: &mut Scope, tape: &Tape) -> Formula {
    let labels = tape.labels.all();
    let disjoint = s.nodes(Quantifier::Forall, &["s"], 2, |_, n| {
        let c = &n[0];
        let mut parts = Vec::new();
        for (i, a) in labels.iter().enumerate() {
            for b in &labels[i + 1..] {
                parts.push(Formula::implies(a.atom(c), Formula::not(b.atom(c))));
            }
        }
        Formula::and(parts)
    });
    let covered = s.nodes(Quantifier::Forall, &["s"], 2, |_, n| {
        let c = &n[0];
        Formula::implies(tape.cells.vertex(c), Formula::or(labels.iter().map(|l| l.atom(c)).collect()))
    });
    let within = s.nodes(Quantifier::Forall, &["s"], 2, |_, n| {
        let c = &n[0];
        Formula::and(labels.iter().map(|l| Formula::implies(l.atom(c), tape.cells.vertex(c))).collect())
    });
    Formula::and(vec![disjoint, covered, within])
}

/// The endpoints of the word at stage `x` and of the word at the next stage,
/// and the map `ev` between their cells.
struct Transition<'a> {
    tape: &'a Tape,
    x: String,
    ev: Rel,
    f: Vec<String>,
    l: Vec<String>,
    f2: Vec<String>,
    l2: Vec<String>,
}

impl Transition<'_> {
    fn maps(&self, a: &[String], b: &[String]) -> Formula {
        let args: Vec<&str> = a.iter().chain(b).map(String::as_str).collect();
        self.ev.atom(&args)
    }
}

/// Every stage rewrites into the next by one evaluation step, and the last
/// stage is the single bit `1`.
fn rewriting(s: &mut Scope, tape: &Tape) -> Formula {
    s.forall(&["x"], |s, v| {
        let x = v[0].clone();
        let step = s.exists_rel(&[("E_v", 4)], |s, r| {
            s.nodes(Quantifier::Exists, &["f", "l", "f'", "l'"], 2, |s, n| {
                let t = Transition {
                    tape,
                    x: x.clone(),
                    ev: r[0].clone(),
                    f: n[0].clone(),
                    l: n[1].clone(),
                    f2: n[2].clone(),
                    l2: n[3].clone(),
                };
                let cases = Formula::or(vec![binary_step(s, &t), negation_step(s, &t), unwrap_step(s, &t)]);
                Formula::or(vec![final_step(s, &t), accepted(s, &t), Formula::and(vec![inner_step(s, &t), cases])])
            })
        });
        Formula::implies(tape.stages.vertex(&[&x]), step)
    })
}

/// Stage `x` has two later stages; `(f, l)` and `(f', l')` delimit its
/// word and the next, and `E_v` maps the first into the second.
fn inner_step(s: &mut Scope, t: &Transition<'_>) -> Formula {
    let tape = t.tape;
    let x = t.x.as_str();
    let two_more =
        s.exists(&["y", "y1"], |_, v| Formula::and(vec![tape.stage_edge(x, &v[0]), tape.stage_edge(&v[0], &v[1])]));
    let partial_injection = s.nodes(Quantifier::Forall, &["s", "t", "k"], 2, |_, n| {
        let (a, b, c) = (&n[0], &n[1], &n[2]);
        Formula::and(vec![
            Formula::implies(
                Formula::and(vec![t.maps(a, b), t.maps(a, c)]),
                Formula::and(vec![eq_nodes(b, c), tape.cells.vertex(a), tape.cells.vertex(b)]),
            ),
            Formula::implies(Formula::and(vec![t.maps(a, c), t.maps(b, c)]), eq_nodes(a, b)),
        ])
    });
    let next_marked = s.exists(&["s"], |s, v| {
        let st = v[0].as_str();
        s.nodes(Quantifier::Exists, &["a"], 2, |_, n| {
            Formula::and(vec![tape.stage_edge(x, st), tape.step(&t.l, &n[0]), tape.mark(st, &n[0])])
        })
    });
    let after_next = s.exists(&["s", "s2"], |s, v| {
        let (st, st2) = (v[0].as_str(), v[1].as_str());
        s.nodes(Quantifier::Exists, &["a"], 2, |_, n| {
            Formula::and(vec![
                tape.stage_edge(x, st),
                tape.stage_edge(st, st2),
                tape.mark(st2, &n[0]),
                tape.step(&t.l2, &n[0]),
            ])
        })
    });
    let delimiters = Formula::and(vec![tape.mark(x, &t.f), next_marked, tape.step(&t.l, &t.f2), after_next]);
    let confined = s.nodes(Quantifier::Forall, &["y", "z"], 2, |s, n| {
        let (y, z) = (&n[0], &n[1]);
        let inside = Formula::and(vec![
            tape.reach(s, &t.f, y),
            tape.reach(s, y, &t.l),
            tape.reach(s, &t.f2, z),
            tape.reach(s, z, &t.l2),
        ]);
        Formula::implies(t.maps(y, z), inside)
    });
    let spans = Formula::and(vec![confined, t.maps(&t.f, &t.f2), t.maps(&t.l, &t.l2)]);
    Formula::and(vec![two_more, partial_injection, delimiters, spans])
}

/// A segment copied outside the window: its first and last node on the old
/// word, then on the new word.
type Side<'a> = (&'a [String], &'a [String], &'a [String], &'a [String]);

/// Outside the window `lo … hi` of the old word, `E_v` copies the word
/// cell by cell onto the new word outside `lo' … hi'`.
fn window_frame(
    s: &mut Scope,
    t: &Transition<'_>,
    lo: &[String],
    hi: &[String],
    lo2: &[String],
    hi2: &[String],
) -> Formula {
    let tape = t.tape;
    let sides: [Side<'_>; 2] = [(&t.f, lo, &t.f2, lo2), (hi, &t.l, hi2, &t.l2)];
    let edges = s.nodes(Quantifier::Forall, &["z1", "z2", "z1'", "z2'"], 2, |s, n| {
        let (a, b, a2, b2) = (&n[0], &n[1], &n[2], &n[3]);
        let mut parts = Vec::new();
        for (from, to, from2, to2) in sides {
            let old = Formula::and(vec![
                tape.reach(s, from, a),
                tape.reach(s, b, to),
                tape.step(a, b),
                t.maps(a, a2),
                t.maps(b, b2),
            ]);
            let new = Formula::and(vec![tape.reach(s, from2, a2), tape.reach(s, b2, to2), tape.step(a2, b2)]);
            parts.push(Formula::implies(old, new));
        }
        Formula::and(parts)
    });
    let mut parts = vec![edges];
    for (from, to, from2, to2) in sides {
        parts.push(s.nodes(Quantifier::Forall, &["z1", "z1'"], 2, |s, n| {
            let (a, a2) = (&n[0], &n[1]);
            let old = Formula::and(vec![tape.reach(s, from, a), tape.reach(s, a, to), t.maps(a, a2)]);
            let new = Formula::and(vec![tape.reach(s, from2, a2), tape.reach(s, a2, to2), tape.labels.same(a, a2)]);
            Formula::implies(old, new)
        }));
        parts.push(s.nodes(Quantifier::Forall, &["z1"], 2, |s, n| {
            let a = &n[0];
            let side = Formula::and(vec![tape.reach(s, from, a), tape.reach(s, a, to)]);
            let image = s.nodes(Quantifier::Exists, &["z1'"], 2, |_, m| t.maps(a, &m[0]));
            Formula::implies(side, image)
        }));
    }
    Formula::and(parts)
}

/// `( b1 θ b2 )` becomes `( b )`.
fn binary_step(s: &mut Scope, t: &Transition<'_>) -> Formula {
    let tape = t.tape;
    let lb = &tape.labels;
    s.nodes(Quantifier::Exists, &["v", "w", "v'", "w'", "p1", "p2", "p3", "p1'"], 2, |s, n| {
        let [v, w, v2, w2, p1, p2, p3, r] = std::array::from_fn(|i| &n[i]);
        let window = Formula::and(vec![
            tape.reach(s, &t.f, v),
            tape.reach(s, w, &t.l),
            tape.step(p1, p2),
            tape.step(p2, p3),
            tape.step(v, p1),
            tape.step(p3, w),
            lb.open.atom(v),
            lb.close.atom(w),
            tape.reach(s, &t.f2, v2),
            tape.reach(s, w2, &t.l2),
            tape.step(v2, r),
            tape.step(r, w2),
            t.maps(p1, r),
            t.maps(v, v2),
            t.maps(w, w2),
            lb.open.atom(v2),
            lb.close.atom(w2),
        ]);
        let mut table = Vec::new();
        for a in [false, true] {
            for b in [false, true] {
                for (op, value) in [(&lb.and, a && b), (&lb.or, a || b)] {
                    table.push(Formula::and(vec![
                        lb.bit(a).atom(p1),
                        lb.bit(b).atom(p3),
                        op.atom(p2),
                        lb.bit(value).atom(r),
                    ]));
                }
            }
        }
        Formula::and(vec![window, window_frame(s, t, v, w, v2, w2), Formula::or(table)])
    })
}

/// `( ¬ b )` becomes `( b' )` with `b'` the negation of `b`.
fn negation_step(s: &mut Scope, t: &Transition<'_>) -> Formula {
    let tape = t.tape;
    let lb = &tape.labels;
    s.nodes(Quantifier::Exists, &["v", "w", "v'", "w'", "p1", "p2", "p1'"], 2, |s, n| {
        let [v, w, v2, w2, p1, p2, r] = std::array::from_fn(|i| &n[i]);
        let window = Formula::and(vec![
            tape.reach(s, &t.f, v),
            tape.reach(s, w, &t.l),
            tape.step(v, p1),
            tape.step(p1, p2),
            tape.step(p2, w),
            lb.open.atom(v),
            lb.not.atom(p1),
            lb.close.atom(w),
            tape.reach(s, &t.f2, v2),
            tape.reach(s, w2, &t.l2),
            tape.step(v2, r),
            tape.step(r, w2),
            t.maps(p2, r),
            t.maps(v, v2),
            t.maps(w, w2),
            lb.open.atom(v2),
            lb.close.atom(w2),
        ]);
        let flip = Formula::or(vec![
            Formula::and(vec![lb.zero.atom(p2), lb.one.atom(r)]),
            Formula::and(vec![lb.one.atom(p2), lb.zero.atom(r)]),
        ]);
        Formula::and(vec![window, window_frame(s, t, v, w, v2, w2), flip])
    })
}

/// `( b )` inside a longer word becomes `b`; the cells `u` and `r` around
/// the parentheses map to the neighbours `v'` and `w'` of the new bit.
fn unwrap_step(s: &mut Scope, t: &Transition<'_>) -> Formula {
    let tape = t.tape;
    let lb = &tape.labels;
    s.nodes(Quantifier::Exists, &["u", "v", "b", "w", "r", "v'", "b'", "w'"], 2, |s, n| {
        let [u, v, b, w, r, v2, b2, w2] = std::array::from_fn(|i| &n[i]);
        let window = Formula::and(vec![
            tape.reach(s, &t.f, u),
            tape.reach(s, r, &t.l),
            tape.step(u, v),
            tape.step(v, b),
            tape.step(b, w),
            tape.step(w, r),
            lb.open.atom(v),
            lb.close.atom(w),
            tape.reach(s, &t.f2, v2),
            tape.reach(s, w2, &t.l2),
            tape.step(v2, b2),
            tape.step(b2, w2),
            t.maps(u, v2),
            t.maps(b, b2),
            t.maps(r, w2),
        ]);
        let keep = Formula::or(vec![
            Formula::and(vec![lb.zero.atom(b), lb.zero.atom(b2)]),
            Formula::and(vec![lb.one.atom(b), lb.one.atom(b2)]),
        ]);
        Formula::and(vec![window, window_frame(s, t, u, r, v2, w2), keep])
    })
}

/// Stage `x` is `( b )` and the last stage is `b`.
fn final_step(s: &mut Scope, t: &Transition<'_>) -> Formula {
    let tape = t.tape;
    let lb = &tape.labels;
    let x = t.x.as_str();
    s.exists(&["y"], |s, v| {
        let y = v[0].as_str();
        let last = tape.last_stage(s, y);
        let words = s.nodes(Quantifier::Exists, &["p1", "p1'"], 2, |s, n| {
            let (p, p2) = (&n[0], &n[1]);
            let ends = Formula::not(s.nodes(Quantifier::Exists, &["p2'"], 2, |_, m| tape.step(p2, &m[0])));
            Formula::and(vec![
                tape.mark(x, &t.f),
                tape.mark(y, p2),
                tape.step(&t.f, p),
                tape.step(p, &t.l),
                tape.step(&t.l, p2),
                ends,
                lb.open.atom(&t.f),
                lb.close.atom(&t.l),
                Formula::or(vec![
                    Formula::and(vec![lb.one.atom(p), lb.one.atom(p2)]),
                    Formula::and(vec![lb.zero.atom(p), lb.zero.atom(p2)]),
                ]),
            ])
        });
        Formula::and(vec![tape.stage_edge(x, y), last, words])
    })
}

/// Stage `x` is the last one and holds the single bit `1`.
fn accepted(s: &mut Scope, t: &Transition<'_>) -> Formula {
    let tape = t.tape;
    let x = t.x.as_str();
    let last = tape.last_stage(s, x);
    let word = s.nodes(Quantifier::Exists, &["p'"], 2, |s, n| {
        let p = &n[0];
        let ends = Formula::not(s.nodes(Quantifier::Exists, &["y'"], 2, |_, m| tape.step(p, &m[0])));
        Formula::and(vec![tape.mark(x, p), ends, tape.labels.one.atom(p)])
    });
    Formula::and(vec![last, word])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{analyze, parse_formula, pretty_print, rebound_variables};

    #[test]
    fn small_k_are_sentences_of_arity_four() {
        for k in 1..=3 {
            let f = satqbf_k(k).unwrap();
            let stats = analyze(&f);
            assert!(stats.is_sentence(), "k={k}: {:?} {:?}", stats.free_fo_vars, stats.free_so_vars);
            assert_eq!(stats.max_so_arity, 4, "k={k}");
            assert!(rebound_variables(&f).is_empty(), "k={k}");
            assert_eq!(parse_formula(&pretty_print(&f)).unwrap(), f, "k={k}");
        }
    }

    /// Leading second-order binders of `f`.
    fn leading(f: &Formula) -> Vec<(Quantifier, String)> {
        let mut out = Vec::new();
        let mut cur = f;
        while let Formula::Quant { q, binder, body } = cur {
            out.push((*q, binder.name().to_string()));
            cur = body;
        }
        out
    }

    #[test]
    fn valuation_prefix_alternates() {
        for k in 1..=4 {
            let prefix = leading(&satqbf_k(k).unwrap());
            assert_eq!(prefix.len(), 3 * k + 3 + k, "k={k}");
            for (i, (q, name)) in prefix.iter().enumerate().take(3 * k) {
                let block = i / 3 + 1;
                let expected = if block % 2 == 1 { Quantifier::Exists } else { Quantifier::Forall };
                assert_eq!(*q, expected, "k={k} {name}");
                assert!(name.ends_with(&block.to_string()), "k={k} {name}");
            }
            assert!(prefix[3 * k..].iter().all(|(q, _)| *q == Quantifier::Exists), "k={k}");
        }
    }

    /// Top-level conjuncts of the body below the valuation prefix.
    fn matrix(f: &Formula) -> &[Formula] {
        let mut cur = f;
        while let Formula::Quant { body, .. } = cur {
            cur = body;
        }
        match cur {
            Formula::And(parts) => parts,
            other => panic!("unexpected matrix {other:?}"),
        }
    }

    #[test]
    fn consecutive_k_share_the_satisfaction_test() {
        let (one, two) = (satqbf_k(1).unwrap(), satqbf_k(2).unwrap());
        assert_ne!(one, two);
        let (m1, m2) = (matrix(&one), matrix(&two));
        let (Formula::Implies(_, c1), Formula::Implies(_, c2)) = (m1.last().unwrap(), m2.last().unwrap()) else {
            panic!("last conjunct is not the satisfaction implication");
        };
        assert_eq!(c1, c2);
        assert_eq!(m1[..2], m2[..2]);
    }

    #[test]
    fn rejects_zero_blocks() {
        assert!(matches!(satqbf_k(0), Err(LibraryError::InvalidParameter(_))));
    }
}
