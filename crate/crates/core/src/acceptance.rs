//! The acceptance suite: nine end-to-end checks, each pairing a builder or
//! engine with an independent route to the same answer.
//!
//! Shared by the `selftest` subcommand and the `acceptance` test target.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use crate::corpus::{Corpus, GROUNDED_SEED, QBF_SEED, SENTENCE_SEED};
use crate::eval::{eval_grounded, eval_grounded_with, eval_naive, Budget, Environment, EvalError};
use crate::library::{
    arithmetic, auxiliary, hypercube, regular, satqbf_k, Arithmetic, Auxiliary, Strategy, PAIR_EDGES, PAIR_VERTICES,
};
use crate::logic::{analyze, parse_formula, pretty_print, rebound_variables, Formula};
use crate::qbf::{
    encode_word_model, export_qdimacs, parse_qbf, sat_via_alternating_valuations, solve_qbf_tree, solve_recursive,
};
use crate::structures::{
    generate, is_hypercube, is_regular, Family, FiniteStructure, RelationSymbol, Symbol, Vocabulary, EDGE, LEQ, SUCC,
};

/// Outcome of one check: `Ok` carries a summary, `Err` the first failure.
type Outcome = Result<String, String>;

/// One acceptance check.
#[derive(Clone, Copy)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    /// Wall-clock bound; exceeding it fails the check.
    pub limit: Option<Duration>,
    run: fn() -> Outcome,
}

impl fmt::Debug for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Criterion").field("id", &self.id).field("name", &self.name).finish()
    }
}

impl Criterion {
    /// True if `filter` is this check's number or a substring of its name.
    pub fn matches(&self, filter: &str) -> bool {
        filter.parse::<u8>().map_or_else(|_| self.name.contains(filter), |id| id == self.id)
    }

    pub fn run(&self) -> Report {
        let start = Instant::now();
        let outcome = (self.run)();
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if let Some(limit) = self.limit.filter(|l| elapsed > *l) {
            passed = false;
            detail = format!("{detail}; exceeded time limit of {}s", limit.as_secs_f64());
        }
        Report { id: self.id, name: self.name, passed, detail, elapsed }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

const fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

static CRITERIA: [Criterion; 9] = [
    Criterion { id: 1, name: "word-model-fidelity", limit: secs(1), run: word_model_fidelity },
    Criterion { id: 2, name: "qbf-semantics", limit: secs(60), run: qbf_semantics },
    Criterion { id: 3, name: "regularity", limit: secs(120), run: regularity },
    Criterion { id: 4, name: "hypercube-so2", limit: secs(600), run: hypercube_so2 },
    Criterion { id: 5, name: "arithmetic", limit: secs(600), run: arithmetic_predicates },
    Criterion { id: 6, name: "engine-equivalence", limit: None, run: engine_equivalence },
    Criterion { id: 7, name: "satqbf-construction", limit: None, run: satqbf_construction },
    Criterion { id: 8, name: "qdimacs-export", limit: None, run: qdimacs_export },
    Criterion { id: 9, name: "third-order", limit: None, run: third_order },
];

pub fn criteria() -> &'static [Criterion] {
    &CRITERIA
}

/// Runs every check whose id or name matches `filter` (all when `None`).
pub fn run(filter: Option<&str>) -> Vec<Report> {
    CRITERIA.iter().filter(|c| filter.is_none_or(|f| c.matches(f))).map(Criterion::run).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn text(e: impl fmt::Display) -> String {
    e.to_string()
}

fn word_model_fidelity() -> Outcome {
    let q = parse_qbf("E x1 A x2 ((!x1)|x2)").map_err(text)?;
    let w = encode_word_model(&q).map_err(text)?;
    let expected: [(Symbol, &[usize]); 9] = [
        (Symbol::Exists, &[1]),
        (Symbol::Forall, &[4]),
        (Symbol::Not, &[10]),
        (Symbol::Or, &[14]),
        (Symbol::And, &[]),
        (Symbol::Open, &[8, 9]),
        (Symbol::Close, &[13, 18]),
        (Symbol::X, &[2, 5, 11, 15]),
        (Symbol::Bar, &[3, 6, 7, 12, 16, 17]),
    ];
    ensure(w.len() == 18, || format!("domain has {} positions, expected 18", w.len()))?;
    for (sym, want) in expected {
        let got = w.positions(sym, 1);
        ensure(got == want.iter().copied().collect::<BTreeSet<_>>(), || {
            format!("{} = {got:?}, expected {want:?}", sym.relation())
        })?;
    }
    Ok("all ten relation sets match".into())
}

fn qbf_semantics() -> Outcome {
    let mut corpus = Corpus::new(QBF_SEED);
    let mut cases: Vec<_> =
        ["E x1 A x2 ((!x1)|x2)", "E x1 (x1)"].iter().map(|t| parse_qbf(t).map_err(text)).collect::<Result<_, _>>()?;
    cases.extend((0..200).map(|_| corpus.qbf(3, 6)));
    let mut trues = 0;
    for q in &cases {
        let a = solve_recursive(q).map_err(text)?;
        let b = sat_via_alternating_valuations(q).map_err(text)?;
        ensure(a == b, || format!("disagreement on {q}: recursive {a}, valuations {b}"))?;
        trues += usize::from(a);
    }
    Ok(format!("{} formulas agree ({trues} true)", cases.len()))
}

/// Undirected graphs on `n` labeled vertices, one per edge subset.
fn labeled_graphs(n: usize) -> impl Iterator<Item = FiniteStructure> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
        FiniteStructure::graph(n, &edges).expect("edges within domain")
    })
}

fn regularity() -> Outcome {
    let f = regular();
    let graphs =
        labeled_graphs(4).chain([5, 6].map(|n| generate(Family::Cycle(n)).expect("cycle"))).collect::<Vec<_>>();
    let mut regular_count = 0;
    for g in &graphs {
        let want = is_regular(g).map_err(text)?;
        let got = eval_grounded(g, &f, Budget::default()).map_err(text)?;
        ensure(got == want, || format!("sentence says {got}, degree check says {want} on {g:?}"))?;
        regular_count += usize::from(want);
    }
    Ok(format!("{} graphs agree ({regular_count} regular)", graphs.len()))
}

/// Every graph obtained from `g` by adding or removing one edge.
fn single_edge_perturbations(g: &FiniteStructure) -> Vec<FiniteStructure> {
    let n = g.size();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let mut h = g.clone();
            if h.holds(EDGE, &[a, b]) {
                h.remove(EDGE, &[a, b]).expect("edge exists");
                h.remove(EDGE, &[b, a]).expect("edge exists");
            } else {
                h.insert(EDGE, vec![a, b]).expect("within domain");
                h.insert(EDGE, vec![b, a]).expect("within domain");
            }
            out.push(h);
        }
    }
    out
}

fn hypercube_so2() -> Outcome {
    let f = hypercube(Strategy::So2);
    let mut cases: Vec<(String, FiniteStructure, bool)> = Vec::new();
    for m in 1..=3 {
        cases.push((format!("hypercube({m})"), generate(Family::Hypercube(m)).map_err(text)?, true));
    }
    for family in [Family::Cycle(6), Family::Cycle(8), Family::Complete(4)] {
        cases.push((family.to_string(), generate(family).map_err(text)?, false));
    }
    for m in [2, 3] {
        let q = generate(Family::Hypercube(m)).map_err(text)?;
        for (i, h) in single_edge_perturbations(&q).into_iter().enumerate() {
            cases.push((format!("hypercube({m}) perturbation {i}"), h, false));
        }
    }
    for (name, g, want) in &cases {
        let oracle = is_hypercube(g).map_err(text)?;
        ensure(oracle == *want, || format!("{name}: oracle says {oracle}"))?;
        let got = eval_grounded(g, &f, Budget::default()).map_err(|e| format!("{name}: {e}"))?;
        ensure(got == oracle, || format!("{name}: sentence says {got}, oracle says {oracle}"))?;
    }
    Ok(format!("{} graphs agree with the oracle", cases.len()))
}

type IntegerOp = fn(u64, u64) -> Option<u64>;

fn arithmetic_predicates() -> Outcome {
    let ops: [(Arithmetic, IntegerOp); 3] = [
        (Arithmetic::Sum, |x, y| x.checked_add(y)),
        (Arithmetic::Times, |x, y| x.checked_mul(y)),
        (Arithmetic::Exp, |x, y| u32::try_from(y).ok().and_then(|y| x.checked_pow(y))),
    ];
    let mut checked = 0;
    for (op, oracle) in ops {
        let f = arithmetic(op, None);
        for n in 4..=6 {
            let s = generate(Family::LinearDigraph(n)).map_err(text)?;
            for x in 0..n {
                for y in 0..n {
                    let want = oracle(x as u64, y as u64);
                    for z in 0..n {
                        let env = Environment::with_elements([("x", x), ("y", y), ("z", z)]);
                        let got = eval_grounded_with(&s, &f, &env, Budget::default()).map_err(text)?;
                        ensure(got == (want == Some(z as u64)), || {
                            format!("{op:?}({x}, {y}, {z}) on {n} positions gave {got}")
                        })?;
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} triples agree with integer arithmetic"))
}

/// Tally of a two-engine comparison.
#[derive(Debug, Default)]
struct Agreement {
    compared: usize,
    exceeded: usize,
}

impl Agreement {
    fn record(
        &mut self,
        what: impl FnOnce() -> String,
        naive: Result<bool, EvalError>,
        grounded: Result<bool, EvalError>,
    ) -> Result<(), String> {
        match (naive, grounded) {
            (Ok(a), Ok(b)) => {
                ensure(a == b, || format!("{}: naive {a}, grounded {b}", what()))?;
                self.compared += 1;
            }
            (Err(e), _) | (_, Err(e)) if e.is_budget_exceeded() => self.exceeded += 1,
            (Err(e), _) | (_, Err(e)) => return Err(format!("{}: {e}", what())),
        }
        Ok(())
    }

    fn total(&self) -> usize {
        self.compared + self.exceeded
    }
}

/// Every assignment of `vars` to elements of `{0..n-1}`.
fn assignments(vars: &[&'static str], n: usize) -> Vec<Environment> {
    let count = n.pow(vars.len() as u32);
    (0..count)
        .map(|mut code| {
            let mut env = Environment::new();
            for v in vars {
                env.bind_element(v, code % n);
                code /= n;
            }
            env
        })
        .collect()
}

/// The generator structures with at most three elements.
fn small_generated() -> Vec<FiniteStructure> {
    let mut out = vec![generate(Family::Hypercube(1)).expect("hypercube")];
    for n in 1..=3 {
        for family in [Family::LinearDigraph(n), Family::Cycle(n), Family::Complete(n)] {
            out.push(generate(family).expect("small family"));
        }
    }
    out
}

fn binary_relation(s: &FiniteStructure) -> &'static str {
    if s.vocabulary().relation_index(SUCC).is_some() {
        SUCC
    } else {
        EDGE
    }
}

/// The order-free auxiliaries, instantiated over the binary relation of
/// each generator structure, with every assignment of their free
/// variables.
fn auxiliary_agreement(tally: &mut Agreement) -> Result<(), String> {
    let budget = Budget::default();
    for s in small_generated() {
        let rel = binary_relation(&s);
        let mut cases = vec![
            (Auxiliary::PathE, vec!["v", "w"]),
            (Auxiliary::Linear, vec![]),
            (Auxiliary::SucLeq, vec!["x", "y"]),
            (Auxiliary::PredLeq, vec!["x", "y"]),
        ];
        cases.extend((0..s.size()).map(|j| (Auxiliary::Numeral(j), vec!["x"])));
        for (aux, vars) in cases {
            let f = auxiliary(aux, Some(rel));
            for env in assignments(&vars, s.size()) {
                tally.record(
                    || format!("{aux:?} on {s:?} with {:?}", env.elements()),
                    eval_naive(&s, &f, &env, budget),
                    eval_grounded_with(&s, &f, &env, budget),
                )?;
            }
        }
    }
    Ok(())
}

/// `linear2` and `pathEC` under random pair graphs over two elements, the
/// latter at three random endpoint pairs per graph.
fn pair_graph_agreement(tally: &mut Agreement, rounds: usize) -> Result<(), String> {
    let budget = Budget::default();
    let mut corpus = Corpus::new(GROUNDED_SEED);
    let s = FiniteStructure::graph(2, &[]).map_err(text)?;
    let linear2 = auxiliary(Auxiliary::Linear2, None);
    let path = auxiliary(Auxiliary::PathEC, None);
    for _ in 0..rounds {
        let (vertices, edges) = corpus.pair_graph(2);
        let mut env = Environment::new();
        env.bind_relation(PAIR_VERTICES, 2, vertices).map_err(text)?;
        env.bind_relation(PAIR_EDGES, 4, edges).map_err(text)?;
        tally.record(
            || format!("linear2 under {:?}", env.relations()),
            eval_naive(&s, &linear2, &env, budget),
            eval_grounded_with(&s, &linear2, &env, budget),
        )?;
        for _ in 0..3 {
            let mut env = env.clone();
            for (name, e) in ["v1", "v2", "w1", "w2"].into_iter().zip(corpus.elements(2, 4)) {
                env.bind_element(name, e);
            }
            tally.record(
                || format!("pathEC at {:?} under {:?}", env.elements(), env.relations()),
                eval_naive(&s, &path, &env, budget),
                eval_grounded_with(&s, &path, &env, budget),
            )?;
        }
    }
    Ok(())
}

fn engine_equivalence() -> Outcome {
    let budget = Budget::default();
    let mut aux = Agreement::default();
    auxiliary_agreement(&mut aux)?;
    pair_graph_agreement(&mut aux, 10)?;

    let mut random = Agreement::default();
    let mut corpus = Corpus::new(SENTENCE_SEED);
    for i in 0..100 {
        let f = corpus.so_sentence(2);
        let s = corpus.digraph(1 + i % 3);
        random.record(
            || format!("sentence {i} {}", pretty_print(&f)),
            eval_naive(&s, &f, &Environment::new(), budget),
            eval_grounded(&s, &f, budget),
        )?;
    }
    let exceeded = aux.exceeded + random.exceeded;
    let total = aux.total() + random.total();
    ensure(exceeded * 20 < total, || format!("budget exceeded on {exceeded} of {total} evaluations"))?;
    Ok(format!(
        "{} auxiliary and {} random-sentence evaluations agree; budget exceeded on {exceeded} of {total}",
        aux.compared, random.compared
    ))
}

/// Oracle checks for the auxiliaries the SATQBF construction instantiates.
fn auxiliary_oracles() -> Result<usize, String> {
    let budget = Budget::default();
    let mut checked = 0;
    for n in 1..=5 {
        let chain = generate(Family::LinearDigraph(n)).map_err(text)?;
        let path = auxiliary(Auxiliary::PathE, None);
        for env in assignments(&["v", "w"], n) {
            let (v, w) = (env.element("v").unwrap_or(0), env.element("w").unwrap_or(0));
            let got = eval_grounded_with(&chain, &path, &env, budget).map_err(text)?;
            ensure(got == (v <= w), || format!("pathE({v}, {w}) on {n} positions gave {got}"))?;
            checked += 1;
        }
        for j in 0..n {
            let f = auxiliary(Auxiliary::Numeral(j), None);
            for p in 0..n {
                let env = Environment::with_elements([("x", p)]);
                let got = eval_grounded_with(&chain, &f, &env, budget).map_err(text)?;
                ensure(got == (p == j), || format!("numeral({j}) at {p} on {n} positions gave {got}"))?;
                checked += 1;
            }
        }
        let got = eval_grounded(&chain, &auxiliary(Auxiliary::Linear, None), budget).map_err(text)?;
        ensure(got, || format!("linear rejects the {n}-position chain"))?;

        let vocab = Vocabulary::new(vec![RelationSymbol::new(LEQ, 2)], vec![]).map_err(text)?;
        let mut order = FiniteStructure::empty(vocab, n).map_err(text)?;
        for a in 0..n {
            for b in a..n {
                order.insert(LEQ, vec![a, b]).map_err(text)?;
            }
        }
        for (aux, name) in [(Auxiliary::SucLeq, "sucLeq"), (Auxiliary::PredLeq, "predLeq")] {
            let f = auxiliary(aux, None);
            for env in assignments(&["x", "y"], n) {
                let (x, y) = (env.element("x").unwrap_or(0), env.element("y").unwrap_or(0));
                let got = eval_grounded_with(&order, &f, &env, budget).map_err(text)?;
                ensure(got == (y == x + 1), || format!("{name}({x}, {y}) on {n} positions gave {got}"))?;
                checked += 1;
            }
        }
    }
    let cycle = generate(Family::Cycle(3)).map_err(text)?;
    let got = eval_grounded(&cycle, &auxiliary(Auxiliary::Linear, Some(EDGE)), budget).map_err(text)?;
    ensure(!got, || "linear accepts a cycle".into())?;
    Ok(checked)
}

fn satqbf_construction() -> Outcome {
    for k in 1..=3 {
        let f = satqbf_k(k).map_err(text)?;
        let stats = analyze(&f);
        ensure(stats.is_sentence(), || {
            format!("k={k}: free variables {:?} {:?}", stats.free_fo_vars, stats.free_so_vars)
        })?;
        ensure(stats.max_so_arity == 4, || format!("k={k}: maximal arity {}", stats.max_so_arity))?;
        ensure(rebound_variables(&f).is_empty(), || format!("k={k}: a variable is bound twice"))?;
        let back = parse_formula(&pretty_print(&f)).map_err(|e| format!("k={k}: {e}"))?;
        ensure(back == f, || format!("k={k}: print/parse round trip changed the formula"))?;
    }
    let oracle_checks = auxiliary_oracles()?;
    let mut tally = Agreement::default();
    auxiliary_agreement(&mut tally)?;
    pair_graph_agreement(&mut tally, 10)?;

    let word = encode_word_model(&parse_qbf("E x1 (x1)").map_err(text)?).map_err(text)?;
    let attempt = match eval_grounded(word.structure(), &satqbf_k(1).map_err(text)?, Budget::default()) {
        Ok(v) => format!("evaluated to {v}"),
        Err(e) if e.is_budget_exceeded() => format!("stopped cleanly: {e}"),
        Err(e) => return Err(format!("grounding on {} positions failed: {e}", word.len())),
    };
    Ok(format!(
        "k=1..3 well formed; {oracle_checks} auxiliary oracle checks and {} engine comparisons pass; \
         grounding on the {}-position word {attempt}",
        tally.compared,
        word.len()
    ))
}

fn qdimacs_export() -> Outcome {
    let mut corpus = Corpus::new(GROUNDED_SEED);
    let mut trues = 0;
    for i in 0..50 {
        let g = corpus.grounded(16);
        let want = solve_qbf_tree(&g);
        let doc = export_qdimacs(&g);
        let text = doc.to_string();
        let parsed = crate::qbf::QdimacsDoc::parse(&text).map_err(|e| format!("instance {i}: {e}"))?;
        let got = parsed.evaluate_by_expansion(1 << 24).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(got == want, || format!("instance {i}: solver {want}, exported document {got}"))?;
        trues += usize::from(want);
    }
    Ok(format!("50 instances agree ({trues} true)"))
}

fn third_order() -> Outcome {
    let budget = Budget::default();
    let s = FiniteStructure::graph(2, &[]).map_err(text)?;
    let nonempty = "(ex3 T (1) (and (ex2 A 1 (var3 T A)) (all2 A 1 (implies (var3 T A) (ex1 x (var2 A x))))))";
    let f = parse_formula(nonempty).map_err(text)?;
    let got = eval_naive(&s, &f, &Environment::new(), budget).map_err(text)?;
    ensure(got, || "no nonempty set of nonempty subsets found".into())?;
    let empty = parse_formula("(all3 T (1) (all2 A 1 (not (var3 T A))))").map_err(text)?;
    let got = eval_naive(&s, &empty, &Environment::new(), budget).map_err(text)?;
    ensure(!got, || "every set of subsets reported empty".into())?;

    let to: Formula = hypercube(Strategy::To);
    let stats = analyze(&to);
    ensure(to.has_third_order(), || "hypercube/to has no third-order quantifier".into())?;
    ensure(stats.is_sentence(), || "hypercube/to has free variables".into())?;
    ensure(rebound_variables(&to).is_empty(), || "hypercube/to binds a variable twice".into())?;
    ensure(parse_formula(&pretty_print(&to)).map_err(text)? == to, || "hypercube/to round trip failed".into())?;
    Ok(format!("set-of-subsets sentences decided on 2 elements; hypercube/to well formed (depth {})", stats.to_depth))
}
