//! Seeded random instances for cross-checking solvers and engines.
//!
//! Every generator draws from one ChaCha stream, so a corpus is fully
//! determined by its seed.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::logic::{Binder, Formula, Quantifier};
use crate::qbf::{Block, BoolVar, GroundedQbf, Matrix, QNode, QVar, QbfAst, VarInfo};
use crate::structures::{FiniteStructure, Tuple, Vocabulary, EDGE};

/// Seeds used by the acceptance checks and the property tests.
pub const QBF_SEED: u64 = 0x5eed_0001;
pub const GROUNDED_SEED: u64 = 0x5eed_0002;
pub const SENTENCE_SEED: u64 = 0x5eed_0003;

#[derive(Debug, Clone)]
pub struct Corpus {
    rng: ChaCha8Rng,
}

fn quantifier(rng: &mut ChaCha8Rng) -> Quantifier {
    if rng.gen_bool(0.5) {
        Quantifier::Exists
    } else {
        Quantifier::Forall
    }
}

impl Corpus {
    pub fn new(seed: u64) -> Corpus {
        Corpus { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// A closed QBF in prenex normal form with an existential first block,
    /// at most `max_blocks` blocks and at most `max_vars` variables.
    pub fn qbf(&mut self, max_blocks: usize, max_vars: usize) -> QbfAst {
        assert!(max_blocks >= 1 && max_vars >= 1);
        let vars = self.rng.gen_range(1..=max_vars);
        let blocks = self.rng.gen_range(1..=max_blocks.min(vars));
        // Cut points split x1..x_vars into `blocks` non-empty runs.
        let mut cuts: Vec<usize> = (1..vars).collect();
        cuts.shuffle(&mut self.rng);
        cuts.truncate(blocks - 1);
        cuts.sort_unstable();
        cuts.push(vars);
        let mut start = 0;
        let mut prefix = Vec::new();
        for (i, &end) in cuts.iter().enumerate() {
            let q = if i % 2 == 0 { Quantifier::Exists } else { Quantifier::Forall };
            prefix.push(Block { quantifier: q, vars: (start + 1..=end).map(|v| v as QVar).collect() });
            start = end;
        }
        let matrix = self.matrix(vars as QVar, 4);
        QbfAst::from_blocks(prefix, matrix).expect("generated prefix is well formed")
    }

    fn matrix(&mut self, vars: QVar, depth: usize) -> Matrix {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return Matrix::var(self.rng.gen_range(1..=vars));
        }
        match self.rng.gen_range(0..3) {
            0 => Matrix::not(self.matrix(vars, depth - 1)),
            1 => Matrix::and(self.matrix(vars, depth - 1), self.matrix(vars, depth - 1)),
            _ => Matrix::or(self.matrix(vars, depth - 1), self.matrix(vars, depth - 1)),
        }
    }

    /// A closed propositional formula over at most `max_vars` Boolean
    /// variables, with quantifier nodes scattered through the tree.
    pub fn grounded(&mut self, max_vars: usize) -> GroundedQbf {
        let n = self.rng.gen_range(1..=max_vars);
        let table: Vec<VarInfo> = (0..n).map(|i| VarInfo::named(format!("b{i}"))).collect();
        let mut free: Vec<BoolVar> = (0..n as BoolVar).collect();
        free.shuffle(&mut self.rng);
        let body = self.node(&mut Vec::new(), &mut free, 5);
        let q = quantifier(&mut self.rng);
        let root = QNode::quant(q, free, body);
        GroundedQbf::compacted(table, root).expect("every occurrence is bound")
    }

    fn node(&mut self, scope: &mut Vec<BoolVar>, free: &mut Vec<BoolVar>, depth: usize) -> QNode {
        if !free.is_empty() && (scope.is_empty() || self.rng.gen_bool(0.3)) {
            let take = self.rng.gen_range(1..=free.len().min(3));
            let vars: Vec<BoolVar> = free.drain(..take).collect();
            let mark = scope.len();
            scope.extend(&vars);
            let body = self.node(scope, free, depth.saturating_sub(1));
            scope.truncate(mark);
            let q = quantifier(&mut self.rng);
            return QNode::quant(q, vars, body);
        }
        if scope.is_empty() {
            return QNode::Const(self.rng.gen_bool(0.5));
        }
        if depth == 0 || self.rng.gen_bool(0.2) {
            let v = QNode::Var(*scope.choose(&mut self.rng).expect("scope is non-empty"));
            return if self.rng.gen_bool(0.5) { v } else { QNode::not(v) };
        }
        match self.rng.gen_range(0..4) {
            0 => QNode::not(self.node(scope, free, depth - 1)),
            1 => {
                let (a, b) = (self.node(scope, free, depth - 1), self.node(scope, free, depth - 1));
                QNode::and([a, b])
            }
            2 => {
                let (a, b) = (self.node(scope, free, depth - 1), self.node(scope, free, depth - 1));
                QNode::or([a, b])
            }
            _ => {
                let (a, b) = (self.node(scope, free, depth - 1), self.node(scope, free, depth - 1));
                QNode::iff(a, b)
            }
        }
    }

    /// A directed graph over `{0..n-1}` with each ordered pair an edge with
    /// probability one half.
    pub fn digraph(&mut self, n: usize) -> FiniteStructure {
        let mut g = FiniteStructure::empty(Vocabulary::graph(), n).expect("graph vocabulary");
        for a in 0..n {
            for b in 0..n {
                if self.rng.gen_bool(0.5) {
                    g.insert(EDGE, vec![a, b]).expect("edge within domain");
                }
            }
        }
        g
    }

    /// `k` elements of `{0..n-1}`, drawn independently.
    pub fn elements(&mut self, n: usize, k: usize) -> Vec<usize> {
        (0..k).map(|_| self.rng.gen_range(0..n)).collect()
    }

    /// A random graph whose vertices are pairs over `{0..n-1}`: a vertex
    /// set of 2-tuples and an edge set of 4-tuples.
    pub fn pair_graph(&mut self, n: usize) -> (BTreeSet<Tuple>, BTreeSet<Tuple>) {
        let pairs: Vec<Tuple> = (0..n).flat_map(|a| (0..n).map(move |b| vec![a, b])).collect();
        let vertices: BTreeSet<Tuple> = pairs.iter().filter(|_| self.rng.gen_bool(0.75)).cloned().collect();
        let mut edges = BTreeSet::new();
        for a in &vertices {
            for b in &vertices {
                if self.rng.gen_bool(0.3) {
                    edges.insert([a.as_slice(), b.as_slice()].concat());
                }
            }
        }
        (vertices, edges)
    }

    /// A second-order sentence over the graph vocabulary with at most two
    /// second-order binders, each of arity at most `max_arity`.
    pub fn so_sentence(&mut self, max_arity: usize) -> Formula {
        let mut fo = Vec::new();
        let mut so = Vec::new();
        let q = quantifier(&mut self.rng);
        let arity = self.rng.gen_range(1..=max_arity);
        so.push(("R0".to_string(), arity));
        let body = self.sentence_body(&mut fo, &mut so, max_arity, 4);
        Formula::quant(q, Binder::Second { name: "R0".into(), arity }, body)
    }

    fn sentence_body(
        &mut self,
        fo: &mut Vec<String>,
        so: &mut Vec<(String, usize)>,
        max_arity: usize,
        depth: usize,
    ) -> Formula {
        if fo.is_empty() || (depth > 0 && self.rng.gen_bool(0.35)) {
            let q = quantifier(&mut self.rng);
            if !fo.is_empty() && so.len() < 2 && self.rng.gen_bool(0.3) {
                let name = format!("R{}", so.len());
                let arity = self.rng.gen_range(1..=max_arity);
                so.push((name.clone(), arity));
                let body = self.sentence_body(fo, so, max_arity, depth.saturating_sub(1));
                so.pop();
                return Formula::quant(q, Binder::Second { name, arity }, body);
            }
            let name = format!("x{}", fo.len());
            fo.push(name.clone());
            let body = self.sentence_body(fo, so, max_arity, depth.saturating_sub(1));
            fo.pop();
            return Formula::quant(q, Binder::First(name), body);
        }
        if depth == 0 || self.rng.gen_bool(0.3) {
            return self.atom(fo, so);
        }
        let mut sub = |c: &mut Corpus| c.sentence_body(fo, so, max_arity, depth - 1);
        match self.rng.gen_range(0..5) {
            0 => Formula::not(sub(self)),
            1 => Formula::and(vec![sub(self), sub(self)]),
            2 => Formula::or(vec![sub(self), sub(self)]),
            3 => Formula::implies(sub(self), sub(self)),
            _ => Formula::iff(sub(self), sub(self)),
        }
    }

    fn atom(&mut self, fo: &[String], so: &[(String, usize)]) -> Formula {
        let pick = |rng: &mut ChaCha8Rng, k: usize| -> Vec<String> {
            (0..k).map(|_| fo.choose(rng).expect("some variable is bound").clone()).collect()
        };
        match self.rng.gen_range(0..3) {
            0 => Formula::rel(EDGE, &pick(&mut self.rng, 2)),
            1 => {
                let args = pick(&mut self.rng, 2);
                Formula::eq(&args[0], &args[1])
            }
            _ => {
                let (name, arity) = so.choose(&mut self.rng).expect("a second-order binder is open");
                Formula::so(name, &pick(&mut self.rng, *arity))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::analyze;

    #[test]
    fn seeds_are_reproducible() {
        let (mut a, mut b) = (Corpus::new(3), Corpus::new(3));
        for _ in 0..20 {
            assert_eq!(a.qbf(3, 6), b.qbf(3, 6));
            assert_eq!(a.grounded(8), b.grounded(8));
            assert_eq!(a.so_sentence(2), b.so_sentence(2));
        }
    }

    #[test]
    fn qbfs_respect_the_limits() {
        let mut c = Corpus::new(QBF_SEED);
        for _ in 0..200 {
            let q = c.qbf(3, 6);
            assert!(q.blocks().len() <= 3 && q.var_count() <= 6);
            assert!(q.starts_existential());
        }
    }

    #[test]
    fn sentences_are_closed_and_low_arity() {
        let mut c = Corpus::new(SENTENCE_SEED);
        for _ in 0..100 {
            let stats = analyze(&c.so_sentence(2));
            assert!(stats.is_sentence());
            assert!((1..=2).contains(&stats.max_so_arity));
        }
    }

    #[test]
    fn grounded_formulas_stay_small() {
        let mut c = Corpus::new(GROUNDED_SEED);
        for _ in 0..50 {
            assert!(c.grounded(16).var_count() <= 16);
        }
    }
}
