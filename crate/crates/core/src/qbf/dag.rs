//! Hash-consed negation-normal formulas, prenexing and Tseitin encoding,
//! shared by the solver and the QDIMACS exporter.

use std::collections::HashMap;

use crate::logic::Quantifier;

use super::sat::{Lit, SatSolver};
use super::QNode;

pub(super) type NodeId = u32;

pub(super) const TRUE_ID: NodeId = 0;
pub(super) const FALSE_ID: NodeId = 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(super) enum Node {
    Const(bool),
    Lit(u32, bool),
    And(Box<[NodeId]>),
    Or(Box<[NodeId]>),
    Iff(NodeId, NodeId),
}

/// Negation-normal formulas, structurally shared.
#[derive(Default)]
pub(super) struct Dag {
    pub(super) nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
    neg: HashMap<NodeId, NodeId>,
    next_var: u32,
}

impl Dag {
    pub(super) fn new() -> Dag {
        let mut d = Dag::default();
        d.intern(Node::Const(true));
        d.intern(Node::Const(false));
        d.neg.insert(TRUE_ID, FALSE_ID);
        d.neg.insert(FALSE_ID, TRUE_ID);
        d
    }

    fn intern(&mut self, n: Node) -> NodeId {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(n.clone());
        self.index.insert(n, id);
        id
    }

    pub(super) fn fresh_var(&mut self) -> u32 {
        self.next_var += 1;
        self.next_var - 1
    }

    pub(super) fn constant(b: bool) -> NodeId {
        if b {
            TRUE_ID
        } else {
            FALSE_ID
        }
    }

    pub(super) fn as_const(&self, id: NodeId) -> Option<bool> {
        match id {
            TRUE_ID => Some(true),
            FALSE_ID => Some(false),
            _ => None,
        }
    }

    pub(super) fn lit(&mut self, v: u32, positive: bool) -> NodeId {
        self.intern(Node::Lit(v, positive))
    }

    pub(super) fn junction(&mut self, ids: impl IntoIterator<Item = NodeId>, conj: bool) -> NodeId {
        let neutral = Dag::constant(conj);
        let absorbing = Dag::constant(!conj);
        let mut out = Vec::new();
        for id in ids {
            match &self.nodes[id as usize] {
                Node::And(cs) if conj => out.extend(cs.iter().copied()),
                Node::Or(cs) if !conj => out.extend(cs.iter().copied()),
                _ => out.push(id),
            }
        }
        if out.contains(&absorbing) {
            return absorbing;
        }
        out.retain(|&c| c != neutral);
        out.sort_unstable();
        out.dedup();
        let complementary = out.iter().any(|c| {
            self.neg.get(c).is_some_and(|n| out.binary_search(n).is_ok())
                || matches!(self.nodes[*c as usize], Node::Lit(v, p)
                    if self.index.get(&Node::Lit(v, !p)).is_some_and(|n| out.binary_search(n).is_ok()))
        });
        if complementary {
            return absorbing;
        }
        match out.len() {
            0 => neutral,
            1 => out[0],
            _ if conj => self.intern(Node::And(out.into())),
            _ => self.intern(Node::Or(out.into())),
        }
    }

    pub(super) fn and(&mut self, ids: impl IntoIterator<Item = NodeId>) -> NodeId {
        self.junction(ids, true)
    }

    pub(super) fn or(&mut self, ids: impl IntoIterator<Item = NodeId>) -> NodeId {
        self.junction(ids, false)
    }

    pub(super) fn iff(&mut self, a: NodeId, b: NodeId) -> NodeId {
        match (self.as_const(a), self.as_const(b)) {
            (Some(x), Some(y)) => return Dag::constant(x == y),
            (Some(true), None) => return b,
            (None, Some(true)) => return a,
            (Some(false), None) => return self.negate(b),
            (None, Some(false)) => return self.negate(a),
            (None, None) => {}
        }
        if a == b {
            return TRUE_ID;
        }
        if self.neg.get(&a) == Some(&b) {
            return FALSE_ID;
        }
        self.intern(Node::Iff(a.min(b), a.max(b)))
    }

    pub(super) fn negate(&mut self, id: NodeId) -> NodeId {
        if let Some(&n) = self.neg.get(&id) {
            return n;
        }
        let n = match self.nodes[id as usize].clone() {
            Node::Const(b) => Dag::constant(!b),
            Node::Lit(v, p) => self.lit(v, !p),
            Node::And(cs) => {
                let ns: Vec<NodeId> = cs.iter().map(|&c| self.negate(c)).collect();
                self.or(ns)
            }
            Node::Or(cs) => {
                let ns: Vec<NodeId> = cs.iter().map(|&c| self.negate(c)).collect();
                self.and(ns)
            }
            Node::Iff(a, b) => {
                let na = self.negate(a);
                self.iff(na, b)
            }
        };
        self.neg.insert(id, n);
        self.neg.insert(n, id);
        n
    }

    /// Replaces each variable in `sub` by the node it maps to.
    pub(super) fn substitute(
        &mut self,
        id: NodeId,
        sub: &HashMap<u32, NodeId>,
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> NodeId {
        if let Some(&r) = memo.get(&id) {
            return r;
        }
        let r = match self.nodes[id as usize].clone() {
            Node::Const(_) => id,
            Node::Lit(v, p) => match sub.get(&v) {
                Some(&n) if p => n,
                Some(&n) => self.negate(n),
                None => id,
            },
            Node::And(cs) => {
                let ns: Vec<NodeId> = cs.iter().map(|&c| self.substitute(c, sub, memo)).collect();
                self.and(ns)
            }
            Node::Or(cs) => {
                let ns: Vec<NodeId> = cs.iter().map(|&c| self.substitute(c, sub, memo)).collect();
                self.or(ns)
            }
            Node::Iff(a, b) => {
                let (x, y) = (self.substitute(a, sub, memo), self.substitute(b, sub, memo));
                self.iff(x, y)
            }
        };
        memo.insert(id, r);
        r
    }
}

fn level_kind(level: usize) -> Quantifier {
    if level.is_multiple_of(2) {
        Quantifier::Exists
    } else {
        Quantifier::Forall
    }
}

/// Builds the negation-normal matrix of a tree while recording binders
/// both by alternation level and in left-to-right order. The first binding
/// of a tree variable keeps its index; later bindings of the same variable,
/// made when a quantified biconditional is split into two copies, get fresh
/// variables.
struct Prenexer<'a> {
    dag: &'a mut Dag,
    levels: Vec<Vec<u32>>,
    order: Vec<(Quantifier, Vec<u32>)>,
    env: Vec<u32>,
    used: Vec<bool>,
}

impl Prenexer<'_> {
    fn build(&mut self, n: &QNode, neg: bool, level: usize) -> NodeId {
        match n {
            QNode::Const(b) => Dag::constant(b ^ neg),
            QNode::Var(v) => self.dag.lit(self.env[*v as usize], !neg),
            QNode::Not(a) => self.build(a, !neg, level),
            QNode::And(cs) | QNode::Or(cs) => {
                let ids: Vec<NodeId> = cs.iter().map(|c| self.build(c, neg, level)).collect();
                let conj = matches!(n, QNode::And(_)) != neg;
                self.dag.junction(ids, conj)
            }
            QNode::Iff(a, b) if !a.has_quantifier() && !b.has_quantifier() => {
                let x = self.build(a, false, level);
                let y = self.build(b, neg, level);
                self.dag.iff(x, y)
            }
            QNode::Iff(a, b) => {
                // a ↔ b is (¬a ∨ b) ∧ (a ∨ ¬b); its negation (a ∨ b) ∧ (¬a ∨ ¬b).
                let first = [self.build(a, !neg, level), self.build(b, false, level)];
                let second = [self.build(a, neg, level), self.build(b, true, level)];
                let c1 = self.dag.or(first);
                let c2 = self.dag.or(second);
                self.dag.and([c1, c2])
            }
            QNode::Quant { quantifier, vars, body } => {
                let eff = if neg { quantifier.dual() } else { *quantifier };
                let lvl = if eff == level_kind(level) { level } else { level + 1 };
                if self.levels.len() <= lvl {
                    self.levels.resize(lvl + 1, Vec::new());
                }
                let saved: Vec<u32> = vars.iter().map(|&v| self.env[v as usize]).collect();
                let mut bound = Vec::with_capacity(vars.len());
                for &v in vars {
                    let id = if std::mem::replace(&mut self.used[v as usize], true) { self.dag.fresh_var() } else { v };
                    self.env[v as usize] = id;
                    self.levels[lvl].push(id);
                    bound.push(id);
                }
                self.order.push((eff, bound));
                let r = self.build(body, neg, lvl);
                for (&v, s) in vars.iter().zip(saved) {
                    self.env[v as usize] = s;
                }
                r
            }
        }
    }
}

pub(super) type Prefix = Vec<(Quantifier, Vec<u32>)>;

/// Drops empty blocks and merges neighbours of equal polarity.
pub(super) fn normalize(blocks: impl IntoIterator<Item = (Quantifier, Vec<u32>)>) -> Prefix {
    let mut out: Prefix = Vec::new();
    for (q, vars) in blocks {
        if vars.is_empty() {
            continue;
        }
        match out.last_mut() {
            Some((lq, lv)) if *lq == q => lv.extend(vars),
            _ => out.push((q, vars)),
        }
    }
    out
}

/// A prenex form of a closed tree.
pub(super) struct Prenex {
    /// Blocks by alternation level, outermost first.
    pub(super) by_level: Prefix,
    /// Blocks in left-to-right order of the binders in the tree.
    pub(super) by_position: Prefix,
    pub(super) matrix: NodeId,
}

/// Tree variables keep their indices in the result, so `dag` must be fresh
/// and `var_count` must cover every index in the tree.
pub(super) fn prenex(dag: &mut Dag, root: &QNode, var_count: usize) -> Prenex {
    dag.next_var = dag.next_var.max(var_count as u32);
    let mut p = Prenexer {
        dag,
        levels: Vec::new(),
        order: Vec::new(),
        env: vec![u32::MAX; var_count],
        used: vec![false; var_count],
    };
    let matrix = p.build(root, false, 0);
    let levels = std::mem::take(&mut p.levels);
    let order = std::mem::take(&mut p.order);
    Prenex {
        by_level: normalize(levels.into_iter().enumerate().map(|(i, vs)| (level_kind(i), vs))),
        by_position: normalize(order),
        matrix,
    }
}

/// Receiver of Tseitin clauses.
pub(super) trait ClauseSink {
    fn new_var(&mut self) -> u32;
    fn add_clause(&mut self, lits: &[Lit]);
}

impl ClauseSink for SatSolver {
    fn new_var(&mut self) -> u32 {
        SatSolver::new_var(self)
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        SatSolver::add_clause(self, lits);
    }
}

/// Full Tseitin encoding of DAG nodes; every node gets a defining literal
/// exactly once per encoder.
pub(super) struct Encoder<S> {
    pub(super) solver: S,
    lits: HashMap<NodeId, Lit>,
    /// DAG variable to sink variable.
    pub(super) vars: HashMap<u32, u32>,
}

impl<S: ClauseSink> Encoder<S> {
    pub(super) fn new(solver: S) -> Encoder<S> {
        Encoder { solver, lits: HashMap::new(), vars: HashMap::new() }
    }

    pub(super) fn encode(&mut self, dag: &Dag, id: NodeId) -> Lit {
        if let Some(&l) = self.lits.get(&id) {
            return l;
        }
        let l = match &dag.nodes[id as usize] {
            Node::Const(b) => {
                let t = Lit::new(self.solver.new_var(), true);
                self.solver.add_clause(&[t]);
                self.lits.insert(TRUE_ID, t);
                self.lits.insert(FALSE_ID, !t);
                return if *b { t } else { !t };
            }
            Node::Lit(v, p) => {
                let solver = &mut self.solver;
                let sv = *self.vars.entry(*v).or_insert_with(|| solver.new_var());
                Lit::new(sv, *p)
            }
            Node::And(cs) | Node::Or(cs) => {
                let conj = matches!(dag.nodes[id as usize], Node::And(_));
                let ls: Vec<Lit> = cs.iter().map(|&c| self.encode(dag, c)).collect();
                let x = Lit::new(self.solver.new_var(), conj);
                // For a disjunction x is the negated output, so one shape fits both.
                for &l in &ls {
                    let l = if conj { l } else { !l };
                    self.solver.add_clause(&[!x, l]);
                }
                let mut big: Vec<Lit> = ls.iter().map(|&l| if conj { !l } else { l }).collect();
                big.push(x);
                self.solver.add_clause(&big);
                if conj {
                    x
                } else {
                    !x
                }
            }
            &Node::Iff(a, b) => {
                let (la, lb) = (self.encode(dag, a), self.encode(dag, b));
                let x = Lit::new(self.solver.new_var(), true);
                self.solver.add_clause(&[!x, !la, lb]);
                self.solver.add_clause(&[!x, la, !lb]);
                self.solver.add_clause(&[x, la, lb]);
                self.solver.add_clause(&[x, !la, !lb]);
                x
            }
        };
        self.lits.insert(id, l);
        l
    }
}
