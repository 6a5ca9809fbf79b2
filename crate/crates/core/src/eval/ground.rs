//! Compilation of formulas without third-order quantifiers into grounded
//! QBFs.

use std::collections::HashMap;

use crate::logic::{analyze, Binder, Formula, Quantifier, Term};
use crate::qbf::{solve_qbf_tree_within, GroundedQbf, QNode, QbfError, VarInfo};
use crate::structures::{Element, FiniteStructure};

use super::{all_tuples, lex_index, Budget, Environment, EvalError, Order, Resource};

enum SoSlot {
    /// Boolean variables `base + lex_index(tuple)`.
    Grounded { base: u32, arity: usize },
    /// A relation fixed by the environment, one bit per tuple.
    Fixed { arity: usize, bits: Vec<bool> },
}

impl SoSlot {
    fn arity(&self) -> usize {
        match self {
            SoSlot::Grounded { arity, .. } | SoSlot::Fixed { arity, .. } => *arity,
        }
    }
}

struct Grounder<'a> {
    s: &'a FiniteStructure,
    n: usize,
    order: Order,
    fo: HashMap<String, Vec<Element>>,
    so: HashMap<String, Vec<SoSlot>>,
    vars: Vec<VarInfo>,
    instances: HashMap<String, u32>,
    visited: u64,
    limit: u64,
}

impl Grounder<'_> {
    fn visit(&mut self) -> Result<(), EvalError> {
        self.visited += 1;
        if self.visited > self.limit {
            return Err(EvalError::BudgetExceeded { resource: Resource::GroundNodes, limit: self.limit });
        }
        Ok(())
    }

    fn term(&self, t: &Term) -> Result<Element, EvalError> {
        match t {
            Term::Var(x) => self.fo.get(x).and_then(|s| s.last()).copied(),
            Term::Const(c) => self.s.constant(c),
        }
        .ok_or_else(|| EvalError::Unbound(t.name().to_string()))
    }

    fn atom(&self, name: &str, args: &[Term]) -> Result<QNode, EvalError> {
        let t = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
        if let Some(slot) = self.so.get(name).and_then(|s| s.last()) {
            if slot.arity() != t.len() {
                return Err(EvalError::Arity { name: name.to_string(), expected: slot.arity(), found: t.len() });
            }
            let i = lex_index(&t, self.n);
            return Ok(match slot {
                SoSlot::Grounded { base, .. } => QNode::Var(base + i as u32),
                SoSlot::Fixed { bits, .. } => QNode::Const(bits[i]),
            });
        }
        let vocab = self.s.vocabulary();
        let i = vocab.relation_index(name).ok_or_else(|| EvalError::UnknownRelation(name.to_string()))?;
        let arity = vocab.relations()[i].arity;
        if arity != t.len() {
            return Err(EvalError::Arity { name: name.to_string(), expected: arity, found: t.len() });
        }
        Ok(QNode::Const(self.s.holds_at(i, &t)))
    }

    fn elements(&self) -> Vec<Element> {
        match self.order {
            Order::Forward => (0..self.n).collect(),
            Order::Reverse => (0..self.n).rev().collect(),
        }
    }

    /// Conjunction (`conj`) or disjunction of parts, stopping at the first
    /// absorbing constant.
    fn junction(
        &mut self,
        conj: bool,
        count: usize,
        mut part: impl FnMut(&mut Self, usize) -> Result<QNode, EvalError>,
    ) -> Result<QNode, EvalError> {
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            match part(self, i)? {
                QNode::Const(b) if b != conj => return Ok(QNode::Const(b)),
                QNode::Const(_) => {}
                node => out.push(node),
            }
        }
        Ok(if conj { QNode::and(out) } else { QNode::or(out) })
    }

    fn ground(&mut self, f: &Formula) -> Result<QNode, EvalError> {
        self.visit()?;
        match f {
            Formula::Rel { name, args } | Formula::SoAtom { var: name, args } => self.atom(name, args),
            Formula::ToAtom { .. } => Err(EvalError::Unsupported("third-order atoms cannot be grounded".into())),
            Formula::Eq(a, b) => Ok(QNode::Const(self.term(a)? == self.term(b)?)),
            Formula::Not(a) => Ok(QNode::not(self.ground(a)?)),
            Formula::And(fs) => self.junction(true, fs.len(), |g, i| g.ground(&fs[i])),
            Formula::Or(fs) => self.junction(false, fs.len(), |g, i| g.ground(&fs[i])),
            Formula::Implies(a, b) => {
                let x = self.ground(a)?;
                if x == QNode::Const(false) {
                    return Ok(QNode::Const(true));
                }
                Ok(QNode::or([QNode::not(x), self.ground(b)?]))
            }
            Formula::Iff(a, b) => {
                let x = self.ground(a)?;
                Ok(QNode::iff(x, self.ground(b)?))
            }
            Formula::Quant { q, binder, body } => self.quantify(*q, binder, body),
        }
    }

    fn quantify(&mut self, q: Quantifier, binder: &Binder, body: &Formula) -> Result<QNode, EvalError> {
        match binder {
            Binder::First(x) => {
                let elems = self.elements();
                self.junction(q == Quantifier::Forall, elems.len(), |g, i| {
                    g.fo.entry(x.clone()).or_default().push(elems[i]);
                    let r = g.ground(body);
                    g.fo.get_mut(x).expect("pushed above").pop();
                    r
                })
            }
            Binder::Second { name, arity } => {
                let count = self
                    .n
                    .checked_pow(*arity as u32)
                    .filter(|&c| c as u64 <= self.limit)
                    .ok_or(EvalError::BudgetExceeded { resource: Resource::GroundNodes, limit: self.limit })?;
                let instance = self.instances.entry(name.clone()).or_insert(0);
                let inst = *instance;
                *instance += 1;
                let base = self.vars.len() as u32;
                for t in all_tuples(self.n, *arity) {
                    self.vars.push(VarInfo::grounded(name, t, inst));
                }
                let mut vars: Vec<u32> = (base..base + count as u32).collect();
                if self.order == Order::Reverse {
                    vars.reverse();
                }
                self.so.entry(name.clone()).or_default().push(SoSlot::Grounded { base, arity: *arity });
                let r = self.ground(body);
                self.so.get_mut(name).expect("pushed above").pop();
                Ok(QNode::quant(q, vars, r?))
            }
            Binder::Third { .. } => Err(EvalError::Unsupported("third-order quantifiers cannot be grounded".into())),
        }
    }
}

/// Grounds a sentence without third-order quantifiers.
pub fn ground(s: &FiniteStructure, f: &Formula, budget: Budget) -> Result<GroundedQbf, EvalError> {
    ground_with(s, f, &Environment::new(), budget, Order::Forward)
}

/// Grounds `f` with its free variables fixed by `env`. First-order
/// quantifiers expand to conjunctions or disjunctions over the domain; a
/// second-order quantifier of arity `k` becomes one Boolean quantifier
/// node over `n^k` variables named `X@(t1,…,tk)`. Vocabulary atoms and
/// equalities become constants.
pub fn ground_with(
    s: &FiniteStructure,
    f: &Formula,
    env: &Environment,
    budget: Budget,
    order: Order,
) -> Result<GroundedQbf, EvalError> {
    if f.has_third_order() {
        return Err(EvalError::Unsupported("grounding needs a formula without third-order variables".into()));
    }
    let n = s.size();
    env.check_domain(n)?;
    let stats = analyze(f);
    if let Some(x) = stats.free_fo_vars.iter().find(|x| env.element(x).is_none()) {
        return Err(EvalError::Precondition(format!("free variable {x} has no value")));
    }
    let vocab = s.vocabulary();
    if let Some((r, _)) =
        stats.free_so_vars.iter().find(|(r, _)| !env.relations().contains_key(*r) && vocab.relation_index(r).is_none())
    {
        return Err(EvalError::Precondition(format!("free relation variable {r} has no value")));
    }
    let mut g = Grounder {
        s,
        n,
        order,
        fo: env.elements().iter().map(|(k, &v)| (k.clone(), vec![v])).collect(),
        so: HashMap::new(),
        vars: Vec::new(),
        instances: HashMap::new(),
        visited: 0,
        limit: budget.max_ground_nodes,
    };
    for (name, (arity, tuples)) in env.relations() {
        let mut bits = vec![false; n.pow(*arity as u32)];
        for t in tuples {
            bits[lex_index(t, n)] = true;
        }
        g.so.insert(name.clone(), vec![SoSlot::Fixed { arity: *arity, bits }]);
    }
    let root = g.ground(f)?;
    Ok(GroundedQbf::compacted(g.vars, root).expect("grounding binds each variable once"))
}

fn solve(g: &GroundedQbf, budget: Budget) -> Result<bool, EvalError> {
    solve_qbf_tree_within(g, budget.max_candidates).map_err(|e| match e {
        QbfError::BudgetExceeded { limit } => EvalError::BudgetExceeded { resource: Resource::Candidates, limit },
        other => EvalError::Unsupported(other.to_string()),
    })
}

/// Truth value of a sentence through grounding and QBF solving.
pub fn eval_grounded(s: &FiniteStructure, f: &Formula, budget: Budget) -> Result<bool, EvalError> {
    solve(&ground(s, f, budget)?, budget)
}

/// As [`eval_grounded`], with free variables fixed by `env`.
pub fn eval_grounded_with(
    s: &FiniteStructure,
    f: &Formula,
    env: &Environment,
    budget: Budget,
) -> Result<bool, EvalError> {
    solve(&ground_with(s, f, env, budget, Order::Forward)?, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::qbf::solve_qbf_tree;
    use crate::structures::{generate, Family, Vocabulary};

    #[test]
    fn grounding_examples() {
        let s = FiniteStructure::empty(Vocabulary::graph(), 2).unwrap();
        let f = parse_formula("(ex2 A 1 (ex1 x (var2 A x)))").unwrap();
        let g = ground(&s, &f, Budget::default()).unwrap();
        assert_eq!(g.to_string(), "∃A@(0) ∃A@(1) (A@(0) ∨ A@(1))");
        assert!(solve_qbf_tree(&g));
        let f = parse_formula("(all2 A 1 (ex1 x (var2 A x)))").unwrap();
        let g = ground(&s, &f, Budget::default()).unwrap();
        assert_eq!(g.to_string(), "∀A@(0) ∀A@(1) (A@(0) ∨ A@(1))");
        assert!(!solve_qbf_tree(&g));
    }

    #[test]
    fn provenance_and_instances() {
        let s = generate(Family::Cycle(3)).unwrap();
        let f = parse_formula("(all1 x (ex2 B 1 (var2 B x)))").unwrap();
        let g = ground(&s, &f, Budget::default()).unwrap();
        assert_eq!(g.var_count(), 9);
        let p = g.vars()[4].provenance.as_ref().unwrap();
        assert_eq!((p.so_var.as_str(), p.tuple.as_slice(), p.instance), ("B", &[1][..], 1));
        assert_eq!(g.vars()[4].name, "B@(1)#1");
    }

    #[test]
    fn unsupported_and_preconditions() {
        let s = generate(Family::Cycle(3)).unwrap();
        let to = parse_formula("(ex3 C (1) (ex2 X 1 (var3 C X)))").unwrap();
        assert!(matches!(ground(&s, &to, Budget::default()), Err(EvalError::Unsupported(_))));
        let free = parse_formula("(rel E x x)").unwrap();
        assert!(matches!(ground(&s, &free, Budget::default()), Err(EvalError::Precondition(_))));
    }

    #[test]
    fn node_budget() {
        let s = generate(Family::Complete(6)).unwrap();
        let f = parse_formula("(all1 a (all1 b (all1 c (all1 d (or (rel E a b) (rel E c d) (eq a b) (eq c d))))))")
            .unwrap();
        let r = ground(&s, &f, Budget { max_candidates: 1, max_ground_nodes: 100 });
        assert!(matches!(r, Err(EvalError::BudgetExceeded { resource: Resource::GroundNodes, .. })));
    }
}
