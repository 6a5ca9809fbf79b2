//! Solving grounded QBFs.
//!
//! The tree is negation-normalized into a hash-consed DAG and prenexed by
//! levels: a binder joins the block of its nearest enclosing binder when the
//! effective quantifiers agree and opens the next block otherwise. The
//! prenex form is solved by recursive counterexample-guided abstraction
//! refinement: the player of the outer block proposes a move against a
//! growing set of opponent replies, and each winning reply is folded back
//! into the abstraction with fresh copies of the inner variables. Purely
//! propositional games go to the CDCL solver through a Tseitin encoding.

use std::collections::HashMap;

use crate::logic::Quantifier;

use super::dag::{normalize, prenex, Dag, Encoder, NodeId, Prefix};
use super::sat::{SatResult, SatSolver};
use super::{GroundedQbf, QbfError};

type Move = HashMap<u32, bool>;

fn model(enc: &Encoder<SatSolver>, vars: &[u32]) -> Move {
    vars.iter().map(|v| (*v, enc.vars.get(v).is_some_and(|&s| enc.solver.model_value(s)))).collect()
}

/// Work counter shared by all SAT calls and refinement rounds.
struct Work {
    used: u64,
    limit: u64,
}

impl Work {
    fn charge(&mut self, amount: u64) -> Result<(), QbfError> {
        self.used = self.used.saturating_add(amount);
        if self.used > self.limit {
            Err(QbfError::BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }

    fn remaining(&self) -> u64 {
        self.limit.saturating_sub(self.used)
    }
}

struct Cegar<'a> {
    dag: &'a mut Dag,
    work: Work,
}

impl Cegar<'_> {
    fn run_sat(&mut self, enc: &mut Encoder<SatSolver>) -> Result<bool, QbfError> {
        let before = enc.solver.conflicts();
        enc.solver.set_conflict_budget(Some(before.saturating_add(self.work.remaining()).saturating_add(1)));
        let r = enc.solver.solve();
        self.work.charge(enc.solver.conflicts() - before)?;
        match r {
            SatResult::Sat => Ok(true),
            SatResult::Unsat => Ok(false),
            SatResult::Unknown => Err(QbfError::BudgetExceeded { limit: self.work.limit }),
        }
    }

    fn sat(&mut self, matrix: NodeId, want: bool, vars: &[u32]) -> Result<Option<Move>, QbfError> {
        let mut enc = Encoder::new(SatSolver::new());
        let root = enc.encode(self.dag, matrix);
        enc.solver.add_clause(&[if want { root } else { !root }]);
        Ok(if self.run_sat(&mut enc)? { Some(model(&enc, vars)) } else { None })
    }

    /// A winning move for the player of the first block, if one exists.
    fn solve(&mut self, blocks: &[(Quantifier, Vec<u32>)], matrix: NodeId) -> Result<Option<Move>, QbfError> {
        let (player, own) = &blocks[0];
        let want = *player == Quantifier::Exists;
        if let Some(c) = self.dag.as_const(matrix) {
            return Ok((c == want).then(|| own.iter().map(|&v| (v, false)).collect()));
        }
        if blocks.len() == 1 {
            return self.sat(matrix, want, own);
        }
        let mut abstraction: Prefix = vec![(*player, own.clone())];
        abstraction.extend(blocks.iter().skip(3).map(|(q, _)| (*q, Vec::new())));
        let mut incremental = (blocks.len() <= 3).then(|| Encoder::new(SatSolver::new()));
        let mut instances: Vec<NodeId> = Vec::new();
        loop {
            self.work.charge(1)?;
            let candidate = match incremental.as_mut() {
                Some(enc) => {
                    if self.run_sat(enc)? {
                        Some(model(enc, own))
                    } else {
                        None
                    }
                }
                None => {
                    let m = self.dag.junction(instances.iter().copied(), want);
                    let abs = normalize(abstraction.iter().cloned());
                    self.solve(&abs, m)?
                }
            };
            let Some(candidate) = candidate else { return Ok(None) };
            let tau: HashMap<u32, NodeId> = own.iter().map(|v| (*v, Dag::constant(candidate[v]))).collect();
            let reduced = self.dag.substitute(matrix, &tau, &mut HashMap::new());
            let Some(reply) = self.solve(&blocks[1..], reduced)? else {
                return Ok(Some(own.iter().map(|v| (*v, candidate[v])).collect()));
            };
            let mut sub: HashMap<u32, NodeId> = blocks[1].1.iter().map(|v| (*v, Dag::constant(reply[v]))).collect();
            for (k, (_, vars)) in blocks.iter().enumerate().skip(2) {
                for &v in vars {
                    let fresh = self.dag.fresh_var();
                    abstraction[k - 2].1.push(fresh);
                    let lit = self.dag.lit(fresh, true);
                    sub.insert(v, lit);
                }
            }
            let inst = self.dag.substitute(matrix, &sub, &mut HashMap::new());
            match incremental.as_mut() {
                Some(enc) => {
                    let l = enc.encode(self.dag, inst);
                    enc.solver.add_clause(&[if want { l } else { !l }]);
                }
                None => instances.push(inst),
            }
        }
    }
}

/// Truth value of `g`; runs until decided.
pub fn solve_qbf_tree(g: &GroundedQbf) -> bool {
    solve_qbf_tree_within(g, u64::MAX).expect("an unlimited budget cannot run out")
}

/// Truth value of `g`, or [`QbfError::BudgetExceeded`] once the SAT
/// conflicts plus refinement rounds pass `limit`. The cut-off point is a
/// deterministic function of the input.
pub fn solve_qbf_tree_within(g: &GroundedQbf, limit: u64) -> Result<bool, QbfError> {
    let mut dag = Dag::new();
    let p = prenex(&mut dag, g.root(), g.var_count());
    let (prefix, matrix) = (p.by_level, p.matrix);
    if prefix.is_empty() {
        return Ok(dag.as_const(matrix).expect("a closed matrix without binders is constant"));
    }
    let first = prefix[0].0;
    let mut cegar = Cegar { dag: &mut dag, work: Work { used: 0, limit } };
    let wins = cegar.solve(&prefix, matrix)?.is_some();
    Ok(wins == (first == Quantifier::Exists))
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};

    use super::super::{parse_qbf, solve_recursive, QNode, VarInfo};
    use super::*;

    fn q(quantifier: Quantifier, vars: Vec<u32>, body: QNode) -> QNode {
        QNode::quant(quantifier, vars, body)
    }

    fn table(n: usize) -> Vec<VarInfo> {
        (0..n).map(|i| VarInfo::named(format!("b{i}"))).collect()
    }

    #[test]
    fn small_examples() {
        let e = Quantifier::Exists;
        let a = Quantifier::Forall;
        let g = GroundedQbf::new(table(1), q(e, vec![0], QNode::Var(0))).unwrap();
        assert!(solve_qbf_tree(&g));
        let g = GroundedQbf::new(table(1), q(a, vec![0], QNode::Var(0))).unwrap();
        assert!(!solve_qbf_tree(&g));
        // ∀a∃b with a ↔ b written through ∧, ∨ and ¬.
        let iff = QNode::or([
            QNode::and([QNode::Var(0), QNode::Var(1)]),
            QNode::and([QNode::not(QNode::Var(0)), QNode::not(QNode::Var(1))]),
        ]);
        let g = GroundedQbf::new(table(2), q(a, vec![0], q(e, vec![1], iff))).unwrap();
        assert!(solve_qbf_tree(&g));
    }

    #[test]
    fn quantifier_under_negation_and_biconditional() {
        let e = Quantifier::Exists;
        // ¬∃a(a) is false; (∃a a) ↔ (∀b b) is false.
        let g = GroundedQbf::new(table(1), QNode::not(q(e, vec![0], QNode::Var(0)))).unwrap();
        assert!(!solve_qbf_tree(&g));
        let body =
            QNode::Iff(Box::new(q(e, vec![0], QNode::Var(0))), Box::new(q(Quantifier::Forall, vec![1], QNode::Var(1))));
        let g = GroundedQbf::new(table(2), body).unwrap();
        assert!(!solve_qbf_tree(&g));
    }

    #[test]
    fn agrees_with_recursive_oracle_on_prenex_formulas() {
        for text in [
            "E x1 A x2 ((!x1)|x2)",
            "A x1 E x2 (x1&x2)",
            "E x1 (x1&(!x1))",
            "A x1 E x2 A x3 E x4 (((x1|x2)&((!x3)|x4))&((!x2)|(!x4)))",
        ] {
            let ast = parse_qbf(text).unwrap();
            let g = GroundedQbf::from_ast(&ast);
            assert_eq!(solve_qbf_tree(&g), solve_recursive(&ast).unwrap(), "{text}");
        }
    }

    fn random_node(rng: &mut impl Rng, depth: u32, free: &mut Vec<u32>, next: &mut u32) -> QNode {
        let leaf = depth == 0 || rng.gen_bool(0.25);
        if leaf {
            return match free.len() {
                0 => QNode::Const(rng.gen_bool(0.5)),
                n => QNode::Var(free[rng.gen_range(0..n)]),
            };
        }
        match rng.gen_range(0..6) {
            0 => QNode::Not(Box::new(random_node(rng, depth - 1, free, next))),
            1 | 2 => {
                let cs = (0..rng.gen_range(2..4)).map(|_| random_node(rng, depth - 1, free, next)).collect();
                if rng.gen_bool(0.5) {
                    QNode::And(cs)
                } else {
                    QNode::Or(cs)
                }
            }
            3 => QNode::Iff(
                Box::new(random_node(rng, depth - 1, free, next)),
                Box::new(random_node(rng, depth - 1, free, next)),
            ),
            _ => {
                let vars: Vec<u32> = (0..rng.gen_range(1..3)).map(|i| *next + i).collect();
                *next += vars.len() as u32;
                let keep = free.len();
                free.extend(&vars);
                let body = random_node(rng, depth - 1, free, next);
                free.truncate(keep);
                let quantifier = if rng.gen_bool(0.5) { Quantifier::Exists } else { Quantifier::Forall };
                QNode::Quant { quantifier, vars, body: Box::new(body) }
            }
        }
    }

    #[test]
    fn agrees_with_expansion_on_random_trees() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 400 {
            let mut next = 0;
            let root = random_node(&mut rng, 6, &mut Vec::new(), &mut next);
            let Ok(g) = GroundedQbf::compacted(table(next as usize), root) else { continue };
            let Ok(expected) = g.evaluate_by_expansion(20) else { continue };
            assert_eq!(solve_qbf_tree(&g), expected, "{g}");
            checked += 1;
        }
    }

    #[test]
    fn budget_cuts_off_deterministically() {
        let ast = parse_qbf("A x1 E x2 A x3 E x4 (((x1|x2)&((!x3)|x4))&((!x2)|(!x4)))").unwrap();
        let g = GroundedQbf::from_ast(&ast);
        let a = solve_qbf_tree_within(&g, 1);
        assert_eq!(a, solve_qbf_tree_within(&g, 1));
        assert!(matches!(a, Err(QbfError::BudgetExceeded { .. })));
    }
}
