//! QDIMACS documents: export of grounded QBFs, parsing, and a truth-table
//! evaluator that shares no code with the solver.

use std::collections::HashSet;
use std::fmt;

use crate::logic::Quantifier;

use super::dag::{prenex, ClauseSink, Dag, Encoder, Node, FALSE_ID, TRUE_ID};
use super::sat::Lit;
use super::{GroundedQbf, QbfError};

/// Prenex CNF in QDIMACS form. Variables are numbered from 1; literals are
/// signed variable numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QdimacsDoc {
    num_vars: u32,
    prefix: Vec<(Quantifier, Vec<u32>)>,
    clauses: Vec<Vec<i32>>,
}

fn malformed(line: usize, message: impl Into<String>) -> QbfError {
    QbfError::Qdimacs { line, message: message.into() }
}

impl QdimacsDoc {
    /// Checks variable ranges, non-empty alternating blocks and distinct
    /// quantified variables.
    pub fn new(
        num_vars: u32,
        prefix: Vec<(Quantifier, Vec<u32>)>,
        clauses: Vec<Vec<i32>>,
    ) -> Result<QdimacsDoc, QbfError> {
        let mut seen = HashSet::new();
        for (i, (q, vars)) in prefix.iter().enumerate() {
            if vars.is_empty() {
                return Err(malformed(0, "empty quantifier block"));
            }
            if i > 0 && prefix[i - 1].0 == *q {
                return Err(malformed(0, "adjacent blocks share a quantifier"));
            }
            for &v in vars {
                if v == 0 || v > num_vars {
                    return Err(malformed(0, format!("variable {v} out of range")));
                }
                if !seen.insert(v) {
                    return Err(malformed(0, format!("variable {v} quantified twice")));
                }
            }
        }
        for c in &clauses {
            if let Some(l) = c.iter().find(|l| **l == 0 || l.unsigned_abs() > num_vars) {
                return Err(malformed(0, format!("literal {l} out of range")));
            }
        }
        Ok(QdimacsDoc { num_vars, prefix, clauses })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn prefix(&self) -> &[(Quantifier, Vec<u32>)] {
        &self.prefix
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn parse(text: &str) -> Result<QdimacsDoc, QbfError> {
        let mut header: Option<(u32, usize)> = None;
        let mut prefix: Vec<(Quantifier, Vec<u32>)> = Vec::new();
        let mut clauses: Vec<Vec<i32>> = Vec::new();
        let mut current: Vec<i32> = Vec::new();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last_line = line;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('c') {
                continue;
            }
            let mut words = t.split_whitespace();
            let first = words.next().expect("line is non-empty");
            if first == "p" {
                if header.is_some() {
                    return Err(malformed(line, "second header"));
                }
                let rest: Vec<&str> = words.collect();
                let [fmt, v, c] = rest[..] else {
                    return Err(malformed(line, "expected `p cnf VARS CLAUSES`"));
                };
                let (Ok(v), Ok(c)) = (v.parse(), c.parse()) else {
                    return Err(malformed(line, "header counts must be non-negative integers"));
                };
                if fmt != "cnf" {
                    return Err(malformed(line, "expected `p cnf VARS CLAUSES`"));
                }
                header = Some((v, c));
                continue;
            }
            let Some((num_vars, _)) = header else {
                return Err(malformed(line, "content before the header"));
            };
            if first == "e" || first == "a" {
                if !clauses.is_empty() || !current.is_empty() {
                    return Err(malformed(line, "quantifier line after clauses"));
                }
                let q = if first == "e" { Quantifier::Exists } else { Quantifier::Forall };
                let nums = parse_ints(words, line)?;
                let Some((&0, vars)) = nums.split_last() else {
                    return Err(malformed(line, "quantifier line must end with 0"));
                };
                let mut block = Vec::with_capacity(vars.len());
                for &v in vars {
                    if v <= 0 || v as u32 > num_vars {
                        return Err(malformed(line, format!("variable {v} out of range")));
                    }
                    block.push(v as u32);
                }
                if prefix.last().is_some_and(|(lq, _)| *lq == q) {
                    return Err(malformed(line, "adjacent blocks share a quantifier"));
                }
                prefix.push((q, block));
                continue;
            }
            for n in parse_ints(std::iter::once(first).chain(words), line)? {
                if n == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else if n.unsigned_abs() > num_vars {
                    return Err(malformed(line, format!("literal {n} out of range")));
                } else {
                    current.push(n);
                }
            }
        }
        let Some((num_vars, expected)) = header else {
            return Err(malformed(last_line, "missing header"));
        };
        if !current.is_empty() {
            return Err(malformed(last_line, "last clause is not terminated by 0"));
        }
        if clauses.len() != expected {
            return Err(malformed(last_line, format!("header announces {expected} clauses, found {}", clauses.len())));
        }
        QdimacsDoc::new(num_vars, prefix, clauses)
    }

    /// Truth value by branching on variables in prefix order, free
    /// variables first as existentials. A clause is checked as soon as its
    /// last variable in that order is assigned. `node_limit` caps the
    /// number of branches visited.
    pub fn evaluate_by_expansion(&self, node_limit: u64) -> Result<bool, QbfError> {
        let quantified: HashSet<u32> = self.prefix.iter().flat_map(|(_, vs)| vs.iter().copied()).collect();
        let mut order: Vec<(bool, u32)> =
            (1..=self.num_vars).filter(|v| !quantified.contains(v)).map(|v| (true, v)).collect();
        for (q, vs) in &self.prefix {
            order.extend(vs.iter().map(|&v| (*q == Quantifier::Exists, v)));
        }
        let mut position = vec![0usize; self.num_vars as usize + 1];
        for (i, &(_, v)) in order.iter().enumerate() {
            position[v as usize] = i;
        }
        let mut completed: Vec<Vec<usize>> = vec![Vec::new(); order.len()];
        for (ci, c) in self.clauses.iter().enumerate() {
            match c.iter().map(|l| position[l.unsigned_abs() as usize]).max() {
                Some(last) => completed[last].push(ci),
                None => return Ok(false),
            }
        }
        let mut walk = Walk {
            doc: self,
            order,
            completed,
            value: vec![false; self.num_vars as usize + 1],
            visited: 0,
            node_limit,
        };
        walk.branch(0)
    }
}

struct Walk<'a> {
    doc: &'a QdimacsDoc,
    order: Vec<(bool, u32)>,
    completed: Vec<Vec<usize>>,
    value: Vec<bool>,
    visited: u64,
    node_limit: u64,
}

impl Walk<'_> {
    fn branch(&mut self, depth: usize) -> Result<bool, QbfError> {
        if depth == self.order.len() {
            return Ok(true);
        }
        let (existential, v) = self.order[depth];
        for bit in [false, true] {
            self.visited += 1;
            if self.visited > self.node_limit {
                return Err(QbfError::BudgetExceeded { limit: self.node_limit });
            }
            self.value[v as usize] = bit;
            let ok = self.completed[depth]
                .iter()
                .all(|&ci| self.doc.clauses[ci].iter().any(|&l| self.value[l.unsigned_abs() as usize] == (l > 0)))
                && self.branch(depth + 1)?;
            if ok == existential {
                return Ok(existential);
            }
        }
        Ok(!existential)
    }
}

fn parse_ints<'a>(words: impl Iterator<Item = &'a str>, line: usize) -> Result<Vec<i32>, QbfError> {
    words.map(|w| w.parse::<i32>().map_err(|_| malformed(line, format!("not an integer: {w}")))).collect()
}

impl fmt::Display for QdimacsDoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for (q, vars) in &self.prefix {
            f.write_str(if *q == Quantifier::Exists { "e" } else { "a" })?;
            for v in vars {
                write!(f, " {v}")?;
            }
            writeln!(f, " 0")?;
        }
        for c in &self.clauses {
            for l in c {
                write!(f, "{l} ")?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

/// Clause list whose variables continue after the tree variables.
struct ClauseList {
    next: u32,
    clauses: Vec<Vec<i32>>,
}

impl ClauseSink for ClauseList {
    fn new_var(&mut self) -> u32 {
        self.next += 1;
        self.next
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        self.clauses.push(lits.iter().map(signed).collect());
    }
}

fn signed(l: &Lit) -> i32 {
    if l.is_positive() {
        l.var() as i32
    } else {
        -(l.var() as i32)
    }
}

/// Prenexes `g` with binders in left-to-right tree order and converts the
/// matrix to CNF. Tree variable `i` becomes QDIMACS variable `i + 1`.
/// Top-level conjuncts that are literals or disjunctions of literals become
/// clauses directly; the rest go through Tseitin variables, which form an
/// innermost existential block.
pub fn export_qdimacs(g: &GroundedQbf) -> QdimacsDoc {
    let mut dag = Dag::new();
    let p = prenex(&mut dag, g.root(), g.var_count());
    let max_var = p.by_position.iter().flat_map(|(_, vs)| vs.iter().copied()).max().map_or(0, |v| v + 1);
    let mut enc = Encoder::new(ClauseList { next: max_var, clauses: Vec::new() });
    for (_, vs) in &p.by_position {
        for &v in vs {
            enc.vars.insert(v, v + 1);
        }
    }
    let conjuncts: Vec<u32> = match &dag.nodes[p.matrix as usize] {
        Node::And(cs) => cs.to_vec(),
        _ => vec![p.matrix],
    };
    for c in conjuncts {
        match &dag.nodes[c as usize] {
            _ if c == TRUE_ID => {}
            _ if c == FALSE_ID => {
                let t = enc.solver.new_var() as i32;
                enc.solver.clauses.push(vec![t]);
                enc.solver.clauses.push(vec![-t]);
            }
            Node::Lit(v, pos) => enc.solver.clauses.push(vec![literal(*v, *pos)]),
            Node::Or(cs) if cs.iter().all(|&x| matches!(dag.nodes[x as usize], Node::Lit(..))) => {
                let clause = cs
                    .iter()
                    .map(|&x| match dag.nodes[x as usize] {
                        Node::Lit(v, pos) => literal(v, pos),
                        _ => unreachable!("checked above"),
                    })
                    .collect();
                enc.solver.clauses.push(clause);
            }
            _ => {
                let l = enc.encode(&dag, c);
                enc.solver.add_clause(&[l]);
            }
        }
    }
    let ClauseList { next, clauses } = enc.solver;
    let mut prefix: Vec<(Quantifier, Vec<u32>)> =
        p.by_position.into_iter().map(|(q, vs)| (q, vs.into_iter().map(|v| v + 1).collect())).collect();
    let aux: Vec<u32> = (max_var + 1..=next).collect();
    if !aux.is_empty() {
        match prefix.last_mut() {
            Some((Quantifier::Exists, vs)) => vs.extend(aux),
            _ => prefix.push((Quantifier::Exists, aux)),
        }
    }
    QdimacsDoc::new(next, prefix, clauses).expect("export produces well-formed documents")
}

fn literal(v: u32, positive: bool) -> i32 {
    if positive {
        v as i32 + 1
    } else {
        -(v as i32 + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_qbf, QNode, VarInfo};
    use super::*;

    #[test]
    fn exists_forall_disjunction() {
        let root = QNode::quant(
            Quantifier::Exists,
            vec![0],
            QNode::quant(Quantifier::Forall, vec![1], QNode::or([QNode::Var(0), QNode::Var(1)])),
        );
        let g = GroundedQbf::new(vec![VarInfo::named("a"), VarInfo::named("b")], root).unwrap();
        assert_eq!(export_qdimacs(&g).to_string(), "p cnf 2 1\ne 1 0\na 2 0\n1 2 0\n");
    }

    #[test]
    fn contradiction_exports_unsatisfiable_document() {
        let root = QNode::quant(Quantifier::Exists, vec![0], QNode::and([QNode::Var(0), QNode::not(QNode::Var(0))]));
        let g = GroundedQbf::new(vec![VarInfo::named("a")], root).unwrap();
        let doc = export_qdimacs(&g);
        let back = QdimacsDoc::parse(&doc.to_string()).unwrap();
        assert_eq!(back, doc);
        assert!(!back.evaluate_by_expansion(1 << 20).unwrap());
    }

    #[test]
    fn tseitin_variables_trail_a_universal_block() {
        let g = GroundedQbf::from_ast(&parse_qbf("E x1 A x2 ((x1&x2)|((!x1)&(!x2)))").unwrap());
        let doc = export_qdimacs(&g);
        assert_eq!(doc.prefix().last().unwrap().0, Quantifier::Exists);
        assert!(doc.num_vars() > 2);
        assert!(!doc.evaluate_by_expansion(1 << 20).unwrap());
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert!(matches!(QdimacsDoc::parse("p cnf 2 2\ne 1 0\n1 0\n"), Err(QbfError::Qdimacs { .. })));
        assert!(matches!(QdimacsDoc::parse("e 1 0\n"), Err(QbfError::Qdimacs { line: 1, .. })));
        assert!(matches!(QdimacsDoc::parse("p cnf 1 1\n2 0\n"), Err(QbfError::Qdimacs { line: 2, .. })));
        assert!(matches!(QdimacsDoc::parse("p cnf 2 0\ne 1 0\ne 2 0\n"), Err(QbfError::Qdimacs { line: 3, .. })));
    }

    #[test]
    fn free_variables_count_as_outer_existentials() {
        let doc = QdimacsDoc::parse("c comment\np cnf 2 2\na 2 0\n1 2 0\n1 -2 0\n").unwrap();
        assert!(doc.evaluate_by_expansion(100).unwrap());
    }
}
