//! Propositional formulas with Boolean quantifiers anywhere in the tree.

use std::collections::HashMap;
use std::fmt;

use crate::logic::Quantifier;
use crate::structures::Tuple;

use super::{Matrix, QbfAst, QbfError};

/// Index into [`GroundedQbf::vars`].
pub type BoolVar = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QNode {
    Const(bool),
    Var(BoolVar),
    Not(Box<QNode>),
    And(Vec<QNode>),
    Or(Vec<QNode>),
    Iff(Box<QNode>, Box<QNode>),
    Quant { quantifier: Quantifier, vars: Vec<BoolVar>, body: Box<QNode> },
}

impl QNode {
    /// Negation with constant folding and double-negation removal.
    #[allow(clippy::should_implement_trait)]
    pub fn not(n: QNode) -> QNode {
        match n {
            QNode::Const(b) => QNode::Const(!b),
            QNode::Not(inner) => *inner,
            other => QNode::Not(Box::new(other)),
        }
    }

    /// Conjunction; flattens, drops `true`, and absorbs into `false`.
    pub fn and(children: impl IntoIterator<Item = QNode>) -> QNode {
        QNode::junction(children, true)
    }

    /// Disjunction; flattens, drops `false`, and absorbs into `true`.
    pub fn or(children: impl IntoIterator<Item = QNode>) -> QNode {
        QNode::junction(children, false)
    }

    fn junction(children: impl IntoIterator<Item = QNode>, conj: bool) -> QNode {
        let mut out = Vec::new();
        for c in children {
            match c {
                QNode::Const(b) if b == conj => {}
                QNode::Const(b) => return QNode::Const(b),
                QNode::And(cs) if conj => out.extend(cs),
                QNode::Or(cs) if !conj => out.extend(cs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => QNode::Const(conj),
            1 => out.pop().expect("one child"),
            _ if conj => QNode::And(out),
            _ => QNode::Or(out),
        }
    }

    pub fn iff(a: QNode, b: QNode) -> QNode {
        match (a, b) {
            (QNode::Const(x), QNode::Const(y)) => QNode::Const(x == y),
            (QNode::Const(true), o) | (o, QNode::Const(true)) => o,
            (QNode::Const(false), o) | (o, QNode::Const(false)) => QNode::not(o),
            (a, b) => QNode::Iff(Box::new(a), Box::new(b)),
        }
    }

    /// Quantifies `vars` over `body`; an empty list or constant body needs
    /// no binder.
    pub fn quant(quantifier: Quantifier, vars: Vec<BoolVar>, body: QNode) -> QNode {
        if vars.is_empty() || matches!(body, QNode::Const(_)) {
            return body;
        }
        QNode::Quant { quantifier, vars, body: Box::new(body) }
    }

    pub fn children(&self) -> Vec<&QNode> {
        match self {
            QNode::Const(_) | QNode::Var(_) => vec![],
            QNode::Not(a) => vec![a],
            QNode::And(cs) | QNode::Or(cs) => cs.iter().collect(),
            QNode::Iff(a, b) => vec![a, b],
            QNode::Quant { body, .. } => vec![body],
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    pub fn has_quantifier(&self) -> bool {
        matches!(self, QNode::Quant { .. }) || self.children().iter().any(|c| c.has_quantifier())
    }

    fn rename(self, map: &HashMap<BoolVar, BoolVar>) -> QNode {
        let r = |v: BoolVar| map.get(&v).copied().unwrap_or(v);
        match self {
            QNode::Const(b) => QNode::Const(b),
            QNode::Var(v) => QNode::Var(r(v)),
            QNode::Not(a) => QNode::Not(Box::new(a.rename(map))),
            QNode::And(cs) => QNode::And(cs.into_iter().map(|c| c.rename(map)).collect()),
            QNode::Or(cs) => QNode::Or(cs.into_iter().map(|c| c.rename(map)).collect()),
            QNode::Iff(a, b) => QNode::Iff(Box::new(a.rename(map)), Box::new(b.rename(map))),
            QNode::Quant { quantifier, vars, body } => {
                QNode::Quant { quantifier, vars: vars.into_iter().map(r).collect(), body: Box::new(body.rename(map)) }
            }
        }
    }
}

/// Origin of a Boolean variable produced by grounding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub so_var: String,
    pub tuple: Tuple,
    /// Distinguishes copies of one binder created by first-order expansion.
    pub instance: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarInfo {
    pub name: String,
    pub provenance: Option<Provenance>,
}

impl VarInfo {
    pub fn named(name: impl Into<String>) -> VarInfo {
        VarInfo { name: name.into(), provenance: None }
    }

    /// `X@(t1,…,tk)`, with `#i` appended for instance `i > 0`.
    pub fn grounded(so_var: &str, tuple: Tuple, instance: u32) -> VarInfo {
        let parts: Vec<String> = tuple.iter().map(|t| t.to_string()).collect();
        let mut name = format!("{so_var}@({})", parts.join(","));
        if instance > 0 {
            name.push_str(&format!("#{instance}"));
        }
        VarInfo { name, provenance: Some(Provenance { so_var: so_var.to_string(), tuple, instance }) }
    }
}

/// A closed propositional formula with Boolean quantifier nodes. Every
/// variable in the table is bound by exactly one quantifier node, and every
/// occurrence sits inside its binder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundedQbf {
    vars: Vec<VarInfo>,
    root: QNode,
}

impl GroundedQbf {
    pub fn new(vars: Vec<VarInfo>, root: QNode) -> Result<GroundedQbf, QbfError> {
        let mut bound = vec![false; vars.len()];
        let mut in_scope = vec![false; vars.len()];
        check_scopes(&root, &mut bound, &mut in_scope)?;
        if let Some(v) = bound.iter().position(|b| !b) {
            return Err(QbfError::Malformed(format!("variable {} is never bound", vars[v].name)));
        }
        Ok(GroundedQbf { vars, root })
    }

    /// Drops table entries that no quantifier binds and renumbers the rest
    /// in binding order.
    pub fn compacted(vars: Vec<VarInfo>, root: QNode) -> Result<GroundedQbf, QbfError> {
        let mut order = Vec::new();
        collect_binders(&root, &mut order);
        let mut map = HashMap::new();
        let mut table = Vec::with_capacity(order.len());
        for v in order {
            let info =
                vars.get(v as usize).ok_or_else(|| QbfError::Malformed(format!("variable {v} is not in the table")))?;
            if map.insert(v, table.len() as BoolVar).is_some() {
                return Err(QbfError::Malformed(format!("variable {} is bound twice", info.name)));
            }
            table.push(info.clone());
        }
        GroundedQbf::new(table, root.rename(&map))
    }

    /// The prenex QBF as a tree; `x_n` becomes variable `n - 1`.
    pub fn from_ast(q: &QbfAst) -> GroundedQbf {
        let order = q.prefix_vars();
        let index: HashMap<u32, BoolVar> = order.iter().enumerate().map(|(i, &v)| (v, i as BoolVar)).collect();
        let mut root = matrix_node(q.matrix(), &index);
        for b in q.blocks().iter().rev() {
            root = QNode::Quant {
                quantifier: b.quantifier,
                vars: b.vars.iter().map(|v| index[v]).collect(),
                body: Box::new(root),
            };
        }
        let vars = order.iter().map(|v| VarInfo::named(format!("x{v}"))).collect();
        GroundedQbf { vars, root }
    }

    pub fn vars(&self) -> &[VarInfo] {
        &self.vars
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn root(&self) -> &QNode {
        &self.root
    }

    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    pub fn name(&self, v: BoolVar) -> &str {
        &self.vars[v as usize].name
    }

    /// Truth value by expanding every quantifier node; exponential in the
    /// number of binders on a path. Used as a reference for the solver.
    pub fn evaluate_by_expansion(&self, limit: usize) -> Result<bool, QbfError> {
        let depth = bound_depth(&self.root);
        if depth > limit {
            return Err(QbfError::VariableBudget { vars: depth, limit });
        }
        let mut value = vec![false; self.vars.len()];
        Ok(expand(&self.root, &mut value))
    }
}

fn matrix_node(m: &Matrix, index: &HashMap<u32, BoolVar>) -> QNode {
    match m {
        Matrix::Const(b) => QNode::Const(*b),
        Matrix::Var(v) => QNode::Var(index[v]),
        Matrix::Not(a) => QNode::Not(Box::new(matrix_node(a, index))),
        Matrix::And(a, b) => QNode::And(vec![matrix_node(a, index), matrix_node(b, index)]),
        Matrix::Or(a, b) => QNode::Or(vec![matrix_node(a, index), matrix_node(b, index)]),
    }
}

fn check_scopes(n: &QNode, bound: &mut [bool], in_scope: &mut [bool]) -> Result<(), QbfError> {
    match n {
        QNode::Const(_) => Ok(()),
        QNode::Var(v) => match in_scope.get(*v as usize) {
            Some(true) => Ok(()),
            Some(false) => Err(QbfError::Malformed(format!("variable {v} occurs outside its binder"))),
            None => Err(QbfError::Malformed(format!("variable {v} is not in the table"))),
        },
        QNode::Quant { vars, body, .. } => {
            for &v in vars {
                let slot = bound
                    .get_mut(v as usize)
                    .ok_or_else(|| QbfError::Malformed(format!("variable {v} is not in the table")))?;
                if *slot {
                    return Err(QbfError::Malformed(format!("variable {v} is bound twice")));
                }
                *slot = true;
                in_scope[v as usize] = true;
            }
            let r = check_scopes(body, bound, in_scope);
            for &v in vars {
                in_scope[v as usize] = false;
            }
            r
        }
        other => other.children().into_iter().try_for_each(|c| check_scopes(c, bound, in_scope)),
    }
}

fn collect_binders(n: &QNode, out: &mut Vec<BoolVar>) {
    if let QNode::Quant { vars, .. } = n {
        out.extend(vars);
    }
    for c in n.children() {
        collect_binders(c, out);
    }
}

fn bound_depth(n: &QNode) -> usize {
    let own = match n {
        QNode::Quant { vars, .. } => vars.len(),
        _ => 0,
    };
    own + n.children().iter().map(|c| bound_depth(c)).max().unwrap_or(0)
}

fn expand(n: &QNode, value: &mut Vec<bool>) -> bool {
    match n {
        QNode::Const(b) => *b,
        QNode::Var(v) => value[*v as usize],
        QNode::Not(a) => !expand(a, value),
        QNode::And(cs) => cs.iter().all(|c| expand(c, value)),
        QNode::Or(cs) => cs.iter().any(|c| expand(c, value)),
        QNode::Iff(a, b) => expand(a, value) == expand(b, value),
        QNode::Quant { quantifier, vars, body } => expand_block(*quantifier, vars, body, value),
    }
}

fn expand_block(q: Quantifier, vars: &[BoolVar], body: &QNode, value: &mut Vec<bool>) -> bool {
    let Some((&v, rest)) = vars.split_first() else {
        return expand(body, value);
    };
    let want = q == Quantifier::Exists;
    for bit in [false, true] {
        value[v as usize] = bit;
        if expand_block(q, rest, body, value) == want {
            return want;
        }
    }
    !want
}

struct Shown<'a>(&'a GroundedQbf, &'a QNode);

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.0;
        let join = |f: &mut fmt::Formatter<'_>, cs: &[QNode], op: &str| -> fmt::Result {
            f.write_str("(")?;
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{}", Shown(g, c))?;
            }
            f.write_str(")")
        };
        match self.1 {
            QNode::Const(b) => write!(f, "{}", u8::from(*b)),
            QNode::Var(v) => f.write_str(g.name(*v)),
            QNode::Not(a) => write!(f, "¬{}", Shown(g, a)),
            QNode::And(cs) => join(f, cs, "∧"),
            QNode::Or(cs) => join(f, cs, "∨"),
            QNode::Iff(a, b) => write!(f, "({} ↔ {})", Shown(g, a), Shown(g, b)),
            QNode::Quant { quantifier, vars, body } => {
                for v in vars {
                    write!(f, "{}{} ", quantifier.symbol(), g.name(*v))?;
                }
                write!(f, "{}", Shown(g, body))
            }
        }
    }
}

impl fmt::Display for GroundedQbf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Shown(self, &self.root))
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_qbf;
    use super::*;

    fn exists(vars: Vec<BoolVar>, body: QNode) -> QNode {
        QNode::quant(Quantifier::Exists, vars, body)
    }

    #[test]
    fn constructors_simplify() {
        let a = QNode::Var(0);
        assert_eq!(QNode::and([QNode::Const(true), a.clone()]), a);
        assert_eq!(QNode::or([QNode::Const(true), a.clone()]), QNode::Const(true));
        assert_eq!(QNode::not(QNode::not(a.clone())), a);
        assert_eq!(QNode::iff(QNode::Const(false), a.clone()), QNode::not(a.clone()));
        assert_eq!(QNode::and(Vec::new()), QNode::Const(true));
        let nested = QNode::and([QNode::and([a.clone(), QNode::Var(1)]), QNode::Var(2)]);
        assert_eq!(nested.children().len(), 3);
    }

    #[test]
    fn validation() {
        let vars = vec![VarInfo::named("a"), VarInfo::named("b")];
        let free = exists(vec![0], QNode::or([QNode::Var(0), QNode::Var(1)]));
        assert!(GroundedQbf::new(vars.clone(), free.clone()).is_err());
        let twice = exists(vec![0, 1], exists(vec![1], QNode::Var(1)));
        assert!(GroundedQbf::new(vars.clone(), twice).is_err());
        let ok = GroundedQbf::compacted(vars, exists(vec![1], QNode::Var(1))).unwrap();
        assert_eq!(ok.var_count(), 1);
        assert_eq!(ok.to_string(), "∃b b");
    }

    #[test]
    fn grounded_names() {
        let v = VarInfo::grounded("R", vec![0, 2], 0);
        assert_eq!(v.name, "R@(0,2)");
        assert_eq!(VarInfo::grounded("A", vec![1], 3).name, "A@(1)#3");
    }

    #[test]
    fn expansion_matches_prenex_examples() {
        for (text, truth) in
            [("E x1 A x2 ((!x1)|x2)", true), ("A x1 E x2 (x1&x2)", false), ("A x1 E x2 ((x1&x2)|((!x1)&(!x2)))", true)]
        {
            let g = GroundedQbf::from_ast(&parse_qbf(text).unwrap());
            assert_eq!(g.evaluate_by_expansion(20).unwrap(), truth, "{text}");
        }
    }
}
