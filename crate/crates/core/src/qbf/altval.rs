//! Satisfaction through alternating valuations.
//!
//! An alternating valuation for a prefix with `L` variables is a rooted
//! binary tree with 0/1 labels whose leaves all sit at depth `L - 1`. Depth
//! `d` holds the value of the `d`-th prefix variable. Nodes on existential
//! depths have no siblings; nodes on universal depths come in sibling pairs
//! with different labels, the left one labelled 0. A QBF is true iff some
//! such tree has every root-to-leaf valuation satisfying the matrix.

use std::collections::HashMap;

use crate::logic::Quantifier;

use super::{QVar, QbfAst, QbfError};

/// Variable cap for tree enumeration.
pub const ALTVAL_VAR_LIMIT: usize = 12;
/// Cap on free label bits (existential nodes) of one tree shape.
pub const ALTVAL_CHOICE_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltValuationTree {
    labels: Vec<bool>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
}

impl AltValuationTree {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, node: usize) -> bool {
        self.labels[node]
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&n| self.children[n].is_empty()).collect()
    }

    /// The labels on the path from the root to `leaf`, root first.
    pub fn path_labels(&self, leaf: usize) -> Vec<bool> {
        let mut path = vec![self.labels[leaf]];
        let mut at = leaf;
        while let Some(p) = self.parent[at] {
            path.push(self.labels[p]);
            at = p;
        }
        path.reverse();
        path
    }

    /// Assignments induced by the leaves, in prefix order of `q`.
    pub fn leaf_valuations(&self, q: &QbfAst) -> Vec<Vec<(QVar, bool)>> {
        let order = q.prefix_vars();
        self.leaves().into_iter().map(|l| order.iter().copied().zip(self.path_labels(l)).collect()).collect()
    }

    pub fn satisfies(&self, q: &QbfAst) -> bool {
        self.leaf_valuations(q).iter().all(|val| {
            let map: HashMap<QVar, bool> = val.iter().copied().collect();
            q.matrix().eval(&|v| map[&v])
        })
    }

    /// Structural check against the applicability conditions, independent of
    /// how trees are generated.
    pub fn is_applicable_to(&self, q: &QbfAst) -> bool {
        let quants: Vec<Quantifier> =
            q.blocks().iter().flat_map(|b| std::iter::repeat_n(b.quantifier, b.vars.len())).collect();
        let last = quants.len() - 1;
        let root_ok = self.parent[0].is_none() && quants[0] == Quantifier::Exists;
        let leaves_ok = self.leaves().iter().all(|&l| self.depth[l] == last);
        let degrees_ok = (0..self.node_count()).all(|n| {
            let ch = &self.children[n];
            if self.depth[n] == last {
                return ch.is_empty();
            }
            match quants[self.depth[n] + 1] {
                Quantifier::Exists => ch.len() == 1,
                Quantifier::Forall => ch.len() == 2 && self.labels[ch[0]] != self.labels[ch[1]],
            }
        });
        root_ok && leaves_ok && degrees_ok
    }
}

/// Fixed tree shape for a prefix; only existential labels vary.
struct Shape {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    fixed: Vec<Option<bool>>,
    free: Vec<usize>,
    leaves: Vec<usize>,
}

impl Shape {
    fn new(q: &QbfAst) -> Result<Shape, QbfError> {
        let count = q.var_count();
        if count > ALTVAL_VAR_LIMIT {
            return Err(QbfError::VariableBudget { vars: count, limit: ALTVAL_VAR_LIMIT });
        }
        if !q.starts_existential() {
            return Err(QbfError::NotApplicable("alternating valuations need an existential first block".into()));
        }
        let quants: Vec<Quantifier> =
            q.blocks().iter().flat_map(|b| std::iter::repeat_n(b.quantifier, b.vars.len())).collect();
        let mut s = Shape {
            parent: vec![None],
            children: vec![vec![]],
            depth: vec![0],
            fixed: vec![None],
            free: vec![0],
            leaves: vec![],
        };
        let mut frontier = vec![0usize];
        for (d, quant) in quants.iter().enumerate().skip(1) {
            let mut next = Vec::new();
            for &p in &frontier {
                let labels: &[Option<bool>] = match quant {
                    Quantifier::Exists => &[None],
                    Quantifier::Forall => &[Some(false), Some(true)],
                };
                for &label in labels {
                    let id = s.parent.len();
                    s.parent.push(Some(p));
                    s.children.push(vec![]);
                    s.depth.push(d);
                    s.fixed.push(label);
                    if label.is_none() {
                        s.free.push(id);
                    }
                    s.children[p].push(id);
                    next.push(id);
                }
            }
            frontier = next;
            if s.free.len() > ALTVAL_CHOICE_LIMIT {
                return Err(QbfError::VariableBudget { vars: s.free.len(), limit: ALTVAL_CHOICE_LIMIT });
            }
        }
        s.leaves = frontier;
        Ok(s)
    }

    fn labels(&self, mask: u64) -> Vec<bool> {
        let mut labels: Vec<bool> = self.fixed.iter().map(|l| l.unwrap_or(false)).collect();
        for (bit, &node) in self.free.iter().enumerate() {
            labels[node] = mask >> bit & 1 == 1;
        }
        labels
    }

    fn tree(&self, mask: u64) -> AltValuationTree {
        AltValuationTree {
            labels: self.labels(mask),
            parent: self.parent.clone(),
            children: self.children.clone(),
            depth: self.depth.clone(),
        }
    }
}

/// Number of applicable trees.
pub fn count_applicable_trees(q: &QbfAst) -> Result<u64, QbfError> {
    Ok(1u64 << Shape::new(q)?.free.len())
}

/// Every applicable tree, existential labels counting up from all zeros.
pub fn applicable_trees(q: &QbfAst) -> Result<impl Iterator<Item = AltValuationTree>, QbfError> {
    let shape = Shape::new(q)?;
    let total = 1u64 << shape.free.len();
    Ok((0..total).map(move |mask| shape.tree(mask)))
}

/// The first applicable tree, in enumeration order, that satisfies `q`.
pub fn satisfying_tree(q: &QbfAst) -> Result<Option<AltValuationTree>, QbfError> {
    let shape = Shape::new(q)?;
    let order = q.prefix_vars();
    let max = order.iter().copied().max().unwrap_or(0) as usize;
    let mut depth_of = vec![0usize; max + 1];
    for (d, &v) in order.iter().enumerate() {
        depth_of[v as usize] = d;
    }
    let paths: Vec<Vec<usize>> = shape
        .leaves
        .iter()
        .map(|&l| {
            let mut path = vec![l];
            let mut at = l;
            while let Some(p) = shape.parent[at] {
                path.push(p);
                at = p;
            }
            path.reverse();
            path
        })
        .collect();
    let total = 1u64 << shape.free.len();
    for mask in 0..total {
        let labels = shape.labels(mask);
        let ok = paths.iter().all(|path| q.matrix().eval(&|v| labels[path[depth_of[v as usize]]]));
        if ok {
            return Ok(Some(shape.tree(mask)));
        }
    }
    Ok(None)
}

pub fn sat_via_alternating_valuations(q: &QbfAst) -> Result<bool, QbfError> {
    Ok(satisfying_tree(q)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::super::parse_qbf;
    use super::*;

    #[test]
    fn two_block_example_has_two_trees() {
        let q = parse_qbf("E x1 A x2 ((!x1)|x2)").unwrap();
        assert_eq!(count_applicable_trees(&q).unwrap(), 2);
        let trees: Vec<_> = applicable_trees(&q).unwrap().collect();
        assert_eq!(trees.len(), 2);
        assert!(trees.iter().all(|t| t.is_applicable_to(&q)));
        assert!(sat_via_alternating_valuations(&q).unwrap());
        let witness = satisfying_tree(&q).unwrap().unwrap();
        assert!(!witness.label(0));
    }

    #[test]
    fn single_variable_witness() {
        let q = parse_qbf("E x1 (x1)").unwrap();
        let t = satisfying_tree(&q).unwrap().unwrap();
        assert_eq!(t.node_count(), 1);
        assert!(t.label(0));
    }

    #[test]
    fn universal_first_is_not_applicable() {
        let q = parse_qbf("A x1 E x2 (x1&x2)").unwrap();
        assert!(matches!(sat_via_alternating_valuations(&q), Err(QbfError::NotApplicable(_))));
    }

    #[test]
    fn leaves_share_depth_and_siblings_differ() {
        let q = parse_qbf("E x1 A x2 x3 E x4 ((x1|x2)&(x3|x4))").unwrap();
        for t in applicable_trees(&q).unwrap().take(50) {
            assert!(t.is_applicable_to(&q));
            assert_eq!(t.leaves().len(), 4);
        }
        assert_eq!(count_applicable_trees(&q).unwrap(), 1 << 5);
    }
}
