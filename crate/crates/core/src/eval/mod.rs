//! Model checking of formulas over finite structures.
//!
//! Two engines share one semantics. [`eval_naive`] enumerates witnesses at
//! every order directly. [`ground`] compiles a formula without third-order
//! quantifiers into a [`GroundedQbf`](crate::qbf::GroundedQbf) whose truth
//! value [`eval_grounded`] obtains from the QBF solver.
//!
//! Atoms name relations either of the vocabulary or of a bound
//! second-order variable; a bound variable shadows a vocabulary symbol of
//! the same name in both engines.

mod env;
mod ground;
mod naive;

use std::fmt;

use thiserror::Error;

use crate::structures::{Element, Tuple};

pub use env::{Environment, ToComponent};
pub use ground::{eval_grounded, eval_grounded_with, ground, ground_with};
pub use naive::{eval_naive, eval_naive_ordered};

/// Environment variable that overrides [`Budget::max_candidates`].
pub const BUDGET_ENV: &str = "SOMC_BUDGET";

/// Resource limits shared by both engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Cap on candidate witnesses tried by the naive engine, and on SAT
    /// conflicts plus refinement rounds in the grounded engine.
    pub max_candidates: u64,
    /// Cap on formula nodes visited while grounding.
    pub max_ground_nodes: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_candidates: 1 << 24, max_ground_nodes: 1 << 22 }
    }
}

impl Budget {
    pub fn with_candidates(max_candidates: u64) -> Budget {
        Budget { max_candidates, ..Budget::default() }
    }

    /// The default budget, with `max_candidates` taken from `SOMC_BUDGET`
    /// when set.
    pub fn from_env() -> Result<Budget, EvalError> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map(Budget::with_candidates)
                .map_err(|_| EvalError::Precondition(format!("{BUDGET_ENV}={v} is not a positive integer"))),
            Err(_) => Ok(Budget::default()),
        }
    }
}

/// Order in which quantifiers enumerate their candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    /// Elements ascending; relations as binary counters from the empty
    /// relation, bit `i` standing for the `i`-th tuple in lexicographic
    /// order.
    #[default]
    Forward,
    /// Everything reversed.
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resource {
    Candidates,
    GroundNodes,
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Resource::Candidates => "candidate",
            Resource::GroundNodes => "ground-node",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{resource} budget of {limit} exceeded")]
    BudgetExceeded { resource: Resource, limit: u64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("arity mismatch for {name}: expected {expected}, found {found}")]
    Arity { name: String, expected: usize, found: usize },
}

impl EvalError {
    pub fn is_budget_exceeded(&self) -> bool {
        matches!(self, EvalError::BudgetExceeded { .. })
    }
}

/// Position of `t` among all tuples of its length over `{0..n-1}` in
/// lexicographic order.
pub(crate) fn lex_index(t: &[Element], n: usize) -> usize {
    t.iter().fold(0, |acc, &e| acc * n + e)
}

/// All `k`-tuples over `{0..n-1}` in lexicographic order.
pub(crate) fn all_tuples(n: usize, k: usize) -> impl Iterator<Item = Tuple> {
    let count = n.checked_pow(k as u32).unwrap_or(usize::MAX);
    (0..count).map(move |mut i| {
        let mut t = vec![0; k];
        for slot in t.iter_mut().rev() {
            *slot = i % n;
            i /= n;
        }
        t
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuples_are_lexicographic() {
        let ts: Vec<Tuple> = all_tuples(3, 2).collect();
        assert_eq!(ts.len(), 9);
        assert_eq!(ts[1], vec![0, 1]);
        assert_eq!(ts[3], vec![1, 0]);
        assert!(ts.iter().enumerate().all(|(i, t)| lex_index(t, 3) == i));
        assert_eq!(all_tuples(2, 0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn default_budget() {
        let b = Budget::default();
        assert_eq!(b.max_candidates, 1 << 24);
        assert_eq!(b.max_ground_nodes, 1 << 22);
    }
}
