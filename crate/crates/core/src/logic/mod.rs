//! Formulas of first-, second- and third-order logic.
//!
//! Second-order variables range over relations of a fixed arity on the
//! domain. Third-order variables are typed by a [`ToShape`] `(a1, …, ak)` and
//! range over sets of k-tuples whose i-th component is a relation of arity
//! `ai` (an element when `ai = 0`).

mod analyze;
mod check;
mod parse;
mod print;

use std::fmt;

use thiserror::Error;

pub use analyze::{analyze, FormulaStats, Polarity, SoBinding};
pub use check::{check, rebound_variables, CheckOptions};
pub use parse::{parse_formula, parse_formula_with};
pub use print::{pretty_print, to_sexp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("arity mismatch for {name}: bound with {expected}, used with {found}")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("{name} is used as {used} but bound as {bound}")]
    KindMismatch { name: String, used: &'static str, bound: &'static str },
    #[error("invalid shape for {0}: third-order shapes must be non-empty")]
    EmptyShape(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Quantifier::Exists => '∃',
            Quantifier::Forall => '∀',
        }
    }
}

/// An individual term: a first-order variable or a vocabulary constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }
}

impl From<&str> for Term {
    fn from(name: &str) -> Term {
        Term::Var(name.to_string())
    }
}

impl From<&String> for Term {
    fn from(name: &String) -> Term {
        Term::Var(name.clone())
    }
}

impl From<String> for Term {
    fn from(name: String) -> Term {
        Term::Var(name)
    }
}

/// Component arities of a third-order variable. Never empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ToShape(Vec<usize>);

impl ToShape {
    pub fn new(arities: Vec<usize>) -> Option<ToShape> {
        (!arities.is_empty()).then_some(ToShape(arities))
    }

    pub fn arities(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// An argument of a third-order atom. Components of arity 0 are terms; the
/// others name a relation: a bound second-order variable, or else a
/// vocabulary relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ToArg {
    Element(Term),
    Relation(String),
}

impl ToArg {
    pub fn name(&self) -> &str {
        match self {
            ToArg::Element(t) => t.name(),
            ToArg::Relation(r) => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Binder {
    First(String),
    Second { name: String, arity: usize },
    Third { name: String, shape: ToShape },
}

impl Binder {
    pub fn name(&self) -> &str {
        match self {
            Binder::First(n) | Binder::Second { name: n, .. } | Binder::Third { name: n, .. } => n,
        }
    }

    pub fn order(&self) -> u8 {
        match self {
            Binder::First(_) => 1,
            Binder::Second { .. } => 2,
            Binder::Third { .. } => 3,
        }
    }
}

/// Formula syntax tree. `And(vec![])` is true and `Or(vec![])` is false.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Rel { name: String, args: Vec<Term> },
    SoAtom { var: String, args: Vec<Term> },
    ToAtom { var: String, args: Vec<ToArg> },
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Quant { q: Quantifier, binder: Binder, body: Box<Formula> },
}

impl Formula {
    pub fn truth() -> Formula {
        Formula::And(vec![])
    }

    pub fn falsity() -> Formula {
        Formula::Or(vec![])
    }

    pub fn rel<T: Into<Term> + Clone>(name: &str, args: &[T]) -> Formula {
        Formula::Rel { name: name.to_string(), args: args.iter().cloned().map(Into::into).collect() }
    }

    pub fn so<T: Into<Term> + Clone>(var: &str, args: &[T]) -> Formula {
        Formula::SoAtom { var: var.to_string(), args: args.iter().cloned().map(Into::into).collect() }
    }

    pub fn to(var: &str, args: Vec<ToArg>) -> Formula {
        Formula::ToAtom { var: var.to_string(), args }
    }

    pub fn eq(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::Eq(a.into(), b.into())
    }

    pub fn neq(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::not(Formula::eq(a, b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(fs: Vec<Formula>) -> Formula {
        Formula::And(fs)
    }

    pub fn or(fs: Vec<Formula>) -> Formula {
        Formula::Or(fs)
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn quant(q: Quantifier, binder: Binder, body: Formula) -> Formula {
        Formula::Quant { q, binder, body: Box::new(body) }
    }

    pub fn exists1(x: &str, body: Formula) -> Formula {
        Formula::quant(Quantifier::Exists, Binder::First(x.to_string()), body)
    }

    pub fn forall1(x: &str, body: Formula) -> Formula {
        Formula::quant(Quantifier::Forall, Binder::First(x.to_string()), body)
    }

    /// `∃x1 … ∃xk body`, innermost last.
    pub fn exists1_all<S: AsRef<str>>(xs: &[S], body: Formula) -> Formula {
        xs.iter().rev().fold(body, |f, x| Formula::exists1(x.as_ref(), f))
    }

    /// `∀x1 … ∀xk body`, innermost last.
    pub fn forall1_all<S: AsRef<str>>(xs: &[S], body: Formula) -> Formula {
        xs.iter().rev().fold(body, |f, x| Formula::forall1(x.as_ref(), f))
    }

    pub fn exists2(name: &str, arity: usize, body: Formula) -> Formula {
        Formula::quant(Quantifier::Exists, Binder::Second { name: name.to_string(), arity }, body)
    }

    pub fn forall2(name: &str, arity: usize, body: Formula) -> Formula {
        Formula::quant(Quantifier::Forall, Binder::Second { name: name.to_string(), arity }, body)
    }

    pub fn exists3(name: &str, shape: ToShape, body: Formula) -> Formula {
        Formula::quant(Quantifier::Exists, Binder::Third { name: name.to_string(), shape }, body)
    }

    pub fn forall3(name: &str, shape: ToShape, body: Formula) -> Formula {
        Formula::quant(Quantifier::Forall, Binder::Third { name: name.to_string(), shape }, body)
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Rel { .. } | Formula::SoAtom { .. } | Formula::ToAtom { .. } | Formula::Eq(..) => {
                vec![]
            }
            Formula::Not(f) => vec![f],
            Formula::And(fs) | Formula::Or(fs) => fs.iter().collect(),
            Formula::Implies(a, b) | Formula::Iff(a, b) => vec![a, b],
            Formula::Quant { body, .. } => vec![body],
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        let mut count = 0;
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            count += 1;
            stack.extend(f.children());
        }
        count
    }

    /// Pre-order visit of every node.
    pub fn visit<'a>(&'a self, mut each: impl FnMut(&'a Formula)) {
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            each(f);
            let mut ch = f.children();
            ch.reverse();
            stack.extend(ch);
        }
    }

    pub fn has_third_order(&self) -> bool {
        let mut found = false;
        self.visit(|f| {
            if matches!(f, Formula::ToAtom { .. }) || matches!(f, Formula::Quant { binder: Binder::Third { .. }, .. }) {
                found = true;
            }
        });
        found
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_sexp(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builders_nest_in_order() {
        let f = Formula::exists1_all(&["x", "y"], Formula::rel("E", &["x", "y"]));
        assert_eq!(to_sexp(&f), "(ex1 x (ex1 y (rel E x y)))");
        assert_eq!(f.size(), 3);
    }

    #[test]
    fn empty_shape_is_rejected() {
        assert!(ToShape::new(vec![]).is_none());
    }
}
