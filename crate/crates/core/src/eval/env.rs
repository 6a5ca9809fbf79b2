use std::collections::{BTreeMap, BTreeSet};

use crate::logic::ToShape;
use crate::structures::{Element, Tuple};

use super::EvalError;

/// One component of a third-order tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ToComponent {
    Element(Element),
    Relation(BTreeSet<Tuple>),
}

/// Values for free variables of all three orders.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Environment {
    fo: BTreeMap<String, Element>,
    so: BTreeMap<String, (usize, BTreeSet<Tuple>)>,
    to: BTreeMap<String, (ToShape, BTreeSet<Vec<ToComponent>>)>,
}

impl Environment {
    pub fn new() -> Environment {
        Environment::default()
    }

    /// Environment binding first-order variables only.
    pub fn with_elements<'a>(pairs: impl IntoIterator<Item = (&'a str, Element)>) -> Environment {
        let mut env = Environment::new();
        for (name, e) in pairs {
            env.bind_element(name, e);
        }
        env
    }

    pub fn bind_element(&mut self, name: &str, e: Element) -> &mut Self {
        self.fo.insert(name.to_string(), e);
        self
    }

    pub fn bind_relation(&mut self, name: &str, arity: usize, tuples: BTreeSet<Tuple>) -> Result<&mut Self, EvalError> {
        if let Some(t) = tuples.iter().find(|t| t.len() != arity) {
            return Err(EvalError::Arity { name: name.to_string(), expected: arity, found: t.len() });
        }
        self.so.insert(name.to_string(), (arity, tuples));
        Ok(self)
    }

    pub fn bind_third(
        &mut self,
        name: &str,
        shape: ToShape,
        tuples: BTreeSet<Vec<ToComponent>>,
    ) -> Result<&mut Self, EvalError> {
        for t in &tuples {
            let fits = t.len() == shape.len()
                && t.iter().zip(shape.arities()).all(|(c, &a)| match c {
                    ToComponent::Element(_) => a == 0,
                    ToComponent::Relation(r) => a > 0 && r.iter().all(|u| u.len() == a),
                });
            if !fits {
                return Err(EvalError::Precondition(format!("value of {name} does not match its shape")));
            }
        }
        self.to.insert(name.to_string(), (shape, tuples));
        Ok(self)
    }

    pub fn element(&self, name: &str) -> Option<Element> {
        self.fo.get(name).copied()
    }

    pub fn elements(&self) -> &BTreeMap<String, Element> {
        &self.fo
    }

    pub fn relations(&self) -> &BTreeMap<String, (usize, BTreeSet<Tuple>)> {
        &self.so
    }

    pub fn third_order(&self) -> &BTreeMap<String, (ToShape, BTreeSet<Vec<ToComponent>>)> {
        &self.to
    }

    /// Every bound element lies in a domain of size `n`.
    pub(super) fn check_domain(&self, n: usize) -> Result<(), EvalError> {
        let bad_fo = self.fo.iter().find(|(_, &e)| e >= n).map(|(k, _)| k);
        let bad_so = self.so.iter().find(|(_, (_, ts))| ts.iter().flatten().any(|&e| e >= n)).map(|(k, _)| k);
        let bad_to = self
            .to
            .iter()
            .find(|(_, (_, ts))| {
                ts.iter().flatten().any(|c| match c {
                    ToComponent::Element(e) => *e >= n,
                    ToComponent::Relation(r) => r.iter().flatten().any(|&e| e >= n),
                })
            })
            .map(|(k, _)| k);
        match bad_fo.or(bad_so).or(bad_to) {
            Some(name) => Err(EvalError::Precondition(format!("value of {name} lies outside the domain"))),
            None => Ok(()),
        }
    }
}
