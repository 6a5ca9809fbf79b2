use std::collections::BTreeMap;

use crate::structures::Vocabulary;

use super::{Binder, Formula, LogicError, Term, ToArg};

/// Context for static checking.
#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Names resolved as vocabulary constants rather than variables.
    pub constants: Vec<String>,
    /// When false, every variable must be bound.
    pub allow_free: bool,
    /// When present, `rel` atoms must use its relations at their arity.
    pub vocabulary: Option<Vocabulary>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { constants: vec![], allow_free: true, vocabulary: None }
    }
}

impl CheckOptions {
    pub fn closed() -> Self {
        CheckOptions { allow_free: false, ..CheckOptions::default() }
    }

    pub fn over(vocab: &Vocabulary) -> Self {
        CheckOptions { constants: vocab.constants().to_vec(), allow_free: true, vocabulary: Some(vocab.clone()) }
    }
}

#[derive(Clone)]
pub(super) enum Kind {
    First,
    Second(usize),
    Third(Vec<usize>),
}

impl Kind {
    fn describe(&self) -> &'static str {
        match self {
            Kind::First => "a first-order variable",
            Kind::Second(_) => "a second-order variable",
            Kind::Third(_) => "a third-order variable",
        }
    }

    pub(super) fn of(binder: &Binder) -> Kind {
        match binder {
            Binder::First(_) => Kind::First,
            Binder::Second { arity, .. } => Kind::Second(*arity),
            Binder::Third { shape, .. } => Kind::Third(shape.arities().to_vec()),
        }
    }
}

/// Innermost binding of each name in scope.
#[derive(Default, Clone)]
pub(super) struct Scope {
    bound: Vec<(String, Kind)>,
}

impl Scope {
    pub(super) fn lookup(&self, name: &str) -> Option<&Kind> {
        self.bound.iter().rev().find(|(n, _)| n == name).map(|(_, k)| k)
    }

    pub(super) fn push(&mut self, binder: &Binder) {
        self.bound.push((binder.name().to_string(), Kind::of(binder)));
    }

    pub(super) fn pop(&mut self) {
        self.bound.pop();
    }
}

struct Checker<'o> {
    opts: &'o CheckOptions,
    scope: Scope,
    free_so: BTreeMap<String, usize>,
}

/// Checks binder/use consistency: arities and shapes match, kinds agree,
/// constants are declared, and (unless allowed) no variable is free.
pub fn check(f: &Formula, opts: &CheckOptions) -> Result<(), LogicError> {
    let mut c = Checker { opts, scope: Scope::default(), free_so: BTreeMap::new() };
    c.formula(f)
}

impl Checker<'_> {
    fn term(&self, t: &Term) -> Result<(), LogicError> {
        match t {
            Term::Const(c) => {
                if self.opts.constants.iter().any(|k| k == c) {
                    Ok(())
                } else {
                    Err(LogicError::Unbound(c.clone()))
                }
            }
            Term::Var(x) => match self.scope.lookup(x) {
                Some(Kind::First) => Ok(()),
                Some(k) => Err(LogicError::KindMismatch { name: x.clone(), used: "a term", bound: k.describe() }),
                None if self.opts.allow_free => Ok(()),
                None => Err(LogicError::Unbound(x.clone())),
            },
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<(), LogicError> {
        match f {
            Formula::Rel { name, args } => {
                if let Some(v) = &self.opts.vocabulary {
                    match v.arity(name) {
                        Some(a) if a != args.len() => {
                            return Err(LogicError::ArityMismatch {
                                name: name.clone(),
                                expected: a,
                                found: args.len(),
                            })
                        }
                        None => return Err(LogicError::Unbound(name.clone())),
                        _ => {}
                    }
                }
                args.iter().try_for_each(|t| self.term(t))
            }
            Formula::SoAtom { var, args } => {
                match self.scope.lookup(var) {
                    Some(Kind::Second(k)) => {
                        if *k != args.len() {
                            return Err(LogicError::ArityMismatch {
                                name: var.clone(),
                                expected: *k,
                                found: args.len(),
                            });
                        }
                    }
                    Some(k) => {
                        return Err(LogicError::KindMismatch {
                            name: var.clone(),
                            used: "a second-order variable",
                            bound: k.describe(),
                        })
                    }
                    None if self.opts.allow_free => {
                        let k = *self.free_so.entry(var.clone()).or_insert(args.len());
                        if k != args.len() {
                            return Err(LogicError::ArityMismatch {
                                name: var.clone(),
                                expected: k,
                                found: args.len(),
                            });
                        }
                    }
                    None => return Err(LogicError::Unbound(var.clone())),
                }
                args.iter().try_for_each(|t| self.term(t))
            }
            Formula::ToAtom { var, args } => {
                let shape = match self.scope.lookup(var) {
                    Some(Kind::Third(shape)) => shape.clone(),
                    Some(k) => {
                        return Err(LogicError::KindMismatch {
                            name: var.clone(),
                            used: "a third-order variable",
                            bound: k.describe(),
                        })
                    }
                    None => return Err(LogicError::Unbound(var.clone())),
                };
                if shape.len() != args.len() {
                    return Err(LogicError::ArityMismatch {
                        name: var.clone(),
                        expected: shape.len(),
                        found: args.len(),
                    });
                }
                for (a, arg) in shape.iter().zip(args) {
                    match (a, arg) {
                        (0, ToArg::Element(t)) => self.term(t)?,
                        (0, ToArg::Relation(r)) => {
                            return Err(LogicError::KindMismatch {
                                name: r.clone(),
                                used: "a term",
                                bound: "a relation",
                            })
                        }
                        (_, ToArg::Element(t)) => {
                            return Err(LogicError::KindMismatch {
                                name: t.name().to_string(),
                                used: "a relation",
                                bound: "a term",
                            })
                        }
                        (&a, ToArg::Relation(r)) => match self.scope.lookup(r) {
                            Some(Kind::Second(k)) if *k != a => {
                                return Err(LogicError::ArityMismatch { name: r.clone(), expected: *k, found: a })
                            }
                            Some(Kind::Second(_)) => {}
                            Some(k) => {
                                return Err(LogicError::KindMismatch {
                                    name: r.clone(),
                                    used: "a relation",
                                    bound: k.describe(),
                                })
                            }
                            None => {
                                if let Some(v) = &self.opts.vocabulary {
                                    match v.arity(r) {
                                        Some(k) if k != a => {
                                            return Err(LogicError::ArityMismatch {
                                                name: r.clone(),
                                                expected: k,
                                                found: a,
                                            })
                                        }
                                        None => return Err(LogicError::Unbound(r.clone())),
                                        _ => {}
                                    }
                                }
                            }
                        },
                    }
                }
                Ok(())
            }
            Formula::Eq(a, b) => {
                self.term(a)?;
                self.term(b)
            }
            Formula::Quant { binder, body, .. } => {
                if let Binder::Third { shape, name } = binder {
                    if shape.arities().is_empty() {
                        return Err(LogicError::EmptyShape(name.clone()));
                    }
                }
                self.scope.push(binder);
                let r = self.formula(body);
                self.scope.pop();
                r
            }
            _ => f.children().into_iter().try_for_each(|c| self.formula(c)),
        }
    }
}

/// Names bound at two nested binding sites on one root-to-leaf path.
pub fn rebound_variables(f: &Formula) -> Vec<String> {
    fn walk(f: &Formula, path: &mut Vec<String>, out: &mut Vec<String>) {
        if let Formula::Quant { binder, body, .. } = f {
            let name = binder.name().to_string();
            if path.contains(&name) && !out.contains(&name) {
                out.push(name.clone());
            }
            path.push(name);
            walk(body, path, out);
            path.pop();
        } else {
            for c in f.children() {
                walk(c, path, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(f, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_check_rejects_free_variables() {
        let f = Formula::rel("E", &["x", "y"]);
        assert!(check(&f, &CheckOptions::default()).is_ok());
        assert_eq!(check(&f, &CheckOptions::closed()), Err(LogicError::Unbound("x".into())));
    }

    #[test]
    fn arity_mismatch_is_detected() {
        let f = Formula::exists2("A", 1, Formula::so("A", &["x", "y"]));
        assert!(matches!(check(&f, &CheckOptions::default()), Err(LogicError::ArityMismatch { .. })));
    }

    #[test]
    fn vocabulary_arity_is_checked() {
        let f = Formula::rel("E", &["x"]);
        let opts = CheckOptions::over(&Vocabulary::graph());
        assert!(matches!(check(&f, &opts), Err(LogicError::ArityMismatch { .. })));
    }

    #[test]
    fn rebinding_on_one_path_is_reported() {
        let f = Formula::exists1("x", Formula::forall1("x", Formula::eq("x", "x")));
        assert_eq!(rebound_variables(&f), vec!["x".to_string()]);
        let siblings = Formula::and(vec![
            Formula::exists1("x", Formula::eq("x", "x")),
            Formula::exists1("x", Formula::eq("x", "x")),
        ]);
        assert!(rebound_variables(&siblings).is_empty());
    }
}
