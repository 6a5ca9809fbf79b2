//! S-expression reader for formulas.

use super::check::{check, CheckOptions, Kind, Scope};
use super::{Binder, Formula, LogicError, Quantifier, Term, ToArg, ToShape};

#[derive(Debug)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn offset(&self) -> usize {
        match self {
            Sexp::Atom(_, o) | Sexp::List(_, o) => *o,
        }
    }
}

struct Reader<'t> {
    text: &'t str,
}

impl<'t> Reader<'t> {
    fn error(&self, offset: usize, message: impl Into<String>) -> LogicError {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        LogicError::Syntax { line, column, message: message.into() }
    }

    fn read(&self) -> Result<Sexp, LogicError> {
        let mut stack: Vec<(Vec<Sexp>, usize)> = Vec::new();
        let mut result: Option<Sexp> = None;
        let bytes = self.text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            if result.is_some() {
                return Err(self.error(i, "trailing input after formula"));
            }
            match c {
                b'(' => {
                    stack.push((Vec::new(), i));
                    i += 1;
                }
                b')' => {
                    let (items, start) = stack.pop().ok_or_else(|| self.error(i, "unbalanced `)`"))?;
                    let list = Sexp::List(items, start);
                    match stack.last_mut() {
                        Some((parent, _)) => parent.push(list),
                        None => result = Some(list),
                    }
                    i += 1;
                }
                _ => {
                    let start = i;
                    while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'(' && bytes[i] != b')' {
                        i += 1;
                    }
                    let atom = Sexp::Atom(self.text[start..i].to_string(), start);
                    match stack.last_mut() {
                        Some((parent, _)) => parent.push(atom),
                        None => return Err(self.error(start, "expected `(`")),
                    }
                }
            }
        }
        if let Some((_, start)) = stack.last() {
            return Err(self.error(*start, "unclosed `(`"));
        }
        result.ok_or_else(|| self.error(self.text.len(), "empty input"))
    }
}

struct Builder<'t, 'o> {
    reader: Reader<'t>,
    opts: &'o CheckOptions,
    scope: Scope,
}

impl Builder<'_, '_> {
    fn name<'s>(&self, s: &'s Sexp) -> Result<&'s str, LogicError> {
        match s {
            Sexp::Atom(a, o) => {
                if a.chars().all(|c| c.is_ascii_digit()) {
                    Err(self.reader.error(*o, format!("expected a name, found {a:?}")))
                } else {
                    Ok(a)
                }
            }
            Sexp::List(_, o) => Err(self.reader.error(*o, "expected a name, found a list")),
        }
    }

    fn number(&self, s: &Sexp) -> Result<usize, LogicError> {
        match s {
            Sexp::Atom(a, o) => a.parse().map_err(|_| self.reader.error(*o, format!("expected a number, found {a:?}"))),
            Sexp::List(_, o) => Err(self.reader.error(*o, "expected a number, found a list")),
        }
    }

    fn term(&self, s: &Sexp) -> Result<Term, LogicError> {
        let n = self.name(s)?;
        let bound_fo = matches!(self.scope.lookup(n), Some(Kind::First));
        if !bound_fo && self.opts.constants.iter().any(|c| c == n) {
            Ok(Term::Const(n.to_string()))
        } else {
            Ok(Term::Var(n.to_string()))
        }
    }

    fn arity_count(&self, items: &[Sexp], offset: usize, want: usize, kw: &str) -> Result<(), LogicError> {
        if items.len() != want {
            Err(self.reader.error(offset, format!("`{kw}` takes {} arguments, found {}", want - 1, items.len() - 1)))
        } else {
            Ok(())
        }
    }

    fn formula(&mut self, s: &Sexp) -> Result<Formula, LogicError> {
        let (items, offset) = match s {
            Sexp::List(items, o) => (items, *o),
            Sexp::Atom(a, o) => return Err(self.reader.error(*o, format!("expected a formula, found {a:?}"))),
        };
        let Some(Sexp::Atom(kw, _)) = items.first() else {
            return Err(self.reader.error(offset, "expected a keyword"));
        };
        let kw = kw.as_str();
        match kw {
            "rel" | "var2" => {
                if items.len() < 2 {
                    return Err(self.reader.error(offset, format!("`{kw}` needs a name")));
                }
                let name = self.name(&items[1])?.to_string();
                let args = items[2..].iter().map(|t| self.term(t)).collect::<Result<_, _>>()?;
                Ok(if kw == "rel" { Formula::Rel { name, args } } else { Formula::SoAtom { var: name, args } })
            }
            "var3" => {
                if items.len() < 2 {
                    return Err(self.reader.error(offset, "`var3` needs a name"));
                }
                let var = self.name(&items[1])?.to_string();
                let shape = match self.scope.lookup(&var) {
                    Some(Kind::Third(shape)) => shape.clone(),
                    Some(_) => {
                        return Err(LogicError::KindMismatch {
                            name: var,
                            used: "a third-order variable",
                            bound: "a lower-order variable",
                        })
                    }
                    None => return Err(LogicError::Unbound(var)),
                };
                let raw = &items[2..];
                if raw.len() != shape.len() {
                    return Err(LogicError::ArityMismatch { name: var, expected: shape.len(), found: raw.len() });
                }
                let args = shape
                    .iter()
                    .zip(raw)
                    .map(|(&a, r)| {
                        if a == 0 {
                            self.term(r).map(ToArg::Element)
                        } else {
                            self.name(r).map(|n| ToArg::Relation(n.to_string()))
                        }
                    })
                    .collect::<Result<_, _>>()?;
                Ok(Formula::ToAtom { var, args })
            }
            "eq" => {
                self.arity_count(items, offset, 3, kw)?;
                Ok(Formula::Eq(self.term(&items[1])?, self.term(&items[2])?))
            }
            "not" => {
                self.arity_count(items, offset, 2, kw)?;
                Ok(Formula::not(self.formula(&items[1])?))
            }
            "and" | "or" => {
                let fs = items[1..].iter().map(|c| self.formula(c)).collect::<Result<Vec<_>, _>>()?;
                Ok(if kw == "and" { Formula::And(fs) } else { Formula::Or(fs) })
            }
            "implies" | "iff" => {
                self.arity_count(items, offset, 3, kw)?;
                let a = self.formula(&items[1])?;
                let b = self.formula(&items[2])?;
                Ok(if kw == "implies" { Formula::implies(a, b) } else { Formula::iff(a, b) })
            }
            "ex1" | "all1" | "ex2" | "all2" | "ex3" | "all3" => {
                let q = if kw.starts_with("ex") { Quantifier::Exists } else { Quantifier::Forall };
                let order = kw.as_bytes()[kw.len() - 1];
                let want = if order == b'1' { 3 } else { 4 };
                self.arity_count(items, offset, want, kw)?;
                let name = self.name(&items[1])?.to_string();
                let binder = match order {
                    b'1' => Binder::First(name),
                    b'2' => Binder::Second { name, arity: self.number(&items[2])? },
                    _ => {
                        let Sexp::List(parts, o) = &items[2] else {
                            return Err(self.reader.error(items[2].offset(), "expected a shape list"));
                        };
                        let arities = parts.iter().map(|p| self.number(p)).collect::<Result<Vec<_>, _>>()?;
                        let shape = ToShape::new(arities)
                            .ok_or_else(|| self.reader.error(*o, "third-order shape must be non-empty"))?;
                        Binder::Third { name, shape }
                    }
                };
                self.scope.push(&binder);
                let body = self.formula(&items[want - 1]);
                self.scope.pop();
                Ok(Formula::quant(q, binder, body?))
            }
            other => Err(self.reader.error(offset, format!("unknown keyword {other:?}"))),
        }
    }
}

/// Parses with default options: free variables allowed, no constants.
pub fn parse_formula(text: &str) -> Result<Formula, LogicError> {
    parse_formula_with(text, &CheckOptions::default())
}

/// Parses and statically checks a formula.
pub fn parse_formula_with(text: &str, opts: &CheckOptions) -> Result<Formula, LogicError> {
    let reader = Reader { text };
    let sexp = reader.read()?;
    let mut b = Builder { reader, opts, scope: Scope::default() };
    let f = b.formula(&sexp)?;
    check(&f, opts)?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::super::to_sexp;
    use super::*;

    #[test]
    fn parses_second_order_example() {
        let f = parse_formula("(ex2 A 1 (ex1 x (var2 A x)))").unwrap();
        assert_eq!(f, Formula::exists2("A", 1, Formula::exists1("x", Formula::so("A", &["x"]))));
    }

    #[test]
    fn arity_mismatch_between_binder_and_use() {
        let e = parse_formula("(ex2 A 1 (var2 A x y))").unwrap_err();
        assert_eq!(e, LogicError::ArityMismatch { name: "A".into(), expected: 1, found: 2 });
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_formula("(and\n  (rel E x y)\n  (bogus))").unwrap_err();
        assert!(matches!(e, LogicError::Syntax { line: 3, column: 3, .. }), "{e:?}");
        assert!(matches!(parse_formula("(not (eq x y)"), Err(LogicError::Syntax { .. })));
        assert!(matches!(parse_formula("(eq x y))"), Err(LogicError::Syntax { .. })));
    }

    #[test]
    fn constants_resolve_unless_shadowed() {
        let opts = CheckOptions { constants: vec!["c".into()], ..CheckOptions::default() };
        let f = parse_formula_with("(and (eq c y) (ex1 c (eq c y)))", &opts).unwrap();
        let Formula::And(parts) = &f else { panic!() };
        assert_eq!(parts[0], Formula::Eq(Term::Const("c".into()), Term::var("y")));
        assert_eq!(parts[1], Formula::exists1("c", Formula::Eq(Term::var("c"), Term::var("y"))));
    }

    #[test]
    fn third_order_atoms_use_the_shape() {
        let f = parse_formula("(ex3 C (1 0) (ex2 A 1 (ex1 x (var3 C A x))))").unwrap();
        assert_eq!(to_sexp(&f), "(ex3 C (1 0) (ex2 A 1 (ex1 x (var3 C A x))))");
        assert!(matches!(parse_formula("(var3 C A)"), Err(LogicError::Unbound(_))));
        assert!(matches!(parse_formula("(ex3 C (2) (ex2 A 1 (var3 C A)))"), Err(LogicError::ArityMismatch { .. })));
    }

    #[test]
    fn unbound_rejected_in_closed_mode() {
        let e = parse_formula_with("(rel E x y)", &CheckOptions::closed()).unwrap_err();
        assert_eq!(e, LogicError::Unbound("x".into()));
    }
}
