//! Reference semantics by exhaustive witness enumeration.

use std::collections::HashMap;

use crate::logic::{analyze, Binder, Formula, Quantifier, Term, ToArg};
use crate::structures::{Element, FiniteStructure};

use super::{all_tuples, lex_index, Budget, Environment, EvalError, Order, Resource, ToComponent};

/// Largest third-order universe (number of component tuples) enumerated.
const TO_UNIVERSE_LIMIT: usize = 1 << 16;

/// Relation as a bit per tuple, in lexicographic tuple order.
#[derive(Debug, Clone)]
struct RelVal {
    arity: usize,
    bits: Vec<bool>,
}

/// Set of third-order tuples as a bit per point of the component universe.
#[derive(Debug, Clone)]
struct ToVal {
    arities: Vec<usize>,
    bits: Vec<bool>,
}

/// Advances a binary counter; bit 0 is least significant. Returns false
/// after the last value.
fn step(bits: &mut [bool], order: Order) -> bool {
    let target = order == Order::Forward;
    for b in bits.iter_mut() {
        if *b != target {
            *b = target;
            return true;
        }
        *b = !target;
    }
    false
}

struct Naive<'a> {
    s: &'a FiniteStructure,
    n: usize,
    order: Order,
    fo: HashMap<String, Vec<Element>>,
    so: HashMap<String, Vec<RelVal>>,
    to: HashMap<String, Vec<ToVal>>,
    used: u64,
    limit: u64,
}

impl Naive<'_> {
    fn charge(&mut self) -> Result<(), EvalError> {
        self.used += 1;
        if self.used > self.limit {
            return Err(EvalError::BudgetExceeded { resource: Resource::Candidates, limit: self.limit });
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

    fn holds(&self, name: &str, args: &[Term]) -> Result<bool, EvalError> {
        let t = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
        if let Some(r) = self.so.get(name).and_then(|s| s.last()) {
            if r.arity != t.len() {
                return Err(EvalError::Arity { name: name.to_string(), expected: r.arity, found: t.len() });
            }
            return Ok(r.bits[lex_index(&t, self.n)]);
        }
        let vocab = self.s.vocabulary();
        let i = vocab.relation_index(name).ok_or_else(|| EvalError::UnknownRelation(name.to_string()))?;
        let arity = vocab.relations()[i].arity;
        if arity != t.len() {
            return Err(EvalError::Arity { name: name.to_string(), expected: arity, found: t.len() });
        }
        Ok(self.s.holds_at(i, &t))
    }

    /// Number of points of a component: `n` elements, or `2^(n^a)`
    /// relations of arity `a`.
    fn radix(&self, arity: usize) -> Result<usize, EvalError> {
        if arity == 0 {
            return Ok(self.n);
        }
        let tuples = self.n.checked_pow(arity as u32).filter(|&m| m < 16);
        tuples.map(|m| 1usize << m).ok_or_else(|| {
            EvalError::Unsupported(format!("relation components of arity {arity} over {} elements", self.n))
        })
    }

    fn universe(&self, arities: &[usize]) -> Result<usize, EvalError> {
        let mut size = 1usize;
        for &a in arities {
            size = size.checked_mul(self.radix(a)?).filter(|&s| s <= TO_UNIVERSE_LIMIT).ok_or_else(|| {
                EvalError::Unsupported(format!("third-order universe over {} elements is too large", self.n))
            })?;
        }
        Ok(size)
    }

    fn relation_code(&self, name: &str, arity: usize) -> Result<usize, EvalError> {
        let bits: Vec<bool> = if let Some(r) = self.so.get(name).and_then(|s| s.last()) {
            if r.arity != arity {
                return Err(EvalError::Arity { name: name.to_string(), expected: arity, found: r.arity });
            }
            r.bits.clone()
        } else {
            let vocab = self.s.vocabulary();
            let i = vocab.relation_index(name).ok_or_else(|| EvalError::UnknownRelation(name.to_string()))?;
            if vocab.relations()[i].arity != arity {
                let found = vocab.relations()[i].arity;
                return Err(EvalError::Arity { name: name.to_string(), expected: arity, found });
            }
            all_tuples(self.n, arity).map(|t| self.s.holds_at(i, &t)).collect()
        };
        Ok(bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| 1usize << i).sum())
    }

    fn point(&self, arities: &[usize], codes: &[usize]) -> Result<usize, EvalError> {
        let mut idx = 0;
        for (&a, &c) in arities.iter().zip(codes) {
            idx = idx * self.radix(a)? + c;
        }
        Ok(idx)
    }

    fn to_holds(&self, var: &str, args: &[ToArg]) -> Result<bool, EvalError> {
        let v = self.to.get(var).and_then(|s| s.last()).ok_or_else(|| EvalError::Unbound(var.to_string()))?;
        if v.arities.len() != args.len() {
            return Err(EvalError::Arity { name: var.to_string(), expected: v.arities.len(), found: args.len() });
        }
        let mut codes = Vec::with_capacity(args.len());
        for (arg, &a) in args.iter().zip(&v.arities) {
            codes.push(match (arg, a) {
                (ToArg::Element(t), 0) => self.term(t)?,
                (ToArg::Relation(r), a) if a > 0 => self.relation_code(r, a)?,
                (ToArg::Element(t), a) => self.relation_code(t.name(), a)?,
                (ToArg::Relation(r), _) => self.term(&Term::Var(r.clone()))?,
            });
        }
        Ok(v.bits[self.point(&v.arities, &codes)?])
    }

    fn eval(&mut self, f: &Formula) -> Result<bool, EvalError> {
        match f {
            Formula::Rel { name, args } | Formula::SoAtom { var: name, args } => self.holds(name, args),
            Formula::ToAtom { var, args } => self.to_holds(var, args),
            Formula::Eq(a, b) => Ok(self.term(a)? == self.term(b)?),
            Formula::Not(a) => Ok(!self.eval(a)?),
            Formula::And(fs) => {
                for g in fs {
                    if !self.eval(g)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(fs) => {
                for g in fs {
                    if self.eval(g)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Implies(a, b) => Ok(!self.eval(a)? || self.eval(b)?),
            Formula::Iff(a, b) => Ok(self.eval(a)? == self.eval(b)?),
            Formula::Quant { q, binder, body } => self.quantify(*q, binder, body),
        }
    }

    fn quantify(&mut self, q: Quantifier, binder: &Binder, body: &Formula) -> Result<bool, EvalError> {
        let want = q == Quantifier::Exists;
        match binder {
            Binder::First(x) => {
                let elems: Vec<Element> = match self.order {
                    Order::Forward => (0..self.n).collect(),
                    Order::Reverse => (0..self.n).rev().collect(),
                };
                for e in elems {
                    self.charge()?;
                    self.fo.entry(x.clone()).or_default().push(e);
                    let r = self.eval(body);
                    self.fo.get_mut(x).expect("pushed above").pop();
                    if r? == want {
                        return Ok(want);
                    }
                }
            }
            Binder::Second { name, arity } => {
                let m = self
                    .n
                    .checked_pow(*arity as u32)
                    .filter(|&m| m <= 1 << 20)
                    .ok_or_else(|| EvalError::Unsupported(format!("relation {name} has too many tuples")))?;
                let mut bits = vec![self.order == Order::Reverse; m];
                loop {
                    self.charge()?;
                    self.so.entry(name.clone()).or_default().push(RelVal { arity: *arity, bits: bits.clone() });
                    let r = self.eval(body);
                    self.so.get_mut(name).expect("pushed above").pop();
                    if r? == want {
                        return Ok(want);
                    }
                    if !step(&mut bits, self.order) {
                        break;
                    }
                }
            }
            Binder::Third { name, shape } => {
                let arities = shape.arities().to_vec();
                let size = self.universe(&arities)?;
                let mut bits = vec![self.order == Order::Reverse; size];
                loop {
                    self.charge()?;
                    self.to
                        .entry(name.clone())
                        .or_default()
                        .push(ToVal { arities: arities.clone(), bits: bits.clone() });
                    let r = self.eval(body);
                    self.to.get_mut(name).expect("pushed above").pop();
                    if r? == want {
                        return Ok(want);
                    }
                    if !step(&mut bits, self.order) {
                        break;
                    }
                }
            }
        }
        Ok(!want)
    }
}

/// Truth value of `f` in `s` under `env`, enumerating in [`Order::Forward`].
pub fn eval_naive(s: &FiniteStructure, f: &Formula, env: &Environment, budget: Budget) -> Result<bool, EvalError> {
    eval_naive_ordered(s, f, env, budget, Order::Forward)
}

/// Truth value of `f` in `s` under `env`. Quantifiers try candidates in
/// `order` and stop at the first witness or counterexample; every candidate
/// counts against `budget.max_candidates`. Third-order quantifiers are
/// practical only over one or two elements.
pub fn eval_naive_ordered(
    s: &FiniteStructure,
    f: &Formula,
    env: &Environment,
    budget: Budget,
    order: Order,
) -> Result<bool, EvalError> {
    let n = s.size();
    env.check_domain(n)?;
    let stats = analyze(f);
    if let Some(x) = stats.free_fo_vars.iter().find(|x| env.element(x).is_none()) {
        return Err(EvalError::Unbound(x.clone()));
    }
    let vocab = s.vocabulary();
    if let Some((r, _)) =
        stats.free_so_vars.iter().find(|(r, _)| !env.relations().contains_key(*r) && vocab.relation_index(r).is_none())
    {
        return Err(EvalError::Unbound(r.clone()));
    }
    let mut ev = Naive {
        s,
        n,
        order,
        fo: env.elements().iter().map(|(k, &v)| (k.clone(), vec![v])).collect(),
        so: HashMap::new(),
        to: HashMap::new(),
        used: 0,
        limit: budget.max_candidates,
    };
    for (name, (arity, tuples)) in env.relations() {
        let mut bits = vec![false; n.pow(*arity as u32)];
        for t in tuples {
            bits[lex_index(t, n)] = true;
        }
        ev.so.insert(name.clone(), vec![RelVal { arity: *arity, bits }]);
    }
    for (name, (shape, tuples)) in env.third_order() {
        let arities = shape.arities().to_vec();
        let mut bits = vec![false; ev.universe(&arities)?];
        for t in tuples {
            let codes: Vec<usize> = t
                .iter()
                .map(|c| match c {
                    ToComponent::Element(e) => *e,
                    ToComponent::Relation(r) => r.iter().map(|u| 1usize << lex_index(u, n)).sum(),
                })
                .collect();
            let p = ev.point(&arities, &codes)?;
            bits[p] = true;
        }
        ev.to.insert(name.clone(), vec![ToVal { arities, bits }]);
    }
    ev.eval(f)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::logic::{parse_formula, ToShape};
    use crate::structures::{generate, Family};

    fn truth(s: &FiniteStructure, text: &str) -> Result<bool, EvalError> {
        eval_naive(s, &parse_formula(text).unwrap(), &Environment::new(), Budget::default())
    }

    #[test]
    fn full_set_witness() {
        let s = generate(Family::Cycle(4)).unwrap();
        assert_eq!(truth(&s, "(ex2 A 1 (all1 x (var2 A x)))"), Ok(true));
        assert_eq!(truth(&s, "(all2 A 1 (ex1 x (var2 A x)))"), Ok(false));
    }

    #[test]
    fn counter_order_is_lexicographic() {
        let mut bits = vec![false; 2];
        let mut seen = vec![bits.clone()];
        while step(&mut bits, Order::Forward) {
            seen.push(bits.clone());
        }
        assert_eq!(seen, vec![vec![false, false], vec![true, false], vec![false, true], vec![true, true]]);
        let mut bits = vec![true; 2];
        assert!(step(&mut bits, Order::Reverse));
        assert_eq!(bits, vec![false, true]);
    }

    #[test]
    fn budget_is_a_distinguished_result() {
        let s = generate(Family::Complete(4)).unwrap();
        let f = parse_formula("(all2 A 2 (ex2 B 2 (all1 x (iff (var2 A x x) (var2 B x x)))))").unwrap();
        let r = eval_naive(&s, &f, &Environment::new(), Budget::with_candidates(1000));
        assert!(r.unwrap_err().is_budget_exceeded());
    }

    #[test]
    fn free_variables_need_bindings() {
        let s = generate(Family::LinearDigraph(3)).unwrap();
        let f = parse_formula("(rel succ x y)").unwrap();
        assert_eq!(eval_naive(&s, &f, &Environment::new(), Budget::default()), Err(EvalError::Unbound("x".into())));
        let env = Environment::with_elements([("x", 0), ("y", 1)]);
        assert_eq!(eval_naive(&s, &f, &env, Budget::default()), Ok(true));
    }

    #[test]
    fn bound_relations_shadow_vocabulary() {
        let s = generate(Family::LinearDigraph(2)).unwrap();
        let g = Formula::forall2("succ", 2, Formula::exists1_all(&["a", "b"], Formula::rel("succ", &["a", "b"])));
        assert_eq!(eval_naive(&s, &g, &Environment::new(), Budget::default()), Ok(false));
    }

    #[test]
    fn third_order_nonempty_set_of_subsets() {
        let s = FiniteStructure::empty(crate::structures::Vocabulary::graph(), 2).unwrap();
        let shape = ToShape::new(vec![1]).unwrap();
        // There is a set of subsets containing some subset.
        let f = Formula::exists3(
            "C",
            shape.clone(),
            Formula::exists2("X", 1, Formula::to("C", vec![ToArg::Relation("X".into())])),
        );
        assert_eq!(eval_naive(&s, &f, &Environment::new(), Budget::default()), Ok(true));
        let g = Formula::forall3(
            "C",
            shape.clone(),
            Formula::exists2("X", 1, Formula::to("C", vec![ToArg::Relation("X".into())])),
        );
        assert_eq!(eval_naive(&s, &g, &Environment::new(), Budget::default()), Ok(false));
        let mut env = Environment::new();
        let empty: BTreeSet<Vec<usize>> = BTreeSet::new();
        env.bind_third("C", shape, BTreeSet::from([vec![ToComponent::Relation(empty)]])).unwrap();
        let h = Formula::exists2(
            "X",
            1,
            Formula::and(vec![
                Formula::to("C", vec![ToArg::Relation("X".into())]),
                Formula::forall1("x", Formula::not(Formula::so("X", &["x"]))),
            ]),
        );
        assert_eq!(eval_naive(&s, &h, &env, Budget::default()), Ok(true));
    }

    #[test]
    fn reverse_order_agrees() {
        let s = generate(Family::Cycle(3)).unwrap();
        let f =
            parse_formula("(ex2 A 1 (all1 x (iff (var2 A x) (not (ex1 y (and (rel E x y) (var2 A y)))))))").unwrap();
        let fwd = eval_naive_ordered(&s, &f, &Environment::new(), Budget::default(), Order::Forward);
        let rev = eval_naive_ordered(&s, &f, &Environment::new(), Budget::default(), Order::Reverse);
        assert_eq!(fwd, rev);
    }
}
