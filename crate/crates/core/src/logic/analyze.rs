use std::collections::{BTreeMap, BTreeSet};

use super::{Binder, Formula, Quantifier, Term, ToArg};

/// Where a binding site sits relative to negations. Sites under `iff` occur
/// in both polarities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
    Mixed,
}

impl Polarity {
    fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
            Polarity::Mixed => Polarity::Mixed,
        }
    }
}

/// One second-order binding site, in pre-order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoBinding {
    pub name: String,
    pub arity: usize,
    /// The quantifier as written at the binding site.
    pub quantifier: Quantifier,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaStats {
    pub free_fo_vars: BTreeSet<String>,
    pub free_so_vars: BTreeMap<String, usize>,
    pub max_so_arity: usize,
    pub so_bindings: Vec<SoBinding>,
    /// Second-order quantifier blocks of a prenex form that pulls
    /// existentials up and universals down, outermost first. Sites under
    /// `iff` contribute to both polarities.
    pub so_prefix: Vec<(Quantifier, Vec<String>)>,
    pub to_depth: usize,
}

impl FormulaStats {
    pub fn is_sentence(&self) -> bool {
        self.free_fo_vars.is_empty() && self.free_so_vars.is_empty()
    }

    /// Binding sites written with `∀`.
    pub fn universal_so_bindings(&self) -> Vec<&SoBinding> {
        self.so_bindings.iter().filter(|b| b.quantifier == Quantifier::Forall).collect()
    }

    /// The prefix written as `∃R ∃V ∀S`.
    pub fn so_prefix_text(&self) -> String {
        let parts: Vec<String> = self
            .so_prefix
            .iter()
            .flat_map(|(q, names)| names.iter().map(move |n| format!("{}{n}", q.symbol())))
            .collect();
        parts.join(" ")
    }
}

pub fn analyze(f: &Formula) -> FormulaStats {
    let mut stats = FormulaStats {
        free_fo_vars: BTreeSet::new(),
        free_so_vars: BTreeMap::new(),
        max_so_arity: 0,
        so_bindings: Vec::new(),
        so_prefix: Vec::new(),
        to_depth: 0,
    };
    let mut scope: Vec<&str> = Vec::new();
    collect(f, Polarity::Positive, 0, &mut scope, &mut stats);

    let mut levels: Vec<Vec<String>> = Vec::new();
    levelize(f, true, None, &mut levels);
    stats.so_prefix = levels
        .into_iter()
        .enumerate()
        .filter(|(_, names)| !names.is_empty())
        .map(|(l, names)| (if l % 2 == 0 { Quantifier::Exists } else { Quantifier::Forall }, names))
        .collect();
    stats
}

fn collect<'a>(f: &'a Formula, pol: Polarity, to_depth: usize, scope: &mut Vec<&'a str>, stats: &mut FormulaStats) {
    let term = |t: &Term, scope: &Vec<&str>, stats: &mut FormulaStats| {
        if let Term::Var(x) = t {
            if !scope.contains(&x.as_str()) {
                stats.free_fo_vars.insert(x.clone());
            }
        }
    };
    match f {
        Formula::Rel { args, .. } => args.iter().for_each(|t| term(t, scope, stats)),
        Formula::SoAtom { var, args } => {
            if !scope.contains(&var.as_str()) {
                stats.free_so_vars.insert(var.clone(), args.len());
            }
            args.iter().for_each(|t| term(t, scope, stats));
        }
        Formula::ToAtom { args, .. } => {
            for a in args {
                if let ToArg::Element(t) = a {
                    term(t, scope, stats);
                }
            }
        }
        Formula::Eq(a, b) => {
            term(a, scope, stats);
            term(b, scope, stats);
        }
        Formula::Not(g) => collect(g, pol.flip(), to_depth, scope, stats),
        Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| collect(g, pol, to_depth, scope, stats)),
        Formula::Implies(a, b) => {
            collect(a, pol.flip(), to_depth, scope, stats);
            collect(b, pol, to_depth, scope, stats);
        }
        Formula::Iff(a, b) => {
            collect(a, Polarity::Mixed, to_depth, scope, stats);
            collect(b, Polarity::Mixed, to_depth, scope, stats);
        }
        Formula::Quant { q, binder, body } => {
            let mut depth = to_depth;
            match binder {
                Binder::Second { name, arity } => {
                    stats.max_so_arity = stats.max_so_arity.max(*arity);
                    stats.so_bindings.push(SoBinding {
                        name: name.clone(),
                        arity: *arity,
                        quantifier: *q,
                        polarity: pol,
                    });
                }
                Binder::Third { .. } => {
                    depth += 1;
                    stats.to_depth = stats.to_depth.max(depth);
                }
                Binder::First(_) => {}
            }
            scope.push(binder.name());
            collect(body, pol, depth, scope, stats);
            scope.pop();
        }
    }
}

fn has_so_binder(f: &Formula) -> bool {
    let mut found = false;
    f.visit(|g| {
        if matches!(g, Formula::Quant { binder: Binder::Second { .. }, .. }) {
            found = true;
        }
    });
    found
}

/// Assigns each second-order site the lowest level compatible with the
/// sites above it; level 0 is existential.
fn levelize(f: &Formula, positive: bool, ctx: Option<(usize, Quantifier)>, levels: &mut Vec<Vec<String>>) {
    match f {
        Formula::Not(g) => levelize(g, !positive, ctx, levels),
        Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| levelize(g, positive, ctx, levels)),
        Formula::Implies(a, b) => {
            levelize(a, !positive, ctx, levels);
            levelize(b, positive, ctx, levels);
        }
        Formula::Iff(a, b) => {
            for g in [a, b] {
                if has_so_binder(g) {
                    levelize(g, true, ctx, levels);
                    levelize(g, false, ctx, levels);
                }
            }
        }
        Formula::Quant { q, binder: Binder::Second { name, .. }, body } => {
            let eff = if positive { *q } else { q.dual() };
            let level = match ctx {
                None => usize::from(eff == Quantifier::Forall),
                Some((l, k)) if k == eff => l,
                Some((l, _)) => l + 1,
            };
            if levels.len() <= level {
                levels.resize(level + 1, Vec::new());
            }
            if !levels[level].contains(name) {
                levels[level].push(name.clone());
            }
            levelize(body, positive, Some((level, eff)), levels);
        }
        Formula::Quant { body, .. } => levelize(body, positive, ctx, levels),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;

    #[test]
    fn free_variables() {
        let s = analyze(&parse_formula("(and (rel E x y) (eq x y))").unwrap());
        assert_eq!(s.free_fo_vars, BTreeSet::from(["x".to_string(), "y".to_string()]));
        assert!(s.free_so_vars.is_empty());
        let s = analyze(&parse_formula("(ex1 x (var2 B x y))").unwrap());
        assert_eq!(s.free_fo_vars, BTreeSet::from(["y".to_string()]));
        assert_eq!(s.free_so_vars.get("B"), Some(&2));
    }

    #[test]
    fn polarity_and_prefix() {
        let f =
            parse_formula("(ex2 R 2 (and (all2 S 1 (not (ex2 T 1 (var2 T x)))) (ex2 U 3 (var2 U x x x))))").unwrap();
        let s = analyze(&f);
        assert_eq!(s.max_so_arity, 3);
        assert_eq!(s.so_bindings[2].polarity, Polarity::Negative);
        assert_eq!(s.so_prefix_text(), "∃R ∃U ∀S ∀T");
        assert_eq!(s.universal_so_bindings().len(), 1);
    }

    #[test]
    fn iff_counts_both_ways() {
        let f = parse_formula("(iff (rel E x x) (ex2 A 1 (var2 A x)))").unwrap();
        let s = analyze(&f);
        assert_eq!(s.so_bindings[0].polarity, Polarity::Mixed);
        assert_eq!(s.so_prefix.len(), 2);
    }

    #[test]
    fn third_order_depth() {
        let f = parse_formula("(ex3 C (1) (all3 D (1 2) (and)))").unwrap();
        assert_eq!(analyze(&f).to_depth, 2);
    }
}
