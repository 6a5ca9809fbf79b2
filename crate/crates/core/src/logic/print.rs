use super::{Binder, Formula, Quantifier, Term, ToArg};

const WIDTH: usize = 80;

/// Single-line s-expression text.
pub fn to_sexp(f: &Formula) -> String {
    let mut out = String::new();
    write_flat(f, &mut out);
    out
}

/// Indented s-expression text: a node stays on one line when it fits in 80
/// columns, otherwise its children go on their own lines.
pub fn pretty_print(f: &Formula) -> String {
    let mut out = String::new();
    write_pretty(f, 0, &mut out);
    out.push('\n');
    out
}

fn head(f: &Formula) -> String {
    let kw = |q: Quantifier, order: u8| {
        let prefix = match q {
            Quantifier::Exists => "ex",
            Quantifier::Forall => "all",
        };
        format!("{prefix}{order}")
    };
    match f {
        Formula::Rel { name, args } => atom("rel", name, args.iter().map(Term::name)),
        Formula::SoAtom { var, args } => atom("var2", var, args.iter().map(Term::name)),
        Formula::ToAtom { var, args } => atom("var3", var, args.iter().map(ToArg::name)),
        Formula::Eq(a, b) => format!("(eq {} {}", a.name(), b.name()),
        Formula::Not(_) => "(not".into(),
        Formula::And(_) => "(and".into(),
        Formula::Or(_) => "(or".into(),
        Formula::Implies(..) => "(implies".into(),
        Formula::Iff(..) => "(iff".into(),
        Formula::Quant { q, binder, .. } => match binder {
            Binder::First(x) => format!("({} {x}", kw(*q, 1)),
            Binder::Second { name, arity } => format!("({} {name} {arity}", kw(*q, 2)),
            Binder::Third { name, shape } => {
                let a: Vec<String> = shape.arities().iter().map(|a| a.to_string()).collect();
                format!("({} {name} ({})", kw(*q, 3), a.join(" "))
            }
        },
    }
}

fn atom<'a>(kw: &str, name: &str, args: impl Iterator<Item = &'a str>) -> String {
    let mut s = format!("({kw} {name}");
    for a in args {
        s.push(' ');
        s.push_str(a);
    }
    s
}

fn write_flat(f: &Formula, out: &mut String) {
    out.push_str(&head(f));
    for c in f.children() {
        out.push(' ');
        write_flat(c, out);
    }
    out.push(')');
}

/// Flat length of `f`, or `None` once it exceeds `limit`.
fn flat_len(f: &Formula, limit: usize) -> Option<usize> {
    let mut len = head(f).len() + 1;
    for c in f.children() {
        if len > limit {
            return None;
        }
        len += 1 + flat_len(c, limit - len)?;
    }
    (len <= limit).then_some(len)
}

fn write_pretty(f: &Formula, indent: usize, out: &mut String) {
    if flat_len(f, WIDTH.saturating_sub(indent)).is_some() || f.children().is_empty() {
        write_flat(f, out);
        return;
    }
    out.push_str(&head(f));
    for c in f.children() {
        out.push('\n');
        out.push_str(&" ".repeat(indent + 2));
        write_pretty(c, indent + 2, out);
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::super::{parse_formula, ToShape};
    use super::*;

    #[test]
    fn canonical_printing() {
        let f = Formula::exists2("A", 1, Formula::exists1("x", Formula::so("A", &["x"])));
        assert_eq!(to_sexp(&f), "(ex2 A 1 (ex1 x (var2 A x)))");
    }

    #[test]
    fn nested_negation_is_kept() {
        let f = Formula::not(Formula::not(Formula::eq("x", "y")));
        assert_eq!(to_sexp(&f), "(not (not (eq x y)))");
    }

    #[test]
    fn third_order_and_constants() {
        let shape = ToShape::new(vec![1, 0]).unwrap();
        let f = Formula::exists3("C", shape, Formula::truth());
        assert_eq!(to_sexp(&f), "(ex3 C (1 0) (and))");
    }

    #[test]
    fn long_formulas_break_lines_and_reparse() {
        let atoms: Vec<Formula> = (0..12).map(|i| Formula::rel("E", &[format!("x{i}"), format!("y{i}")])).collect();
        let f = Formula::or(vec![Formula::and(atoms.clone()), Formula::not(Formula::and(atoms))]);
        let text = pretty_print(&f);
        assert!(text.lines().count() > 1);
        assert!(text.lines().all(|l| l.len() <= WIDTH || !l.trim_start().starts_with("(and")));
        assert_eq!(parse_formula(&text).unwrap(), f);
    }
}
