//! Quantified Boolean formulas in prenex form with a fully parenthesized
//! matrix.
//!
//! Text syntax: blocks `E x1 x2` / `A x3`, then the matrix in parentheses.
//! Binary connectives and negation carry their own parentheses, and the
//! outer pair around the matrix doubles as the parentheses of its top
//! connective: `E x1 A x2 ((!x1)|x2)` and `E x1 (x1)`.

use std::collections::BTreeSet;
use std::fmt;

use crate::logic::Quantifier;

use super::QbfError;

/// A Boolean variable `x_n`, `n >= 1`.
pub type QVar = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Matrix {
    Const(bool),
    Var(QVar),
    Not(Box<Matrix>),
    And(Box<Matrix>, Box<Matrix>),
    Or(Box<Matrix>, Box<Matrix>),
}

impl Matrix {
    pub fn var(n: QVar) -> Matrix {
        Matrix::Var(n)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(m: Matrix) -> Matrix {
        Matrix::Not(Box::new(m))
    }

    pub fn and(a: Matrix, b: Matrix) -> Matrix {
        Matrix::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Matrix, b: Matrix) -> Matrix {
        Matrix::Or(Box::new(a), Box::new(b))
    }

    pub fn vars(&self) -> BTreeSet<QVar> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<QVar>) {
        match self {
            Matrix::Const(_) => {}
            Matrix::Var(v) => {
                out.insert(*v);
            }
            Matrix::Not(m) => m.collect_vars(out),
            Matrix::And(a, b) | Matrix::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn eval(&self, value: &impl Fn(QVar) -> bool) -> bool {
        match self {
            Matrix::Const(c) => *c,
            Matrix::Var(v) => value(*v),
            Matrix::Not(m) => !m.eval(value),
            Matrix::And(a, b) => a.eval(value) && b.eval(value),
            Matrix::Or(a, b) => a.eval(value) || b.eval(value),
        }
    }

    /// Three-valued evaluation; `None` when unassigned variables decide.
    pub fn eval_partial(&self, value: &impl Fn(QVar) -> Option<bool>) -> Option<bool> {
        match self {
            Matrix::Const(c) => Some(*c),
            Matrix::Var(v) => value(*v),
            Matrix::Not(m) => m.eval_partial(value).map(|b| !b),
            Matrix::And(a, b) => match (a.eval_partial(value), b.eval_partial(value)) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
            Matrix::Or(a, b) => match (a.eval_partial(value), b.eval_partial(value)) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            },
        }
    }

    fn is_compound(&self) -> bool {
        !matches!(self, Matrix::Const(_) | Matrix::Var(_))
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Matrix::Const(c) => write!(f, "{}", u8::from(*c)),
            Matrix::Var(v) => write!(f, "x{v}"),
            Matrix::Not(m) => write!(f, "(!{m})"),
            Matrix::And(a, b) => write!(f, "({a}&{b})"),
            Matrix::Or(a, b) => write!(f, "({a}|{b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    pub quantifier: Quantifier,
    pub vars: Vec<QVar>,
}

/// A closed QBF: strictly alternating non-empty blocks, pairwise distinct
/// quantified variables, and no free variables in the matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QbfAst {
    blocks: Vec<Block>,
    matrix: Matrix,
}

impl QbfAst {
    /// Builds from a quantifier sequence, merging consecutive quantifiers of
    /// equal polarity into one block.
    pub fn new(prefix: &[(Quantifier, QVar)], matrix: Matrix) -> Result<QbfAst, QbfError> {
        if prefix.is_empty() {
            return Err(QbfError::Malformed("at least one quantifier is required".into()));
        }
        let mut blocks: Vec<Block> = Vec::new();
        let mut seen = BTreeSet::new();
        for &(q, v) in prefix {
            if v == 0 {
                return Err(QbfError::Malformed("variables are numbered from 1".into()));
            }
            if !seen.insert(v) {
                return Err(QbfError::DuplicateVariable(v));
            }
            match blocks.last_mut() {
                Some(b) if b.quantifier == q => b.vars.push(v),
                _ => blocks.push(Block { quantifier: q, vars: vec![v] }),
            }
        }
        if let Some(&free) = matrix.vars().iter().find(|v| !seen.contains(v)) {
            return Err(QbfError::FreeVariable(free));
        }
        Ok(QbfAst { blocks, matrix })
    }

    pub fn from_blocks(blocks: Vec<Block>, matrix: Matrix) -> Result<QbfAst, QbfError> {
        let prefix: Vec<(Quantifier, QVar)> =
            blocks.iter().flat_map(|b| b.vars.iter().map(move |&v| (b.quantifier, v))).collect();
        QbfAst::new(&prefix, matrix)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Quantified variables in prefix order.
    pub fn prefix_vars(&self) -> Vec<QVar> {
        self.blocks.iter().flat_map(|b| b.vars.iter().copied()).collect()
    }

    pub fn var_count(&self) -> usize {
        self.blocks.iter().map(|b| b.vars.len()).sum()
    }

    /// Whether the first block is existential, as required of `QBF_k`.
    pub fn starts_existential(&self) -> bool {
        self.blocks[0].quantifier == Quantifier::Exists
    }
}

impl fmt::Display for QbfAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            f.write_str(if b.quantifier == Quantifier::Exists { "E" } else { "A" })?;
            for v in &b.vars {
                write!(f, " x{v}")?;
            }
            f.write_str(" ")?;
        }
        if self.matrix.is_compound() {
            write!(f, "{}", self.matrix)
        } else {
            write!(f, "({})", self.matrix)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Tok {
    Exists,
    Forall,
    Var(QVar),
    Const(bool),
    Open,
    Close,
    Not,
    And,
    Or,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, QbfError> {
    let mut toks = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        i += 1;
        let tok = match c {
            c if c.is_whitespace() => continue,
            'E' | '∃' => Tok::Exists,
            'A' | '∀' => Tok::Forall,
            '(' => Tok::Open,
            ')' => Tok::Close,
            '!' | '¬' => Tok::Not,
            '&' | '∧' => Tok::And,
            '|' | '∨' => Tok::Or,
            '0' => Tok::Const(false),
            '1' => Tok::Const(true),
            'x' => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                if digits.is_empty() || digits.starts_with('0') {
                    return Err(QbfError::Syntax { offset: pos, message: "expected x1, x2, …".into() });
                }
                let n = digits
                    .parse()
                    .map_err(|_| QbfError::Syntax { offset: pos, message: "variable index too large".into() })?;
                Tok::Var(n)
            }
            other => return Err(QbfError::Syntax { offset: pos, message: format!("unexpected {other:?}") }),
        };
        toks.push((tok, pos));
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(_, o)| *o)
    }

    fn fail<T>(&self, message: &str) -> Result<T, QbfError> {
        Err(QbfError::Syntax { offset: self.offset(), message: message.into() })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), QbfError> {
        if self.peek() == Some(&want) {
            self.at += 1;
            Ok(())
        } else {
            self.fail(&format!("expected {what}"))
        }
    }

    /// `var | const | '(' inner ')'`
    fn matrix(&mut self) -> Result<Matrix, QbfError> {
        match self.peek().cloned() {
            Some(Tok::Var(v)) => {
                self.at += 1;
                Ok(Matrix::Var(v))
            }
            Some(Tok::Const(c)) => {
                self.at += 1;
                Ok(Matrix::Const(c))
            }
            Some(Tok::Open) => {
                self.at += 1;
                let m = self.inner()?;
                self.expect(Tok::Close, "`)`")?;
                Ok(m)
            }
            _ => self.fail("expected a variable, constant or `(`"),
        }
    }

    /// `'!' matrix | matrix [('&'|'|') matrix]`
    fn inner(&mut self) -> Result<Matrix, QbfError> {
        if self.peek() == Some(&Tok::Not) {
            self.at += 1;
            return Ok(Matrix::not(self.matrix()?));
        }
        let left = self.matrix()?;
        match self.peek() {
            Some(Tok::And) => {
                self.at += 1;
                Ok(Matrix::and(left, self.matrix()?))
            }
            Some(Tok::Or) => {
                self.at += 1;
                Ok(Matrix::or(left, self.matrix()?))
            }
            _ => Ok(left),
        }
    }
}

pub fn parse_qbf(text: &str) -> Result<QbfAst, QbfError> {
    parse_tokens(lex(text)?, text.len())
}

/// Parses a token stream; offsets index the original input.
pub(super) fn parse_tokens(toks: Vec<(Tok, usize)>, end: usize) -> Result<QbfAst, QbfError> {
    let mut p = Parser { toks, at: 0, end };
    let mut prefix = Vec::new();
    while let Some(q) = p.peek().cloned() {
        let q = match q {
            Tok::Exists => Quantifier::Exists,
            Tok::Forall => Quantifier::Forall,
            _ => break,
        };
        p.at += 1;
        let mut any = false;
        while let Some(Tok::Var(v)) = p.peek().cloned() {
            p.at += 1;
            prefix.push((q, v));
            any = true;
        }
        if !any {
            return p.fail("quantifier without variables");
        }
    }
    if prefix.is_empty() {
        return p.fail("expected a quantifier block");
    }
    p.expect(Tok::Open, "`(` opening the matrix")?;
    let matrix = p.inner()?;
    p.expect(Tok::Close, "`)` closing the matrix")?;
    if p.peek().is_some() {
        return p.fail("trailing input after the matrix");
    }
    QbfAst::new(&prefix, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_block_example_parses() {
        let q = parse_qbf("E x1 A x2 ((!x1)|x2)").unwrap();
        assert_eq!(q.blocks().len(), 2);
        assert_eq!(q.matrix(), &Matrix::or(Matrix::not(Matrix::var(1)), Matrix::var(2)));
        assert_eq!(q.to_string(), "E x1 A x2 ((!x1)|x2)");
    }

    #[test]
    fn free_variable_is_rejected() {
        assert_eq!(parse_qbf("E x1 (x1 & x2)"), Err(QbfError::FreeVariable(2)));
    }

    #[test]
    fn same_polarity_blocks_merge() {
        let q = parse_qbf("E x1 E x2 (x1&x2)").unwrap();
        assert_eq!(q.blocks(), &[Block { quantifier: Quantifier::Exists, vars: vec![1, 2] }]);
    }

    #[test]
    fn duplicates_and_parentheses() {
        assert_eq!(parse_qbf("E x1 A x1 (x1)"), Err(QbfError::DuplicateVariable(1)));
        assert!(matches!(parse_qbf("E x1 ((x1)"), Err(QbfError::Syntax { .. })));
        assert!(matches!(parse_qbf("E x1 (x1&x1&x1)"), Err(QbfError::Syntax { .. })));
        assert!(matches!(parse_qbf("E x1 x1"), Err(QbfError::Syntax { .. })));
    }

    #[test]
    fn bare_variable_and_redundant_wrapper() {
        let q = parse_qbf("E x1 (x1)").unwrap();
        assert_eq!(q.to_string(), "E x1 (x1)");
        let r = parse_qbf("E x1 ((!x1))").unwrap();
        assert_eq!(r.to_string(), "E x1 (!x1)");
        assert_eq!(parse_qbf("∃x1∀x2((¬x1)∨x2)").unwrap(), parse_qbf("E x1 A x2 ((!x1)|x2)").unwrap());
    }

    #[test]
    fn partial_evaluation_short_circuits() {
        let m = Matrix::and(Matrix::var(1), Matrix::var(2));
        assert_eq!(m.eval_partial(&|v| (v == 1).then_some(false)), Some(false));
        assert_eq!(m.eval_partial(&|v| (v == 1).then_some(true)), None);
    }
}
