//! Line-based text format for structures.
//!
//! ```text
//! domain 3
//! const c 0
//! rel succ 2
//! 0 1
//! 1 2
//! end
//! ```
//!
//! `#` starts a comment. Serialization lists relations in vocabulary order
//! with tuples sorted lexicographically.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{Element, FiniteStructure, Relation, RelationSymbol, StructureError, Tuple, Vocabulary};

pub fn serialize_structure(s: &FiniteStructure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "domain {}", s.size());
    for c in s.vocabulary().constants() {
        let _ = writeln!(out, "const {c} {}", s.constant(c).unwrap_or(0));
    }
    for (i, r) in s.vocabulary().relations().iter().enumerate() {
        let _ = writeln!(out, "rel {} {}", r.name, r.arity);
        for t in s.tuples_at(i).iter() {
            let line: Vec<String> = t.iter().map(|x| x.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out.push_str("end\n");
    }
    out
}

struct Block {
    symbol: RelationSymbol,
    tuples: BTreeSet<Tuple>,
}

pub fn parse_structure(text: &str) -> Result<FiniteStructure, StructureError> {
    let err = |line: usize, message: String| StructureError::Parse { line, message };
    let mut size: Option<usize> = None;
    let mut constants: Vec<(String, Element)> = Vec::new();
    let mut blocks: Vec<Block> = Vec::new();
    let mut open: Option<Block> = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let Some(n) = size else {
            match words.as_slice() {
                ["domain", n] => {
                    let n: usize = n.parse().map_err(|_| err(line_no, format!("bad domain size {n:?}")))?;
                    if n == 0 {
                        return Err(err(line_no, "domain size must be positive".into()));
                    }
                    size = Some(n);
                    continue;
                }
                _ => return Err(err(line_no, "expected `domain N`".into())),
            }
        };
        if let Some(block) = open.as_mut() {
            if words == ["end"] {
                blocks.push(open.take().expect("block is open"));
                continue;
            }
            let mut tuple = Vec::with_capacity(words.len());
            for w in &words {
                let c: Element = w.parse().map_err(|_| err(line_no, format!("bad tuple component {w:?}")))?;
                if c >= n {
                    return Err(err(line_no, format!("component {c} out of range")));
                }
                tuple.push(c);
            }
            if tuple.len() != block.symbol.arity {
                return Err(err(
                    line_no,
                    format!(
                        "arity mismatch: {} expects {} components, got {}",
                        block.symbol.name,
                        block.symbol.arity,
                        tuple.len()
                    ),
                ));
            }
            block.tuples.insert(tuple);
            continue;
        }
        match words.as_slice() {
            ["const", name, value] => {
                let v: Element = value.parse().map_err(|_| err(line_no, format!("bad constant value {value:?}")))?;
                if v >= n {
                    return Err(err(line_no, format!("component {v} out of range")));
                }
                if constants.iter().any(|(c, _)| c == name) {
                    return Err(err(line_no, format!("duplicate constant {name}")));
                }
                constants.push((name.to_string(), v));
            }
            ["rel", name, arity] => {
                let arity: usize = arity.parse().map_err(|_| err(line_no, format!("bad arity {arity:?}")))?;
                if arity == 0 {
                    return Err(err(line_no, format!("relation {name} has arity 0")));
                }
                if blocks.iter().any(|b| b.symbol.name == *name) {
                    return Err(err(line_no, format!("duplicate relation header {name}")));
                }
                open = Some(Block { symbol: RelationSymbol::new(*name, arity), tuples: BTreeSet::new() });
            }
            _ => return Err(err(line_no, format!("unexpected line {line:?}"))),
        }
    }
    if let Some(b) = open {
        return Err(err(last_line, format!("relation {} is missing `end`", b.symbol.name)));
    }
    let size = size.ok_or_else(|| err(last_line.max(1), "missing `domain N`".into()))?;
    let vocab = Vocabulary::new(
        blocks.iter().map(|b| b.symbol.clone()).collect(),
        constants.iter().map(|(c, _)| c.clone()).collect(),
    )
    .map_err(|e| err(last_line, e.to_string()))?;
    let mut s = FiniteStructure::empty(vocab, size)?;
    for b in blocks {
        let name = b.symbol.name.clone();
        s.set_relation(&name, Relation::Explicit(b.tuples))?;
    }
    for (c, v) in constants {
        s.set_constant(&c, v)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::super::{generate, Family};
    use super::*;

    #[test]
    fn linear_digraph_two_serializes_exactly() {
        let g = generate(Family::LinearDigraph(2)).unwrap();
        assert_eq!(serialize_structure(&g), "domain 2\nrel succ 2\n0 1\nend\n");
    }

    #[test]
    fn hypercube_round_trips() {
        let q2 = generate(Family::Hypercube(2)).unwrap();
        assert_eq!(parse_structure(&serialize_structure(&q2)).unwrap(), q2);
    }

    #[test]
    fn out_of_range_component_reports_line() {
        let e = parse_structure("domain 2\nrel E 2\n0 5\nend").unwrap_err();
        assert_eq!(e, StructureError::Parse { line: 3, message: "component 5 out of range".into() });
    }

    #[test]
    fn arity_and_duplicate_header_errors() {
        let e = parse_structure("domain 2\nrel E 2\n0\nend\n").unwrap_err();
        assert!(matches!(e, StructureError::Parse { line: 3, .. }));
        let e = parse_structure("domain 2\nrel E 2\nend\nrel E 2\nend\n").unwrap_err();
        assert!(matches!(e, StructureError::Parse { line: 4, .. }));
    }

    #[test]
    fn comments_constants_and_whitespace() {
        let s = parse_structure("# c\ndomain 3  # three\nconst c 2\n\nrel P 1\n  1 \nend\n").unwrap();
        assert_eq!(s.constant("c"), Some(2));
        assert!(s.holds("P", &[1]));
        assert_eq!(serialize_structure(&s), "domain 3\nconst c 2\nrel P 1\n1\nend\n");
    }

    #[test]
    fn missing_end_is_an_error() {
        assert!(parse_structure("domain 2\nrel E 2\n0 1\n").is_err());
    }
}
