use std::fmt;
use std::str::FromStr;

use super::{FiniteStructure, StructureError, Vocabulary, EDGE, SUCC};

/// Structure families with canonical vertex numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `Q_m`: vertices are the bitstrings of length `m`, read as integers.
    Hypercube(usize),
    /// Successor chain `0 -> 1 -> … -> n-1`.
    LinearDigraph(usize),
    /// For `n >= 3` the usual cycle; `cycle(2)` is a single edge and
    /// `cycle(1)` an isolated vertex.
    Cycle(usize),
    Complete(usize),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Hypercube(_) => "hypercube",
            Family::LinearDigraph(_) => "linear",
            Family::Cycle(_) => "cycle",
            Family::Complete(_) => "complete",
        }
    }

    pub fn parameter(&self) -> usize {
        match *self {
            Family::Hypercube(n) | Family::LinearDigraph(n) | Family::Cycle(n) | Family::Complete(n) => n,
        }
    }

    /// Parses a family name (`hypercube`, `linear`, `cycle`, `complete`)
    /// together with its size parameter.
    pub fn from_name(kind: &str, n: usize) -> Result<Family, StructureError> {
        match kind {
            "hypercube" => Ok(Family::Hypercube(n)),
            "linear" | "linear-digraph" | "linearDigraph" => Ok(Family::LinearDigraph(n)),
            "cycle" => Ok(Family::Cycle(n)),
            "complete" => Ok(Family::Complete(n)),
            _ => Err(StructureError::InvalidParameter(format!("unknown family {kind}"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.parameter())
    }
}

impl FromStr for Family {
    type Err = StructureError;

    /// Accepts `name(n)` as produced by `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || StructureError::InvalidParameter(format!("cannot parse family {s:?}"));
        let (name, rest) = s.split_once('(').ok_or_else(bad)?;
        let n = rest.strip_suffix(')').ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        Family::from_name(name.trim(), n)
    }
}

/// Largest hypercube dimension the generator accepts.
const MAX_HYPERCUBE_DIM: usize = 20;

pub fn generate(kind: Family) -> Result<FiniteStructure, StructureError> {
    let n = kind.parameter();
    if n == 0 {
        return Err(StructureError::InvalidParameter(format!("{kind}: parameter must be >= 1")));
    }
    match kind {
        Family::Hypercube(m) => {
            if m > MAX_HYPERCUBE_DIM {
                return Err(StructureError::InvalidParameter(format!("{kind}: dimension above {MAX_HYPERCUBE_DIM}")));
            }
            let size = 1usize << m;
            let mut g = FiniteStructure::empty(Vocabulary::graph(), size)?;
            for v in 0..size {
                for bit in 0..m {
                    g.insert(EDGE, vec![v, v ^ (1 << bit)])?;
                }
            }
            Ok(g)
        }
        Family::LinearDigraph(n) => {
            let mut g = FiniteStructure::empty(Vocabulary::successor(), n)?;
            for i in 0..n - 1 {
                g.insert(SUCC, vec![i, i + 1])?;
            }
            Ok(g)
        }
        Family::Cycle(n) => {
            let edges: Vec<_> = match n {
                1 => vec![],
                2 => vec![(0, 1)],
                _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
            };
            FiniteStructure::graph(n, &edges)
        }
        Family::Complete(n) => {
            let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            FiniteStructure::graph(n, &edges)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamming_one_pairs(m: usize) -> usize {
        let size = 1usize << m;
        (0..size).flat_map(|a| (0..size).map(move |b| (a, b))).filter(|(a, b)| (a ^ b).count_ones() == 1).count()
    }

    #[test]
    fn hypercube_three_has_24_directed_edges() {
        let q3 = generate(Family::Hypercube(3)).unwrap();
        assert_eq!(q3.size(), 8);
        let e = q3.tuples(EDGE).unwrap().len();
        assert_eq!(e, hamming_one_pairs(3));
        assert_eq!(e, 24);
    }

    #[test]
    fn linear_digraph_four() {
        let g = generate(Family::LinearDigraph(4)).unwrap();
        let succ: Vec<_> = g.tuples(SUCC).unwrap().iter().cloned().collect();
        assert_eq!(succ, vec![vec![0, 1], vec![1, 2], vec![2, 3]]);
    }

    #[test]
    fn cycle_three_is_a_triangle() {
        let g = generate(Family::Cycle(3)).unwrap();
        assert_eq!(g.tuples(EDGE).unwrap().len(), 6);
        assert!(g.holds(EDGE, &[0, 2]) && g.holds(EDGE, &[2, 0]));
    }

    #[test]
    fn zero_parameter_is_rejected() {
        for kind in [Family::Hypercube(0), Family::LinearDigraph(0), Family::Cycle(0), Family::Complete(0)] {
            assert!(matches!(generate(kind), Err(StructureError::InvalidParameter(_))));
        }
    }

    #[test]
    fn family_display_round_trips() {
        for f in [Family::Hypercube(3), Family::LinearDigraph(4), Family::Cycle(6)] {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
    }
}
