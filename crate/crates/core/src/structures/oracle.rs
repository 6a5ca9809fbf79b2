//! Independent graph oracles used as ground truth for the logic engines.

use std::collections::VecDeque;

use super::{generate, Element, Family, FiniteStructure, StructureError, EDGE};

/// Largest domain accepted by the brute-force isomorphism search.
pub const ISOMORPHISM_LIMIT: usize = 8;

/// Adjacency of a symmetric, loop-free `E`.
fn simple_graph(g: &FiniteStructure) -> Result<Vec<Vec<Element>>, StructureError> {
    let adj = g.adjacency()?;
    for (a, ns) in adj.iter().enumerate() {
        for &b in ns {
            if a == b {
                return Err(StructureError::Precondition(format!("loop at vertex {a}")));
            }
            if !g.holds(EDGE, &[b, a]) {
                return Err(StructureError::Precondition(format!("edge ({a},{b}) has no reverse")));
            }
        }
    }
    Ok(adj)
}

/// True iff `g` is isomorphic to `Q_m` for some `m >= 1`.
///
/// Labels vertices by breadth-first search from vertex 0: the neighbours of
/// the root get the unit vectors, and every vertex at distance `d >= 2` gets
/// the bitwise or of its neighbours at distance `d-1`. A labelling that is a
/// bijection onto `{0,1}^m` with every edge at Hamming distance 1 is an
/// isomorphism, since both graphs have `m * 2^(m-1)` edges.
pub fn is_hypercube(g: &FiniteStructure) -> Result<bool, StructureError> {
    let adj = simple_graph(g)?;
    let n = adj.len();
    if n < 2 || !n.is_power_of_two() {
        return Ok(false);
    }
    let m = n.trailing_zeros() as usize;
    if adj.iter().any(|ns| ns.len() != m) {
        return Ok(false);
    }
    if let Some(labels) = bfs_labels(&adj, m) {
        if labelling_is_isomorphism(&adj, &labels) {
            return Ok(true);
        }
    }
    if n <= ISOMORPHISM_LIMIT {
        return are_isomorphic(g, &generate(Family::Hypercube(m))?);
    }
    Ok(false)
}

fn bfs_labels(adj: &[Vec<Element>], m: usize) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut dist = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([0]);
    dist[0] = 0;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    if order.len() != n {
        return None;
    }
    let mut label = vec![0usize; n];
    for (i, &w) in adj[0].iter().enumerate().take(m) {
        label[w] = 1 << i;
    }
    for &v in order.iter().filter(|&&v| dist[v] >= 2) {
        label[v] = adj[v].iter().filter(|&&w| dist[w] + 1 == dist[v]).fold(0, |acc, &w| acc | label[w]);
    }
    Some(label)
}

fn labelling_is_isomorphism(adj: &[Vec<Element>], labels: &[usize]) -> bool {
    let n = adj.len();
    let mut seen = vec![false; n];
    for &l in labels {
        if l >= n || seen[l] {
            return false;
        }
        seen[l] = true;
    }
    adj.iter().enumerate().all(|(a, ns)| ns.iter().all(|&b| (labels[a] ^ labels[b]).count_ones() == 1))
}

/// True iff every vertex has the same degree.
pub fn is_regular(g: &FiniteStructure) -> Result<bool, StructureError> {
    let adj = g.adjacency()?;
    for (a, ns) in adj.iter().enumerate() {
        if let Some(&b) = ns.iter().find(|&&b| !g.holds(EDGE, &[b, a])) {
            return Err(StructureError::Precondition(format!("edge ({a},{b}) has no reverse")));
        }
    }
    Ok(adj.windows(2).all(|w| w[0].len() == w[1].len()))
}

/// Brute-force search for a domain bijection carrying every relation and
/// constant of `g` onto `h`.
pub fn are_isomorphic(g: &FiniteStructure, h: &FiniteStructure) -> Result<bool, StructureError> {
    if g.vocabulary() != h.vocabulary() {
        return Err(StructureError::InvalidParameter("vocabularies differ".into()));
    }
    let limit = g.size().max(h.size());
    if limit > ISOMORPHISM_LIMIT {
        return Err(StructureError::Budget(format!(
            "isomorphism search limited to {ISOMORPHISM_LIMIT} elements, got {limit}"
        )));
    }
    if g.size() != h.size() {
        return Ok(false);
    }
    let rels = g.vocabulary().relations().len();
    let gt: Vec<_> = (0..rels).map(|i| g.tuples_at(i).into_owned()).collect();
    let ht: Vec<_> = (0..rels).map(|i| h.tuples_at(i).into_owned()).collect();
    if gt.iter().zip(&ht).any(|(a, b)| a.len() != b.len()) {
        return Ok(false);
    }
    let n = g.size();
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let maps = |perm: &[Element]| {
        let consts_ok =
            g.vocabulary().constants().iter().all(|c| Some(perm[g.constant(c).unwrap_or(0)]) == h.constant(c));
        consts_ok
            && gt.iter().zip(&ht).all(|(gs, hs)| {
                gs.iter().all(|t| {
                    let image: Vec<Element> = t.iter().map(|&x| perm[x]).collect();
                    hs.contains(&image)
                })
            })
    };
    Ok(search(n, &mut perm, &mut used, &maps))
}

fn search(n: usize, perm: &mut Vec<Element>, used: &mut [bool], accept: &dyn Fn(&[Element]) -> bool) -> bool {
    if perm.len() == n {
        return accept(perm);
    }
    for v in 0..n {
        if !used[v] {
            used[v] = true;
            perm.push(v);
            let found = search(n, perm, used, accept);
            perm.pop();
            used[v] = false;
            if found {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> FiniteStructure {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        FiniteStructure::graph(n, &edges).unwrap()
    }

    #[test]
    fn hypercube_examples() {
        assert!(is_hypercube(&generate(Family::Hypercube(2)).unwrap()).unwrap());
        assert!(!is_hypercube(&generate(Family::Cycle(6)).unwrap()).unwrap());
        let mut q3 = generate(Family::Hypercube(3)).unwrap();
        q3.remove(EDGE, &[0, 1]).unwrap();
        q3.remove(EDGE, &[1, 0]).unwrap();
        assert!(!is_hypercube(&q3).unwrap());
    }

    #[test]
    fn cycle_four_is_the_square() {
        assert!(is_hypercube(&generate(Family::Cycle(4)).unwrap()).unwrap());
    }

    #[test]
    fn single_vertex_is_not_a_hypercube() {
        assert!(!is_hypercube(&FiniteStructure::graph(1, &[]).unwrap()).unwrap());
    }

    #[test]
    fn loops_and_asymmetry_are_precondition_errors() {
        let mut g = FiniteStructure::graph(2, &[]).unwrap();
        g.insert(EDGE, vec![0, 0]).unwrap();
        assert!(matches!(is_hypercube(&g), Err(StructureError::Precondition(_))));
        let mut h = FiniteStructure::graph(2, &[]).unwrap();
        h.insert(EDGE, vec![0, 1]).unwrap();
        assert!(matches!(is_hypercube(&h), Err(StructureError::Precondition(_))));
        assert!(matches!(is_regular(&h), Err(StructureError::Precondition(_))));
    }

    #[test]
    fn regular_examples() {
        assert!(is_regular(&generate(Family::Cycle(4)).unwrap()).unwrap());
        assert!(!is_regular(&path(3)).unwrap());
        assert!(is_regular(&FiniteStructure::graph(5, &[]).unwrap()).unwrap());
    }

    #[test]
    fn isomorphism_examples() {
        let q2 = generate(Family::Hypercube(2)).unwrap();
        let c4 = generate(Family::Cycle(4)).unwrap();
        assert!(are_isomorphic(&q2, &c4).unwrap());
        let q3 = generate(Family::Hypercube(3)).unwrap();
        let c8 = generate(Family::Cycle(8)).unwrap();
        assert!(!are_isomorphic(&q3, &c8).unwrap());
        assert!(are_isomorphic(&q3, &q3).unwrap());
    }

    #[test]
    fn isomorphism_limits() {
        let q4 = generate(Family::Hypercube(4)).unwrap();
        assert!(matches!(are_isomorphic(&q4, &q4), Err(StructureError::Budget(_))));
        let l = generate(Family::LinearDigraph(3)).unwrap();
        let c = generate(Family::Cycle(3)).unwrap();
        assert!(matches!(are_isomorphic(&l, &c), Err(StructureError::InvalidParameter(_))));
    }
}
