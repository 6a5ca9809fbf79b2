//! Structure files, generators and graph oracles.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use somc::corpus::Corpus;
use somc::structures::{
    are_isomorphic, generate, is_hypercube, is_regular, parse_structure, serialize_structure, Family, FiniteStructure,
    EDGE,
};

fn relabel(g: &FiniteStructure, seed: u64) -> FiniteStructure {
    let mut perm: Vec<usize> = (0..g.size()).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut h = FiniteStructure::empty(g.vocabulary().clone(), g.size()).unwrap();
    for t in g.tuples(EDGE).unwrap().iter() {
        h.insert(EDGE, t.iter().map(|&x| perm[x]).collect()).unwrap();
    }
    h
}

proptest! {
    #[test]
    fn files_round_trip(seed in any::<u64>(), n in 1usize..6) {
        let g = Corpus::new(seed).digraph(n);
        prop_assert_eq!(parse_structure(&serialize_structure(&g)).unwrap(), g);
    }

    #[test]
    fn oracles_ignore_vertex_names(seed in any::<u64>(), m in 1usize..4) {
        for g in [generate(Family::Hypercube(m)).unwrap(), generate(Family::Cycle(2 + m)).unwrap()] {
            let h = relabel(&g, seed);
            prop_assert_eq!(is_hypercube(&h).unwrap(), is_hypercube(&g).unwrap());
            prop_assert_eq!(is_regular(&h).unwrap(), is_regular(&g).unwrap());
            prop_assert!(are_isomorphic(&g, &h).unwrap());
        }
    }
}

#[test]
fn generated_families_have_their_properties() {
    for m in 1..=5 {
        let q = generate(Family::Hypercube(m)).unwrap();
        assert_eq!(q.size(), 1 << m);
        assert!(is_hypercube(&q).unwrap() && is_regular(&q).unwrap(), "Q{m}");
    }
    for n in 3..=8 {
        let c = generate(Family::Cycle(n)).unwrap();
        assert!(is_regular(&c).unwrap());
        assert_eq!(is_hypercube(&c).unwrap(), n == 4, "cycle({n})");
    }
    assert!(!is_hypercube(&generate(Family::Complete(4)).unwrap()).unwrap());
}
