//! Evaluates the regularity sentence on every graph over four labeled
//! vertices and compares it with the degree check.

use somc::eval::{eval_grounded, Budget};
use somc::library::regular;
use somc::structures::{is_regular, FiniteStructure};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = regular();
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut regular_graphs = 0;
    for mask in 0u32..64 {
        let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
        let g = FiniteStructure::graph(4, &edges)?;
        let verdict = eval_grounded(&g, &f, Budget::default())?;
        assert_eq!(verdict, is_regular(&g)?);
        if verdict {
            regular_graphs += 1;
            println!("regular: {edges:?}");
        }
    }
    println!("{regular_graphs} of 64 graphs are regular");
    Ok(())
}
