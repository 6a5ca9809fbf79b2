//! Generates the structure families and checks them with the graph oracles.

use somc::structures::{generate, is_hypercube, is_regular, serialize_structure, Family};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for family in [Family::Hypercube(3), Family::Cycle(4), Family::Cycle(6), Family::Complete(4)] {
        let g = generate(family)?;
        println!("{family}: {} vertices, hypercube {}, regular {}", g.size(), is_hypercube(&g)?, is_regular(&g)?);
    }
    print!("{}", serialize_structure(&generate(Family::LinearDigraph(3))?));
    Ok(())
}
