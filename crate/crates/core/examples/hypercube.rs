//! Recognizes hypercubes with the subset-labelling sentence.

use somc::eval::{eval_grounded, Budget};
use somc::library::{hypercube, Strategy};
use somc::logic::analyze;
use somc::structures::{generate, is_hypercube, Family, EDGE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = hypercube(Strategy::So2);
    let binders: Vec<String> =
        analyze(&f).so_bindings.iter().map(|b| format!("{}{}", b.quantifier.symbol(), b.name)).collect();
    println!("second-order binders in order: {}", binders.join(" "));
    for family in
        [Family::Hypercube(1), Family::Hypercube(2), Family::Hypercube(3), Family::Cycle(6), Family::Complete(4)]
    {
        let g = generate(family)?;
        println!("{family}: sentence {}, oracle {}", eval_grounded(&g, &f, Budget::default())?, is_hypercube(&g)?);
    }
    let mut broken = generate(Family::Hypercube(3))?;
    broken.remove(EDGE, &[0, 1])?;
    broken.remove(EDGE, &[1, 0])?;
    println!("hypercube(3) minus an edge: sentence {}", eval_grounded(&broken, &f, Budget::default())?);
    Ok(())
}
