//! Grounds a second-order sentence on a structure, solves the result and
//! checks the exported QDIMACS document independently.

use somc::eval::{ground, Budget};
use somc::library::regular;
use somc::qbf::{export_qdimacs, solve_qbf_tree};
use somc::structures::{generate, Family};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = generate(Family::Cycle(3))?;
    let grounded = ground(&g, &regular(), Budget::default())?;
    let doc = export_qdimacs(&grounded);
    println!("{} Boolean variables in the formula", grounded.var_count());
    println!("{} variables and {} clauses after export", doc.num_vars(), doc.clauses().len());
    println!("solver: {}", solve_qbf_tree(&grounded));
    println!("truth table: {}", doc.evaluate_by_expansion(1 << 24)?);
    Ok(())
}
