//! Tabulates sum, times and exp on a five-position linear digraph.

use somc::eval::{eval_grounded_with, Budget, Environment};
use somc::library::{arithmetic, Arithmetic};
use somc::structures::{generate, Family};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 5;
    let s = generate(Family::LinearDigraph(n))?;
    for op in [Arithmetic::Sum, Arithmetic::Times, Arithmetic::Exp] {
        let f = arithmetic(op, None);
        let mut triples = Vec::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let env = Environment::with_elements([("x", x), ("y", y), ("z", z)]);
                    if eval_grounded_with(&s, &f, &env, Budget::default())? {
                        triples.push((x, y, z));
                    }
                }
            }
        }
        println!("{op:?}: {triples:?}");
    }
    Ok(())
}
