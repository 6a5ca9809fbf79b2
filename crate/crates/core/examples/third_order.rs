//! Evaluates third-order sentences over two elements with the naive
//! engine.

use somc::eval::{eval_naive, Budget, Environment};
use somc::library::hypercube_to;
use somc::logic::{analyze, parse_formula};
use somc::structures::FiniteStructure;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = FiniteStructure::graph(2, &[(0, 1)])?;
    let sentences = [
        "(ex3 T (1) (and (ex2 A 1 (var3 T A)) (all2 A 1 (implies (var3 T A) (ex1 x (var2 A x))))))",
        "(ex3 T (1) (all2 A 1 (var3 T A)))",
        "(all3 T (1) (ex2 A 1 (var3 T A)))",
    ];
    for text in sentences {
        let f = parse_formula(text)?;
        println!("{text}\n  => {}", eval_naive(&s, &f, &Environment::new(), Budget::default())?);
    }
    let to = analyze(&hypercube_to());
    println!("hypercube/to: sentence {}, third-order depth {}", to.is_sentence(), to.to_depth);
    Ok(())
}
