//! Decides QBFs by recursive expansion and by searching for a satisfying
//! alternating valuation tree.

use somc::qbf::{parse_qbf, sat_via_alternating_valuations, satisfying_tree, solve_recursive};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for text in ["E x1 A x2 ((!x1)|x2)", "E x1 A x2 (x1&x2)", "E x1 A x2 E x3 ((x1|x2)&((!x2)|x3))"] {
        let q = parse_qbf(text)?;
        let recursive = solve_recursive(&q)?;
        let valuations = sat_via_alternating_valuations(&q)?;
        println!("{q}: recursive {recursive}, valuations {valuations}");
        if let Some(tree) = satisfying_tree(&q)? {
            for (i, leaf) in tree.leaf_valuations(&q).iter().enumerate() {
                println!("  leaf {i}: {leaf:?}");
            }
        }
    }
    Ok(())
}
