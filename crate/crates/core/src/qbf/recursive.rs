use crate::logic::Quantifier;

use super::{QVar, QbfAst, QbfError};

/// Variable cap for the exponential oracles.
pub const RECURSIVE_VAR_LIMIT: usize = 26;

/// Truth of a closed QBF by branching on prefix variables outermost first.
/// Partial evaluation of the matrix cuts branches whose value is already
/// decided.
pub fn solve_recursive(q: &QbfAst) -> Result<bool, QbfError> {
    let count = q.var_count();
    if count > RECURSIVE_VAR_LIMIT {
        return Err(QbfError::VariableBudget { vars: count, limit: RECURSIVE_VAR_LIMIT });
    }
    let order: Vec<(Quantifier, QVar)> =
        q.blocks().iter().flat_map(|b| b.vars.iter().map(move |&v| (b.quantifier, v))).collect();
    let max = order.iter().map(|&(_, v)| v).max().unwrap_or(0) as usize;
    let mut value: Vec<Option<bool>> = vec![None; max + 1];
    Ok(branch(q, &order, 0, &mut value))
}

fn branch(q: &QbfAst, order: &[(Quantifier, QVar)], depth: usize, value: &mut Vec<Option<bool>>) -> bool {
    if let Some(b) = q.matrix().eval_partial(&|v| value[v as usize]) {
        return b;
    }
    let (quant, v) = order[depth];
    let mut outcome = quant == Quantifier::Forall;
    for bit in [false, true] {
        value[v as usize] = Some(bit);
        let r = branch(q, order, depth + 1, value);
        if r != outcome {
            outcome = r;
            break;
        }
    }
    value[v as usize] = None;
    outcome
}

#[cfg(test)]
mod tests {
    use super::super::parse_qbf;
    use super::*;

    #[test]
    fn examples() {
        assert!(solve_recursive(&parse_qbf("E x1 A x2 ((!x1)|x2)").unwrap()).unwrap());
        assert!(!solve_recursive(&parse_qbf("A x1 E x2 (x1&x2)").unwrap()).unwrap());
        assert!(!solve_recursive(&parse_qbf("E x1 (x1&(!x1))").unwrap()).unwrap());
    }

    #[test]
    fn constants_and_unused_variables() {
        assert!(solve_recursive(&parse_qbf("A x1 (1)").unwrap()).unwrap());
        assert!(!solve_recursive(&parse_qbf("E x1 (0|0)").unwrap()).unwrap());
        assert!(solve_recursive(&parse_qbf("A x1 E x2 ((x1&x2)|((!x1)&(!x2)))").unwrap()).unwrap());
    }

    #[test]
    fn variable_cap() {
        let prefix: String = (1..=30).map(|i| format!(" x{i}")).collect();
        let q = parse_qbf(&format!("E{prefix} (x1)")).unwrap();
        assert!(matches!(solve_recursive(&q), Err(QbfError::VariableBudget { .. })));
    }
}
