use crate::polyfield::{FactorSet, IrredTable};

use super::signs::SignAssignment;

/// `S = sum over F of f(F)` together with its split by largest factor
/// degree. `by_d[d]` is `S_d`; index 0 is always zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumDecomposition {
    pub s: i64,
    pub by_d: Vec<i64>,
}

/// Direct evaluation over a list of factor sets. [`Support`](super::Support)
/// does the same work on a flattened layout for the sampling loop.
pub fn evaluate_sums(assignment: &SignAssignment, pk: &[FactorSet], table: &IrredTable) -> SumDecomposition {
    let max_d = pk.iter().map(FactorSet::pmax).max().unwrap_or(0);
    let mut by_d = vec![0i64; max_d + 1];
    for f in pk {
        let negative = f.factors().iter().filter(|&&id| assignment.is_negative(table.rank(id))).count();
        by_d[f.pmax()] += if negative % 2 == 0 { 1 } else { -1 };
    }
    SumDecomposition { s: by_d.iter().sum(), by_d }
}
