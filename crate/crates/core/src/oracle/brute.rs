//! Counts by factoring every monic polynomial of a given degree.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::polyfield::{factor_squarefree, Factorization, FieldSpec, IrredTable, MonicPoly};

/// Default cap on the number of polynomials factored.
pub const DEFAULT_FACTOR_BUDGET: u64 = 1 << 22;

/// `hist[k]` is the number of squarefree monic polynomials of degree `n`
/// with exactly `k` irreducible factors, found by trial division of all
/// `q^n` of them.
pub fn brute_count_by_omega(q: u64, n: usize, budget: u64) -> Result<Vec<u64>> {
    let field = FieldSpec::with_order(q)?;
    let total = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > budget as u128 {
        return Err(Error::budget("monic polynomials to factor", total, budget as u128));
    }
    let table = IrredTable::build(&field, n)?;
    let q32 = field.q();
    let omegas: Vec<Option<usize>> = (0..total as u64)
        .into_par_iter()
        .map(|idx| match factor_squarefree(&MonicPoly::from_index(q32, n, idx), &table) {
            Ok(Factorization::Squarefree(f)) => Ok(Some(f.omega())),
            Ok(Factorization::NotSquarefree) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let mut hist = vec![0u64; n + 1];
    for w in omegas.into_iter().flatten() {
        hist[w] += 1;
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_three_over_f2() {
        // t^3+t+1, t^3+t^2+1 irreducible; t(t^2+t+1), (t+1)(t^2+t+1) split
        assert_eq!(brute_count_by_omega(2, 3, 1 << 10).unwrap(), vec![0, 2, 2, 0]);
    }

    #[test]
    fn budget() {
        assert!(matches!(brute_count_by_omega(3, 10, 100), Err(Error::Budget { .. })));
    }
}
