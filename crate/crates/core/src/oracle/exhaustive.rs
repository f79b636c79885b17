//! Expectations over every sign assignment of the irreducibles involved.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric;
use crate::polyfield::{enumerate_pkn, FieldSpec, IrredTable};

/// Default cap on the number of sign assignments enumerated.
pub const DEFAULT_ASSIGNMENT_BUDGET: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExhaustiveMoments {
    pub q: u64,
    pub k: usize,
    pub n: usize,
    /// Irreducibles dividing some element of `P_k(n)`.
    pub irreducibles: usize,
    pub assignments: u64,
    #[serde(with = "numeric::decimal::signed")]
    pub mean: BigInt,
    #[serde(with = "numeric::decimal::signed")]
    pub second: BigInt,
    #[serde(with = "numeric::decimal::signed")]
    pub fourth: BigInt,
}

/// Elements of `P_k(n)` as bit masks over the irreducibles that occur,
/// with each element's largest factor degree and each local bit's degree.
struct Support {
    masks: Vec<u64>,
    pmax: Vec<usize>,
    bit_degree: Vec<usize>,
}

fn support(q: u64, k: usize, n: usize, budget: u64) -> Result<Support> {
    let table = IrredTable::build(&FieldSpec::with_order(q)?, n)?;
    let sets = enumerate_pkn(k, n, &table, None)?;
    let mut used: Vec<usize> = sets.iter().flat_map(|s| s.factors().iter().map(|&id| table.rank(id))).collect();
    used.sort_unstable();
    used.dedup();
    let assignments = 1u128 << used.len().min(127);
    if used.len() >= 64 || assignments > budget as u128 {
        return Err(Error::budget("sign assignments", assignments, budget as u128));
    }
    let local = |rank: usize| used.binary_search(&rank).expect("rank was collected");
    let masks = sets
        .iter()
        .map(|s| s.factors().iter().fold(0u64, |m, &id| m | 1 << local(table.rank(id))))
        .collect();
    let pmax = sets.iter().map(|s| s.pmax()).collect();
    let bit_degree = used.iter().map(|&r| table.id_at_rank(r).degree as usize).collect();
    Ok(Support { masks, pmax, bit_degree })
}

#[inline]
fn term(assignment: u64, mask: u64) -> i64 {
    // bit set = sign -1
    if (assignment & mask).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `(E[S], E[S^2], E[S^4])` exactly, averaging over all `2^m` sign
/// assignments of the `m` irreducibles that divide an element of `P_k(n)`.
pub fn exhaustive_moments(q: u64, k: usize, n: usize, budget: u64) -> Result<ExhaustiveMoments> {
    let sup = support(q, k, n, budget)?;
    let m = sup.bit_degree.len();
    let (s1, s2, s4) = (0..1u64 << m)
        .into_par_iter()
        .map(|a| {
            let s: i64 = sup.masks.iter().map(|&mask| term(a, mask)).sum();
            let s = s as i128;
            (s, s * s, s * s * s * s)
        })
        .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
    // every expectation of a product of +-1 signs is 0 or 1, so each sum is
    // divisible by 2^m
    let exact = |sum: i128| {
        debug_assert_eq!(sum % (1i128 << m), 0);
        BigInt::from(sum >> m)
    };
    Ok(ExhaustiveMoments {
        q,
        k,
        n,
        irreducibles: m,
        assignments: 1 << m,
        mean: exact(s1),
        second: exact(s2),
        fourth: exact(s4),
    })
}

/// For each `d`, the largest `|sum over high signs of S_d|` over all fixed
/// choices of signs on irreducibles of degree `< d`. The martingale
/// property says every entry is zero.
pub fn conditional_mean_check(q: u64, k: usize, n: usize, budget: u64) -> Result<Vec<(usize, i64)>> {
    let sup = support(q, k, n, budget)?;
    let m = sup.bit_degree.len();
    let mut out = Vec::new();
    for d in 1..=n {
        let low_mask: u64 = sup
            .bit_degree
            .iter()
            .enumerate()
            .filter(|(_, &deg)| deg < d)
            .fold(0, |acc, (i, _)| acc | 1 << i);
        let high_bits: Vec<u64> = (0..m).filter(|i| low_mask >> i & 1 == 0).map(|i| 1u64 << i).collect();
        let terms: Vec<u64> = sup
            .masks
            .iter()
            .zip(&sup.pmax)
            .filter(|(_, &p)| p == d)
            .map(|(&mask, _)| mask)
            .collect();
        // enumerate the low signs as submasks of low_mask
        let mut worst = 0i64;
        let mut low = 0u64;
        loop {
            let mut total = 0i64;
            for h in 0..1u64 << high_bits.len() {
                let high = high_bits
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| h >> j & 1 == 1)
                    .fold(0, |acc, (_, &b)| acc | b);
                let a = low | high;
                total += terms.iter().map(|&mask| term(a, mask)).sum::<i64>();
            }
            worst = worst.max(total.abs());
            if low == low_mask {
                break;
            }
            low = (low.wrapping_sub(low_mask)) & low_mask;
        }
        out.push((d, worst));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_pk;

    #[test]
    fn variance_identity_small() {
        let m = exhaustive_moments(2, 2, 6, DEFAULT_ASSIGNMENT_BUDGET).unwrap();
        assert_eq!(m.irreducibles, 14);
        assert_eq!(m.mean, BigInt::from(0));
        assert_eq!(m.second, BigInt::from(16));
        let m3 = exhaustive_moments(2, 2, 3, DEFAULT_ASSIGNMENT_BUDGET).unwrap();
        assert_eq!(m3.fourth, BigInt::from(8));
        let m4 = exhaustive_moments(3, 3, 5, DEFAULT_ASSIGNMENT_BUDGET).unwrap();
        assert_eq!(m4.second, BigInt::from(count_pk(3, 3, 5)));
    }

    #[test]
    fn guard() {
        assert!(matches!(exhaustive_moments(2, 2, 6, 1000), Err(Error::Budget { .. })));
    }

    #[test]
    fn martingale_differences_small() {
        for (k, n) in [(2, 4), (2, 5), (3, 6)] {
            let check = conditional_mean_check(2, k, n, DEFAULT_ASSIGNMENT_BUDGET).unwrap();
            assert!(check.iter().all(|&(_, w)| w == 0), "{check:?}");
        }
    }
}
