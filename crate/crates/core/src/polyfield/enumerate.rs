use rayon::prelude::*;

use super::factor::FactorSet;
use super::irred::{IrredId, IrredTable};
use crate::error::{Error, Result};

/// Nondecreasing degree sequences with `k` parts summing to `n`, each part
/// at most `cap`, in lexicographic order.
pub fn degree_multisets(k: usize, n: usize, cap: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, n: usize, min: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            if n == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for d in min..=cap.min(n) {
            // the remaining k-1 parts are all >= d
            if d * k > n {
                break;
            }
            cur.push(d);
            rec(k - 1, n - d, d, cap, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, n, 1, cap, &mut Vec::new(), &mut out);
    out
}

fn combinations(ids: &[IrredId], m: usize) -> Vec<Vec<IrredId>> {
    fn rec(ids: &[IrredId], start: usize, m: usize, cur: &mut Vec<IrredId>, out: &mut Vec<Vec<IrredId>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        let need = m - cur.len();
        for i in start..=ids.len().saturating_sub(need) {
            if i >= ids.len() {
                break;
            }
            cur.push(ids[i]);
            rec(ids, i + 1, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(ids, 0, m, &mut Vec::new(), &mut out);
    out
}

fn expand_multiset(multiset: &[usize], table: &IrredTable) -> Vec<FactorSet> {
    // run-length encode the degrees
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for &d in multiset {
        match groups.last_mut() {
            Some((deg, m)) if *deg == d => *m += 1,
            _ => groups.push((d, 1)),
        }
    }
    let choices: Vec<Vec<Vec<IrredId>>> = groups
        .iter()
        .map(|&(d, m)| {
            let ids: Vec<IrredId> = table.ids(d).collect();
            combinations(&ids, m)
        })
        .collect();
    if choices.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut odometer = vec![0usize; choices.len()];
    loop {
        let factors: Vec<IrredId> = odometer
            .iter()
            .zip(&choices)
            .flat_map(|(&i, c)| c[i].iter().copied())
            .collect();
        out.push(FactorSet::from_sorted(factors));
        // advance the last position fastest
        let mut pos = choices.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < choices[pos].len() {
                break;
            }
            odometer[pos] = 0;
        }
    }
}

/// Lists `P_k(n)` (or `P_{k,<=cap}(n)`) ordered by degree multiset and then
/// by the tuple of factor ids.
pub fn enumerate_pkn(k: usize, n: usize, table: &IrredTable, cap: Option<usize>) -> Result<Vec<FactorSet>> {
    if k == 0 {
        return Ok(if n == 0 { vec![FactorSet::one()] } else { Vec::new() });
    }
    if k > n {
        return Ok(Vec::new());
    }
    let cap = cap.unwrap_or(n).min(n);
    // the largest usable part is n - (k - 1)
    let deepest = cap.min(n - k + 1);
    if deepest > table.max_degree() {
        return Err(Error::InsufficientDepth {
            needed: deepest,
            available: table.max_degree(),
        });
    }
    let multisets = degree_multisets(k, n, cap);
    let parts: Vec<Vec<FactorSet>> = multisets.par_iter().map(|ms| expand_multiset(ms, table)).collect();
    Ok(parts.into_iter().flatten().collect())
}

/// `P_{k,d}(n)`: elements of `P_k(n)` whose largest factor has degree `d`.
pub fn enumerate_pkdn(k: usize, n: usize, d: usize, table: &IrredTable) -> Result<Vec<FactorSet>> {
    Ok(enumerate_pkn(k, n, table, Some(d))?
        .into_iter()
        .filter(|f| f.pmax() == d)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfield::{factor_squarefree, Factorization, FieldSpec, MonicPoly};
    use std::collections::HashSet;

    fn f2(depth: usize) -> IrredTable {
        IrredTable::build(&FieldSpec::new(2, 1).unwrap(), depth).unwrap()
    }

    /// Counts P_k(n) by factoring every monic polynomial of degree n.
    fn brute_count(k: usize, n: usize, table: &IrredTable) -> usize {
        let q = table.field().q();
        (0..(q as u64).pow(n as u32))
            .filter(|&i| {
                matches!(
                    factor_squarefree(&MonicPoly::from_index(q, n, i), table).unwrap(),
                    Factorization::Squarefree(fs) if fs.omega() == k
                )
            })
            .count()
    }

    #[test]
    fn p2_of_3_over_f2() {
        let t = f2(4);
        let sets = enumerate_pkn(2, 3, &t, None).unwrap();
        let shown: Vec<Vec<String>> = sets
            .iter()
            .map(|s| s.factors().iter().map(|&id| t.poly(id).to_string()).collect())
            .collect();
        assert_eq!(shown, vec![vec!["t", "t^2+t+1"], vec!["t+1", "t^2+t+1"]]);
        assert_eq!(brute_count(2, 3, &t), 2);
    }

    #[test]
    fn pigeonhole_and_small_sizes() {
        let t = f2(4);
        assert!(enumerate_pkn(3, 3, &t, None).unwrap().is_empty());
        assert_eq!(enumerate_pkn(2, 4, &t, None).unwrap().len(), 4);
        assert_eq!(brute_count(2, 4, &t), 4);
        assert!(enumerate_pkn(5, 4, &t, None).unwrap().is_empty());
    }

    #[test]
    fn matches_brute_force_and_round_trips() {
        for q in [2u64, 3] {
            let field = FieldSpec::with_order(q).unwrap();
            let maxn = if q == 2 { 8 } else { 6 };
            let t = IrredTable::build(&field, maxn).unwrap();
            for n in 1..=maxn {
                let mut total = 0;
                let mut seen = HashSet::new();
                for k in 1..=n {
                    let sets = enumerate_pkn(k, n, &t, None).unwrap();
                    assert_eq!(sets.len(), brute_count(k, n, &t), "q={q} k={k} n={n}");
                    for s in &sets {
                        let prod = s.product(&t);
                        assert_eq!(prod.degree(), n);
                        assert!(seen.insert(prod.clone()), "duplicate product");
                        assert_eq!(factor_squarefree(&prod, &t).unwrap(), Factorization::Squarefree(s.clone()));
                    }
                    total += sets.len();
                }
                if n >= 2 {
                    assert_eq!(total as u64, q.pow(n as u32) - q.pow(n as u32 - 1));
                }
            }
        }
    }

    #[test]
    fn order_is_multiset_then_ids() {
        let field = FieldSpec::new(3, 1).unwrap();
        let t = IrredTable::build(&field, 6).unwrap();
        let sets = enumerate_pkn(3, 6, &t, None).unwrap();
        let key = |s: &FactorSet| {
            let degs: Vec<u32> = s.factors().iter().map(|f| f.degree).collect();
            (degs, s.factors().to_vec())
        };
        assert!(sets.windows(2).all(|w| key(&w[0]) < key(&w[1])));
    }

    #[test]
    fn capped_enumeration() {
        let t = f2(6);
        let all = enumerate_pkn(2, 6, &t, None).unwrap();
        let capped = enumerate_pkn(2, 6, &t, Some(3)).unwrap();
        assert_eq!(capped.len(), all.iter().filter(|s| s.pmax() <= 3).count());
        let by_d: usize = (1..6).map(|d| enumerate_pkdn(2, 6, d, &t).unwrap().len()).sum();
        assert_eq!(by_d, all.len());
    }
}
