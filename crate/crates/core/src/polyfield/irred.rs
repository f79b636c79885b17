use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::FieldSpec;
use super::poly::{rem_bits, MonicPoly};
use crate::error::{Error, Result};

/// Default cap on `q^D` when building an irreducible table.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 24;

/// Identifies a monic irreducible by its degree and its rank among the
/// irreducibles of that degree (sorted by encoding). The derived order is
/// (degree, index).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IrredId {
    pub degree: u32,
    pub index: u32,
}

impl fmt::Display for IrredId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}#{}", self.degree, self.index)
    }
}

/// Every monic irreducible of degree `1..=max_degree` over a fixed field.
#[derive(Clone, Debug)]
pub struct IrredTable {
    field: FieldSpec,
    by_degree: Vec<Vec<MonicPoly>>,
    offsets: Vec<usize>,
    lookup: HashMap<MonicPoly, IrredId>,
}

impl IrredTable {
    pub fn build(field: &FieldSpec, max_degree: usize) -> Result<Self> {
        Self::build_with_budget(field, max_degree, DEFAULT_ENUMERATION_BUDGET)
    }

    /// Ascending-degree sieve: a monic polynomial of degree `d` is kept iff
    /// no irreducible of degree `<= d/2` divides it.
    pub fn build_with_budget(field: &FieldSpec, max_degree: usize, budget: u128) -> Result<Self> {
        if max_degree == 0 {
            return Err(Error::InvalidArgument("table degree must be >= 1".into()));
        }
        let q = field.q() as u128;
        let needed = q.checked_pow(max_degree as u32).unwrap_or(u128::MAX);
        if needed > budget {
            return Err(Error::budget("irreducible table q^D", needed, budget));
        }
        let mut by_degree: Vec<Vec<MonicPoly>> = vec![Vec::new()];
        if field.q() == 2 && max_degree < 63 {
            let mut found: Vec<u64> = Vec::new();
            for d in 1..=max_degree {
                let mut level = Vec::new();
                for low in 0..(1u64 << d) {
                    let cand = (1u64 << d) | low;
                    let composite = found
                        .iter()
                        .take_while(|&&f| 2 * (63 - f.leading_zeros() as usize) <= d)
                        .any(|&f| rem_bits(cand, f) == 0);
                    if !composite {
                        level.push(cand);
                    }
                }
                found.extend(&level);
                by_degree.push(level.into_iter().map(MonicPoly::from_bits).collect());
            }
        } else {
            for d in 1..=max_degree {
                let count = (field.q() as u64).pow(d as u32);
                let mut level = Vec::new();
                for idx in 0..count {
                    let cand = MonicPoly::from_index(field.q(), d, idx);
                    let composite = by_degree[1..=d / 2]
                        .iter()
                        .flatten()
                        .any(|f| cand.divisible_by(f, field));
                    if !composite {
                        level.push(cand);
                    }
                }
                by_degree.push(level);
            }
        }
        Ok(Self::from_levels(field.clone(), by_degree))
    }

    pub(crate) fn from_levels(field: FieldSpec, by_degree: Vec<Vec<MonicPoly>>) -> Self {
        let mut offsets = vec![0usize; by_degree.len() + 1];
        let mut lookup = HashMap::new();
        for (d, level) in by_degree.iter().enumerate() {
            offsets[d + 1] = offsets[d] + level.len();
            for (i, p) in level.iter().enumerate() {
                lookup.insert(
                    p.clone(),
                    IrredId {
                        degree: d as u32,
                        index: i as u32,
                    },
                );
            }
        }
        IrredTable {
            field,
            by_degree,
            offsets,
            lookup,
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn max_degree(&self) -> usize {
        self.by_degree.len() - 1
    }

    /// `pi_q(d)`, the number of irreducibles of degree `d`.
    pub fn count(&self, degree: usize) -> usize {
        self.by_degree.get(degree).map_or(0, Vec::len)
    }

    pub fn of_degree(&self, degree: usize) -> &[MonicPoly] {
        self.by_degree.get(degree).map_or(&[], Vec::as_slice)
    }

    pub fn poly(&self, id: IrredId) -> &MonicPoly {
        &self.by_degree[id.degree as usize][id.index as usize]
    }

    pub fn id_of(&self, p: &MonicPoly) -> Option<IrredId> {
        self.lookup.get(p).copied()
    }

    /// Position of `id` in the global (degree, index) order.
    pub fn rank(&self, id: IrredId) -> usize {
        self.offsets[id.degree as usize] + id.index as usize
    }

    pub fn id_at_rank(&self, rank: usize) -> IrredId {
        let d = self.offsets.partition_point(|&o| o <= rank) - 1;
        IrredId {
            degree: d as u32,
            index: (rank - self.offsets[d]) as u32,
        }
    }

    /// Number of irreducibles of degree `<= degree`.
    pub fn total_up_to(&self, degree: usize) -> usize {
        self.offsets[degree.min(self.max_degree()) + 1]
    }

    pub fn ids(&self, degree: usize) -> impl Iterator<Item = IrredId> + '_ {
        (0..self.count(degree)).map(move |i| IrredId {
            degree: degree as u32,
            index: i as u32,
        })
    }
}

/// Literal irreducibility test: no monic polynomial of degree `1..=deg/2`
/// divides `p`. Used as an oracle for the sieve.
pub fn is_irreducible_brute(p: &MonicPoly, field: &FieldSpec) -> bool {
    let d = p.degree();
    if d == 0 {
        return false;
    }
    for e in 1..=d / 2 {
        for idx in 0..(field.q() as u64).pow(e as u32) {
            if p.divisible_by(&MonicPoly::from_index(field.q(), e, idx), field) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_known_counts() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let t = IrredTable::build(&f2, 4).unwrap();
        assert_eq!((1..=4).map(|d| t.count(d)).collect::<Vec<_>>(), vec![2, 1, 2, 3]);
        assert_eq!(t.of_degree(1).iter().map(|p| p.to_string()).collect::<Vec<_>>(), ["t", "t+1"]);

        let f3 = FieldSpec::new(3, 1).unwrap();
        let t3 = IrredTable::build(&f3, 2).unwrap();
        assert_eq!((t3.count(1), t3.count(2)), (3, 3));
    }

    #[test]
    fn sieve_agrees_with_brute_force() {
        for q in [2u64, 3] {
            let field = FieldSpec::with_order(q).unwrap();
            let table = IrredTable::build(&field, 6).unwrap();
            for d in 1..=6 {
                let brute: Vec<MonicPoly> = (0..(q).pow(d as u32))
                    .map(|i| MonicPoly::from_index(q as u32, d, i))
                    .filter(|p| is_irreducible_brute(p, &field))
                    .collect();
                assert_eq!(table.of_degree(d), brute.as_slice(), "q={q} d={d}");
            }
        }
    }

    #[test]
    fn gauss_count_identity() {
        for q in [2u64, 3, 4, 5, 8, 9] {
            let field = FieldSpec::with_order(q).unwrap();
            let depth = if q <= 3 { 8 } else { 4 };
            let table = IrredTable::build(&field, depth).unwrap();
            for d in 1..=depth {
                let total: u64 = (1..=d)
                    .filter(|e| d % e == 0)
                    .map(|e| (e * table.count(e)) as u64)
                    .sum();
                assert_eq!(total, q.pow(d as u32), "q={q} d={d}");
            }
        }
    }

    #[test]
    fn ranks_round_trip() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let t = IrredTable::build(&f2, 6).unwrap();
        assert_eq!(t.total_up_to(5), 14);
        for r in 0..t.total_up_to(6) {
            let id = t.id_at_rank(r);
            assert_eq!(t.rank(id), r);
            assert_eq!(t.id_of(t.poly(id)), Some(id));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        assert!(matches!(
            IrredTable::build_with_budget(&f2, 10, 1000),
            Err(Error::Budget { .. })
        ));
    }
}
