use std::borrow::Borrow;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::polyfield::{FactorSet, IrredTable};

/// Default cap on the size of a set passed to [`pair_parity_census`].
pub const DEFAULT_CENSUS_BUDGET: usize = 200_000;

/// Characteristic bit vector of a squarefree polynomial's irreducible
/// factors, indexed by global rank. XOR of keys is the key of the
/// squarefree part of the product, so a product is a square iff the XOR of
/// the keys is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParityKey(Box<[u64]>);

impl ParityKey {
    pub fn zero(words: usize) -> Self {
        ParityKey(vec![0; words].into_boxed_slice())
    }

    pub fn of(set: &FactorSet, table: &IrredTable, words: usize) -> Self {
        let mut w = vec![0u64; words];
        for &id in set.factors() {
            let r = table.rank(id);
            w[r / 64] ^= 1 << (r % 64);
        }
        ParityKey(w.into_boxed_slice())
    }

    pub fn words(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn xor(&self, other: &ParityKey) -> ParityKey {
        ParityKey(self.0.iter().zip(other.0.iter()).map(|(a, b)| a ^ b).collect())
    }
}

impl Borrow<[u64]> for ParityKey {
    fn borrow(&self) -> &[u64] {
        &self.0
    }
}

/// Number of `u64` words needed to key every irreducible of degree `<= n`.
pub fn key_words(table: &IrredTable, n: usize) -> usize {
    table.total_up_to(n).div_ceil(64).max(1)
}

pub type Census = HashMap<ParityKey, u64>;

/// For each key `k`, the number of ordered pairs `(F, G)` in `sets x sets`
/// with `key(F) ^ key(G) = k`.
pub fn pair_parity_census(sets: &[FactorSet], table: &IrredTable, words: usize, budget: usize) -> Result<Census> {
    if sets.len() > budget {
        return Err(Error::budget("parity census set size", sets.len() as u128, budget as u128));
    }
    let keys: Vec<ParityKey> = sets.iter().map(|s| ParityKey::of(s, table, words)).collect();
    let census = keys
        .par_iter()
        .fold(Census::new, |mut acc, a| {
            let mut buf = vec![0u64; words];
            for b in &keys {
                for ((slot, x), y) in buf.iter_mut().zip(a.words()).zip(b.words()) {
                    *slot = x ^ y;
                }
                match acc.get_mut(buf.as_slice()) {
                    Some(c) => *c += 1,
                    None => {
                        acc.insert(ParityKey(buf.clone().into_boxed_slice()), 1);
                    }
                }
            }
            acc
        })
        .reduce(Census::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    Ok(census)
}

/// `sum_k a[k] * b[k]`: the number of quadruples `(W, X, Y, Z)` whose
/// product is a square.
pub fn census_overlap(a: &Census, b: &Census) -> u128 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .map(|(k, &v)| large.get(k).map_or(0, |&w| v as u128 * w as u128))
        .sum()
}
