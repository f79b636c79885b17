//! The bound chains that reduce the central limit theorem to counting:
//! iterated convolutions of `|P_k(n)|^2`, the upper bounds for the I- and
//! J-sums, and the three-sums ratio.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::counting::CountTable;
use crate::error::{Error, Result};
use crate::numeric::{self, ln_biguint, ln_factorial, LogReal, HR_SHIFT};

/// Exact evaluation of the convolution sums over one [`CountTable`].
///
/// `conv(r, k, n)` is the sum over compositions `k_1 + ... + k_r = k`,
/// `n_1 + ... + n_r = n` (all parts `>= 1`) of `prod |P_{k_i}(n_i)|^2`.
/// Entries are memoized, so sweeps over `n` reuse the lower-order arrays.
pub struct BoundsEngine<'a> {
    counts: &'a CountTable,
    squares: Vec<Vec<BigUint>>,
    memo: HashMap<(usize, usize, usize), BigUint>,
}

impl<'a> BoundsEngine<'a> {
    pub fn new(counts: &'a CountTable) -> Self {
        let squares = (0..=counts.k_max())
            .map(|k| (0..=counts.n_max()).map(|n| counts.count(k, n).pow(2)).collect())
            .collect();
        BoundsEngine {
            counts,
            squares,
            memo: HashMap::new(),
        }
    }

    pub fn counts(&self) -> &CountTable {
        self.counts
    }

    fn check(&self, k: usize, n: usize) -> Result<()> {
        if k > self.counts.k_max() || n > self.counts.n_max() {
            return Err(Error::InvalidArgument(format!(
                "(k={k}, n={n}) outside count table (k_max={}, n_max={})",
                self.counts.k_max(),
                self.counts.n_max()
            )));
        }
        Ok(())
    }

    /// `|P_k(n)|^2`, zero for `k = 0` or `n = 0`.
    fn sq(&self, k: usize, n: usize) -> &BigUint {
        &self.squares[k][n]
    }

    fn conv(&mut self, r: usize, k: usize, n: usize) -> BigUint {
        if r == 0 || k < r || n < r {
            return BigUint::zero();
        }
        if r == 1 {
            return if k == 0 || n == 0 { BigUint::zero() } else { self.sq(k, n).clone() };
        }
        if let Some(v) = self.memo.get(&(r, k, n)) {
            return v.clone();
        }
        let mut total = BigUint::zero();
        for k1 in 1..=k - (r - 1) {
            for n1 in 1..=n - (r - 1) {
                if k1 > n1 {
                    continue;
                }
                let head = self.sq(k1, n1).clone();
                if head.is_zero() {
                    continue;
                }
                let tail = self.conv(r - 1, k - k1, n - n1);
                if !tail.is_zero() {
                    total += head * tail;
                }
            }
        }
        self.memo.insert((r, k, n), total.clone());
        total
    }

    /// Left side of the key convolution lemma.
    pub fn key_lemma_lhs(&mut self, r: usize, k: usize, n: usize) -> Result<BigUint> {
        if r == 0 {
            return Err(Error::InvalidArgument("r must be >= 1".into()));
        }
        self.check(k, n)?;
        Ok(self.conv(r, k, n))
    }

    /// `log(LHS) - log(RHS)` of the key lemma; `None` when the LHS is zero.
    pub fn key_lemma_log_ratio(&mut self, r: usize, k: usize, n: usize) -> Result<Option<f64>> {
        let lhs = self.key_lemma_lhs(r, k, n)?;
        if lhs.is_zero() {
            return Ok(None);
        }
        let rhs = key_lemma_rhs(self.counts.q(), r, k, n)?;
        Ok(Some(ln_biguint(&lhs) - rhs.ln))
    }

    /// `sum_d |P_1(d)|^2 |P_{k-1}(n-d)|^2`, the part of the `r = 2` sum that
    /// bounds `sum_d |P_{k,d}(n)|^2`.
    pub fn largest_factor_subsum(&self, k: usize, n: usize) -> Result<BigUint> {
        self.check(k, n)?;
        if k < 2 {
            return Ok(BigUint::zero());
        }
        Ok((1..n).map(|d| self.sq(1, d) * self.sq(k - 1, n - d)).sum())
    }

    /// Upper bound for `sum_{d,e} I_{k,d,e}(n)`:
    /// `8 conv(2, k, n) + 4 conv(3, k, n)`.
    pub fn i_chain_bound(&mut self, k: usize, n: usize) -> Result<BigUint> {
        if k < 2 {
            return Err(Error::InvalidArgument("I-chain needs k >= 2".into()));
        }
        self.check(k, n)?;
        Ok(self.conv(2, k, n) * 8u32 + self.conv(3, k, n) * 4u32)
    }

    /// Upper bound for `sum_d J_{k,d,d}(n)`:
    /// `sum_d pi(d)^2 (2 |P_{k-1}(n-d)|^2 + conv(2, k-1, n-d))`.
    pub fn j_chain_bound(&mut self, k: usize, n: usize) -> Result<BigUint> {
        if k < 2 {
            return Err(Error::InvalidArgument("J-chain needs k >= 2".into()));
        }
        self.check(k, n)?;
        let mut total = BigUint::zero();
        for d in 1..n {
            let pi_sq = self.sq(1, d).clone();
            let inner = self.sq(k - 1, n - d) * 2u32 + self.conv(2, k - 1, n - d);
            total += pi_sq * inner;
        }
        Ok(total)
    }

    pub fn three_sums_report(&mut self, k: usize, n: usize) -> Result<BoundReport> {
        if k < 2 || n < 2 {
            return Err(Error::InvalidArgument("three-sums report needs k, n >= 2".into()));
        }
        self.check(k, n)?;
        let profile = self.counts.profile(k, n).ok_or_else(|| {
            Error::InvalidArgument("three-sums report needs a count table with profiles".into())
        })?;
        let sum_pkd_sq: BigUint = profile.iter().map(|c| c * c).sum();
        let i_chain = self.i_chain_bound(k, n)?;
        let j_chain = self.j_chain_bound(k, n)?;
        let total = &sum_pkd_sq + &i_chain + &j_chain;
        let pk_sq = self.sq(k, n).clone();
        let ratio = numeric::ratio(&total, &pk_sq);
        Ok(BoundReport {
            q: self.counts.q(),
            k,
            n,
            sum_pkd_sq,
            i_chain,
            j_chain,
            total,
            pk_sq,
            ratio,
        })
    }
}

/// Right side of the key lemma without its implied constant:
/// `q^{2n} (log n + 2 - log 2)^{2k-2r} / (n^2 ((k-r)!)^2)`.
pub fn key_lemma_rhs(q: u64, r: usize, k: usize, n: usize) -> Result<LogReal> {
    if r > k || n < 2 {
        return Err(Error::InvalidArgument("key lemma RHS needs r <= k and n >= 2".into()));
    }
    let nf = n as f64;
    let e = 2 * (k - r);
    let ln = 2.0 * nf * (q as f64).ln() + e as f64 * (nf.ln() + HR_SHIFT).ln() - 2.0 * nf.ln() - 2.0 * ln_factorial(k - r);
    Ok(LogReal::from_ln(ln))
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub q: u64,
    pub k: usize,
    pub n: usize,
    #[serde(with = "numeric::decimal")]
    pub sum_pkd_sq: BigUint,
    #[serde(with = "numeric::decimal")]
    pub i_chain: BigUint,
    #[serde(with = "numeric::decimal")]
    pub j_chain: BigUint,
    #[serde(with = "numeric::decimal")]
    pub total: BigUint,
    #[serde(with = "numeric::decimal")]
    pub pk_sq: BigUint,
    pub ratio: f64,
}

/// Standalone key-lemma LHS; builds its own count table.
pub fn key_lemma_lhs(q: u64, r: usize, k: usize, n: usize) -> Result<BigUint> {
    let counts = CountTable::new(q, k, n);
    BoundsEngine::new(&counts).key_lemma_lhs(r, k, n)
}

pub fn i_chain_bound(q: u64, k: usize, n: usize) -> Result<BigUint> {
    let counts = CountTable::new(q, k, n);
    BoundsEngine::new(&counts).i_chain_bound(k, n)
}

pub fn j_chain_bound(q: u64, k: usize, n: usize) -> Result<BigUint> {
    let counts = CountTable::new(q, k, n);
    BoundsEngine::new(&counts).j_chain_bound(k, n)
}

pub fn three_sums_report(q: u64, k: usize, n: usize) -> Result<BoundReport> {
    let counts = CountTable::with_profiles(q, k, n)?;
    BoundsEngine::new(&counts).three_sums_report(k, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_pk;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    /// Enumerates compositions of (k, n) into r parts directly.
    fn composition_sum(q: u64, r: usize, k: usize, n: usize) -> BigUint {
        fn rec(q: u64, r: usize, k: usize, n: usize) -> BigUint {
            if r == 0 {
                return if k == 0 && n == 0 { big(1) } else { big(0) };
            }
            let mut s = big(0);
            for k1 in 1..=k {
                for n1 in 1..=n {
                    let c = count_pk(q, k1, n1);
                    if c.is_zero() {
                        continue;
                    }
                    s += &c * &c * rec(q, r - 1, k - k1, n - n1);
                }
            }
            s
        }
        rec(q, r, k, n)
    }

    /// Nested-loop transcription of the I-chain display.
    fn i_chain_nested(q: u64, k: usize, n: usize) -> BigUint {
        let sq = |k: usize, n: usize| count_pk(q, k, n).pow(2);
        let mut first = big(0);
        let mut second = big(0);
        for t in 1..k {
            for l in 1..n {
                first += sq(t, l) * sq(k - t, n - l);
                for j in 1..t {
                    for g in 1..l {
                        second += sq(k - t, n - l) * sq(j, g) * sq(t - j, l - g);
                    }
                }
            }
        }
        first * 8u32 + second * 4u32
    }

    /// Nested-loop transcription of the J-chain display.
    fn j_chain_nested(q: u64, k: usize, n: usize) -> BigUint {
        let sq = |k: usize, n: usize| count_pk(q, k, n).pow(2);
        let mut first = big(0);
        let mut second = big(0);
        for d in 1..n {
            first += sq(1, d) * sq(k - 1, n - d);
            for j in 1..k.saturating_sub(1) {
                for g in 1..(n - d) {
                    second += sq(1, d) * sq(j, g) * sq(k - j - 1, n - d - g);
                }
            }
        }
        first * 2u32 + second
    }

    #[test]
    fn key_lemma_lhs_examples() {
        assert_eq!(key_lemma_lhs(2, 1, 2, 4).unwrap(), count_pk(2, 2, 4).pow(2));
        assert_eq!(key_lemma_lhs(2, 2, 2, 4).unwrap(), big(33));
        assert_eq!(key_lemma_lhs(2, 2, 2, 3).unwrap(), big(8));
        assert_eq!(key_lemma_lhs(2, 3, 2, 5).unwrap(), big(0));
        assert_eq!(key_lemma_lhs(2, 2, 3, 1).unwrap(), big(0));
    }

    #[test]
    fn convolution_matches_composition_enumeration() {
        for q in [2, 3] {
            let counts = CountTable::new(q, 5, 20);
            let mut eng = BoundsEngine::new(&counts);
            for r in 1..=3 {
                for k in r..=5 {
                    for n in [r, 7, 13, 20] {
                        assert_eq!(
                            eng.key_lemma_lhs(r, k, n).unwrap(),
                            composition_sum(q, r, k, n),
                            "q={q} r={r} k={k} n={n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn chain_examples() {
        assert_eq!(i_chain_bound(2, 2, 3).unwrap(), big(64));
        assert_eq!(j_chain_bound(2, 2, 3).unwrap(), big(16));
        assert_eq!(i_chain_bound(2, 3, 4).unwrap(), i_chain_nested(2, 3, 4));
        assert_eq!(j_chain_bound(2, 3, 5).unwrap(), j_chain_nested(2, 3, 5));
        // at k = 2 the triple blocks vanish
        assert_eq!(i_chain_bound(2, 2, 9).unwrap(), key_lemma_lhs(2, 2, 2, 9).unwrap() * 8u32);
    }

    #[test]
    fn chains_match_nested_loops() {
        for q in [2, 3] {
            let counts = CountTable::new(q, 5, 14);
            let mut eng = BoundsEngine::new(&counts);
            for k in 2..=5 {
                for n in [k, 9, 14] {
                    assert_eq!(eng.i_chain_bound(k, n).unwrap(), i_chain_nested(q, k, n));
                    assert_eq!(eng.j_chain_bound(k, n).unwrap(), j_chain_nested(q, k, n));
                }
            }
        }
    }

    #[test]
    fn rhs_examples() {
        let r = key_lemma_rhs(2, 2, 2, 500).unwrap();
        let log2 = r.ln / std::f64::consts::LN_2;
        assert!((log2 - (1000.0 - 2.0 * 500f64.log2())).abs() < 1e-9);
        assert!((1000.0 - log2 - 17.93).abs() < 0.01);
        let r3 = key_lemma_rhs(2, 2, 3, 500).unwrap();
        assert!((r3.ln - r.ln - 2.0 * (500f64.ln() + HR_SHIFT).ln()).abs() < 1e-9);
        let rk = key_lemma_rhs(3, 4, 4, 10).unwrap();
        assert!((rk.value.unwrap() - 3f64.powi(20) / 100.0).abs() < 1e-3);
    }

    #[test]
    fn three_sums_basics() {
        let counts = CountTable::with_profiles(2, 3, 60).unwrap();
        let mut eng = BoundsEngine::new(&counts);
        for k in 2..=3 {
            for n in [k + 1, 20, 60] {
                let rep = eng.three_sums_report(k, n).unwrap();
                assert!(rep.ratio > 0.0);
                assert_eq!(rep.total, &rep.sum_pkd_sq + &rep.i_chain + &rep.j_chain);
                assert!(rep.sum_pkd_sq <= rep.pk_sq);
                let sub = eng.largest_factor_subsum(k, n).unwrap();
                assert!(rep.sum_pkd_sq <= sub);
                assert!(sub <= eng.key_lemma_lhs(2, k, n).unwrap());
            }
        }
    }
}
