//! Exact counts of irreducibles and of `P_k(n)`, `P_{k,d}(n)` and
//! `P_{k,<=d}(n)`, plus the uniform Hardy–Ramanujan upper bound.
//!
//! All counts come from one knapsack over degrees: processing `d = 1, 2,
//! ...` in order, a polynomial picks `m >= 0` distinct irreducibles of
//! degree `d` in `C(pi_q(d), m)` ways. After step `d` the table holds
//! `|P_{k,<=d}(n)|`; the increment made at step `d` is `|P_{k,d}(n)|`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::{ln_factorial, LogReal, HR_SHIFT};

/// Largest `k_max * n_max^2` for which a [`CountTable`] keeps the
/// per-maximum-degree profile.
pub const PROFILE_BUDGET: u128 = 8_000_000;

pub fn mobius(mut n: usize) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of monic irreducibles of degree `d` over `F_q`, by Möbius
/// inversion of `sum_{e | d} e pi_q(e) = q^d`.
pub fn pi_irred(q: u64, d: usize) -> BigUint {
    assert!(d >= 1, "degree must be positive");
    let q = BigInt::from(q);
    let mut total = BigInt::zero();
    for e in 1..=d {
        if d % e != 0 {
            continue;
        }
        match mobius(e) {
            0 => {}
            1 => total += q.pow((d / e) as u32),
            _ => total -= q.pow((d / e) as u32),
        }
    }
    let (quot, rem) = total.div_rem(&BigInt::from(d));
    debug_assert!(rem.is_zero() && !quot.is_negative());
    quot.to_biguint().expect("nonnegative")
}

/// `C(n, m)` for a big `n` and small `m`.
pub fn binomial(n: &BigUint, m: usize) -> BigUint {
    if BigUint::from(m) > *n {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    for i in 0..m {
        num *= n - BigUint::from(i);
    }
    let fact: BigUint = (1..=m).map(BigUint::from).product();
    num / fact
}

/// Capped knapsack state: `table[k][n] = |P_{k,<=cap}(n)|`.
fn capped_dp(q: u64, k_max: usize, n_max: usize, cap: usize) -> Vec<Vec<BigUint>> {
    let mut table = vec![vec![BigUint::zero(); n_max + 1]; k_max + 1];
    table[0][0] = BigUint::one();
    for d in 1..=cap.min(n_max) {
        let pi = pi_irred(q, d);
        step(&mut table, &pi, d, None);
    }
    table
}

/// One knapsack step for degree `d`, updating `table` in place. When
/// `increments` is given, `increments[k][n]` receives the amount added to
/// `table[k][n]`, i.e. `|P_{k,d}(n)|`.
fn step(table: &mut [Vec<BigUint>], pi: &BigUint, d: usize, mut increments: Option<&mut Vec<Vec<BigUint>>>) {
    let k_max = table.len() - 1;
    let n_max = table[0].len() - 1;
    let m_max = k_max.min(n_max / d);
    let binoms: Vec<BigUint> = (0..=m_max).map(|m| binomial(pi, m)).collect();
    // k descending so table[k - m] still holds the previous step's values
    for k in (1..=k_max).rev() {
        for n in d..=n_max {
            let mut inc = BigUint::zero();
            for m in 1..=k.min(n / d) {
                if binoms[m].is_zero() {
                    break;
                }
                let prev = &table[k - m][n - m * d];
                if !prev.is_zero() {
                    inc += &binoms[m] * prev;
                }
            }
            if !inc.is_zero() {
                table[k][n] += &inc;
            }
            if let Some(incs) = increments.as_deref_mut() {
                incs[k][n] = inc;
            }
        }
    }
}

/// `|P_k(n)|`.
pub fn count_pk(q: u64, k: usize, n: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    capped_dp(q, k, n, n).swap_remove(k).swap_remove(n)
}

/// `|P_{k,<=cap}(n)|`.
pub fn count_pk_capped(q: u64, k: usize, n: usize, cap: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    capped_dp(q, k, n, cap).swap_remove(k).swap_remove(n)
}

/// `|P_{k,d}(n)| = |P_{k,<=d}(n)| - |P_{k,<=d-1}(n)|`.
pub fn count_pk_by_maxdeg(q: u64, k: usize, n: usize, d: usize) -> BigUint {
    if d == 0 || d > n || k > n {
        return BigUint::zero();
    }
    count_pk_capped(q, k, n, d) - count_pk_capped(q, k, n, d - 1)
}

/// `(q^n / n) (log n + 2 - log 2)^{k-1} / (k-1)!`, natural logs.
pub fn hr_bound(q: u64, k: usize, n: usize) -> LogReal {
    assert!(k >= 1 && n >= 1, "hr_bound needs k, n >= 1");
    let shifted_log = (n as f64).ln() + HR_SHIFT;
    let ln = n as f64 * (q as f64).ln() - (n as f64).ln() + (k - 1) as f64 * shifted_log.ln() - ln_factorial(k - 1);
    let qn = (q as f64).powi(n as i32);
    if qn.is_finite() {
        let mut v = qn / n as f64;
        for i in 1..k {
            v *= shifted_log / i as f64;
        }
        LogReal::new(v, ln)
    } else {
        LogReal::from_ln(ln)
    }
}

/// Relative accuracy of [`hr_bound`], used as slack when comparing exact
/// counts against it.
pub const HR_BOUND_REL_TOL: f64 = 1e-12;

/// Exact counts for a fixed `q`: `|P_k(n)|` for `k <= k_max`, `n <= n_max`,
/// optionally with the profile `|P_{k,d}(n)|` over `d`.
#[derive(Clone, Debug)]
pub struct CountTable {
    q: u64,
    k_max: usize,
    n_max: usize,
    pi: Vec<BigUint>,
    exact: Vec<Vec<BigUint>>,
    by_max: Option<Vec<Vec<Vec<BigUint>>>>,
}

impl CountTable {
    /// Exact counts only.
    pub fn new(q: u64, k_max: usize, n_max: usize) -> Self {
        Self::build(q, k_max, n_max, false)
    }

    /// Exact counts plus `|P_{k,d}(n)|` for every `d`, subject to
    /// [`PROFILE_BUDGET`].
    pub fn with_profiles(q: u64, k_max: usize, n_max: usize) -> Result<Self> {
        let cost = (k_max as u128) * (n_max as u128) * (n_max as u128);
        if cost > PROFILE_BUDGET {
            return Err(Error::budget("count profile k*n^2", cost, PROFILE_BUDGET));
        }
        Ok(Self::build(q, k_max, n_max, true))
    }

    fn build(q: u64, k_max: usize, n_max: usize, profiles: bool) -> Self {
        let mut table = vec![vec![BigUint::zero(); n_max + 1]; k_max + 1];
        table[0][0] = BigUint::one();
        let mut pi = vec![BigUint::zero()];
        let mut by_max: Option<Vec<Vec<Vec<BigUint>>>> = profiles.then(|| {
            (0..=k_max)
                .map(|_| (0..=n_max).map(|n| vec![BigUint::zero(); n + 1]).collect())
                .collect()
        });
        let mut incs = profiles.then(|| vec![vec![BigUint::zero(); n_max + 1]; k_max + 1]);
        for d in 1..=n_max {
            let p = pi_irred(q, d);
            step(&mut table, &p, d, incs.as_mut());
            if let (Some(bm), Some(incs)) = (by_max.as_mut(), incs.as_mut()) {
                for k in 1..=k_max {
                    for n in d..=n_max {
                        bm[k][n][d] = std::mem::take(&mut incs[k][n]);
                    }
                }
            }
            pi.push(p);
        }
        CountTable {
            q,
            k_max,
            n_max,
            pi,
            exact: table,
            by_max,
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn has_profiles(&self) -> bool {
        self.by_max.is_some()
    }

    /// `pi_q(d)`; zero for `d = 0`.
    pub fn pi(&self, d: usize) -> &BigUint {
        &self.pi[d]
    }

    /// `|P_k(n)|`, zero outside the table.
    pub fn count(&self, k: usize, n: usize) -> BigUint {
        self.get(k, n).cloned().unwrap_or_default()
    }

    pub fn get(&self, k: usize, n: usize) -> Option<&BigUint> {
        self.exact.get(k).and_then(|row| row.get(n))
    }

    /// `|P_{k,d}(n)|`; `None` when profiles were not built or the index is
    /// outside the table.
    pub fn by_maxdeg(&self, k: usize, n: usize, d: usize) -> Option<&BigUint> {
        self.by_max.as_ref()?.get(k)?.get(n)?.get(d)
    }

    /// `|P_{k,<=d}(n)|` as a prefix sum of the profile.
    pub fn capped(&self, k: usize, n: usize, d: usize) -> Option<BigUint> {
        let row = self.by_max.as_ref()?.get(k)?.get(n)?;
        if k == 0 {
            return Some(if n == 0 { BigUint::one() } else { BigUint::zero() });
        }
        Some(row.iter().take(d + 1).sum())
    }

    /// Slice `|P_{k,d}(n)|` for `d = 0..=n`.
    pub fn profile(&self, k: usize, n: usize) -> Option<&[BigUint]> {
        Some(self.by_max.as_ref()?.get(k)?.get(n)?.as_slice())
    }
}

/// `f64` convenience for small counts.
pub fn to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}
