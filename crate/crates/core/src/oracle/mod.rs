//! Brute-force computation of the fourth-moment quantities at small scale,
//! and exact checks of the counting lemma, the gcd bound, the martingale
//! conditions and the variance identity.
//!
//! Everything here is exhaustive and meant for `n` up to about 10 over
//! `F_2`. The quantities are:
//!
//! * `mixed(d, e) = E[S_d^2 S_e^2]`, the number of quadruples
//!   `(W, X, Y, Z)` in `P_{k,d} x P_{k,d} x P_{k,e} x P_{k,e}` with `WXYZ`
//!   a square, counted through a parity-key census of pairs;
//! * `I_{k,d,e}(n)` and `J_{k,d,d}(n)`, transcribed literally as nested
//!   sums over enumerated factor sets.

mod brute;
mod exhaustive;
mod parity;

use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use serde::Serialize;

use crate::counting::{count_pk, count_pk_capped, CountTable};
use crate::error::{Error, Result};
use crate::numeric::{self, ratio};
use crate::polyfield::{enumerate_pkn, FactorSet, FieldSpec, IrredTable};

pub use brute::{brute_count_by_omega, DEFAULT_FACTOR_BUDGET};
pub use exhaustive::{conditional_mean_check, exhaustive_moments, ExhaustiveMoments, DEFAULT_ASSIGNMENT_BUDGET};
pub use parity::{census_overlap, key_words, pair_parity_census, Census, ParityKey, DEFAULT_CENSUS_BUDGET};

/// Enumerations and censuses for one `(q, k, n)`, memoized.
pub struct OracleContext {
    k: usize,
    n: usize,
    table: IrredTable,
    words: usize,
    census_budget: usize,
    sets: HashMap<(usize, usize, usize), Rc<Vec<FactorSet>>>,
    by_d: Vec<Rc<Vec<FactorSet>>>,
    census_by_d: HashMap<usize, Rc<Census>>,
}

impl OracleContext {
    pub fn new(q: u64, k: usize, n: usize) -> Result<Self> {
        Self::with_budget(q, k, n, DEFAULT_CENSUS_BUDGET)
    }

    pub fn with_budget(q: u64, k: usize, n: usize, census_budget: usize) -> Result<Self> {
        if k < 1 || n < 1 {
            return Err(Error::InvalidArgument("oracle needs k, n >= 1".into()));
        }
        let field = FieldSpec::with_order(q)?;
        let table = IrredTable::build(&field, n)?;
        Ok(Self::from_table(table, k, n, census_budget))
    }

    pub fn from_table(table: IrredTable, k: usize, n: usize, census_budget: usize) -> Self {
        let words = key_words(&table, n);
        let mut ctx = OracleContext {
            k,
            n,
            table,
            words,
            census_budget,
            sets: HashMap::new(),
            by_d: Vec::new(),
            census_by_d: HashMap::new(),
        };
        let all = ctx.sets(k, n, n);
        let mut by_d = vec![Vec::new(); n + 1];
        for s in all.iter() {
            by_d[s.pmax()].push(s.clone());
        }
        ctx.by_d = by_d.into_iter().map(Rc::new).collect();
        ctx
    }

    pub fn q(&self) -> u64 {
        self.table.field().q() as u64
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &IrredTable {
        &self.table
    }

    /// `P_{k',<=cap}(n')`, memoized.
    fn sets(&mut self, k: usize, n: usize, cap: usize) -> Rc<Vec<FactorSet>> {
        let cap = cap.min(n);
        if let Some(s) = self.sets.get(&(k, n, cap)) {
            return s.clone();
        }
        let s = Rc::new(enumerate_pkn(k, n, &self.table, Some(cap)).expect("table depth covers cap <= n"));
        self.sets.insert((k, n, cap), s.clone());
        s
    }

    /// `P_{k,d}(n)` for the context's `(k, n)`.
    pub fn pkd(&self, d: usize) -> &[FactorSet] {
        self.by_d.get(d).map_or(&[], |v| v.as_slice())
    }

    pub fn pk_len(&self) -> usize {
        self.by_d.iter().map(|v| v.len()).sum()
    }

    fn census(&mut self, d: usize) -> Result<Rc<Census>> {
        if let Some(c) = self.census_by_d.get(&d) {
            return Ok(c.clone());
        }
        let c = Rc::new(pair_parity_census(self.pkd(d), &self.table, self.words, self.census_budget)?);
        self.census_by_d.insert(d, c.clone());
        Ok(c)
    }

    /// `E[S_d^2 S_e^2]` as a count of square quadruples.
    pub fn exact_mixed_moment(&mut self, d: usize, e: usize) -> Result<BigUint> {
        if d == 0 || e == 0 || d > self.n || e > self.n {
            return Ok(BigUint::zero());
        }
        let cd = self.census(d)?;
        let ce = self.census(e)?;
        Ok(BigUint::from(census_overlap(&cd, &ce)))
    }

    /// `E[S^2]` read off the zero key of the census of all of `P_k(n)`.
    pub fn second_moment_from_census(&self) -> Result<BigUint> {
        let all: Vec<FactorSet> = self.by_d.iter().flat_map(|v| v.iter().cloned()).collect();
        let census = pair_parity_census(&all, &self.table, self.words, self.census_budget)?;
        Ok(BigUint::from(census.get(&ParityKey::zero(self.words)).copied().unwrap_or(0)))
    }

    /// `E[S^4]` for the full sum.
    pub fn fourth_moment_from_census(&self) -> Result<BigUint> {
        let all: Vec<FactorSet> = self.by_d.iter().flat_map(|v| v.iter().cloned()).collect();
        let census = pair_parity_census(&all, &self.table, self.words, self.census_budget)?;
        Ok(BigUint::from(census_overlap(&census, &census)))
    }

    /// `I_{k,d,e}(n)` by literal enumeration of `t, l, M, A, U, B, V`.
    pub fn brute_i(&mut self, d: usize, e: usize) -> BigUint {
        let (k, n) = (self.k, self.n);
        let mut total = BigUint::zero();
        for t in 1..k {
            for l in 1..n {
                let ms = self.sets(2 * t, 2 * l, d.min(e));
                if ms.is_empty() {
                    continue;
                }
                let us = self.sets(k - t, n - l, d);
                let vs = self.sets(k - t, n - l, e);
                for m in ms.iter() {
                    let mut left = 0u64;
                    let mut right = 0u64;
                    // A and B range over the same divisors of M; the sum
                    // over (A, U) and the sum over (B, V) are independent
                    for div in m.divisors_with(t, l) {
                        if div.pmax() <= d {
                            left += us.iter().filter(|u| u.pmax().max(div.pmax()) == d).count() as u64;
                        }
                        if div.pmax() <= e {
                            right += vs.iter().filter(|v| v.pmax().max(div.pmax()) == e).count() as u64;
                        }
                    }
                    total += BigUint::from(left) * right;
                }
            }
        }
        total
    }

    /// `J_{k,d,d}(n)` under both readings of the pair range: ordered
    /// distinct pairs `P != Q`, and all ordered pairs.
    pub fn brute_j(&mut self, d: usize) -> JValue {
        let (k, n) = (self.k, self.n);
        if k < 2 || d == 0 || d >= n {
            return JValue::default();
        }
        // M' with a factor of degree > n - d has no divisor in P_{k-1}(n-d)
        // whose cofactor is also in P_{k-1}(n-d), so those terms vanish.
        let m_primes = self.sets(2 * k - 2, 2 * n - 2 * d, n - d);
        let mut inner = BigUint::zero();
        for m in m_primes.iter() {
            let c = m.divisors_with(k - 1, n - d).len() as u64;
            inner += c * c;
        }
        let pi = self.table.count(d) as u64;
        JValue {
            distinct: &inner * (pi * pi.saturating_sub(1)),
            all_pairs: inner * (pi * pi),
        }
    }

    /// Checks `mixed(d, e) <= |P_{k,d}| |P_{k,e}| + I + J` for every
    /// `1 <= d, e <= n - 1`, with the distinct-pair reading of `J`.
    pub fn verify_square_lemma(&mut self) -> Result<Vec<MomentReport>> {
        let mut out = Vec::new();
        for d in 1..self.n {
            for e in 1..self.n {
                let mixed = self.exact_mixed_moment(d, e)?;
                let bound_main = BigUint::from(self.pkd(d).len()) * self.pkd(e).len();
                let i_exact = self.brute_i(d, e);
                let j = if d == e { self.brute_j(d) } else { JValue::default() };
                let rhs = &bound_main + &i_exact + &j.distinct;
                let rhs_all = &bound_main + &i_exact + &j.all_pairs;
                let rhs_doubled = &bound_main + &i_exact + &j.distinct * 2u32;
                out.push(MomentReport {
                    q: self.q(),
                    k: self.k,
                    n: self.n,
                    d,
                    e,
                    holds: mixed <= rhs,
                    holds_all_pairs: mixed <= rhs_all,
                    holds_doubled_j: mixed <= rhs_doubled,
                    mixed,
                    bound_main,
                    i_exact,
                    j_distinct: j.distinct,
                    j_all_pairs: j.all_pairs,
                });
            }
        }
        Ok(out)
    }

    pub fn mcleish_report(&mut self) -> Result<McLeishReport> {
        let (q, k, n) = (self.q(), self.k, self.n);
        let pk = count_pk(q, k, n);
        if pk.is_zero() {
            return Err(Error::EmptySupport { k, n });
        }
        let c1_numerator: BigUint = (1..=n).map(|d| BigUint::from(self.pkd(d).len())).sum();
        let mut c2_sum = BigUint::zero();
        let mut c3_sum = BigUint::zero();
        let mut c3_main = BigUint::zero();
        for d in 1..n {
            for e in 1..n {
                let m = self.exact_mixed_moment(d, e)?;
                if d == e {
                    c2_sum += m;
                } else {
                    c3_sum += m;
                    c3_main += BigUint::from(self.pkd(d).len()) * self.pkd(e).len();
                }
            }
        }
        let pk_sq = &pk * &pk;
        let c3_excess = if c3_sum >= c3_main {
            ratio(&(&c3_sum - &c3_main), &pk_sq)
        } else {
            -ratio(&(&c3_main - &c3_sum), &pk_sq)
        };
        Ok(McLeishReport {
            q,
            k,
            n,
            c1_is_one: c1_numerator == pk,
            c1_numerator,
            c1_denominator: pk.clone(),
            c2_ratio: ratio(&c2_sum, &pk_sq),
            c3_ratio: ratio(&c3_sum, &pk_sq),
            c3_excess_ratio: c3_excess,
            c2_sum,
            c3_sum,
            pk_sq,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct JValue {
    #[serde(with = "numeric::decimal")]
    pub distinct: BigUint,
    #[serde(with = "numeric::decimal")]
    pub all_pairs: BigUint,
}

/// One `(d, e)` instance of the counting lemma.
#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub q: u64,
    pub k: usize,
    pub n: usize,
    pub d: usize,
    pub e: usize,
    #[serde(with = "numeric::decimal")]
    pub mixed: BigUint,
    #[serde(with = "numeric::decimal")]
    pub bound_main: BigUint,
    #[serde(with = "numeric::decimal")]
    pub i_exact: BigUint,
    #[serde(with = "numeric::decimal")]
    pub j_distinct: BigUint,
    #[serde(with = "numeric::decimal")]
    pub j_all_pairs: BigUint,
    /// Inequality with the distinct-pair `J`.
    pub holds: bool,
    pub holds_all_pairs: bool,
    /// With `J` doubled: each unordered pair of degree-`d` primes in `M`
    /// can sit in `A` and `B` in four ways, not two.
    pub holds_doubled_j: bool,
}

/// Exact values of the three martingale CLT conditions at one `n`.
#[derive(Clone, Debug, Serialize)]
pub struct McLeishReport {
    pub q: u64,
    pub k: usize,
    pub n: usize,
    /// Condition (i): `sum_d |P_{k,d}(n)| / |P_k(n)|`, numerator from
    /// enumeration and denominator from the counting recursion.
    #[serde(with = "numeric::decimal")]
    pub c1_numerator: BigUint,
    #[serde(with = "numeric::decimal")]
    pub c1_denominator: BigUint,
    pub c1_is_one: bool,
    /// Condition (ii) proxy: `sum_d E[S_d^4]`.
    #[serde(with = "numeric::decimal")]
    pub c2_sum: BigUint,
    /// Condition (iii): `sum_{d != e} E[S_d^2 S_e^2]`.
    #[serde(with = "numeric::decimal")]
    pub c3_sum: BigUint,
    #[serde(with = "numeric::decimal")]
    pub pk_sq: BigUint,
    pub c2_ratio: f64,
    pub c3_ratio: f64,
    /// `(c3_sum - sum_{d != e} |P_{k,d}| |P_{k,e}|) / |P_k|^2`.
    pub c3_excess_ratio: f64,
}

/// Result of the gcd decomposition bound for one `(t, l)`.
#[derive(Clone, Debug, Serialize)]
pub struct GcdBound {
    pub q: u64,
    pub t: usize,
    pub l: usize,
    #[serde(with = "numeric::decimal")]
    pub lhs: BigUint,
    #[serde(with = "numeric::decimal")]
    pub rhs: BigUint,
    pub holds: bool,
}

/// `lhs = sum_{M in P_{2t}(2l)} #{A | M : A in P_t(l)}^2` by enumeration;
/// `rhs = 2 |P_t(l)|^2 + sum_{j<t, g<l} |P_j(g)|^2 |P_{t-j}(l-g)|^2` from
/// exact counts. `budget` caps the number of `M` enumerated.
pub fn verify_gcd_bound(q: u64, t: usize, l: usize, budget: Option<usize>) -> Result<GcdBound> {
    if t == 0 || l == 0 {
        return Err(Error::InvalidArgument("gcd bound needs t, l >= 1".into()));
    }
    let counts = CountTable::new(q, t, l);
    let budget = budget.unwrap_or(DEFAULT_CENSUS_BUDGET);
    // a term is nonzero only if M = A (M/A) with both parts in P_t(l), so
    // every factor of M has degree <= l
    let expected = count_pk_capped(q, 2 * t, 2 * l, l);
    if expected > BigUint::from(budget) {
        return Err(Error::budget(
            "gcd bound enumeration",
            expected.to_u128().unwrap_or(u128::MAX),
            budget as u128,
        ));
    }
    let table = IrredTable::build(&FieldSpec::with_order(q)?, l)?;
    let ms = enumerate_pkn(2 * t, 2 * l, &table, Some(l))?;
    let mut lhs = BigUint::zero();
    for m in &ms {
        let c = m.divisors_with(t, l).len() as u64;
        lhs += c * c;
    }
    let sq = |k: usize, n: usize| counts.count(k, n).pow(2);
    let mut rhs = sq(t, l) * 2u32;
    for j in 1..t {
        for g in 1..l {
            rhs += sq(j, g) * sq(t - j, l - g);
        }
    }
    Ok(GcdBound {
        q,
        t,
        l,
        holds: lhs <= rhs,
        lhs,
        rhs,
    })
}

/// Convenience wrappers building a fresh context.
pub fn exact_mixed_moment(q: u64, k: usize, n: usize, d: usize, e: usize) -> Result<BigUint> {
    OracleContext::new(q, k, n)?.exact_mixed_moment(d, e)
}

pub fn brute_i(q: u64, k: usize, d: usize, e: usize, n: usize) -> Result<BigUint> {
    Ok(OracleContext::new(q, k, n)?.brute_i(d, e))
}

pub fn brute_j(q: u64, k: usize, d: usize, n: usize) -> Result<JValue> {
    Ok(OracleContext::new(q, k, n)?.brute_j(d))
}

pub fn verify_square_lemma(q: u64, k: usize, n: usize) -> Result<Vec<MomentReport>> {
    OracleContext::new(q, k, n)?.verify_square_lemma()
}

pub fn mcleish_report(q: u64, k: usize, n: usize) -> Result<McLeishReport> {
    OracleContext::new(q, k, n)?.mcleish_report()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn worked_instance_k2_n3() {
        let mut ctx = OracleContext::new(2, 2, 3).unwrap();
        assert_eq!(ctx.exact_mixed_moment(2, 2).unwrap(), big(8));
        assert_eq!(ctx.exact_mixed_moment(1, 2).unwrap(), big(0));
        assert_eq!(ctx.brute_i(2, 2), big(4));
        let j = ctx.brute_j(2);
        assert_eq!(j.distinct, big(0));
        assert_eq!(j.all_pairs, big(4));
        let reports = ctx.verify_square_lemma().unwrap();
        let r22 = reports.iter().find(|r| r.d == 2 && r.e == 2).unwrap();
        assert_eq!((r22.mixed.clone(), r22.bound_main.clone()), (big(8), big(4)));
        assert!(reports.iter().all(|r| r.holds && r.holds_all_pairs));
    }

    #[test]
    fn product_case_with_two_top_primes() {
        // S_3 = (f(P1) + f(P2)) (f(t) + f(t+1)) for the two cubics, so
        // E[S_3^4] = 8 * 8, while the distinct-pair bound gives 16 + 32 + 8
        let mut ctx = OracleContext::new(2, 2, 4).unwrap();
        let r = ctx.verify_square_lemma().unwrap().into_iter().find(|r| r.d == 3 && r.e == 3).unwrap();
        assert_eq!(r.mixed, big(64));
        assert_eq!((r.bound_main, r.i_exact, r.j_distinct), (big(16), big(32), big(8)));
        assert!(!r.holds);
        assert!(r.holds_doubled_j);
    }

    #[test]
    fn doubled_j_bound_holds_on_small_instances() {
        for k in [2, 3] {
            for n in 2..=8 {
                let mut ctx = OracleContext::new(2, k, n).unwrap();
                for r in ctx.verify_square_lemma().unwrap() {
                    assert!(r.holds_doubled_j, "k={k} n={n} d={} e={}", r.d, r.e);
                }
            }
        }
    }

    #[test]
    fn empty_ranges_vanish() {
        let mut ctx = OracleContext::new(2, 2, 5).unwrap();
        assert_eq!(ctx.brute_i(5, 2), big(0));
        assert_eq!(ctx.brute_j(5), JValue::default());
        assert_eq!(ctx.exact_mixed_moment(5, 5).unwrap(), big(0));
    }

    #[test]
    fn symmetry_and_diagonal() {
        let mut ctx = OracleContext::new(2, 3, 7).unwrap();
        for d in 1..7 {
            let len = ctx.pkd(d).len() as u64;
            assert!(ctx.exact_mixed_moment(d, d).unwrap() >= big(len * len));
            for e in 1..7 {
                assert_eq!(ctx.exact_mixed_moment(d, e).unwrap(), ctx.exact_mixed_moment(e, d).unwrap());
                assert_eq!(ctx.brute_i(d, e), ctx.brute_i(e, d));
            }
        }
    }

    #[test]
    fn census_second_moment_is_count() {
        for (q, k, n) in [(2, 2, 6), (2, 3, 8), (3, 2, 5), (4, 2, 4)] {
            let ctx = OracleContext::new(q, k, n).unwrap();
            assert_eq!(ctx.second_moment_from_census().unwrap(), count_pk(q, k, n));
            assert_eq!(ctx.pk_len() as u64, count_pk(q, k, n).to_u64().unwrap());
        }
    }

    #[test]
    fn gcd_bound_examples() {
        let g = verify_gcd_bound(2, 1, 1, None).unwrap();
        assert_eq!((g.lhs.clone(), g.rhs.clone()), (big(4), big(8)));
        assert!(g.holds);
        for l in 1..=5 {
            let g = verify_gcd_bound(2, 1, l, None).unwrap();
            assert_eq!(g.rhs, count_pk(2, 1, l).pow(2) * 2u32);
        }
        assert!(verify_gcd_bound(2, 2, 3, None).unwrap().holds);
        assert!(verify_gcd_bound(2, 1, 4, Some(1)).is_err());
    }

    #[test]
    fn mcleish_small() {
        let r = mcleish_report(2, 2, 3).unwrap();
        assert!(r.c1_is_one);
        assert_eq!(r.c2_sum, big(8));
        assert_eq!(r.pk_sq, big(4));
        assert_eq!(r.c2_ratio, 2.0);
        assert!(mcleish_report(2, 4, 3).is_err());
    }
}
