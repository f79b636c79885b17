//! Monte Carlo sampling of `S^(k)(n) / sqrt(|P_k(n)|)` under random
//! Rademacher multiplicative functions.

mod ks;
mod signs;
mod sums;

pub use ks::{ks_normal, normal_cdf, KS_MIN_SAMPLES};
pub use signs::{derive_signs, mix64, sign_bit, trial_key, SignAssignment};
pub use sums::{evaluate_sums, SumDecomposition};

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{count_pk_by_maxdeg, to_f64};
use crate::error::{Error, Result};
use crate::numeric::{self, ratio};
use crate::polyfield::{enumerate_pkn, FieldSpec, IrredTable};

pub const HISTOGRAM_BINS: usize = 101;
pub const HISTOGRAM_RANGE: f64 = 5.0;

/// Fixed-width bins over `[-5, 5]`; values outside land in the two
/// overflow counters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub bins: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn new() -> Self {
        Histogram {
            lo: -HISTOGRAM_RANGE,
            hi: HISTOGRAM_RANGE,
            bins: vec![0; HISTOGRAM_BINS],
            underflow: 0,
            overflow: 0,
        }
    }

    pub fn add(&mut self, x: f64) {
        if x < self.lo {
            self.underflow += 1;
        } else if x > self.hi {
            self.overflow += 1;
        } else {
            let w = (self.hi - self.lo) / self.bins.len() as f64;
            let i = (((x - self.lo) / w) as usize).min(self.bins.len() - 1);
            self.bins[i] += 1;
        }
    }

    pub fn mass(&self) -> u64 {
        self.bins.iter().sum::<u64>() + self.underflow + self.overflow
    }
}

impl Default for Histogram {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerDegree {
    pub d: usize,
    /// Estimate of `E[S_d^2] / |P_k(n)|`.
    pub variance: f64,
    /// `|P_{k,d}(n)| / |P_k(n)|`, the exact value of the above.
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleStats {
    pub q: u64,
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    #[serde(with = "numeric::decimal")]
    pub support: BigUint,
    pub trials: u64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ks_distance: f64,
    pub histogram: Histogram,
    pub per_d_variance: Vec<PerDegree>,
}

impl SampleStats {
    pub fn max_per_d_deviation(&self) -> f64 {
        self.per_d_variance.iter().map(|p| (p.variance - p.expected).abs()).fold(0.0, f64::max)
    }
}

/// Stats plus the normalized samples in trial order.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub stats: SampleStats,
    pub samples: Vec<f64>,
}

/// `P_k(n)` enumerated once, flattened to `k` sign ranks per element.
pub struct Support {
    q: u64,
    k: usize,
    n: usize,
    table: IrredTable,
    ranks: Vec<u32>,
    pmax: Vec<u16>,
    count: BigUint,
}

impl Support {
    pub fn new(q: u64, k: usize, n: usize) -> Result<Self> {
        let table = IrredTable::build(&FieldSpec::with_order(q)?, n)?;
        Self::from_table(table, k, n)
    }

    /// Reuses a prebuilt table, which must reach degree `n`.
    pub fn from_table(table: IrredTable, k: usize, n: usize) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!("k and n must be positive (got k={k}, n={n})")));
        }
        let q = table.field().q() as u64;
        let sets = enumerate_pkn(k, n, &table, None)?;
        if sets.is_empty() {
            return Err(Error::EmptySupport { k, n });
        }
        let ranks = sets
            .iter()
            .flat_map(|s| s.factors().iter().map(|&id| table.rank(id) as u32))
            .collect();
        let pmax = sets.iter().map(|s| s.pmax() as u16).collect();
        let count = BigUint::from(sets.len());
        Ok(Support { q, k, n, table, ranks, pmax, count })
    }

    pub fn table(&self) -> &IrredTable {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.pmax.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pmax.is_empty()
    }

    pub fn evaluate(&self, a: &SignAssignment) -> SumDecomposition {
        let mut by_d = vec![0i64; self.n + 1];
        for (elem, &d) in self.ranks.chunks_exact(self.k).zip(&self.pmax) {
            let neg = elem.iter().fold(false, |acc, &r| acc ^ a.is_negative(r as usize));
            by_d[d as usize] += if neg { -1 } else { 1 };
        }
        SumDecomposition { s: by_d.iter().sum(), by_d }
    }

    /// Runs `trials` independent trials. Every per-trial quantity is an
    /// integer and is merged by addition, so the result does not depend on
    /// how rayon splits the work.
    pub fn run(&self, trials: u64, seed: u64) -> Result<Experiment> {
        let n = self.n;
        let per_trial: Vec<(i64, Vec<u128>)> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let a = SignAssignment::derive(seed, trial, &self.table, n);
                let sums = self.evaluate(&a);
                debug_assert_eq!(sums.by_d.iter().sum::<i64>(), sums.s);
                let sq = sums.by_d.iter().map(|&x| (x * x) as u128).collect();
                (sums.s, sq)
            })
            .collect();

        let mut sd2 = vec![0u128; n + 1];
        for (_, sq) in &per_trial {
            for (acc, x) in sd2.iter_mut().zip(sq) {
                *acc += x;
            }
        }
        let s: Vec<i64> = per_trial.into_iter().map(|(s, _)| s).collect();

        let norm = to_f64(&self.count).sqrt();
        let samples: Vec<f64> = s.iter().map(|&x| x as f64 / norm).collect();
        let mut histogram = Histogram::new();
        for &x in &samples {
            histogram.add(x);
        }
        let (mean, variance, skewness, excess_kurtosis) = moments(&s, norm);
        let ks_distance = if samples.len() >= KS_MIN_SAMPLES {
            ks_normal(&samples)?
        } else {
            f64::NAN
        };

        let total = trials as f64 * to_f64(&self.count);
        let per_d_variance = (1..=n)
            .filter_map(|d| {
                let exact = count_pk_by_maxdeg(self.q, self.k, n, d);
                (!exact.is_zero() || sd2[d] != 0).then(|| PerDegree {
                    d,
                    variance: sd2[d] as f64 / total,
                    expected: ratio(&exact, &self.count),
                })
            })
            .collect();

        Ok(Experiment {
            stats: SampleStats {
                q: self.q,
                k: self.k,
                n,
                seed,
                support: self.count.clone(),
                trials,
                mean,
                variance,
                skewness,
                excess_kurtosis,
                ks_distance,
                histogram,
                per_d_variance,
            },
            samples,
        })
    }
}

/// Sample mean, variance, skewness and excess kurtosis of `s / norm`.
/// Central moments are formed exactly from integer power sums and only
/// then converted to floating point.
fn moments(s: &[i64], norm: f64) -> (f64, f64, f64, f64) {
    let t = BigInt::from(s.len());
    let mut p = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
    for &x in s {
        let x = x as i128;
        p[0] += x;
        p[1] += x * x;
        p[2] += BigInt::from(x * x) * x;
        p[3] += BigInt::from(x * x) * (x * x);
    }
    let [s1, s2, s3, s4] = p;
    // T^k times the k-th central moment
    let c2 = &t * &s2 - &s1 * &s1;
    let c3 = &t * &t * &s3 - BigInt::from(3) * &t * &s1 * &s2 + BigInt::from(2) * s1.pow(3);
    let c4 = t.pow(3) * &s4 - BigInt::from(4) * t.pow(2) * &s1 * &s3 + BigInt::from(6) * &t * s1.pow(2) * &s2
        - BigInt::from(3) * s1.pow(4);
    let tf = t.to_f64().unwrap_or(f64::NAN);
    let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
    let mean = f(&s1) / tf / norm;
    let var_raw = f(&c2) / (tf * tf);
    let variance = var_raw / (norm * norm);
    let skewness = f(&c3) / tf.powi(3) / var_raw.powf(1.5);
    let excess_kurtosis = f(&c4) / tf.powi(4) / (var_raw * var_raw) - 3.0;
    (mean, variance, skewness, excess_kurtosis)
}

pub fn run_experiment(q: u64, k: usize, n: usize, trials: u64, seed: u64) -> Result<SampleStats> {
    Ok(Support::new(q, k, n)?.run(trials, seed)?.stats)
}
