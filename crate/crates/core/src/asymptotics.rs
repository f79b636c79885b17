//! Asymptotic main terms for `|P_k(n)|`: the Gamma function, the Euler
//! product correction `G(z)`, and the factorial-type tail sum that bounds
//! the key lemma's error.

use num_bigint::BigUint;
use serde::Serialize;

use crate::counting::{count_pk, pi_irred, to_f64};
use crate::error::{Error, Result};
use crate::numeric::{ln_biguint, ln_factorial};

/// Default truncation degree for [`euler_product_g`].
pub const DEFAULT_TRUNCATION: usize = 40;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_ln_gamma(z: f64) -> f64 {
    // valid for z >= 1/2
    let z = z - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// `ln Γ(z)` for `z > 0`.
pub fn ln_gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::InvalidArgument(format!("gamma needs a finite z > 0 (got {z})")));
    }
    if z == 1.0 || z == 2.0 {
        Ok(0.0)
    } else if z < 0.5 {
        // Γ(z) = Γ(z + 1) / z keeps the approximation in its accurate range
        Ok(lanczos_ln_gamma(z + 1.0) - z.ln())
    } else {
        Ok(lanczos_ln_gamma(z))
    }
}

/// `Γ(z)` for `z > 0`, relative accuracy around `1e-14` where finite.
pub fn gamma_real(z: f64) -> Result<f64> {
    Ok(ln_gamma(z)?.exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GEvaluation {
    pub q: u64,
    pub z: f64,
    pub truncation: usize,
    pub value: f64,
    pub ln_value: f64,
    /// Bound on `|ln G - ln G_D|` from the omitted degrees.
    pub ln_tail_bound: f64,
    /// Bound on `|G - value|`: the omitted degrees plus floating-point
    /// error in evaluating the truncated product.
    pub tail_bound: f64,
}

/// Bound on `sum over d > D of pi_q(d) |ln(1 + z x) + z ln(1 - x)|` with
/// `x = q^-d`. For `z <= 1` and `x <= 1/2` each summand is at most
/// `z (1 + z) x^2`, and `pi_q(d) <= q^d / d`.
pub fn ln_tail_bound(q: u64, z: f64, truncation: usize) -> f64 {
    let qf = q as f64;
    let d1 = (truncation + 1) as f64;
    z * (1.0 + z) * qf.powf(-d1) / (d1 * (1.0 - 1.0 / qf))
}

/// `G(z) = Γ(1 + z)^-1 prod_P (1 + z / q^deg P)(1 - 1 / q^deg P)^z`, the
/// product taken over irreducibles of degree at most `truncation` and
/// grouped by degree.
pub fn euler_product_g(q: u64, z: f64, truncation: usize) -> Result<GEvaluation> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::InvalidArgument(format!("G(z) needs z in [0, 1] (got {z})")));
    }
    if truncation == 0 {
        return Err(Error::InvalidArgument("truncation degree must be at least 1".into()));
    }
    if q < 2 {
        return Err(Error::InvalidArgument(format!("q must be at least 2 (got {q})")));
    }
    let qf = q as f64;
    let mut ln = -ln_gamma(1.0 + z)?;
    for d in 1..=truncation {
        let x = qf.powi(-(d as i32));
        let per = (z * x).ln_1p() + z * (-x).ln_1p();
        ln += to_f64(&pi_irred(q, d)) * per;
    }
    let ln_tail = ln_tail_bound(q, z, truncation);
    let value = ln.exp();
    // every summand is exactly zero at z = 0; otherwise each of the
    // `truncation` steps and the final exp contribute a few ulps
    let rounding = if z == 0.0 {
        0.0
    } else {
        value * f64::EPSILON * (2 * truncation + 16) as f64
    };
    Ok(GEvaluation {
        q,
        z,
        truncation,
        value,
        ln_value: ln,
        ln_tail_bound: ln_tail,
        tail_bound: value * ln_tail.exp_m1() + rounding,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticComparison {
    pub q: u64,
    pub k: usize,
    pub n: usize,
    pub exact_log: f64,
    pub predicted_log: f64,
    /// `|exact / prediction - 1|`.
    pub relative_deviation: f64,
    pub g: GEvaluation,
}

/// Compares `|P_k(n)|` with `q^n (log n)^{k-1} G((k-1)/log n) / (n (k-1)!)`.
pub fn sathe_selberg_estimate(q: u64, k: usize, n: usize, truncation: usize) -> Result<AsymptoticComparison> {
    check_kn(k, n)?;
    sathe_selberg_from_count(q, k, n, &count_pk(q, k, n), truncation)
}

/// As [`sathe_selberg_estimate`] with the exact count supplied by the
/// caller.
pub fn sathe_selberg_from_count(
    q: u64,
    k: usize,
    n: usize,
    count: &BigUint,
    truncation: usize,
) -> Result<AsymptoticComparison> {
    check_kn(k, n)?;
    if count.bits() == 0 {
        return Err(Error::EmptySupport { k, n });
    }
    let ln_n = (n as f64).ln();
    let z = (k - 1) as f64 / ln_n;
    let g = euler_product_g(q, z, truncation)?;
    let predicted_log =
        n as f64 * (q as f64).ln() + (k - 1) as f64 * ln_n.ln() - ln_n - ln_factorial(k - 1) + g.ln_value;
    let exact_log = ln_biguint(count);
    Ok(AsymptoticComparison {
        q,
        k,
        n,
        exact_log,
        predicted_log,
        relative_deviation: (exact_log - predicted_log).exp_m1().abs(),
        g,
    })
}

fn check_kn(k: usize, n: usize) -> Result<()> {
    if k == 0 || n < 2 {
        return Err(Error::InvalidArgument(format!("need k >= 1 and n >= 2 (got k={k}, n={n})")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FactorialTail {
    pub m: u32,
    pub c: f64,
    pub terms: u64,
    pub sum: f64,
    pub ratio_to_m_factorial: f64,
}

/// `sum_{j <= terms} (ln j + c)^m / j^2` and its ratio to `m!`.
pub fn factorial_tail_check(m: u32, c: f64, terms: u64) -> Result<FactorialTail> {
    if m > 40 {
        return Err(Error::InvalidArgument(format!("m must be at most 40 (got {m})")));
    }
    if terms < 1000 {
        return Err(Error::InvalidArgument(format!("need at least 1000 terms (got {terms})")));
    }
    // smallest terms first
    let sum: f64 = (1..=terms)
        .rev()
        .map(|j| {
            let jf = j as f64;
            (jf.ln() + c).powi(m as i32) / (jf * jf)
        })
        .sum();
    Ok(FactorialTail {
        m,
        c,
        terms,
        sum,
        ratio_to_m_factorial: sum / ln_factorial(m as usize).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::HR_SHIFT;

    /// Γ(z) from its integral: the lower part via the series
    /// `γ(z, x) = x^z e^-x sum x^i / (z (z+1) ... (z+i))` at `x = 60`,
    /// where the omitted upper part is below `1e-24`.
    fn gamma_by_series(z: f64) -> f64 {
        let x = 60.0f64;
        let mut term = 1.0 / z;
        let mut sum = term;
        let mut i = 1.0;
        while term > sum * 1e-18 {
            term *= x / (z + i);
            sum += term;
            i += 1.0;
        }
        (z * x.ln() - x).exp() * sum
    }

    #[test]
    fn gamma_values() {
        assert!((gamma_real(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_real(0.5).unwrap() - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((gamma_real(5.0).unwrap() - 24.0).abs() < 1e-11);
        let g = gamma_real(1.2).unwrap();
        assert!((g - 0.918_168_742_4).abs() < 1e-10);
        for z in [0.05, 0.3, 1.2, 2.7, 7.5] {
            let oracle = gamma_by_series(z);
            assert!((gamma_real(z).unwrap() / oracle - 1.0).abs() < 1e-10, "z = {z}");
        }
        assert!(gamma_real(0.0).is_err());
        assert!(gamma_real(-1.0).is_err());
    }

    #[test]
    fn g_at_zero_is_one() {
        for q in [2, 3, 9] {
            for d in [1, 10, 40] {
                let g = euler_product_g(q, 0.0, d).unwrap();
                assert_eq!(g.value, 1.0);
                assert_eq!(g.tail_bound, 0.0);
            }
        }
    }

    #[test]
    fn truncation_is_within_tail() {
        let a = euler_product_g(2, 0.2, 30).unwrap();
        let b = euler_product_g(2, 0.2, 40).unwrap();
        assert!((a.value - b.value).abs() <= a.tail_bound);
        assert!(euler_product_g(2, 1.0, 30).unwrap().tail_bound < 1e-8);
        for d in 1..40 {
            let x = euler_product_g(3, 0.7, d).unwrap();
            let y = euler_product_g(3, 0.7, d + 1).unwrap();
            assert!((x.value - y.value).abs() <= x.tail_bound, "D = {d}");
            assert!(y.ln_tail_bound < x.ln_tail_bound);
        }
    }

    #[test]
    fn linear_case_is_the_prime_polynomial_theorem() {
        let c = sathe_selberg_estimate(2, 1, 20, DEFAULT_TRUNCATION).unwrap();
        let direct = (to_f64(&pi_irred(2, 20)) * 20.0 / 2f64.powi(20) - 1.0).abs();
        assert!((c.relative_deviation - direct).abs() < 1e-12);
        assert!(c.relative_deviation <= 2.0 / 2f64.powi(10));
    }

    #[test]
    fn hr_dominates_prediction() {
        for n in [100usize, 400, 1000] {
            for k in 2..=4 {
                let c = sathe_selberg_estimate(2, k, n, 30).unwrap();
                let hr = crate::counting::hr_bound(2, k, n);
                assert!(hr.ln >= c.predicted_log && hr.ln >= c.exact_log);
            }
        }
        assert!(HR_SHIFT > 0.0);
    }

    #[test]
    fn factorial_tail() {
        let t0 = factorial_tail_check(0, HR_SHIFT, 1_000_000).unwrap();
        assert!((t0.sum - std::f64::consts::PI.powi(2) / 6.0).abs() < 2e-6);
        let t1 = factorial_tail_check(1, HR_SHIFT, 1_000_000).unwrap();
        assert!(t1.ratio_to_m_factorial <= 4.0);
        assert!(factorial_tail_check(41, 0.0, 1000).is_err());
        assert!(factorial_tail_check(1, 0.0, 999).is_err());
    }
}
