//! Log-domain helpers for quantities that overflow `f64`.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

/// `2 - log 2`, the shift inside the Hardy–Ramanujan bound and the key
/// convolution estimate.
pub const HR_SHIFT: f64 = 2.0 - std::f64::consts::LN_2;

/// Largest natural log whose exponential is finite.
const LN_F64_MAX: f64 = 709.782712893384;

/// Natural log of a positive big integer from its top 64 bits and binary
/// exponent; relative error is about 1e-16.
pub fn ln_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "log of zero");
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap() as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Ratio `a / b` of big integers as a float, via logs when either side
/// is too large to convert directly.
pub fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    match (a.to_f64(), b.to_f64()) {
        (Some(x), Some(y)) if x.is_finite() && y.is_finite() => x / y,
        _ => (ln_biguint(a) - ln_biguint(b)).exp(),
    }
}

/// `ln(m!)`.
pub fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|i| (i as f64).ln()).sum()
}

/// A positive real kept as its natural log, with the linear value attached
/// when it is representable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogReal {
    pub ln: f64,
    /// `None` when `exp(ln)` overflows.
    pub value: Option<f64>,
}

impl LogReal {
    pub fn from_ln(ln: f64) -> Self {
        let value = (ln < LN_F64_MAX).then(|| ln.exp());
        LogReal { ln, value }
    }

    /// Uses `value` directly when it is finite; otherwise falls back to
    /// `ln`.
    pub fn new(value: f64, ln: f64) -> Self {
        if value.is_finite() && value > 0.0 {
            LogReal { ln, value: Some(value) }
        } else {
            LogReal::from_ln(ln)
        }
    }

    pub fn log10(&self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }

    /// Scientific notation with 12 significant digits, computed from the
    /// log so it works past the `f64` range.
    pub fn to_sci_string(&self) -> String {
        if let Some(v) = self.value {
            if v.is_normal() {
                return format!("{v:.12e}");
            }
        }
        let l10 = self.log10();
        let mut exp = l10.floor();
        let mut mant = 10f64.powf(l10 - exp);
        if mant >= 9.9999999999995 {
            mant /= 10.0;
            exp += 1.0;
        }
        format!("{mant:.12}e{}", exp as i64)
    }
}

/// Compares a big integer against a log-domain bound allowing `rel_tol`
/// relative slack for the rounding in the bound itself.
pub fn biguint_le(count: &BigUint, bound: &LogReal, rel_tol: f64) -> bool {
    if count.is_zero() {
        return true;
    }
    if let (Some(c), Some(b)) = (count.to_f64(), bound.value) {
        if c.is_finite() {
            return c <= b * (1.0 + rel_tol);
        }
    }
    ln_biguint(count) <= bound.ln + rel_tol
}


/// Serde helpers that write big integers as decimal strings.
pub mod decimal {
    use num_bigint::BigUint;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_str_radix(10))
    }

    pub mod vec {
        use num_bigint::BigUint;
        use serde::ser::SerializeSeq;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(xs: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&x.to_str_radix(10))?;
            }
            seq.end()
        }
    }

    pub mod signed {
        use num_bigint::BigInt;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&x.to_str_radix(10))
        }
    }
}
