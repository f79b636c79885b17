//! Finite fields of small order.
//!
//! Elements are coded as integers in `[0, q)`. For prime fields the code is
//! the residue itself; for `F_{p^m}` it is the base-`p` number whose digits
//! are the coefficients of the element written as a polynomial in the
//! generator (lowest degree first).

use crate::error::{Error, Result};

/// Largest prime accepted for a prime field. Products of two residues must
/// fit in a `u64`.
pub const MAX_PRIME: u64 = 1 << 31;

/// Fixed defining polynomials for the supported extension fields, as
/// coefficient lists of `x^m + c_{m-1} x^{m-1} + ... + c_0`, lowest first,
/// leading one omitted.
const DEFINING_POLYS: &[(u64, u32, &[u32])] = &[
    (2, 2, &[1, 1]),    // x^2 + x + 1
    (2, 3, &[1, 1, 0]), // x^3 + x + 1
    (3, 2, &[1, 0]),    // x^2 + 1
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    p: u32,
    m: u32,
    q: u32,
    defining: Option<Vec<u32>>,
    // Only populated for extension fields; q <= 9 keeps them tiny.
    add_table: Vec<u32>,
    mul_table: Vec<u32>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, m)` with `q = p^m`, or `None` if `q` is not a prime
/// power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        // q itself is prime
        return Some((q, 1));
    }
    let mut rest = q;
    let mut m = 0;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

impl FieldSpec {
    /// Builds `F_{p^m}`. Prime fields are supported for every prime below
    /// [`MAX_PRIME`]; extension fields only for q in {4, 8, 9}.
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::InvalidArgument("extension degree m must be >= 1".into()));
        }
        if m == 1 {
            if p >= MAX_PRIME {
                return Err(Error::FieldUnsupported { p, m });
            }
            return Ok(FieldSpec {
                p: p as u32,
                m: 1,
                q: p as u32,
                defining: None,
                add_table: Vec::new(),
                mul_table: Vec::new(),
            });
        }
        let defining = DEFINING_POLYS
            .iter()
            .find(|(pp, mm, _)| *pp == p && *mm == m)
            .map(|(_, _, c)| c.to_vec())
            .ok_or(Error::FieldUnsupported { p, m })?;
        let p = p as u32;
        let q = p.pow(m);
        let mut field = FieldSpec {
            p,
            m,
            q,
            defining: Some(defining),
            add_table: Vec::new(),
            mul_table: Vec::new(),
        };
        field.build_tables();
        Ok(field)
    }

    /// Builds the field of order `q`, which must be a supported prime power.
    pub fn with_order(q: u64) -> Result<Self> {
        let (p, m) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, m)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Defining polynomial coefficients (lowest first, leading one omitted)
    /// for extension fields.
    pub fn defining_poly(&self) -> Option<&[u32]> {
        self.defining.as_deref()
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut out = vec![0; self.m as usize];
        for slot in out.iter_mut() {
            *slot = a % self.p;
            a /= self.p;
        }
        out
    }

    fn undigits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let p = self.p;
        let m = self.m as usize;
        let defining = self.defining.clone().expect("extension field");
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            let da = self.digits(a as u32);
            for b in 0..q {
                let db = self.digits(b as u32);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = self.undigits(&sum);

                let mut prod = vec![0u32; 2 * m - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                // reduce x^i for i >= m using x^m = -(c_{m-1} x^{m-1} + ... + c_0)
                for i in (m..prod.len()).rev() {
                    let c = prod[i];
                    if c == 0 {
                        continue;
                    }
                    prod[i] = 0;
                    for (j, &dj) in defining.iter().enumerate() {
                        let sub = (c * dj) % p;
                        prod[i - m + j] = (prod[i - m + j] + p - sub) % p;
                    }
                }
                mul[a * q + b] = self.undigits(&prod[..m]);
            }
        }
        self.add_table = add;
        self.mul_table = mul;
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.m == 1 {
            ((a as u64 + b as u64) % self.p as u64) as u32
        } else {
            self.add_table[(a * self.q + b) as usize]
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if self.m == 1 {
            ((a as u64 * b as u64) % self.p as u64) as u32
        } else {
            self.mul_table[(a * self.q + b) as usize]
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.m == 1 {
            if a == 0 {
                0
            } else {
                self.p - a
            }
        } else {
            let d: Vec<u32> = self.digits(a).iter().map(|&x| (self.p - x) % self.p).collect();
            self.undigits(&d)
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_axioms(f: &FieldSpec) {
        let q = f.q();
        for a in 0..q {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!((0..q).filter(|&b| f.mul(a, b) == 1).count(), 1, "inverse of {a}");
            }
            for b in 0..q {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..q {
                    assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn prime_fields() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        assert_eq!(f2.q(), 2);
        check_axioms(&f2);
        let f3 = FieldSpec::new(3, 1).unwrap();
        assert_eq!(f3.mul(2, 2), 1);
        check_axioms(&f3);
        check_axioms(&FieldSpec::new(7, 1).unwrap());
    }

    #[test]
    fn f4_generator_times_successor_is_one() {
        let f4 = FieldSpec::new(2, 2).unwrap();
        // x has code 2, x + 1 has code 3
        assert_eq!(f4.mul(2, 3), 1);
        check_axioms(&f4);
    }

    #[test]
    fn f8_and_f9_are_fields() {
        check_axioms(&FieldSpec::new(2, 3).unwrap());
        check_axioms(&FieldSpec::new(3, 2).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(FieldSpec::new(4, 1), Err(Error::NotPrime(4))));
        assert!(matches!(FieldSpec::new(5, 2), Err(Error::FieldUnsupported { .. })));
        assert!(matches!(FieldSpec::with_order(6), Err(Error::NotPrimePower(6))));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(13), Some((13, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
