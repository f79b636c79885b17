use std::cmp::Ordering;
use std::fmt;

use super::field::FieldSpec;

/// A monic polynomial over `F_q`, stored as its non-leading coefficients in
/// base-`q` little-endian order. `coeffs.len()` is the degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonicPoly {
    coeffs: Vec<u32>,
}

impl MonicPoly {
    pub fn one() -> Self {
        MonicPoly { coeffs: Vec::new() }
    }

    /// `coeffs` are `c_0..c_{d-1}` of `t^d + c_{d-1} t^{d-1} + ... + c_0`.
    pub fn from_coeffs(coeffs: Vec<u32>) -> Self {
        MonicPoly { coeffs }
    }

    /// Decodes the `index`-th monic polynomial of degree `degree` in
    /// encoding order, i.e. the coefficients are the base-`q` digits of
    /// `index`.
    pub fn from_index(q: u32, degree: usize, mut index: u64) -> Self {
        let mut coeffs = vec![0; degree];
        for c in coeffs.iter_mut() {
            *c = (index % q as u64) as u32;
            index /= q as u64;
        }
        MonicPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// All coefficients including the leading one.
    pub fn full_coeffs(&self) -> Vec<u32> {
        let mut v = self.coeffs.clone();
        v.push(1);
        v
    }

    /// Packs a polynomial over F_2 of degree < 64 into a bit mask (bit i is
    /// the coefficient of t^i, leading bit included).
    pub(crate) fn to_bits(&self) -> Option<u64> {
        if self.degree() >= 64 || self.coeffs.iter().any(|&c| c > 1) {
            return None;
        }
        let mut bits = 1u64 << self.degree();
        for (i, &c) in self.coeffs.iter().enumerate() {
            bits |= (c as u64) << i;
        }
        Some(bits)
    }

    pub(crate) fn from_bits(bits: u64) -> Self {
        let degree = 63 - bits.leading_zeros() as usize;
        MonicPoly {
            coeffs: (0..degree).map(|i| ((bits >> i) & 1) as u32).collect(),
        }
    }

    pub fn mul(&self, other: &MonicPoly, field: &FieldSpec) -> MonicPoly {
        if field.q() == 2 && self.degree() + other.degree() < 64 {
            let a = self.to_bits().expect("F_2 coefficients");
            let b = other.to_bits().expect("F_2 coefficients");
            return MonicPoly::from_bits(clmul(a, b));
        }
        let a = self.full_coeffs();
        let b = other.full_coeffs();
        let mut prod = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = field.add(prod[i + j], field.mul(x, y));
            }
        }
        prod.pop();
        MonicPoly { coeffs: prod }
    }

    /// Remainder of `self` modulo the monic `divisor`, as a full coefficient
    /// vector of length `divisor.degree()`.
    pub fn rem(&self, divisor: &MonicPoly, field: &FieldSpec) -> Vec<u32> {
        let db = divisor.degree();
        let mut r = self.full_coeffs();
        if r.len() <= db {
            r.resize(db, 0);
            return r;
        }
        let b = &divisor.coeffs;
        for i in (db..r.len()).rev() {
            let c = r[i];
            if c == 0 {
                continue;
            }
            r[i] = 0;
            for (j, &bj) in b.iter().enumerate() {
                r[i - db + j] = field.sub(r[i - db + j], field.mul(c, bj));
            }
        }
        r.truncate(db);
        r
    }

    pub fn divisible_by(&self, divisor: &MonicPoly, field: &FieldSpec) -> bool {
        if divisor.degree() > self.degree() {
            return divisor.degree() == 0;
        }
        if field.q() == 2 && self.degree() < 64 {
            let a = self.to_bits().expect("F_2 coefficients");
            let b = divisor.to_bits().expect("F_2 coefficients");
            return rem_bits(a, b) == 0;
        }
        self.rem(divisor, field).iter().all(|&c| c == 0)
    }

    /// Exact quotient `self / divisor`; the caller guarantees divisibility.
    pub fn div_exact(&self, divisor: &MonicPoly, field: &FieldSpec) -> MonicPoly {
        let db = divisor.degree();
        let da = self.degree();
        assert!(db <= da, "divisor degree exceeds dividend degree");
        let mut r = self.full_coeffs();
        let mut quot = vec![0u32; da - db + 1];
        for i in (db..=da).rev() {
            let c = r[i];
            quot[i - db] = c;
            if c == 0 {
                continue;
            }
            r[i] = 0;
            for (j, &bj) in divisor.coeffs.iter().enumerate() {
                r[i - db + j] = field.sub(r[i - db + j], field.mul(c, bj));
            }
        }
        debug_assert!(r.iter().all(|&c| c == 0), "division was not exact");
        quot.pop();
        MonicPoly { coeffs: quot }
    }
}

impl Ord for MonicPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for MonicPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut terms = Vec::new();
        for i in (0..=d).rev() {
            let c = if i == d { 1 } else { self.coeffs[i] };
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 { String::new() } else { format!("{c}") };
            let var = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            terms.push(format!("{coef}{var}"));
        }
        write!(f, "{}", terms.join("+"))
    }
}

/// Carry-less product of two F_2 polynomials packed as bit masks.
fn clmul(a: u64, b: u64) -> u64 {
    let mut out = 0u64;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            out ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    out
}

pub(crate) fn rem_bits(mut a: u64, b: u64) -> u64 {
    let db = 63 - b.leading_zeros();
    while a != 0 {
        let da = 63 - a.leading_zeros();
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[u32]) -> MonicPoly {
        MonicPoly::from_coeffs(c.to_vec())
    }

    /// Schoolbook convolution over Z reduced mod a prime, independent of
    /// the field tables.
    fn convolve_mod(a: &[u32], b: &[u32], prime: u32) -> Vec<u32> {
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % prime;
            }
        }
        out
    }

    #[test]
    fn small_products_over_f2() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        // (t+1)^2 = t^2 + 1
        assert_eq!(p(&[1]).mul(&p(&[1]), &f2), p(&[1, 0]));
        // t (t+1) = t^2 + t
        assert_eq!(p(&[0]).mul(&p(&[1]), &f2), p(&[0, 1]));
    }

    #[test]
    fn product_over_f3_matches_convolution() {
        let f3 = FieldSpec::new(3, 1).unwrap();
        let prod = p(&[1]).mul(&p(&[2]), &f3);
        assert_eq!(prod, p(&[2, 0]));
        assert_eq!(prod.full_coeffs(), convolve_mod(&[1, 1], &[2, 1], 3));
    }

    #[test]
    fn f2_fast_path_agrees_with_generic() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        for a in 0..64u64 {
            for b in 0..32u64 {
                let pa = MonicPoly::from_index(2, 6, a);
                let pb = MonicPoly::from_index(2, 5, b);
                let fast = pa.mul(&pb, &f2);
                let slow = convolve_mod(&pa.full_coeffs(), &pb.full_coeffs(), 2);
                assert_eq!(fast.full_coeffs(), slow);
                assert!(fast.divisible_by(&pb, &f2));
                assert_eq!(fast.div_exact(&pb, &f2), pa);
            }
        }
    }

    #[test]
    fn division_over_f4() {
        let f4 = FieldSpec::new(2, 2).unwrap();
        let a = p(&[3, 2]);
        let b = p(&[1, 0, 2]);
        let ab = a.mul(&b, &f4);
        assert_eq!(ab.degree(), 5);
        assert!(ab.divisible_by(&a, &f4));
        assert_eq!(ab.div_exact(&a, &f4), b);
        assert_eq!(ab.div_exact(&b, &f4), a);
    }

    #[test]
    fn ordering_is_by_degree_then_encoding() {
        let mut v = vec![p(&[1, 1]), p(&[0]), p(&[0, 1]), p(&[1, 0]), p(&[1])];
        v.sort();
        assert_eq!(v, vec![p(&[0]), p(&[1]), p(&[1, 0]), p(&[0, 1]), p(&[1, 1])]);
        assert_eq!(p(&[1, 0, 1]).to_string(), "t^3+t^2+1");
    }
}
