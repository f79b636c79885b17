//! Counter-based sign derivation: every sign is a pure function of
//! `(seed, trial, rank)`, so trials can run in any order on any thread.

use crate::polyfield::{IrredId, IrredTable};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const TRIAL_MUL: u64 = 0xD1B5_4A32_D192_ED03;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key for one trial; combine with a rank through [`sign_bit`].
#[inline]
pub fn trial_key(seed: u64, trial: u64) -> u64 {
    mix64(mix64(seed.wrapping_add(GOLDEN)) ^ trial.wrapping_mul(TRIAL_MUL))
}

/// `true` means `f(P) = -1`.
#[inline]
pub fn sign_bit(trial_key: u64, rank: usize) -> bool {
    mix64(trial_key.wrapping_add((rank as u64 + 1).wrapping_mul(GOLDEN))) >> 63 == 1
}

/// One realization of `f` on every irreducible of degree `<= max_degree`,
/// packed one bit per global rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignAssignment {
    bits: Vec<u64>,
    len: usize,
}

impl SignAssignment {
    pub fn derive(seed: u64, trial: u64, table: &IrredTable, max_degree: usize) -> Self {
        let len = table.total_up_to(max_degree);
        let key = trial_key(seed, trial);
        let mut bits = vec![0u64; len.div_ceil(64)];
        for r in 0..len {
            if sign_bit(key, r) {
                bits[r / 64] |= 1 << (r % 64);
            }
        }
        SignAssignment { bits, len }
    }

    /// All signs `+1` (or all `-1`), for tests and special cases.
    pub fn constant(len: usize, negative: bool) -> Self {
        let fill = if negative { u64::MAX } else { 0 };
        let mut bits = vec![fill; len.div_ceil(64)];
        if negative && len % 64 != 0 {
            *bits.last_mut().unwrap() = (1u64 << (len % 64)) - 1;
        }
        SignAssignment { bits, len }
    }

    pub fn from_signs(signs: &[i8]) -> Self {
        let mut a = Self::constant(signs.len(), false);
        for (r, &s) in signs.iter().enumerate() {
            if s < 0 {
                a.bits[r / 64] |= 1 << (r % 64);
            }
        }
        a
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn is_negative(&self, rank: usize) -> bool {
        self.bits[rank / 64] >> (rank % 64) & 1 == 1
    }

    pub fn sign(&self, rank: usize) -> i8 {
        if self.is_negative(rank) {
            -1
        } else {
            1
        }
    }

    pub fn sign_of(&self, id: IrredId, table: &IrredTable) -> i8 {
        self.sign(table.rank(id))
    }

    pub fn negated(&self) -> Self {
        let mut out = Self::constant(self.len, true);
        for (o, b) in out.bits.iter_mut().zip(&self.bits) {
            *o ^= b;
        }
        out
    }

    pub fn hamming(&self, other: &SignAssignment) -> usize {
        self.bits.iter().zip(&other.bits).map(|(a, b)| (a ^ b).count_ones() as usize).sum()
    }
}

pub fn derive_signs(seed: u64, trial: u64, table: &IrredTable) -> SignAssignment {
    SignAssignment::derive(seed, trial, table, table.max_degree())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfield::FieldSpec;

    fn table() -> IrredTable {
        IrredTable::build(&FieldSpec::new(2, 1).unwrap(), 10).unwrap()
    }

    #[test]
    fn deterministic() {
        let t = table();
        assert_eq!(derive_signs(7, 3, &t), derive_signs(7, 3, &t));
        assert_ne!(derive_signs(7, 3, &t), derive_signs(8, 3, &t));
    }

    #[test]
    fn fixed_irreducible_is_balanced() {
        let t = table();
        let trials = 100_000u64;
        for rank in [0usize, 1, 57, 200] {
            let sum: i64 = (0..trials)
                .map(|tr| if sign_bit(trial_key(0xF1E1D5, tr), rank) { -1 } else { 1 })
                .sum();
            let mean = sum as f64 / trials as f64;
            assert!(mean.abs() <= 4.0 / (trials as f64).sqrt(), "rank {rank}: {mean}");
        }
        assert!(t.total_up_to(10) > 200);
    }

    #[test]
    fn neighbouring_trials_differ_in_half_the_positions() {
        let t = table();
        let len = t.total_up_to(10) as f64;
        let trials = 1000;
        let total: usize = (0..trials)
            .map(|tr| derive_signs(1, tr, &t).hamming(&derive_signs(1, tr + 1, &t)))
            .sum();
        let frac = total as f64 / (trials as f64 * len);
        assert!((0.45..=0.55).contains(&frac), "{frac}");
    }

    #[test]
    fn negation_and_constants() {
        let t = table();
        let a = derive_signs(5, 0, &t);
        let b = a.negated();
        assert_eq!(a.hamming(&b), a.len());
        let plus = SignAssignment::constant(70, false);
        let minus = SignAssignment::constant(70, true);
        assert_eq!(plus.hamming(&minus), 70);
        assert_eq!(SignAssignment::from_signs(&[1, -1, 1]).sign(1), -1);
    }
}
