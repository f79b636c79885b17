//! Arithmetic in `F_q[t]`, the irreducible sieve and enumeration of
//! squarefree polynomials by number of irreducible factors.

pub mod cache;
mod enumerate;
mod factor;
mod field;
mod irred;
mod poly;

pub use enumerate::{degree_multisets, enumerate_pkdn, enumerate_pkn};
pub use factor::{factor_squarefree, FactorSet, Factorization};
pub use field::{is_prime, prime_power, FieldSpec, MAX_PRIME};
pub use irred::{is_irreducible_brute, IrredId, IrredTable, DEFAULT_ENUMERATION_BUDGET};
pub use poly::MonicPoly;
