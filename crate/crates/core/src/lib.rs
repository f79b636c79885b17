//! Exact and Monte Carlo experiments on sums of random Rademacher
//! multiplicative functions over `F_q[t]`, restricted to squarefree
//! polynomials with a fixed number of irreducible factors.

pub mod asymptotics;
pub mod bounds;
pub mod cli;
pub mod counting;
pub mod error;
pub mod montecarlo;
pub mod numeric;
pub mod oracle;
pub mod polyfield;

pub use error::{Error, Result};
