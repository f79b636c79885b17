use serde::{Deserialize, Serialize};

use super::irred::{IrredId, IrredTable};
use super::poly::MonicPoly;
use crate::error::{Error, Result};

/// A squarefree monic polynomial given by its distinct irreducible factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FactorSet {
    factors: Vec<IrredId>,
    deg: usize,
    pmax: usize,
}

impl FactorSet {
    /// Returns `None` unless the ids are strictly increasing.
    pub fn new(factors: Vec<IrredId>) -> Option<Self> {
        if factors.windows(2).any(|w| w[0] >= w[1]) {
            return None;
        }
        Some(Self::from_sorted(factors))
    }

    pub(crate) fn from_sorted(factors: Vec<IrredId>) -> Self {
        let deg = factors.iter().map(|f| f.degree as usize).sum();
        let pmax = factors.last().map_or(0, |f| f.degree as usize);
        FactorSet { factors, deg, pmax }
    }

    pub fn one() -> Self {
        Self::from_sorted(Vec::new())
    }

    pub fn factors(&self) -> &[IrredId] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    /// omega: number of distinct irreducible factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Largest factor degree (`P^+`); 0 for the unit.
    pub fn pmax(&self) -> usize {
        self.pmax
    }

    pub fn divides(&self, other: &FactorSet) -> bool {
        let mut it = other.factors.iter();
        self.factors.iter().all(|f| it.any(|g| g == f))
    }

    /// Multiplies out the factors.
    pub fn product(&self, table: &IrredTable) -> MonicPoly {
        self.factors
            .iter()
            .fold(MonicPoly::one(), |acc, &id| acc.mul(table.poly(id), table.field()))
    }

    /// All sub-products with exactly `omega` factors of total degree
    /// `degree`, in lexicographic order of the chosen positions.
    pub fn divisors_with(&self, omega: usize, degree: usize) -> Vec<FactorSet> {
        let mut out = Vec::new();
        let mut picked = Vec::with_capacity(omega);
        fn rec(
            fs: &[IrredId],
            start: usize,
            omega: usize,
            degree: usize,
            picked: &mut Vec<IrredId>,
            out: &mut Vec<FactorSet>,
        ) {
            if picked.len() == omega {
                if degree == 0 {
                    out.push(FactorSet::from_sorted(picked.clone()));
                }
                return;
            }
            for i in start..fs.len() {
                let d = fs[i].degree as usize;
                if d > degree {
                    continue;
                }
                picked.push(fs[i]);
                rec(fs, i + 1, omega, degree - d, picked, out);
                picked.pop();
            }
        }
        rec(&self.factors, 0, omega, degree, &mut picked, &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factorization {
    Squarefree(FactorSet),
    NotSquarefree,
}

/// Factors `f` by trial division against `table`, stopping early if a
/// repeated factor is found.
pub fn factor_squarefree(f: &MonicPoly, table: &IrredTable) -> Result<Factorization> {
    if f.degree() > table.max_degree() {
        return Err(Error::InsufficientDepth {
            needed: f.degree(),
            available: table.max_degree(),
        });
    }
    let field = table.field();
    let mut rest = f.clone();
    let mut factors = Vec::new();
    let mut d = 1;
    while !rest.is_one() {
        if 2 * d > rest.degree() {
            // no factor of degree <= deg/2 remains, so rest is irreducible
            let id = table.id_of(&rest).expect("table is complete up to max_degree");
            if factors.last() == Some(&id) {
                return Ok(Factorization::NotSquarefree);
            }
            factors.push(id);
            break;
        }
        for id in table.ids(d) {
            let p = table.poly(id);
            if rest.divisible_by(p, field) {
                rest = rest.div_exact(p, field);
                if rest.divisible_by(p, field) {
                    return Ok(Factorization::NotSquarefree);
                }
                factors.push(id);
            }
        }
        d += 1;
    }
    factors.sort();
    Ok(Factorization::Squarefree(FactorSet::from_sorted(factors)))
}
