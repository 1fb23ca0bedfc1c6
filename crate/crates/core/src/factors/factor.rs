use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::gf2::{common_vars, PolyF2};

/// Ordered tuple of nonconstant polynomials of degree at most `d` over a
/// shared variable count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factor {
    m: u32,
    d: u32,
    polys: Vec<PolyF2>,
}

impl Factor {
    pub fn new(polys: Vec<PolyF2>, d: u32) -> Result<Factor> {
        if d == 0 {
            return Err(Error::invalid("factor degree bound must be at least 1"));
        }
        for (i, p) in polys.iter().enumerate() {
            if p.is_constant() {
                return Err(Error::invalid(format!("member {} is constant", i + 1)));
            }
            if p.degree() > d {
                return Err(Error::DegreeTooHigh {
                    degree: p.degree(),
                    max: d,
                });
            }
        }
        let (m, polys) = common_vars(&polys);
        Ok(Factor { m, d, polys })
    }

    /// Degree bound taken from the members (at least 1).
    pub fn from_polys(polys: Vec<PolyF2>) -> Result<Factor> {
        let d = polys.iter().map(|p| p.degree()).max().unwrap_or(1).max(1);
        Factor::new(polys, d)
    }

    /// Empty factor over `m` variables.
    pub fn empty(m: u32, d: u32) -> Factor {
        Factor {
            m,
            d: d.max(1),
            polys: Vec::new(),
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn members(&self) -> &[PolyF2] {
        &self.polys
    }

    pub fn dim(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// `(M_1, ..., M_d)`: counts of members of each exact degree.
    pub fn dim_vector(&self) -> Vec<u64> {
        dim_vector_of(&self.polys, self.d)
    }

    /// Same factor over `m >= self.m` variables.
    pub fn widen(&self, m: u32) -> Result<Factor> {
        let polys = self.polys.iter().map(|p| p.with_vars(m)).collect::<Result<Vec<_>>>()?;
        Ok(Factor { m, d: self.d, polys })
    }

    /// Sum of the members selected by the bits of `lambda`.
    pub fn combination(&self, lambda: u64) -> PolyF2 {
        self.polys
            .iter()
            .enumerate()
            .filter(|(i, _)| lambda >> i & 1 == 1)
            .fold(PolyF2::zero(self.m), |acc, (_, p)| acc.add(p))
    }

    /// `max deg(λ_i P_i)`.
    pub fn combination_degree(&self, lambda: u64) -> u32 {
        self.polys
            .iter()
            .enumerate()
            .filter(|(i, _)| lambda >> i & 1 == 1)
            .map(|(_, p)| p.degree())
            .max()
            .unwrap_or(0)
    }
}

pub(crate) fn dim_vector_of(polys: &[PolyF2], d: u32) -> Vec<u64> {
    let mut v = vec![0u64; d as usize];
    for p in polys {
        let deg = p.degree() as usize;
        if (1..=d as usize).contains(&deg) {
            v[deg - 1] += 1;
        }
    }
    v
}

/// Inverse lexicographic order: decided at the largest differing index.
pub fn invlex_compare(u: &[u64], v: &[u64]) -> Result<Ordering> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    Ok(u.iter()
        .zip(v)
        .rev()
        .map(|(a, b)| a.cmp(b))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal))
}
