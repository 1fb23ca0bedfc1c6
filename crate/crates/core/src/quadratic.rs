//! Dickson normal form of quadratics: `Q = L1 L2 + ... + L_{r-1} L_r + tail + c`.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::matrix::reduce;
use crate::gf2::{LinearBasis, PolyF2};
use crate::rational::{self, Rational};
use crate::subspace::Subspace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DicksonForm {
    m: u32,
    /// Affine forms whose linear parts are independent.
    pub pairs: Vec<(PolyF2, PolyF2)>,
    /// Homogeneous linear form independent of the pair forms.
    pub tail: Option<PolyF2>,
    pub c: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DicksonJson {
    pub r: usize,
    pub pairs: Vec<[String; 2]>,
    pub tail: Option<String>,
    pub c: u8,
    pub rank1: usize,
    pub bias: String,
}

impl DicksonForm {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn r(&self) -> usize {
        2 * self.pairs.len()
    }

    pub fn rank1(&self) -> usize {
        self.r() + usize::from(self.tail.is_some())
    }

    /// `0` with a tail, else `(-1)^c 2^{-r/2}`.
    pub fn bias(&self) -> Rational {
        if self.tail.is_some() {
            return rational::zero();
        }
        let sign = if self.c { -1 } else { 1 };
        rational::dyadic(BigInt::from(sign), self.pairs.len() as u64)
    }

    /// Linear parts of `L_1, ..., L_r` followed by the tail, as masks.
    pub fn linear_masks(&self) -> Vec<u64> {
        self.pairs
            .iter()
            .flat_map(|(a, b)| [a.linear_mask(), b.linear_mask()])
            .chain(self.tail.iter().map(|t| t.linear_mask()))
            .collect()
    }

    /// Linear parts as polynomials, same order as [`Self::linear_masks`].
    pub fn linear_forms(&self) -> Vec<PolyF2> {
        self.linear_masks()
            .into_iter()
            .map(|mask| PolyF2::affine(self.m, mask, false))
            .collect()
    }

    pub fn reconstruct(&self) -> PolyF2 {
        let mut acc = PolyF2::constant(self.m, self.c);
        for (a, b) in &self.pairs {
            acc = acc.add(&a.mul(b));
        }
        if let Some(t) = &self.tail {
            acc = acc.add(t);
        }
        acc
    }

    pub fn to_json(&self) -> DicksonJson {
        DicksonJson {
            r: self.r(),
            pairs: self.pairs.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
            tail: self.tail.as_ref().map(|t| t.to_string()),
            c: u8::from(self.c),
            rank1: self.rank1(),
            bias: rational::format(&self.bias()),
        }
    }
}

fn check_degree(q: &PolyF2) -> Result<()> {
    if q.degree() > 2 {
        return Err(Error::DegreeTooHigh {
            degree: q.degree(),
            max: 2,
        });
    }
    Ok(())
}

/// Peels symplectic pairs at the lexicographically smallest `x_i x_j`, then
/// absorbs a dependent linear remainder by completing squares.
pub fn dickson_decompose(q: &PolyF2) -> Result<DicksonForm> {
    check_degree(q)?;
    let m = q.m();
    let mut rest = q.clone();
    let mut pairs = Vec::new();
    while let Some(pivot) = rest
        .masks()
        .iter()
        .copied()
        .filter(|w| w.count_ones() == 2)
        .min_by_key(|w| (w.trailing_zeros(), 63 - w.leading_zeros()))
    {
        let bi = pivot & pivot.wrapping_neg();
        let bj = pivot ^ bi;
        // rest = x_i x_j + x_i A + x_j B + R with A, B free of x_i, x_j.
        let (mut a_mask, mut a_c, mut b_mask, mut b_c) = (0u64, false, 0u64, false);
        for &w in rest.masks() {
            if w == pivot {
                continue;
            }
            if w & bi != 0 {
                match w ^ bi {
                    0 => a_c = true,
                    o => a_mask |= o,
                }
            } else if w & bj != 0 {
                match w ^ bj {
                    0 => b_c = true,
                    o => b_mask |= o,
                }
            }
        }
        let l = PolyF2::affine(m, bi | b_mask, b_c);
        let l2 = PolyF2::affine(m, bj | a_mask, a_c);
        rest = rest.add(&l.mul(&l2));
        debug_assert!(rest.support() & pivot == 0);
        pairs.push((l, l2));
    }
    debug_assert!(rest.is_affine());

    let mut c = rest.constant_term();
    let lin = rest.linear_mask();
    let mut basis = LinearBasis::new();
    for (a, b) in &pairs {
        basis.insert(a.linear_mask());
        basis.insert(b.linear_mask());
    }
    let tail = match basis.express(lin) {
        None => Some(PolyF2::affine(m, lin, false)),
        Some(combo) => {
            // lin = Σ α_k h_k; with L_k = h_k + c_k this is Σ α_k L_k + Σ α_k c_k,
            // and L1 L2 + α L1 + β L2 = (L1 + β)(L2 + α) + αβ.
            for (k, (a, b)) in pairs.iter_mut().enumerate() {
                let alpha = combo >> (2 * k) & 1 == 1;
                let beta = combo >> (2 * k + 1) & 1 == 1;
                c ^= (alpha && a.constant_term()) ^ (beta && b.constant_term());
                c ^= alpha && beta;
                *a = a.add_constant(beta);
                *b = b.add_constant(alpha);
            }
            None
        }
    };
    let form = DicksonForm { m, pairs, tail, c };
    debug_assert_eq!(form.reconstruct(), *q);
    Ok(form)
}

/// `rank_1` read off the alternating bilinear form `B`: its rank, plus one
/// when `q` is not constant on `ker B` (there `v -> q(v) + q(0)` is linear).
/// The linear part alone does not decide this, since `x_i^2 = x_i` moves
/// terms between degrees. Agrees with the Dickson count.
pub fn rank1_bilinear(q: &PolyF2) -> Result<usize> {
    check_degree(q)?;
    let mut rows = vec![0u64; q.m() as usize];
    for &w in q.masks().iter().filter(|w| w.count_ones() == 2) {
        let (i, j) = (w.trailing_zeros(), 63 - w.leading_zeros());
        rows[i as usize] ^= 1u64 << j;
        rows[j as usize] ^= 1u64 << i;
    }
    let (basis, _) = reduce(rows);
    let kernel = Subspace::span(q.m(), basis.iter().copied())?.annihilator();
    let c = q.constant_term();
    let escapes = kernel.basis().iter().any(|&v| q.eval_mask(v) != c);
    Ok(basis.len() + usize::from(escapes))
}

pub fn rank1_quadratic(q: &PolyF2) -> Result<usize> {
    Ok(dickson_decompose(q)?.rank1())
}

pub fn bias_quadratic(q: &PolyF2) -> Result<Rational> {
    Ok(dickson_decompose(q)?.bias())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn p(s: &str) -> PolyF2 {
        PolyF2::parse(s, None).unwrap()
    }

    fn pm(s: &str, m: u32) -> PolyF2 {
        PolyF2::parse(s, Some(m)).unwrap()
    }

    #[test]
    fn examples() {
        let d = dickson_decompose(&p("x1*x2")).unwrap();
        assert_eq!((d.r(), d.tail.is_none(), d.c), (2, true, false));
        assert_eq!(d.pairs, vec![(pm("x1", 2), pm("x2", 2))]);

        let d = dickson_decompose(&p("x1*x2 + x3")).unwrap();
        assert_eq!(d.tail, Some(pm("x3", 3)));
        assert_eq!(d.bias(), ratio(0, 1));
        assert_eq!(d.rank1(), 3);

        let q = p("x1*x2 + x1 + x2");
        let d = dickson_decompose(&q).unwrap();
        assert_eq!(d.pairs, vec![(pm("x1 + 1", 2), pm("x2 + 1", 2))]);
        assert!(d.c && d.tail.is_none());
        assert_eq!(d.reconstruct(), q);
    }

    #[test]
    fn rank_and_bias() {
        assert_eq!(rank1_quadratic(&p("x1*x2")).unwrap(), 2);
        assert_eq!(rank1_quadratic(&p("x1*x2 + x3*x4")).unwrap(), 4);
        assert_eq!(rank1_bilinear(&p("x1*x2 + x3*x4")).unwrap(), 4);
        assert_eq!(rank1_bilinear(&p("x1*x2 + x3")).unwrap(), 3);
        assert_eq!(rank1_bilinear(&p("x1*x2 + x1 + x2")).unwrap(), 2);
        assert_eq!(rank1_bilinear(&PolyF2::one(3)).unwrap(), 0);
        assert_eq!(bias_quadratic(&p("x1*x2")).unwrap(), ratio(1, 2));
        assert_eq!(bias_quadratic(&p("x1*x2 + 1")).unwrap(), ratio(-1, 2));
    }

    #[test]
    fn rejects_cubic() {
        assert!(matches!(
            dickson_decompose(&p("x1*x2*x3")),
            Err(Error::DegreeTooHigh { degree: 3, max: 2 })
        ));
    }

    #[test]
    fn absorbs_dependent_linear_part() {
        let q = p("x1*x2 + x2*x3 + x1 + x3 + x4*x5 + x5 + 1");
        let d = dickson_decompose(&q).unwrap();
        assert_eq!(d.reconstruct(), q);
        assert!(d.tail.is_none());
        let mut basis = LinearBasis::new();
        assert!(d.linear_masks().into_iter().all(|v| basis.insert(v).is_some()));
    }
}
