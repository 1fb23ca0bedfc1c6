//! Signed bias, Walsh spectra and the dependency space of a polynomial.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::dist::joint_distribution;
use crate::error::{Error, Result};
use crate::gf2::{common_vars, truth_table, PolyF2, TruthTable};
use crate::limits;
use crate::rational::{self, Rational};
use crate::subspace::{bitstring, Subspace};

/// `(#zeros - #ones) / 2^m`.
pub fn signed_bias(p: &PolyF2) -> Result<Rational> {
    let t = truth_table(p)?;
    Ok(bias_of_table(&t))
}

pub(crate) fn bias_of_table(t: &TruthTable) -> Rational {
    let total = t.len() as i128;
    let w = t.weight() as i128;
    rational::dyadic(BigInt::from(total - 2 * w), t.m() as u64)
}

/// `Pr_x[P(x) = 1]`.
pub fn pr_one(p: &PolyF2) -> Result<Rational> {
    let t = truth_table(p)?;
    Ok(rational::dyadic(t.weight(), t.m() as u64))
}

/// Sparse Walsh spectrum; absent masks have coefficient zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalshSpectrum {
    m: u32,
    coeffs: BTreeMap<u64, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumEntry {
    pub mask: String,
    pub value: String,
}

impl WalshSpectrum {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn coeff(&self, mask: u64) -> Rational {
        self.coeffs.get(&mask).cloned().unwrap_or_else(rational::zero)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.coeffs.iter().map(|(&k, v)| (k, v))
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn parseval_sum(&self) -> Rational {
        self.coeffs.values().map(|c| c * c).sum()
    }

    pub fn to_entries(&self) -> Vec<SpectrumEntry> {
        self.coeffs
            .iter()
            .map(|(&mask, v)| SpectrumEntry {
                mask: bitstring(mask, self.m),
                value: rational::format(v),
            })
            .collect()
    }
}

/// Unnormalised Walsh transform of `(-1)^t`: entry `γ` is
/// `Σ_x (-1)^{t(x) + <γ,x>}`.
pub(crate) fn walsh_counts(t: &TruthTable) -> Vec<i32> {
    let n = t.len() as usize;
    let mut v: Vec<i32> = (0..n as u64).map(|x| if t.get(x) { -1 } else { 1 }).collect();
    butterfly(&mut v);
    v
}

pub(crate) fn butterfly(v: &mut [i32]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        let step = |chunk: &mut [i32]| {
            let (a, b) = chunk.split_at_mut(h);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        };
        if n >= 1 << 16 {
            v.par_chunks_mut(2 * h).for_each(step);
        } else {
            v.chunks_mut(2 * h).for_each(step);
        }
        h *= 2;
    }
}

pub fn walsh_spectrum(p: &PolyF2) -> Result<WalshSpectrum> {
    let t = truth_table(p)?;
    let counts = walsh_counts(&t);
    let m = p.m();
    let coeffs = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(g, &c)| (g as u64, rational::dyadic(c, m as u64)))
        .collect();
    Ok(WalshSpectrum { m, coeffs })
}

/// Span of the characters with nonzero correlation with `p`.
pub fn dependency_space(p: &PolyF2) -> Result<Subspace> {
    let t = truth_table(p)?;
    let counts = walsh_counts(&t);
    let masks = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(g, _)| g as u64);
    // A constant polynomial only correlates with the trivial character.
    Subspace::span(p.m(), masks)
}

/// Largest `|signed_bias(Σ λ_i P_i)|` over nonzero `λ`, with the first
/// maximising `λ` in counting order (bit `i` of `λ` selects `P_{i+1}`).
pub fn max_nonzero_bias_witness(polys: &[PolyF2]) -> Result<(Rational, u64)> {
    if polys.is_empty() {
        return Err(Error::invalid("empty tuple has no nonzero combination"));
    }
    limits::check_combos(polys.len())?;
    let (m, polys) = common_vars(polys);
    limits::check_vars(m)?;
    let tables = polys.iter().map(truth_table).collect::<Result<Vec<_>>>()?;
    let k = tables.len();
    let total = 1u64 << m;

    // Split the combination space into blocks walked in Gray-code order; each
    // block keeps its own running XOR table.
    let combos = 1u64 << k;
    let block_bits = k.min(6) as u32;
    let blocks = combos >> block_bits;
    let best = (0..blocks)
        .into_par_iter()
        .map(|hi| {
            let base = hi << block_bits;
            let mut acc = TruthTable::zeros(m).expect("checked");
            for (i, t) in tables.iter().enumerate() {
                if base >> i & 1 == 1 {
                    acc.xor_assign(t);
                }
            }
            let mut best: Option<(u64, u64)> = None;
            let mut gray = 0u64;
            for step in 0..(1u64 << block_bits) {
                if step > 0 {
                    let bit = step.trailing_zeros();
                    gray ^= 1 << bit;
                    acc.xor_assign(&tables[bit as usize]);
                }
                let lambda = base | gray;
                if lambda == 0 {
                    continue;
                }
                let w = acc.weight();
                let dev = (total as i128 - 2 * w as i128).unsigned_abs() as u64;
                best = match best {
                    Some((d, l)) if d > dev || (d == dev && l < lambda) => Some((d, l)),
                    _ => Some((dev, lambda)),
                };
            }
            best
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) | (x, None) => x,
                (Some((da, la)), Some((db, lb))) => {
                    if da > db || (da == db && la < lb) {
                        Some((da, la))
                    } else {
                        Some((db, lb))
                    }
                }
            },
        )
        .expect("at least one nonzero combination");
    Ok((rational::dyadic(best.0, m as u64), best.1))
}

pub fn max_nonzero_bias(polys: &[PolyF2]) -> Result<Rational> {
    Ok(max_nonzero_bias_witness(polys)?.0)
}

/// Exact data for `tv <= 2^{n/2} ε`. The bound is compared through squares
/// since `2^{n/2}` is irrational for odd `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VaziraniReport {
    pub n: usize,
    pub tv_from_uniform: Rational,
    pub epsilon: Rational,
    /// `2^n ε^2`.
    pub bound_squared: Rational,
    /// `2^{n/2} ε` when `n` is even.
    pub bound: Option<Rational>,
    pub holds: bool,
}

impl VaziraniReport {
    pub fn bound_f64(&self) -> f64 {
        rational::to_f64(&self.bound_squared).sqrt()
    }
}

pub fn vazirani_check(polys: &[PolyF2]) -> Result<VaziraniReport> {
    let n = polys.len();
    if n > 16 {
        return Err(Error::CapExceeded {
            what: "tuple length n",
            value: n as u64,
            cap: 16,
        });
    }
    let tv = joint_distribution(polys)?.tv_to_uniform();
    let epsilon = max_nonzero_bias(polys)?;
    let bound_squared = Rational::from_integer(rational::pow2(n as u64)) * &epsilon * &epsilon;
    let bound = n
        .is_multiple_of(2)
        .then(|| Rational::from_integer(rational::pow2(n as u64 / 2)) * &epsilon);
    let holds = &tv * &tv <= bound_squared;
    debug_assert!(!tv.is_negative());
    Ok(VaziraniReport {
        n,
        tv_from_uniform: tv,
        epsilon,
        bound_squared,
        bound,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn p(s: &str) -> PolyF2 {
        PolyF2::parse(s, None).unwrap()
    }

    #[test]
    fn bias_examples() {
        assert_eq!(signed_bias(&p("x1")).unwrap(), ratio(0, 1));
        assert_eq!(signed_bias(&p("x1*x2")).unwrap(), ratio(1, 2));
        assert_eq!(signed_bias(&p("x1*x2+x3*x4")).unwrap(), ratio(1, 4));
    }

    #[test]
    fn pr_one_examples() {
        assert_eq!(pr_one(&p("x1*x2 + x3*x4*x5")).unwrap(), ratio(5, 16));
        assert_eq!(pr_one(&p("x1 + x1*x2*x3")).unwrap(), ratio(3, 8));
        assert_eq!(
            pr_one(&p("x1*x2*x3 + x1*x4 + x4*x5*x6 + x7*x8*x9")).unwrap(),
            ratio(43, 128)
        );
    }

    #[test]
    fn spectrum_examples() {
        let s = walsh_spectrum(&PolyF2::zero(2)).unwrap();
        assert_eq!(s.coeff(0), ratio(1, 1));
        assert_eq!(s.support_size(), 1);
        let s = walsh_spectrum(&p("x1")).unwrap();
        assert_eq!((s.coeff(0), s.coeff(1)), (ratio(0, 1), ratio(1, 1)));
        let s = walsh_spectrum(&p("x1*x2")).unwrap();
        let got: Vec<_> = (0..4).map(|g| s.coeff(g)).collect();
        assert_eq!(got, vec![ratio(1, 2), ratio(1, 2), ratio(1, 2), ratio(-1, 2)]);
        assert_eq!(s.parseval_sum(), ratio(1, 1));
    }

    #[test]
    fn dependency_examples() {
        let d = dependency_space(&p("x1+x3")).unwrap();
        assert_eq!(d.basis(), &[0b101]);
        assert_eq!(dependency_space(&p("x1*x2")).unwrap().dim(), 2);
        assert_eq!(dependency_space(&PolyF2::one(3)).unwrap().dim(), 0);
    }

    #[test]
    fn max_bias_examples() {
        assert_eq!(max_nonzero_bias(&[p("x1"), p("x2")]).unwrap(), ratio(0, 1));
        let t = [p("x1"), PolyF2::parse("x1 + 1", None).unwrap()];
        assert_eq!(max_nonzero_bias_witness(&t).unwrap(), (ratio(1, 1), 0b11));
        assert_eq!(max_nonzero_bias(&[p("x1*x2"), p("x3*x4")]).unwrap(), ratio(1, 2));
    }

    #[test]
    fn max_bias_many_members() {
        // Eight independent variables plus one repeat: only the repeat pair
        // cancels to a constant.
        let mut t: Vec<PolyF2> = (1..=8).map(|i| PolyF2::var(i, 8)).collect();
        t.push(PolyF2::var(3, 8));
        let (eps, lambda) = max_nonzero_bias_witness(&t).unwrap();
        assert_eq!(eps, ratio(1, 1));
        assert_eq!(lambda, (1 << 2) | (1 << 8));
    }

    #[test]
    fn vazirani_examples() {
        let r = vazirani_check(&[p("x1"), p("x2")]).unwrap();
        assert_eq!(
            (r.tv_from_uniform.clone(), r.bound.clone()),
            (ratio(0, 1), Some(ratio(0, 1)))
        );
        assert!(r.holds);
        let r = vazirani_check(&[p("x1"), p("x1")]).unwrap();
        assert_eq!(r.tv_from_uniform, ratio(1, 2));
        assert_eq!(r.bound, Some(ratio(2, 1)));
        assert!(r.holds);
        let r = vazirani_check(&[p("x1*x2+x3"), p("x4*x5+x1")]).unwrap();
        assert!(r.holds);
    }
}
