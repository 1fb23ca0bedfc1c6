//! Dyadic approximation of the bias of a bounded quadratic-rank function and
//! the resulting distance of `Pr[P = 1]` from one third.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::factors::{psi_star_bounded, CklProfile, GrowthFn, PsiOutcome};
use crate::gf2::{common_vars, PolyF2};
use crate::quadratic::bias_quadratic;
use crate::rational::{self, Rational};
use crate::spectral::pr_one;

pub const MAX_RANK: usize = 16;

/// `E[(-1)^P] = A / 2^s + err` for `P = Γ(Q_1, ..., Q_r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicCertificate {
    pub r: usize,
    pub t: u64,
    /// Index of the first scale interval free of `|ε_S|`.
    pub i: u64,
    pub s: u64,
    pub a: BigInt,
    /// Exact `E[(-1)^P] = Σ_S Γ̂(S) ε_S`.
    pub signed_bias: Rational,
    /// `2^{-t} 2^{-s}`.
    pub err_bound: Rational,
    /// `Σ_{S small} |Γ̂(S)| 2^{-(r+t)(i+1)}`, a bound on `|err|` that holds
    /// for every `Γ`.
    pub tail_bound: Rational,
    pub achieved_err: Rational,
    /// `|Pr[P = 1] - 1/3|`.
    pub gap: Rational,
    /// `(2^{-s}/3 - tail_bound) / 2` when positive: a lower bound on `gap`
    /// that only uses `s` and the tail estimate.
    pub gap_floor: Option<Rational>,
}

impl DyadicCertificate {
    pub fn within_err_bound(&self) -> bool {
        self.achieved_err <= self.err_bound
    }

    pub fn s_bound(&self) -> u64 {
        (self.r as u64 + self.t) * (1u64 << self.r) + self.r as u64
    }
}

/// `2^r Γ̂(S)` for the `±1` version of `Γ`.
fn fourier_numerators(gamma: &[bool]) -> Vec<i64> {
    let mut v: Vec<i64> = gamma.iter().map(|&b| if b { -1 } else { 1 }).collect();
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    v
}

/// `j` with `|ε| = 2^{-j}`, or `None` for `ε = 0`.
fn scale_of(eps: &Rational) -> Option<u64> {
    if eps.is_zero() {
        return None;
    }
    Some(eps.denom().bits() - 1)
}

pub fn dyadic_proximity(gamma: &[bool], qs: &[PolyF2], t: u64) -> Result<DyadicCertificate> {
    let r = qs.len();
    if r > MAX_RANK {
        return Err(Error::CapExceeded {
            what: "rank r",
            value: r as u64,
            cap: MAX_RANK as u64,
        });
    }
    if gamma.len() != 1 << r {
        return Err(Error::DimensionMismatch {
            expected: 1 << r,
            got: gamma.len(),
        });
    }
    if t == 0 {
        return Err(Error::invalid("t must be positive"));
    }
    if let Some(q) = qs.iter().find(|q| q.degree() > 2) {
        return Err(Error::DegreeTooHigh {
            degree: q.degree(),
            max: 2,
        });
    }
    let (m, qs) = common_vars(qs);
    let eps = (0..1u64 << r)
        .into_par_iter()
        .map(|set| {
            let q = (0..r)
                .filter(|i| set >> i & 1 == 1)
                .fold(PolyF2::zero(m), |acc, i| acc.add(&qs[i]));
            bias_quadratic(&q)
        })
        .collect::<Result<Vec<Rational>>>()?;
    let a_s = fourier_numerators(gamma);
    let scale = rational::inv_pow2(r as u64);

    let width = r as u64 + t;
    let mut hit = vec![false; (1 << r) + 1];
    for j in eps.iter().filter_map(scale_of) {
        if let Some(slot) = hit.get_mut((j / width) as usize) {
            *slot = true;
        }
    }
    let i = hit.iter().position(|&h| !h).expect("2^r + 1 intervals, 2^r values") as u64;
    let cut = width * i;
    let s = cut + r as u64;

    let mut high = rational::zero();
    let mut total = rational::zero();
    let mut tail_weight = rational::zero();
    for (a, e) in a_s.iter().zip(&eps) {
        let term = rational::int(*a) * &scale * e;
        total += &term;
        match scale_of(e) {
            Some(j) if j < cut => high += term,
            _ => tail_weight += (rational::int(*a) * &scale).abs(),
        }
    }
    let a_scaled = &high * Rational::from_integer(rational::pow2(s));
    if !a_scaled.is_integer() {
        return Err(Error::invariant("high part is not a multiple of 2^-s"));
    }
    let a = a_scaled.to_integer();
    let achieved_err = (&total - &high).abs();
    let tail_bound = tail_weight * rational::inv_pow2(width * (i + 1));
    let err_bound = rational::inv_pow2(t + s);
    let third = rational::ratio(1, 3);
    let pr = (rational::one() - &total) / rational::int(2);
    let gap = (pr - &third).abs();
    let floor = (dyadic_gap_floor(s) - &tail_bound) / rational::int(2);
    Ok(DyadicCertificate {
        r,
        t,
        i,
        s,
        a,
        signed_bias: total,
        err_bound,
        tail_bound,
        achieved_err,
        gap,
        gap_floor: (floor > rational::zero()).then_some(floor),
    })
}

/// `|Pr[P = 1] - 1/3|`.
pub fn one_third_gap(p: &PolyF2) -> Result<Rational> {
    gap_to(p, &rational::ratio(1, 3))
}

pub fn gap_to(p: &PolyF2, rho: &Rational) -> Result<Rational> {
    Ok((pr_one(p)? - rho).abs())
}

/// `(1/3) 2^{-s}`, the least distance from one third to any `A / 2^s`.
pub fn dyadic_gap_floor(s: u64) -> Rational {
    rational::inv_pow2(s) / rational::int(3)
}

/// `(1/12) 2^{-((r+2) 2^r + r)}`.
pub fn delta_2r_bound(r: u32) -> Result<Rational> {
    if r > 32 {
        return Err(Error::CapExceeded {
            what: "rank r",
            value: r as u64,
            cap: 32,
        });
    }
    let s = (r as u64 + 2) * (1u64 << r) + r as u64;
    Ok(rational::inv_pow2(s) / rational::int(12))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaBound {
    pub psi_star: PsiOutcome,
    /// `(1/12) 2^{-ψ*}` when `ψ*` is known exactly and small enough to write
    /// down.
    pub value: Option<Rational>,
}

pub const MAX_DELTA_EXPONENT: u64 = 1 << 20;

/// The degree-`d` gap bound with growth `f(k) = c_KL(d, 2^{-⌈3k/2⌉} / 4)`.
pub fn delta_dr_bound(d: u32, r: u64, profile: &CklProfile, budget: u64) -> Result<DeltaBound> {
    if d == 0 {
        return Err(Error::invalid("degree must be positive"));
    }
    let p = profile.clone();
    let f = GrowthFn::custom(format!("ckl{d}(2^-(3k/2)/4)"), move |k| {
        let e = k.saturating_mul(3).div_ceil(2).saturating_add(2);
        p.bound(d, &rational::inv_pow2(e)).unwrap_or(u64::MAX)
    });
    let psi_star = psi_star_bounded(d as usize, &f, r, budget)?;
    let value = match psi_star.value.to_u64() {
        Some(e) if psi_star.complete && e <= MAX_DELTA_EXPONENT => Some(rational::inv_pow2(e) / rational::int(12)),
        _ => None,
    };
    Ok(DeltaBound { psi_star, value })
}
