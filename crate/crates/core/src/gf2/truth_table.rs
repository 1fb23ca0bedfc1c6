//! Bit-packed truth tables.
//!
//! Index convention (shared by every module): entry `x` holds `P(x)` where
//! bit `i - 1` of `x` is the value of `x_i`. Entry `x` lives in bit `x % 64`
//! of word `x / 64`.

use rayon::prelude::*;

use super::poly::PolyF2;
use crate::error::{Error, Result};
use crate::limits;

const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    m: u32,
    words: Vec<u64>,
}

fn word_count(m: u32) -> usize {
    if m <= 6 {
        1
    } else {
        1usize << (m - 6)
    }
}

fn tail_mask(m: u32) -> u64 {
    if m >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << m)) - 1
    }
}

/// In-place subset-sum (zeta) transform over F2. It is an involution, so the
/// same routine maps ANF coefficients to values and back.
fn moebius(m: u32, words: &mut [u64]) {
    for (i, &mask) in LOW_MASKS.iter().enumerate().take(m.min(6) as usize) {
        let shift = 1u32 << i;
        words.iter_mut().for_each(|w| *w ^= (*w & mask) << shift);
    }
    for i in 6..m {
        let stride = 1usize << (i - 6);
        words.par_chunks_mut(2 * stride).for_each(|block| {
            let (lo, hi) = block.split_at_mut(stride);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                *h ^= *l;
            }
        });
    }
}

impl TruthTable {
    pub fn zeros(m: u32) -> Result<Self> {
        limits::check_vars(m)?;
        Ok(TruthTable {
            m,
            words: vec![0; word_count(m)],
        })
    }

    pub fn from_fn(m: u32, f: impl Fn(u64) -> bool) -> Result<Self> {
        let mut t = Self::zeros(m)?;
        for x in 0..(1u64 << m) {
            if f(x) {
                t.set(x, true);
            }
        }
        Ok(t)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let len = bits.len();
        if !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let m = len.trailing_zeros();
        let mut t = Self::zeros(m)?;
        for (x, &b) in bits.iter().enumerate() {
            if b {
                t.set(x as u64, true);
            }
        }
        Ok(t)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> u64 {
        1u64 << self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, x: u64) -> bool {
        (self.words[(x >> 6) as usize] >> (x & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: u64, bit: bool) {
        let w = &mut self.words[(x >> 6) as usize];
        if bit {
            *w |= 1 << (x & 63);
        } else {
            *w &= !(1 << (x & 63));
        }
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len()).map(|x| self.get(x)).collect()
    }

    /// Number of inputs mapped to 1.
    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn xor_assign(&mut self, other: &TruthTable) {
        debug_assert_eq!(self.m, other.m);
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a ^= b);
    }

    pub fn and_assign(&mut self, other: &TruthTable) {
        debug_assert_eq!(self.m, other.m);
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a &= b);
    }

    pub fn not(&self) -> TruthTable {
        let mut t = self.clone();
        t.words.iter_mut().for_each(|w| *w = !*w);
        let last = t.words.len() - 1;
        t.words[last] &= tail_mask(self.m);
        t
    }

    /// Number of inputs where both tables are 1.
    pub fn and_weight(&self, other: &TruthTable) -> u64 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }
}

/// Values of `p` on all `2^m` inputs via the Möbius transform of its ANF
/// coefficient vector.
pub fn truth_table(p: &PolyF2) -> Result<TruthTable> {
    let m = p.m();
    let mut t = TruthTable::zeros(m)?;
    for &mk in p.masks() {
        t.set(mk, true);
    }
    moebius(m, &mut t.words);
    Ok(t)
}

/// Inverse of [`truth_table`].
pub fn anf_from_truth_table(t: &TruthTable) -> PolyF2 {
    let mut coeffs = t.words.clone();
    moebius(t.m, &mut coeffs);
    let mut monos = Vec::new();
    for (wi, &w) in coeffs.iter().enumerate() {
        let mut rest = w;
        while rest != 0 {
            let b = rest.trailing_zeros() as u64;
            monos.push(((wi as u64) << 6) | b);
            rest &= rest - 1;
        }
    }
    PolyF2::from_sorted_unchecked(t.m, monos)
}

pub fn anf_from_bits(bits: &[bool]) -> Result<PolyF2> {
    Ok(anf_from_truth_table(&TruthTable::from_bits(bits)?))
}

/// Truth table of a polynomial `gamma` in abstract variables `y_1..y_K`
/// composed with the member tables (`y_j` is member `j - 1`).
pub fn compose(gamma: &PolyF2, members: &[TruthTable], m: u32) -> Result<TruthTable> {
    if gamma.support().checked_shr(members.len() as u32).unwrap_or(0) != 0 {
        return Err(Error::DimensionMismatch {
            expected: gamma.m() as usize,
            got: members.len(),
        });
    }
    let mut acc = TruthTable::zeros(m)?;
    for mono in gamma.monomials() {
        let mut term = TruthTable::zeros(m)?.not();
        for v in mono.vars() {
            term.and_assign(&members[(v - 1) as usize]);
        }
        acc.xor_assign(&term);
    }
    Ok(acc)
}
