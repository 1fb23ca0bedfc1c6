//! Dense F2 matrices with at most 64 columns, one `u64` per row.
//!
//! Column `j` is bit `j` of a row word. Row echelon forms pick the lowest
//! remaining column as pivot, so pivot columns increase down the rows.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    ncols: u32,
    rows: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    /// Nonzero rows only, fully reduced.
    pub matrix: BitMatrix,
    pub rank: usize,
    pub pivots: Vec<u32>,
}

fn col_mask(ncols: u32) -> u64 {
    if ncols >= 64 {
        u64::MAX
    } else {
        (1u64 << ncols) - 1
    }
}

impl BitMatrix {
    pub fn new(ncols: u32) -> Self {
        assert!(ncols <= 64, "at most 64 columns");
        BitMatrix {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(ncols: u32, rows: Vec<u64>) -> Result<Self> {
        if ncols > 64 {
            return Err(Error::CapExceeded {
                what: "column count",
                value: ncols as u64,
                cap: 64,
            });
        }
        if rows.iter().any(|r| r & !col_mask(ncols) != 0) {
            return Err(Error::invalid("row has bits beyond the column count"));
        }
        Ok(BitMatrix { ncols, rows })
    }

    pub fn from_bit_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::invalid("ragged rows"));
        }
        let packed = rows
            .iter()
            .map(|r| r.iter().enumerate().fold(0u64, |acc, (j, &b)| acc | ((b as u64) << j)))
            .collect();
        Self::from_rows(ncols as u32, packed)
    }

    pub fn identity(n: u32) -> Self {
        BitMatrix {
            ncols: n,
            rows: (0..n).map(|i| 1u64 << i).collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> u32 {
        self.ncols
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn push_row(&mut self, row: u64) {
        assert!(row & !col_mask(self.ncols) == 0, "row exceeds column count");
        self.rows.push(row);
    }

    pub fn rref(&self) -> Rref {
        let (rows, pivots) = reduce(self.rows.clone());
        Rref {
            rank: rows.len(),
            matrix: BitMatrix {
                ncols: self.ncols,
                rows,
            },
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    pub fn span_contains(&self, v: u64) -> bool {
        let r = self.rref();
        reduce_against(&r.matrix.rows, &r.pivots, v) == 0
    }

    /// A solution `x` (bit `j` is `x_j`) of `M x = b`, free variables zero.
    pub fn solve(&self, b: &[bool]) -> Result<Option<u64>> {
        if b.len() != self.rows.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows.len(),
                got: b.len(),
            });
        }
        let mut eqs: Vec<(u64, bool)> = self.rows.iter().copied().zip(b.iter().copied()).collect();
        let mut rank = 0;
        let mut pivots = Vec::new();
        for col in 0..self.ncols {
            let bit = 1u64 << col;
            let Some(p) = (rank..eqs.len()).find(|&i| eqs[i].0 & bit != 0) else {
                continue;
            };
            eqs.swap(rank, p);
            let (prow, prhs) = eqs[rank];
            for (i, eq) in eqs.iter_mut().enumerate() {
                if i != rank && eq.0 & bit != 0 {
                    eq.0 ^= prow;
                    eq.1 ^= prhs;
                }
            }
            pivots.push(col);
            rank += 1;
        }
        if eqs[rank..].iter().any(|&(_, rhs)| rhs) {
            return Ok(None);
        }
        let x = pivots
            .iter()
            .zip(&eqs)
            .filter(|(_, eq)| eq.1)
            .fold(0u64, |acc, (&col, _)| acc | (1u64 << col));
        Ok(Some(x))
    }
}

/// Gauss-Jordan on row words; returns nonzero reduced rows and their pivots.
pub(crate) fn reduce(mut rows: Vec<u64>) -> (Vec<u64>, Vec<u32>) {
    let mut out: Vec<u64> = Vec::new();
    let mut pivots: Vec<u32> = Vec::new();
    rows.retain(|&r| r != 0);
    while !rows.is_empty() {
        let bit = rows.iter().fold(0u64, |acc, r| acc | r);
        let col = bit.trailing_zeros();
        let pb = 1u64 << col;
        let idx = rows.iter().position(|r| r & pb != 0).expect("pivot exists");
        let prow = rows.swap_remove(idx);
        for r in rows.iter_mut() {
            if *r & pb != 0 {
                *r ^= prow;
            }
        }
        for r in out.iter_mut() {
            if *r & pb != 0 {
                *r ^= prow;
            }
        }
        rows.retain(|&r| r != 0);
        out.push(prow);
        pivots.push(col);
    }
    // Back-reduce so earlier rows are clear in later pivot columns too.
    for i in 0..out.len() {
        for j in 0..out.len() {
            if i != j && out[j] & (1u64 << pivots[i]) != 0 {
                out[j] ^= out[i];
            }
        }
    }
    (out, pivots)
}

pub(crate) fn reduce_against(rows: &[u64], pivots: &[u32], mut v: u64) -> u64 {
    for (&r, &p) in rows.iter().zip(pivots) {
        if v & (1u64 << p) != 0 {
            v ^= r;
        }
    }
    v
}

/// Incrementally built basis that remembers how each stored vector
/// decomposes over the independent inputs accepted so far.
#[derive(Debug, Clone, Default)]
pub struct LinearBasis {
    /// (reduced vector, pivot bit, combination over accepted inputs)
    rows: Vec<(u64, u64, u64)>,
    accepted: Vec<u64>,
}

impl LinearBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.accepted.len()
    }

    pub fn vectors(&self) -> &[u64] {
        &self.accepted
    }

    /// Reduces `v`; returns the residue and the combination used.
    fn residue(&self, mut v: u64) -> (u64, u64) {
        let mut combo = 0u64;
        for &(r, pb, c) in &self.rows {
            if v & pb != 0 {
                v ^= r;
                combo ^= c;
            }
        }
        (v, combo)
    }

    pub fn contains(&self, v: u64) -> bool {
        self.residue(v).0 == 0
    }

    /// Mask over accepted vectors (insertion order) whose sum is `v`.
    pub fn express(&self, v: u64) -> Option<u64> {
        let (res, combo) = self.residue(v);
        (res == 0).then_some(combo)
    }

    /// Adds `v` if independent; returns its index among accepted vectors.
    pub fn insert(&mut self, v: u64) -> Option<usize> {
        let (res, combo) = self.residue(v);
        if res == 0 {
            return None;
        }
        let idx = self.accepted.len();
        assert!(idx < 64, "LinearBasis holds at most 64 vectors");
        let pb = 1u64 << res.trailing_zeros();
        let c = combo ^ (1u64 << idx);
        for row in self.rows.iter_mut() {
            if row.0 & pb != 0 {
                row.0 ^= res;
                row.2 ^= c;
            }
        }
        self.rows.push((res, pb, c));
        self.accepted.push(v);
        Some(idx)
    }
}
