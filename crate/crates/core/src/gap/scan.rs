//! Exhaustive sweep over every polynomial of degree at most `d` in `m`
//! variables, tracking the census of `Pr[P = 1]` and the closest approach to
//! a target.

use std::collections::BTreeMap;

use num_traits::Signed;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::{truth_table, PolyF2, TruthTable};
use crate::quadratic::bias_quadratic;
use crate::rational::{self, Rational};

/// At most `2^26` polynomials per scan.
pub const MAX_MONOMIALS: usize = 26;
pub const MAX_SCAN_VARS: u32 = 16;
const BLOCK: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanResult {
    pub d: u32,
    pub m: u32,
    pub rho: Rational,
    pub polys: u64,
    pub min_gap: Rational,
    pub witness: PolyF2,
    pub witness_pr: Rational,
    /// `Pr[P = 1]` value to number of polynomials attaining it.
    pub census: BTreeMap<Rational, u64>,
}

impl ScanResult {
    pub fn census_csv(&self) -> String {
        let mut out = String::from("value,count\n");
        for (v, c) in &self.census {
            out.push_str(&format!("{},{c}\n", rational::format(v)));
        }
        out
    }
}

/// Monomials of degree at most `d`, ordered by degree and then by mask.
pub fn monomials(d: u32, m: u32) -> Vec<u64> {
    let mut out: Vec<u64> = (0..1u64 << m).filter(|x| x.count_ones() <= d).collect();
    out.sort_by_key(|&x| (x.count_ones(), x));
    out
}

fn poly_of(index: u64, monos: &[u64], m: u32) -> PolyF2 {
    PolyF2::from_masks(m, (0..monos.len()).filter(|b| index >> b & 1 == 1).map(|b| monos[b]))
        .expect("monomials fit in m variables")
}

struct Partial {
    census: BTreeMap<Rational, u64>,
    best: Option<(Rational, u64)>,
}

impl Partial {
    fn new() -> Self {
        Partial {
            census: BTreeMap::new(),
            best: None,
        }
    }

    fn record(&mut self, index: u64, pr: Rational, rho: &Rational) {
        self.record_best((&pr - rho).abs(), index);
        *self.census.entry(pr).or_insert(0) += 1;
    }

    fn merge(mut self, other: Partial) -> Partial {
        for (k, v) in other.census {
            *self.census.entry(k).or_insert(0) += v;
        }
        if let Some((g, i)) = other.best {
            self.record_best(g, i);
        }
        self
    }

    fn record_best(&mut self, gap: Rational, index: u64) {
        if self
            .best
            .as_ref()
            .is_none_or(|(g, i)| gap < *g || (gap == *g && index < *i))
        {
            self.best = Some((gap, index));
        }
    }
}

fn check_budget(d: u32, m: u32) -> Result<Vec<u64>> {
    if m > MAX_SCAN_VARS {
        return Err(Error::CapExceeded {
            what: "scan variable count",
            value: m as u64,
            cap: MAX_SCAN_VARS as u64,
        });
    }
    let monos = monomials(d, m);
    if monos.len() > MAX_MONOMIALS {
        return Err(Error::BudgetExceeded(1u64 << monos.len().min(63)));
    }
    Ok(monos)
}

/// Closed-form sweep for `d <= 2`, truth-table sweep otherwise.
pub fn min_gap_scan(d: u32, m: u32, rho: &Rational) -> Result<ScanResult> {
    if d <= 2 {
        scan_with(d, m, rho, sweep_dickson)
    } else {
        scan_with(d, m, rho, sweep_tables)
    }
}

/// Truth-table sweep for every degree; kept public as an oracle for the
/// closed-form path.
pub fn min_gap_scan_tables(d: u32, m: u32, rho: &Rational) -> Result<ScanResult> {
    scan_with(d, m, rho, sweep_tables)
}

type Sweep = fn(&[u64], u32, &Rational) -> Result<Partial>;

fn scan_with(d: u32, m: u32, rho: &Rational, sweep: Sweep) -> Result<ScanResult> {
    let monos = check_budget(d, m)?;
    let part = sweep(&monos, m, rho)?;
    let (min_gap, idx) = part.best.expect("at least the zero polynomial");
    let witness = poly_of(idx, &monos, m);
    let witness_pr = crate::spectral::pr_one(&witness)?;
    Ok(ScanResult {
        d,
        m,
        rho: rho.clone(),
        polys: 1u64 << monos.len(),
        min_gap,
        witness,
        witness_pr,
        census: part.census,
    })
}

fn sweep_dickson(monos: &[u64], m: u32, rho: &Rational) -> Result<Partial> {
    let total = 1u64 << monos.len();
    let half = rational::ratio(1, 2);
    (0..total.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut part = Partial::new();
            for index in b * BLOCK..((b + 1) * BLOCK).min(total) {
                let eps = bias_quadratic(&poly_of(index, monos, m))?;
                part.record(index, (rational::one() - eps) * &half, rho);
            }
            Ok(part)
        })
        .try_reduce(Partial::new, |a, b| Ok(a.merge(b)))
}

fn sweep_tables(monos: &[u64], m: u32, rho: &Rational) -> Result<Partial> {
    let tables = monos
        .iter()
        .map(|&mk| truth_table(&PolyF2::from_masks(m, [mk])?))
        .collect::<Result<Vec<TruthTable>>>()?;
    let total = 1u64 << monos.len();
    let denom = rational::pow2(m as u64);
    (0..total.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut part = Partial::new();
            let mut weights: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
            let start = b * BLOCK;
            let end = ((b + 1) * BLOCK).min(total);
            let mut table = TruthTable::zeros(m)?;
            let g0 = start ^ (start >> 1);
            for (bit, t) in tables.iter().enumerate() {
                if g0 >> bit & 1 == 1 {
                    table.xor_assign(t);
                }
            }
            for k in start..end {
                if k > start {
                    table.xor_assign(&tables[k.trailing_zeros() as usize]);
                }
                let index = k ^ (k >> 1);
                let w = table.weight();
                let e = weights.entry(w).or_insert((0, index));
                e.0 += 1;
                e.1 = e.1.min(index);
            }
            // Weights repeat heavily; convert each distinct one once.
            for (w, (count, index)) in weights {
                let pr = Rational::new(w.into(), denom.clone());
                part.record_best((&pr - rho).abs(), index);
                *part.census.entry(pr).or_insert(0) += count;
            }
            Ok(part)
        })
        .try_reduce(Partial::new, |a, b| Ok(a.merge(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn small_scans() {
        let third = ratio(1, 3);
        let s = min_gap_scan(1, 3, &third).unwrap();
        assert_eq!(s.min_gap, ratio(1, 6));
        let s = min_gap_scan(2, 4, &third).unwrap();
        assert_eq!(s.polys, 2048);
        assert_eq!(s.min_gap, ratio(1, 24));
        assert_eq!(s.witness_pr, ratio(3, 8));
        let s = min_gap_scan(2, 2, &third).unwrap();
        assert_eq!(s.min_gap, ratio(1, 12));
    }

    #[test]
    fn closed_form_matches_tables() {
        let third = ratio(1, 3);
        for m in 1..=4 {
            let a = min_gap_scan(2, m, &third).unwrap();
            let b = min_gap_scan_tables(2, m, &third).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn census_is_dyadic_and_complete() {
        let s = min_gap_scan(3, 4, &ratio(1, 3)).unwrap();
        assert_eq!(s.census.values().sum::<u64>(), s.polys);
        assert!(s.census.keys().all(rational::is_dyadic));
    }

    #[test]
    fn refuses_large_scans() {
        assert!(matches!(
            min_gap_scan(3, 6, &ratio(1, 3)),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
