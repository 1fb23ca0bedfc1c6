//! Regularizing a quadratic collection `Γ(Q_1..Q_r; L_1..L_s)`: while some
//! combination of the remaining `Q_i` has low linear rank, move its linear
//! forms into `L` and drop one of the `Q_i`.

use crate::error::{Error, Result};
use crate::gf2::{common_vars, truth_table, LinearBasis, PolyF2, TruthTable};
use crate::limits;
use crate::quadratic::{dickson_decompose, rank1_bilinear};

use super::regularity::Witness;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rank21Step {
    pub k: usize,
    /// `C (C+1)^k (r+s)` at this iteration.
    pub threshold: u128,
    /// Bit `t` selects the `t`-th remaining quadratic.
    pub a: u64,
    pub rank: usize,
    /// Original index (0-based) of the dropped quadratic.
    pub dropped: usize,
    pub new_linear: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rank21Output {
    pub k: usize,
    /// Original indices (0-based) of the surviving quadratics.
    pub kept: Vec<usize>,
    pub q_prime: Vec<PolyF2>,
    /// Independent homogeneous linear forms.
    pub l_prime: Vec<PolyF2>,
    /// Table over `(Q', L')`, bit `i` of the index is input `i + 1`.
    pub gamma_prime: Vec<bool>,
    pub steps: Vec<Rank21Step>,
    /// Final minimum rank over combinations of `Q'` (`None` when empty).
    pub final_rank: Option<usize>,
    pub size_bound: u128,
    pub threshold: u128,
}

fn threshold(c: u64, k: usize, rs: usize) -> u128 {
    let mut t = c as u128 * rs as u128;
    for _ in 0..k {
        t = t.saturating_mul(c as u128 + 1);
    }
    t
}

fn size_bound(c: u64, k: usize, r: usize, s: usize) -> u128 {
    (threshold(c, k, r + s) / c as u128).saturating_sub(r as u128)
}

/// Inserts a linear form into `L'` and returns its expression over the
/// abstract variables (`y_1..y_r` for the quadratics, then `L'`).
fn absorb_linear(
    l: &PolyF2,
    basis: &mut LinearBasis,
    l_prime: &mut Vec<PolyF2>,
    r: usize,
    m_abs: u32,
) -> Result<PolyF2> {
    let h = l.linear_mask();
    let mut expr = PolyF2::constant(m_abs, l.constant_term());
    if h == 0 {
        return Ok(expr);
    }
    if let Some(combo) = basis.express(h) {
        for j in 0..l_prime.len() {
            if combo >> j & 1 == 1 {
                expr = expr.add(&PolyF2::var((r + j + 1) as u32, m_abs));
            }
        }
        return Ok(expr);
    }
    let idx = basis.insert(h).expect("independent vector");
    debug_assert_eq!(idx, l_prime.len());
    if r + idx + 1 > m_abs as usize {
        return Err(Error::invariant("linear forms exceed the abstract variable budget"));
    }
    l_prime.push(PolyF2::affine(l.m(), h, false));
    Ok(expr.add(&PolyF2::var((r + idx + 1) as u32, m_abs)))
}

/// Minimum `rank_1` over nonzero combinations, lowest `a` among minimisers.
/// Members that collapsed to affine functions are ranked like any other.
fn min_rank1(qs: &[PolyF2], m: u32) -> Result<(usize, u64)> {
    let mut acc = PolyF2::zero(m);
    let mut best: Option<(usize, u64)> = None;
    for step in 1u64..1 << qs.len() {
        acc = acc.add(&qs[step.trailing_zeros() as usize]);
        let a = step ^ (step >> 1);
        let rank = rank1_bilinear(&acc)?;
        if best.is_none_or(|(r, b)| (rank, a) < (r, b)) {
            best = Some((rank, a));
        }
    }
    best.ok_or_else(|| Error::invariant("no quadratics left"))
}

fn eval_tables(tables: &[TruthTable], x: u64) -> u64 {
    tables
        .iter()
        .enumerate()
        .fold(0u64, |a, (i, t)| a | (u64::from(t.get(x)) << i))
}

/// Runs the loop with constant `c >= 2` and checks the size bound, the rank
/// threshold and functional equality on every input.
pub fn regularize_rank21(gamma: &[bool], qs: &[PolyF2], ls: &[PolyF2], c: u64) -> Result<Rank21Output> {
    let (r, s) = (qs.len(), ls.len());
    if r + s > 20 {
        return Err(Error::CapExceeded {
            what: "r + s",
            value: (r + s) as u64,
            cap: 20,
        });
    }
    if gamma.len() != 1usize << (r + s) {
        return Err(Error::DimensionMismatch {
            expected: 1 << (r + s),
            got: gamma.len(),
        });
    }
    if c < 2 {
        return Err(Error::invalid("C must be at least 2"));
    }
    if let Some(q) = qs.iter().find(|q| q.degree() > 2) {
        return Err(Error::DegreeTooHigh {
            degree: q.degree(),
            max: 2,
        });
    }
    if let Some(l) = ls.iter().find(|l| l.degree() > 1) {
        return Err(Error::DegreeTooHigh {
            degree: l.degree(),
            max: 1,
        });
    }
    let all: Vec<PolyF2> = qs.iter().chain(ls).cloned().collect();
    let (m, all) = common_vars(&all);
    limits::check_vars(m)?;
    let (qs, ls) = all.split_at(r);
    let m_abs = (r + m as usize).min(64) as u32;

    let mut basis = LinearBasis::new();
    let mut l_prime: Vec<PolyF2> = Vec::new();
    // Expressions of Q_1..Q_r, L_1..L_s over the abstract variables.
    let mut exprs: Vec<PolyF2> = (1..=r as u32).map(|i| PolyF2::var(i, m_abs)).collect();
    for l in ls {
        exprs.push(absorb_linear(l, &mut basis, &mut l_prime, r, m_abs)?);
    }

    let mut alive: Vec<usize> = (0..r).collect();
    let mut steps = Vec::new();
    let mut k = 0usize;
    let final_rank = loop {
        if alive.is_empty() {
            break None;
        }
        let current: Vec<PolyF2> = alive.iter().map(|&i| qs[i].clone()).collect();
        let (rank, a) = min_rank1(&current, m)?;
        let t = threshold(c, k, r + s);
        if rank as u128 > t {
            break Some(rank);
        }
        let combination = alive
            .iter()
            .enumerate()
            .filter(|(t, _)| a >> t & 1 == 1)
            .fold(PolyF2::zero(m), |acc, (_, &i)| acc.add(&qs[i]));
        let witness = Witness::Dickson(dickson_decompose(&combination)?);
        let before = l_prime.len();
        let form_exprs = witness
            .forms()
            .iter()
            .map(|h| absorb_linear(h, &mut basis, &mut l_prime, r, m_abs))
            .collect::<Result<Vec<_>>>()?;
        let mut replacement = witness.gamma().substitute(&form_exprs, m_abs)?;
        let pos = (0..alive.len()).find(|t| a >> t & 1 == 1).expect("nonzero combination");
        let dropped = alive[pos];
        for (t, &i) in alive.iter().enumerate() {
            if t != pos && a >> t & 1 == 1 {
                replacement = replacement.add(&PolyF2::var(i as u32 + 1, m_abs));
            }
        }
        let images: Vec<PolyF2> = (1..=m_abs)
            .map(|v| {
                if v as usize == dropped + 1 {
                    replacement.clone()
                } else {
                    PolyF2::var(v, m_abs)
                }
            })
            .collect();
        exprs = exprs
            .iter()
            .map(|e| e.substitute(&images, m_abs))
            .collect::<Result<Vec<_>>>()?;
        alive.remove(pos);
        steps.push(Rank21Step {
            k,
            threshold: t,
            a,
            rank,
            dropped,
            new_linear: l_prime.len() - before,
        });
        k += 1;
    };

    let bound = size_bound(c, k, r, s);
    if l_prime.len() as u128 > bound {
        return Err(Error::invariant("size bound on L' violated"));
    }
    let t = threshold(c, k, r + s);
    if final_rank.is_some_and(|fr| fr as u128 <= t) {
        return Err(Error::invariant("rank threshold on Q' violated"));
    }

    // Γ' on (Q', L'): abstract variable of kept Q_i is y_{i+1}, of L'_j is
    // y_{r+j+1}.
    let width = alive.len() + l_prime.len();
    if width > 24 {
        return Err(Error::CapExceeded {
            what: "inputs of Γ'",
            value: width as u64,
            cap: 24,
        });
    }
    let to_abstract = |z: u64| -> u64 {
        let mut y = 0u64;
        for (t, &i) in alive.iter().enumerate() {
            y |= (z >> t & 1) << i;
        }
        for j in 0..l_prime.len() {
            y |= (z >> (alive.len() + j) & 1) << (r + j);
        }
        y
    };
    let gamma_prime: Vec<bool> = (0..1u64 << width)
        .map(|z| {
            let y = to_abstract(z);
            let inner = exprs
                .iter()
                .enumerate()
                .fold(0usize, |acc, (i, e)| acc | (usize::from(e.eval_mask(y)) << i));
            gamma[inner]
        })
        .collect();

    let q_prime: Vec<PolyF2> = alive.iter().map(|&i| qs[i].clone()).collect();
    let orig_tables = all.iter().map(truth_table).collect::<Result<Vec<_>>>()?;
    let new_tables = q_prime
        .iter()
        .chain(&l_prime)
        .map(|p| truth_table(&p.with_vars(m)?))
        .collect::<Result<Vec<_>>>()?;
    for x in 0..1u64 << m {
        let lhs = gamma[eval_tables(&orig_tables, x) as usize];
        let rhs = gamma_prime[eval_tables(&new_tables, x) as usize];
        if lhs != rhs {
            return Err(Error::invariant(format!("Γ' disagrees with Γ at input {x}")));
        }
    }

    Ok(Rank21Output {
        k,
        kept: alive,
        q_prime,
        l_prime,
        gamma_prime,
        steps,
        final_rank,
        size_bound: bound,
        threshold: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PolyF2 {
        PolyF2::parse(s, None).unwrap()
    }

    #[test]
    fn single_low_rank_quadratic_is_emptied() {
        let out = regularize_rank21(&[false, true], &[p("x1*x2")], &[], 2).unwrap();
        assert_eq!(out.k, 1);
        assert!(out.q_prime.is_empty());
        let names: Vec<String> = out.l_prime.iter().map(|l| l.to_string()).collect();
        assert_eq!(names, vec!["x1", "x2"]);
        assert_eq!(out.gamma_prime, vec![false, false, false, true]);
    }

    #[test]
    fn high_rank_quadratic_untouched() {
        let q = p("x1*x2 + x3*x4 + x5*x6 + x7*x8");
        let out = regularize_rank21(&[false, true], std::slice::from_ref(&q), &[], 2).unwrap();
        assert_eq!(out.k, 0);
        assert_eq!(out.q_prime, vec![q]);
        assert_eq!(out.final_rank, Some(8));
    }

    #[test]
    fn cancelling_pair() {
        let q = p("x1*x2 + x3*x4 + x5*x6 + x7*x8");
        let q2 = q.add(&p("x9"));
        let gamma: Vec<bool> = (0..4).map(|z| z == 1 || z == 2).collect();
        let out = regularize_rank21(&gamma, &[q, q2], &[], 2).unwrap();
        assert_eq!(out.steps[0].a, 0b11);
        assert_eq!(out.steps[0].rank, 1);
        assert_eq!(out.steps[0].dropped, 0);
        assert_eq!(out.l_prime[0].to_string(), "x9");
    }

    #[test]
    fn dependent_linears_are_stripped() {
        let ls = [p("x1"), p("x2"), p("x1 + x2 + 1")];
        let gamma: Vec<bool> = (0..16u32).map(|z| z.count_ones() % 2 == 1).collect();
        let q = p("x1*x3 + x2*x4 + x5*x6 + x7*x8 + x9*x10");
        let out = regularize_rank21(&gamma, &[q], &ls, 2).unwrap();
        assert_eq!(out.k, 0);
        assert_eq!(out.l_prime.len(), 2);
    }
}
