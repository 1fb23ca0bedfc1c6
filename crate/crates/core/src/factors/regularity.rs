//! Exact regularity certificates for factors with members of degree at most
//! two, the refinement step and the regularization loop.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::{compose, truth_table, PolyF2};
use crate::limits;
use crate::quadratic::{dickson_decompose, rank1_bilinear, DicksonForm};
use crate::rational::Rational;
use crate::spectral::signed_bias;

use super::factor::{invlex_compare, Factor};
use super::growth::{psi_star_bounded, CklProfile, GrowthFn, PsiOutcome};

/// Explicit low-rank decomposition of a combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Linear combination that is the given constant.
    Constant(bool),
    /// Quadratic combination written through its Dickson linear forms.
    Dickson(DicksonForm),
}

impl Witness {
    /// Degree `ell - 1` polynomials through which the combination factors.
    pub fn forms(&self) -> Vec<PolyF2> {
        match self {
            Witness::Constant(_) => Vec::new(),
            Witness::Dickson(d) => d.linear_forms(),
        }
    }

    /// Outer function `Γ` over `forms().len()` abstract variables.
    pub fn gamma(&self) -> PolyF2 {
        match self {
            Witness::Constant(c) => PolyF2::constant(0, *c),
            Witness::Dickson(d) => {
                let rho = d.rank1() as u32;
                let mut g = PolyF2::constant(rho, d.c);
                for (k, (a, b)) in d.pairs.iter().enumerate() {
                    let ya = PolyF2::var(2 * k as u32 + 1, rho).add_constant(a.constant_term());
                    let yb = PolyF2::var(2 * k as u32 + 2, rho).add_constant(b.constant_term());
                    g = g.add(&ya.mul(&yb));
                }
                if d.tail.is_some() {
                    g = g.add(&PolyF2::var(rho, rho));
                }
                g
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Bit `i` selects member `i + 1`.
    pub lambda: u64,
    /// Degree of the combination, `max deg(λ_i P_i)`.
    pub ell: u32,
    pub combination: PolyF2,
    /// `rank_{ell-1}` of the combination.
    pub rank: usize,
    pub witness: Witness,
}

impl Violation {
    pub fn lambda_bits(&self, k: usize) -> Vec<bool> {
        (0..k).map(|i| self.lambda >> i & 1 == 1).collect()
    }

    /// Whether `Γ(forms)` reproduces the combination exactly.
    pub fn witness_reconstructs(&self) -> bool {
        let forms = self.witness.forms();
        if forms.len() != self.rank {
            return false;
        }
        let m = self.combination.m();
        match self.witness.gamma().substitute(&forms, m) {
            Ok(g) => g == self.combination,
            Err(_) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegularityCertificate {
    /// Every nonzero combination has rank above `level`.
    Regular {
        level: u64,
    },
    Violation(Violation),
}

impl RegularityCertificate {
    pub fn is_regular(&self) -> bool {
        matches!(self, RegularityCertificate::Regular { .. })
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            RegularityCertificate::Violation(v) => Some(v),
            RegularityCertificate::Regular { .. } => None,
        }
    }
}

fn check_exact_members(polys: &[PolyF2]) -> Result<()> {
    limits::check_combos(polys.len())?;
    if let Some(p) = polys.iter().find(|p| p.degree() > 2) {
        return Err(Error::DegreeTooHigh {
            degree: p.degree(),
            max: 2,
        });
    }
    Ok(())
}

/// Rank of one combination, `None` for a nonconstant combination of
/// degree one (no finite `rank_0`).
fn combination_rank(comb: &PolyF2, ell: u32) -> Result<Option<usize>> {
    if ell <= 1 {
        return Ok(comb.is_constant().then_some(0));
    }
    rank1_bilinear(comb).map(Some)
}

fn better(a: Option<(usize, u64)>, b: Option<(usize, u64)>) -> Option<(usize, u64)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(if (x.0, x.1) <= (y.0, y.1) { x } else { y }),
    }
}

/// Minimum `rank_{ell-1}` over nonzero combinations, with the lowest `λ`
/// (as an integer) among minimisers.
pub fn min_rank_combination(polys: &[PolyF2]) -> Result<Option<(usize, u64)>> {
    check_exact_members(polys)?;
    let k = polys.len();
    if k == 0 {
        return Ok(None);
    }
    let m = polys.iter().map(|p| p.m()).max().unwrap_or(0);
    let quad: u64 = polys
        .iter()
        .enumerate()
        .filter(|(_, p)| p.degree() == 2)
        .fold(0, |a, (i, _)| a | (1 << i));
    let block_bits = k.min(8) as u32;
    let blocks = 1u64 << (k as u32 - block_bits);
    (0..blocks)
        .into_par_iter()
        .map(|hi| -> Result<Option<(usize, u64)>> {
            let base = hi << block_bits;
            let mut acc = polys
                .iter()
                .enumerate()
                .filter(|(i, _)| base >> i & 1 == 1)
                .fold(PolyF2::zero(m), |a, (_, p)| a.add(p));
            let mut gray = 0u64;
            let mut best = None;
            for step in 0..(1u64 << block_bits) {
                if step > 0 {
                    let bit = step.trailing_zeros();
                    gray ^= 1 << bit;
                    acc = acc.add(&polys[bit as usize]);
                }
                let lambda = base | gray;
                if lambda == 0 {
                    continue;
                }
                let ell = if lambda & quad != 0 { 2 } else { 1 };
                if let Some(r) = combination_rank(&acc, ell)? {
                    best = better(best, Some((r, lambda)));
                }
            }
            Ok(best)
        })
        .try_reduce(|| None, |a, b| Ok(better(a, b)))
}

fn violation_for(polys: &[PolyF2], lambda: u64, rank: usize) -> Result<Violation> {
    let m = polys.iter().map(|p| p.m()).max().unwrap_or(0);
    let combination = polys
        .iter()
        .enumerate()
        .filter(|(i, _)| lambda >> i & 1 == 1)
        .fold(PolyF2::zero(m), |a, (_, p)| a.add(p));
    let ell = polys
        .iter()
        .enumerate()
        .filter(|(i, _)| lambda >> i & 1 == 1)
        .map(|(_, p)| p.degree())
        .max()
        .unwrap_or(0);
    let witness = if ell <= 1 {
        Witness::Constant(combination.constant_term())
    } else {
        Witness::Dickson(dickson_decompose(&combination)?)
    };
    let v = Violation {
        lambda,
        ell,
        combination,
        rank,
        witness,
    };
    if !v.witness_reconstructs() {
        return Err(Error::invariant("violation witness does not reconstruct"));
    }
    Ok(v)
}

/// Searches every nonzero combination of `polys` (degrees at most two) for
/// one of rank at most `r`, returning the lowest-rank violation.
pub fn regularity_witness_polys(polys: &[PolyF2], r: u64) -> Result<RegularityCertificate> {
    match min_rank_combination(polys)? {
        Some((rank, lambda)) if rank as u64 <= r => {
            Ok(RegularityCertificate::Violation(violation_for(polys, lambda, rank)?))
        }
        _ => Ok(RegularityCertificate::Regular { level: r }),
    }
}

pub fn regularity_witness(f: &Factor, r: u64) -> Result<RegularityCertificate> {
    regularity_witness_polys(f.members(), r)
}

/// `rank(F)`: the largest `r` with `F` `r`-regular, `None` when unbounded.
pub fn factor_rank(f: &Factor) -> Result<Option<u64>> {
    Ok(min_rank_combination(f.members())?.map(|(r, _)| (r as u64).saturating_sub(1)))
}

/// Verdict from bias alone, for members of any degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeuristicVerdict {
    /// `c_KL(ell, bias) <= r` for this combination, so its rank is at most
    /// `r` relative to the profile.
    Violation {
        lambda: u64,
        ell: u32,
        bias: Rational,
        bound: u64,
    },
    /// No combination is biased enough to certify a violation.
    HeuristicRegular,
}

pub fn heuristic_regularity(f: &Factor, r: u64, profile: &CklProfile) -> Result<HeuristicVerdict> {
    let k = f.dim();
    limits::check_combos(k)?;
    limits::check_vars(f.m())?;
    for lambda in 1..(1u64 << k) {
        let comb = f.combination(lambda);
        let ell = f.combination_degree(lambda);
        let bias = signed_bias(&comb)?;
        let bias = if bias < Rational::from_integer(0.into()) {
            -bias
        } else {
            bias
        };
        if bias > Rational::from_integer(0.into()) {
            let bound = profile.bound(ell, &bias)?;
            if bound <= r {
                return Ok(HeuristicVerdict::Violation {
                    lambda,
                    ell,
                    bias,
                    bound,
                });
            }
        }
    }
    Ok(HeuristicVerdict::HeuristicRegular)
}

/// One refinement: `factor` with a member dropped and the witness forms
/// appended, and `gamma[i]` expressing old member `i + 1` in the new
/// members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub factor: Factor,
    pub dropped: usize,
    pub added: Vec<PolyF2>,
    pub gamma: Vec<PolyF2>,
}

/// Replaces the lowest-index maximal-degree member in the violation's
/// support by the witness forms.
pub fn refine_step(f: &Factor, v: &Violation) -> Result<Refinement> {
    let k = f.dim();
    if v.lambda == 0
        || (k < 64 && v.lambda >> k != 0)
        || f.combination(v.lambda) != v.combination
        || f.combination_degree(v.lambda) != v.ell
        || !v.witness_reconstructs()
        || (v.ell <= 1 && !v.combination.is_constant())
    {
        return Err(Error::NotAViolation);
    }
    let dropped = (0..k)
        .find(|&i| v.lambda >> i & 1 == 1 && f.members()[i].degree() == v.ell)
        .expect("combination degree is attained");
    let added = v.witness.forms();
    let k_new = (k - 1 + added.len()) as u32;
    if k_new > crate::gf2::MAX_VARS {
        return Err(Error::CapExceeded {
            what: "refined factor dimension",
            value: k_new as u64,
            cap: crate::gf2::MAX_VARS as u64,
        });
    }
    let new_index = |j: usize| if j < dropped { j } else { j - 1 };
    let offset = (k - 1) as u32;
    let images: Vec<PolyF2> = (0..added.len() as u32)
        .map(|t| PolyF2::var(offset + t + 1, k_new))
        .collect();
    let mut dropped_expr = v.witness.gamma().substitute(&images, k_new)?;
    for j in (0..k).filter(|&j| j != dropped && v.lambda >> j & 1 == 1) {
        dropped_expr = dropped_expr.add(&PolyF2::var(new_index(j) as u32 + 1, k_new));
    }
    let gamma = (0..k)
        .map(|j| {
            if j == dropped {
                dropped_expr.clone()
            } else {
                PolyF2::var(new_index(j) as u32 + 1, k_new)
            }
        })
        .collect();
    let mut members: Vec<PolyF2> = f
        .members()
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != dropped)
        .map(|(_, p)| p.clone())
        .collect();
    members.extend(added.iter().cloned());
    Ok(Refinement {
        factor: Factor::new(members, f.d())?.widen(f.m())?,
        dropped,
        added,
        gamma,
    })
}

/// Replays `gamma` (original members over current members) on all inputs.
pub fn verify_reconstruction(original: &[PolyF2], gamma: &[PolyF2], current: &[PolyF2], m: u32) -> Result<bool> {
    if original.len() != gamma.len() {
        return Ok(false);
    }
    let tables = current
        .iter()
        .map(|p| truth_table(&p.with_vars(m)?))
        .collect::<Result<Vec<_>>>()?;
    for (p, g) in original.iter().zip(gamma) {
        if compose(g, &tables, m)? != truth_table(&p.with_vars(m)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Composes maps: `outer[i]` over middle variables, `inner[j]` expressing
/// middle variable `j + 1` over `m_out` variables.
pub(crate) fn compose_maps(outer: &[PolyF2], inner: &[PolyF2], m_out: u32) -> Result<Vec<PolyF2>> {
    outer.iter().map(|g| g.substitute(inner, m_out)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefineRecord {
    pub level: u64,
    pub lambda: u64,
    pub ell: u32,
    pub rank: usize,
    pub combination: PolyF2,
    pub dropped: usize,
    pub dropped_poly: PolyF2,
    pub added: Vec<PolyF2>,
    pub dim_before: Vec<u64>,
    pub dim_after: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regularization {
    pub factor: Factor,
    /// Original members over the final members.
    pub gamma: Vec<PolyF2>,
    pub steps: Vec<RefineRecord>,
    pub psi_bound: PsiOutcome,
    /// `dim <= ψ*`, or `None` when only a smaller lower bound on ψ* was
    /// reached within budget.
    pub within_bound: Option<bool>,
}

pub const PSI_CHECK_BUDGET: u64 = 1_000_000;

/// Refines `f` until it is `f(K)`-regular.
pub fn regularize(f: &Factor, growth: &GrowthFn) -> Result<Regularization> {
    let k0 = f.dim();
    let mut current = f.clone();
    let mut gamma: Vec<PolyF2> = (1..=k0 as u32).map(|i| PolyF2::var(i, k0 as u32)).collect();
    let mut steps = Vec::new();
    loop {
        let level = growth.eval(current.dim() as u64)?;
        let cert = regularity_witness(&current, level)?;
        let Some(v) = cert.violation() else { break };
        let step = refine_step(&current, v)?;
        let dim_before = current.dim_vector();
        let dim_after = step.factor.dim_vector();
        if invlex_compare(&dim_after, &dim_before)? != Ordering::Less {
            return Err(Error::invariant("refinement did not decrease the dimension vector"));
        }
        gamma = compose_maps(&gamma, &step.gamma, step.factor.dim() as u32)?;
        steps.push(RefineRecord {
            level,
            lambda: v.lambda,
            ell: v.ell,
            rank: v.rank,
            combination: v.combination.clone(),
            dropped: step.dropped,
            dropped_poly: current.members()[step.dropped].clone(),
            added: step.added.clone(),
            dim_before,
            dim_after,
        });
        current = step.factor;
    }
    let psi_bound = psi_star_bounded(f.d() as usize, growth, k0 as u64, PSI_CHECK_BUDGET)?;
    let dim = num_bigint::BigUint::from(current.dim());
    let within_bound = if psi_bound.complete {
        if dim > psi_bound.value {
            return Err(Error::invariant("regularized dimension exceeds psi*"));
        }
        Some(true)
    } else {
        (dim <= psi_bound.value).then_some(true)
    };
    Ok(Regularization {
        factor: current,
        gamma,
        steps,
        psi_bound,
        within_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PolyF2 {
        PolyF2::parse(s, None).unwrap()
    }

    fn factor(ss: &[&str]) -> Factor {
        Factor::from_polys(ss.iter().map(|s| p(s)).collect()).unwrap()
    }

    #[test]
    fn witness_examples() {
        let f = factor(&["x1*x2", "x3*x4"]);
        assert!(regularity_witness(&f, 1).unwrap().is_regular());
        let v = regularity_witness(&f, 3).unwrap().violation().cloned().unwrap();
        assert_eq!((v.lambda, v.rank), (0b01, 2));

        let f = factor(&["x1*x2", "x1*x2 + x5"]);
        let cert = regularity_witness(&f, 2).unwrap();
        let v = cert.violation().unwrap();
        assert_eq!(v.lambda_bits(2), vec![true, true]);
        assert_eq!(v.combination, p("x5").with_vars(5).unwrap());
        assert_eq!(v.rank, 1);

        let f = factor(&["x1", "x2", "x1 + x2"]);
        let v = regularity_witness(&f, 0).unwrap().violation().cloned().unwrap();
        assert_eq!(v.lambda, 0b111);
        assert_eq!(v.witness, Witness::Constant(false));
    }

    #[test]
    fn refine_examples() {
        let f = factor(&["x1*x2", "x1*x2 + x5"]);
        let v = regularity_witness(&f, 2).unwrap().violation().cloned().unwrap();
        let r = refine_step(&f, &v).unwrap();
        assert_eq!(r.dropped, 0);
        let names: Vec<String> = r.factor.members().iter().map(|p| p.to_string()).collect();
        assert_eq!(names, vec!["x1*x2 + x5", "x5"]);
        assert!(verify_reconstruction(f.members(), &r.gamma, r.factor.members(), 5).unwrap());

        let f = factor(&["x1*x2 + x3*x4"]);
        let v = regularity_witness(&f, 4).unwrap().violation().cloned().unwrap();
        let r = refine_step(&f, &v).unwrap();
        let names: Vec<String> = r.factor.members().iter().map(|p| p.to_string()).collect();
        assert_eq!(names, vec!["x1", "x2", "x3", "x4"]);
        assert!(verify_reconstruction(f.members(), &r.gamma, r.factor.members(), 4).unwrap());

        let f = factor(&["x1", "x2", "x1 + x2 + 1"]);
        let v = regularity_witness(&f, 0).unwrap().violation().cloned().unwrap();
        let r = refine_step(&f, &v).unwrap();
        assert!(r.added.is_empty());
        assert_eq!(r.factor.dim(), 2);
        assert!(verify_reconstruction(f.members(), &r.gamma, r.factor.members(), 2).unwrap());
    }

    #[test]
    fn refine_rejects_non_violation() {
        let f = factor(&["x1*x2", "x3"]);
        let mut v = regularity_witness(&factor(&["x1*x2", "x1*x2 + x5"]), 2)
            .unwrap()
            .violation()
            .cloned()
            .unwrap();
        v.combination = p("x3");
        assert!(matches!(refine_step(&f, &v), Err(Error::NotAViolation)));
    }

    #[test]
    fn regularize_examples() {
        let f = factor(&["x1", "x2"]);
        let out = regularize(&f, &GrowthFn::Identity).unwrap();
        assert!(out.steps.is_empty());
        assert_eq!(out.factor, f);

        let f = factor(&["x1*x2 + x3", "x1*x2 + x4"]);
        let out = regularize(&f, &GrowthFn::Identity).unwrap();
        assert_eq!(out.steps[0].lambda, 0b11);
        let level = GrowthFn::Identity.eval(out.factor.dim() as u64).unwrap();
        assert!(regularity_witness(&out.factor, level).unwrap().is_regular());
        assert_eq!(out.within_bound, Some(true));
        assert!(verify_reconstruction(f.members(), &out.gamma, out.factor.members(), f.m()).unwrap());
    }

    #[test]
    fn cubic_members_rejected_in_exact_mode() {
        let f = Factor::new(vec![p("x1*x2*x3")], 3).unwrap();
        assert!(matches!(regularity_witness(&f, 1), Err(Error::DegreeTooHigh { .. })));
        let verdict = heuristic_regularity(&f, 0, &CklProfile::new(1)).unwrap();
        assert_eq!(verdict, HeuristicVerdict::HeuristicRegular);
        let verdict = heuristic_regularity(&f, 16, &CklProfile::new(1)).unwrap();
        assert!(matches!(verdict, HeuristicVerdict::Violation { lambda: 1, .. }));
    }
}
