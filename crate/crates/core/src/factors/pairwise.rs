//! Sunflower pairwise regularization for collections of factors whose
//! members have degree at most two. Factors are treated as sets.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::{common_vars, PolyF2};

use super::factor::{dim_vector_of, invlex_compare, Factor};
use super::growth::{psi_star_bounded, GrowthFn, PsiOutcome};
use super::regularity::{
    compose_maps, regularity_witness_polys, verify_reconstruction, RegularityCertificate, Violation,
};

const DEGREE: u32 = 2;
const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// The core was refined in every factor.
    CoreRefined,
    /// Irregular factors were kept and refined individually.
    IrregularRefined,
    /// Factors around a high-degree vertex were moved toward the core.
    Collapsed,
    /// An independent set of the irregularity graph was returned.
    Terminated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseStep {
    pub case: Case,
    pub n_before: usize,
    pub n_after: usize,
    pub locality: usize,
    /// Collection state `(Δ, N_0, N_i)` before and after.
    pub state_before: Vec<u64>,
    pub state_after: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseOutcome {
    pub m: u32,
    /// Original indices (0-based) of the surviving factors.
    pub survivors: Vec<usize>,
    pub core: Vec<PolyF2>,
    /// `G_i` as sorted sets, one per survivor.
    pub factors: Vec<Vec<PolyF2>>,
    pub petals: Vec<Vec<PolyF2>>,
    /// Members of the original factor over the members of `G_i`.
    pub maps: Vec<Vec<PolyF2>>,
    pub steps: Vec<PairwiseStep>,
    pub initial_locality: usize,
    pub target: usize,
}

impl PairwiseOutcome {
    pub fn meets_target(&self) -> bool {
        self.survivors.len() >= self.target
    }
}

#[derive(Debug, Clone)]
struct Member {
    orig: usize,
    set: Vec<PolyF2>,
    gamma: Vec<PolyF2>,
}

/// `H = gamma(args)` with every argument present in the refined set.
struct Rewrite {
    remove: PolyF2,
    add: Vec<PolyF2>,
    gamma: PolyF2,
    args: Vec<PolyF2>,
}

fn normalize(mut set: Vec<PolyF2>) -> Vec<PolyF2> {
    set.sort();
    set.dedup();
    set
}

fn apply(member: &mut Member, rw: &Rewrite) -> Result<()> {
    let mut set: Vec<PolyF2> = member.set.iter().filter(|p| **p != rw.remove).cloned().collect();
    set.extend(rw.add.iter().cloned());
    let set = normalize(set);
    let k_new = set.len() as u32;
    let index = |p: &PolyF2| -> Result<u32> {
        set.binary_search(p)
            .map(|i| i as u32 + 1)
            .map_err(|_| Error::invariant("rewrite argument missing from refined factor"))
    };
    let arg_vars = rw
        .args
        .iter()
        .map(|a| Ok(PolyF2::var(index(a)?, k_new)))
        .collect::<Result<Vec<_>>>()?;
    let sigma = member
        .set
        .iter()
        .map(|p| {
            if *p == rw.remove {
                rw.gamma.substitute(&arg_vars, k_new)
            } else {
                Ok(PolyF2::var(index(p)?, k_new))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    member.gamma = compose_maps(&member.gamma, &sigma, k_new)?;
    member.set = set;
    Ok(())
}

fn core_of(members: &[Member]) -> Vec<PolyF2> {
    let Some(first) = members.first() else {
        return Vec::new();
    };
    first
        .set
        .iter()
        .filter(|p| members.iter().all(|mb| mb.set.binary_search(p).is_ok()))
        .cloned()
        .collect()
}

fn locality(members: &[Member]) -> usize {
    members.iter().map(|mb| mb.set.len()).max().unwrap_or(0)
}

/// `(Δ_i, N_0, N_i)` for one member.
fn member_state(mb: &Member, core: &[PolyF2], k: usize) -> Vec<u64> {
    let petal: Vec<PolyF2> = mb
        .set
        .iter()
        .filter(|p| core.binary_search(p).is_err())
        .cloned()
        .collect();
    let mut s = vec![(k - mb.set.len()) as u64];
    s.extend(dim_vector_of(core, DEGREE));
    s.extend(dim_vector_of(&petal, DEGREE));
    s
}

fn collection_state(members: &[Member]) -> Vec<u64> {
    let core = core_of(members);
    let k = locality(members);
    members
        .iter()
        .map(|mb| member_state(mb, &core, k))
        .max_by(|a, b| invlex_compare(a, b).expect("equal lengths"))
        .unwrap_or_else(|| vec![0; 2 * DEGREE as usize + 1])
}

fn selected<'a>(polys: &'a [PolyF2], lambda: u64, offset: usize) -> impl Iterator<Item = (usize, &'a PolyF2)> + 'a {
    polys
        .iter()
        .enumerate()
        .filter(move |(i, _)| lambda >> (i + offset) & 1 == 1)
}

/// Rewrite removing the lowest selected member of degree `ell` accepted by
/// `eligible`: `H = Γ_witness(forms) + Σ other selected members`.
fn rewrite_from_violation(polys: &[PolyF2], v: &Violation, eligible: impl Fn(&PolyF2) -> bool) -> Result<Rewrite> {
    let (h_idx, h) = selected(polys, v.lambda, 0)
        .find(|(_, p)| p.degree() == v.ell && eligible(p))
        .ok_or_else(|| Error::invariant("no eligible member of maximal degree in the violation"))?;
    let forms = v.witness.forms();
    let others: Vec<PolyF2> = selected(polys, v.lambda, 0)
        .filter(|(i, _)| *i != h_idx)
        .map(|(_, p)| p.clone())
        .collect();
    let rho = forms.len() as u32;
    let total = rho + others.len() as u32;
    let mut gamma = v
        .witness
        .gamma()
        .substitute(&(1..=rho).map(|i| PolyF2::var(i, total)).collect::<Vec<_>>(), total)?;
    for t in 0..others.len() as u32 {
        gamma = gamma.add(&PolyF2::var(rho + t + 1, total));
    }
    let mut args = forms.clone();
    args.extend(others);
    Ok(Rewrite {
        remove: h.clone(),
        add: forms,
        gamma,
        args,
    })
}

fn witness(polys: &[PolyF2], level: u64) -> Result<Option<Violation>> {
    Ok(match regularity_witness_polys(polys, level)? {
        RegularityCertificate::Violation(v) => Some(v),
        RegularityCertificate::Regular { .. } => None,
    })
}

/// `G_u` followed by the petal of `G_v`; shared petal members stay
/// duplicated so they show up as dependencies.
fn oriented_union(u: &Member, v: &Member, core: &[PolyF2]) -> Vec<PolyF2> {
    let mut out = u.set.clone();
    out.extend(v.set.iter().filter(|p| core.binary_search(p).is_err()).cloned());
    out
}

fn greedy_independent_set(adj: &[Vec<bool>]) -> Vec<usize> {
    let n = adj.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (adj[i].iter().filter(|&&e| e).count(), i));
    let mut chosen: Vec<usize> = Vec::new();
    for i in order {
        if chosen.iter().all(|&j| !adj[i][j]) {
            chosen.push(i);
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Runs the three-case loop until an independent set of the irregularity
/// graph is found. `target` is only reported against.
pub fn pairwise_sunflower_regularize(fs: &[Factor], f: &GrowthFn, target: usize) -> Result<PairwiseOutcome> {
    if fs.len() > 10_000 {
        return Err(Error::CapExceeded {
            what: "number of factors",
            value: fs.len() as u64,
            cap: 10_000,
        });
    }
    if let Some(bad) = fs.iter().find(|g| g.members().iter().any(|p| p.degree() > DEGREE)) {
        let deg = bad.members().iter().map(|p| p.degree()).max().unwrap_or(0);
        return Err(Error::DegreeTooHigh {
            degree: deg,
            max: DEGREE,
        });
    }
    if let Some(big) = fs.iter().find(|g| g.dim() > 8) {
        return Err(Error::CapExceeded {
            what: "factor dimension",
            value: big.dim() as u64,
            cap: 8,
        });
    }
    let all: Vec<PolyF2> = fs.iter().flat_map(|g| g.members().iter().cloned()).collect();
    let m = common_vars(&all).0;
    let mut members = fs
        .iter()
        .enumerate()
        .map(|(orig, g)| -> Result<Member> {
            let originals = g.widen(m.max(g.m()))?.members().to_vec();
            let set = normalize(originals.clone());
            let k = set.len() as u32;
            let gamma = originals
                .iter()
                .map(|p| PolyF2::var(set.binary_search(p).expect("present") as u32 + 1, k))
                .collect();
            Ok(Member { orig, set, gamma })
        })
        .collect::<Result<Vec<_>>>()?;
    let initial_locality = locality(&members);
    let mut steps = Vec::new();

    for _ in 0..MAX_ITERATIONS {
        let n = members.len();
        let k = locality(&members);
        let state_before = collection_state(&members);
        let f2k = f.eval(2 * k as u64)?;
        let core = core_of(&members);

        let (case, next) = if let Some(v) = witness(&core, f2k + 2)? {
            let rw = rewrite_from_violation(&core, &v, |_| true)?;
            let mut next = members.clone();
            for mb in &mut next {
                apply(mb, &rw)?;
            }
            (Case::CoreRefined, next)
        } else {
            let certs = members
                .par_iter()
                .map(|mb| witness(&mb.set, f2k + 1))
                .collect::<Result<Vec<_>>>()?;
            let irregular = certs.iter().filter(|c| c.is_some()).count();
            if irregular > 0 && 2 * irregular >= n {
                let mut next = Vec::new();
                for (mb, cert) in members.iter().zip(&certs) {
                    let Some(v) = cert else { continue };
                    let rw = rewrite_from_violation(&mb.set, v, |p| core.binary_search(p).is_err())?;
                    let mut mb = mb.clone();
                    apply(&mut mb, &rw)?;
                    next.push(mb);
                }
                (Case::IrregularRefined, next)
            } else {
                let kept: Vec<Member> = members
                    .iter()
                    .zip(&certs)
                    .filter(|(_, c)| c.is_none())
                    .map(|(mb, _)| mb.clone())
                    .collect();
                let np = kept.len();
                let pairs: Vec<(usize, usize)> = (0..np).flat_map(|i| (i + 1..np).map(move |j| (i, j))).collect();
                let edges = pairs
                    .par_iter()
                    .map(|&(i, j)| Ok(witness(&oriented_union(&kept[i], &kept[j], &core), f2k)?.is_some()))
                    .collect::<Result<Vec<bool>>>()?;
                let mut adj = vec![vec![false; np]; np];
                for (&(i, j), &e) in pairs.iter().zip(&edges) {
                    adj[i][j] = e;
                    adj[j][i] = e;
                }
                let indep = greedy_independent_set(&adj);
                if indep.len() >= (np as f64).sqrt().floor() as usize {
                    let next: Vec<Member> = indep.iter().map(|&i| kept[i].clone()).collect();
                    let state_after = collection_state(&next);
                    steps.push(PairwiseStep {
                        case: Case::Terminated,
                        n_before: n,
                        n_after: next.len(),
                        locality: k,
                        state_before,
                        state_after,
                    });
                    return finish(m, next, steps, initial_locality, target);
                }
                (Case::Collapsed, collapse(&kept, &adj, &core, f2k)?)
            }
        };

        let state_after = collection_state(&next);
        if invlex_compare(&state_after, &state_before)? != Ordering::Less {
            return Err(Error::invariant("collection state did not decrease"));
        }
        steps.push(PairwiseStep {
            case,
            n_before: n,
            n_after: next.len(),
            locality: k,
            state_before,
            state_after,
        });
        members = next;
    }
    Err(Error::BudgetExceeded(MAX_ITERATIONS as u64))
}

/// Picks a maximum-degree vertex `w`, groups its edges by the part of the
/// violating combination that lives in `span(G_w)`, and rewrites the largest
/// group so that this common polynomial joins the core.
fn collapse(kept: &[Member], adj: &[Vec<bool>], core: &[PolyF2], f2k: u64) -> Result<Vec<Member>> {
    let degree = |i: usize| adj[i].iter().filter(|&&e| e).count();
    let w = (0..kept.len())
        .max_by(|&a, &b| degree(a).cmp(&degree(b)).then(b.cmp(&a)))
        .expect("nonempty graph");
    let kw = kept[w].set.len();
    let mut buckets: BTreeMap<PolyF2, Vec<(usize, Violation)>> = BTreeMap::new();
    let mut first_seen: Vec<PolyF2> = Vec::new();
    for v in (0..kept.len()).filter(|&v| adj[w][v]) {
        let union = oriented_union(&kept[w], &kept[v], core);
        let viol = witness(&union, f2k)?.ok_or_else(|| Error::invariant("edge without violation"))?;
        let label = selected(&union[..kw], viol.lambda, 0).fold(PolyF2::zero(union[0].m()), |a, (_, p)| a.add(p));
        if label.is_constant() || viol.lambda >> kw == 0 {
            return Err(Error::invariant("edge label confined to one side"));
        }
        if !buckets.contains_key(&label) {
            first_seen.push(label.clone());
        }
        buckets.entry(label).or_default().push((v, viol));
    }
    let best = first_seen
        .iter()
        .max_by(|a, b| buckets[*a].len().cmp(&buckets[*b].len()).then(Ordering::Greater))
        .expect("w has an edge")
        .clone();
    let r1 = best.clone();
    let group = &buckets[&best];

    let mut next = Vec::with_capacity(group.len() + 1);
    // w itself: H_w = R_1 + Σ other selected members of G_w.
    {
        let (_, viol) = &group[0];
        let union = oriented_union(&kept[w], &kept[group[0].0], core);
        let part = &union[..kw];
        let (h_idx, h) = selected(part, viol.lambda, 0)
            .find(|(_, p)| p.degree() == viol.ell && core.binary_search(p).is_err())
            .ok_or_else(|| Error::invariant("label has no petal member of maximal degree"))?;
        let others: Vec<PolyF2> = selected(part, viol.lambda, 0)
            .filter(|(i, _)| *i != h_idx)
            .map(|(_, p)| p.clone())
            .collect();
        let total = 1 + others.len() as u32;
        let gamma = (1..=total).fold(PolyF2::zero(total), |a, i| a.add(&PolyF2::var(i, total)));
        let mut args = vec![r1.clone()];
        args.extend(others);
        let mut mb = kept[w].clone();
        apply(
            &mut mb,
            &Rewrite {
                remove: h.clone(),
                add: vec![r1.clone()],
                gamma,
                args,
            },
        )?;
        next.push(mb);
    }
    for (v, viol) in group {
        // R_v = R_1 + Γ_v(forms), H_v = R_v + Σ other selected petal members.
        let union = oriented_union(&kept[w], &kept[*v], core);
        let petal = &union[kw..];
        let (h_idx, h) = selected(petal, viol.lambda, kw)
            .find(|(_, p)| p.degree() == viol.ell)
            .ok_or_else(|| Error::invariant("neighbour has no petal member of maximal degree"))?;
        let others: Vec<PolyF2> = selected(petal, viol.lambda, kw)
            .filter(|(i, _)| *i != h_idx)
            .map(|(_, p)| p.clone())
            .collect();
        let forms = viol.witness.forms();
        let rho = forms.len() as u32;
        let total = 1 + rho + others.len() as u32;
        let mut gamma = PolyF2::var(1, total);
        gamma = gamma.add(
            &viol
                .witness
                .gamma()
                .substitute(&(2..=rho + 1).map(|i| PolyF2::var(i, total)).collect::<Vec<_>>(), total)?,
        );
        for t in 0..others.len() as u32 {
            gamma = gamma.add(&PolyF2::var(rho + 2 + t, total));
        }
        let mut args = vec![r1.clone()];
        args.extend(forms.iter().cloned());
        args.extend(others);
        let mut add = vec![r1.clone()];
        add.extend(forms);
        let mut mb = kept[*v].clone();
        apply(
            &mut mb,
            &Rewrite {
                remove: h.clone(),
                add,
                gamma,
                args,
            },
        )?;
        next.push(mb);
    }
    next.sort_by_key(|mb| mb.orig);
    Ok(next)
}

fn finish(
    m: u32,
    members: Vec<Member>,
    steps: Vec<PairwiseStep>,
    initial_locality: usize,
    target: usize,
) -> Result<PairwiseOutcome> {
    let core = core_of(&members);
    let petals = members
        .iter()
        .map(|mb| {
            mb.set
                .iter()
                .filter(|p| core.binary_search(p).is_err())
                .cloned()
                .collect()
        })
        .collect();
    Ok(PairwiseOutcome {
        m,
        survivors: members.iter().map(|mb| mb.orig).collect(),
        core,
        factors: members.iter().map(|mb| mb.set.clone()).collect(),
        petals,
        maps: members.iter().map(|mb| mb.gamma.clone()).collect(),
        steps,
        initial_locality,
        target,
    })
}

/// Independent re-verification of the four guarantees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseChecks {
    pub refinement: bool,
    pub locality: bool,
    pub locality_bound: PsiOutcome,
    pub pairwise_regular: bool,
    pub sunflower: bool,
}

impl PairwiseChecks {
    pub fn all(&self) -> bool {
        self.refinement && self.locality && self.pairwise_regular && self.sunflower
    }
}

pub const LOCALITY_PSI_BUDGET: u64 = 100_000;

pub fn verify_pairwise(fs: &[Factor], f: &GrowthFn, out: &PairwiseOutcome) -> Result<PairwiseChecks> {
    let m = out.m;
    let mut refinement = out.factors.len() == out.survivors.len() && out.maps.len() == out.survivors.len();
    for ((&orig, g), map) in out.survivors.iter().zip(&out.factors).zip(&out.maps) {
        let original = fs[orig].widen(m.max(fs[orig].m()))?;
        refinement &= verify_reconstruction(original.members(), map, g, m)?;
    }

    let f_inner = f.clone();
    let g = GrowthFn::custom("f(2r)+2", move |r| {
        f_inner
            .eval(r.saturating_mul(2))
            .map(|v| v.saturating_add(2))
            .unwrap_or(u64::MAX)
    });
    let k0 = fs.iter().map(|x| x.dim()).max().unwrap_or(0) as u64;
    let locality_bound = psi_star_bounded(2 * DEGREE as usize + 1, &g, k0, LOCALITY_PSI_BUDGET)?;
    let locality = out
        .factors
        .iter()
        .all(|gi| BigUint::from(gi.len()) <= locality_bound.value);

    let w = out.factors.len();
    let mut pairwise_regular = true;
    for i in 0..w {
        for j in i..w {
            let union = normalize(out.factors[i].iter().chain(&out.factors[j]).cloned().collect());
            let level = f.eval(union.len() as u64)?;
            pairwise_regular &= regularity_witness_polys(&union, level)?.is_regular();
        }
    }

    let core = normalize(
        out.factors
            .first()
            .map(|g0| {
                g0.iter()
                    .filter(|p| out.factors.iter().all(|gi| gi.contains(p)))
                    .cloned()
                    .collect()
            })
            .unwrap_or_default(),
    );
    let mut sunflower = true;
    for i in 0..w {
        for j in i + 1..w {
            let inter: Vec<PolyF2> = out.factors[i]
                .iter()
                .filter(|p| out.factors[j].contains(p))
                .cloned()
                .collect();
            sunflower &= normalize(inter) == core;
        }
    }
    Ok(PairwiseChecks {
        refinement,
        locality,
        locality_bound,
        pairwise_regular,
        sunflower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factor(ss: &[&str], m: u32) -> Factor {
        Factor::from_polys(ss.iter().map(|s| PolyF2::parse(s, Some(m)).unwrap()).collect()).unwrap()
    }

    #[test]
    fn disjoint_singletons_all_survive() {
        let fs: Vec<Factor> = (0..4)
            .map(|i| {
                factor(
                    &[&format!(
                        "x{}*x{} + x{}*x{}",
                        4 * i + 1,
                        4 * i + 2,
                        4 * i + 3,
                        4 * i + 4
                    )],
                    16,
                )
            })
            .collect();
        let f = GrowthFn::Identity;
        let out = pairwise_sunflower_regularize(&fs, &f, 4).unwrap();
        assert_eq!(out.survivors, vec![0, 1, 2, 3]);
        assert!(out.core.is_empty());
        assert!(verify_pairwise(&fs, &f, &out).unwrap().all());
    }

    #[test]
    fn repeated_factor_collapses() {
        let fs: Vec<Factor> = (0..4).map(|_| factor(&["x1*x2"], 2)).collect();
        let f = GrowthFn::Identity;
        let out = pairwise_sunflower_regularize(&fs, &f, 1).unwrap();
        let checks = verify_pairwise(&fs, &f, &out).unwrap();
        assert!(checks.all(), "{checks:?}");
        assert!(out.petals.iter().all(|p| p.iter().all(|q| q.degree() <= 1)));
    }

    #[test]
    fn shared_petal_creates_edge() {
        let fs = vec![
            factor(&["x1*x2 + x3*x4 + x5*x6", "x7*x8 + x9*x10 + x11*x12"], 16),
            factor(&["x7*x8 + x9*x10 + x11*x12", "x13*x14 + x15*x16"], 16),
        ];
        let f = GrowthFn::Identity;
        let out = pairwise_sunflower_regularize(&fs, &f, 1).unwrap();
        assert!(verify_pairwise(&fs, &f, &out).unwrap().all());
    }

    #[test]
    fn mixed_quadratics_are_independent() {
        let fs: Vec<Factor> = (1..=4)
            .map(|i| factor(&[&format!("x1*x2 + x{}*x{}", 2 * i + 1, 2 * i + 2)], 10))
            .collect();
        let f = GrowthFn::Identity;
        let out = pairwise_sunflower_regularize(&fs, &f, 2).unwrap();
        assert_eq!(out.survivors, vec![0, 1, 2, 3]);
        assert_eq!(out.steps.last().unwrap().case, Case::Terminated);
        assert!(verify_pairwise(&fs, &f, &out).unwrap().all());
    }

    #[test]
    fn repeated_factor_trace() {
        let fs: Vec<Factor> = (0..4).map(|_| factor(&["x1*x2"], 2)).collect();
        let out = pairwise_sunflower_regularize(&fs, &GrowthFn::Identity, 1).unwrap();
        for s in out.steps.iter().filter(|s| s.case != Case::Terminated) {
            assert_eq!(invlex_compare(&s.state_after, &s.state_before).unwrap(), Ordering::Less);
        }
        assert!(out.steps.iter().any(|s| s.case != Case::Terminated));
    }
}
