//! Verification suites: each check recomputes a known value or a theorem's
//! inequality exactly on fixed or seeded instances.

use std::collections::HashSet;
use std::time::Instant;

use f2lab_core::dist::{
    chebyshev_audit, conditioning_check, convex_combination_check, covariance_pair, fixing_check, joint_distribution,
    variety_density, Pmf,
};
use f2lab_core::factors::{
    greedy_independent_support, invlex_compare, pairwise_sunflower_regularize, psi, psi_bounded, regularity_witness,
    regularize, regularize_rank21, verify_pairwise, verify_reconstruction, Factor, GrowthFn,
};
use f2lab_core::gap::{delta_2r_bound, dyadic_proximity, min_gap_scan, min_gap_scan_tables, one_third_gap};
use f2lab_core::gf2::{common_vars, compose, truth_table, PolyF2, TruthTable};
use f2lab_core::quadratic::{bias_quadratic, dickson_decompose, rank1_quadratic};
use f2lab_core::rational::{format, is_dyadic, ratio, Rational};
use f2lab_core::spectral::{dependency_space, pr_one, signed_bias, vazirani_check};
use f2lab_core::subspace::{find_sunflower, sunflower_threshold, validate_sunflower, Subspace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Gaps,
    Lemmas,
    Chebyshev,
    Regularize,
    Sunflower,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Gaps => "gaps",
            Suite::Lemmas => "lemmas",
            Suite::Chebyshev => "chebyshev",
            Suite::Regularize => "regularize",
            Suite::Sunflower => "sunflower",
            Suite::All => "all",
        }
    }
}

type CheckResult = Result<(bool, String), f2lab_core::Error>;

pub struct Check {
    suite: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
    seconds: f64,
}

pub struct VerifyReport {
    suite: Suite,
    seed: u64,
    instances: usize,
    checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn into_report(self) -> Report {
        let mut text = String::new();
        for c in &self.checks {
            text.push_str(&format!(
                "{} {}/{}: {} ({:.2}s)\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                c.detail,
                c.seconds
            ));
        }
        let failed = self.failures();
        text.push_str(&format!(
            "{} of {} checks passed\n",
            self.checks.len() - failed,
            self.checks.len()
        ));
        // Timings vary between runs, so they stay out of the JSON document.
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({ "suite": c.suite, "name": c.name, "pass": c.pass, "detail": c.detail }))
            .collect();
        let doc = json!({
            "suite": self.suite.name(),
            "seed": self.seed,
            "instances": self.instances,
            "passed": self.checks.len() - failed,
            "failed": failed,
            "checks": checks,
        });
        Report::new("verify", doc).with_text(text)
    }
}

struct Runner {
    seed: u64,
    n: usize,
    checks: Vec<Check>,
}

impl Runner {
    fn check(&mut self, suite: &'static str, name: &'static str, f: impl FnOnce(&mut Ctx) -> CheckResult) {
        // Every check gets its own stream so suites can run in any combination.
        let salt = name
            .bytes()
            .fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3));
        let mut ctx = Ctx {
            rng: ChaCha8Rng::seed_from_u64(self.seed ^ salt),
            n: self.n,
        };
        let start = Instant::now();
        let (pass, detail) = f(&mut ctx).unwrap_or_else(|e| (false, format!("error: {e}")));
        self.checks.push(Check {
            suite,
            name,
            pass,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
}

struct Ctx {
    rng: ChaCha8Rng,
    n: usize,
}

impl Ctx {
    fn poly(&mut self, m: u32, d: u32, density: f64) -> PolyF2 {
        let rng = &mut self.rng;
        let masks: Vec<u64> = (0..1u64 << m)
            .filter(|x| x.count_ones() <= d && rng.gen_bool(density))
            .collect();
        PolyF2::from_masks(m, masks).expect("masks fit in m variables")
    }

    fn linear(&mut self, m: u32) -> PolyF2 {
        let mask = self.rng.gen_range(1..1u64 << m);
        PolyF2::affine(m, mask, false)
    }

    /// Sum of `pairs` products of random linear forms plus a random affine part.
    fn low_rank_quadratic(&mut self, m: u32, pairs: usize) -> PolyF2 {
        let mut q = PolyF2::zero(m);
        for _ in 0..pairs {
            let (a, b) = (self.linear(m), self.linear(m));
            q = q.add(&a.mul(&b));
        }
        let tail = self.rng.gen_range(0..1u64 << m);
        let c = self.rng.gen_bool(0.5);
        q.add(&PolyF2::affine(m, tail, c))
    }

    fn weights(&mut self, k: usize) -> Vec<Rational> {
        let raw: Vec<i64> = (0..k).map(|_| self.rng.gen_range(1..8)).collect();
        let total: i64 = raw.iter().sum();
        raw.iter().map(|&w| ratio(w, total)).collect()
    }
}

fn verdict(bad: usize, detail: String) -> CheckResult {
    Ok((bad == 0, detail))
}

pub fn run(suite: Suite, instances: usize, seed: u64) -> Result<VerifyReport, CliError> {
    let mut r = Runner {
        seed,
        n: instances,
        checks: Vec::new(),
    };
    let all = suite == Suite::All;
    if all || suite == Suite::Gaps {
        gaps(&mut r);
    }
    if all || suite == Suite::Lemmas {
        lemmas(&mut r);
    }
    if all || suite == Suite::Chebyshev {
        chebyshev(&mut r);
    }
    if all || suite == Suite::Regularize {
        regularization(&mut r);
    }
    if all || suite == Suite::Sunflower {
        sunflowers(&mut r);
    }
    Ok(VerifyReport {
        suite,
        seed,
        instances,
        checks: r.checks,
    })
}

/// Polynomial, Pr[P = 1] and distance to 1/3.
type Golden = (&'static str, (i64, i64), (i64, i64));

const GOLDEN: [Golden; 5] = [
    ("x1*x2", (1, 4), (1, 12)),
    ("x1*x2 + x3*x4*x5", (5, 16), (1, 48)),
    ("x1*x2 + x3*x4", (3, 8), (1, 24)),
    ("x1*x2 + x3*x4*x5 + x3*x6*x7", (11, 32), (1, 96)),
    ("x1*x2*x3 + x1*x4 + x4*x5*x6 + x7*x8*x9", (43, 128), (1, 384)),
];

fn gaps(r: &mut Runner) {
    r.check("gaps", "golden_probabilities", |_| {
        let mut bad = Vec::new();
        for (s, pr, gap) in GOLDEN {
            let p = PolyF2::parse(s, None)?;
            let (got_pr, got_gap) = (pr_one(&p)?, one_third_gap(&p)?);
            if got_pr != ratio(pr.0, pr.1) || got_gap != ratio(gap.0, gap.1) {
                bad.push(format!("{s}: Pr={} gap={}", format(&got_pr), format(&got_gap)));
            }
        }
        let detail = if bad.is_empty() {
            "Pr[P=1] = 1/4, 5/16, 3/8, 11/32, 43/128; gaps 1/12, 1/48, 1/24, 1/96, 1/384".to_string()
        } else {
            bad.join("; ")
        };
        verdict(bad.len(), detail)
    });
    r.check("gaps", "delta_1", |_| {
        let s = min_gap_scan(1, 3, &ratio(1, 3))?;
        Ok((
            s.min_gap == ratio(1, 6),
            format!(
                "min gap over {} affine functions on 3 variables = {}",
                s.polys,
                format(&s.min_gap)
            ),
        ))
    });
    r.check("gaps", "delta_2", |_| {
        let s = min_gap_scan(2, 4, &ratio(1, 3))?;
        Ok((
            s.min_gap == ratio(1, 24) && s.polys == 2048,
            format!(
                "min gap over {} quadratics on 4 variables = {} (witness {})",
                s.polys,
                format(&s.min_gap),
                s.witness
            ),
        ))
    });
    r.check("gaps", "scan_paths_agree", |_| {
        let third = ratio(1, 3);
        let (a, b) = (min_gap_scan(2, 4, &third)?, min_gap_scan_tables(2, 4, &third)?);
        let dyadic = a.census.keys().all(is_dyadic);
        Ok((
            a.census == b.census && a.min_gap == b.min_gap && dyadic,
            format!(
                "{} distinct probabilities, closed form and truth tables agree, all dyadic: {dyadic}",
                a.census.len()
            ),
        ))
    });
    r.check("gaps", "dickson_cross_oracle", |_| {
        let monos: Vec<u64> = (0..16u64).filter(|x| x.count_ones() <= 2).collect();
        let mut bad = 0;
        for idx in 0..1u64 << monos.len() {
            let q = PolyF2::from_masks(4, (0..monos.len()).filter(|b| idx >> b & 1 == 1).map(|b| monos[b]))?;
            let ok = dickson_decompose(&q)?.reconstruct() == q
                && bias_quadratic(&q)? == signed_bias(&q)?
                && rank1_quadratic(&q)? == dependency_space(&q)?.dim();
            bad += usize::from(!ok);
        }
        verdict(bad, format!("2048 quadratics on 4 variables, {bad} exceptions"))
    });
    r.check("gaps", "delta_2r_values", |_| {
        let (a, b) = (delta_2r_bound(0)?, delta_2r_bound(1)?);
        Ok((
            a == ratio(1, 48) && b == ratio(1, 1536),
            format!("r=0: {}, r=1: {}", format(&a), format(&b)),
        ))
    });
    r.check("gaps", "dyadic_certificates", |ctx| {
        let mut bad = 0;
        let mut floors = 0;
        for _ in 0..ctx.n {
            let m = ctx.rng.gen_range(2..=8);
            let k = ctx.rng.gen_range(1..=3);
            let t = ctx.rng.gen_range(1..=3);
            let qs: Vec<PolyF2> = (0..k).map(|_| ctx.poly(m, 2, 0.3)).collect();
            let gamma: Vec<bool> = (0..1 << k).map(|_| ctx.rng.gen_bool(0.5)).collect();
            let c = dyadic_proximity(&gamma, &qs, t)?;
            let tables = qs.iter().map(truth_table).collect::<Result<Vec<_>, _>>()?;
            let g = f2lab_core::gf2::anf_from_bits(&gamma)?;
            let p = f2lab_core::gf2::anf_from_truth_table(&compose(&g, &tables, m)?);
            let mut ok = c.signed_bias == signed_bias(&p)? && c.achieved_err <= c.tail_bound && c.s <= c.s_bound();
            if let Some(f) = &c.gap_floor {
                floors += 1;
                ok &= c.gap >= *f;
            }
            bad += usize::from(!ok);
        }
        verdict(
            bad,
            format!("{} instances, {floors} with a positive floor, {bad} violations", ctx.n),
        )
    });
}

fn lemmas(r: &mut Runner) {
    r.check("lemmas", "vazirani", |ctx| {
        let mut bad = 0;
        for _ in 0..ctx.n {
            let n = ctx.rng.gen_range(1..=5);
            let m = ctx.rng.gen_range(2..=7);
            let ps: Vec<PolyF2> = (0..n).map(|_| ctx.poly(m, 3, 0.25)).collect();
            bad += usize::from(!vazirani_check(&ps)?.holds);
        }
        verdict(bad, format!("{} instances, {bad} violations", ctx.n))
    });
    r.check("lemmas", "convex_combination", |ctx| {
        let third = ratio(1, 3);
        let mut bad = 0;
        for _ in 0..ctx.n {
            let n = ctx.rng.gen_range(1..=3);
            let target = Pmf::product_bernoulli(n, &third)?;
            let k = ctx.rng.gen_range(1..=3);
            let comps = (0..k)
                .map(|_| {
                    let ps: Vec<PolyF2> = (0..n).map(|_| ctx.poly(4, 2, 0.3)).collect();
                    Ok(joint_distribution(&ps)?.to_pmf())
                })
                .collect::<Result<Vec<_>, f2lab_core::Error>>()?;
            let w = ctx.weights(k);
            bad += usize::from(!convex_combination_check(&target, &comps, &w)?.holds);
        }
        verdict(bad, format!("{} instances, {bad} violations", ctx.n))
    });
    r.check("lemmas", "conditioning", |ctx| {
        let third = ratio(1, 3);
        let mut bad = 0;
        for _ in 0..ctx.n {
            let n = ctx.rng.gen_range(1..=3);
            let m = ctx.rng.gen_range(2..=6);
            let f: Vec<PolyF2> = (0..n).map(|_| ctx.poly(m, 2, 0.3)).collect();
            let size = ctx.rng.gen_range(1..=1u64 << m);
            let s: Vec<u64> = (0..size).map(|_| ctx.rng.gen_range(0..1u64 << m)).collect();
            let y = Pmf::product_bernoulli(n, &third)?;
            bad += usize::from(!conditioning_check(&f, &s, &y)?.check.holds);
        }
        verdict(bad, format!("{} instances, {bad} violations", ctx.n))
    });
    r.check("lemmas", "fixing", |ctx| {
        let third = ratio(1, 3);
        let mut bad = 0;
        for _ in 0..ctx.n {
            let n = ctx.rng.gen_range(1..=3);
            let k = ctx.rng.gen_range(1..=3);
            let sb = ctx.rng.gen_range(1..=2);
            let m = ctx.rng.gen_range(2..=6);
            let arity = (k + sb) as u32;
            let gamma: Vec<PolyF2> = (0..n).map(|_| ctx.poly(arity, 2, 0.4)).collect();
            let qs: Vec<PolyF2> = (0..k).map(|_| ctx.poly(m, 2, 0.3)).collect();
            let q_star: Vec<PolyF2> = (0..sb).map(|_| ctx.poly(m, 2, 0.3)).collect();
            let y = Pmf::product_bernoulli(n as u32, &third)?;
            bad += usize::from(!fixing_check(&gamma, &qs, &q_star, &y)?.check.holds);
        }
        verdict(bad, format!("{} instances, {bad} violations", ctx.n))
    });
}

fn chebyshev(r: &mut Runner) {
    r.check("chebyshev", "covariance_examples", |_| {
        let p = |s| PolyF2::parse(s, Some(4));
        let got = [
            covariance_pair(&p("x1*x2")?, &p("x3*x4")?)?,
            covariance_pair(&p("x1*x2")?, &p("x1*x2")?)?,
            covariance_pair(&p("x1*x2")?, &p("x2*x3")?)?,
        ];
        let want = [ratio(0, 1), ratio(3, 16), ratio(1, 16)];
        Ok((
            got == want,
            format!("Cov = {}, {}, {}", format(&got[0]), format(&got[1]), format(&got[2])),
        ))
    });
    r.check("chebyshev", "pairwise_regular_family", |_| {
        // P_i = A_i + A_{i+1} with A_i = x_{2i+1} x_{2i+2}, indices mod 8.
        let a = |i: usize| format!("x{}*x{}", 2 * (i % 8) + 1, 2 * (i % 8) + 2);
        let ps = (0..8)
            .map(|i| PolyF2::parse(&format!("{} + {}", a(i), a(i + 1)), Some(16)))
            .collect::<Result<Vec<_>, _>>()?;
        let petals: Vec<Vec<PolyF2>> = ps.iter().map(|p| vec![p.clone()]).collect();
        let audit = chebyshev_audit(&ps, &petals, 1, &ratio(1, 1))?;
        Ok((
            audit.covariances_hold() && audit.preconditions_hold(),
            format!(
                "28 pairs, max Cov = {}, max eta = {}, exact tail = {}, TV = {}",
                format(&audit.max_covariance),
                format(&audit.max_eta),
                format(&audit.tail),
                format(&audit.tv)
            ),
        ))
    });
    r.check("chebyshev", "random_disjoint_families", |ctx| {
        let mut bad = 0;
        let runs = ctx.n.div_ceil(20);
        for _ in 0..runs {
            let n = ctx.rng.gen_range(2..=4);
            let block = 4u32;
            let m = block * n as u32;
            let ps: Vec<PolyF2> = (0..n)
                .map(|i| {
                    let local = ctx.low_rank_quadratic(block, 2);
                    let shift: Vec<PolyF2> = (1..=block).map(|v| PolyF2::var(i as u32 * block + v, m)).collect();
                    local.substitute(&shift, m)
                })
                .collect::<Result<_, _>>()?;
            let petals: Vec<Vec<PolyF2>> = ps.iter().map(|p| vec![p.clone()]).collect();
            let a = chebyshev_audit(&ps, &petals, 1, &ratio(1, 1))?;
            bad += usize::from(!a.covariances_hold() || a.max_covariance != ratio(0, 1));
        }
        verdict(
            bad,
            format!("{runs} families on disjoint blocks, {bad} with nonzero or unbounded covariance"),
        )
    });
    r.check("chebyshev", "variety_density", |ctx| {
        let target = ctx.n.div_ceil(4);
        let (mut done, mut bad, mut tries) = (0, 0, 0);
        while done < target && tries < 50 * target {
            tries += 1;
            let k = ctx.rng.gen_range(1..=4);
            let m = ctx.rng.gen_range(6..=12);
            let members: Vec<PolyF2> = (0..k)
                .map(|_| {
                    let pairs = ctx.rng.gen_range(1..=3);
                    ctx.low_rank_quadratic(m, pairs)
                })
                .collect();
            let Ok(f) = Factor::from_polys(members) else { continue };
            if !regularity_witness(&f, 1)?.is_regular() {
                continue;
            }
            done += 1;
            let v = variety_density(&f, Some(&ratio(1, 1)))?;
            let ok =
                v.deviation <= v.budget && v.character_sum == v.density && v.eta_check.as_ref().is_none_or(|c| c.holds);
            bad += usize::from(!ok);
        }
        Ok((
            done == target && bad == 0,
            format!("{done} regular factors, {bad} outside the character-sum budget"),
        ))
    });
}

fn min_combination_rank(qs: &[PolyF2]) -> Result<Option<usize>, f2lab_core::Error> {
    let mut best = None;
    for lam in 1..1u64 << qs.len() {
        let c = (0..qs.len())
            .filter(|i| lam >> i & 1 == 1)
            .fold(PolyF2::zero(qs[0].m()), |acc, i| acc.add(&qs[i]));
        let r = dependency_space(&c)?.dim();
        best = Some(best.map_or(r, |b: usize| b.min(r)));
    }
    Ok(best)
}

fn index(tables: &[TruthTable], x: u64) -> usize {
    tables
        .iter()
        .enumerate()
        .fold(0, |a, (i, t)| a | (usize::from(t.get(x)) << i))
}

fn regularization(r: &mut Runner) {
    r.check("regularize", "psi_values", |_| {
        let v = [
            psi(2, &GrowthFn::Mul(5), &[3, 0])?,
            psi(2, &GrowthFn::Identity, &[0, 1])?,
            psi(2, &GrowthFn::Mul(2), &[0, 2])?,
        ];
        let ok = v[0] == 3u32.into() && v[1] == 1u32.into() && v[2] == 14u32.into();
        Ok((
            ok,
            format!(
                "psi(3,0)={} with f=5k, psi(0,1)={} with f=k, psi(0,2)={} with f=2k",
                v[0], v[1], v[2]
            ),
        ))
    });
    r.check("regularize", "psi_monotone", |ctx| {
        let fs = [
            GrowthFn::Identity,
            GrowthFn::Mul(2),
            GrowthFn::Add(1),
            GrowthFn::Affine { a: 2, b: 1 },
        ];
        let target = ctx.n * 10;
        let (mut checked, mut bad, mut tries) = (0, 0, 0);
        while checked < target && tries < 100 * target {
            tries += 1;
            let d = ctx.rng.gen_range(1..=3usize);
            let f = &fs[ctx.rng.gen_range(0..fs.len())];
            let cap = if d == 3 { 2 } else { 6 };
            let mut v = || -> Vec<u64> {
                (0..d)
                    .map(|i| ctx.rng.gen_range(0..=if i == 2 { 1 } else { cap }))
                    .collect()
            };
            let (a, b) = (v(), v());
            let (lo, hi) = match invlex_compare(&a, &b)? {
                std::cmp::Ordering::Greater => (b, a),
                _ => (a, b),
            };
            if lo.iter().sum::<u64>() > hi.iter().sum::<u64>() {
                continue;
            }
            let (pl, ph) = (psi_bounded(d, f, &lo, 100_000)?, psi_bounded(d, f, &hi, 100_000)?);
            if !(pl.complete && ph.complete) {
                continue;
            }
            checked += 1;
            bad += usize::from(pl.value > ph.value);
        }
        verdict(bad, format!("{checked} ordered pairs, {bad} violations"))
    });
    r.check("regularize", "regular_and_reconstructs", |ctx| {
        let mut bad = 0;
        let mut refined = 0;
        for _ in 0..ctx.n {
            let m = ctx.rng.gen_range(4..=8);
            let k = ctx.rng.gen_range(1..=4);
            let members: Vec<PolyF2> = (0..k)
                .map(|_| ctx.poly(m, 2, 0.3))
                .filter(|p| !p.is_constant())
                .collect();
            if members.is_empty() {
                continue;
            }
            let f = Factor::from_polys(members.clone())?;
            let growth = GrowthFn::Identity;
            let out = regularize(&f, &growth)?;
            refined += usize::from(!out.steps.is_empty());
            let level = growth.eval(out.factor.dim() as u64)?;
            let (m, members) = common_vars(&members);
            let ok = regularity_witness(&out.factor, level)?.is_regular()
                && verify_reconstruction(&members, &out.gamma, out.factor.members(), m)?
                && out.within_bound != Some(false);
            bad += usize::from(!ok);
        }
        verdict(bad, format!("{} factors ({refined} refined), {bad} failures", ctx.n))
    });
    r.check("regularize", "rank21_postconditions", |ctx| {
        let mut bad = 0;
        let runs = ctx.n.div_ceil(2);
        for _ in 0..runs {
            let m = ctx.rng.gen_range(4..=12);
            let rq = ctx.rng.gen_range(1..=4);
            let s = ctx.rng.gen_range(0..=6 - rq);
            let c = ctx.rng.gen_range(2..=3u64);
            let qs: Vec<PolyF2> = (0..rq)
                .map(|_| {
                    let pairs = ctx.rng.gen_range(1..=4);
                    ctx.low_rank_quadratic(m, pairs)
                })
                .collect();
            let ls: Vec<PolyF2> = (0..s).map(|_| ctx.linear(m)).collect();
            let gamma: Vec<bool> = (0..1usize << (rq + s)).map(|_| ctx.rng.gen_bool(0.5)).collect();
            let out = regularize_rank21(&gamma, &qs, &ls, c)?;
            let growth = (c + 1).pow(out.k as u32) as u128;
            let size_ok = out.l_prime.len() as u128 <= growth * (rq + s) as u128 - rq as u128;
            let rank_ok = out.q_prime.is_empty()
                || min_combination_rank(&out.q_prime)?.unwrap_or(0) as u128 > c as u128 * growth * (rq + s) as u128;
            let all: Vec<PolyF2> = qs
                .iter()
                .chain(&ls)
                .chain(&out.q_prime)
                .chain(&out.l_prime)
                .cloned()
                .collect();
            let (_, all) = common_vars(&all);
            let tables = all.iter().map(truth_table).collect::<Result<Vec<_>, _>>()?;
            let (orig, rest) = tables.split_at(rq + s);
            let eq_ok = (0..1u64 << m).all(|x| gamma[index(orig, x)] == out.gamma_prime[index(rest, x)]);
            bad += usize::from(!(size_ok && rank_ok && eq_ok));
        }
        verdict(
            bad,
            format!("{runs} instances, {bad} violating size, rank or functional equality"),
        )
    });
}

fn distinct_subspaces(rng: &mut ChaCha8Rng, m: u32, k: usize, count: usize) -> Vec<Subspace> {
    let mut out = Vec::with_capacity(count);
    let mut seen = HashSet::new();
    while out.len() < count {
        let v = Subspace::random(m, k, rng);
        if seen.insert(v.basis().to_vec()) {
            out.push(v);
        }
    }
    out
}

fn sunflowers(r: &mut Runner) {
    r.check("sunflower", "above_threshold", |ctx| {
        let trials = ctx.n.div_ceil(20);
        let mut bad = 0;
        let mut runs = 0;
        for k in 1..=3usize {
            for s in 2..=3usize {
                let need = usize::try_from(sunflower_threshold(k, s)).expect("small threshold");
                let m = 2 * k as u32 + 3;
                for _ in 0..trials {
                    let spaces = distinct_subspaces(&mut ctx.rng, m, k, need);
                    let res = find_sunflower(&spaces, s)?;
                    runs += 1;
                    let ok = res.hypothesis_met
                        && res.found()
                        && res
                            .sunflower
                            .as_ref()
                            .is_some_and(|f| validate_sunflower(&spaces, &f.indices).as_ref() == Some(&f.core));
                    bad += usize::from(!ok);
                }
            }
        }
        verdict(
            bad,
            format!("{runs} collections with k in 1..=3 and s in 2..=3, {bad} failures"),
        )
    });
    r.check("sunflower", "pairwise_regularization", |ctx| {
        let f = GrowthFn::Identity;
        let runs = ctx.n.div_ceil(10);
        let (mut bad, mut survivors) = (0, 0);
        for _ in 0..runs {
            let m = 10;
            let n = ctx.rng.gen_range(2..=6);
            let shared = ctx.low_rank_quadratic(m, 2);
            let mut fs = Vec::new();
            for _ in 0..n {
                let pairs = ctx.rng.gen_range(1..=3);
                let mut members = vec![ctx.low_rank_quadratic(m, pairs)];
                if ctx.rng.gen_bool(0.5) {
                    members.push(shared.clone());
                }
                if let Ok(fac) = Factor::from_polys(members) {
                    fs.push(fac);
                }
            }
            if fs.is_empty() {
                continue;
            }
            let out = pairwise_sunflower_regularize(&fs, &f, 1)?;
            survivors += out.survivors.len();
            bad += usize::from(!verify_pairwise(&fs, &f, &out)?.all());
        }
        verdict(
            bad,
            format!("{runs} collections, {survivors} survivors, {bad} failing a check"),
        )
    });
    r.check("sunflower", "greedy_support_factorizes", |ctx| {
        let mut bad = 0;
        for _ in 0..ctx.n.div_ceil(5) {
            let n = ctx.rng.gen_range(3..=10);
            let ps: Vec<PolyF2> = (0..n).map(|_| ctx.low_rank_quadratic(12, 1)).collect();
            let idx = greedy_independent_support(&ps)?;
            let chosen: Vec<PolyF2> = idx.iter().map(|&i| ps[i].clone()).collect();
            bad += usize::from(!joint_distribution(&chosen)?.is_product());
        }
        verdict(
            bad,
            format!("{} instances, {bad} non-product joints", ctx.n.div_ceil(5)),
        )
    });
}
