use f2lab_core::dist::{chebyshev_audit, joint_distribution, variety_density, ChebyshevAudit, Side};
use f2lab_core::factors::{
    factor_rank, min_rank_combination, psi_bounded, psi_star_bounded, regularity_witness, regularize,
    regularize_rank21, verify_reconstruction, Factor, GrowthFn, PsiOutcome, RegularityCertificate, Witness,
};
use f2lab_core::gap::{
    delta_2r_bound, delta_dr_bound, dyadic_proximity, gap_to, merged_best, min_gap_scan, min_gap_scan_tables,
    random_walk_ensemble, Schedule, WalkConfig, WalkResult,
};
use f2lab_core::gf2::{truth_table, PolyF2, TruthTable};
use f2lab_core::quadratic::{dickson_decompose, rank1_quadratic};
use f2lab_core::rational::{self, Rational};
use f2lab_core::spectral::{dependency_space, pr_one, signed_bias, vazirani_check, walsh_spectrum};
use f2lab_core::subspace::{bitstring, find_sunflower, sunflower_threshold, validate_sunflower};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::input::{align, parse_bits, parse_rational, parse_vec, read_petals, read_polys, read_subspaces};
use crate::output::{bits, dec, poly, polys, rat, Doc, Report};
use crate::{verify, AuditKind, Command, PolyArg};

/// Largest cube whose full truth table `eval --all` will print.
const MAX_PRINTED_TABLE: u32 = 20;

type Outcome = Result<(Report, usize), CliError>;

fn ok(r: Report) -> Outcome {
    Ok((r, 0))
}

fn growth(s: &str) -> Result<GrowthFn, CliError> {
    s.parse()
        .map_err(|e: f2lab_core::Error| CliError::Usage(format!("--f: {e}")))
}

fn parse_poly(p: &PolyArg) -> Result<PolyF2, CliError> {
    Ok(PolyF2::parse(&p.poly, p.m)?)
}

fn psi_json(p: &PsiOutcome) -> Value {
    let v = match u64::try_from(&p.value) {
        Ok(x) => json!(x),
        Err(_) => json!(p.value.to_string()),
    };
    json!({ "value": v, "complete": p.complete, "steps": p.steps })
}

/// Outcome index of `x` under a tuple of truth tables, bit i from table i.
fn table_index(tables: &[TruthTable], x: u64) -> usize {
    tables
        .iter()
        .enumerate()
        .fold(0usize, |a, (i, t)| a | (usize::from(t.get(x)) << i))
}

pub fn dispatch(cmd: Command, cfg: &RunConfig) -> Outcome {
    match cmd {
        Command::Eval { p, x, all } => eval(&p, x.as_deref(), all),
        Command::Bias { p, rho } => bias(&p, &rho),
        Command::Spectrum { p } => spectrum(&p),
        Command::Dickson { p } => dickson(&p),
        Command::Rank { polys, poly, m, r } => rank(polys.as_deref(), poly.as_deref(), m, r),
        Command::Regularize { factor, f, d, m } => regularize_cmd(&factor, &f, d, m),
        Command::Rank21 { qs, ls, gamma, c, m } => rank21(&qs, ls.as_deref(), &gamma, c, m),
        Command::Sunflower { input, size } => sunflower(&input, size),
        Command::Tv { polys, rho, m } => tv(&polys, &rho, m),
        Command::Joint { polys, m } => joint(&polys, m),
        Command::Audit { kind } => audit(kind),
        Command::Scan {
            degree,
            vars,
            rho,
            tables,
        } => scan(degree, vars, &rho, tables),
        Command::Certify {
            qs,
            gamma,
            t,
            degree,
            m,
        } => certify(&qs, &gamma, t, degree, m, cfg),
        Command::Search {
            degree,
            vars,
            target,
            steps,
            seed,
            temp,
            greedy,
            schedule,
            runs,
            top,
            no_trace,
        } => {
            let schedule = match (temp, greedy, schedule) {
                (Some(t), _, _) => Schedule::Constant { temperature: t },
                (None, true, _) => Schedule::Greedy,
                (None, false, Some(s)) => s
                    .parse()
                    .map_err(|e: f2lab_core::Error| CliError::Usage(format!("--schedule: {e}")))?,
                (None, false, None) => Schedule::default(),
            };
            if let Schedule::Constant { temperature } = schedule {
                if !(temperature.is_finite() && temperature > 0.0) {
                    return Err(CliError::Usage("--temp must be positive".into()));
                }
            }
            let target = parse_rational(&target, "--target")?;
            let mut wc = WalkConfig::new(degree, vars, target, steps, seed.unwrap_or(cfg.seed));
            wc.schedule = schedule;
            wc.top_k = top.max(1);
            search(&wc, runs, !no_trace)
        }
        Command::Verify { suite, instances } => {
            let report = verify::run(suite, instances.max(1), cfg.seed)?;
            let failures = report.failures();
            Ok((report.into_report(), failures))
        }
        Command::Psi {
            d,
            f,
            vec,
            star,
            budget,
        } => {
            let g = growth(&f)?;
            let budget = budget.unwrap_or(cfg.psi_budget);
            let (out, arg) = match (vec, star) {
                (Some(v), _) => {
                    let v = parse_vec(&v)?;
                    (psi_bounded(d, &g, &v, budget)?, json!(v))
                }
                (None, Some(k)) => (psi_star_bounded(d, &g, k, budget)?, json!(k)),
                (None, None) => return Err(CliError::Usage("give --vec or --star".into())),
            };
            let key = if star.is_some() { "star" } else { "vec" };
            let p = psi_json(&out);
            ok(Report::new(
                "psi",
                Doc::new()
                    .put("d", d)
                    .put("f", g.to_string())
                    .put(key, arg)
                    .put("psi", p["value"].clone())
                    .put("complete", out.complete)
                    .put("steps", out.steps),
            ))
        }
    }
}

fn eval(p: &PolyArg, x: Option<&str>, all: bool) -> Outcome {
    let q = parse_poly(p)?;
    let m = q.m();
    if all {
        if m > MAX_PRINTED_TABLE {
            return Err(CliError::Usage(format!(
                "--all prints 2^m values; m = {m} exceeds {MAX_PRINTED_TABLE}"
            )));
        }
        let t = truth_table(&q)?;
        let table = bits(&t.to_bits());
        let mut csv = String::from("input,value\n");
        for x in 0..t.len() {
            csv.push_str(&format!("{},{}\n", bitstring(x, m), u8::from(t.get(x))));
        }
        let doc = Doc::new()
            .put("m", m)
            .put("poly", poly(&q))
            .put("table", table)
            .put("weight", t.weight());
        return ok(Report::new("eval", doc).with_csv(csv));
    }
    let x = parse_bits(x.unwrap_or_default(), "--x")?;
    if x.len() != m as usize {
        return Err(CliError::Usage(format!(
            "--x has {} bits but the polynomial has m = {m}",
            x.len()
        )));
    }
    let v = q.evaluate(&x)?;
    ok(Report::new(
        "eval",
        Doc::new()
            .put("m", m)
            .put("poly", poly(&q))
            .put("x", bits(&x))
            .put("value", u8::from(v)),
    ))
}

fn bias(p: &PolyArg, rho: &str) -> Outcome {
    let q = parse_poly(p)?;
    let rho = parse_rational(rho, "--rho")?;
    let doc = Doc::new()
        .put("m", q.m())
        .put("poly", poly(&q))
        .put("degree", q.degree())
        .rat("pr_one", &pr_one(&q)?)
        .rat("signed_bias", &signed_bias(&q)?)
        .rat("rho", &rho)
        .rat("gap", &gap_to(&q, &rho)?);
    ok(Report::new("bias", doc))
}

fn spectrum(p: &PolyArg) -> Outcome {
    let q = parse_poly(p)?;
    let s = walsh_spectrum(&q)?;
    let entries = s.to_entries();
    let mut csv = String::from("mask,value\n");
    for e in &entries {
        csv.push_str(&format!("{},{}\n", e.mask, e.value));
    }
    let coeffs: Vec<Value> = entries
        .iter()
        .map(|e| json!({ "mask": e.mask, "value": e.value }))
        .collect();
    let doc = Doc::new()
        .put("m", q.m())
        .put("poly", poly(&q))
        .put("support_size", s.support_size())
        .rat("parseval", &s.parseval_sum())
        .put("coefficients", coeffs);
    ok(Report::new("spectrum", doc).with_csv(csv))
}

fn dickson(p: &PolyArg) -> Outcome {
    let q = parse_poly(p)?;
    let form = dickson_decompose(&q)?;
    let j = form.to_json();
    let doc = Doc::new()
        .put("m", q.m())
        .put("poly", poly(&q))
        .put("r", j.r)
        .put("pairs", json!(j.pairs))
        .put("tail", json!(j.tail))
        .put("c", j.c)
        .put("rank1", j.rank1)
        .rat("bias", &form.bias());
    ok(Report::new("dickson", doc))
}

fn violation_json(c: &RegularityCertificate, k: usize) -> Value {
    match c {
        RegularityCertificate::Regular { level } => json!({ "regular": true, "level": level }),
        RegularityCertificate::Violation(v) => {
            let witness = match &v.witness {
                Witness::Constant(b) => json!({ "constant": u8::from(*b) }),
                Witness::Dickson(d) => {
                    let j = d.to_json();
                    json!({ "pairs": j.pairs, "tail": j.tail, "c": j.c })
                }
            };
            json!({
                "regular": false,
                "lambda": bits(&v.lambda_bits(k)),
                "ell": v.ell,
                "combination": v.combination.to_string(),
                "rank": v.rank,
                "witness": witness,
                "forms": polys(&v.witness.forms()),
            })
        }
    }
}

fn rank(file: Option<&std::path::Path>, expr: Option<&str>, m: Option<u32>, r: Option<u64>) -> Outcome {
    let ps = match (file, expr) {
        (Some(f), _) => read_polys(f, m)?,
        (None, Some(e)) => vec![PolyF2::parse(e, m)?],
        (None, None) => return Err(CliError::Usage("give --poly or --polys".into())),
    };
    let members = ps
        .iter()
        .map(|p| {
            let quad = p.degree() <= 2;
            Ok(json!({
                "poly": p.to_string(),
                "degree": p.degree(),
                "rank1": if quad { json!(rank1_quadratic(p)?) } else { Value::Null },
                "dependency_dim": dependency_space(p)?.dim(),
            }))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut doc = Doc::new().put("m", ps[0].m()).put("members", members);
    let nonconst: Vec<PolyF2> = ps.iter().filter(|p| !p.is_constant()).cloned().collect();
    if nonconst.len() == ps.len() && ps.iter().all(|p| p.degree() <= 2) {
        let f = Factor::from_polys(ps.clone())?;
        let min = min_rank_combination(&ps)?;
        doc = doc
            .put(
                "min_combination",
                match min {
                    Some((rk, lam)) => json!({ "rank": rk, "lambda": bits(&(0..ps.len()).map(|i| lam >> i & 1 == 1).collect::<Vec<_>>()) }),
                    None => Value::Null,
                },
            )
            .put("factor_rank", json!(factor_rank(&f)?));
        if let Some(r) = r {
            doc = doc.put("certificate", violation_json(&regularity_witness(&f, r)?, ps.len()));
        }
    } else if r.is_some() {
        return Err(CliError::Usage(
            "--r needs nonconstant members of degree at most 2".into(),
        ));
    }
    ok(Report::new("rank", doc))
}

fn regularize_cmd(file: &std::path::Path, f: &str, d: Option<u32>, m: Option<u32>) -> Outcome {
    let g = growth(f)?;
    let ps = read_polys(file, m)?;
    let d = d.unwrap_or_else(|| ps.iter().map(PolyF2::degree).max().unwrap_or(1).max(1));
    let fac = Factor::new(ps.clone(), d)?;
    let out = regularize(&fac, &g)?;
    let verified = verify_reconstruction(&ps, &out.gamma, out.factor.members(), fac.m())?;
    let steps: Vec<Value> = out
        .steps
        .iter()
        .map(|s| {
            json!({
                "level": s.level,
                "lambda": bits(&(0..s.dim_before.iter().sum::<u64>() as usize).map(|i| s.lambda >> i & 1 == 1).collect::<Vec<_>>()),
                "ell": s.ell,
                "rank": s.rank,
                "combination": s.combination.to_string(),
                "dropped": s.dropped,
                "dropped_poly": s.dropped_poly.to_string(),
                "added": polys(&s.added),
                "dim_before": s.dim_before,
                "dim_after": s.dim_after,
            })
        })
        .collect();
    let doc = Doc::new()
        .put("m", fac.m())
        .put("d", d)
        .put("f", g.to_string())
        .put("initial", polys(&ps))
        .put("steps", steps)
        .put("factor", polys(out.factor.members()))
        .put("dim_vector", out.factor.dim_vector())
        .put("gamma", polys(&out.gamma))
        .put("psi_bound", psi_json(&out.psi_bound))
        .put("within_bound", json!(out.within_bound))
        .put("reconstruction_verified", verified);
    ok(Report::new("regularize", doc))
}

fn rank21(
    qs_path: &std::path::Path,
    ls_path: Option<&std::path::Path>,
    gamma: &str,
    c: u64,
    m: Option<u32>,
) -> Outcome {
    let mut qs = read_polys(qs_path, m)?;
    let mut ls = match ls_path {
        Some(p) => read_polys(p, m)?,
        None => Vec::new(),
    };
    let m = align(&mut [&mut qs, &mut ls])?;
    let gamma = parse_bits(gamma, "--gamma")?;
    let arity = qs.len() + ls.len();
    if gamma.len() != 1usize << arity {
        return Err(CliError::Usage(format!(
            "--gamma needs 2^{arity} = {} bits, got {}",
            1usize << arity,
            gamma.len()
        )));
    }
    let out = regularize_rank21(&gamma, &qs, &ls, c)?;

    let mut all: Vec<PolyF2> = qs
        .iter()
        .chain(&ls)
        .chain(&out.q_prime)
        .chain(&out.l_prime)
        .cloned()
        .collect();
    let mut none = Vec::new();
    align(&mut [&mut all, &mut none])?;
    let tables = all.iter().map(truth_table).collect::<Result<Vec<_>, _>>()?;
    let (orig, rest) = tables.split_at(arity);
    let verified = (0..1u64 << m).all(|x| gamma[table_index(orig, x)] == out.gamma_prime[table_index(rest, x)]);

    let steps: Vec<Value> = out
        .steps
        .iter()
        .map(|s| {
            json!({
                "k": s.k, "threshold": s.threshold.to_string(), "a": s.a, "rank": s.rank,
                "dropped": s.dropped, "new_linear": s.new_linear,
            })
        })
        .collect();
    let doc = Doc::new()
        .put("m", m)
        .put("c", c)
        .put("k", out.k)
        .put("kept", out.kept.clone())
        .put("q_prime", polys(&out.q_prime))
        .put("l_prime", polys(&out.l_prime))
        .put("gamma_prime", bits(&out.gamma_prime))
        .put("steps", steps)
        .put("final_rank", json!(out.final_rank))
        .put("size_bound", out.size_bound.to_string())
        .put("threshold", out.threshold.to_string())
        .put("verified", verified);
    ok(Report::new("rank21", doc))
}

fn sunflower(path: &std::path::Path, size: usize) -> Outcome {
    let spaces = read_subspaces(path)?;
    let k = spaces.first().map(|s| s.dim()).unwrap_or(0);
    let res = find_sunflower(&spaces, size)?;
    let (core, indices, validated) = match &res.sunflower {
        Some(f) => (
            json!(f.core.to_json()),
            json!(f.indices),
            validate_sunflower(&spaces, &f.indices).as_ref() == Some(&f.core),
        ),
        None => (Value::Null, json!([]), false),
    };
    let doc = Doc::new()
        .put("count", spaces.len())
        .put("k", k)
        .put("size", size)
        .put("threshold", sunflower_threshold(k, size).to_string())
        .put("hypothesis_met", res.hypothesis_met)
        .put("found", res.found())
        .put("core", core)
        .put("indices", indices)
        .put("validated", validated);
    ok(Report::new("sunflower", doc))
}

fn tv(path: &std::path::Path, rho: &str, m: Option<u32>) -> Outcome {
    let ps = read_polys(path, m)?;
    let rho = parse_rational(rho, "--rho")?;
    let d = joint_distribution(&ps)?;
    let tv = d.tv_to_product_bernoulli(&rho)?;
    // The distance has its own `decimal` field rather than a `decimals` map.
    let doc = json!({
        "n": ps.len(),
        "m": ps[0].m(),
        "rho": rat(&rho),
        "tv": rat(&tv),
        "decimal": dec(&tv),
    });
    ok(Report::new("tv", doc))
}

fn joint(path: &std::path::Path, m: Option<u32>) -> Outcome {
    let ps = read_polys(path, m)?;
    let d = joint_distribution(&ps)?;
    let outcomes: Vec<Value> = d
        .counts()
        .iter()
        .map(|(&y, &c)| json!({ "outcome": bitstring(y as u64, d.n()), "count": c, "prob": rat(&d.prob(y)) }))
        .collect();
    let doc = Doc::new()
        .put("n", d.n())
        .put("m", ps[0].m())
        .put("denom", d.denom())
        .put("product", d.is_product())
        .put("outcomes", outcomes)
        .rat("tv_to_uniform", &d.tv_to_uniform());
    ok(Report::new("joint", doc).with_csv(d.to_csv()))
}

fn chebyshev_json(doc: Doc, a: &ChebyshevAudit) -> Doc {
    let pairs: Vec<Value> = a
        .pairs
        .iter()
        .map(|p| {
            json!({
                "i": p.i, "j": p.j, "covariance": rat(&p.covariance), "eta": rat(&p.eta),
                "within_bound": p.within_bound, "precondition": p.precondition,
            })
        })
        .collect();
    doc.put("n", a.n)
        .put("level", a.level)
        .put("determined", a.determined.clone())
        .put("pr_one", a.pr_one.iter().map(rat).collect::<Vec<_>>())
        .put("pairs", pairs)
        .put("covariances_hold", a.covariances_hold())
        .put("preconditions_hold", a.preconditions_hold())
        .rat("max_covariance", &a.max_covariance)
        .rat("max_eta", &a.max_eta)
        .rat("delta", &a.delta)
        .put(
            "side",
            match a.side {
                Side::Above => "above",
                Side::Below => "below",
            },
        )
        .rat("tail", &a.tail)
        .rat("chebyshev_bound", &a.chebyshev_bound)
        .rat("stated_bound", &a.stated_bound)
        .rat("target_mass", &a.target_mass)
        .rat("tv_lower_bound", &a.tv_lower_bound)
        .rat("tv", &a.tv)
}

fn audit(kind: AuditKind) -> Outcome {
    match kind {
        AuditKind::Chebyshev { polys, petals, r, eta } => {
            let eta = parse_rational(&eta, "--eta")?;
            let mut ps = read_polys(&polys, None)?;
            let mut petals = match petals {
                Some(p) => read_petals(&p, None)?,
                None => ps.iter().map(|p| vec![p.clone()]).collect(),
            };
            let mut flat: Vec<PolyF2> = petals.iter().flatten().cloned().collect();
            let m = align(&mut [&mut ps, &mut flat])?;
            for pet in petals.iter_mut() {
                for p in pet.iter_mut() {
                    *p = p.with_vars(m)?;
                }
            }
            let a = chebyshev_audit(&ps, &petals, r, &eta)?;
            ok(Report::new(
                "audit",
                chebyshev_json(Doc::new().put("kind", "chebyshev").put("m", m), &a),
            ))
        }
        AuditKind::Vazirani { polys } => {
            let ps = read_polys(&polys, None)?;
            let v = vazirani_check(&ps)?;
            let doc = Doc::new()
                .put("kind", "vazirani")
                .put("n", v.n)
                .put("m", ps[0].m())
                .rat("tv_from_uniform", &v.tv_from_uniform)
                .rat("epsilon", &v.epsilon)
                .rat("bound_squared", &v.bound_squared)
                .opt_rat("bound", v.bound.as_ref())
                .put("holds", v.holds);
            ok(Report::new("audit", doc))
        }
        AuditKind::Density { factor, eta } => {
            let eta = eta.map(|e| parse_rational(&e, "--eta")).transpose()?;
            let ps = read_polys(&factor, None)?;
            let f = Factor::from_polys(ps.clone())?;
            let v = variety_density(&f, eta.as_ref())?;
            let check = v
                .eta_check
                .as_ref()
                .map(|c| json!({ "lhs": rat(&c.lhs), "rhs": rat(&c.rhs), "holds": c.holds }));
            let doc = Doc::new()
                .put("kind", "density")
                .put("k", v.k)
                .put("m", f.m())
                .rat("density", &v.density)
                .rat("deviation", &v.deviation)
                .rat("budget", &v.budget)
                .rat("character_sum", &v.character_sum)
                .put("within_budget", v.deviation <= v.budget)
                .put("eta_check", json!(check));
            ok(Report::new("audit", doc))
        }
    }
}

fn scan(d: u32, m: u32, rho: &str, tables: bool) -> Outcome {
    let rho = parse_rational(rho, "--rho")?;
    let s = if tables {
        min_gap_scan_tables(d, m, &rho)?
    } else {
        min_gap_scan(d, m, &rho)?
    };
    let census: Vec<Value> = s
        .census
        .iter()
        .map(|(v, c)| json!({ "value": rat(v), "count": c }))
        .collect();
    let doc = Doc::new()
        .put("d", s.d)
        .put("m", s.m)
        .rat("rho", &s.rho)
        .put("polys", s.polys)
        .rat("min_gap", &s.min_gap)
        .put("witness", poly(&s.witness))
        .rat("witness_pr", &s.witness_pr)
        .put("census", census);
    ok(Report::new("scan", doc).with_csv(s.census_csv()))
}

fn certify(
    qs_path: &std::path::Path,
    gamma: &str,
    t: u64,
    degree: Option<u32>,
    m: Option<u32>,
    cfg: &RunConfig,
) -> Outcome {
    let qs = read_polys(qs_path, m)?;
    let gamma = parse_bits(gamma, "--gamma")?;
    if gamma.len() != 1usize << qs.len() {
        return Err(CliError::Usage(format!(
            "--gamma needs 2^{} = {} bits, got {}",
            qs.len(),
            1usize << qs.len(),
            gamma.len()
        )));
    }
    let c = dyadic_proximity(&gamma, &qs, t)?;
    let r = qs.len();
    let cert = Doc::new()
        .put("r", c.r)
        .put("t", c.t)
        .put("i", c.i)
        .put("s", c.s)
        .put("s_bound", c.s_bound())
        .put("a", c.a.to_string())
        .rat("signed_bias", &c.signed_bias)
        .rat("err_bound", &c.err_bound)
        .rat("tail_bound", &c.tail_bound)
        .rat("achieved_err", &c.achieved_err)
        .put("within_err_bound", c.within_err_bound())
        .rat("gap", &c.gap)
        .opt_rat("gap_floor", c.gap_floor.as_ref());
    let pr = (rational::one() - &c.signed_bias) / rational::int(2);
    let mut doc = Doc::new()
        .put("m", qs[0].m())
        .put("qs", polys(&qs))
        .put("gamma", bits(&gamma))
        .rat("pr_one", &pr)
        .put("dyadic", cert);
    if qs.iter().all(|q| q.degree() <= 2) {
        doc = doc.rat("delta_2r_bound", &delta_2r_bound(r as u32)?);
    }
    if let Some(d) = degree {
        let b = delta_dr_bound(d, r as u64, &cfg.profile(), cfg.psi_budget)?;
        doc = doc.put(
            "delta_dr_bound",
            Doc::new()
                .put("degree", d)
                .put("psi_star", psi_json(&b.psi_star))
                .opt_rat("value", b.value.as_ref()),
        );
    }
    ok(Report::new("certify", doc))
}

fn walk_json(r: &WalkResult, trace: bool) -> Value {
    let best: Vec<Value> = r.best.iter().map(best_entry).collect();
    let mut v = json!({ "seed": r.seed, "best": best });
    if trace {
        v["trace"] = r
            .trace
            .iter()
            .map(|e| json!({ "step": e.step, "monomial": e.monomial, "accepted": e.accepted, "gap": rat(&e.gap) }))
            .collect();
    }
    v
}

fn best_entry((p, g): &(PolyF2, Rational)) -> Value {
    json!({ "poly": p.to_string(), "gap": rat(g), "gap_decimal": dec(g) })
}

fn search(wc: &WalkConfig, runs: u64, trace: bool) -> Outcome {
    if runs == 0 {
        return Err(CliError::Usage("--runs must be positive".into()));
    }
    let seeds: Vec<u64> = (0..runs).map(|i| wc.seed.wrapping_add(i)).collect();
    let results = random_walk_ensemble(wc, &seeds)?;
    let merged = merged_best(&results, wc.top_k);
    let mut text = String::new();
    for (p, g) in &merged {
        text.push_str(&format!("{} {}  {p}\n", rational::format(g), rational::decimal(g, 12)));
    }
    let mut csv = String::from("seed,step,monomial,accepted,gap\n");
    for r in &results {
        for e in &r.trace {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                r.seed,
                e.step,
                e.monomial,
                u8::from(e.accepted),
                rational::format(&e.gap)
            ));
        }
    }
    let doc = Doc::new()
        .put("d", wc.d)
        .put("m", wc.m)
        .rat("target", &wc.target)
        .put("steps", wc.steps)
        .put("schedule", wc.schedule.to_string())
        .put("runs", results.iter().map(|r| walk_json(r, trace)).collect::<Vec<_>>())
        .put("best", merged.iter().map(best_entry).collect::<Vec<_>>());
    ok(Report::new("search", doc).with_csv(csv).with_text(text))
}
