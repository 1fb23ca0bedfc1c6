//! Seeded random walk on polynomials of bounded degree: toggle one monomial
//! per step and keep the polynomials whose `Pr[P = 1]` comes closest to a
//! target.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::{truth_table, PolyF2, TruthTable};
use crate::rational::{self, Rational};

use super::scan::monomials;

pub const MAX_WALK_VARS: u32 = 20;

/// Acceptance rule for moves that move away from the target. Moves that do
/// not increase the gap are always taken. The energy of a move is the
/// increase in `|weight - target 2^m|`, counted in inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    Greedy,
    Constant {
        temperature: f64,
    },
    /// Geometric cooling from `start` to `end` over the run.
    Anneal {
        start: f64,
        end: f64,
    },
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Anneal { start: 2.0, end: 0.05 }
    }
}

impl Schedule {
    fn temperature(&self, step: u64, steps: u64) -> f64 {
        match *self {
            Schedule::Greedy => 0.0,
            Schedule::Constant { temperature } => temperature,
            Schedule::Anneal { start, end } => {
                let frac = if steps <= 1 {
                    1.0
                } else {
                    step as f64 / (steps - 1) as f64
                };
                start * (end / start).powf(frac)
            }
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Greedy => write!(f, "greedy"),
            Schedule::Constant { temperature } => write!(f, "constant:{temperature}"),
            Schedule::Anneal { start, end } => write!(f, "anneal:{start},{end}"),
        }
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("unknown schedule {s:?}"));
        let num = |x: &str| -> Result<f64> {
            let v: f64 = x.trim().parse().map_err(|_| bad())?;
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(Error::invalid("temperatures must be positive"))
            }
        };
        match s.split_once(':') {
            None if s == "greedy" => Ok(Schedule::Greedy),
            Some(("constant", t)) => Ok(Schedule::Constant { temperature: num(t)? }),
            Some(("anneal", rest)) => {
                let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                Ok(Schedule::Anneal {
                    start: num(a)?,
                    end: num(b)?,
                })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    pub d: u32,
    pub m: u32,
    pub target: Rational,
    pub steps: u64,
    pub seed: u64,
    pub schedule: Schedule,
    pub top_k: usize,
}

impl WalkConfig {
    pub fn new(d: u32, m: u32, target: Rational, steps: u64, seed: u64) -> Self {
        WalkConfig {
            d,
            m,
            target,
            steps,
            seed,
            schedule: Schedule::default(),
            top_k: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub step: u64,
    /// Index into the degree-then-mask monomial order.
    pub monomial: usize,
    pub accepted: bool,
    /// Gap of the current polynomial after the step.
    pub gap: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkResult {
    pub seed: u64,
    /// Distinct polynomials, closest first, ties in discovery order.
    pub best: Vec<(PolyF2, Rational)>,
    pub trace: Vec<TraceEntry>,
}

impl WalkResult {
    pub fn best_gap(&self) -> Option<&Rational> {
        self.best.first().map(|(_, g)| g)
    }
}

fn offer(
    best: &mut Vec<(PolyF2, Rational)>,
    k: usize,
    active: &[bool],
    monos: &[u64],
    m: u32,
    gap: &Rational,
) -> Result<()> {
    if k == 0 || (best.len() >= k && *gap >= best[best.len() - 1].1) {
        return Ok(());
    }
    let p = PolyF2::from_masks(m, monos.iter().zip(active).filter(|(_, &a)| a).map(|(&mk, _)| mk))?;
    if best.iter().any(|(q, _)| *q == p) {
        return Ok(());
    }
    let pos = best.partition_point(|(_, g)| g <= gap);
    best.insert(pos, (p, gap.clone()));
    best.truncate(k);
    Ok(())
}

pub fn random_walk_search(cfg: &WalkConfig) -> Result<WalkResult> {
    if cfg.m > MAX_WALK_VARS {
        return Err(Error::CapExceeded {
            what: "walk variable count",
            value: cfg.m as u64,
            cap: MAX_WALK_VARS as u64,
        });
    }
    if cfg.target < rational::zero() || cfg.target > rational::one() {
        return Err(Error::invalid("target must lie in [0, 1]"));
    }
    let m = cfg.m;
    let monos = monomials(cfg.d, m);
    let tables = monos
        .iter()
        .map(|&mk| truth_table(&PolyF2::from_masks(m, [mk])?))
        .collect::<Result<Vec<TruthTable>>>()?;
    let size = rational::pow2(m as u64);
    let denom = Rational::from_integer(size.clone());
    // Distance to the target in units of inputs.
    let scaled_target = &cfg.target * &denom;
    let distance = |w: u64| (Rational::from_integer(w.into()) - &scaled_target).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut table = TruthTable::zeros(m)?;
    let mut active = vec![false; monos.len()];
    let mut dist = distance(0);
    let mut best = Vec::new();
    offer(&mut best, cfg.top_k, &active, &monos, m, &(&dist / &denom))?;
    let mut trace = Vec::with_capacity(cfg.steps as usize);

    for step in 0..cfg.steps {
        let b = rng.gen_range(0..monos.len());
        table.xor_assign(&tables[b]);
        let cand = distance(table.weight());
        let accepted = if cand <= dist {
            true
        } else {
            let temp = cfg.schedule.temperature(step, cfg.steps);
            let u: f64 = rng.gen();
            temp > 0.0 && u < (-(&cand - &dist).to_f64().unwrap_or(f64::INFINITY) / temp).exp()
        };
        if accepted {
            active[b] = !active[b];
            dist = cand;
            offer(&mut best, cfg.top_k, &active, &monos, m, &(&dist / &denom))?;
        } else {
            table.xor_assign(&tables[b]);
        }
        trace.push(TraceEntry {
            step,
            monomial: b,
            accepted,
            gap: &dist / &denom,
        });
    }
    Ok(WalkResult {
        seed: cfg.seed,
        best,
        trace,
    })
}

/// Independent walks, one per seed, run in parallel. Results come back in
/// seed order; `merged_best` combines them.
pub fn random_walk_ensemble(cfg: &WalkConfig, seeds: &[u64]) -> Result<Vec<WalkResult>> {
    seeds
        .par_iter()
        .map(|&seed| random_walk_search(&WalkConfig { seed, ..cfg.clone() }))
        .collect()
}

pub fn merged_best(results: &[WalkResult], k: usize) -> Vec<(PolyF2, Rational)> {
    let mut all: Vec<(PolyF2, Rational)> = Vec::new();
    for (p, g) in results.iter().flat_map(|r| r.best.iter()) {
        if !all.iter().any(|(q, _)| q == p) {
            all.push((p.clone(), g.clone()));
        }
    }
    all.sort_by(|a, b| a.1.cmp(&b.1));
    all.truncate(k);
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap::one_third_gap;
    use crate::rational::ratio;

    #[test]
    fn zero_steps() {
        let r = random_walk_search(&WalkConfig::new(3, 5, ratio(1, 3), 0, 1)).unwrap();
        assert_eq!(r.best, vec![(PolyF2::zero(5), ratio(1, 3))]);
        assert!(r.trace.is_empty());
    }

    #[test]
    fn quadratics_reach_one_twenty_fourth() {
        let r = random_walk_search(&WalkConfig::new(2, 6, ratio(1, 3), 5_000, 7)).unwrap();
        assert_eq!(r.best_gap().unwrap(), &ratio(1, 24));
        for (p, g) in &r.best {
            assert_eq!(one_third_gap(p).unwrap(), *g);
        }
    }

    #[test]
    fn deterministic() {
        let cfg = WalkConfig::new(3, 6, ratio(1, 3), 2_000, 11);
        assert_eq!(random_walk_search(&cfg).unwrap(), random_walk_search(&cfg).unwrap());
    }

    #[test]
    fn schedule_round_trip() {
        for s in ["greedy", "constant:0.5", "anneal:2,0.05"] {
            let parsed: Schedule = s.parse().unwrap();
            assert_eq!(parsed.to_string().parse::<Schedule>().unwrap(), parsed);
        }
        assert!("anneal:1".parse::<Schedule>().is_err());
        assert!("constant:-1".parse::<Schedule>().is_err());
    }
}
