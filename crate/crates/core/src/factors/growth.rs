//! Growth functions, the bookkeeping function ψ_{d,f} and the c_KL profile.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// `f : N -> N` with `f(r) >= r`, non-decreasing. Both properties are
/// checked at every queried point.
#[derive(Clone)]
pub enum GrowthFn {
    Identity,
    /// `c * k`.
    Mul(u64),
    /// `k + c`.
    Add(u64),
    /// `a * k + b`.
    Affine {
        a: u64,
        b: u64,
    },
    /// `c_KL(2, 2^{-k} η) = 2k + ceil(2 log2(1/η))`.
    Ckl2 {
        eta: Rational,
    },
    Custom {
        name: String,
        f: Arc<dyn Fn(u64) -> u64 + Send + Sync>,
    },
}

impl fmt::Debug for GrowthFn {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "GrowthFn({self})")
    }
}

impl fmt::Display for GrowthFn {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFn::Identity => write!(fm, "id"),
            GrowthFn::Mul(c) => write!(fm, "mul:{c}"),
            GrowthFn::Add(c) => write!(fm, "add:{c}"),
            GrowthFn::Affine { a, b } => write!(fm, "affine:{a},{b}"),
            GrowthFn::Ckl2 { eta } => write!(fm, "ckl2:delta={}", rational::format(eta)),
            GrowthFn::Custom { name, .. } => write!(fm, "custom:{name}"),
        }
    }
}

impl FromStr for GrowthFn {
    type Err = Error;

    /// `id`, `mul:c`, `linear:c=c`, `add:c`, `affine:a,b`, `ckl2:delta=p/q`.
    fn from_str(s: &str) -> Result<GrowthFn> {
        let s = s.trim();
        let bad = || Error::NotGrowth(format!("unrecognised growth function {s:?}"));
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
        let (head, arg) = s.split_once(':').unwrap_or((s, ""));
        let f = match head {
            "id" | "identity" if arg.is_empty() => GrowthFn::Identity,
            "mul" => GrowthFn::Mul(num(arg)?),
            "linear" => GrowthFn::Mul(num(arg.strip_prefix("c=").ok_or_else(bad)?)?),
            "add" => GrowthFn::Add(num(arg)?),
            "affine" => {
                let (a, b) = arg.split_once(',').ok_or_else(bad)?;
                GrowthFn::Affine { a: num(a)?, b: num(b)? }
            }
            "ckl2" => {
                let eta = rational::parse(arg.strip_prefix("delta=").ok_or_else(bad)?)?;
                GrowthFn::Ckl2 { eta }
            }
            _ => return Err(bad()),
        };
        f.validate_params()?;
        Ok(f)
    }
}

impl GrowthFn {
    pub fn custom(name: impl Into<String>, f: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Self {
        GrowthFn::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    fn validate_params(&self) -> Result<()> {
        match self {
            GrowthFn::Mul(0) | GrowthFn::Affine { a: 0, .. } => {
                Err(Error::NotGrowth(format!("{self} violates f(r) >= r")))
            }
            GrowthFn::Ckl2 { eta } if *eta <= rational::zero() || *eta > rational::one() => {
                Err(Error::NotGrowth("ckl2 requires delta in (0,1]".into()))
            }
            _ => Ok(()),
        }
    }

    fn raw(&self, k: &BigUint) -> Result<BigUint> {
        Ok(match self {
            GrowthFn::Identity => k.clone(),
            GrowthFn::Mul(c) => k * c,
            GrowthFn::Add(c) => k + c,
            GrowthFn::Affine { a, b } => k * a + b,
            GrowthFn::Ckl2 { eta } => k * 2u32 + ckl2(eta),
            GrowthFn::Custom { f, .. } => {
                let x = k.to_u64().ok_or(Error::CapExceeded {
                    what: "custom growth function argument",
                    value: u64::MAX,
                    cap: u64::MAX,
                })?;
                BigUint::from(f(x))
            }
        })
    }

    /// `f(k)`, rejecting `f(k) < k`.
    pub fn eval_big(&self, k: &BigUint) -> Result<BigUint> {
        let v = self.raw(k)?;
        if v < *k {
            return Err(Error::NotGrowth(format!("{self}: f({k}) = {v} < {k}")));
        }
        Ok(v)
    }

    pub fn eval(&self, k: u64) -> Result<u64> {
        let v = self.eval_big(&BigUint::from(k))?;
        v.to_u64().ok_or(Error::CapExceeded {
            what: "growth function value",
            value: u64::MAX,
            cap: u64::MAX,
        })
    }
}

/// `ceil(2 log2(1/δ))`: the least `n >= 0` with `2^n δ^2 >= 1`.
pub fn ckl2(delta: &Rational) -> u64 {
    assert!(*delta > rational::zero(), "delta must be positive");
    if *delta >= rational::one() {
        return 0;
    }
    let p2 = delta.numer().magnitude().pow(2u32);
    let q2 = delta.denom().magnitude().pow(2u32);
    let mut n = (q2.bits() - p2.bits()).saturating_sub(1);
    while (&p2 << n) < q2 {
        n += 1;
    }
    n
}

/// Rank bounds `c_KL(d, δ)`: `0` for `d = 1`, `ceil(2 log2(1/δ))` for
/// `d = 2`, `κ ceil(log2(1/δ))^4` for `d = 3`, a callback beyond.
type HigherBound = Arc<dyn Fn(u32, &Rational) -> u64 + Send + Sync>;

#[derive(Clone)]
pub struct CklProfile {
    pub kappa: u64,
    higher: Option<HigherBound>,
}

impl fmt::Debug for CklProfile {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("CklProfile")
            .field("kappa", &self.kappa)
            .field("higher", &self.higher.is_some())
            .finish()
    }
}

impl Default for CklProfile {
    fn default() -> Self {
        CklProfile { kappa: 1, higher: None }
    }
}

impl CklProfile {
    pub fn new(kappa: u64) -> Self {
        CklProfile { kappa, higher: None }
    }

    pub fn with_higher(mut self, f: impl Fn(u32, &Rational) -> u64 + Send + Sync + 'static) -> Self {
        self.higher = Some(Arc::new(f));
        self
    }

    pub fn bound(&self, d: u32, delta: &Rational) -> Result<u64> {
        if *delta <= rational::zero() {
            return Err(Error::invalid("c_KL needs delta > 0"));
        }
        match d {
            0 | 1 => Ok(0),
            2 => Ok(ckl2(delta)),
            3 => {
                let l = rational::ceil_log2(&delta.recip());
                Ok(self.kappa.saturating_mul(l.saturating_pow(4)))
            }
            _ => self
                .higher
                .as_ref()
                .map(|f| f(d, delta))
                .ok_or_else(|| Error::invalid(format!("no c_KL profile configured for degree {d}"))),
        }
    }
}

/// Result of unrolling ψ: exact when `complete`, otherwise a lower bound
/// (the running total never decreases).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiOutcome {
    pub value: BigUint,
    pub complete: bool,
    pub steps: u64,
}

pub const DEFAULT_PSI_BUDGET: u64 = 10_000_000;

/// Unrolls `ψ_{d,f}(M)` for at most `budget` steps.
pub fn psi_bounded(d: usize, f: &GrowthFn, vec: &[u64], budget: u64) -> Result<PsiOutcome> {
    if vec.len() != d || d == 0 {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: vec.len(),
        });
    }
    let mut m: Vec<BigUint> = vec.iter().map(|&v| BigUint::from(v)).collect();
    let mut total: BigUint = m.iter().sum();
    let mut last_f: Option<BigUint> = None;
    let mut steps = 0u64;
    loop {
        let Some(l) = (1..d).find(|&i| !m[i].is_zero()) else {
            return Ok(PsiOutcome {
                value: m[0].clone(),
                complete: true,
                steps,
            });
        };
        if steps >= budget {
            return Ok(PsiOutcome {
                value: total,
                complete: false,
                steps,
            });
        }
        let fv = match f.eval_big(&total) {
            Ok(v) => v,
            // A custom function cannot be evaluated this far out; the
            // partial total is still a valid lower bound.
            Err(Error::CapExceeded { .. }) => {
                return Ok(PsiOutcome {
                    value: total,
                    complete: false,
                    steps,
                })
            }
            Err(e) => return Err(e),
        };
        if last_f.as_ref().is_some_and(|prev| fv < *prev) {
            return Err(Error::NotGrowth(format!("{f} decreased along the unrolling")));
        }
        total = total + &fv - BigUint::one();
        m[l - 1] += &fv;
        m[l] -= BigUint::one();
        last_f = Some(fv);
        steps += 1;
    }
}

pub fn psi(d: usize, f: &GrowthFn, vec: &[u64]) -> Result<BigUint> {
    let out = psi_bounded(d, f, vec, DEFAULT_PSI_BUDGET)?;
    if !out.complete {
        return Err(Error::BudgetExceeded(out.steps));
    }
    Ok(out.value)
}

pub fn psi_star(d: usize, f: &GrowthFn, k: u64) -> Result<BigUint> {
    let mut v = vec![0u64; d];
    if let Some(last) = v.last_mut() {
        *last = k;
    }
    psi(d, f, &v)
}

pub fn psi_star_bounded(d: usize, f: &GrowthFn, k: u64, budget: u64) -> Result<PsiOutcome> {
    let mut v = vec![0u64; d];
    if let Some(last) = v.last_mut() {
        *last = k;
    }
    psi_bounded(d, f, &v, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use std::collections::HashMap;

    fn memo_psi(f: &GrowthFn, v: Vec<BigUint>, memo: &mut HashMap<Vec<BigUint>, BigUint>) -> BigUint {
        if let Some(x) = memo.get(&v) {
            return x.clone();
        }
        let out = match (1..v.len()).find(|&i| !v[i].is_zero()) {
            None => v[0].clone(),
            Some(l) => {
                let s: BigUint = v.iter().sum();
                let mut w = v.clone();
                w[l - 1] += f.eval_big(&s).unwrap();
                w[l] -= 1u32;
                memo_psi(f, w, memo)
            }
        };
        memo.insert(v, out.clone());
        out
    }

    #[test]
    fn examples() {
        let id = GrowthFn::Identity;
        assert_eq!(psi(2, &GrowthFn::Mul(5), &[3, 0]).unwrap(), BigUint::from(3u32));
        assert_eq!(psi(2, &id, &[0, 1]).unwrap(), BigUint::from(1u32));
        assert_eq!(psi(2, &GrowthFn::Mul(2), &[0, 2]).unwrap(), BigUint::from(14u32));
    }

    #[test]
    fn agrees_with_memoised_recursion() {
        let f = GrowthFn::Affine { a: 2, b: 1 };
        let mut memo = HashMap::new();
        for a in 0..4 {
            for b in 0..3 {
                for c in 0..2 {
                    let v = vec![a, b, c];
                    let got = psi(3, &f, &v).unwrap();
                    let big = v.iter().map(|&x| BigUint::from(x)).collect();
                    assert_eq!(got, memo_psi(&f, big, &mut memo));
                }
            }
        }
    }

    #[test]
    fn budget_gives_lower_bound() {
        let f = GrowthFn::Mul(2);
        let out = psi_star_bounded(4, &f, 3, 50).unwrap();
        assert!(!out.complete);
        let exact = psi_star_bounded(3, &f, 2, 1_000_000).unwrap();
        assert!(exact.complete);
        assert!(out.value >= BigUint::from(3u32));
    }

    #[test]
    fn parse_growth() {
        assert_eq!("mul:2".parse::<GrowthFn>().unwrap().eval(5).unwrap(), 10);
        assert_eq!("linear:c=3".parse::<GrowthFn>().unwrap().eval(5).unwrap(), 15);
        assert_eq!("affine:3,4".parse::<GrowthFn>().unwrap().eval(2).unwrap(), 10);
        let g: GrowthFn = "ckl2:delta=1/4".parse().unwrap();
        assert_eq!(g.eval(3).unwrap(), 6 + 4);
        assert!("mul:0".parse::<GrowthFn>().is_err());
        assert!("cubic".parse::<GrowthFn>().is_err());
        let shrink = GrowthFn::custom("half", |k| k / 2);
        assert!(shrink.eval(4).is_err());
    }

    #[test]
    fn ckl_profile() {
        let p = CklProfile::new(2);
        assert_eq!(p.bound(1, &ratio(1, 8)).unwrap(), 0);
        assert_eq!(p.bound(2, &ratio(1, 8)).unwrap(), 6);
        assert_eq!(p.bound(2, &ratio(1, 3)).unwrap(), 4);
        assert_eq!(p.bound(2, &ratio(1, 1)).unwrap(), 0);
        assert_eq!(p.bound(3, &ratio(1, 4)).unwrap(), 2 * 16);
        assert!(p.bound(4, &ratio(1, 4)).is_err());
        let p = p.with_higher(|d, _| d as u64 * 100);
        assert_eq!(p.bound(5, &ratio(1, 4)).unwrap(), 500);
    }
}
