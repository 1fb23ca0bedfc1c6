//! Canonical subspaces of F2^m and the sunflower search for equal-dimension
//! families.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::matrix::{reduce, reduce_against};

/// Subspace of F2^m stored by its reduced row echelon basis, so equal
/// subspaces compare equal. Vector bit `j` is coordinate `j + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    m: u32,
    basis: Vec<u64>,
    pivots: Vec<u32>,
}

fn ambient_mask(m: u32) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

impl Subspace {
    pub fn zero(m: u32) -> Self {
        assert!(m <= 64);
        Subspace {
            m,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(m: u32) -> Self {
        Self::span(m, (0..m).map(|i| 1u64 << i)).expect("unit vectors fit")
    }

    pub fn span(m: u32, vectors: impl IntoIterator<Item = u64>) -> Result<Self> {
        if m > 64 {
            return Err(Error::CapExceeded {
                what: "ambient dimension m",
                value: m as u64,
                cap: 64,
            });
        }
        let vecs: Vec<u64> = vectors.into_iter().collect();
        if vecs.iter().any(|v| v & !ambient_mask(m) != 0) {
            return Err(Error::invalid("vector exceeds ambient dimension"));
        }
        let (basis, pivots) = reduce(vecs);
        Ok(Subspace { m, basis, pivots })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        x & !ambient_mask(self.m) == 0 && reduce_against(&self.basis, &self.pivots, x) == 0
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch {
                expected: self.m as usize,
                got: other.m as usize,
            });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Subspace::span(self.m, self.basis.iter().chain(&other.basis).copied())
    }

    /// `{y : <y, v> = 0 for all v in self}`.
    pub fn annihilator(&self) -> Subspace {
        let pivot_mask = self.pivots.iter().fold(0u64, |a, &p| a | (1u64 << p));
        let mut vecs = Vec::new();
        for f in 0..self.m {
            if pivot_mask >> f & 1 == 1 {
                continue;
            }
            let mut y = 1u64 << f;
            for (row, &p) in self.basis.iter().zip(&self.pivots) {
                if row >> f & 1 == 1 {
                    y |= 1u64 << p;
                }
            }
            vecs.push(y);
        }
        Subspace::span(self.m, vecs).expect("within ambient")
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Ok(self.annihilator().sum(&other.annihilator())?.annihilator())
    }

    /// True when `self ∩ other = {0}`.
    pub fn meets_trivially(&self, other: &Subspace) -> bool {
        self.sum(other)
            .map(|s| s.dim() == self.dim() + other.dim())
            .unwrap_or(false)
    }

    /// All `2^dim` elements, including zero.
    pub fn elements(&self) -> Vec<u64> {
        let mut out = vec![0u64];
        for &b in &self.basis {
            let more: Vec<u64> = out.iter().map(|&v| v ^ b).collect();
            out.extend(more);
        }
        out
    }

    /// `self ∩ {x : x_p = 0}` where `p` is the lowest set bit of `x`. For
    /// `x` in `self` this drops exactly one dimension and avoids `x`.
    pub fn hyperplane_section(&self, x: u64) -> Subspace {
        debug_assert!(self.contains(x) && x != 0);
        let pb = x & x.wrapping_neg();
        let vecs = self.basis.iter().map(|&b| if b & pb != 0 { b ^ x } else { b });
        Subspace::span(self.m, vecs).expect("within ambient")
    }

    pub fn random(m: u32, k: usize, rng: &mut impl Rng) -> Subspace {
        assert!(k as u32 <= m);
        loop {
            let vecs: Vec<u64> = (0..k).map(|_| rng.gen::<u64>() & ambient_mask(m)).collect();
            let s = Subspace::span(m, vecs).expect("within ambient");
            if s.dim() == k {
                return s;
            }
        }
    }

    pub fn to_json(&self) -> SubspaceJson {
        SubspaceJson {
            m: self.m,
            basis: self.basis.iter().map(|&v| bitstring(v, self.m)).collect(),
        }
    }

    pub fn from_json(j: &SubspaceJson) -> Result<Subspace> {
        let vecs = j
            .basis
            .iter()
            .map(|s| parse_bitstring(s, j.m))
            .collect::<Result<Vec<_>>>()?;
        Subspace::span(j.m, vecs)
    }
}

/// `{m, basis: [bitstrings]}`; character `j` of a bitstring is coordinate
/// `j + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub m: u32,
    pub basis: Vec<String>,
}

pub fn bitstring(v: u64, m: u32) -> String {
    (0..m).map(|j| if v >> j & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn parse_bitstring(s: &str, m: u32) -> Result<u64> {
    if s.len() != m as usize {
        return Err(Error::DimensionMismatch {
            expected: m as usize,
            got: s.len(),
        });
    }
    s.bytes().enumerate().try_fold(0u64, |acc, (j, c)| match c {
        b'0' => Ok(acc),
        b'1' => Ok(acc | (1u64 << j)),
        _ => Err(Error::Parse {
            pos: j,
            msg: "bitstring must contain only 0 and 1".into(),
        }),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sunflower {
    pub core: Subspace,
    /// Positions in the input collection, increasing.
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SunflowerSearch {
    /// Largest validated sunflower found; `None` if nothing with two or more
    /// members was found.
    pub sunflower: Option<Sunflower>,
    pub target: usize,
    /// Whether the collection size meets `s^{k+1} 2^{(k^2+k-2)/2}`.
    pub hypothesis_met: bool,
}

impl SunflowerSearch {
    pub fn found(&self) -> bool {
        self.sunflower.as_ref().is_some_and(|s| s.indices.len() >= self.target)
    }
}

/// `s^{k+1} * 2^{(k^2+k-2)/2}`.
pub fn sunflower_threshold(k: usize, s: usize) -> BigUint {
    let exp = (k * k + k - 2) / 2;
    BigUint::from(s).pow(k as u32 + 1) << exp
}

/// Checks the sunflower condition directly and returns the core.
pub fn validate_sunflower(spaces: &[Subspace], indices: &[usize]) -> Option<Subspace> {
    let first = spaces.get(*indices.first()?)?;
    let mut core = first.clone();
    for &i in &indices[1..] {
        core = core.intersect(spaces.get(i)?).ok()?;
    }
    for (a, &i) in indices.iter().enumerate() {
        for &j in &indices[a + 1..] {
            if spaces[i].intersect(&spaces[j]).ok()? != core {
                return None;
            }
        }
    }
    Some(core)
}

const PIVOT_TRIES: usize = 8;

/// Searches `spaces` (all of dimension `k >= 1`) for a sunflower with at
/// least `s` members by peeling a popular vector and recursing on
/// codimension-one sections. Collections below the size threshold are
/// searched best-effort.
pub fn find_sunflower(spaces: &[Subspace], s: usize) -> Result<SunflowerSearch> {
    let Some(first) = spaces.first() else {
        return Ok(SunflowerSearch {
            sunflower: None,
            target: s,
            hypothesis_met: s == 0,
        });
    };
    let (m, k) = (first.m(), first.dim());
    if k == 0 {
        return Err(Error::invalid("subspaces must have dimension at least 1"));
    }
    if let Some(bad) = spaces.iter().find(|v| v.dim() != k || v.m() != m) {
        return Err(Error::invalid(format!(
            "mixed dimensions: expected dim {k} in F2^{m}, found dim {} in F2^{}",
            bad.dim(),
            bad.m()
        )));
    }
    let hypothesis_met = BigUint::from(spaces.len()) >= sunflower_threshold(k, s);
    let items: Vec<(usize, Subspace)> = spaces.iter().cloned().enumerate().collect();
    let family = search(&items, k, s);
    let sunflower = if family.len() >= 2 || (family.len() == 1 && s <= 1) {
        let mut indices = family;
        indices.sort_unstable();
        let core = validate_sunflower(spaces, &indices)
            .ok_or_else(|| Error::invariant("sunflower search produced an invalid family"))?;
        Some(Sunflower { core, indices })
    } else {
        None
    };
    Ok(SunflowerSearch {
        sunflower,
        target: s,
        hypothesis_met,
    })
}

/// Returns original indices of a sunflower inside `items`; the largest one
/// found when no family of size `s` turns up.
fn search(items: &[(usize, Subspace)], k: usize, s: usize) -> Vec<usize> {
    if items.is_empty() {
        return Vec::new();
    }
    if k == 1 {
        let mut groups: BTreeMap<&Subspace, Vec<usize>> = BTreeMap::new();
        for (idx, v) in items {
            groups.entry(v).or_default().push(*idx);
        }
        let distinct: Vec<usize> = groups.values().map(|g| g[0]).collect();
        let biggest = groups
            .values()
            .max_by(|a, b| a.len().cmp(&b.len()).then_with(|| b[0].cmp(&a[0])))
            .cloned()
            .unwrap_or_default();
        return if biggest.len() >= distinct.len() {
            biggest
        } else {
            distinct
        };
    }

    // Maximal family with pairwise trivial intersections, built greedily.
    let mut family: Vec<&(usize, Subspace)> = Vec::new();
    for item in items {
        if family.iter().all(|f| f.1.meets_trivially(&item.1)) {
            family.push(item);
        }
    }
    let trivial: Vec<usize> = family.iter().map(|f| f.0).collect();
    if trivial.len() >= s {
        return trivial;
    }

    let mut popularity: HashMap<u64, usize> = HashMap::new();
    for f in &family {
        for x in f.1.elements().into_iter().filter(|&x| x != 0) {
            popularity.entry(x).or_insert(0);
        }
    }
    for (_, v) in items {
        for (x, count) in popularity.iter_mut() {
            if v.contains(*x) {
                *count += 1;
            }
        }
    }
    let mut candidates: Vec<(u64, usize)> = popularity.into_iter().collect();
    candidates.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut best = trivial;
    for &(x, _) in candidates.iter().take(PIVOT_TRIES) {
        let sections: Vec<(usize, Subspace)> = items
            .iter()
            .filter(|(_, v)| v.contains(x))
            .map(|(idx, v)| (*idx, v.hyperplane_section(x)))
            .collect();
        let lifted = search(&sections, k - 1, s);
        if lifted.len() > best.len() {
            best = lifted;
        }
        if best.len() >= s {
            break;
        }
    }
    best
}
