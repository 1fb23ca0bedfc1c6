use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard representation limit: one `u64` mask per monomial.
pub const MAX_VARS: u32 = 64;

/// A squarefree monomial. Bit `i - 1` set means `x_i` divides it; the empty
/// mask is the constant 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial(pub u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn var(i: u32) -> Monomial {
        assert!((1..=MAX_VARS).contains(&i), "variable index out of range");
        Monomial(1u64 << (i - 1))
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    /// 1-based variable indices in increasing order.
    pub fn vars(self) -> impl Iterator<Item = u32> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros();
            rest &= rest - 1;
            Some(i + 1)
        })
    }

    #[inline]
    pub fn eval(self, x: u64) -> bool {
        self.0 & !x == 0
    }
}

pub(crate) fn var_mask(m: u32) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

/// Multilinear polynomial over F2 in algebraic normal form.
///
/// Monomials are kept sorted by mask with no duplicates, so structural
/// equality is pointwise equality for a fixed `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyF2 {
    m: u32,
    monos: Vec<u64>,
}

impl PolyF2 {
    pub fn zero(m: u32) -> Self {
        assert!(m <= MAX_VARS);
        PolyF2 { m, monos: Vec::new() }
    }

    pub fn one(m: u32) -> Self {
        assert!(m <= MAX_VARS);
        PolyF2 { m, monos: vec![0] }
    }

    pub fn constant(m: u32, bit: bool) -> Self {
        if bit {
            Self::one(m)
        } else {
            Self::zero(m)
        }
    }

    /// The variable `x_i` (1-based) in `m` variables.
    pub fn var(i: u32, m: u32) -> Self {
        assert!(i >= 1 && i <= m && m <= MAX_VARS, "x{i} not in 1..={m}");
        PolyF2 {
            m,
            monos: vec![1u64 << (i - 1)],
        }
    }

    /// The homogeneous linear form with coefficient mask `mask` plus `c`.
    pub fn affine(m: u32, mask: u64, c: bool) -> Self {
        assert!(mask & !var_mask(m) == 0, "linear mask exceeds m");
        let mut monos = Vec::with_capacity(mask.count_ones() as usize + 1);
        if c {
            monos.push(0);
        }
        let mut rest = mask;
        while rest != 0 {
            monos.push(rest & rest.wrapping_neg());
            rest &= rest - 1;
        }
        monos.sort_unstable();
        PolyF2 { m, monos }
    }

    /// Sum of the given monomials; repeated masks cancel in pairs.
    pub fn from_masks(m: u32, masks: impl IntoIterator<Item = u64>) -> Result<Self> {
        if m > MAX_VARS {
            return Err(Error::CapExceeded {
                what: "variable count m",
                value: m as u64,
                cap: MAX_VARS as u64,
            });
        }
        let limit = var_mask(m);
        let mut monos: Vec<u64> = masks.into_iter().collect();
        if let Some(bad) = monos.iter().find(|&&mk| mk & !limit != 0) {
            let index = 64 - bad.leading_zeros();
            return Err(Error::VariableIndex {
                index: index as u64,
                max: m,
            });
        }
        Ok(Self::canonical(m, std::mem::take(&mut monos)))
    }

    pub(crate) fn from_sorted_unchecked(m: u32, monos: Vec<u64>) -> Self {
        debug_assert!(monos.windows(2).all(|w| w[0] < w[1]));
        PolyF2 { m, monos }
    }

    fn canonical(m: u32, mut monos: Vec<u64>) -> Self {
        monos.sort_unstable();
        let mut out = Vec::with_capacity(monos.len());
        let mut i = 0;
        while i < monos.len() {
            let mut j = i;
            while j < monos.len() && monos[j] == monos[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                out.push(monos[i]);
            }
            i = j;
        }
        PolyF2 { m, monos: out }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.monos.iter().map(|&mk| Monomial(mk))
    }

    pub fn masks(&self) -> &[u64] {
        &self.monos
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.monos.iter().map(|mk| mk.count_ones()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.monos.iter().all(|&mk| mk == 0)
    }

    pub fn constant_term(&self) -> bool {
        self.monos.first() == Some(&0)
    }

    /// Coefficient mask of the degree-1 part.
    pub fn linear_mask(&self) -> u64 {
        self.monos
            .iter()
            .filter(|mk| mk.count_ones() == 1)
            .fold(0, |acc, mk| acc | mk)
    }

    pub fn is_affine(&self) -> bool {
        self.degree() <= 1
    }

    /// Mask of all variables that occur in some monomial.
    pub fn support(&self) -> u64 {
        self.monos.iter().fold(0, |acc, mk| acc | mk)
    }

    /// Drops the constant term.
    pub fn homogeneous_part(&self) -> PolyF2 {
        let monos = self.monos.iter().copied().filter(|&mk| mk != 0).collect();
        PolyF2 { m: self.m, monos }
    }

    /// The part of exact degree `deg`.
    pub fn part_of_degree(&self, deg: u32) -> PolyF2 {
        let monos = self.monos.iter().copied().filter(|mk| mk.count_ones() == deg).collect();
        PolyF2 { m: self.m, monos }
    }

    pub fn with_vars(&self, m: u32) -> Result<PolyF2> {
        if m > MAX_VARS {
            return Err(Error::CapExceeded {
                what: "variable count m",
                value: m as u64,
                cap: MAX_VARS as u64,
            });
        }
        if self.support() & !var_mask(m) != 0 {
            return Err(Error::VariableIndex {
                index: (64 - self.support().leading_zeros()) as u64,
                max: m,
            });
        }
        Ok(PolyF2 {
            m,
            monos: self.monos.clone(),
        })
    }

    fn widened(&self, m: u32) -> PolyF2 {
        PolyF2 {
            m: m.max(self.m),
            monos: self.monos.clone(),
        }
    }

    /// Evaluates at the point whose bit `i - 1` is `x_i`.
    #[inline]
    pub fn eval_mask(&self, x: u64) -> bool {
        self.monos.iter().fold(false, |acc, &mk| acc ^ (mk & !x == 0))
    }

    pub fn evaluate(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.m as usize {
            return Err(Error::DimensionMismatch {
                expected: self.m as usize,
                got: x.len(),
            });
        }
        let mask = x.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i));
        Ok(self.eval_mask(mask))
    }

    pub fn add(&self, other: &PolyF2) -> PolyF2 {
        let m = self.m.max(other.m);
        let (a, b) = (&self.monos, &other.monos);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        PolyF2 { m, monos: out }
    }

    pub fn mul(&self, other: &PolyF2) -> PolyF2 {
        let m = self.m.max(other.m);
        let mut prods = Vec::with_capacity(self.monos.len() * other.monos.len());
        for &a in &self.monos {
            for &b in &other.monos {
                prods.push(a | b);
            }
        }
        Self::canonical(m, prods)
    }

    pub fn add_constant(&self, bit: bool) -> PolyF2 {
        if bit {
            self.add(&PolyF2::one(self.m))
        } else {
            self.clone()
        }
    }

    /// Composes with `images`: `x_i` becomes `images[i - 1]`. The result
    /// lives in `m_out` variables.
    pub fn substitute(&self, images: &[PolyF2], m_out: u32) -> Result<PolyF2> {
        if self.support().checked_shr(images.len() as u32).unwrap_or(0) != 0 {
            return Err(Error::DimensionMismatch {
                expected: self.m as usize,
                got: images.len(),
            });
        }
        let mut acc = PolyF2::zero(m_out);
        for &mk in &self.monos {
            let mut term = PolyF2::one(m_out);
            for v in Monomial(mk).vars() {
                term = term.mul(&images[(v - 1) as usize]);
                if term.is_zero() {
                    break;
                }
            }
            acc = acc.add(&term);
        }
        acc.m = m_out;
        if acc.support() & !var_mask(m_out) != 0 {
            return Err(Error::invalid("substitution image exceeds output variable count"));
        }
        Ok(acc)
    }

    /// Parses the `x_i` grammar; see the crate README for the syntax.
    pub fn parse(text: &str, m: Option<u32>) -> Result<PolyF2> {
        let masks = parse_terms(text)?;
        let highest = masks.iter().map(|mk| 64 - mk.leading_zeros()).max().unwrap_or(0);
        let m = match m {
            Some(m) => {
                if m > MAX_VARS {
                    return Err(Error::CapExceeded {
                        what: "variable count m",
                        value: m as u64,
                        cap: MAX_VARS as u64,
                    });
                }
                if highest > m {
                    return Err(Error::VariableIndex {
                        index: highest as u64,
                        max: m,
                    });
                }
                m
            }
            None => highest,
        };
        Ok(Self::canonical(m, masks))
    }
}

fn parse_terms(text: &str) -> Result<Vec<u64>> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let err = |pos: usize, msg: &str| Error::Parse {
        pos,
        msg: msg.to_string(),
    };

    let mut terms = Vec::new();
    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(err(pos, "empty expression"));
    }
    // "0" is accepted as the zero polynomial on its own.
    if text.trim() == "0" {
        return Ok(terms);
    }
    loop {
        skip_ws(&mut pos);
        let mut mask = 0u64;
        if pos < bytes.len() && bytes[pos] == b'1' {
            pos += 1;
        } else {
            loop {
                skip_ws(&mut pos);
                if pos >= bytes.len() || bytes[pos] != b'x' {
                    return Err(err(pos, "expected 'x<index>' or '1'"));
                }
                pos += 1;
                skip_ws(&mut pos);
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(err(pos, "expected variable index after 'x'"));
                }
                if bytes[start] == b'0' {
                    return Err(Error::VariableIndex {
                        index: 0,
                        max: MAX_VARS,
                    });
                }
                let index: u64 = text[start..pos].parse().unwrap_or(u64::MAX);
                if index > MAX_VARS as u64 {
                    return Err(Error::VariableIndex { index, max: MAX_VARS });
                }
                mask |= 1u64 << (index - 1);
                skip_ws(&mut pos);
                if pos < bytes.len() && bytes[pos] == b'*' {
                    pos += 1;
                } else {
                    break;
                }
            }
        }
        terms.push(mask);
        skip_ws(&mut pos);
        if pos == bytes.len() {
            break;
        }
        if bytes[pos] != b'+' {
            return Err(err(pos, "expected '+' or end of input"));
        }
        pos += 1;
    }
    Ok(terms)
}

impl fmt::Display for PolyF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monos.is_empty() {
            return f.write_str("0");
        }
        for (t, &mk) in self.monos.iter().enumerate() {
            if t > 0 {
                f.write_str(" + ")?;
            }
            if mk == 0 {
                f.write_str("1")?;
                continue;
            }
            for (k, v) in Monomial(mk).vars().enumerate() {
                if k > 0 {
                    f.write_str("*")?;
                }
                write!(f, "x{v}")?;
            }
        }
        Ok(())
    }
}

impl Add for &PolyF2 {
    type Output = PolyF2;
    fn add(self, rhs: &PolyF2) -> PolyF2 {
        PolyF2::add(self, rhs)
    }
}

impl Mul for &PolyF2 {
    type Output = PolyF2;
    fn mul(self, rhs: &PolyF2) -> PolyF2 {
        PolyF2::mul(self, rhs)
    }
}

/// One expression per line; blank lines and `#` comments are skipped. All
/// results share the largest variable count (or `m` when given).
pub fn parse_poly_lines(text: &str, m: Option<u32>) -> Result<Vec<PolyF2>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let p = PolyF2::parse(body, m).map_err(|e| match e {
            Error::Parse { pos, msg } => Error::Parse {
                pos,
                msg: format!("line {}: {msg}", lineno + 1),
            },
            other => other,
        })?;
        out.push(p);
    }
    Ok(common_vars(&out).1)
}

/// Brings a list of polynomials to a common variable count.
pub fn common_vars(polys: &[PolyF2]) -> (u32, Vec<PolyF2>) {
    let m = polys.iter().map(|p| p.m).max().unwrap_or(0);
    (m, polys.iter().map(|p| p.widened(m)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PolyF2 {
        PolyF2::parse(s, None).unwrap()
    }

    #[test]
    fn parse_lines() {
        let text = "# factor\nx1*x2\n\n x3 + 1  # trailing\n";
        let ps = parse_poly_lines(text, None).unwrap();
        assert_eq!(ps.len(), 2);
        assert!(ps.iter().all(|p| p.m() == 3));
        let err = parse_poly_lines("x1\nx2 +\n", None).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn parse_examples() {
        let q = p("x1*x2 + x3*x4*x5");
        assert_eq!(q.masks(), &[0b11, 0b11100]);
        assert_eq!(q.degree(), 3);
        assert_eq!(q.m(), 5);

        let one = p("1");
        assert_eq!(one.degree(), 0);
        assert!(one.constant_term());
        assert_eq!(one.m(), 0);

        assert_eq!(p("x1*x1 + x2"), p("x1 + x2"));
        assert_eq!(p(" x2 +x1 + x2 "), p("x1").with_vars(2).unwrap());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            PolyF2::parse("x0", None),
            Err(Error::VariableIndex { index: 0, .. })
        ));
        assert!(matches!(
            PolyF2::parse("x65", None),
            Err(Error::VariableIndex { index: 65, .. })
        ));
        assert!(matches!(
            PolyF2::parse("x1 + x4", Some(3)),
            Err(Error::VariableIndex { index: 4, max: 3 })
        ));
        match PolyF2::parse("x1 + + x2", None) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(PolyF2::parse("x1 - x2", None).is_err());
        assert!(PolyF2::parse("(x1)", None).is_err());
        assert!(PolyF2::parse("", None).is_err());
    }

    #[test]
    fn display_is_canonical() {
        let q = p("x3 + x2*x1 + 1 + x5*x4*x3");
        assert_eq!(q.to_string(), "1 + x1*x2 + x3 + x3*x4*x5");
        assert_eq!(p(&q.to_string()), q);
        assert_eq!(PolyF2::zero(3).to_string(), "0");
    }

    #[test]
    fn evaluation() {
        let q = p("x1*x2");
        assert!(q.evaluate(&[true, true]).unwrap());
        assert!(!q.evaluate(&[true, false]).unwrap());
        assert!(p("x1 + x2 + 1").evaluate(&[true, true]).unwrap());
        assert!(matches!(q.evaluate(&[true]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn arithmetic() {
        assert!(p("x1").add(&p("x1")).is_zero());
        assert_eq!(p("x1 + 1").mul(&p("x2")), p("x1*x2 + x2"));
        assert_eq!(p("x1*x2").mul(&p("x2*x3")), p("x1*x2*x3"));
        assert_eq!(p("x1 + 1").mul(&p("x1 + 1")), p("x1 + 1"));
    }

    #[test]
    fn substitution() {
        // x1*x2 with x1 -> y1 + y2, x2 -> y1  gives y1 + y1*y2
        let q = p("x1*x2");
        let imgs = [p("x1 + x2"), p("x1").with_vars(2).unwrap()];
        assert_eq!(q.substitute(&imgs, 2).unwrap(), p("x1 + x1*x2"));
    }
}
