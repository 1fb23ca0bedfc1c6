//! Restriction of a polynomial to an affine subspace `{x : L_i(x) = b_i}`.

use super::poly::{var_mask, PolyF2};
use crate::error::{Error, Result};

/// Result of [`restrict_affine`]: the polynomial in the free coordinates,
/// re-indexed densely, and the substitution that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub poly: PolyF2,
    /// `free_vars[j]` is the original index of new variable `x_{j+1}`.
    pub free_vars: Vec<u32>,
    /// Eliminated variable (original index) and its affine image in the new
    /// coordinates.
    pub substitution: Vec<(u32, PolyF2)>,
}

impl Restriction {
    /// Maps a point of the affine subspace, given in new coordinates, back to
    /// the ambient space.
    pub fn lift(&self, y: u64, m: u32) -> u64 {
        let mut x = 0u64;
        for (j, &v) in self.free_vars.iter().enumerate() {
            if y >> j & 1 == 1 {
                x |= 1 << (v - 1);
            }
        }
        for (v, img) in &self.substitution {
            if img.eval_mask(y) {
                x |= 1 << (v - 1);
            }
        }
        x & var_mask(m)
    }
}

/// Restricts `p` to the affine subspace cut out by `(L_i, b_i)`.
///
/// Each constraint row is solved for its highest-index variable; the
/// remaining variables are renumbered `1..m'` in increasing order.
pub fn restrict_affine(p: &PolyF2, constraints: &[(PolyF2, bool)]) -> Result<Restriction> {
    let m = constraints.iter().map(|(l, _)| l.m()).fold(p.m(), u32::max);
    // Row = (linear mask, rhs) with L(x) = b  <=>  mask.x = b + const(L).
    let mut rows: Vec<(u64, bool)> = Vec::with_capacity(constraints.len());
    for (l, b) in constraints {
        if l.degree() > 1 {
            return Err(Error::NonLinearConstraint(l.degree()));
        }
        rows.push((l.linear_mask(), *b ^ l.constant_term()));
    }

    // Gauss-Jordan with the highest set bit as pivot.
    let mut reduced: Vec<(u64, bool, u32)> = Vec::new();
    for (mut mask, mut rhs) in rows {
        for &(rm, rb, piv) in &reduced {
            if mask >> piv & 1 == 1 {
                mask ^= rm;
                rhs ^= rb;
            }
        }
        if mask == 0 {
            if rhs {
                return Err(Error::Inconsistent);
            }
            continue;
        }
        let piv = 63 - mask.leading_zeros();
        for row in reduced.iter_mut() {
            if row.0 >> piv & 1 == 1 {
                row.0 ^= mask;
                row.1 ^= rhs;
            }
        }
        reduced.push((mask, rhs, piv));
    }

    let pivot_mask = reduced.iter().fold(0u64, |acc, r| acc | (1u64 << r.2));
    let free_vars: Vec<u32> = (1..=m).filter(|&v| pivot_mask >> (v - 1) & 1 == 0).collect();
    let m_new = free_vars.len() as u32;
    let mut new_index = vec![0u32; m as usize + 1];
    for (j, &v) in free_vars.iter().enumerate() {
        new_index[v as usize] = j as u32 + 1;
    }

    let affine_image = |mask: u64, c: bool| -> PolyF2 {
        let mut nm = 0u64;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() + 1;
            nm |= 1u64 << (new_index[v as usize] - 1);
            rest &= rest - 1;
        }
        PolyF2::affine(m_new, nm, c)
    };

    let mut images: Vec<PolyF2> = Vec::with_capacity(m as usize);
    let mut substitution = Vec::new();
    for v in 1..=m {
        if let Some(&(mask, rhs, piv)) = reduced.iter().find(|r| r.2 == v - 1) {
            let img = affine_image(mask & !(1u64 << piv), rhs);
            substitution.push((v, img.clone()));
            images.push(img);
        } else {
            images.push(PolyF2::var(new_index[v as usize], m_new));
        }
    }
    let widened = p.with_vars(m)?;
    let poly = widened.substitute(&images, m_new)?;
    Ok(Restriction {
        poly,
        free_vars,
        substitution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::truth_table::truth_table;

    fn p(s: &str, m: u32) -> PolyF2 {
        PolyF2::parse(s, Some(m)).unwrap()
    }

    #[test]
    fn fixing_a_variable() {
        let r = restrict_affine(&p("x1*x2", 2), &[(p("x1", 2), true)]).unwrap();
        assert_eq!(r.poly, p("x1", 1));
        assert_eq!(r.free_vars, vec![2]);

        let r = restrict_affine(&p("x1*x2", 2), &[(p("x1", 2), false)]).unwrap();
        assert!(r.poly.is_zero());
    }

    #[test]
    fn substituting_a_sum() {
        // x2 = x1 on the slice; free variables x1, x3 become y1, y2.
        let q = p("x1*x2 + x3", 3);
        let r = restrict_affine(&q, &[(p("x1 + x2", 3), false)]).unwrap();
        assert_eq!(r.free_vars, vec![1, 3]);
        assert_eq!(r.poly, p("x1 + x2", 2));
        let full = truth_table(&q).unwrap();
        let sub = truth_table(&r.poly).unwrap();
        for y in 0..4u64 {
            let x = r.lift(y, 3);
            assert_eq!(x & 1, x >> 1 & 1);
            assert_eq!(sub.get(y), full.get(x));
        }
    }

    #[test]
    fn errors() {
        let q = p("x1*x2", 2);
        assert!(matches!(
            restrict_affine(&q, &[(p("x1", 2), true), (p("x1", 2), false)]),
            Err(Error::Inconsistent)
        ));
        assert!(matches!(
            restrict_affine(&q, &[(p("x1*x2", 2), true)]),
            Err(Error::NonLinearConstraint(2))
        ));
    }
}
