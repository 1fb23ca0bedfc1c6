#![allow(dead_code)]

use f2lab_core::gf2::PolyF2;
use rand::Rng;

/// Uniformly random polynomial of degree at most `d` in `m` variables, each
/// monomial present with probability `density`.
pub fn random_poly(rng: &mut impl Rng, m: u32, d: u32, density: f64) -> PolyF2 {
    let masks = (0..1u64 << m).filter(|x| x.count_ones() <= d && rng.gen_bool(density));
    PolyF2::from_masks(m, masks.collect::<Vec<_>>()).unwrap()
}

/// Random homogeneous quadratic `Σ a_i b_i` of `pairs` products of random
/// linear forms, plus a random affine tail.
pub fn random_low_rank_quadratic(rng: &mut impl Rng, m: u32, pairs: usize) -> PolyF2 {
    let lin = |rng: &mut dyn rand::RngCore| {
        let mask = rng.gen_range(1..1u64 << m);
        PolyF2::affine(m, mask, false)
    };
    let mut q = PolyF2::zero(m);
    for _ in 0..pairs {
        q = q.add(&lin(rng).mul(&lin(rng)));
    }
    let tail = rng.gen_range(0..1u64 << m);
    q.add(&PolyF2::affine(m, tail, rng.gen_bool(0.5)))
}

pub fn random_linear(rng: &mut impl Rng, m: u32) -> PolyF2 {
    PolyF2::affine(m, rng.gen_range(1..1u64 << m), rng.gen_bool(0.5))
}

pub fn parse(s: &str) -> PolyF2 {
    PolyF2::parse(s, None).unwrap()
}

pub fn parse_m(s: &str, m: u32) -> PolyF2 {
    PolyF2::parse(s, Some(m)).unwrap()
}
