mod common;

use f2lab_core::dist::{joint_distribution, Pmf};
use f2lab_core::factors::{
    greedy_independent_support, invlex_compare, psi_bounded, regularity_witness, regularize, verify_reconstruction,
    Factor, GrowthFn,
};
use f2lab_core::gap::{dyadic_gap_floor, dyadic_proximity, min_gap_scan};
use f2lab_core::gf2::{anf_from_truth_table, common_vars, restrict_affine, truth_table, PolyF2, TruthTable};
use f2lab_core::quadratic::{bias_quadratic, dickson_decompose, rank1_bilinear, rank1_quadratic};
use f2lab_core::rational::{self, ratio, Rational};
use f2lab_core::spectral::{dependency_space, pr_one, signed_bias, walsh_spectrum};
use f2lab_core::subspace::Subspace;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn poly(m: u32, d: u32) -> impl Strategy<Value = PolyF2> {
    let monos: Vec<u64> = (0..1u64 << m).filter(|x| x.count_ones() <= d).collect();
    proptest::collection::vec(any::<bool>(), monos.len()).prop_map(move |bits| {
        PolyF2::from_masks(m, monos.iter().zip(&bits).filter(|(_, &b)| b).map(|(&x, _)| x)).unwrap()
    })
}

fn subspace(m: u32) -> impl Strategy<Value = Subspace> {
    proptest::collection::vec(0u64..1 << m, 0..=m as usize).prop_map(move |v| Subspace::span(m, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn text_round_trip(p in poly(7, 3)) {
        let back = PolyF2::parse(&p.to_string(), Some(7)).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn anf_truth_table_round_trip(p in poly(8, 8)) {
        prop_assert_eq!(anf_from_truth_table(&truth_table(&p).unwrap()), p);
    }

    #[test]
    fn ring_operations_match_pointwise(p in poly(6, 3), q in poly(6, 3)) {
        let (tp, tq) = (truth_table(&p).unwrap(), truth_table(&q).unwrap());
        let sum = truth_table(&p.add(&q)).unwrap();
        let prod = truth_table(&p.mul(&q)).unwrap();
        for x in 0..64u64 {
            prop_assert_eq!(sum.get(x), tp.get(x) ^ tq.get(x));
            prop_assert_eq!(prod.get(x), tp.get(x) & tq.get(x));
        }
    }

    #[test]
    fn restriction_agrees_on_the_affine_subspace(p in poly(6, 3), mask in 1u64..64, b in any::<bool>()) {
        let l = PolyF2::affine(6, mask, false);
        let r = restrict_affine(&p, &[(l.clone(), b)]).unwrap();
        let m_new = r.poly.m();
        // Lift each point of the restricted space and compare.
        for y in 0..1u64 << m_new {
            let mut x = 0u64;
            for (j, &v) in r.free_vars.iter().enumerate() {
                if y >> j & 1 == 1 {
                    x |= 1 << (v - 1);
                }
            }
            for (v, img) in &r.substitution {
                if img.eval_mask(y) {
                    x |= 1 << (v - 1);
                }
            }
            prop_assert_eq!(l.eval_mask(x), b);
            prop_assert_eq!(r.poly.eval_mask(y), p.eval_mask(x));
        }
    }

    #[test]
    fn parseval_and_bias(p in poly(7, 3)) {
        let s = walsh_spectrum(&p).unwrap();
        prop_assert_eq!(s.parseval_sum(), rational::one());
        let bias = signed_bias(&p).unwrap();
        prop_assert_eq!(pr_one(&p).unwrap(), (rational::one() - bias) / rational::int(2));
    }

    #[test]
    fn quadratic_oracles_agree(q in poly(8, 2)) {
        let form = dickson_decompose(&q).unwrap();
        prop_assert_eq!(form.reconstruct(), q.clone());
        prop_assert_eq!(bias_quadratic(&q).unwrap(), signed_bias(&q).unwrap());
        let r = rank1_quadratic(&q).unwrap();
        prop_assert_eq!(r, rank1_bilinear(&q).unwrap());
        prop_assert_eq!(r, dependency_space(&q).unwrap().dim());
    }

    #[test]
    fn quadratic_biases_are_signed_powers_of_two(q in poly(8, 2)) {
        let b = bias_quadratic(&q).unwrap();
        let a = if b < rational::zero() { -b.clone() } else { b.clone() };
        prop_assert!(a == rational::zero() || (a.numer() == &BigInt::from(1) && rational::is_dyadic(&a)));
    }

    #[test]
    fn subspace_dimension_formula(v in subspace(7), w in subspace(7)) {
        let sum = v.sum(&w).unwrap();
        let int = v.intersect(&w).unwrap();
        prop_assert_eq!(sum.dim() + int.dim(), v.dim() + w.dim());
        prop_assert_eq!(v.annihilator().dim() + v.dim(), 7);
        for x in int.elements() {
            prop_assert!(v.contains(x) && w.contains(x));
        }
    }

    #[test]
    fn tv_is_a_metric(a in proptest::collection::vec(poly(5, 2), 2), b in proptest::collection::vec(poly(5, 2), 2), c in proptest::collection::vec(poly(5, 2), 2)) {
        let (da, db, dc) = (
            joint_distribution(&a).unwrap(),
            joint_distribution(&b).unwrap(),
            joint_distribution(&c).unwrap(),
        );
        let ab = da.tv_between(&db).unwrap();
        prop_assert_eq!(ab.clone(), db.tv_between(&da).unwrap());
        prop_assert!(ab <= da.tv_between(&dc).unwrap() + dc.tv_between(&db).unwrap());
        prop_assert!(ab >= rational::zero() && ab <= rational::one());
        let total: Rational = da.to_pmf().probs().values().cloned().sum();
        prop_assert_eq!(total, rational::one());
    }

    #[test]
    fn tv_to_product_agrees_with_pmf(a in proptest::collection::vec(poly(5, 2), 1..=3)) {
        let d = joint_distribution(&a).unwrap();
        let rho = ratio(1, 3);
        let target = Pmf::product_bernoulli(d.n(), &rho).unwrap();
        prop_assert_eq!(d.tv_to_product_bernoulli(&rho).unwrap(), d.to_pmf().tv(&target).unwrap());
    }

    #[test]
    fn greedy_support_factorizes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let polys: Vec<PolyF2> = (0..6).map(|_| common::random_low_rank_quadratic(&mut rng, 10, 1)).collect();
        let idx = greedy_independent_support(&polys).unwrap();
        let chosen: Vec<PolyF2> = idx.iter().map(|&i| polys[i].clone()).collect();
        prop_assert!(joint_distribution(&chosen).unwrap().is_product());
        let spaces: Vec<Subspace> = chosen.iter().map(|p| dependency_space(&p.with_vars(10).unwrap()).unwrap()).collect();
        for i in 0..spaces.len() {
            for j in i + 1..spaces.len() {
                prop_assert!(spaces[i].meets_trivially(&spaces[j]));
            }
        }
    }

    #[test]
    fn regularize_is_regular_and_reconstructs(members in proptest::collection::vec(poly(6, 2), 1..=4)) {
        let members: Vec<PolyF2> = members.into_iter().filter(|p| !p.is_constant()).collect();
        prop_assume!(!members.is_empty());
        let f = Factor::from_polys(members.clone()).unwrap();
        let growth = GrowthFn::Identity;
        let out = regularize(&f, &growth).unwrap();
        let level = growth.eval(out.factor.dim() as u64).unwrap();
        prop_assert!(regularity_witness(&out.factor, level).unwrap().is_regular());
        let (m, members) = common_vars(&members);
        prop_assert!(verify_reconstruction(&members, &out.gamma, out.factor.members(), m).unwrap());
        prop_assert_ne!(out.within_bound, Some(false));
    }

    #[test]
    fn psi_is_monotone(d in 1usize..=3, a in proptest::collection::vec(0u64..4, 3), b in proptest::collection::vec(0u64..4, 3), which in 0usize..3) {
        let f = [GrowthFn::Identity, GrowthFn::Mul(2), GrowthFn::Add(1)][which].clone();
        let (mut a, mut b) = (a[..d].to_vec(), b[..d].to_vec());
        if d == 3 {
            a[2] = a[2].min(1);
            b[2] = b[2].min(1);
        }
        if invlex_compare(&a, &b).unwrap() == std::cmp::Ordering::Greater {
            std::mem::swap(&mut a, &mut b);
        }
        prop_assume!(a.iter().sum::<u64>() <= b.iter().sum::<u64>());
        let (pa, pb) = (psi_bounded(d, &f, &a, 200_000).unwrap(), psi_bounded(d, &f, &b, 200_000).unwrap());
        prop_assume!(pa.complete && pb.complete);
        prop_assert!(pa.value <= pb.value);
    }

    #[test]
    fn dyadics_keep_away_from_one_third(s in 0u64..=64, offset in -5i64..=5) {
        let center = (BigInt::from(1) << s) / 3;
        let x = Rational::new(center + offset, BigInt::from(1) << s);
        let d = if x > ratio(1, 3) { x - ratio(1, 3) } else { ratio(1, 3) - x };
        prop_assert!(d >= dyadic_gap_floor(s));
    }

    #[test]
    fn dyadic_certificate_is_sound(qs in proptest::collection::vec(poly(6, 2), 1..=3), gamma_bits in any::<u8>(), t in 1u64..=3) {
        let r = qs.len();
        let gamma: Vec<bool> = (0..1 << r).map(|i| gamma_bits >> i & 1 == 1).collect();
        let c = dyadic_proximity(&gamma, &qs, t).unwrap();
        let tables: Vec<TruthTable> = qs.iter().map(|q| truth_table(q).unwrap()).collect();
        let p = TruthTable::from_fn(6, |x| {
            let y = tables.iter().enumerate().fold(0usize, |a, (i, tb)| a | (usize::from(tb.get(x)) << i));
            gamma[y]
        }).unwrap();
        prop_assert_eq!(&c.signed_bias, &signed_bias(&anf_from_truth_table(&p)).unwrap());
        prop_assert!(c.achieved_err <= c.tail_bound);
        prop_assert!(c.s <= c.s_bound());
        if let Some(floor) = &c.gap_floor {
            prop_assert!(c.gap >= *floor);
        }
    }
}

#[test]
fn quadratic_scan_is_monotone_and_bounded() {
    let third = ratio(1, 3);
    let mut last = rational::one();
    for m in 1..=5 {
        let s = min_gap_scan(2, m, &third).unwrap();
        assert!(s.min_gap <= last);
        assert!(s.min_gap >= ratio(1, 24));
        assert!(s.census.keys().all(rational::is_dyadic));
        last = s.min_gap;
    }
}
