//! Property tests for the module invariants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

use arithline::affine_line::{eval_line_seminorm, LinePoint};
use arithline::base_space::{eval_base_seminorm, BaseCompact, BasePoint, Place};
use arithline::cousin_cartan::{
    cartan_factorize, split_laurent_sides, split_rational, split_series_arith, LaurentSplit, SeriesMatrix, SplitSystem,
};
use arithline::covers_galois::{
    cyclic_cover_split, group_cover_data, group_library, primitive_root_of_unity, CoverDescriptor,
};
use arithline::norm::{NormValue, Precision};
use arithline::poly::Poly;
use arithline::rational::p_pow;
use arithline::series_ring::{
    compare_annulus_factor, invert_unit, norm_annulus, uniform_norm_annulus, AnnulusSpec, Congruence, LaurentPoly,
};
use arithline::weierstrass::{divide, global_threshold, hensel_lift_root, HenselRing, HenselRoot};

type Q = BigRational;

fn qf(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn prec() -> Precision {
    Precision::default()
}

fn rat(bound: i64) -> impl Strategy<Value = Q> {
    (-bound..=bound, 1..=bound).prop_map(|(n, d)| qf(n, d))
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

fn exponent() -> impl Strategy<Value = Q> {
    prop::sample::select(vec![qf(1, 3), qf(1, 2), qf(1, 1), qf(3, 2), qf(2, 1)])
}

fn finite_point() -> impl Strategy<Value = BasePoint> {
    (prime(), exponent()).prop_map(|(p, e)| BasePoint::branch(Place::Finite(p), e).unwrap())
}

fn poly(deg: usize, bound: i64) -> impl Strategy<Value = Poly> {
    prop::collection::vec(rat(bound), 1..=deg + 1).prop_map(Poly::new)
}

fn laurent(lo: i64, hi: i64, bound: i64) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((lo..=hi, rat(bound)), 1..5).prop_map(|v| LaurentPoly::from_pairs(&v))
}

fn single_point(p: u64, e: Q) -> BaseCompact {
    BaseCompact::point(&BasePoint::branch(Place::Finite(p), e).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn base_multiplicative_with_narrow_enclosures(f in rat(1000), g in rat(1000), x in finite_point()) {
        let e = |a: &Q| eval_base_seminorm(a, &x, prec()).unwrap();
        let lhs = e(&(&f * &g));
        let rhs = e(&f).mul(&e(&g), prec());
        if lhs.is_exact() && rhs.is_exact() {
            prop_assert_eq!(lhs, rhs);
        } else {
            prop_assert!(lhs.overlaps(&rhs));
            prop_assert!(lhs.width() <= p_pow(2, -64) * (lhs.hi() + Q::one()));
        }
    }

    #[test]
    fn base_ultrametric(f in rat(1000), g in rat(1000), x in finite_point()) {
        let e = |a: &Q| eval_base_seminorm(a, &x, prec()).unwrap();
        let sum = e(&(&f + &g));
        let mx = e(&f).max(&e(&g), prec());
        // Certified unless both sides enclose the same number.
        prop_assert!(sum.certainly_le(&mx) || sum.overlaps(&mx));
        prop_assert!(sum.lo() <= mx.hi());
    }

    #[test]
    fn disk_monotone_in_radius(f in poly(4, 30), p in prime(), alpha in rat(9), r1 in 0i64..6, r2 in 0i64..6) {
        let base = BasePoint::branch(Place::Finite(p), Q::one()).unwrap();
        let (a, b) = (qf(r1.min(r2), 2), qf(r1.max(r2), 2));
        let x = LinePoint::um(base.clone(), alpha.clone(), a).unwrap();
        let y = LinePoint::um(base, alpha, b).unwrap();
        prop_assert!(eval_line_seminorm(&f, &x, prec()).unwrap().certainly_le(&eval_line_seminorm(&f, &y, prec()).unwrap()));
    }

    #[test]
    fn disk_center_invariance(f in poly(4, 30), p in prime(), alpha in rat(9), k in 0i64..4, c in -20i64..20, r in 1i64..5) {
        let base = BasePoint::branch(Place::Finite(p), Q::one()).unwrap();
        let beta = &alpha + p_pow(p, k) * qf(c, 1);
        let r = qf(r, 4);
        let dist = eval_base_seminorm(&(&alpha - &beta), &base, prec()).unwrap();
        prop_assume!(dist.le_q(&r));
        let x = LinePoint::um(base.clone(), alpha, r.clone()).unwrap();
        let y = LinePoint::um(base, beta, r).unwrap();
        prop_assert_eq!(eval_line_seminorm(&f, &x, prec()).unwrap(), eval_line_seminorm(&f, &y, prec()).unwrap());
    }

    #[test]
    fn annulus_norm_submultiplicative(f in laurent(-3, 3, 40), g in laurent(-3, 3, 40), p in prime(), s in 1i64..4, dt in 0i64..4) {
        let a = AnnulusSpec::new(single_point(p, Q::one()), qf(s, 2), qf(s + dt, 2)).unwrap();
        let n = |h: &LaurentPoly| norm_annulus(h, &a, prec()).unwrap();
        prop_assert!(n(&f.mul(&g)).certainly_le(&n(&f).mul(&n(&g), prec())));
    }

    #[test]
    fn uniform_norm_power_multiplicative(f in laurent(-2, 2, 30), p in prime(), e in exponent(), k in 1u32..4) {
        let a = AnnulusSpec::new(single_point(p, e), qf(1, 2), qf(3, 1)).unwrap();
        let u = |h: &LaurentPoly| uniform_norm_annulus(h, &a, prec()).unwrap();
        let lhs = u(&f.pow(k));
        let rhs = u(&f).pow_i(k as i64, prec()).unwrap();
        if lhs.is_exact() && rhs.is_exact() {
            prop_assert_eq!(lhs, rhs);
        } else {
            prop_assert!(lhs.overlaps(&rhs));
        }
    }

    #[test]
    fn coefficient_bound_and_norm_comparison(f in laurent(-3, 3, 40), p in prime(), s in 1i64..3, u in 0i64..3, w in 0i64..3, dt in 1i64..3) {
        // s < u <= v < t on a grid of quarters.
        let s_q = qf(s, 4);
        let u_q = &s_q + qf(u + 1, 4);
        let v_q = &u_q + qf(w, 4);
        let t_q = &v_q + qf(dt, 4);
        let v = single_point(p, Q::one());
        let big = AnnulusSpec::new(v.clone(), s_q.clone(), t_q.clone()).unwrap();
        let unif = uniform_norm_annulus(&f, &big, prec()).unwrap();
        for (k, c) in f.coeffs() {
            let w = if *k >= 0 { num_traits::pow(t_q.clone(), *k as usize) } else { num_traits::pow(s_q.recip(), (-k) as usize) };
            let ck = eval_base_seminorm(c, &BasePoint::branch(Place::Finite(p), Q::one()).unwrap(), prec()).unwrap().scale(&w, prec());
            prop_assert!(ck.certainly_le(&unif));
        }
        let small = AnnulusSpec::new(v, u_q.clone(), v_q.clone()).unwrap();
        let factor = compare_annulus_factor(&s_q, &t_q, &u_q, &v_q).unwrap();
        prop_assert!(norm_annulus(&f, &small, prec()).unwrap().certainly_le(&unif.scale(&factor, prec())));
    }

    #[test]
    fn invert_unit_congruence(h in laurent(1, 4, 20), m in 4i64..20) {
        let f = LaurentPoly::one().add(&h.scale(&qf(1, 100)));
        let a = AnnulusSpec::disk(BaseCompact::central(), qf(1, 4)).unwrap();
        if let Ok(inv) = invert_unit(&f, &a, m, prec()) {
            prop_assert_eq!(inv.congruence.clone(), Congruence::ModT(m));
            prop_assert!(f.mul(&inv.g).eq_mod(&LaurentPoly::one(), m));
        }
    }

    #[test]
    fn division_identity(fc in prop::collection::vec(-100i64..=100, 1..13), gc in prop::collection::vec(-100i64..=100, 1..6)) {
        let mut gc = gc;
        gc.push(1);
        let g = Poly::from_ints(&gc);
        let f = Poly::from_ints(&fc);
        let v = BaseCompact::whole();
        let w = global_threshold(&g, &v, prec()).unwrap();
        let d = divide(&LaurentPoly::from_poly(&f), &g, &v, &w, prec()).unwrap();
        let (q, r) = (d.q.to_poly().unwrap(), d.r.to_poly().unwrap());
        prop_assert_eq!(q.mul(&g).add(&r), f);
        prop_assert!(r.degree().is_none_or(|k| k < g.degree().unwrap()));
        prop_assert!(d.cert.bound_q_ok && d.cert.bound_r_ok);
    }

    #[test]
    fn hensel_lifts_are_consistent(p in prop::sample::select(vec![3u64, 5, 7, 11]), a0 in 1i64..11, t in 0i64..30, n in 2u32..10) {
        prop_assume!((a0 as u64) < p);
        let c = a0 * a0 + p as i64 * t;
        let lift = |n| match hensel_lift_root(&HenselRing::Padic { poly: Poly::from_ints(&[-c, 0, 1]), p, f0: BigInt::from(a0), n }).unwrap().root {
            HenselRoot::Padic(x) => x,
            HenselRoot::Series(_) => unreachable!(),
        };
        let (hi, lo) = (lift(n), lift(n - 1));
        let m = p_pow(p, n as i64 - 1).numer().clone();
        prop_assert_eq!(&hi % &m, lo);
    }

    #[test]
    fn rational_split_reconstructs(a in rat(100_000), i in 0usize..4) {
        let place = [Place::Finite(2), Place::Finite(3), Place::Finite(5), Place::Infinite][i];
        let sys = SplitSystem::new(place, Q::one(), None).unwrap();
        let s = split_rational(&a, &sys, prec()).unwrap();
        prop_assert_eq!(&s.a_minus - &s.a_plus, a);
        prop_assert!(s.sides_ok && s.bounds_ok);
    }

    #[test]
    fn series_splits_reconstruct(f in laurent(-4, 4, 200), p in prop::sample::select(vec![2u64, 3, 5])) {
        let (pos, neg) = split_laurent_sides(&f);
        prop_assert_eq!(pos.add(&neg), f.clone());
        let sys = SplitSystem::new(Place::Finite(p), Q::one(), Some((qf(1, 2), qf(2, 1)))).unwrap();
        let s = split_series_arith(&f, &sys, prec()).unwrap();
        prop_assert_eq!(s.f_minus.sub(&s.f_plus), f);
        prop_assert!(s.sides_ok && s.bounds_ok);
    }

    #[test]
    fn cartan_one_sided_is_idempotent(terms in prop::collection::vec((1i64..=3, -3i64..=3), 1..4)) {
        // 1 + negative powers only: already on the minus side.
        let mut pairs: Vec<(i64, Q)> = terms.iter().map(|(k, c)| (-k, qf(*c, 1) * p_pow(2, 7 + k))).collect();
        pairs.push((0, Q::one()));
        let a = LaurentPoly::from_pairs(&pairs);
        let m = SeriesMatrix::new(vec![vec![a.clone()]]).unwrap();
        let sp = LaurentSplit(AnnulusSpec::new(single_point(2, Q::one()), qf(1, 2), qf(2, 1)).unwrap());
        let r = cartan_factorize(&m, &sp, 40, &p_pow(2, -40), prec()).unwrap();
        prop_assert_eq!(r.c_minus.get(0, 0).clone(), a);
        prop_assert_eq!(r.c_plus.get(0, 0).clone(), LaurentPoly::one());
        prop_assert_eq!(r.residual, NormValue::zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn roots_of_unity_lift_consistently(i in 0usize..5, n in 2u32..12) {
        let (k, p) = [(2u64, 3u64), (2, 5), (3, 7), (4, 5), (6, 13)][i];
        let hi = primitive_root_of_unity(k, p, n).unwrap();
        let lo = primitive_root_of_unity(k, p, n - 1).unwrap();
        prop_assert!(hi.pow(k).is_one());
        prop_assert_eq!(hi.reduce(n - 1), lo);
    }

    #[test]
    fn more_precision_never_adds_defects(i in 0usize..3, extra in 0u32..6) {
        let (n, p, base) = [(2u64, 3u64, 16u32), (3, 7, 24), (4, 5, 30)][i];
        let d = CoverDescriptor::build(n, p, 6, base + extra).unwrap();
        prop_assert!(cyclic_cover_split(&d).unwrap().all_zero);
    }
}

#[test]
fn coset_data_tiles_every_group() {
    for (name, g) in group_library() {
        for i in 1..=g.order() {
            let d = group_cover_data(&g, i).unwrap();
            assert_eq!(d.n_i * d.d_i, g.order(), "{name}, i={i}");
            let mut sigma = d.sigma.clone();
            sigma.sort();
            assert_eq!(sigma, (1..=g.order()).collect::<Vec<_>>(), "{name}, i={i}");
        }
    }
}
