mod common;

use kms_core::exact::{elementary_symmetric, rat, riemann_zeta_partial, valuation, Poly, Rational};
use kms_core::hecke::{apply_hecke, kms_classify, HeckeElement, StratumFunction};
use kms_core::measure::{extremal_label_beta1_gl2, same_coset_label};
use kms_core::padic::{minor_valuations, rank1_normalize, snf_witnesses, stratify, Stratum};
use kms_core::{IntMatrix, RatMatrix};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (-500i64..=500, 1i64..=500)
        .prop_filter("nonzero", |(a, _)| *a != 0)
        .prop_map(|(a, b)| Rational::new(a.into(), b.into()))
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

fn int_matrix(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(prop::collection::vec(-20i64..=20, n), n).prop_map(|rows| {
        IntMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect(),
        )
        .unwrap()
    })
}

fn rank_one_2x2() -> impl Strategy<Value = RatMatrix> {
    (
        nonzero_rational(),
        nonzero_rational(),
        -20i64..=20,
        -20i64..=20,
    )
        .prop_filter("nonzero row", |(_, _, x, y)| *x != 0 || *y != 0)
        .prop_map(|(a, b, x, y)| {
            let (x, y) = (rat(x), rat(y));
            RatMatrix::from_rows(vec![vec![&a * &x, &a * &y], vec![&b * &x, &b * &y]]).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuation_is_additive(a in nonzero_rational(), b in nonzero_rational(), p in prime()) {
        prop_assert_eq!(valuation(&(&a * &b), p).unwrap(), valuation(&a, p).unwrap() + valuation(&b, p).unwrap());
        prop_assert_eq!(valuation(&(&a / &b), p).unwrap(), valuation(&a, p).unwrap() - valuation(&b, p).unwrap());
    }

    #[test]
    fn esym_matches_generating_function(xs in prop::collection::vec(-9i64..=9, 0..7)) {
        let xs: Vec<Rational> = xs.into_iter().map(rat).collect();
        let mut gf = Poly::one();
        for x in &xs {
            gf = &gf * &Poly::new(vec![rat(1), x.clone()]);
        }
        for l in 0..=xs.len() {
            prop_assert_eq!(elementary_symmetric(l, &xs).unwrap(), gf.coeff(l));
            prop_assert_eq!(elementary_symmetric(l, &xs).unwrap(), common::esym_by_subsets(l, &xs));
        }
    }

    #[test]
    fn det_is_multiplicative(a in int_matrix(4), b in int_matrix(4)) {
        prop_assert_eq!((&a * &b).det(), a.det() * b.det());
    }

    #[test]
    fn zeta_partials_increase_within_tail(s in 1.5f64..6.0, terms in 10u64..400) {
        let a = riemann_zeta_partial(s, terms).unwrap();
        let b = riemann_zeta_partial(s, 2 * terms).unwrap();
        prop_assert!(b.value >= a.value);
        prop_assert!(b.value - a.value <= a.tail_bound + a.rounding_bound + b.rounding_bound);
        let (lo, hi) = a.enclosure();
        let (lo2, hi2) = b.enclosure();
        prop_assert!(lo <= hi2 && lo2 <= hi);
    }

    #[test]
    fn stratum_invariant_under_local_units(seed in any::<u64>(), n in 2usize..=3, r in 0usize..=3, p in prime()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = r.min(n);
        let m = common::random_rational_of_rank(&mut rng, n, r);
        let u = common::random_p_integral_gl(&mut rng, n, p);
        let v = common::random_p_integral_gl(&mut rng, n, p);
        let s = stratify(&m, p).unwrap();
        prop_assert_eq!(&stratify(&(&(&u * &m) * &v), p).unwrap(), &s);
        match (&s, m.rank()) {
            (Stratum::Zero, 0) => {}
            (Stratum::Singular(k), rk) => prop_assert_eq!(k.len(), rk),
            (Stratum::Invertible(_), rk) => prop_assert_eq!(rk, n),
            (other, rk) => prop_assert!(false, "{} with rank {}", other, rk),
        }
    }

    #[test]
    fn minor_valuations_are_partial_sums(seed in any::<u64>(), n in 2usize..=3, r in 1usize..=3, p in prime()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = common::random_rational_of_rank(&mut rng, n, r.min(n));
        let w = snf_witnesses(&m, p).unwrap();
        prop_assert_eq!(&(&(&w.b * &m) * &w.c), &w.d);
        let mut exps = w.exponents(p);
        exps.sort_by_key(|e| e.unwrap_or(i64::MAX));
        for k in 1..=n {
            let want = exps[..k].iter().try_fold(0i64, |acc, e| e.map(|e| acc + e));
            prop_assert_eq!(minor_valuations(&m, p, k).unwrap(), want);
        }
    }

    #[test]
    fn hecke_action_is_linear(
        k1 in -2i64..3, d1 in 0i64..3, k2 in -2i64..3, d2 in 0i64..3,
        a in -5i64..=5, b in -5i64..=5, l in 1usize..=2, p in prime(),
    ) {
        let (n, p) = (3usize, p.min(3));
        let f = StratumFunction::indicator(n, p, &[k1, k1 + d1]).unwrap();
        let g = StratumFunction::indicator(n, p, &[k2, k2 + d2]).unwrap();
        let t = HeckeElement::new(n, p, l).unwrap();
        let combo = f.scale(&rat(a)).add_scaled(&g, &rat(b)).unwrap();
        let lhs = apply_hecke(t, &combo).unwrap();
        let rhs = apply_hecke(t, &f).unwrap().scale(&rat(a)).add_scaled(&apply_hecke(t, &g).unwrap(), &rat(b)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn classification_constant_between_integers(n in 2usize..=5, k in 0i64..7, num in 1i64..99, num2 in 1i64..99) {
        let a = rat(k) + Rational::new(num.into(), 100.into());
        let b = rat(k) + Rational::new(num2.into(), 100.into());
        prop_assert_eq!(kms_classify(n, &a).unwrap(), kms_classify(n, &b).unwrap());
    }

    #[test]
    fn rank1_normalizers_differ_by_upper_triangular(m in rank_one_2x2(), p in prime(), c in -6i64..=6, e in 0i64..3) {
        let g = rank1_normalize(&m, p).unwrap();
        let mg = &m * &g;
        prop_assert!(mg[(0, 0)].is_zero() && mg[(1, 0)].is_zero());
        // Another normalizer: g times an upper triangular unit.
        let u = RatMatrix::from_rows(vec![
            vec![rat(1 + p as i64), rat(c)],
            vec![rat(0), rat(if e == 0 { 1 } else { -1 })],
        ]).unwrap();
        let g2 = &g * &u;
        let mg2 = &m * &g2;
        prop_assert!(mg2[(0, 0)].is_zero() && mg2[(1, 0)].is_zero());
        let h = &g.inverse().unwrap() * &g2;
        prop_assert!(h[(1, 0)].is_zero());
        prop_assert!(same_coset_label(&g, &g2, p).unwrap());
    }

    #[test]
    fn labels_depend_only_on_kernel(m in rank_one_2x2(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let primes = [2u64, 3, 5];
        let mut h = common::random_rational_of_rank(&mut rng, 2, 2);
        while h.det().is_zero() {
            h = common::random_rational_of_rank(&mut rng, 2, 2);
        }
        let base = extremal_label_beta1_gl2(&m, &primes).unwrap();
        prop_assert_eq!(&base, &extremal_label_beta1_gl2(&(&h * &m), &primes).unwrap());
        let scale = rat(rng.gen_range(1..=9));
        prop_assert_eq!(&base, &extremal_label_beta1_gl2(&m.map(|x| x * &scale), &primes).unwrap());
        for (p, label) in &base {
            let g = rank1_normalize(&m, *p).unwrap();
            prop_assert!(same_coset_label(&g, &label.representative, *p).unwrap());
        }
    }
}
