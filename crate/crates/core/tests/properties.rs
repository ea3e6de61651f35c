mod common;

use common::*;
use descfact::io::{format_complex, parse_complex, to_json, SystemFile};
use descfact::linalg::cholesky_update;
use descfact::postproc::{left_from_dual, right_from_left};
use descfact::verify::probe_points;
use descfact::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        -10.0..10.0f64,
        Just(0.0),
        Just(-0.0),
    ]
}

proptest! {
    #![proptest_config(config(512))]

    #[test]
    fn complex_text_round_trips(re in finite(), im in finite()) {
        let z = C::new(re, im);
        let back = parse_complex(&format_complex(z)).unwrap();
        prop_assert_eq!(back, z);
        prop_assert_eq!(back.im.to_bits(), im.to_bits());
    }

    #[test]
    fn cholesky_update_matches_gram(
        n in 1usize..7,
        k in 1usize..4,
        vals in prop::collection::vec(-5.0..5.0f64, 7 * 7 + 4 * 7),
    ) {
        let r = DMatrix::from_fn(n, n, |i, j| if i <= j { vals[i * 7 + j] } else { 0.0 });
        let x = DMatrix::from_fn(k, n, |i, j| vals[49 + i * 7 + j]);
        let r2 = cholesky_update(&r, &x);
        let want = r.transpose() * &r + x.transpose() * &x;
        let scale = r.norm_squared() + x.norm_squared();
        prop_assert!((r2.transpose() * &r2 - want).norm() <= 1e-13 * scale.max(1.0));
        for i in 0..n {
            for j in 0..i {
                prop_assert_eq!(r2[(i, j)], 0.0);
            }
        }
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn system_json_is_bit_exact(seed in any::<u64>()) {
        let rs = random_system(seed, mixed_options(seed));
        let text = to_json(&SystemFile::from_system(&rs.sys));
        let back: SystemFile = serde_json::from_str(&text).unwrap();
        let sys = back.to_system().unwrap();
        let bits = |m: &DMatrix<f64>| m.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(sys.a()), bits(rs.sys.a()));
        prop_assert_eq!(bits(&sys.e()), bits(&rs.sys.e()));
        prop_assert_eq!(bits(sys.b()), bits(rs.sys.b()));
        prop_assert_eq!(bits(sys.c()), bits(rs.sys.c()));
        prop_assert_eq!(bits(sys.d()), bits(rs.sys.d()));
        prop_assert_eq!(sys.domain(), rs.sys.domain());
    }

    #[test]
    fn proper_factorization_quality(seed in any::<u64>()) {
        prop_assert_eq!(proper_case(seed), Ok(()));
    }

    #[test]
    fn inner_factorization_quality(seed in any::<u64>()) {
        prop_assert_eq!(inner_case(seed), Ok(()));
    }

    #[test]
    fn ordered_schur_form(seed in any::<u64>()) {
        prop_assert_eq!(gsorsf_case(seed, 6), Ok(()));
    }

    #[test]
    fn factorization_is_deterministic(seed in any::<u64>()) {
        let rs = random_system(seed, mixed_options(seed));
        let tol = Tolerances::for_system(&rs.sys);
        let (f1, l1) = grcf(&rs.sys, &rs.region, &tol).unwrap();
        let (f2, l2) = grcf(&rs.sys, &rs.region, &tol).unwrap();
        prop_assert_eq!(&f1, &f2);
        prop_assert_eq!(l1, l2);
        let r1 = check_rcf(&rs.sys, &f1, &rs.region, &tol, 8).unwrap();
        let r2 = check_rcf(&rs.sys, &f2, &rs.region, &tol, 8).unwrap();
        prop_assert_eq!(r1, r2);
    }

    #[test]
    fn left_factorization_reconstructs(seed in any::<u64>()) {
        let rs = random_system(seed, mixed_options(seed));
        let tol = Tolerances::for_system(&rs.sys);
        let (f, _) = to_left_factorization(
            &rs.sys,
            &LeftMethod::Proper(rs.region.clone()),
            &tol,
            &GrcfOptions::default(),
            seed % 2 == 0,
        )
        .unwrap();
        prop_assert_eq!(right_from_left(&f).a.nrows(), f.order());
        prop_assert_eq!(left_from_dual(&right_from_left(&f)), f.clone());
        let n = f.numerator().unwrap();
        let m = f.denominator().unwrap();
        let mut avoid = descfact::verify::finite_eigenvalues(rs.sys.a(), &rs.sys.e());
        avoid.extend(descfact::verify::finite_eigenvalues(&f.a, &f.e));
        for z in probe_points(rs.sys.domain(), 3.0, &avoid, 8, seed) {
            let g = eval_tfm(&rs.sys, z).unwrap();
            let lhs = eval_tfm(&m, z).unwrap() * &g;
            let rhs = eval_tfm(&n, z).unwrap();
            let err = (lhs - &rhs).norm() / (1.0 + rhs.norm() + g.norm());
            prop_assert!(err <= 1e-6, "seed {}: error {:e}", seed, err);
        }
    }
}
