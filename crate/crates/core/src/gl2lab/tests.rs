use super::*;
use proptest::prelude::*;

// mpmath besselj at 50 digits
const BESSEL_SPOTS: [(f64, f64, f64); 11] = [
    (13.0, 4.0 * PI, 0.159_042_355_827_397_94),
    (8.5, 3.7, 0.001_084_135_452_431_374_9),
    (200.0, 150.0, 8.057_702_198_396_853_8e-14),
    (200.0, 10_000.0, -0.000_363_400_523_426_835_07),
    (0.0, 10_000.0, -0.007_096_160_353_388_801_5),
    (0.5, 30.0, -0.143_929_653_370_399_89),
    (57.5, 77.0, -0.074_090_169_238_388_651),
    (1.0, 12.5, -0.165_483_804_614_759_72),
    (3.0, 0.001, 2.083_333_203_125_003_4e-11),
    (150.5, 400.0, -0.040_877_291_022_755_187),
    (7.5, 9999.5, -0.007_840_511_337_783_178_3),
];
// mpmath quadrature of the Bessel product
const KITAOKA_10_1_1: f64 = 0.035_898_848_507_281_594;
const KITAOKA_12_HALF_3HALF: f64 = -0.000_216_084_593_834_025_93;

#[test]
fn bessel_spot_values() {
    assert_eq!(bessel_j(1.0, 0.0).unwrap(), 0.0);
    assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
    for (nu, x, v) in BESSEL_SPOTS {
        let b = bessel_j_flagged(nu, x).unwrap();
        assert!((b.value - v).abs() < 1e-10, "J_{nu}({x}) = {} vs {v}", b.value);
        assert!(b.validated);
    }
    assert!(!bessel_j_flagged(250.0, 3.0).unwrap().validated);
    assert!(bessel_j(-1.0, 1.0).is_err());
    assert!(bessel_j(1.0, -1.0).is_err());
}

#[test]
fn bessel_recurrence_on_a_grid() {
    for nu in [1.0, 2.5, 9.0, 30.5, 120.0] {
        for x in [0.5, 5.0, 11.9, 12.1, 40.0, 333.0, 2500.0] {
            let lhs = bessel_j(nu - 1.0, x).unwrap() + bessel_j(nu + 1.0, x).unwrap();
            let rhs = 2.0 * nu / x * bessel_j(nu, x).unwrap();
            assert!((lhs - rhs).abs() < 1e-9, "ν={nu} x={x}");
        }
    }
}

#[test]
fn bessel_bound_fits() {
    let fits = verify_bessel_bounds(&[10], &[1.0]).unwrap();
    assert!(fits[0].max_ratio <= 2.0);
    let fits = verify_bessel_bounds(&[20], &[25.0]).unwrap();
    assert!(fits[1].max_ratio.is_finite() && fits[1].points == 1);
    let fits = verify_bessel_bounds(&[10], &[20.0]).unwrap();
    assert!(fits[2].max_ratio < 1e-3);
    let ks: Vec<u32> = (1..=60).collect();
    let xs: Vec<f64> = (1..=400).map(|i| i as f64 * 0.25).collect();
    for fit in verify_bessel_bounds(&ks, &xs).unwrap() {
        assert!(fit.max_ratio.is_finite() && fit.max_ratio < 10.0 && fit.points > 0, "{fit:?}");
    }
}

#[test]
fn kitaoka_examples() {
    assert!(kitaoka_integral(10, 1e-6, 1e-6).unwrap().value.abs() < 1e-12);
    let v = kitaoka_integral(10, 1.0, 1.0).unwrap();
    assert!((v.value - KITAOKA_10_1_1).abs() < 1e-8 && v.error_estimate <= 1e-9);
    let v = kitaoka_integral(12, 0.5, 1.5).unwrap();
    assert!((v.value - KITAOKA_12_HALF_3HALF).abs() < 1e-8);
    let decay = kitaoka_decay(2.0, 2.0, &[10, 20, 40, 80]).unwrap();
    assert!(decay.values.windows(2).all(|w| w[1].1.abs() < w[0].1.abs()), "{decay:?}");
    assert!(decay.constant.is_finite());
    assert!(kitaoka_integral(5, 1.0, 1.0).is_err());
    assert!(kitaoka_integral(10, 0.0, 1.0).is_err());
}

#[test]
fn kloosterman_examples_and_weil_bound() {
    assert_eq!(kloosterman(1, 1, 1).unwrap().value, 1.0);
    assert!((kloosterman(1, 1, 2).unwrap().value - 1.0).abs() < 1e-12);
    assert!((kloosterman(1, 1, 3).unwrap().value + 1.0).abs() < 1e-12);
    for c in 1..=500 {
        let k = kloosterman(1, 1, c).unwrap();
        assert!(k.imaginary.abs() < 1e-10, "c={c}");
        assert!(k.value.abs() <= k.weil_bound + 1e-9, "c={c}");
    }
    assert!(kloosterman(1, 1, 0).is_err());
}

#[test]
fn sato_tate_orthogonality() {
    assert!((sato_tate_integral(0) - 1.0).abs() < 1e-10);
    for l in 1..=10 {
        assert!(sato_tate_integral(l).abs() < 1e-10, "l={l}");
    }
    assert_eq!(chebyshev_u(1, 0.7), 0.7);
}

#[test]
fn hecke_multiplicativity() {
    let angles = [(2u64, 0.9), (3, 2.2), (5, 1.3)];
    assert_eq!(hecke_multiplicativity_check(&angles, 1).unwrap(), 0.0);
    assert!(hecke_multiplicativity_check(&angles, 2).unwrap() < 1e-15);
    for l in [12u64, 8, 45, 360, 3125] {
        assert!(hecke_multiplicativity_check(&angles, l).unwrap() < 1e-10, "L={l}");
    }
    assert!(hecke_multiplicativity_check(&angles, 7).is_err());
    assert!(hecke_multiplicativity_check(&[(2, 0.0)], 16).unwrap() < 1e-12);
}

#[test]
fn tau_values() {
    let q = delta_q_expansion(100).unwrap();
    assert_eq!(q.tau(1), Some(1));
    assert_eq!(q.tau(2), Some(-24));
    assert_eq!(q.tau(3), Some(252));
    assert_eq!(q.tau(11), Some(534_612));
    assert_eq!(q.multiplicativity_violation(100), None);
    assert!(delta_q_expansion(0).is_err());
    let big = delta_q_expansion(2000).unwrap();
    assert_eq!(big.tau(1000), Some(-30_328_412_970_240_000));
    assert_eq!(big.multiplicativity_violation(2000), None);
}

#[test]
fn petersson_at_weight_14() {
    for l in 1..=10u64 {
        let side = petersson_kloosterman_side(14, l, default_c_max(14, l).max(50)).unwrap();
        let delta = if l == 1 { 1.0 } else { 0.0 };
        assert!((side.value - delta).abs() < 1e-6, "L={l}: {side:?}");
        assert!(!side.insufficient_cutoff);
    }
    assert!(petersson_kloosterman_side(13, 1, 10).is_err());
    assert!(petersson_kloosterman_side(14, 1, 1).unwrap().insufficient_cutoff);
}

#[test]
fn petersson_weight_12_ratios() {
    let tau = delta_q_expansion(10).unwrap();
    let residual = |l: u64| 0.0 - petersson_kloosterman_side(12, l, 200).unwrap().value;
    for (l, lp) in [(2u64, 3u64), (2, 5), (3, 5)] {
        let lhs = residual(l) / residual(lp);
        let rhs = tau.tau(l as usize).unwrap() as f64 * (lp as f64).powf(5.5)
            / (tau.tau(lp as usize).unwrap() as f64 * (l as f64).powf(5.5));
        assert!((lhs / rhs - 1.0).abs() < 1e-4, "L={l}, L'={lp}: {lhs} vs {rhs}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bessel_is_bounded(nu in 1.0f64..200.0, x in 0.0f64..2000.0) {
        prop_assert!(bessel_j(nu, x).unwrap().abs() <= 1.0);
    }

    #[test]
    fn kloosterman_is_symmetric(m in 1u64..50, n in 1u64..50, c in 1u64..80) {
        let a = kloosterman(m, n, c).unwrap().value;
        let b = kloosterman(n, m, c).unwrap().value;
        prop_assert!((a - b).abs() < 1e-9);
    }
}
