use super::*;
use crate::lowlying::{fejer_test_function, sigma_integral, SymmetryMeasure};
use crate::measures::{sample, SpectralMeasure};
use proptest::prelude::*;
use rand::SeedableRng;

// finite-n means of the Fejér (α = 1/4) statistic, mpmath quadrature of the
// one-point densities
const USP_EXPECT: [(usize, f64); 3] = [(2, 0.787_389_198_135_939_1), (4, 0.890_690_261_393_287_4), (6, 0.877_874_039_852_414_5)];
const SO_EXPECT: [(usize, f64); 3] = [(2, 0.762_614_101_583_309_8), (4, 0.914_940_728_817_255_2), (6, 0.984_343_720_007_918_3)];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn envelope_maxima_match_fekete_values() {
    // USp n=2: cosines at ±1/√3 give 16/27; SO n=2 and n=3: 4
    assert!((WeylSampler::new(Ensemble::USp, 2).unwrap().envelope() / ENVELOPE_HEADROOM - 16.0 / 27.0).abs() < 1e-9);
    assert!((WeylSampler::new(Ensemble::SOeven, 2).unwrap().envelope() / ENVELOPE_HEADROOM - 4.0).abs() < 1e-9);
    assert!((WeylSampler::new(Ensemble::SOeven, 3).unwrap().envelope() / ENVELOPE_HEADROOM - 4.0).abs() < 1e-9);
    assert!((WeylSampler::new(Ensemble::SOeven, 1).unwrap().envelope() / ENVELOPE_HEADROOM - 1.0).abs() < 1e-12);
}

#[test]
fn sampler_validation_and_reproducibility() {
    assert!(sample_weyl(Ensemble::USp, 0, &mut rng(0), 5).is_err());
    assert!(sample_weyl(Ensemble::USp, 7, &mut rng(0), 5).is_err());
    assert!(sample_weyl(Ensemble::USp, 2, &mut rng(0), 0).is_err());
    let a = sample_weyl(Ensemble::USp, 3, &mut rng(4), 20).unwrap();
    assert_eq!(a, sample_weyl(Ensemble::USp, 3, &mut rng(4), 20).unwrap());
    assert!(a.iter().all(|s| s.angles.windows(2).all(|w| w[0] <= w[1])));
    assert_eq!(sample_weyl_seeded(Ensemble::SOeven, 5, 2, 3000).unwrap(), sample_weyl_seeded(Ensemble::SOeven, 5, 2, 3000).unwrap());
}

#[test]
fn first_moments_vanish() {
    for (ens, n) in [(Ensemble::USp, 2), (Ensemble::SOeven, 1)] {
        let draws = sample_weyl_seeded(ens, n, 8, 50_000).unwrap();
        let v: Vec<f64> = draws.iter().map(|s| s.angles.iter().map(|t| 2.0 * t.cos()).sum()).collect();
        let (m, se) = mean_se(&v);
        assert!(m.abs() < 4.0 * se, "{ens:?}: {m} ± {se}");
    }
}

#[test]
fn usp4_agrees_with_the_measures_haar_sampler() {
    let ours = sample_weyl(Ensemble::USp, 2, &mut rng(21), 100_000).unwrap();
    let theirs = sample(&SpectralMeasure::haar(), &mut rng(22), 100_000).unwrap();
    for pick in [0usize, 1] {
        let a: Vec<f64> = ours.iter().map(|s| s.angles[pick]).collect();
        let b: Vec<f64> = theirs.iter().map(|p| if pick == 0 { p.theta1 } else { p.theta2 }).collect();
        let (d, crit) = ks_two_sample(&a, &b);
        assert!(d < crit, "angle {pick}: D = {d}, critical {crit}");
    }
}

#[test]
fn ks_detects_a_shift() {
    let a: Vec<f64> = (0..2000).map(|i| i as f64 / 2000.0).collect();
    let b: Vec<f64> = a.iter().map(|x| x + 0.2).collect();
    let (d, crit) = ks_two_sample(&a, &b);
    assert!((d - 0.2).abs() < 1e-3 && d > crit);
    assert_eq!(ks_two_sample(&a, &a).0, 0.0);
}

#[test]
fn det_examples() {
    let s = |angles: Vec<f64>| EigenangleSample { ensemble: Ensemble::SOeven, angles };
    assert!((det_one_minus(&s(vec![PI; 3])) - 64.0).abs() < 1e-12);
    assert_eq!(det_one_minus(&s(vec![0.0, 1.0])), 0.0);
    assert!((det_one_minus(&s(vec![PI / 2.0])) - 2.0).abs() < 1e-15);
}

#[test]
fn cn_is_one_half() {
    for n in 1..=3 {
        let e = estimate_cn(n, 200_000, 5 + n as u64).unwrap();
        assert!((e.value - 0.5).abs() < 3.0 * e.stderr, "n={n}: {e:?}");
    }
    assert!(estimate_cn(5, 20_000, 0).is_err());
    assert!(estimate_cn(2, 100, 0).is_err());
}

#[test]
fn exact_expectations_match_references() {
    let phi = fejer_test_function(0.25).unwrap();
    for (n, v) in USP_EXPECT {
        assert!((one_level_expectation(Ensemble::USp, n, &phi).unwrap() - v).abs() < 1e-10);
    }
    for (n, v) in SO_EXPECT {
        assert!((one_level_expectation(Ensemble::SOeven, n, &phi).unwrap() - v).abs() < 1e-10);
    }
}

#[test]
fn one_level_densities() {
    let phi = fejer_test_function(0.25).unwrap();
    let usp = one_level_density(Ensemble::USp, 4, &phi, 40_000, 1, false).unwrap();
    let so = one_level_density(Ensemble::SOeven, 4, &phi, 40_000, 2, false).unwrap();
    let sow = one_level_density(Ensemble::SOeven, 4, &phi, 40_000, 2, true).unwrap();
    assert!((usp.value - USP_EXPECT[1].1).abs() < 4.0 * usp.stderr, "{usp:?}");
    assert!((so.value - SO_EXPECT[1].1).abs() < 4.0 * so.stderr, "{so:?}");
    assert!((usp.value - sigma_integral(&phi, SymmetryMeasure::Sp)).abs() < 0.1);
    let gap = |a: &Estimate, b: &Estimate| (b.value - a.value) / (a.stderr.hypot(b.stderr));
    assert!(gap(&usp, &so) > 2.0);
    assert!(gap(&sow, &so) > 2.0, "{sow:?} vs {so:?}");
    assert!(matches!(
        one_level_density(Ensemble::USp, 4, &phi, 100, 1, true),
        Err(Error::InvalidCombination(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn det_is_permutation_invariant(mut angles in prop::collection::vec(0.0f64..PI, 1..6), seed in 0u64..1000) {
        let base = det_one_minus(&EigenangleSample { ensemble: Ensemble::USp, angles: angles.clone() });
        let mut r = rng(seed);
        for i in (1..angles.len()).rev() {
            angles.swap(i, rand::Rng::gen_range(&mut r, 0..=i));
        }
        let shuffled = det_one_minus(&EigenangleSample { ensemble: Ensemble::USp, angles });
        prop_assert!((base - shuffled).abs() <= 1e-12 * base.max(1.0));
        prop_assert!(base >= 0.0);
    }
}
