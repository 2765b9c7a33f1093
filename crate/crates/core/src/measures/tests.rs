use super::*;
use crate::classgroup::{enumerate_class_group, FundamentalDiscriminant};
use crate::wpoly::LaurentPolynomial;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn group(d: u64) -> ClassGroup {
    enumerate_class_group(FundamentalDiscriminant::new(d).unwrap())
}

#[test]
fn canonical_points() {
    let p = SpectralPoint::new(2.0, 1.0);
    assert_eq!((p.theta1, p.theta2), (1.0, 2.0));
    let q = SpectralPoint::new(-1.0, 2.0 * PI + 2.0);
    assert!((q.theta1 - 1.0).abs() < 1e-15 && (q.theta2 - 2.0).abs() < 1e-15);
    assert_eq!(SpectralPoint::new(q.theta1, q.theta2), q);
    assert!((SpectralPoint::new(0.0, PI).sigma()).abs() < 1e-15);
}

#[test]
fn haar_density_examples() {
    assert_eq!(haar_density(1.0, 1.0).unwrap(), 0.0);
    assert_eq!(haar_density(0.0, 2.0).unwrap(), 0.0);
    assert!(haar_density(-0.1, 1.0).is_err());
    assert!(haar_density(1.0, 3.5).is_err());
}

#[test]
fn haar_normalization() {
    let haar = SpectralMeasure::haar();
    // ordered-region mass of the shape is π²/16
    assert!((haar.normalizer() - PI * PI / 16.0).abs() < 1e-12);
    let one = integrate(|_| Complex64::new(1.0, 0.0), &haar, QuadratureRule::default()).unwrap();
    assert!((one.value.re - 1.0).abs() < 1e-12);
    let report = normalization_report(&haar, &haar);
    assert!((report.printed_haar_mass - 0.25).abs() < 1e-12);
}

#[test]
fn delta_p_examples() {
    let inert = LocalBesselDatum::exact(3, -1, 0).unwrap();
    let v = delta_p(&inert, PI / 2.0, PI / 2.0).unwrap();
    assert!((v - 256.0 / 81.0).abs() < 1e-12);

    let ram = LocalBesselDatum::exact(7, 0, 1).unwrap();
    let v = delta_p(&ram, PI / 2.0, PI / 2.0).unwrap();
    assert!((v - (1.0 + 1.0 / 7.0f64).powi(2)).abs() < 1e-12);

    let split = LocalBesselDatum::exact(5, 1, 2).unwrap();
    let r5 = 5f64.sqrt();
    let factor = (0.8f64).powi(2) + 0.2 * (2.0 * r5 - 2.0) * (2.0 / r5 - 2.0);
    assert!((delta_p(&split, 0.0, 0.0).unwrap() - factor * factor).abs() < 1e-12);
    // independent path: |1 - λ x + x²|-type factorization for split primes,
    // (1 - α/√p)(1 - ᾱ/√p)-free form: expand (2c√p - λ)(2c/√p - λ) by hand
    let (c, p, lam) = (0.3f64.cos(), 5.0f64, 2.0f64);
    let by_hand = (1.0 - 1.0 / p).powi(2) + (4.0 * c * c - 2.0 * c * lam * (p.sqrt() + 1.0 / p.sqrt()) + lam * lam) / p;
    let f1 = delta_p(&split, 0.3, 0.3).unwrap().sqrt();
    assert!((f1 - by_hand).abs() < 1e-12);
}

#[test]
fn plancherel_prefactor_normalizes_exactly() {
    let haar = SpectralMeasure::haar();
    for (d, p) in [(4u64, 5u64), (4, 3), (4, 2), (23, 2), (23, 7)] {
        let g = group(d);
        for chi in g.characters() {
            let mu = plancherel_measure(&g, &chi, p).unwrap();
            let report = normalization_report(&mu, &haar);
            assert!(report.prefactor_deviation < 1e-10, "d={d} p={p}: {report:?}");
            assert!(mu.normalizer_error() < 1e-12);
        }
    }
}

#[test]
fn delta_relation_examples() {
    let g = group(4);
    let mu = plancherel_measure(&g, &g.characters()[0], 5).unwrap();
    let rows = delta_table(&mu, 4, 1e-8).unwrap();
    assert!(rows.iter().all(|r| r.pass), "{rows:?}");

    let g = group(23);
    let chi = g.characters().into_iter().find(|c| !c.is_trivial()).unwrap();
    let mu = plancherel_measure(&g, &chi, 7).unwrap();
    let datum = mu.datum().unwrap().clone();
    let u21 = expand_table(&datum, 2, 1).get(2, 1).unwrap().clone();
    let v = integrate_polynomial(&u21, &mu, QuadratureRule::default()).unwrap();
    assert!(v.value.norm() < 1e-8);
}

#[test]
fn first_moment_is_lambda_over_root_p() {
    for d in [3u64, 4, 23] {
        let g = group(d);
        for chi in g.characters() {
            for p in [2u64, 3, 5, 13] {
                let mu = plancherel_measure(&g, &chi, p).unwrap();
                let v = integrate_polynomial(&LaurentPolynomial::sigma(p), &mu, QuadratureRule::default()).unwrap();
                let expected = g.lambda_p(&chi, p).unwrap() / (p as f64).sqrt();
                assert!((v.value.re - expected).abs() < 1e-9, "d={d} p={p}");
            }
        }
    }
}

#[test]
fn integrate_reports_convergence_failure() {
    let haar = SpectralMeasure::haar();
    // a kink on the diagonal is not resolved to 1e-15
    let rule = QuadratureRule {
        start_level: 0,
        tolerance: 1e-15,
    };
    let res = integrate(|pt| Complex64::new((pt.theta1 - 1.0).abs(), 0.0), &haar, rule);
    assert!(matches!(res, Err(Error::ConvergenceFailure { .. })));
}

#[test]
fn sampling_means_match_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let haar = SpectralMeasure::haar();
    let pts = sample(&haar, &mut rng, 100_000).unwrap();
    let (mean, se) = mean_and_stderr(&pts, |p| p.sigma());
    assert!(mean.abs() < 4.0 * se, "{mean} ± {se}");

    let g = group(4);
    let mu = plancherel_measure(&g, &g.characters()[0], 5).unwrap();
    let pts = sample(&mu, &mut rng, 100_000).unwrap();
    let (mean, se) = mean_and_stderr(&pts, |p| p.sigma());
    assert!((mean - 2.0 / 5f64.sqrt()).abs() < 4.0 * se, "{mean} ± {se}");
    assert!(pts.iter().all(|p| p.theta1 <= p.theta2));

    assert!(sample(&mu, &mut rng, 0).is_err());
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let haar = SpectralMeasure::haar();
    let a = sample(&haar, &mut ChaCha8Rng::seed_from_u64(9), 50).unwrap();
    let b = sample(&haar, &mut ChaCha8Rng::seed_from_u64(9), 50).unwrap();
    assert_eq!(a, b);
}
