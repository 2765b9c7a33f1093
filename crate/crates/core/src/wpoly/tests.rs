use super::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

const P: u64 = 5;

fn c(n: i64) -> Coefficient {
    Coefficient::integer(n)
}

#[test]
fn orbit_sum_examples() {
    let sigma = orbit_sum(P, 1, 0).unwrap();
    let expected = LaurentPolynomial::from_terms(P, [(1, 0, c(1)), (0, 1, c(1)), (-1, 0, c(1)), (0, -1, c(1))]);
    assert!(sigma.exact_eq(&expected));

    assert!(orbit_sum(P, 0, 0).unwrap().exact_eq(&LaurentPolynomial::one(P)));

    let tau_minus_one = LaurentPolynomial::tau(P).sub(&LaurentPolynomial::one(P)).unwrap();
    assert!(orbit_sum(P, 1, 1).unwrap().exact_eq(&tau_minus_one));
    assert_eq!(orbit_sum(P, 2, 1).unwrap().len(), 8);
}

#[test]
fn orbit_sum_rejects_bad_indices() {
    assert!(matches!(orbit_sum(P, 0, 1), Err(Error::InvalidArgument(_))));
    assert!(matches!(orbit_sum(P, 2, -1), Err(Error::InvalidArgument(_))));
}

#[test]
fn ring_identities() {
    let sigma = LaurentPolynomial::sigma(P);
    let one = LaurentPolynomial::one(P);
    assert!(sigma.mul(&one).unwrap().exact_eq(&sigma));
    assert!(sigma.add(&sigma.neg()).unwrap().is_zero());
    let via_dispatch = poly_arith(PolyOp::Add, &sigma, Some(&poly_arith(PolyOp::Negate, &sigma, None).unwrap())).unwrap();
    assert!(via_dispatch.is_zero());
    assert!(poly_arith(PolyOp::Mul, &sigma, None).is_err());
}

#[test]
fn sigma_squared_matches_pairwise_expansion() {
    // oracle: multiply the four monomials pairwise and count exponent pairs
    let monos = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    let mut counts: BTreeMap<(i32, i32), i64> = BTreeMap::new();
    for x in monos {
        for y in monos {
            *counts.entry((x.0 + y.0, x.1 + y.1)).or_default() += 1;
        }
    }
    let expected = LaurentPolynomial::from_terms(P, counts.into_iter().map(|((i, j), n)| (i, j, c(n))));
    let sigma = LaurentPolynomial::sigma(P);
    let sq = sigma.mul(&sigma).unwrap();
    assert!(sq.exact_eq(&expected));
    assert_eq!(sq.coeff(0, 0), c(4));
    // σ² = orbit(2,0) + 2·orbit(1,1) + 4
    let rebuilt = orbit_sum(P, 2, 0)
        .unwrap()
        .add(&orbit_sum(P, 1, 1).unwrap().scale(&c(2)))
        .unwrap()
        .add(&LaurentPolynomial::constant(P, c(4)))
        .unwrap();
    assert!(sq.exact_eq(&rebuilt));
}

#[test]
fn mixed_primes_rejected() {
    let a = LaurentPolynomial::sigma(5);
    let b = LaurentPolynomial::sigma(7);
    assert!(matches!(a.add(&b), Err(Error::InvalidArgument(_))));
    assert!(matches!(a.mul(&b), Err(Error::InvalidArgument(_))));
}

#[test]
fn evaluation_examples() {
    let sigma = LaurentPolynomial::sigma(P);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    assert!((sigma.evaluate(one, one).unwrap() - 4.0).norm() < 1e-15);
    assert!(sigma.evaluate(i, i).unwrap().norm() < 1e-15);
    let w = Complex64::cis(PI / 3.0);
    let tau = LaurentPolynomial::tau(P);
    // 1 + ω² + 1 + 1 + ω⁻² = 3 + 2cos(2π/3)
    assert!((tau.evaluate(w, w).unwrap() - 2.0).norm() < 1e-14);
    assert!(sigma.evaluate(Complex64::new(0.0, 0.0), one).is_err());
}

#[test]
fn surd_coefficients_evaluate_with_sqrt_p() {
    let root_p = Coefficient::Exact(Surd::radical_part(num_rational::BigRational::from_integer(1.into())));
    let poly = LaurentPolynomial::constant(P, root_p);
    let v = poly.evaluate(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
    assert!((v.re - 5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn decomposition_examples() {
    let d = decompose_orbit_basis(&LaurentPolynomial::sigma(P)).unwrap();
    assert_eq!(d.coords.len(), 1);
    assert_eq!(d.coords[&(1, 0)], c(1));
    assert_eq!(d.trace_degree, 1);

    let a_minus_b = LaurentPolynomial::from_terms(P, [(1, 0, c(1)), (0, 1, c(-1))]);
    assert!(matches!(decompose_orbit_basis(&a_minus_b), Err(Error::NotInvariant { .. })));

    let d = decompose_orbit_basis(&LaurentPolynomial::tau(P)).unwrap();
    let expected: BTreeMap<_, _> = [((0, 0), c(1)), ((1, 1), c(1))].into_iter().collect();
    assert_eq!(d.coords, expected);
    assert_eq!(d.trace_degree, 2);
}

#[test]
fn floating_mode_equality_uses_tolerance() {
    let a = LaurentPolynomial::sigma(P).to_floating();
    let b = a.add(&LaurentPolynomial::constant(P, Coefficient::real(1e-13))).unwrap();
    assert!(a.approx_eq(&b, FLOAT_TOLERANCE));
    assert!(!a.approx_eq(&b, 1e-14));
    assert_eq!(a, b);
}

#[test]
fn json_layout() {
    let tau = LaurentPolynomial::tau(P);
    let j = tau.to_json();
    assert_eq!(j["0,0"], serde_json::json!(["1", "0"]));
    assert_eq!(j["-1,1"], serde_json::json!(["1", "0"]));
    assert_eq!(j.as_object().unwrap().len(), 5);
}

fn small_rational() -> impl Strategy<Value = Coefficient> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| Coefficient::ratio(n, d))
}

fn invariant_poly(max_degree: u32) -> impl Strategy<Value = LaurentPolynomial> {
    let indices: Vec<(u32, u32)> = (0..=max_degree)
        .flat_map(|j| (0..=j).map(move |k| (j, k)))
        .filter(|&(j, k)| j + k <= max_degree)
        .collect();
    let n = indices.len();
    proptest::collection::vec((small_rational(), small_rational()), n).prop_map(move |coeffs| {
        let mut out = LaurentPolynomial::zero(P);
        for (&(j, k), (r, s)) in indices.iter().zip(coeffs) {
            let (Coefficient::Exact(r), Coefficient::Exact(s)) = (r, s) else { unreachable!() };
            let coef = Coefficient::Exact(Surd::new(r.rational, s.rational));
            out = out.add(&orbit_sum(P, j as i32, k as i32).unwrap().scale(&coef)).unwrap();
        }
        out
    })
}

proptest! {
    #[test]
    fn orbit_sums_are_weyl_invariant(j in 0i32..12, k in 0i32..12) {
        prop_assume!(j >= k);
        let o = orbit_sum(P, j, k).unwrap();
        for g in WeylGenerator::ALL {
            prop_assert!(o.substitute(g).exact_eq(&o));
        }
        let d = decompose_orbit_basis(&o).unwrap();
        prop_assert_eq!(d.trace_degree, (j + k) as u32);
    }

    #[test]
    fn decomposition_round_trips(poly in invariant_poly(6)) {
        let d = decompose_orbit_basis(&poly).unwrap();
        prop_assert!(d.trace_degree <= 6);
        prop_assert!(d.reassemble(P).exact_eq(&poly));
    }

    #[test]
    fn evaluation_is_multiplicative(
        p in invariant_poly(3),
        q in invariant_poly(3),
        angles in proptest::collection::vec((0.0..2.0 * PI, 0.0..2.0 * PI), 100),
    ) {
        let pq = p.mul(&q).unwrap();
        let (cp, cq, cpq) = (p.compile(), q.compile(), pq.compile());
        for (t1, t2) in angles {
            let lhs = cpq.evaluate_angles(t1, t2);
            let rhs = cp.evaluate_angles(t1, t2) * cq.evaluate_angles(t1, t2);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }
    }
}
