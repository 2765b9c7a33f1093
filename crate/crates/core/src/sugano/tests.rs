use super::*;
use crate::wpoly::WeylGenerator;
use proptest::prelude::*;

fn c(n: i64) -> Coefficient {
    Coefficient::integer(n)
}

fn data() -> Vec<LocalBesselDatum> {
    vec![
        LocalBesselDatum::exact(5, 1, 2).unwrap(),
        LocalBesselDatum::exact(5, 1, -1).unwrap(),
        LocalBesselDatum::exact(3, -1, 0).unwrap(),
        LocalBesselDatum::exact(2, 0, 1).unwrap(),
        LocalBesselDatum::exact(7, 1, 0).unwrap(),
    ]
}

fn u10(d: &LocalBesselDatum) -> LaurentPolynomial {
    LaurentPolynomial::sigma(d.p())
        .sub(&LaurentPolynomial::constant(d.p(), d.lambda_over_sqrt_p()))
        .unwrap()
}

fn u01(d: &LocalBesselDatum) -> LaurentPolynomial {
    let p = d.p();
    let sigma = LaurentPolynomial::sigma(p);
    let tau = LaurentPolynomial::tau(p);
    let one = LaurentPolynomial::one(p);
    let eps = c(d.epsilon() as i64);
    let lam = d.lambda().clone();
    let sqrt_p = Coefficient::Exact(Surd::radical_part(BigRational::from_integer(1.into())));
    let inner = sigma
        .scale(&lam.mul(&sqrt_p, p))
        .sub(&tau.sub(&one).unwrap().scale(&eps))
        .unwrap()
        .sub(&LaurentPolynomial::constant(p, lam.mul(&lam, p)))
        .unwrap();
    let factor = c(p as i64 - d.epsilon() as i64).inv(p).unwrap();
    tau.sub(&inner.scale(&factor)).unwrap()
}

#[test]
fn datum_validation() {
    assert!(LocalBesselDatum::exact(4, 1, 0).is_err());
    assert!(LocalBesselDatum::exact(5, 2, 0).is_err());
    assert!(LocalBesselDatum::exact(5, -1, 1).is_err());
    assert!(LocalBesselDatum::exact(5, 1, 3).is_err());
    assert!(LocalBesselDatum::floating(5, 1, 2.5).is_err());
    assert!(LocalBesselDatum::floating(5, 1, -1.0).is_ok());
}

#[test]
fn component_shapes() {
    let d = LocalBesselDatum::exact(5, 1, 2).unwrap();
    let comps = build_components(&d);
    assert_eq!(comps.p_x.len(), 5);
    assert_eq!(comps.q_y.len(), 5);
    assert_eq!(comps.m2_x.len(), 4);
    assert!(comps.m2_x[0].exact_eq(&LaurentPolynomial::one(5)));
    assert!(comps.m1_x[0].exact_eq(&LaurentPolynomial::one(5)));
    assert!(comps.h(0, 0).unwrap().exact_eq(&LaurentPolynomial::one(5)));
    assert!(comps.q_y[0].exact_eq(&LaurentPolynomial::one(5)));
    for poly in comps.h_xy.iter().flatten().chain(&comps.p_x).chain(&comps.q_y).chain(&comps.m1_x) {
        assert!(poly.is_invariant());
    }
}

#[test]
fn p_x_linear_coefficient_is_minus_orbit_11() {
    // oracle: the X-coefficient of Π(1 - mX) is minus the sum of the four monomials
    let expected = LaurentPolynomial::from_terms(5, [(1, 1, c(-1)), (1, -1, c(-1)), (-1, 1, c(-1)), (-1, -1, c(-1))]);
    let px = denominator_x(5);
    assert!(px[1].exact_eq(&expected));
    assert!(px[1].exact_eq(&orbit_sum(5, 1, 1).unwrap().neg()));
    assert!(px[4].exact_eq(&LaurentPolynomial::one(5)));
}

#[test]
fn low_order_coefficients_match_closed_forms() {
    for d in data() {
        assert!(expand_u(&d, 0, 0).exact_eq(&LaurentPolynomial::one(d.p())));
        assert!(expand_u(&d, 1, 0).exact_eq(&u10(&d)), "U10 at {d:?}");
        assert!(expand_u(&d, 0, 1).exact_eq(&u01(&d)), "U01 at {d:?}");
    }
}

#[test]
fn row_matches_table() {
    for d in data() {
        let row = expand_u_row(&d, 6);
        let table = expand_table(&d, 6, 0);
        for (l, u) in row.iter().enumerate() {
            assert!(u.exact_eq(table.get(l, 0).unwrap()), "l = {l}");
        }
    }
}

#[test]
fn leading_orbit_is_l_plus_m_m_with_nonzero_coefficient() {
    let d = LocalBesselDatum::exact(5, 1, 2).unwrap();
    let table = expand_table(&d, 6, 3);
    for ((l, m), u) in table.by_weight(6) {
        let dec = decompose_orbit_basis(u).unwrap();
        assert_eq!(dec.trace_degree as usize, l + 2 * m);
        let lead = &dec.coords[&((l + m) as u32, m as u32)];
        assert!(!lead.is_zero(), "({l},{m})");
    }
}

#[test]
fn decomposition_examples() {
    let d = LocalBesselDatum::exact(5, 1, 2).unwrap();
    let coords = decompose_in_u_basis(&d, &u10(&d)).unwrap();
    assert_eq!(coords.len(), 1);
    assert!(coords[&(1, 0)].is_one());

    let coords = decompose_in_u_basis(&d, &LaurentPolynomial::sigma(5)).unwrap();
    assert_eq!(coords.len(), 2);
    assert!(coords[&(1, 0)].is_one());
    assert_eq!(coords[&(0, 0)], d.lambda_over_sqrt_p());

    let tau = LaurentPolynomial::tau(5);
    let coords = decompose_in_u_basis(&d, &tau).unwrap();
    assert!(coords.keys().all(|&(l, m)| l + 2 * m <= 2));
    assert!(reassemble_from_u_basis(&d, &coords).exact_eq(&tau));

    let not_inv = LaurentPolynomial::monomial(5, 1, 0, c(1));
    assert!(matches!(decompose_in_u_basis(&d, &not_inv), Err(Error::NotInvariant { .. })));
}

#[test]
fn floating_mode_agrees_with_exact() {
    let exact = LocalBesselDatum::exact(7, 1, -1).unwrap();
    let float = LocalBesselDatum::floating(7, 1, -1.0).unwrap();
    let a = expand_table(&exact, 4, 2);
    let b = expand_table(&float, 4, 2);
    for ((l, m), u) in a.by_weight(8) {
        let v = b.get(l, m).unwrap();
        assert!(v.is_floating());
        assert!(u.to_floating().approx_eq(v, FLOAT_IDENTITY_TOLERANCE));
    }
    let sigma = LaurentPolynomial::sigma(7).to_floating();
    let coords = decompose_in_u_basis(&float, &sigma).unwrap();
    assert!(reassemble_from_u_basis(&float, &coords).approx_eq(&sigma, FLOAT_IDENTITY_TOLERANCE));
}

#[test]
fn u20_remainder_is_order_one_over_p() {
    for d in data() {
        let r = u20_remainder(&d);
        let bound = sup_norm_on_torus(&r, 20) * d.p() as f64;
        assert!(bound <= 5.0 + 1e-12, "p·|R| = {bound}");
    }
}

fn series_product_check(d: &LocalBesselDatum, order: usize) {
    let comps = build_components(d);
    let table = expand_table(d, order, order);
    let p = d.p();
    for m in 0..=order {
        for l in 0..=order {
            let mut acc = LaurentPolynomial::zero(p);
            for (i, pi) in comps.p_x.iter().enumerate().take(m + 1) {
                for (j, qj) in comps.q_y.iter().enumerate().take(l + 1) {
                    let pq = pi.mul(qj).unwrap();
                    acc = acc.add(&pq.mul(table.get(l - j, m - i).unwrap()).unwrap()).unwrap();
                }
            }
            let h = comps.h(m, l).cloned().unwrap_or_else(|| LaurentPolynomial::zero(p));
            assert!(acc.exact_eq(&h), "mismatch at X^{m} Y^{l}");
        }
    }
}

#[test]
fn series_times_denominator_recovers_numerator() {
    series_product_check(&LocalBesselDatum::exact(3, 1, 2).unwrap(), 8);
}

fn datum_strategy() -> impl Strategy<Value = LocalBesselDatum> {
    (prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]), -1i8..=1, -2i64..=2).prop_map(|(p, e, l)| {
        let l = if e == -1 { 0 } else { l };
        LocalBesselDatum::exact(p, e, l).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn expansion_consistency(d in datum_strategy()) {
        series_product_check(&d, 4);
    }

    #[test]
    fn coefficients_are_invariant_with_bounded_degree(d in datum_strategy()) {
        let table = expand_table(&d, 8, 4);
        for ((l, m), u) in table.by_weight(8) {
            for g in WeylGenerator::ALL {
                prop_assert!(u.substitute(g).exact_eq(u));
            }
            let dec = decompose_orbit_basis(u).unwrap();
            prop_assert!(dec.trace_degree as usize <= l + 2 * m);
        }
    }

    #[test]
    fn basis_change_round_trips(d in datum_strategy(), coeffs in prop::collection::vec(-5i64..=5, 9)) {
        let p = d.p();
        let idx = [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (3, 0), (2, 2), (3, 1), (4, 0)];
        let mut poly = LaurentPolynomial::zero(p);
        for (&(j, k), n) in idx.iter().zip(coeffs) {
            poly = poly.add(&orbit_sum(p, j, k).unwrap().scale(&c(n))).unwrap();
        }
        let coords = decompose_in_u_basis(&d, &poly).unwrap();
        let degree = decompose_orbit_basis(&poly).unwrap().trace_degree;
        prop_assert!(coords.keys().all(|&(l, m)| l + 2 * m <= degree));
        prop_assert!(reassemble_from_u_basis(&d, &coords).exact_eq(&poly));
    }
}
