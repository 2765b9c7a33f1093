//! Sugano's generating function for the unramified spherical Bessel
//! functions of `GSp(4)` and its expansion into the polynomials `U^{l,m}`.
//!
//! The generating function is
//!
//! ```text
//! Σ_{l,m ≥ 0} U^{l,m}(a,b) X^m Y^l = H(X,Y) / (P(X) Q(Y))
//! P(X) = (1 - abX)(1 - ab⁻¹X)(1 - a⁻¹bX)(1 - a⁻¹b⁻¹X)
//! Q(Y) = (1 - aY)(1 - bY)(1 - a⁻¹Y)(1 - b⁻¹Y)
//! H(X,Y) = (1 + XY²)(M₁(X)(1 + X) + p^{-1/2}λσX²)
//!          - XY(σM₁(X) - p^{-1/2}λM₂(X)) - p^{-1/2}λP(X)Y + p^{-1}εP(X)Y²
//! M₁(X) = 1 - (p - ε)⁻¹(p^{1/2}λσ - ε(τ - 1) - λ²)X - p^{-1}εX²
//! M₂(X) = 1 - τX - τX² + X³
//! ```
//!
//! with `ε` the splitting symbol of `p` in the imaginary quadratic field and
//! `λ` the character sum over primes of norm `p`. Exact arithmetic takes
//! place in ℚ(√p) whenever `λ` is an integer.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::wpoly::{decompose_orbit_basis, orbit_sum, Coefficient, LaurentPolynomial, Surd, FLOAT_TOLERANCE};

/// Identity checks in floating mode use this looser tolerance.
pub const FLOAT_IDENTITY_TOLERANCE: f64 = 1e-9;

/// Local data at one prime: `p`, the splitting symbol `ε` and `λ_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalBesselDatum {
    p: u64,
    epsilon: i8,
    lambda: Coefficient,
}

impl LocalBesselDatum {
    pub fn new(p: u64, epsilon: i8, lambda: Coefficient) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        if !(-1..=1).contains(&epsilon) {
            return Err(Error::invalid(format!("splitting symbol {epsilon} not in {{-1,0,1}}")));
        }
        let value = lambda.to_complex(p);
        if value.im.abs() > FLOAT_TOLERANCE || value.re.abs() > 2.0 + FLOAT_TOLERANCE {
            return Err(Error::invalid(format!("|lambda_p| must be a real number of size at most 2, got {value}")));
        }
        if epsilon == -1 && !lambda.is_zero() {
            return Err(Error::invalid("inert primes have lambda_p = 0"));
        }
        let lambda = match lambda {
            Coefficient::Exact(s) if !s.radical.is_zero() => {
                return Err(Error::invalid("lambda_p must be rational in exact mode"))
            }
            other => other,
        };
        Ok(LocalBesselDatum { p, epsilon, lambda })
    }

    /// Exact datum with integer `λ_p`.
    pub fn exact(p: u64, epsilon: i8, lambda: i64) -> Result<Self> {
        Self::new(p, epsilon, Coefficient::integer(lambda))
    }

    /// Floating datum; all derived polynomials carry complex doubles.
    pub fn floating(p: u64, epsilon: i8, lambda: f64) -> Result<Self> {
        Self::new(p, epsilon, Coefficient::real(lambda))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn epsilon(&self) -> i8 {
        self.epsilon
    }

    pub fn lambda(&self) -> &Coefficient {
        &self.lambda
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_complex(self.p).re
    }

    pub fn is_exact(&self) -> bool {
        self.lambda.is_exact()
    }

    /// Tolerance appropriate for identity checks on this datum.
    pub fn identity_tolerance(&self) -> f64 {
        if self.is_exact() {
            0.0
        } else {
            FLOAT_IDENTITY_TOLERANCE
        }
    }

    fn lift(&self, c: Coefficient) -> Coefficient {
        if self.is_exact() {
            c
        } else {
            c.to_float(self.p)
        }
    }

    fn int(&self, n: i64) -> Coefficient {
        self.lift(Coefficient::integer(n))
    }

    fn eps(&self) -> Coefficient {
        self.int(self.epsilon as i64)
    }

    /// `p^{-1/2}·λ_p`
    pub fn lambda_over_sqrt_p(&self) -> Coefficient {
        let inv_sqrt_p = Coefficient::Exact(Surd::radical_part(BigRational::new(
            BigInt::from(1),
            BigInt::from(self.p),
        )));
        self.lambda.mul(&inv_sqrt_p, self.p)
    }

    /// `p^{1/2}·λ_p`
    fn lambda_times_sqrt_p(&self) -> Coefficient {
        let sqrt_p = Coefficient::Exact(Surd::radical_part(BigRational::from_integer(1.into())));
        self.lambda.mul(&sqrt_p, self.p)
    }

    /// `ε / p`
    fn eps_over_p(&self) -> Coefficient {
        self.lift(Coefficient::ratio(self.epsilon as i64, self.p as i64))
    }

    fn constant(&self, c: Coefficient) -> LaurentPolynomial {
        LaurentPolynomial::constant(self.p, c)
    }
}

/// Univariate polynomial in an auxiliary variable with Laurent coefficients.
pub type AuxPoly = Vec<LaurentPolynomial>;

fn aux_add(a: &[LaurentPolynomial], b: &[LaurentPolynomial], p: u64) -> AuxPoly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x.add(y).expect("same prime"),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => LaurentPolynomial::zero(p),
        })
        .collect()
}

fn aux_mul(a: &[LaurentPolynomial], b: &[LaurentPolynomial], p: u64) -> AuxPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![LaurentPolynomial::zero(p); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y).expect("same prime")).expect("same prime");
        }
    }
    out
}

fn aux_scale(a: &[LaurentPolynomial], c: &LaurentPolynomial) -> AuxPoly {
    a.iter().map(|x| x.mul(c).expect("same prime")).collect()
}

/// `Π (1 - m·Z)` over the given monomials `m = a^i b^j`.
fn linear_product(p: u64, monomials: &[(i32, i32)]) -> AuxPoly {
    let mut acc = vec![LaurentPolynomial::one(p)];
    for &(i, j) in monomials {
        let factor = vec![
            LaurentPolynomial::one(p),
            LaurentPolynomial::monomial(p, i, j, Coefficient::integer(-1)),
        ];
        acc = aux_mul(&acc, &factor, p);
    }
    acc
}

/// `P(X)` and `Q(Y)` coefficient lists.
pub fn denominator_x(p: u64) -> AuxPoly {
    linear_product(p, &[(1, 1), (1, -1), (-1, 1), (-1, -1)])
}

pub fn denominator_y(p: u64) -> AuxPoly {
    linear_product(p, &[(1, 0), (0, 1), (-1, 0), (0, -1)])
}

/// The pieces of the generating function at one prime.
#[derive(Clone, Debug)]
pub struct SuganoComponents {
    pub p_x: AuxPoly,
    pub q_y: AuxPoly,
    /// `h_xy[m][l]` is the coefficient of `X^m Y^l`.
    pub h_xy: Vec<Vec<LaurentPolynomial>>,
    pub m1_x: AuxPoly,
    pub m2_x: AuxPoly,
    pub sigma: LaurentPolynomial,
    pub tau: LaurentPolynomial,
}

impl SuganoComponents {
    pub fn h(&self, m: usize, l: usize) -> Option<&LaurentPolynomial> {
        self.h_xy.get(m).and_then(|row| row.get(l))
    }
}

/// Assembles `P`, `Q`, `H`, `M₁`, `M₂`, `σ`, `τ` as printed in Sugano's formula.
pub fn build_components(datum: &LocalBesselDatum) -> SuganoComponents {
    let p = datum.p;
    let lift = |poly: LaurentPolynomial| if datum.is_exact() { poly } else { poly.to_floating() };
    let sigma = lift(LaurentPolynomial::sigma(p));
    let tau = lift(LaurentPolynomial::tau(p));
    let one = datum.constant(datum.int(1));
    let p_x: AuxPoly = denominator_x(p).into_iter().map(lift).collect();
    let q_y: AuxPoly = denominator_y(p).into_iter().map(lift).collect();

    let lam = datum.lambda.clone();
    let lam_isp = datum.lambda_over_sqrt_p();
    let eps = datum.eps();
    let eps_over_p = datum.eps_over_p();

    // M₁(X)
    let p_minus_eps_inv = datum
        .int(p as i64 - datum.epsilon as i64)
        .inv(p)
        .expect("p - ε is nonzero");
    let bracket = sigma
        .scale(&datum.lambda_times_sqrt_p())
        .sub(&tau.sub(&one).expect("same prime").scale(&eps))
        .expect("same prime")
        .sub(&datum.constant(lam.mul(&lam, p)))
        .expect("same prime");
    let m1_x = vec![
        one.clone(),
        bracket.scale(&p_minus_eps_inv.neg()),
        datum.constant(eps_over_p.neg()),
    ];

    // M₂(X)
    let m2_x = vec![one.clone(), tau.neg(), tau.neg(), one.clone()];

    let p_dim = p_x.len();
    let mut h_xy = vec![vec![LaurentPolynomial::zero(p); 3]; 7];
    let mut add_at = |m: usize, l: usize, poly: &LaurentPolynomial| {
        h_xy[m][l] = h_xy[m][l].add(poly).expect("same prime");
    };

    // A(X) = M₁(X)(1 + X) + p^{-1/2}λσX²
    let mut a_x = aux_mul(&m1_x, &[one.clone(), one.clone()], p);
    a_x[2] = a_x[2].add(&sigma.scale(&lam_isp)).expect("same prime");
    // (1 + XY²)·A(X)
    for (m, c) in a_x.iter().enumerate() {
        add_at(m, 0, c);
        add_at(m + 1, 2, c);
    }
    // -XY·(σM₁(X) - p^{-1/2}λM₂(X))
    let b_x = aux_add(
        &aux_scale(&m1_x, &sigma),
        &m2_x.iter().map(|c| c.scale(&lam_isp).neg()).collect::<Vec<_>>(),
        p,
    );
    for (m, c) in b_x.iter().enumerate() {
        add_at(m + 1, 1, &c.neg());
    }
    // -p^{-1/2}λP(X)Y + p^{-1}εP(X)Y²
    for (m, c) in p_x.iter().enumerate().take(p_dim) {
        add_at(m, 1, &c.scale(&lam_isp).neg());
        add_at(m, 2, &c.scale(&eps_over_p));
    }

    SuganoComponents {
        p_x,
        q_y,
        h_xy,
        m1_x,
        m2_x,
        sigma,
        tau,
    }
}

/// The coefficients `U^{l,m}` for `l ≤ l_max`, `m ≤ m_max`.
#[derive(Clone, Debug)]
pub struct UTable {
    l_max: usize,
    m_max: usize,
    /// `entries[m][l]`
    entries: Vec<Vec<LaurentPolynomial>>,
}

impl UTable {
    pub fn get(&self, l: usize, m: usize) -> Option<&LaurentPolynomial> {
        self.entries.get(m).and_then(|row| row.get(l))
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    /// All `(l, m, U^{l,m})` with `l + 2m ≤ weight`, ordered by `(l + 2m, l)`.
    pub fn by_weight(&self, weight: usize) -> Vec<((usize, usize), &LaurentPolynomial)> {
        let mut out: Vec<_> = (0..=self.m_max)
            .flat_map(|m| (0..=self.l_max).map(move |l| (l, m)))
            .filter(|&(l, m)| l + 2 * m <= weight)
            .filter_map(|(l, m)| self.get(l, m).map(|u| ((l, m), u)))
            .collect();
        out.sort_by_key(|&((l, m), _)| (l + 2 * m, l));
        out
    }
}

/// Power-series expansion of `H/(P·Q)` by exact long division, first in `X`
/// then in `Y`, truncated at `X^{m_max} Y^{l_max}`.
pub fn expand_table(datum: &LocalBesselDatum, l_max: usize, m_max: usize) -> UTable {
    let comps = build_components(datum);
    let p = datum.p;
    let zero = || {
        if datum.is_exact() {
            LaurentPolynomial::zero(p)
        } else {
            LaurentPolynomial::zero(p).to_floating()
        }
    };
    let h = |m: usize, l: usize| comps.h(m, l).cloned().unwrap_or_else(zero);

    // W = H / P(X)
    let mut w = vec![vec![zero(); l_max + 1]; m_max + 1];
    for m in 0..=m_max {
        for l in 0..=l_max {
            let mut acc = h(m, l);
            for i in 1..comps.p_x.len().min(m + 1) {
                acc = acc.sub(&comps.p_x[i].mul(&w[m - i][l]).expect("same prime")).expect("same prime");
            }
            w[m][l] = acc;
        }
    }
    // C = W / Q(Y)
    let mut entries = vec![vec![zero(); l_max + 1]; m_max + 1];
    for m in 0..=m_max {
        for l in 0..=l_max {
            let mut acc = w[m][l].clone();
            for j in 1..comps.q_y.len().min(l + 1) {
                acc = acc
                    .sub(&comps.q_y[j].mul(&entries[m][l - j]).expect("same prime"))
                    .expect("same prime");
            }
            entries[m][l] = acc;
        }
    }
    UTable { l_max, m_max, entries }
}

/// `U^{l,m}`, the coefficient of `X^m Y^l`.
pub fn expand_u(datum: &LocalBesselDatum, l: usize, m: usize) -> LaurentPolynomial {
    expand_table(datum, l, m).entries[m][l].clone()
}

/// `U^{0,0} … U^{l_max,0}` from the one-variable specialization
/// `(1 - p^{-1/2}λY + p^{-1}εY²) / Q(Y)`.
pub fn expand_u_row(datum: &LocalBesselDatum, l_max: usize) -> Vec<LaurentPolynomial> {
    let p = datum.p;
    let lift = |poly: LaurentPolynomial| if datum.is_exact() { poly } else { poly.to_floating() };
    let numerator = [
        datum.constant(datum.int(1)),
        datum.constant(datum.lambda_over_sqrt_p().neg()),
        datum.constant(datum.eps_over_p()),
    ];
    let q: AuxPoly = denominator_y(p).into_iter().map(lift).collect();
    let mut row: Vec<LaurentPolynomial> = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        let mut acc = numerator.get(l).cloned().unwrap_or_else(|| lift(LaurentPolynomial::zero(p)));
        for (j, qj) in q.iter().enumerate().skip(1).take(l) {
            acc = acc.sub(&qj.mul(&row[l - j]).expect("same prime")).expect("same prime");
        }
        row.push(acc);
    }
    row
}

/// Index pairs `(l, m)` with `l + 2m ≤ degree`, ordered by `(l + 2m, l)`.
pub fn basis_indices(degree: u32) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = (0..=degree / 2)
        .flat_map(|m| (0..=degree - 2 * m).map(move |l| (l, m)))
        .collect();
    out.sort_by_key(|&(l, m)| (l + 2 * m, l));
    out
}

/// Orbit-sum indices `(j, k)`, `j ≥ k ≥ 0`, `j + k ≤ degree`.
fn orbit_indices(degree: u32) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = (0..=degree)
        .flat_map(|j| (0..=j).map(move |k| (j, k)))
        .filter(|&(j, k)| j + k <= degree)
        .collect();
    out.sort_by_key(|&(j, k)| (j + k, j));
    out
}

/// Coordinates of an invariant polynomial in the basis `U^{l,m}`.
///
/// Solves the square system on orbit-sum coordinates exactly (or with
/// partially pivoted elimination in floating mode). Only indices with
/// `l + 2m ≤ trace_degree` can appear.
pub fn decompose_in_u_basis(
    datum: &LocalBesselDatum,
    poly: &LaurentPolynomial,
) -> Result<BTreeMap<(u32, u32), Coefficient>> {
    let p = datum.p;
    let target = decompose_orbit_basis(poly)?;
    let degree = target.trace_degree;
    let cols = basis_indices(degree);
    let rows = orbit_indices(degree);
    debug_assert_eq!(cols.len(), rows.len());
    let table = expand_table(datum, degree as usize, (degree / 2) as usize);
    let floating = !datum.is_exact() || poly.is_floating();
    let norm = |c: Coefficient| if floating { c.to_float(p) } else { c };

    let n = rows.len();
    let mut matrix: Vec<Vec<Coefficient>> = Vec::with_capacity(n);
    for &(j, k) in &rows {
        let mut row: Vec<Coefficient> = cols
            .iter()
            .map(|&(l, m)| {
                let u = table.get(l as usize, m as usize).expect("table covers basis");
                norm(u.coeff(j as i32, k as i32))
            })
            .collect();
        let rhs = target.coords.get(&(j, k)).cloned().unwrap_or_else(Coefficient::zero);
        row.push(norm(rhs));
        matrix.push(row);
    }

    let solution = solve_linear(matrix, p, floating)?;
    Ok(cols
        .into_iter()
        .zip(solution)
        .filter(|(_, c)| !c.is_zero())
        .collect())
}

/// Gaussian elimination on an augmented `n × (n+1)` matrix.
fn solve_linear(mut a: Vec<Vec<Coefficient>>, p: u64, floating: bool) -> Result<Vec<Coefficient>> {
    let n = a.len();
    for col in 0..n {
        let pivot = if floating {
            (col..n)
                .max_by(|&x, &y| {
                    let nx = a[x][col].to_complex(p).norm();
                    let ny = a[y][col].to_complex(p).norm();
                    nx.total_cmp(&ny)
                })
                .filter(|&r| a[r][col].to_complex(p).norm() > 1e-300)
        } else {
            (col..n).find(|&r| !a[r][col].is_zero())
        };
        let pivot = pivot.ok_or(Error::SingularSystem)?;
        a.swap(col, pivot);
        let inv = a[col][col].inv(p).ok_or(Error::SingularSystem)?;
        for entry in a[col].iter_mut() {
            *entry = entry.mul(&inv, p);
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (entry, pv) in row.iter_mut().zip(&pivot_row) {
                *entry = entry.sub(&factor.mul(pv, p), p);
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n].clone()).collect())
}

/// Reassembles `Σ c_{l,m} U^{l,m}`.
pub fn reassemble_from_u_basis(
    datum: &LocalBesselDatum,
    coords: &BTreeMap<(u32, u32), Coefficient>,
) -> LaurentPolynomial {
    let l_max = coords.keys().map(|&(l, _)| l).max().unwrap_or(0) as usize;
    let m_max = coords.keys().map(|&(_, m)| m).max().unwrap_or(0) as usize;
    let table = expand_table(datum, l_max, m_max);
    let mut out = LaurentPolynomial::zero(datum.p);
    for (&(l, m), c) in coords {
        let term = table.get(l as usize, m as usize).expect("in range").scale(c);
        out = out.add(&term).expect("same prime");
    }
    out
}

/// `R = U^{2,0} - (1 - p^{-1/2}λU^{1,0} + c₂ + τ)`, the remainder left after
/// the leading terms of `U^{2,0}` are peeled off; it is `O(1/p)`.
pub fn u20_remainder(datum: &LocalBesselDatum) -> LaurentPolynomial {
    let p = datum.p;
    let row = expand_u_row(datum, 2);
    let comps = build_components(datum);
    let c2 = orbit_sum(p, 2, 0).expect("valid");
    let c2 = if datum.is_exact() { c2 } else { c2.to_floating() };
    let lead = datum
        .constant(datum.int(1))
        .sub(&row[1].scale(&datum.lambda_over_sqrt_p()))
        .and_then(|x| x.add(&c2))
        .and_then(|x| x.add(&comps.tau))
        .expect("same prime");
    row[2].sub(&lead).expect("same prime")
}

/// `max |P|` over an `n × n` midpoint grid of `[0,π]²` on the unit torus.
pub fn sup_norm_on_torus(poly: &LaurentPolynomial, n: usize) -> f64 {
    let compiled = poly.compile();
    let h = std::f64::consts::PI / n as f64;
    let mut best: f64 = 0.0;
    for i in 0..n {
        let t1 = (i as f64 + 0.5) * h;
        for j in 0..n {
            let t2 = (j as f64 + 0.5) * h;
            best = best.max(compiled.evaluate_angles(t1, t2).norm());
        }
    }
    best
}

#[cfg(test)]
mod tests;
