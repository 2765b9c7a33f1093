//! Two-variable Laurent polynomials in `a`, `b` with coefficients in ℚ(√p)
//! (exact) or ℂ (floating), together with the order-8 Weyl group `W`
//! generated by `(a,b) ↦ (b,a)`, `(a,b) ↦ (a⁻¹,b)` and `(a,b) ↦ (a,b⁻¹)`.
//!
//! Every `W`-invariant polynomial is a unique combination of orbit sums
//! `orbit_sum(j, k)` with `j ≥ k ≥ 0`; the orbit sum of `a^j b^k` has total
//! degree `j + k` once rewritten in `(a + a⁻¹, b + b⁻¹)`.

mod coeff;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

pub use coeff::{Coefficient, Surd, FLOAT_TOLERANCE, FLOAT_ZERO};

use crate::error::{Error, Result};

/// Generators of the Weyl group acting on `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeylGenerator {
    Swap,
    InvertA,
    InvertB,
}

impl WeylGenerator {
    pub const ALL: [WeylGenerator; 3] = [WeylGenerator::Swap, WeylGenerator::InvertA, WeylGenerator::InvertB];

    pub fn name(self) -> &'static str {
        match self {
            WeylGenerator::Swap => "(a,b) -> (b,a)",
            WeylGenerator::InvertA => "(a,b) -> (1/a,b)",
            WeylGenerator::InvertB => "(a,b) -> (a,1/b)",
        }
    }

    fn act(self, (i, j): (i32, i32)) -> (i32, i32) {
        match self {
            WeylGenerator::Swap => (j, i),
            WeylGenerator::InvertA => (-i, j),
            WeylGenerator::InvertB => (i, -j),
        }
    }
}

/// A Laurent polynomial `Σ c_{ij} a^i b^j` attached to a prime context `p`.
///
/// Zero coefficients are never stored. The map is ordered, so iteration,
/// equality and serialization are deterministic.
#[derive(Clone, Debug)]
pub struct LaurentPolynomial {
    prime: u64,
    floating: bool,
    terms: BTreeMap<(i32, i32), Coefficient>,
}

/// The operations accepted by [`poly_arith`].
#[derive(Clone, Debug)]
pub enum PolyOp {
    Add,
    Mul,
    Scale(Coefficient),
    Negate,
}

impl LaurentPolynomial {
    pub fn zero(prime: u64) -> Self {
        LaurentPolynomial {
            prime,
            floating: false,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(prime: u64) -> Self {
        Self::constant(prime, Coefficient::one())
    }

    pub fn constant(prime: u64, c: Coefficient) -> Self {
        Self::monomial(prime, 0, 0, c)
    }

    pub fn monomial(prime: u64, i: i32, j: i32, c: Coefficient) -> Self {
        let mut poly = Self::zero(prime);
        poly.floating = !c.is_exact();
        if !c.is_zero() {
            poly.terms.insert((i, j), c);
        }
        poly
    }

    /// Builds a polynomial from `(i, j, coefficient)` triples, summing repeats.
    pub fn from_terms(prime: u64, terms: impl IntoIterator<Item = (i32, i32, Coefficient)>) -> Self {
        let mut poly = Self::zero(prime);
        for (i, j, c) in terms {
            poly.accumulate((i, j), &c);
        }
        poly.canonicalize();
        poly
    }

    /// `σ(a,b) = a + b + a⁻¹ + b⁻¹`
    pub fn sigma(prime: u64) -> Self {
        orbit_sum(prime, 1, 0).expect("valid indices")
    }

    /// `τ(a,b) = 1 + ab + ab⁻¹ + a⁻¹b + a⁻¹b⁻¹`
    pub fn tau(prime: u64) -> Self {
        let one = Self::one(prime);
        one.add(&orbit_sum(prime, 1, 1).expect("valid indices"))
            .expect("same prime")
    }

    /// `c_m(a,b) = a^m + a^{-m} + b^m + b^{-m}` (for `m ≥ 1`).
    pub fn power_trace(prime: u64, m: u32) -> Self {
        let m = m as i32;
        Self::from_terms(
            prime,
            [(m, 0), (-m, 0), (0, m), (0, -m)]
                .into_iter()
                .map(|(i, j)| (i, j, Coefficient::one())),
        )
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn is_floating(&self) -> bool {
        self.floating
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored (nonzero) monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, i32), &Coefficient)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: i32, j: i32) -> Coefficient {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(|| {
            if self.floating {
                Coefficient::real(0.0)
            } else {
                Coefficient::zero()
            }
        })
    }

    /// Largest `|i| + |j|` over the support (0 for the zero polynomial).
    pub fn max_total_exponent(&self) -> i32 {
        self.terms.keys().map(|&(i, j)| i.abs() + j.abs()).max().unwrap_or(0)
    }

    fn accumulate(&mut self, key: (i32, i32), c: &Coefficient) {
        if !c.is_exact() {
            self.floating = true;
        }
        let p = self.prime;
        let entry = self.terms.entry(key).or_insert_with(Coefficient::zero);
        *entry = entry.add(c, p);
    }

    fn canonicalize(&mut self) {
        if self.floating {
            let p = self.prime;
            for c in self.terms.values_mut() {
                if c.is_exact() {
                    *c = c.to_float(p);
                }
            }
        }
        self.terms.retain(|_, c| !c.is_zero());
    }

    fn check_context(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::invalid(format!(
                "mixed prime contexts {} and {}",
                self.prime, other.prime
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let mut out = self.clone();
        out.floating |= other.floating;
        for (k, c) in &other.terms {
            out.accumulate(*k, c);
        }
        out.canonicalize();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentPolynomial {
            prime: self.prime,
            floating: self.floating,
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let p = self.prime;
        let mut out = Self::zero(p);
        out.floating = self.floating || other.floating;
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                out.accumulate((i1 + i2, j1 + j2), &c1.mul(c2, p));
            }
        }
        out.canonicalize();
        Ok(out)
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        let p = self.prime;
        let mut out = Self::zero(p);
        out.floating = self.floating || !c.is_exact();
        for (k, v) in &self.terms {
            out.terms.insert(*k, v.mul(c, p));
        }
        out.canonicalize();
        out
    }

    /// Converts every coefficient to a complex double.
    pub fn to_floating(&self) -> Self {
        let p = self.prime;
        let mut out = self.clone();
        out.floating = true;
        for c in out.terms.values_mut() {
            *c = c.to_float(p);
        }
        out.canonicalize();
        out
    }

    /// `Σ c_{ij} a^i b^j` at a point with nonzero coordinates.
    pub fn evaluate(&self, a: Complex64, b: Complex64) -> Result<Complex64> {
        if a.norm() == 0.0 || b.norm() == 0.0 {
            return Err(Error::invalid("evaluation point has a zero coordinate"));
        }
        Ok(self.compile().evaluate(a, b))
    }

    /// Precomputes complex coefficients for repeated evaluation.
    pub fn compile(&self) -> CompiledPolynomial {
        let p = self.prime;
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|(&(i, j), c)| (i, j, c.to_complex(p)))
            .collect();
        let max_exp = terms.iter().map(|&(i, j, _)| i.abs().max(j.abs())).max().unwrap_or(0);
        CompiledPolynomial { terms, max_exp }
    }

    /// The polynomial `P ∘ g` for a Weyl generator `g`.
    pub fn substitute(&self, g: WeylGenerator) -> Self {
        LaurentPolynomial {
            prime: self.prime,
            floating: self.floating,
            terms: self.terms.iter().map(|(k, c)| (g.act(*k), c.clone())).collect(),
        }
    }

    /// Ok when fixed by all three generators, otherwise names the first violated one.
    pub fn check_invariant(&self) -> Result<()> {
        for g in WeylGenerator::ALL {
            if !self.substitute(g).approx_eq(self, FLOAT_TOLERANCE) {
                return Err(Error::NotInvariant { generator: g.name() });
            }
        }
        Ok(())
    }

    pub fn is_invariant(&self) -> bool {
        self.check_invariant().is_ok()
    }

    /// Coefficientwise comparison; exact pairs must match exactly,
    /// anything involving a float within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.prime != other.prime {
            return false;
        }
        let p = self.prime;
        let keys: std::collections::BTreeSet<_> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().all(|&(i, j)| {
            let a = self.coeff(i, j);
            let b = other.coeff(i, j);
            if a.is_exact() && b.is_exact() {
                a == b
            } else {
                (a.to_complex(p) - b.to_complex(p)).norm() <= tol
            }
        })
    }

    /// Bit-exact structural equality (same prime, same mode, same map).
    pub fn exact_eq(&self, other: &Self) -> bool {
        self.prime == other.prime && self.floating == other.floating && self.terms == other.terms
    }

    /// JSON object `{"i,j": coefficient}`; see [`Coefficient::to_json`].
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .terms
            .iter()
            .map(|(&(i, j), c)| (format!("{i},{j}"), c.to_json()))
            .collect();
        serde_json::Value::Object(map)
    }
}

impl PartialEq for LaurentPolynomial {
    /// Equality within [`FLOAT_TOLERANCE`] (exact when both sides are exact).
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, FLOAT_TOLERANCE)
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if i != 0 {
                write!(f, "·a^{i}")?;
            }
            if j != 0 {
                write!(f, "·b^{j}")?;
            }
        }
        Ok(())
    }
}

/// Complex-coefficient snapshot of a polynomial for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPolynomial {
    terms: Vec<(i32, i32, Complex64)>,
    max_exp: i32,
}

impl CompiledPolynomial {
    pub fn evaluate(&self, a: Complex64, b: Complex64) -> Complex64 {
        let n = self.max_exp as usize;
        let pa = powers(a, n);
        let pb = powers(b, n);
        let idx = |e: i32| (e + self.max_exp) as usize;
        self.terms
            .iter()
            .map(|&(i, j, c)| c * pa[idx(i)] * pb[idx(j)])
            .sum()
    }

    /// Evaluation on the unit torus at `(e^{iθ₁}, e^{iθ₂})`.
    pub fn evaluate_angles(&self, theta1: f64, theta2: f64) -> Complex64 {
        self.evaluate(Complex64::cis(theta1), Complex64::cis(theta2))
    }
}

/// `[z^{-n}, ..., z^{n}]`
fn powers(z: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0); 2 * n + 1];
    let zi = z.inv();
    for k in 1..=n {
        out[n + k] = out[n + k - 1] * z;
        out[n - k] = out[n - k + 1] * zi;
    }
    out
}

/// The sum over the `W`-orbit of `a^j b^k`, each monomial once.
pub fn orbit_sum(prime: u64, j: i32, k: i32) -> Result<LaurentPolynomial> {
    if k < 0 || j < k {
        return Err(Error::invalid(format!("orbit_sum needs j >= k >= 0, got ({j}, {k})")));
    }
    let mut monomials = std::collections::BTreeSet::new();
    for (x, y) in [(j, k), (k, j)] {
        for sx in [1, -1] {
            for sy in [1, -1] {
                monomials.insert((sx * x, sy * y));
            }
        }
    }
    Ok(LaurentPolynomial::from_terms(
        prime,
        monomials.into_iter().map(|(x, y)| (x, y, Coefficient::one())),
    ))
}

/// Coordinates of an invariant polynomial in the orbit-sum basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitDecomposition {
    pub coords: BTreeMap<(u32, u32), Coefficient>,
    /// Total degree as a polynomial in `(a + a⁻¹, b + b⁻¹)`.
    pub trace_degree: u32,
}

impl OrbitDecomposition {
    pub fn reassemble(&self, prime: u64) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero(prime);
        for (&(j, k), c) in &self.coords {
            let term = orbit_sum(prime, j as i32, k as i32).expect("j >= k").scale(c);
            out = out.add(&term).expect("same prime");
        }
        out
    }
}

/// Rewrites a `W`-invariant polynomial in orbit sums.
///
/// The coordinate of `orbit_sum(j, k)` is the coefficient of `a^j b^k`.
/// Leading parts of distinct orbit sums in `(a + a⁻¹, b + b⁻¹)` are distinct
/// monomials, so the trace degree is the largest `j + k` present.
pub fn decompose_orbit_basis(poly: &LaurentPolynomial) -> Result<OrbitDecomposition> {
    poly.check_invariant()?;
    let coords: BTreeMap<(u32, u32), Coefficient> = poly
        .terms()
        .filter(|(&(i, j), _)| i >= j && j >= 0)
        .map(|(&(i, j), c)| ((i as u32, j as u32), c.clone()))
        .collect();
    let trace_degree = coords.keys().map(|&(j, k)| j + k).max().unwrap_or(0);
    Ok(OrbitDecomposition { coords, trace_degree })
}

/// Dispatches a ring operation; binary operations need `rhs`.
pub fn poly_arith(op: PolyOp, lhs: &LaurentPolynomial, rhs: Option<&LaurentPolynomial>) -> Result<LaurentPolynomial> {
    let need_rhs = || rhs.ok_or_else(|| Error::invalid("binary operation needs two operands"));
    match op {
        PolyOp::Add => lhs.add(need_rhs()?),
        PolyOp::Mul => lhs.mul(need_rhs()?),
        PolyOp::Scale(c) => Ok(lhs.scale(&c)),
        PolyOp::Negate => Ok(lhs.neg()),
    }
}

#[cfg(test)]
mod tests;
