//! Local L-factors on the tempered set, their averages against `μ_p`, Euler
//! products of those averages and reference Dirichlet / Hecke L-values.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::arith::{kronecker, primes_up_to};
use crate::classgroup::{ClassCharacter, ClassGroup};
use crate::error::{Error, Result};
use crate::measures::{integrate, QuadratureRule, SpectralMeasure, SpectralPoint};
use crate::sugano::LocalBesselDatum;
use crate::wpoly::{Coefficient, LaurentPolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalFactorKind {
    /// Degree 4: roots `a, b, a⁻¹, b⁻¹`.
    Spin,
    /// Degree 5: roots `1, ab, ab⁻¹, a⁻¹b, a⁻¹b⁻¹`.
    Projection,
}

impl LocalFactorKind {
    pub fn roots(self, a: Complex64, b: Complex64) -> Vec<Complex64> {
        match self {
            LocalFactorKind::Spin => vec![a, b, a.inv(), b.inv()],
            LocalFactorKind::Projection => {
                vec![Complex64::new(1.0, 0.0), a * b, a / b, b / a, (a * b).inv()]
            }
        }
    }
}

/// `p^{-s}`
fn p_pow(p: u64, s: Complex64) -> Complex64 {
    (-s * (p as f64).ln()).exp()
}

/// `Π (1 - r·p^{-s})⁻¹` over the roots of the given kind.
pub fn local_factor(kind: LocalFactorKind, p: u64, a: Complex64, b: Complex64, s: Complex64) -> Result<Complex64> {
    let x = p_pow(p, s);
    let mut acc = Complex64::new(1.0, 0.0);
    for (i, r) in kind.roots(a, b).into_iter().enumerate() {
        let f = 1.0 - r * x;
        if f.norm() < 1e-15 {
            return Err(Error::Pole(format!("factor {} vanishes at p = {p}, s = {s}", i + 1)));
        }
        acc /= f;
    }
    Ok(acc)
}

pub fn local_factor_at(kind: LocalFactorKind, p: u64, point: SpectralPoint, s: Complex64) -> Result<Complex64> {
    local_factor(kind, p, point.a(), point.b(), s)
}

/// `H_0..H_M` and `c_1..c_M` at one prime.
#[derive(Clone, Debug)]
pub struct DirichletCoefficients {
    pub p: u64,
    pub h: Vec<LaurentPolynomial>,
    pub traces: Vec<LaurentPolynomial>,
}

/// `H_m = Σ_{k₁+k₂+k₃+k₄=m} a^{k₁} b^{k₂} a^{-k₃} b^{-k₄}` by direct enumeration
/// of compositions, and the power traces `c_m`.
pub fn dirichlet_coefficients(p: u64, max: usize) -> DirichletCoefficients {
    let h = (0..=max)
        .map(|m| {
            let m = m as i32;
            let mut terms = Vec::new();
            for k1 in 0..=m {
                for k2 in 0..=m - k1 {
                    for k3 in 0..=m - k1 - k2 {
                        let k4 = m - k1 - k2 - k3;
                        terms.push((k1 - k3, k2 - k4, Coefficient::one()));
                    }
                }
            }
            LaurentPolynomial::from_terms(p, terms)
        })
        .collect();
    let traces = (1..=max as u32).map(|m| LaurentPolynomial::power_trace(p, m)).collect();
    DirichletCoefficients { p, h, traces }
}

/// Sum of the coefficients, i.e. the value at `a = b = 1`.
pub fn monomial_count(poly: &LaurentPolynomial) -> f64 {
    poly.evaluate(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
        .map(|z| z.re)
        .unwrap_or(0.0)
}

fn require_half_plane(s: Complex64) -> Result<()> {
    if s.re > 0.5 {
        Ok(())
    } else {
        Err(Error::UnsupportedRegion(format!("Re(s) = {} must exceed 1/2", s.re)))
    }
}

/// `(1 - λ_p p^{-1/2-s} + ε p^{-1-2s})⁻¹`
pub fn closed_form_average(datum: &LocalBesselDatum, s: Complex64) -> Complex64 {
    let p = datum.p();
    let x = p_pow(p, s + 0.5);
    (1.0 - datum.lambda_f64() * x + datum.epsilon() as f64 * x * x).inv()
}

/// Quadrature and closed form of `∫ L_p(spin, s) dμ_p`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LocalAverage {
    pub numeric: Complex64,
    pub closed_form: Complex64,
    pub error_estimate: f64,
}

pub fn average_local_factor(measure: &SpectralMeasure, s: Complex64, rule: QuadratureRule) -> Result<LocalAverage> {
    require_half_plane(s)?;
    let datum = measure
        .datum()
        .ok_or_else(|| Error::invalid("local averages need a Plancherel measure"))?;
    let p = datum.p();
    let integral = integrate(
        |pt| local_factor_at(LocalFactorKind::Spin, p, pt, s).expect("no poles on the tempered set for Re(s) > 0"),
        measure,
        rule,
    )?;
    Ok(LocalAverage {
        numeric: integral.value,
        closed_form: closed_form_average(datum, s),
        error_estimate: integral.error_estimate,
    })
}

/// Euler product of the closed-form local averages with partial products.
#[derive(Clone, Debug, Serialize)]
pub struct EulerProduct {
    pub value: Complex64,
    /// `(cutoff, partial product)` at each power of ten below the cutoff and at the cutoff.
    pub partials: Vec<(u64, Complex64)>,
    pub primes_used: usize,
}

pub fn euler_product_average(group: &ClassGroup, chi: &ClassCharacter, s: Complex64, cutoff: u64) -> Result<EulerProduct> {
    require_half_plane(s)?;
    if cutoff < 2 {
        return Err(Error::invalid("prime cutoff must be at least 2"));
    }
    let primes = primes_up_to(cutoff);
    let mut checkpoints: Vec<u64> = (2..).map(|e| 10u64.pow(e)).take_while(|&c| c < cutoff).collect();
    checkpoints.push(cutoff);
    let mut next = 0;
    let mut partials = Vec::new();
    let mut acc = Complex64::new(1.0, 0.0);
    for &p in &primes {
        while next < checkpoints.len() && p > checkpoints[next] {
            partials.push((checkpoints[next], acc));
            next += 1;
        }
        let eps = group.kronecker_symbol(p)?;
        let datum = LocalBesselDatum::new(p, eps, Coefficient::real(group.lambda_p(chi, p)?))?;
        acc *= closed_form_average(&datum, s);
    }
    while next < checkpoints.len() {
        partials.push((checkpoints[next], acc));
        next += 1;
    }
    Ok(EulerProduct {
        value: acc,
        partials,
        primes_used: primes.len(),
    })
}

/// Characters for reference Dirichlet series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DirichletCharacter {
    /// The trivial character; its series is `ζ(s)`.
    Principal,
    /// `n ↦ (-d / n)` for a fundamental `-d`.
    Quadratic(u64),
}

impl DirichletCharacter {
    pub fn value(self, n: u64) -> i32 {
        match self {
            DirichletCharacter::Principal => 1,
            DirichletCharacter::Quadratic(d) => kronecker(-(d as i64), n),
        }
    }

    pub fn period(self) -> u64 {
        match self {
            DirichletCharacter::Principal => 1,
            DirichletCharacter::Quadratic(d) => d,
        }
    }
}

/// A truncated Dirichlet series with its Euler-Maclaurin tail correction.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LValue {
    pub value: Complex64,
    pub terms: u64,
    /// `terms^{1-Re s}/(Re s - 1)` (uncorrected tail size; infinite when `Re s ≤ 1`).
    pub tail_bound: f64,
    /// The tail correction that was added to the partial sum.
    pub correction: Complex64,
}

/// Euler-Maclaurin expansion of the Hurwitz tail `Σ_{j≥0} (j + a)^{-s}`.
/// At `s = 1` the pole term `a^{1-s}/(s-1)` is replaced by `-log a`; the
/// discarded constant cancels across a full period of a non-principal character.
fn hurwitz_tail(s: Complex64, a: f64) -> Complex64 {
    let la = a.ln();
    let pow = |e: Complex64| (e * la).exp();
    let mut t = pow(-s) * 0.5 + s * pow(-s - 1.0) / 12.0 - s * (s + 1.0) * (s + 2.0) * pow(-s - 3.0) / 720.0
        + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * pow(-s - 5.0) / 30240.0;
    if (s - 1.0).norm() < 1e-12 {
        t -= la;
    } else {
        t += pow(1.0 - s) / (s - 1.0);
    }
    t
}

/// `Σ χ(n) n^{-s}` summed over `n ≤ terms` (rounded up to a full period) plus
/// the tail from the Euler-Maclaurin formula. The principal series needs
/// `Re s > 1`; quadratic characters are allowed on `Re s > 0`.
pub fn dirichlet_l(chi: DirichletCharacter, s: Complex64, terms: u64) -> Result<LValue> {
    if terms < 1000 {
        return Err(Error::invalid("at least 1000 terms are required"));
    }
    match chi {
        DirichletCharacter::Principal if s.re <= 1.0 => {
            return Err(Error::UnsupportedRegion(format!("ζ(s) needs Re(s) > 1, got {s}")))
        }
        DirichletCharacter::Quadratic(_) if s.re <= 0.0 => {
            return Err(Error::UnsupportedRegion(format!("L(s, χ) needs Re(s) > 0, got {s}")))
        }
        _ => {}
    }
    let q = chi.period();
    let n_max = terms.div_ceil(q) * q;
    let mut sum = Complex64::new(0.0, 0.0);
    // largest terms last for better rounding
    for n in (1..=n_max).rev() {
        let c = chi.value(n);
        if c != 0 {
            sum += c as f64 * (-s * (n as f64).ln()).exp();
        }
    }
    // Σ_{n > n_max} χ(n) n^{-s} = q^{-s} Σ_r χ(r) Σ_{j≥J} (j + r/q)^{-s}, J = n_max/q
    let j0 = (n_max / q) as f64;
    let qs = (-s * (q as f64).ln()).exp();
    let mut correction = Complex64::new(0.0, 0.0);
    for r in 1..=q {
        let c = chi.value(r);
        if c != 0 {
            correction += c as f64 * hurwitz_tail(s, j0 + r as f64 / q as f64);
        }
    }
    correction *= qs;
    let tail_bound = if s.re > 1.0 {
        (n_max as f64).powf(1.0 - s.re) / (s.re - 1.0)
    } else {
        f64::INFINITY
    };
    Ok(LValue {
        value: sum + correction,
        terms: n_max,
        tail_bound,
        correction,
    })
}

/// `L(Λ, s) = (1/w) Σ_c Λ(c) Σ_{(x,y) ≠ 0} Q_c(x,y)^{-s}` summed over the
/// ellipses `Q_c ≤ bound`, plus the continuous tail `(2π/√d)·B^{1-s}/(s-1)`.
pub fn hecke_l_via_forms(group: &ClassGroup, chi: &ClassCharacter, s: Complex64, bound: f64) -> Result<Complex64> {
    if s.re <= 1.0 {
        return Err(Error::UnsupportedRegion(format!("lattice sums need Re(s) > 1, got {s}")));
    }
    let d = group.discriminant().get() as f64;
    let tail = 2.0 * PI / d.sqrt() * (bound.powf(1.0 - s.re) * Complex64::cis(-s.im * bound.ln())) / (s - 1.0);
    let mut total = Complex64::new(0.0, 0.0);
    for (i, form) in group.classes().iter().enumerate() {
        let (a, b, c) = (form.a as f64, form.b as f64, form.c as f64);
        // Q(x,y) ≤ B forces y² ≤ 4aB/d
        let y_max = (4.0 * a * bound / d).sqrt().floor() as i64;
        let mut sum = Complex64::new(0.0, 0.0);
        for y in -y_max..=y_max {
            let yf = y as f64;
            // a x² + b y x + (c y² - B) ≤ 0
            let disc = (b * yf).powi(2) - 4.0 * a * (c * yf * yf - bound);
            if disc < 0.0 {
                continue;
            }
            let root = disc.sqrt();
            let lo = ((-b * yf - root) / (2.0 * a)).ceil() as i64;
            let hi = ((-b * yf + root) / (2.0 * a)).floor() as i64;
            for x in lo..=hi {
                if x == 0 && y == 0 {
                    continue;
                }
                let v = form.eval(x, y) as f64;
                if v <= bound {
                    sum += (-s * v.ln()).exp();
                }
            }
        }
        total += chi.value(i) * (sum + tail);
    }
    Ok(total / group.unit_count() as f64)
}

/// `log c_k` and both printed forms of `log c_{k,d}`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormalizingConstants {
    pub log_c_k: f64,
    pub log_c_kd: f64,
    pub log_c_kd_via_l1: f64,
}

pub fn normalizing_constants(k: u32, group: &ClassGroup, l1: f64) -> Result<NormalizingConstants> {
    if k < 3 {
        return Err(Error::invalid("normalizing constants need k >= 3"));
    }
    let kf = k as f64;
    let log_c_k = 0.5 * PI.ln() - 4f64.ln() + (3.0 - 2.0 * kf) * (4.0 * PI).ln() + ln_gamma(kf - 1.5) + ln_gamma(kf - 2.0);
    let d = group.discriminant().get() as f64;
    let w = group.unit_count() as f64;
    let h = group.class_number() as f64;
    let log_c_kd = (1.5 - kf) * (d / 4.0).ln() + 4f64.ln() + log_c_k - w.ln() - h.ln();
    let log_c_kd_via_l1 = (1.0 - kf) * (d / 4.0).ln() + (4.0 * PI).ln() + log_c_k - 2.0 * w.ln() - l1.ln();
    Ok(NormalizingConstants {
        log_c_k,
        log_c_kd,
        log_c_kd_via_l1,
    })
}
