//! The Haar measure on the tempered Satake parameters `(θ₁, θ₂) ∈ [0,π]²`
//! and the local Plancherel measures `μ_p ∝ Δ_p⁻¹ dμ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::classgroup::{ClassCharacter, ClassGroup};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::sugano::{expand_table, LocalBesselDatum};
use crate::wpoly::LaurentPolynomial;

/// Per-axis orders of the refinement ladder.
pub const LADDER: [usize; 4] = [32, 64, 128, 256];

/// A tempered point, stored with `0 ≤ θ₁ ≤ θ₂ ≤ π`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralPoint {
    pub theta1: f64,
    pub theta2: f64,
}

fn fold_angle(t: f64) -> f64 {
    let r = t.rem_euclid(2.0 * PI);
    if r > PI {
        2.0 * PI - r
    } else {
        r
    }
}

impl SpectralPoint {
    /// Canonical representative of the Weyl orbit of `(e^{iθ₁}, e^{iθ₂})`.
    pub fn new(theta1: f64, theta2: f64) -> Self {
        let (x, y) = (fold_angle(theta1), fold_angle(theta2));
        SpectralPoint {
            theta1: x.min(y),
            theta2: x.max(y),
        }
    }

    pub fn a(&self) -> Complex64 {
        Complex64::cis(self.theta1)
    }

    pub fn b(&self) -> Complex64 {
        Complex64::cis(self.theta2)
    }

    /// `σ = 2cos θ₁ + 2cos θ₂`
    pub fn sigma(&self) -> f64 {
        2.0 * (self.theta1.cos() + self.theta2.cos())
    }

    /// `c_m = a^m + a^{-m} + b^m + b^{-m}`
    pub fn trace_power(&self, m: u32) -> f64 {
        2.0 * ((m as f64 * self.theta1).cos() + (m as f64 * self.theta2).cos())
    }
}

fn check_domain(theta1: f64, theta2: f64) -> Result<()> {
    let ok = |t: f64| (0.0..=PI).contains(&t);
    if ok(theta1) && ok(theta2) {
        Ok(())
    } else {
        Err(Error::invalid(format!("({theta1}, {theta2}) is outside [0,π]²")))
    }
}

fn haar_shape(theta1: f64, theta2: f64) -> f64 {
    let (c1, c2) = (theta1.cos(), theta2.cos());
    let (s1, s2) = (theta1.sin(), theta2.sin());
    (c1 - c2).powi(2) * s1 * s1 * s2 * s2
}

/// Unnormalized Haar shape `(cos θ₁ - cos θ₂)² sin²θ₁ sin²θ₂`.
pub fn haar_density(theta1: f64, theta2: f64) -> Result<f64> {
    check_domain(theta1, theta2)?;
    Ok(haar_shape(theta1, theta2))
}

fn delta_factor(datum: &LocalBesselDatum, theta: f64) -> f64 {
    let p = datum.p() as f64;
    let c = theta.cos();
    let lam = datum.lambda_f64();
    match datum.epsilon() {
        -1 => (1.0 + 1.0 / p).powi(2) - 4.0 * c * c / p,
        1 => (1.0 - 1.0 / p).powi(2) + (2.0 * c * p.sqrt() - lam) * (2.0 * c / p.sqrt() - lam) / p,
        _ => 1.0 - 2.0 * lam * c / p.sqrt() + 1.0 / p,
    }
}

/// The density `Δ_p(θ₁, θ₂)`, case-selected by the splitting symbol.
pub fn delta_p(datum: &LocalBesselDatum, theta1: f64, theta2: f64) -> Result<f64> {
    check_domain(theta1, theta2)?;
    Ok(delta_factor(datum, theta1) * delta_factor(datum, theta2))
}

#[derive(Clone, Debug, Serialize)]
pub enum MeasureKind {
    Haar,
    Plancherel { d: u64, datum: LocalBesselDatumInfo },
}

/// Serializable summary of a local datum.
#[derive(Clone, Debug, Serialize)]
pub struct LocalBesselDatumInfo {
    pub p: u64,
    pub epsilon: i8,
    pub lambda: f64,
}

/// One level of the quadrature ladder with density-weighted, normalized weights.
#[derive(Clone, Debug)]
struct Level {
    points: Vec<SpectralPoint>,
    weights: Vec<f64>,
    mass: f64,
}

/// A probability measure on the tempered set, discretized on the ladder.
#[derive(Clone, Debug)]
pub struct SpectralMeasure {
    kind: MeasureKind,
    datum: Option<LocalBesselDatum>,
    levels: Vec<Level>,
    normalizer: f64,
    normalizer_error: f64,
}

/// Quadrature controls: the ladder levels used and the caller's tolerance.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureRule {
    pub start_level: usize,
    pub tolerance: f64,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            start_level: 0,
            tolerance: 1e-10,
        }
    }
}

/// Result of [`integrate`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Integral {
    pub value: Complex64,
    pub error_estimate: f64,
    pub order: usize,
}

impl SpectralMeasure {
    fn build(kind: MeasureKind, datum: Option<LocalBesselDatum>, density: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut levels = Vec::with_capacity(LADDER.len());
        for &n in &LADDER {
            let rule = GaussLegendre::cached(n).on_interval(0.0, PI);
            let mut points = Vec::with_capacity(n * n);
            let mut weights = Vec::with_capacity(n * n);
            for &(t1, w1) in &rule {
                for &(t2, w2) in &rule {
                    let rho = density(t1, t2);
                    if !(rho >= 0.0) {
                        return Err(Error::DegenerateMeasure(format!("negative density {rho} at ({t1}, {t2})")));
                    }
                    points.push(SpectralPoint::new(t1, t2));
                    weights.push(w1 * w2 * rho);
                }
            }
            let mass: f64 = weights.iter().sum();
            if !(mass > 0.0) || !mass.is_finite() {
                return Err(Error::DegenerateMeasure(format!("total mass {mass}")));
            }
            for w in weights.iter_mut() {
                *w /= mass;
            }
            levels.push(Level { points, weights, mass });
        }
        // ordered region carries half the full-square mass
        let k = levels.len();
        let normalizer = levels[k - 1].mass / 2.0;
        let normalizer_error = (levels[k - 1].mass - levels[k - 2].mass).abs() / 2.0;
        Ok(SpectralMeasure {
            kind,
            datum,
            levels,
            normalizer,
            normalizer_error,
        })
    }

    pub fn haar() -> Self {
        Self::build(MeasureKind::Haar, None, haar_shape).expect("Haar density is nondegenerate")
    }

    /// `μ_{p,d,Λ}` from its local datum.
    pub fn plancherel(d: u64, datum: LocalBesselDatum) -> Result<Self> {
        let info = LocalBesselDatumInfo {
            p: datum.p(),
            epsilon: datum.epsilon(),
            lambda: datum.lambda_f64(),
        };
        let dat = datum.clone();
        let mut min_delta = f64::INFINITY;
        for i in 0..=64 {
            for j in 0..=64 {
                let t1 = PI * i as f64 / 64.0;
                let t2 = PI * j as f64 / 64.0;
                min_delta = min_delta.min(delta_factor(&dat, t1) * delta_factor(&dat, t2));
            }
        }
        if !(min_delta > 0.0) {
            return Err(Error::DegenerateMeasure(format!("Δ_p reaches {min_delta}")));
        }
        Self::build(MeasureKind::Plancherel { d, datum: info }, Some(datum), move |t1, t2| {
            haar_shape(t1, t2) / (delta_factor(&dat, t1) * delta_factor(&dat, t2))
        })
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    pub fn datum(&self) -> Option<&LocalBesselDatum> {
        self.datum.as_ref()
    }

    /// `Z`: integral of the unnormalized density over `θ₁ ≤ θ₂`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// `|Z_256 - Z_128|`
    pub fn normalizer_error(&self) -> f64 {
        self.normalizer_error
    }

    /// Density `ρ/Z` as a probability density on the ordered region.
    pub fn density(&self, theta1: f64, theta2: f64) -> Result<f64> {
        check_domain(theta1, theta2)?;
        let raw = match &self.datum {
            None => haar_shape(theta1, theta2),
            Some(d) => haar_shape(theta1, theta2) / (delta_factor(d, theta1) * delta_factor(d, theta2)),
        };
        Ok(raw / self.normalizer)
    }

    /// `Σ w·f` at ladder level `k`.
    pub fn level_sum(&self, level: usize, f: &impl Fn(SpectralPoint) -> Complex64) -> Complex64 {
        let l = &self.levels[level];
        l.points.iter().zip(&l.weights).map(|(&pt, &w)| f(pt) * w).sum()
    }
}

/// Integral against the measure by climbing the ladder until two successive
/// levels agree to the rule's tolerance. On failure the error carries the
/// last value and estimate.
pub fn integrate(
    f: impl Fn(SpectralPoint) -> Complex64,
    measure: &SpectralMeasure,
    rule: QuadratureRule,
) -> Result<Integral> {
    let start = rule.start_level.min(LADDER.len() - 2);
    let mut prev = measure.level_sum(start, &f);
    let mut last = Integral {
        value: prev,
        error_estimate: f64::INFINITY,
        order: LADDER[start],
    };
    for level in start + 1..LADDER.len() {
        let cur = measure.level_sum(level, &f);
        last = Integral {
            value: cur,
            error_estimate: (cur - prev).norm(),
            order: LADDER[level],
        };
        if last.error_estimate <= rule.tolerance {
            return Ok(last);
        }
        prev = cur;
    }
    Err(Error::ConvergenceFailure {
        value: last.value.re,
        estimate: last.error_estimate,
        tolerance: rule.tolerance,
    })
}

/// Integral of a Laurent polynomial against the measure.
pub fn integrate_polynomial(poly: &LaurentPolynomial, measure: &SpectralMeasure, rule: QuadratureRule) -> Result<Integral> {
    let compiled = poly.compile();
    integrate(|pt| compiled.evaluate_angles(pt.theta1, pt.theta2), measure, rule)
}

/// Diagnostics for the Plancherel normalization.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormalizationReport {
    /// `∫Δ_p⁻¹ dμ` against the normalized Haar measure.
    pub relative_mass: f64,
    /// `|relative_mass·(1 - ε/p) - 1|`
    pub prefactor_deviation: f64,
    /// Ordered-region mass of the Haar density with the printed constant `4/π²`.
    pub printed_haar_mass: f64,
}

pub fn normalization_report(measure: &SpectralMeasure, haar: &SpectralMeasure) -> NormalizationReport {
    let printed_haar_mass = 4.0 / (PI * PI) * haar.normalizer();
    match measure.datum() {
        None => NormalizationReport {
            relative_mass: 1.0,
            prefactor_deviation: 0.0,
            printed_haar_mass,
        },
        Some(d) => {
            let relative_mass = measure.normalizer() / haar.normalizer();
            let pre = 1.0 - d.epsilon() as f64 / d.p() as f64;
            NormalizationReport {
                relative_mass,
                prefactor_deviation: (relative_mass * pre - 1.0).abs(),
                printed_haar_mass,
            }
        }
    }
}

/// Builds `μ_{p,d,Λ}` directly from class-group data.
pub fn plancherel_measure(group: &ClassGroup, chi: &ClassCharacter, p: u64) -> Result<SpectralMeasure> {
    let datum = group.local_datum(chi, p)?;
    SpectralMeasure::plancherel(group.discriminant().get(), datum)
}

/// One row of the delta-relation table.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaRow {
    pub l: usize,
    pub m: usize,
    pub value: f64,
    pub imaginary: f64,
    pub expected: f64,
    pub error_estimate: f64,
    pub deviation: f64,
    pub pass: bool,
}

/// `∫U^{l,m} dμ_p` for `l + 2m ≤ max_degree` against `[l = m = 0]`.
pub fn delta_table(measure: &SpectralMeasure, max_degree: usize, tol: f64) -> Result<Vec<DeltaRow>> {
    let datum = measure
        .datum()
        .ok_or_else(|| Error::invalid("delta relations need a Plancherel measure"))?;
    let table = expand_table(datum, max_degree, max_degree / 2);
    let rule = QuadratureRule {
        start_level: 0,
        tolerance: tol.min(1e-10),
    };
    let mut rows = Vec::new();
    for ((l, m), u) in table.by_weight(max_degree) {
        let int = match integrate_polynomial(u, measure, rule) {
            Ok(i) => i,
            Err(Error::ConvergenceFailure { value, estimate, .. }) => Integral {
                value: Complex64::new(value, 0.0),
                error_estimate: estimate,
                order: LADDER[LADDER.len() - 1],
            },
            Err(e) => return Err(e),
        };
        let expected = if l == 0 && m == 0 { 1.0 } else { 0.0 };
        let deviation = (int.value - expected).norm();
        rows.push(DeltaRow {
            l,
            m,
            value: int.value.re,
            imaginary: int.value.im,
            expected,
            error_estimate: int.error_estimate,
            deviation,
            pass: deviation < tol,
        });
    }
    Ok(rows)
}

/// Rejection sampler with a grid-certified envelope.
#[derive(Clone, Debug)]
pub struct Sampler<'a> {
    measure: &'a SpectralMeasure,
    envelope: f64,
}

/// Grid resolution of the envelope scan.
pub const ENVELOPE_GRID: usize = 512;

impl<'a> Sampler<'a> {
    pub fn new(measure: &'a SpectralMeasure) -> Self {
        let mut sup: f64 = 0.0;
        for i in 0..=ENVELOPE_GRID {
            for j in i..=ENVELOPE_GRID {
                let t1 = PI * i as f64 / ENVELOPE_GRID as f64;
                let t2 = PI * j as f64 / ENVELOPE_GRID as f64;
                sup = sup.max(measure.density(t1, t2).expect("grid point in domain"));
            }
        }
        Sampler {
            measure,
            envelope: sup * 1.1,
        }
    }

    pub fn envelope(&self) -> f64 {
        self.envelope
    }

    /// One draw on the ordered region.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SpectralPoint> {
        loop {
            let t1: f64 = rng.gen_range(0.0..PI);
            let t2: f64 = rng.gen_range(0.0..PI);
            let rho = self.measure.density(t1, t2)?;
            if rho > self.envelope {
                return Err(Error::EnvelopeViolated {
                    density: rho,
                    envelope: self.envelope,
                });
            }
            if rng.gen::<f64>() * self.envelope < rho {
                return Ok(SpectralPoint::new(t1, t2));
            }
        }
    }
}

/// `n` i.i.d. draws from the measure.
pub fn sample<R: Rng + ?Sized>(measure: &SpectralMeasure, rng: &mut R, n: usize) -> Result<Vec<SpectralPoint>> {
    if n == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let sampler = Sampler::new(measure);
    (0..n).map(|_| sampler.draw(rng)).collect()
}

/// Mean and standard error of `f` over the points.
pub fn mean_and_stderr(points: &[SpectralPoint], f: impl Fn(&SpectralPoint) -> f64) -> (f64, f64) {
    let n = points.len() as f64;
    let vals: Vec<f64> = points.iter().map(f).collect();
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// `max |∫f dμ_p - ∫f dμ|` over `σ`, `τ` and the `U^{l,m}` with `l + 2m ≤ 2`.
pub fn weak_convergence_gap(measure: &SpectralMeasure, haar: &SpectralMeasure) -> Result<f64> {
    let datum = measure
        .datum()
        .ok_or_else(|| Error::invalid("weak convergence needs a Plancherel measure"))?;
    let p = datum.p();
    let mut tests = vec![LaurentPolynomial::sigma(p), LaurentPolynomial::tau(p)];
    let table = expand_table(datum, 2, 1);
    tests.extend(table.by_weight(2).into_iter().map(|(_, u)| u.clone()));
    let rule = QuadratureRule::default();
    let mut gap: f64 = 0.0;
    for t in &tests {
        let a = integrate_polynomial(t, measure, rule)?.value;
        let b = integrate_polynomial(t, haar, rule)?.value;
        gap = gap.max((a - b).norm());
    }
    Ok(gap)
}

#[cfg(test)]
mod tests;
