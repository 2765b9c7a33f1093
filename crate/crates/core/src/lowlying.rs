//! Explicit-formula bookkeeping for low-lying zeros: test functions, the
//! symmetry functionals, the prime sums `M_k` and `N_k`, the gamma-factor
//! term, and a synthetic family drawn from the local measures `μ_p`.
//!
//! Scales follow the proof's convention: prime sums are normalized by
//! `log(k²)`, not by the `(γ/π)·log k` of the density statement.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::primes_up_to;
use crate::classgroup::{ClassCharacter, ClassGroup};
use crate::error::{Error, Result};
use crate::measures::{integrate_polynomial, plancherel_measure, QuadratureRule, Sampler, SpectralMeasure};
use crate::quadrature::composite;
use crate::rng::map_blocks;
use crate::wpoly::LaurentPolynomial;

/// Support radius beyond which the low-lying theorem is not claimed.
pub const THEOREM_SUPPORT_LIMIT: f64 = 4.0 / 15.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TestFunction {
    /// `φ̂(t) = max(0, 1 - |t|/α)`, `φ(x) = α·(sin(παx)/(παx))²`.
    Fejer { alpha: f64 },
    Zero,
}

pub fn fejer_test_function(alpha: f64) -> Result<TestFunction> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::invalid(format!("support radius must be positive, got {alpha}")));
    }
    Ok(TestFunction::Fejer { alpha })
}

impl TestFunction {
    pub fn alpha(&self) -> f64 {
        match *self {
            TestFunction::Fejer { alpha } => alpha,
            TestFunction::Zero => 0.0,
        }
    }

    pub fn phi(&self, x: f64) -> f64 {
        match *self {
            TestFunction::Fejer { alpha } => {
                let u = PI * alpha * x;
                if u.abs() < 1e-8 {
                    alpha * (1.0 - u * u / 3.0)
                } else {
                    alpha * (u.sin() / u).powi(2)
                }
            }
            TestFunction::Zero => 0.0,
        }
    }

    pub fn phi_hat(&self, t: f64) -> f64 {
        match *self {
            TestFunction::Fejer { alpha } => (1.0 - t.abs() / alpha).max(0.0),
            TestFunction::Zero => 0.0,
        }
    }
}

/// `Si(z) = ∫₀^z sin(u)/u du` for `z ≥ 0`.
fn sine_integral(z: f64) -> f64 {
    if z <= 20.0 {
        sine_series(z)
    } else {
        // asymptotic auxiliary functions f, g
        let (mut f, mut g) = (0.0, 0.0);
        let mut tf = 1.0 / z;
        let mut tg = 1.0 / (z * z);
        for n in 0..40 {
            f += tf;
            g += tg;
            let k = 2 * n as i32;
            let next_f = -tf * ((k + 1) * (k + 2)) as f64 / (z * z);
            let next_g = -tg * ((k + 2) * (k + 3)) as f64 / (z * z);
            if next_f.abs() > tf.abs() {
                break;
            }
            tf = next_f;
            tg = next_g;
        }
        PI / 2.0 - f * z.cos() - g * z.sin()
    }
}

fn sine_series(z: f64) -> f64 {
    // Σ (-1)^n z^{2n+1} / ((2n+1)(2n+1)!)
    let mut power = z; // z^{2n+1}/(2n+1)!
    let mut sum = 0.0;
    for n in 0..200 {
        let k = (2 * n + 1) as f64;
        let term = power / k;
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
        power *= -z * z / ((k + 1.0) * (k + 2.0));
    }
    sum
}

/// `∫_X^∞ cos(ωx)/x² dx`
fn cos_tail(omega: f64, x: f64) -> f64 {
    let w = omega.abs();
    if w == 0.0 {
        1.0 / x
    } else {
        (w * x).cos() / x - w * (PI / 2.0 - sine_integral(w * x))
    }
}

/// `∫ φ(x) e^{-2πixt} dx` by panel quadrature on `[0, X]` and an exact
/// sine-integral tail beyond `X`.
pub fn numerical_fourier_transform(phi: &TestFunction, t: f64) -> f64 {
    let alpha = match *phi {
        TestFunction::Fejer { alpha } => alpha,
        TestFunction::Zero => return 0.0,
    };
    let x_max = 200.0 / alpha;
    let freq = t.abs() + alpha;
    let panels = ((x_max * freq * 4.0).ceil() as usize).max(64);
    let head = composite(0.0, x_max, panels, 20, |x| phi.phi(x) * (2.0 * PI * t * x).cos());
    // φ(x) = (1 - cos 2παx)/(2π²αx²)
    let w = 2.0 * PI * t;
    let a = 2.0 * PI * alpha;
    let tail = (cos_tail(w, x_max) - 0.5 * cos_tail(w + a, x_max) - 0.5 * cos_tail(w - a, x_max)) / (2.0 * PI * PI * alpha);
    2.0 * (head + tail)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SymmetryMeasure {
    /// `dx - δ₀/2`
    Sp,
    /// `dx + δ₀/2`
    O,
}

/// `φ̂(0) ∓ φ(0)/2`
pub fn sigma_integral(phi: &TestFunction, m: SymmetryMeasure) -> f64 {
    let half = phi.phi(0.0) / 2.0;
    match m {
        SymmetryMeasure::Sp => phi.phi_hat(0.0) - half,
        SymmetryMeasure::O => phi.phi_hat(0.0) + half,
    }
}

/// A normalized prime sum with its limiting value.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PrimeSum {
    pub value: f64,
    pub target: f64,
    pub deviation: f64,
    pub primes: usize,
}

/// `(2/L)·Σ_p w(p)·(log p/p)·φ̂(scale·log p/L)`, `L = log k²`, over the primes
/// with `scale·log p/L` inside the support.
fn weighted_prime_sum(phi: &TestFunction, k: f64, scale: f64, weight: impl Fn(u64) -> f64) -> (f64, usize) {
    let l = 2.0 * k.ln();
    let limit = (phi.alpha() * l / scale).exp();
    if limit < 2.0 {
        return (0.0, 0);
    }
    let primes = primes_up_to(limit.floor() as u64);
    let sum: f64 = primes
        .iter()
        .map(|&p| {
            let lp = (p as f64).ln();
            weight(p) * lp / p as f64 * phi.phi_hat(scale * lp / l)
        })
        .sum();
    (2.0 * sum / l, primes.len())
}

fn check_k(k: f64) -> Result<()> {
    if k >= 10.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("k must be at least 10, got {k}")))
    }
}

/// `M_k(φ) = (2/log k²)·Σ λ_p (log p/p) φ̂(log p/log k²)`, target `φ(0)`.
pub fn prime_sum_m(phi: &TestFunction, k: f64, group: &ClassGroup, chi: &ClassCharacter) -> Result<PrimeSum> {
    check_k(k)?;
    let (value, primes) = weighted_prime_sum(phi, k, 1.0, |p| group.lambda_p(chi, p).expect("p is prime"));
    let target = phi.phi(0.0);
    Ok(PrimeSum {
        value,
        target,
        deviation: (value - target).abs(),
        primes,
    })
}

/// `N_k(φ) = (2/log k²)·Σ (log p/p) φ̂(2 log p/log k²)`, target `φ(0)/2`.
pub fn prime_sum_n(phi: &TestFunction, k: f64) -> Result<PrimeSum> {
    check_k(k)?;
    let (value, primes) = weighted_prime_sum(phi, k, 2.0, |_| 1.0);
    let target = phi.phi(0.0) / 2.0;
    Ok(PrimeSum {
        value,
        target,
        deviation: (value - target).abs(),
        primes,
    })
}

/// Unweighted prime sum at scale 1, used to cross-check `N_k` by reindexing.
pub fn prime_sum_unweighted(phi: &TestFunction, k: f64) -> f64 {
    weighted_prime_sum(phi, k, 1.0, |_| 1.0).0
}

/// The `m ≥ 3` prime-power terms: `(2/L)·Σ_{m≥3,p} 4(log p)p^{-m/2}|φ̂(m log p/L)|`.
pub fn higher_power_tail(phi: &TestFunction, k: f64) -> f64 {
    let l = 2.0 * k.ln();
    let mut total = 0.0;
    for m in 3u32.. {
        let limit = (phi.alpha() * l / m as f64).exp();
        if limit < 2.0 {
            break;
        }
        for p in primes_up_to(limit.floor() as u64) {
            let lp = (p as f64).ln();
            total += 4.0 * lp * (p as f64).powf(-(m as f64) / 2.0) * phi.phi_hat(m as f64 * lp / l).abs();
        }
    }
    2.0 * total / l
}

const BERNOULLI_OVER_2N: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// Complex digamma `ψ(z)` by upward recurrence and the asymptotic series.
pub fn digamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: ψ(1 - z) - π cot(πz)
        let pz = PI * z;
        return digamma(1.0 - z) - PI * pz.cos() / pz.sin();
    }
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.norm() < 12.0 {
        acc -= z.inv();
        z += 1.0;
    }
    let z2 = (z * z).inv();
    let mut zpow = z2;
    let mut series = Complex64::new(0.0, 0.0);
    for b in BERNOULLI_OVER_2N {
        series += b * zpow;
        zpow *= z2;
    }
    acc + z.ln() - 0.5 * z.inv() - series
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GammaTermRow {
    pub t: f64,
    pub deviation: f64,
    pub imaginary: f64,
}

/// `|ψ(k-1+it) + ψ(k-2-it) - 2 log k|` over the grid, with the constant
/// `C = max deviation/(1/k + t²/k²)`.
#[derive(Clone, Debug, Serialize)]
pub struct GammaTermReport {
    pub k: f64,
    pub max_deviation: f64,
    pub constant: f64,
    pub rows: Vec<GammaTermRow>,
}

pub fn gamma_term_check(k: f64, t_grid: &[f64]) -> Result<GammaTermReport> {
    check_k(k)?;
    let mut rows = Vec::new();
    let mut constant: f64 = 0.0;
    let mut max_deviation: f64 = 0.0;
    for &t in t_grid.iter().filter(|t| t.abs() <= k.sqrt()) {
        let v = digamma(Complex64::new(k - 1.0, t)) + digamma(Complex64::new(k - 2.0, -t)) - 2.0 * k.ln();
        let deviation = v.norm();
        max_deviation = max_deviation.max(deviation);
        constant = constant.max(deviation / (1.0 / k + t * t / (k * k)));
        rows.push(GammaTermRow {
            t,
            deviation,
            imaginary: v.im,
        });
    }
    Ok(GammaTermReport {
        k,
        max_deviation,
        constant,
        rows,
    })
}

/// Warning text when the support radius leaves the theorem's range.
pub fn support_warning(alpha: f64) -> Option<String> {
    (alpha >= THEOREM_SUPPORT_LIMIT).then(|| {
        format!("support radius {alpha} is at least 4/15; the low-lying theorem does not cover it")
    })
}

/// Monte Carlo estimate of the synthetic one-level density.
#[derive(Clone, Debug, Serialize)]
pub struct SyntheticDensity {
    pub estimate: f64,
    pub stderr: f64,
    /// Exact expectation of the model, with `E[c₂]` by quadrature.
    pub expectation: f64,
    pub target_sp: f64,
    pub target_o: f64,
    pub mk: f64,
    pub nk: f64,
    pub primes_used: usize,
    /// True when `φ̂` still sees primes beyond the cutoff.
    pub support_truncated: bool,
    pub samples: usize,
}

struct LocalTerm {
    weight1: f64,
    weight2: f64,
    measure: SpectralMeasure,
}

/// Draws `x_p ~ μ_p` independently for each prime up to the cutoff and
/// averages `φ̂(0) - (2/L)·Σ_{m∈{1,2}} Σ_p (log p)p^{-m/2}c_m(x_p)φ̂(m log p/L)`.
#[allow(clippy::too_many_arguments)]
pub fn synthetic_family_density(
    k: f64,
    group: &ClassGroup,
    chi: &ClassCharacter,
    phi: &TestFunction,
    prime_cutoff: u64,
    n_samples: usize,
    seed: u64,
) -> Result<SyntheticDensity> {
    check_k(k)?;
    if prime_cutoff < 2 {
        return Err(Error::invalid("prime cutoff must be at least 2"));
    }
    if n_samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let l = 2.0 * k.ln();
    let support_limit = (phi.alpha() * l).exp();
    let support_truncated = support_limit > prime_cutoff as f64;
    let top = support_limit.min(prime_cutoff as f64).floor().max(1.0) as u64;
    let primes = primes_up_to(top);

    let mut terms = Vec::with_capacity(primes.len());
    let mut expectation = phi.phi_hat(0.0);
    let rule = QuadratureRule::default();
    for &p in &primes {
        let lp = (p as f64).ln();
        let pf = p as f64;
        let weight1 = 2.0 / l * lp * pf.powf(-0.5) * phi.phi_hat(lp / l);
        let weight2 = 2.0 / l * lp / pf * phi.phi_hat(2.0 * lp / l);
        let measure = plancherel_measure(group, chi, p)?;
        let c1 = group.lambda_p(chi, p)? / pf.sqrt();
        let c2 = integrate_polynomial(&LaurentPolynomial::power_trace(p, 2), &measure, rule)?.value.re;
        expectation -= weight1 * c1 + weight2 * c2;
        terms.push(LocalTerm {
            weight1,
            weight2,
            measure,
        });
    }
    let samplers: Vec<Sampler> = terms.iter().map(|t| Sampler::new(&t.measure)).collect();
    let phi0 = phi.phi_hat(0.0);
    let draw = |rng: &mut ChaCha8Rng| -> Result<f64> {
        let mut d = phi0;
        for (term, sampler) in terms.iter().zip(&samplers) {
            let x = sampler.draw(rng)?;
            d -= term.weight1 * x.trace_power(1) + term.weight2 * x.trace_power(2);
        }
        Ok(d)
    };
    let blocks = map_blocks(seed, n_samples, |_, rng, len| (0..len).map(|_| draw(rng)).collect::<Result<Vec<f64>>>());
    let mut values = Vec::with_capacity(n_samples);
    for b in blocks {
        values.extend(b?);
    }
    let n = values.len() as f64;
    let estimate = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - estimate).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let stderr = (var / n).sqrt();

    Ok(SyntheticDensity {
        estimate,
        stderr,
        expectation,
        target_sp: sigma_integral(phi, SymmetryMeasure::Sp),
        target_o: sigma_integral(phi, SymmetryMeasure::O),
        mk: prime_sum_m(phi, k, group, chi)?.value,
        nk: prime_sum_n(phi, k)?.value,
        primes_used: primes.len(),
        support_truncated,
        samples: n_samples,
    })
}
