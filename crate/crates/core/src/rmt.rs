//! Random-matrix ensembles `USp(2n)` and `SO(2n)` through their Weyl
//! eigenangle densities, the `det(1-g)` reweighting, and one-level densities.
//!
//! One-level statistics use the matrix size `N = 2n`: each draw contributes
//! `Σ_j φ(Nθ_j/2π) + φ(-Nθ_j/2π)` over its `n` angle pairs.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lowlying::TestFunction;
use crate::quadrature::composite;
use crate::rng::map_blocks;

pub const MAX_HALF_DIMENSION: usize = 6;
const ENVELOPE_HEADROOM: f64 = 1.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Ensemble {
    USp,
    SOeven,
}

impl std::str::FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "usp" => Ok(Ensemble::USp),
            "so" | "soeven" => Ok(Ensemble::SOeven),
            other => Err(Error::invalid(format!("unknown ensemble {other:?}"))),
        }
    }
}

/// Angles `0 ≤ θ_1 ≤ … ≤ θ_n ≤ π`; the spectrum is `{e^{±iθ_j}}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenangleSample {
    pub ensemble: Ensemble,
    pub angles: Vec<f64>,
}

impl EigenangleSample {
    pub fn n(&self) -> usize {
        self.angles.len()
    }
}

/// Unnormalized Weyl density in the cosines `x_j = cos θ_j`.
fn log_weyl_density(ensemble: Ensemble, x: &[f64]) -> f64 {
    let mut v = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            v += 2.0 * (x[i] - x[j]).abs().ln();
        }
        if ensemble == Ensemble::USp {
            v += (1.0 - x[i] * x[i]).ln();
        }
    }
    v
}

/// The log density is concave on the ordered cone in `x`, so cyclic
/// golden-section ascent within neighbour brackets reaches its maximum.
fn log_weyl_maximum(ensemble: Ensemble, n: usize) -> f64 {
    let mut x: Vec<f64> = (0..n).map(|i| -0.9 + 1.8 * (i as f64 + 0.5) / n as f64).collect();
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        for i in 0..n {
            let lo = if i == 0 { -1.0 } else { x[i - 1] };
            let hi = if i + 1 == n { 1.0 } else { x[i + 1] };
            let f = |t: f64| {
                let mut y = x.clone();
                y[i] = t;
                log_weyl_density(ensemble, &y)
            };
            let (mut a, mut b) = (lo, hi);
            for _ in 0..80 {
                let c = b - phi * (b - a);
                let d = a + phi * (b - a);
                if f(c) >= f(d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            x[i] = 0.5 * (a + b);
        }
    }
    let interior = log_weyl_density(ensemble, &x);
    if ensemble == Ensemble::SOeven && n >= 1 {
        // the maximum puts the extreme angles at 0 and π
        let mut y = x.clone();
        y[0] = -1.0;
        y[n - 1] = 1.0;
        return interior.max(log_weyl_density(ensemble, &y));
    }
    interior
}

/// Rejection sampler against the uniform law on `[0, π]^n`.
#[derive(Clone, Debug)]
pub struct WeylSampler {
    ensemble: Ensemble,
    n: usize,
    log_envelope: f64,
}

impl WeylSampler {
    pub fn new(ensemble: Ensemble, n: usize) -> Result<Self> {
        check_n(n, MAX_HALF_DIMENSION)?;
        Ok(WeylSampler {
            ensemble,
            n,
            log_envelope: log_weyl_maximum(ensemble, n) + ENVELOPE_HEADROOM.ln(),
        })
    }

    pub fn envelope(&self) -> f64 {
        self.log_envelope.exp()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<EigenangleSample> {
        let mut angles = vec![0.0; self.n];
        let mut x = vec![0.0; self.n];
        loop {
            for (a, c) in angles.iter_mut().zip(x.iter_mut()) {
                *a = rng.gen::<f64>() * PI;
                *c = a.cos();
            }
            let log_f = log_weyl_density(self.ensemble, &x);
            if log_f > self.log_envelope {
                return Err(Error::EnvelopeViolated {
                    density: log_f.exp(),
                    envelope: self.envelope(),
                });
            }
            if rng.gen::<f64>().ln() < log_f - self.log_envelope {
                angles.sort_by(f64::total_cmp);
                return Ok(EigenangleSample {
                    ensemble: self.ensemble,
                    angles,
                });
            }
        }
    }
}

fn check_n(n: usize, max: usize) -> Result<()> {
    if (1..=max).contains(&n) {
        Ok(())
    } else {
        Err(Error::invalid(format!("half-dimension must be in 1..={max}, got {n}")))
    }
}

pub fn sample_weyl<R: Rng + ?Sized>(ensemble: Ensemble, n: usize, rng: &mut R, count: usize) -> Result<Vec<EigenangleSample>> {
    if count == 0 {
        return Err(Error::invalid("count must be positive"));
    }
    let sampler = WeylSampler::new(ensemble, n)?;
    (0..count).map(|_| sampler.draw(rng)).collect()
}

/// Parallel draws from independent streams of `seed`.
pub fn sample_weyl_seeded(ensemble: Ensemble, n: usize, seed: u64, count: usize) -> Result<Vec<EigenangleSample>> {
    if count == 0 {
        return Err(Error::invalid("count must be positive"));
    }
    let sampler = WeylSampler::new(ensemble, n)?;
    let blocks = map_blocks(seed, count, |_, rng: &mut ChaCha8Rng, len| {
        (0..len).map(|_| sampler.draw(rng)).collect::<Result<Vec<_>>>()
    });
    let mut out = Vec::with_capacity(count);
    for b in blocks {
        out.extend(b?);
    }
    Ok(out)
}

/// `Π_j (2 - 2cos θ_j)`
pub fn det_one_minus(s: &EigenangleSample) -> f64 {
    s.angles.iter().map(|t| 2.0 - 2.0 * t.cos()).product()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// `c_n = 1/E_{SO(2n)}[det(1-g)]` with a delta-method standard error.
pub fn estimate_cn(n: usize, samples: usize, seed: u64) -> Result<Estimate> {
    check_n(n, 4)?;
    if samples < 10_000 {
        return Err(Error::invalid("c_n needs at least 10⁴ samples"));
    }
    let draws = sample_weyl_seeded(Ensemble::SOeven, n, seed, samples)?;
    let dets: Vec<f64> = draws.iter().map(det_one_minus).collect();
    let (mean, se) = mean_se(&dets);
    Ok(Estimate {
        value: 1.0 / mean,
        stderr: se / (mean * mean),
        samples,
    })
}

/// `Σ_j φ(Nθ_j/2π) + φ(-Nθ_j/2π)` with `N = 2n`.
pub fn linear_statistic(s: &EigenangleSample, phi: &TestFunction) -> f64 {
    let scale = s.n() as f64 / PI;
    s.angles.iter().map(|&t| phi.phi(scale * t) + phi.phi(-scale * t)).sum()
}

/// Monte Carlo one-level density; `weighted` reweights by `det(1-g)`
/// relative to its sample mean (orthogonal ensemble only).
pub fn one_level_density(
    ensemble: Ensemble,
    n: usize,
    phi: &TestFunction,
    samples: usize,
    seed: u64,
    weighted: bool,
) -> Result<Estimate> {
    if weighted && ensemble == Ensemble::USp {
        return Err(Error::InvalidCombination("det(1-g) weighting applies to SO(2n) only".into()));
    }
    check_n(n, MAX_HALF_DIMENSION)?;
    let draws = sample_weyl_seeded(ensemble, n, seed, samples)?;
    let stats: Vec<f64> = draws.iter().map(|s| linear_statistic(s, phi)).collect();
    if !weighted {
        let (value, stderr) = mean_se(&stats);
        return Ok(Estimate { value, stderr, samples });
    }
    let w: Vec<f64> = draws.iter().map(det_one_minus).collect();
    let total: f64 = w.iter().sum();
    let value = w.iter().zip(&stats).map(|(w, s)| w * s).sum::<f64>() / total;
    // ratio-estimator standard error
    let var: f64 = w.iter().zip(&stats).map(|(w, s)| (w * (s - value)).powi(2)).sum();
    Ok(Estimate {
        value,
        stderr: var.sqrt() / total,
        samples,
    })
}

/// Exact finite-`n` mean of the linear statistic from the one-point
/// densities `(2n ± 1 ∓ sin((2n±1)θ)/sin θ)/2π`.
pub fn one_level_expectation(ensemble: Ensemble, n: usize, phi: &TestFunction) -> Result<f64> {
    check_n(n, usize::MAX)?;
    let m = match ensemble {
        Ensemble::USp => 2 * n + 1,
        Ensemble::SOeven => 2 * n - 1,
    } as f64;
    let sign = match ensemble {
        Ensemble::USp => -1.0,
        Ensemble::SOeven => 1.0,
    };
    let scale = n as f64 / PI;
    let density = |t: f64| {
        let ratio = if t.sin().abs() < 1e-12 { m * (m * t).cos() / t.cos() } else { (m * t).sin() / t.sin() };
        (m + sign * ratio) / (2.0 * PI)
    };
    Ok(composite(0.0, PI, 16 * n.max(4), 24, |t| 2.0 * phi.phi(scale * t) * density(t)))
}

/// Two-sample Kolmogorov–Smirnov statistic and its asymptotic 1% critical value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    (d, 1.628 * ((n + m) / (n * m)).sqrt())
}

#[cfg(test)]
mod tests;
