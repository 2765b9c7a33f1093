//! The classical `GL(2)` analogue: Bessel functions, Kloosterman sums, the
//! Sato–Tate/Chebyshev identities, Kitaoka's Bessel integral and a numerical
//! Petersson formula in level one.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::arith::{divisor_count, factorize, mod_inverse};
use crate::error::{Error, Result};
use crate::quadrature::{composite, GaussLegendre};

/// Orders and arguments covered by the spot-point validation.
pub const VALIDATED_MAX_ORDER: f64 = 200.0;
pub const VALIDATED_MAX_ARGUMENT: f64 = 1.0e4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BesselValue {
    pub value: f64,
    /// False outside `ν ≤ 200, x ≤ 10⁴`, where accuracy is not certified.
    pub validated: bool,
}

fn bessel_series(nu: f64, x: f64) -> f64 {
    let half = x / 2.0;
    let log_lead = nu * half.ln() - ln_gamma(nu + 1.0);
    let mut term = log_lead.exp();
    let mut sum = term;
    let q = -half * half;
    for m in 1..500 {
        let mf = m as f64;
        term *= q / (mf * (mf + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && mf > half {
            break;
        }
    }
    sum
}

/// Miller's backward recurrence normalized by the Neumann series
/// `(x/2)^μ = Σ_j (μ+2j) Γ(μ+j)/j! · J_{μ+2j}(x)`, `ν = μ + n`, `0 ≤ μ < 1`.
fn bessel_miller(nu: f64, x: f64) -> f64 {
    let n = nu.floor() as usize;
    let mu = nu - n as f64;
    let reach = nu.max(x);
    let mut top = (reach + 40.0 + 20.0 * reach.cbrt()).ceil() as usize;
    if top % 2 == 1 {
        top += 1;
    }
    // g_j = Γ(μ+j+1)/j!, updated downward by g_{j-1} = g_j · j/(μ+j)
    let mut g = (ln_gamma(mu + (top / 2) as f64 + 1.0) - ln_gamma((top / 2) as f64 + 1.0)).exp();
    let mut f_next = 0.0;
    let mut f = 1e-300;
    let mut target = if top == n { f } else { 0.0 };
    let weight = |j: usize, g: f64| {
        let jf = j as f64;
        if j == 0 {
            g
        } else {
            (mu + 2.0 * jf) / (mu + jf) * g
        }
    };
    let mut sum = weight(top / 2, g) * f;
    for k in (1..=top).rev() {
        // J_{μ+k-1} = (2(μ+k)/x) J_{μ+k} - J_{μ+k+1}
        let f_prev = 2.0 * (mu + k as f64) / x * f - f_next;
        f_next = f;
        f = f_prev;
        let idx = k - 1;
        if idx == n {
            target = f;
        }
        if idx % 2 == 0 {
            let j = idx / 2;
            let jf = (j + 1) as f64;
            g *= jf / (mu + jf);
            sum += weight(j, g) * f;
        }
        if f.abs() > 1e250 {
            f *= 1e-250;
            f_next *= 1e-250;
            target *= 1e-250;
            sum *= 1e-250;
        }
    }
    target * (x / 2.0).powf(mu) / sum
}

pub fn bessel_j_flagged(nu: f64, x: f64) -> Result<BesselValue> {
    if !(nu >= 0.0) || !(x >= 0.0) || !nu.is_finite() || !x.is_finite() {
        return Err(Error::invalid(format!("J_ν(x) needs ν ≥ 0 and x ≥ 0, got ν={nu}, x={x}")));
    }
    let value = if x == 0.0 {
        if nu == 0.0 {
            1.0
        } else {
            0.0
        }
    } else if x <= 12.0 || x * x <= 2.0 * (nu + 1.0) {
        bessel_series(nu, x)
    } else {
        bessel_miller(nu, x)
    };
    Ok(BesselValue {
        value,
        validated: nu <= VALIDATED_MAX_ORDER && x <= VALIDATED_MAX_ARGUMENT,
    })
}

/// `J_ν(x)` for `ν, x ≥ 0`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    bessel_j_flagged(nu, x).map(|b| b.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BesselBound {
    /// `x^k/Γ(k+1)` for `x ≤ √(k+1)`
    Taylor,
    /// `min(1, x/k)·k^{-1/3}` for `x ≥ 1`
    Transition,
    /// `2^k/√x`
    Crude,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundFit {
    pub bound: BesselBound,
    pub max_ratio: f64,
    pub at_k: u32,
    pub at_x: f64,
    pub points: usize,
}

/// Largest `|J_k(x)|/bound(k, x)` over the grid points in each bound's domain.
pub fn verify_bessel_bounds(ks: &[u32], xs: &[f64]) -> Result<Vec<BoundFit>> {
    let mut fits: Vec<BoundFit> = [BesselBound::Taylor, BesselBound::Transition, BesselBound::Crude]
        .into_iter()
        .map(|bound| BoundFit {
            bound,
            max_ratio: 0.0,
            at_k: 0,
            at_x: 0.0,
            points: 0,
        })
        .collect();
    for &k in ks.iter().filter(|&&k| k >= 1) {
        let kf = k as f64;
        for &x in xs.iter().filter(|&&x| x > 0.0) {
            let j = bessel_j(kf, x)?.abs();
            let bounds = [
                (x <= (kf + 1.0).sqrt()).then(|| (kf * x.ln() - ln_gamma(kf + 1.0)).exp()),
                (x >= 1.0).then(|| (x / kf).min(1.0) * kf.powf(-1.0 / 3.0)),
                Some(2f64.powf(kf) / x.sqrt()),
            ];
            for (fit, b) in fits.iter_mut().zip(bounds) {
                if let Some(b) = b {
                    fit.points += 1;
                    let r = j / b;
                    if r > fit.max_ratio {
                        fit.max_ratio = r;
                        fit.at_k = k;
                        fit.at_x = x;
                    }
                }
            }
        }
    }
    Ok(fits)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KitaokaValue {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

/// `∫_0^{π/2} J_{k-3/2}(4πs₁ sin θ) J_{k-3/2}(4πs₂ sin θ) sin θ dθ`
pub fn kitaoka_integral(k: u32, s1: f64, s2: f64) -> Result<KitaokaValue> {
    if k < 6 {
        return Err(Error::invalid(format!("k must be at least 6, got {k}")));
    }
    if !(s1 > 0.0 && s2 > 0.0) {
        return Err(Error::invalid("s1 and s2 must be positive"));
    }
    let nu = k as f64 - 1.5;
    let f = |t: f64| {
        let st = t.sin();
        bessel_j(nu, 4.0 * PI * s1 * st).unwrap_or(f64::NAN) * bessel_j(nu, 4.0 * PI * s2 * st).unwrap_or(f64::NAN) * st
    };
    let mut panels = (4.0 * (s1.max(s2) + 1.0)).ceil() as usize;
    let mut prev = composite(0.0, PI / 2.0, panels, 20, f);
    loop {
        panels *= 2;
        let next = composite(0.0, PI / 2.0, panels, 20, f);
        let err = (next - prev).abs();
        if err <= 1e-12 || (err <= 1e-9 && panels >= 256) {
            return Ok(KitaokaValue {
                value: next,
                error_estimate: err,
                panels,
            });
        }
        if panels > 1 << 14 {
            return Err(Error::ConvergenceFailure {
                value: next,
                estimate: err,
                tolerance: 1e-9,
            });
        }
        prev = next;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KitaokaDecay {
    pub values: Vec<(u32, f64)>,
    /// `max_k |𝒥_k|·k^{2/3}`
    pub constant: f64,
}

pub fn kitaoka_decay(s1: f64, s2: f64, ks: &[u32]) -> Result<KitaokaDecay> {
    let values = ks
        .iter()
        .map(|&k| kitaoka_integral(k, s1, s2).map(|v| (k, v.value)))
        .collect::<Result<Vec<_>>>()?;
    let constant = values.iter().map(|&(k, v)| v.abs() * (k as f64).powf(2.0 / 3.0)).fold(0.0, f64::max);
    Ok(KitaokaDecay { values, constant })
}

fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KloostermanValue {
    pub value: f64,
    pub imaginary: f64,
    pub weil_bound: f64,
}

/// `S(m, n; c) = Σ_{x mod c, (x,c)=1} e((mx + n x̄)/c)`
pub fn kloosterman(m: u64, n: u64, c: u64) -> Result<KloostermanValue> {
    if c == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for x in 0..c {
        if gcd(x, c) != 1 {
            continue;
        }
        let xbar = mod_inverse(x as i64, c as i64).unwrap_or(0) as u64;
        let phase = ((m % c) * x % c + (n % c) * xbar % c) % c;
        sum += Complex64::cis(2.0 * PI * phase as f64 / c as f64);
    }
    if c == 1 {
        sum = Complex64::new(1.0, 0.0);
    }
    let g = gcd(gcd(m, n), c) as f64;
    Ok(KloostermanValue {
        value: sum.re,
        imaginary: sum.im,
        weil_bound: divisor_count(c) as f64 * g.sqrt() * (c as f64).sqrt(),
    })
}

/// `U_l(x)` by the three-term recurrence.
pub fn chebyshev_u(l: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if l == 0 {
        return 1.0;
    }
    for _ in 1..l {
        let next = x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `∫ U_l dμ_ST` with `dμ_ST = (2/π)√(1 - x²/4) dx/2` on `[-2, 2]`, by
/// Gauss–Legendre in `θ` with `x = 2cos θ`.
pub fn sato_tate_integral(l: u32) -> f64 {
    let gl = GaussLegendre::cached(64 + l as usize);
    gl.integrate(0.0, PI, |t| 2.0 / PI * chebyshev_u(l, 2.0 * t.cos()) * t.sin() * t.sin())
}

/// `|Π_{p^l ∥ L} U_l(λ(p)) - λ(L)|` where `λ(L)` comes from the Hecke
/// recursion `λ(p^{l+1}) = λ(p)λ(p^l) - λ(p^{l-1})` with `λ(p) = 2cos θ_p`.
pub fn hecke_multiplicativity_check(angles: &[(u64, f64)], l: u64) -> Result<f64> {
    if l == 0 {
        return Err(Error::invalid("L must be positive"));
    }
    let mut product = 1.0;
    let mut recursive = 1.0;
    for (p, e) in factorize(l) {
        let theta = angles
            .iter()
            .find(|(q, _)| *q == p)
            .map(|&(_, t)| t)
            .ok_or_else(|| Error::invalid(format!("no angle supplied for p = {p}")))?;
        let s = theta.sin();
        product *= if s.abs() < 1e-12 {
            (e as f64 + 1.0) * theta.cos().signum().powi(e as i32)
        } else {
            ((e as f64 + 1.0) * theta).sin() / s
        };
        let lam = 2.0 * theta.cos();
        let (mut prev, mut cur) = (1.0, lam);
        for _ in 1..e {
            (prev, cur) = (cur, lam * cur - prev);
        }
        recursive *= cur;
    }
    Ok((product - recursive).abs())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PeterssonSide {
    pub value: f64,
    pub tail_estimate: f64,
    pub c_max: u64,
    /// Terms past this modulus are bounded by `tail_estimate` and skipped.
    pub c_evaluated: u64,
    /// Set when the tail estimate exceeds `1e-8`.
    pub insufficient_cutoff: bool,
}

const NEGLIGIBLE_TAIL: f64 = 1e-18;

/// Cutoff making `4π√L/c_max < √k/4`.
pub fn default_c_max(k: u32, l: u64) -> u64 {
    (16.0 * PI * (l as f64).sqrt() / (k as f64).sqrt()).floor() as u64 + 1
}

/// `-(-1)^{k/2}·2π·Σ_{c ≤ c_max} c⁻¹ S(L,1;c) J_{k-1}(4π√L/c)`, which
/// equals `δ(L,1) - Σ_f ω_f λ_f(L)` over a Hecke basis of weight `k`.
pub fn petersson_kloosterman_side(k: u32, l: u64, c_max: u64) -> Result<PeterssonSide> {
    if k < 6 || k % 2 == 1 {
        return Err(Error::invalid(format!("k must be even and at least 6, got {k}")));
    }
    if l == 0 || c_max == 0 {
        return Err(Error::invalid("L and c_max must be positive"));
    }
    let nu = (k - 1) as f64;
    let root = 4.0 * PI * (l as f64).sqrt();
    // |c⁻¹S(L,1;c)J_ν(x)| ≤ 2·(root/2)^ν/Γ(ν+1)·c^{-ν} from d(c) ≤ 2√c and
    // |J_ν(x)| ≤ (x/2)^ν/Γ(ν+1); this bounds the terms beyond any c
    let log_lead = (4.0 * PI).ln() + nu * (root / 2.0).ln() - ln_gamma(nu + 1.0) - (nu - 1.0).ln();
    let tail_after = |c: u64| (log_lead - (nu - 1.0) * (c as f64).ln()).exp();
    // stop once the remaining terms cannot move the sum in double precision
    let negligible = (((log_lead - NEGLIGIBLE_TAIL.ln()) / (nu - 1.0)).exp().ceil() as u64).max(1);
    let c_evaluated = c_max.min(negligible);
    let terms = (1..=c_evaluated)
        .into_par_iter()
        .map(|c| -> Result<f64> {
            let s = kloosterman(l, 1, c)?.value;
            Ok(s / c as f64 * bessel_j(nu, root / c as f64)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let sum: f64 = terms.iter().sum();
    let sign = if (k / 2) % 2 == 0 { -1.0 } else { 1.0 };
    let tail_estimate = tail_after(c_evaluated);
    Ok(PeterssonSide {
        value: sign * 2.0 * PI * sum,
        tail_estimate,
        c_max,
        c_evaluated,
        insufficient_cutoff: tail_estimate > 1e-8,
    })
}

/// `q·Π(1 - qⁿ)^{24}` up to `q^N`.
#[derive(Clone, Debug, Serialize)]
pub struct QExpansion {
    /// `coefficients[n-1] = τ(n)`
    pub coefficients: Vec<i128>,
}

impl QExpansion {
    pub fn tau(&self, n: usize) -> Option<i128> {
        n.checked_sub(1).and_then(|i| self.coefficients.get(i).copied())
    }

    /// First coprime pair `(m, n)` with `mn ≤ N` and `τ(mn) ≠ τ(m)τ(n)`.
    pub fn multiplicativity_violation(&self, limit: usize) -> Option<(usize, usize)> {
        let n_max = self.coefficients.len();
        for m in 2..=limit {
            for n in m + 1..=limit {
                if m * n > n_max || num_integer::gcd(m, n) != 1 {
                    continue;
                }
                if self.tau(m * n) != Some(self.tau(m)? * self.tau(n)?) {
                    return Some((m, n));
                }
            }
        }
        None
    }
}

fn truncated_product(a: &[i128], b: &[i128]) -> Vec<i128> {
    let len = a.len();
    let mut out = vec![0i128; len];
    for (i, &x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

/// `τ(1..=N)` exactly, from Jacobi's `Π(1 - qⁿ)³ = Σ (-1)^j (2j+1) q^{j(j+1)/2}`
/// raised to the eighth power.
pub fn delta_q_expansion(n: usize) -> Result<QExpansion> {
    if n == 0 || n > 10_000 {
        return Err(Error::invalid(format!("N must be in 1..=10000, got {n}")));
    }
    let mut cube = vec![0i128; n];
    for j in 0.. {
        let e = j * (j + 1) / 2;
        if e >= n {
            break;
        }
        cube[e] = if j % 2 == 0 { 2 * j as i128 + 1 } else { -(2 * j as i128 + 1) };
    }
    let sq = truncated_product(&cube, &cube);
    let fourth = truncated_product(&sq, &sq);
    let eighth = truncated_product(&fourth, &fourth);
    Ok(QExpansion { coefficients: eighth })
}

#[cfg(test)]
mod tests;
