//! Exact elements of `ℤ[ζ_n]` as integer polynomials reduced modulo `Φ_n`.

use std::f64::consts::PI;

use num_complex::Complex64;

/// `Σ c_k ζ_n^k`, canonical after [`CyclotomicInteger::reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicInteger {
    n: u64,
    coeffs: Vec<i64>,
}

impl CyclotomicInteger {
    pub fn zero(n: u64) -> Self {
        CyclotomicInteger {
            n: n.max(1),
            coeffs: vec![0; n.max(1) as usize],
        }
    }

    /// Adds `c·ζ_n^k`.
    pub fn add_root(&mut self, k: u64, c: i64) {
        let idx = (k % self.n) as usize;
        if idx >= self.coeffs.len() {
            self.coeffs.resize(self.n as usize, 0);
        }
        self.coeffs[idx] += c;
    }

    /// Reduces modulo the `n`-th cyclotomic polynomial, giving the canonical
    /// representative of degree below `φ(n)`.
    pub fn reduce(&mut self) {
        let phi = cyclotomic_polynomial(self.n);
        let deg = phi.len() - 1;
        let mut c = std::mem::take(&mut self.coeffs);
        for top in (deg..c.len()).rev() {
            let q = c[top];
            if q == 0 {
                continue;
            }
            for (i, &f) in phi.iter().enumerate() {
                c[top - deg + i] -= q * f;
            }
        }
        c.truncate(deg);
        self.coeffs = c;
    }

    /// The integer value, if this reduced element is rational.
    pub fn as_integer(&self) -> Option<i64> {
        let mut r = self.clone();
        r.reduce();
        if r.coeffs.iter().skip(1).all(|&c| c == 0) {
            Some(r.coeffs.first().copied().unwrap_or(0))
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / self.n as f64))
            .sum()
    }
}

/// Integer coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in (1..n).filter(|d| n % d == 0) {
        num = exact_divide(&num, &cyclotomic_polynomial(d));
    }
    num
}

fn exact_divide(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let q = rem[i + dd] / den[dd];
        quot[i] = q;
        for (j, &f) in den.iter().enumerate() {
            rem[i + j] -= q * f;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}
