use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Absolute tolerance used for equality of floating coefficients.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// Floating coefficients at or below this magnitude are dropped on canonicalization.
pub const FLOAT_ZERO: f64 = 1e-14;

/// An element `r + s·√p` of ℚ(√p) for a prime `p` fixed by the context.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Surd {
    pub rational: BigRational,
    pub radical: BigRational,
}

impl Surd {
    pub fn new(rational: BigRational, radical: BigRational) -> Self {
        Surd { rational, radical }
    }

    pub fn from_integer(n: i64) -> Self {
        Surd::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Surd::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    /// `c·√p`
    pub fn radical_part(c: BigRational) -> Self {
        Surd::new(BigRational::zero(), c)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.radical.is_zero()
    }

    pub fn add(&self, other: &Surd) -> Surd {
        Surd::new(&self.rational + &other.rational, &self.radical + &other.radical)
    }

    pub fn sub(&self, other: &Surd) -> Surd {
        Surd::new(&self.rational - &other.rational, &self.radical - &other.radical)
    }

    pub fn neg(&self) -> Surd {
        Surd::new(-&self.rational, -&self.radical)
    }

    pub fn mul(&self, other: &Surd, p: u64) -> Surd {
        let pr = BigRational::from_integer(p.into());
        let rational = &self.rational * &other.rational + &self.radical * &other.radical * pr;
        let radical = &self.rational * &other.radical + &self.radical * &other.rational;
        Surd::new(rational, radical)
    }

    /// Multiplicative inverse; `None` for zero. Uses `(r - s√p)/(r² - p s²)`,
    /// whose denominator never vanishes because √p is irrational.
    pub fn inv(&self, p: u64) -> Option<Surd> {
        if self.is_zero() {
            return None;
        }
        let pr = BigRational::from_integer(p.into());
        let norm = &self.rational * &self.rational - &self.radical * &self.radical * pr;
        Some(Surd::new(&self.rational / &norm, -&self.radical / &norm))
    }

    pub fn to_f64(&self, p: u64) -> f64 {
        let r = self.rational.to_f64().unwrap_or(f64::NAN);
        let s = self.radical.to_f64().unwrap_or(f64::NAN);
        r + s * (p as f64).sqrt()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rational.is_zero(), self.radical.is_zero()) {
            (_, true) => write!(f, "{}", self.rational),
            (true, false) => write!(f, "{}·√p", self.radical),
            (false, false) => {
                let sign = if self.radical.is_negative() { "-" } else { "+" };
                write!(f, "{} {} {}·√p", self.rational, sign, self.radical.abs())
            }
        }
    }
}

/// A polynomial coefficient: exact in ℚ(√p) or a complex double.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Exact(Surd),
    Float(Complex64),
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::Exact(Surd::default())
    }

    pub fn one() -> Self {
        Coefficient::Exact(Surd::from_integer(1))
    }

    pub fn integer(n: i64) -> Self {
        Coefficient::Exact(Surd::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Coefficient::Exact(Surd::from_ratio(num, den))
    }

    pub fn real(x: f64) -> Self {
        Coefficient::Float(Complex64::new(x, 0.0))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coefficient::Exact(_))
    }

    /// Zero test: exact zero, or magnitude at most [`FLOAT_ZERO`].
    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Exact(s) => s.is_zero(),
            Coefficient::Float(z) => z.norm() <= FLOAT_ZERO,
        }
    }

    pub fn to_complex(&self, p: u64) -> Complex64 {
        match self {
            Coefficient::Exact(s) => Complex64::new(s.to_f64(p), 0.0),
            Coefficient::Float(z) => *z,
        }
    }

    pub fn to_float(&self, p: u64) -> Coefficient {
        Coefficient::Float(self.to_complex(p))
    }

    pub fn add(&self, other: &Coefficient, p: u64) -> Coefficient {
        match (self, other) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => Coefficient::Exact(a.add(b)),
            _ => Coefficient::Float(self.to_complex(p) + other.to_complex(p)),
        }
    }

    pub fn sub(&self, other: &Coefficient, p: u64) -> Coefficient {
        self.add(&other.neg(), p)
    }

    pub fn mul(&self, other: &Coefficient, p: u64) -> Coefficient {
        match (self, other) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => Coefficient::Exact(a.mul(b, p)),
            _ => Coefficient::Float(self.to_complex(p) * other.to_complex(p)),
        }
    }

    pub fn neg(&self) -> Coefficient {
        match self {
            Coefficient::Exact(a) => Coefficient::Exact(a.neg()),
            Coefficient::Float(z) => Coefficient::Float(-z),
        }
    }

    pub fn inv(&self, p: u64) -> Option<Coefficient> {
        match self {
            Coefficient::Exact(a) => a.inv(p).map(Coefficient::Exact),
            Coefficient::Float(z) if z.norm() > 0.0 => Some(Coefficient::Float(z.inv())),
            Coefficient::Float(_) => None,
        }
    }

    /// Exact equality when both sides are exact, otherwise `|a - b| <= tol`.
    pub fn approx_eq(&self, other: &Coefficient, p: u64, tol: f64) -> bool {
        match (self, other) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => a == b,
            _ => (self.to_complex(p) - other.to_complex(p)).norm() <= tol,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coefficient::Exact(s) => s.rational.is_one() && s.radical.is_zero(),
            Coefficient::Float(z) => (z - 1.0).norm() <= FLOAT_TOLERANCE,
        }
    }

    /// JSON payload: `["r", "s"]` strings for exact values, `[re, im]` numbers otherwise.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Coefficient::Exact(s) => serde_json::json!([s.rational.to_string(), s.radical.to_string()]),
            Coefficient::Float(z) => serde_json::json!([z.re, z.im]),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Exact(s) => write!(f, "{s}"),
            Coefficient::Float(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Coefficient::Float(z) => write!(f, "{z}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_p_squares_to_p() {
        let root = Surd::radical_part(BigRational::one());
        assert_eq!(root.mul(&root, 7), Surd::from_integer(7));
    }

    #[test]
    fn inverse_round_trip() {
        let x = Surd::new(
            BigRational::new(3.into(), 4.into()),
            BigRational::new((-2).into(), 5.into()),
        );
        let y = x.inv(13).unwrap();
        assert_eq!(x.mul(&y, 13), Surd::from_integer(1));
        assert!(Surd::default().inv(13).is_none());
    }

    #[test]
    fn mixed_modes_promote_to_float() {
        let a = Coefficient::ratio(1, 2);
        let b = Coefficient::real(0.25);
        let c = a.add(&b, 5);
        assert!(!c.is_exact());
        assert!(c.approx_eq(&Coefficient::real(0.75), 5, 1e-15));
    }

    #[test]
    fn rationals_are_reduced() {
        let a = Coefficient::ratio(6, 8);
        assert_eq!(a, Coefficient::ratio(3, 4));
    }
}
