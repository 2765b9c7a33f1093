//! Class groups of imaginary quadratic fields `ℚ(√-d)` through reduced binary
//! quadratic forms, their characters, and the split/inert data `ε`, `λ_p`.

mod cyclotomic;

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use crate::arith::{is_prime, is_squarefree, kronecker};
use crate::error::{Error, Result};
use crate::sugano::LocalBesselDatum;
use crate::wpoly::Coefficient;

pub use cyclotomic::CyclotomicInteger;

/// A positive `d` with `-d` a fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FundamentalDiscriminant(u64);

impl FundamentalDiscriminant {
    pub fn new(d: u64) -> Result<Self> {
        let ok = match d % 4 {
            3 => is_squarefree(d),
            0 => {
                let m = d / 4;
                matches!(m % 4, 1 | 2) && is_squarefree(m)
            }
            _ => false,
        };
        if ok {
            Ok(FundamentalDiscriminant(d))
        } else {
            Err(Error::InvalidDiscriminant(d))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// Number of roots of unity in `ℚ(√-d)`.
    pub fn unit_count(self) -> u64 {
        match self.0 {
            3 => 6,
            4 => 4,
            _ => 2,
        }
    }

    /// All fundamental `d` in `[1, limit]`.
    pub fn all_up_to(limit: u64) -> Vec<Self> {
        (1..=limit).filter_map(|d| Self::new(d).ok()).collect()
    }
}

impl fmt::Display for FundamentalDiscriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A primitive positive-definite form `Ax² + Bxy + Cy²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadraticForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QuadraticForm { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    /// The unique reduced form in the `SL(2,ℤ)` class.
    pub fn reduce(self) -> Self {
        let (mut a, mut b, mut c) = (self.a, self.b, self.c);
        loop {
            // move b into (-a, a]
            let k = Integer::div_floor(&(a - b), &(2 * a));
            c += k * (a * k + b);
            b += 2 * a * k;
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            return QuadraticForm { a, b, c };
        }
    }

    /// The inverse class `(A, -B, C)`, reduced.
    pub fn inverse(self) -> Self {
        QuadraticForm::new(self.a, -self.b, self.c).reduce()
    }

    /// Gauss composition followed by reduction.
    pub fn compose(self, other: Self) -> Self {
        let disc = self.discriminant();
        debug_assert_eq!(disc, other.discriminant());
        let (mut f1, mut f2) = (self, other);
        if f1.a > f2.a {
            std::mem::swap(&mut f1, &mut f2);
        }
        let s = (f1.b + f2.b) / 2;
        let n = f2.b - s;
        let (y1, d) = if f2.a % f1.a == 0 {
            (0, f1.a)
        } else {
            let g = f2.a.extended_gcd(&f1.a);
            (g.x, g.gcd)
        };
        let (x2, y2, d1) = if s % d == 0 {
            (0, -1, d)
        } else {
            let g = s.extended_gcd(&d);
            (g.x, -g.y, g.gcd)
        };
        let v1 = f1.a / d1;
        let v2 = f2.a / d1;
        let r = ((y1 as i128 * y2 as i128 * n as i128 - x2 as i128 * f2.c as i128).rem_euclid(v1 as i128)) as i64;
        let b3 = f2.b + 2 * v2 * r;
        let a3 = v1 * v2;
        let c3 = (b3 * b3 - disc) / (4 * a3);
        QuadraticForm::new(a3, b3, c3).reduce()
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Reduced primitive forms of discriminant `-d` with the composition table.
#[derive(Clone, Debug)]
pub struct ClassGroup {
    d: FundamentalDiscriminant,
    classes: Vec<QuadraticForm>,
    index: BTreeMap<QuadraticForm, usize>,
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
}

pub fn enumerate_class_group(d: FundamentalDiscriminant) -> ClassGroup {
    let dd = d.get() as i64;
    let mut classes = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= dd {
        for b in -a..=a {
            if (b * b + dd) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + dd) / (4 * a);
            let f = QuadraticForm::new(a, b, c);
            if f.is_reduced() && a.gcd(&b).gcd(&c) == 1 {
                classes.push(f);
            }
        }
        a += 1;
    }
    classes.sort();
    let index: BTreeMap<_, _> = classes.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let table: Vec<Vec<usize>> = classes
        .iter()
        .map(|f| classes.iter().map(|g| index[&f.compose(*g)]).collect())
        .collect();
    let inverses = classes.iter().map(|f| index[&f.inverse()]).collect();
    ClassGroup {
        d,
        classes,
        index,
        table,
        inverses,
    }
}

impl ClassGroup {
    pub fn discriminant(&self) -> FundamentalDiscriminant {
        self.d
    }

    pub fn class_number(&self) -> usize {
        self.classes.len()
    }

    pub fn unit_count(&self) -> u64 {
        self.d.unit_count()
    }

    pub fn classes(&self) -> &[QuadraticForm] {
        &self.classes
    }

    /// Index of the principal class (always 0: it has the smallest `A`).
    pub fn identity(&self) -> usize {
        0
    }

    pub fn index_of(&self, f: &QuadraticForm) -> Option<usize> {
        self.index.get(&f.reduce()).copied()
    }

    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverses[i]
    }

    pub fn element_order(&self, i: usize) -> usize {
        let mut x = i;
        let mut n = 1;
        while x != self.identity() {
            x = self.compose(x, i);
            n += 1;
        }
        n
    }

    pub fn is_two_torsion(&self, i: usize) -> bool {
        self.compose(i, i) == self.identity()
    }

    /// `|Aut(c)|` under `GL(2,ℤ)`: `2w` for 2-torsion classes, else `w`.
    pub fn aut_count(&self, f: &QuadraticForm) -> Result<u64> {
        let i = self
            .index_of(f)
            .filter(|_| f.discriminant() == -(self.d.get() as i64))
            .ok_or_else(|| Error::invalid(format!("{f} is not a class of discriminant -{}", self.d)))?;
        let w = self.unit_count();
        Ok(if self.is_two_torsion(i) { 2 * w } else { w })
    }

    /// Splitting symbol of `p` in `ℚ(√-d)`.
    pub fn kronecker_symbol(&self, p: u64) -> Result<i8> {
        kronecker_symbol(self.d, p)
    }

    /// Class of the prime form `(p, b, ·)`, smallest `b ∈ [0, 2p)` with `b² ≡ -d (mod 4p)`.
    pub fn prime_form(&self, p: u64) -> Option<QuadraticForm> {
        let dd = self.d.get() as i64;
        let p = p as i64;
        (0..2 * p)
            .find(|b| (b * b + dd) % (4 * p) == 0)
            .map(|b| QuadraticForm::new(p, b, (b * b + dd) / (4 * p)).reduce())
    }

    /// All characters of the group, trivial first.
    pub fn characters(&self) -> Vec<ClassCharacter> {
        let h = self.class_number();
        // greedy generating set
        let mut generators: Vec<usize> = Vec::new();
        let mut span = vec![false; h];
        span[self.identity()] = true;
        for x in 0..h {
            if !span[x] {
                generators.push(x);
                span = self.span(&generators);
            }
        }
        let choices: Vec<Vec<u64>> = generators
            .iter()
            .map(|&g| {
                let ord = self.element_order(g) as u64;
                (0..h as u64).filter(|k| (k * ord) % h as u64 == 0).collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut assignment = vec![0usize; generators.len()];
        loop {
            let ks: Vec<u64> = assignment.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
            if let Some(values) = self.extend_homomorphism(&generators, &ks) {
                out.push(ClassCharacter::from_indices(values, h as u64));
            }
            // odometer
            let mut pos = 0;
            loop {
                if pos == assignment.len() {
                    out.sort_by(|a, b| a.values.cmp(&b.values));
                    return out;
                }
                assignment[pos] += 1;
                if assignment[pos] < choices[pos].len() {
                    break;
                }
                assignment[pos] = 0;
                pos += 1;
            }
        }
    }

    fn span(&self, generators: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.class_number()];
        let mut queue = VecDeque::from([self.identity()]);
        seen[self.identity()] = true;
        while let Some(x) = queue.pop_front() {
            for &g in generators {
                let y = self.compose(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    fn extend_homomorphism(&self, generators: &[usize], ks: &[u64]) -> Option<Vec<u64>> {
        let h = self.class_number() as u64;
        let mut values: Vec<Option<u64>> = vec![None; self.class_number()];
        values[self.identity()] = Some(0);
        let mut queue = VecDeque::from([self.identity()]);
        while let Some(x) = queue.pop_front() {
            let vx = values[x].expect("visited");
            for (&g, &k) in generators.iter().zip(ks) {
                let y = self.compose(x, g);
                let vy = (vx + k) % h;
                match values[y] {
                    None => {
                        values[y] = Some(vy);
                        queue.push_back(y);
                    }
                    Some(v) if v != vy => return None,
                    Some(_) => {}
                }
            }
        }
        values.into_iter().collect()
    }

    /// `λ_p`: 0 if inert, `Λ(𝔭)` if ramified, `Λ(𝔭) + Λ(𝔭)⁻¹` if split.
    pub fn lambda_p(&self, chi: &ClassCharacter, p: u64) -> Result<f64> {
        Ok(match self.kronecker_symbol(p)? {
            -1 => 0.0,
            e => {
                let c = self.index_of(&self.prime_form(p).expect("p is not inert")).expect("reduced");
                let z = chi.value(c);
                if e == 0 {
                    z.re
                } else {
                    2.0 * z.re
                }
            }
        })
    }

    /// `λ_p` as a coefficient: exact when it is an integer, floating otherwise.
    pub fn lambda_p_coefficient(&self, chi: &ClassCharacter, p: u64) -> Result<Coefficient> {
        let eps = self.kronecker_symbol(p)?;
        if eps == -1 {
            return Ok(Coefficient::zero());
        }
        let c = self.index_of(&self.prime_form(p).expect("not inert")).expect("reduced");
        let (_, n) = chi.reduced_index(c);
        // 2cos(2πk/n) is an integer exactly for these orders
        let twice_cos = match n {
            1 => Some(2),
            2 => Some(-2),
            3 => Some(-1),
            4 => Some(0),
            6 => Some(1),
            _ => None,
        };
        Ok(match (eps, twice_cos) {
            (1, Some(t)) => Coefficient::integer(t),
            (0, Some(t)) if t % 2 == 0 => Coefficient::integer(t / 2),
            _ => Coefficient::real(self.lambda_p(chi, p)?),
        })
    }

    /// The local datum `(p, ε, λ_p)` for the given character.
    pub fn local_datum(&self, chi: &ClassCharacter, p: u64) -> Result<LocalBesselDatum> {
        let eps = self.kronecker_symbol(p)?;
        LocalBesselDatum::new(p, eps, self.lambda_p_coefficient(chi, p)?)
    }

    /// Both sides of the weighted character-sum identity: the double sum
    /// `Σ Λ(c)·conj Λ(c′)·|Aut(c)|` over pairs with `c′ ∈ {c, c⁻¹}`, computed
    /// exactly in `ℤ[ζ_h]`, and `2hw/d_Λ`.
    pub fn autcsum_identity(&self, chi: &ClassCharacter) -> (CyclotomicInteger, i64) {
        let h = self.class_number() as u64;
        let w = self.unit_count();
        let mut lhs = CyclotomicInteger::zero(h);
        for c in 0..self.class_number() {
            let aut = if self.is_two_torsion(c) { 2 * w } else { w } as i64;
            let mut partners = vec![c];
            if self.inverse(c) != c {
                partners.push(self.inverse(c));
            }
            for c2 in partners {
                let k = (chi.values[c] + h - chi.values[c2]) % h;
                lhs.add_root(k, aut);
            }
        }
        lhs.reduce();
        let rhs = 2 * h as i64 * w as i64 / chi.d_lambda() as i64;
        (lhs, rhs)
    }
}

/// Splitting symbol `(-d / p)` with the Kronecker extension at 2.
pub fn kronecker_symbol(d: FundamentalDiscriminant, p: u64) -> Result<i8> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    Ok(kronecker(-(d.get() as i64), p) as i8)
}

/// `|h - w√d·L(1,χ)/(2π)|`
pub fn class_number_formula_check(group: &ClassGroup, l1: f64) -> f64 {
    let d = group.discriminant().get() as f64;
    let w = group.unit_count() as f64;
    (group.class_number() as f64 - w * d.sqrt() * l1 / (2.0 * PI)).abs()
}

/// A character of the class group; values are `exp(2πi·k/h)` stored as `k mod h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassCharacter {
    values: Vec<u64>,
    modulus: u64,
}

impl ClassCharacter {
    fn from_indices(values: Vec<u64>, modulus: u64) -> Self {
        ClassCharacter { values, modulus }
    }

    pub fn indices(&self) -> &[u64] {
        &self.values
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn value(&self, class: usize) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.values[class] as f64 / self.modulus as f64)
    }

    /// `(k', n)` with `Λ(c) = exp(2πi k'/n)` in lowest terms.
    pub fn reduced_index(&self, class: usize) -> (u64, u64) {
        let k = self.values[class];
        let g = k.gcd(&self.modulus);
        (k / g, self.modulus / g)
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&k| k == 0)
    }

    /// Order of the character as an element of the dual group.
    pub fn order(&self) -> u64 {
        (0..self.values.len()).map(|c| self.reduced_index(c).1).fold(1, |acc, n| acc.lcm(&n))
    }

    /// 1 when `Λ² = 1`, else 2.
    pub fn d_lambda(&self) -> u8 {
        if self.order() <= 2 {
            1
        } else {
            2
        }
    }

    pub fn is_real(&self) -> bool {
        self.d_lambda() == 1
    }
}
