use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The exact rational value of a finite float.
pub fn rat_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Polynomial in `x` and `phi` with exact rational coefficients.
///
/// Keys are `(x-degree, phi-degree)`; zero coefficients are never stored.
/// Differentiation eliminates `phi'` through `phi' = -2 x phi - phi^2`, so the
/// ring is closed under `d/dx`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoeffPoly {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl CoeffPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn x() -> Self {
        Self::monomial(BigRational::one(), 1, 0)
    }

    pub fn phi() -> Self {
        Self::monomial(BigRational::one(), 0, 1)
    }

    /// `phi' = -2 x phi - phi^2`
    pub fn phi_prime() -> Self {
        Self::from_terms([((1, 1), int(-2)), ((0, 2), int(-1))])
    }

    /// `c x^a phi^b`
    pub fn monomial(c: BigRational, a: u32, b: u32) -> Self {
        let mut p = Self::zero();
        p.add_term((a, b), c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), BigRational)>) -> Self {
        let mut p = Self::zero();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    fn add_term(&mut self, key: (u32, u32), c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, a: u32, b: u32) -> BigRational {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// `d/dx` with `d(x^a phi^b) = a x^(a-1) phi^b - 2b x^(a+1) phi^b - b x^a phi^(b+1)`.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            if a > 0 {
                out.add_term((a - 1, b), c * int(a as i64));
            }
            if b > 0 {
                out.add_term((a + 1, b), c * int(-2 * b as i64));
                out.add_term((a, b + 1), c * int(-(b as i64)));
            }
        }
        out
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// Drops every monomial containing `phi`.
    pub fn without_phi(&self) -> Self {
        Self { terms: self.terms.iter().filter(|((_, b), _)| *b == 0).map(|(k, v)| (*k, v.clone())).collect() }
    }

    pub fn evaluate(&self, x: f64, phi: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, b), c)| c.to_f64().unwrap_or(f64::NAN) * x.powi(a as i32) * phi.powi(b as i32))
            .sum()
    }
}

impl Add for &CoeffPoly {
    type Output = CoeffPoly;

    fn add(self, rhs: &CoeffPoly) -> CoeffPoly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v.clone());
        }
        out
    }
}

impl Sub for &CoeffPoly {
    type Output = CoeffPoly;

    fn sub(self, rhs: &CoeffPoly) -> CoeffPoly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, -v.clone());
        }
        out
    }
}

impl Neg for &CoeffPoly {
    type Output = CoeffPoly;

    fn neg(self) -> CoeffPoly {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &CoeffPoly {
    type Output = CoeffPoly;

    fn mul(self, rhs: &CoeffPoly) -> CoeffPoly {
        let mut out = CoeffPoly::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for CoeffPoly {
    /// Monomials in ascending `(x-degree, phi-degree)` order, e.g. `1/2 + 1/2 x^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&(a, b), c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            if !mag.is_one() || (a == 0 && b == 0) {
                factors.push(mag.to_string());
            }
            match a {
                0 => {}
                1 => factors.push("x".into()),
                _ => factors.push(format!("x^{a}")),
            }
            match b {
                0 => {}
                1 => factors.push("phi".into()),
                _ => factors.push(format!("phi^{b}")),
            }
            write!(f, "{}", factors.join(" "))?;
        }
        Ok(())
    }
}
