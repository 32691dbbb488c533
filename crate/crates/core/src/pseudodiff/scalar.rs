use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact scalar `r * i^a * sqrt(2)^b * w^(c/2) * q^(e/2)`.
///
/// `i^a` is kept with `a` in `0..4` and `sqrt(2)^b` with `b` in `{0, 1}`;
/// even powers are folded into the rational part, so structural equality is
/// equality of values (with `w` and `q` treated as independent symbols).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicScalar {
    rational: BigRational,
    i_power: u8,
    sqrt2_power: u8,
    w_half_power: i32,
    q_half_power: i32,
}

impl SymbolicScalar {
    pub fn rational(r: BigRational) -> Self {
        Self { rational: r, i_power: 0, sqrt2_power: 0, w_half_power: 0, q_half_power: 0 }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn i() -> Self {
        Self { i_power: 1, ..Self::integer(1) }
    }

    pub fn sqrt2() -> Self {
        Self::integer(1).with_sqrt2_power(1)
    }

    /// `w^(c/2)`
    pub fn w_half_power(c: i32) -> Self {
        Self { w_half_power: c, ..Self::integer(1) }
    }

    /// `q^(e/2)`
    pub fn q_half_power(e: i32) -> Self {
        Self { q_half_power: e, ..Self::integer(1) }
    }

    fn with_sqrt2_power(self, b: i32) -> Self {
        let total = self.sqrt2_power as i32 + b;
        let twos = total.div_euclid(2);
        let rest = total.rem_euclid(2) as u8;
        let two = BigRational::from_integer(BigInt::from(2));
        let factor = if twos >= 0 { num_traits::pow(two, twos as usize) } else { num_traits::pow(two, (-twos) as usize).recip() };
        Self { rational: self.rational * factor, sqrt2_power: rest, ..self }
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero()
    }

    /// The rational part, when the scalar carries no other factor.
    pub fn as_rational(&self) -> Option<&BigRational> {
        let plain = self.i_power == 0 && self.sqrt2_power == 0 && self.w_half_power == 0 && self.q_half_power == 0;
        plain.then_some(&self.rational)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::integer(1), |acc, _| &acc * self)
    }

    /// Numeric value for given `w` and `q`.
    pub fn evaluate(&self, w: f64, q: f64) -> Complex64 {
        let i_part = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)]
            [self.i_power as usize];
        let r = self.rational.to_f64().unwrap_or(f64::NAN);
        let mut v = r * 2f64.sqrt().powi(self.sqrt2_power as i32);
        if self.w_half_power != 0 {
            v *= w.powf(self.w_half_power as f64 / 2.0);
        }
        if self.q_half_power != 0 {
            v *= q.powf(self.q_half_power as f64 / 2.0);
        }
        i_part * v
    }
}

impl Mul for &SymbolicScalar {
    type Output = SymbolicScalar;

    fn mul(self, rhs: &SymbolicScalar) -> SymbolicScalar {
        let i_total = self.i_power + rhs.i_power;
        let sign = if i_total % 4 >= 2 { -BigRational::one() } else { BigRational::one() };
        let base = SymbolicScalar {
            rational: &self.rational * &rhs.rational * sign,
            i_power: i_total % 2,
            sqrt2_power: self.sqrt2_power,
            w_half_power: self.w_half_power + rhs.w_half_power,
            q_half_power: self.q_half_power + rhs.q_half_power,
        };
        base.with_sqrt2_power(rhs.sqrt2_power as i32)
    }
}

impl Mul for SymbolicScalar {
    type Output = SymbolicScalar;

    fn mul(self, rhs: SymbolicScalar) -> SymbolicScalar {
        &self * &rhs
    }
}

impl fmt::Display for SymbolicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rational.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        let mut r = self.rational.clone();
        let negative = r.is_negative();
        if negative {
            r = -r;
        }
        if !r.is_one() {
            parts.push(r.to_string());
        }
        if self.i_power == 1 {
            parts.push("i".into());
        }
        if self.sqrt2_power == 1 {
            parts.push("sqrt2".into());
        }
        if self.w_half_power != 0 {
            parts.push(format!("w^({}/2)", self.w_half_power));
        }
        if self.q_half_power != 0 {
            parts.push(format!("q^({}/2)", self.q_half_power));
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        write!(f, "{}{}", if negative { "-" } else { "" }, parts.join("*"))
    }
}
