use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{int, CoeffPoly};
use crate::error::{Error, Result};

/// Formal series `sum_k u_k(x) d^k` over finitely many orders `k <= k_max`.
///
/// `floor` is the lowest order whose coefficient is known exactly. Terms of
/// lower order have been dropped, either because an input was itself
/// truncated or because the depth limit cut off an infinite expansion.
/// `floor = None` marks an exact finite series (a differential operator, or a
/// finite combination of `d^-k` that never had to be expanded).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PdoSeries {
    terms: BTreeMap<i64, CoeffPoly>,
    floor: Option<i64>,
}

/// Generalized binomial coefficient `m (m-1) ... (m-j+1) / j!` for any integer `m`.
pub fn binomial(m: i64, j: u32) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..j as i64 {
        num *= BigInt::from(m - i);
        den *= BigInt::from(i + 1);
    }
    BigRational::new(num, den)
}

fn max_floor(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl PdoSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::monomial(CoeffPoly::one(), 0)
    }

    /// `d`
    pub fn d() -> Self {
        Self::monomial(CoeffPoly::one(), 1)
    }

    /// `u d^k`
    pub fn monomial(u: CoeffPoly, k: i64) -> Self {
        let mut s = Self::zero();
        s.add_term(k, &u);
        s
    }

    /// Multiplication operator by `u`.
    pub fn function(u: CoeffPoly) -> Self {
        Self::monomial(u, 0)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, CoeffPoly)>) -> Self {
        let mut s = Self::zero();
        for (k, u) in terms {
            s.add_term(k, &u);
        }
        s
    }

    fn add_term(&mut self, k: i64, u: &CoeffPoly) {
        if u.is_zero() {
            return;
        }
        let entry = self.terms.entry(k).or_default();
        *entry = &*entry + u;
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    /// Marks orders below `floor` as unknown and drops them.
    pub fn with_floor(mut self, floor: Option<i64>) -> Self {
        self.floor = max_floor(self.floor, floor);
        if let Some(f) = self.floor {
            self.terms.retain(|&k, _| k >= f);
        }
        self
    }

    pub fn is_exact(&self) -> bool {
        self.floor.is_none()
    }

    pub fn top_order(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn coefficient(&self, k: i64) -> CoeffPoly {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &CoeffPoly)> {
        self.terms.iter().rev()
    }

    /// No known nonzero coefficient.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, u) in &other.terms {
            out.add_term(*k, u);
        }
        out.with_floor(other.floor)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self { terms: BTreeMap::new(), floor: self.floor };
        for (k, u) in &self.terms {
            out.add_term(*k, &u.scale(c));
        }
        out
    }

    /// Applies `f` to every coefficient (used for substitutions such as `phi -> 0`).
    pub fn map_coefficients(&self, f: impl Fn(&CoeffPoly) -> CoeffPoly) -> Self {
        let mut out = Self { terms: BTreeMap::new(), floor: self.floor };
        for (k, u) in &self.terms {
            out.add_term(*k, &f(u));
        }
        out
    }

    pub fn without_phi(&self) -> Self {
        self.map_coefficients(CoeffPoly::without_phi)
    }

    /// `self * other`, keeping orders `>= -depth`.
    ///
    /// Uses `d^m g = sum_j binom(m, j) g^(j) d^(m-j)`, which terminates for
    /// `m >= 0` and is the iterated antiderivative rule for `m < 0`.
    pub fn multiply(&self, other: &Self, depth: i64) -> Self {
        let left_has_negative = self.terms.keys().next().is_some_and(|&k| k < 0);
        let floor = if self.is_exact() && other.is_exact() && !left_has_negative {
            None
        } else {
            let mut f = -depth;
            if let (Some(fa), Some(tb)) = (self.floor, other.top_order()) {
                f = f.max(fa + tb);
            }
            if let (Some(fb), Some(ta)) = (other.floor, self.top_order()) {
                f = f.max(fb + ta);
            }
            Some(f)
        };
        let mut out = Self::zero();
        for (&m, a) in &self.terms {
            for (&n, b) in &other.terms {
                let mut deriv = b.clone();
                let mut j: u32 = 0;
                loop {
                    let order = m + n - j as i64;
                    if floor.is_some_and(|f| order < f) || (m >= 0 && j as i64 > m) || deriv.is_zero() {
                        break;
                    }
                    let c = binomial(m, j);
                    out.add_term(order, &(a * &deriv).scale(&c));
                    deriv = deriv.derivative();
                    j += 1;
                }
            }
        }
        out.with_floor(floor)
    }

    /// Formal adjoint: `(u d^k)^dagger = (-d)^k u` for real `u`.
    pub fn adjoint(&self, depth: i64) -> Self {
        let mut out = Self::zero();
        for (&k, u) in &self.terms {
            let sign = if k.rem_euclid(2) == 0 { int(1) } else { int(-1) };
            let dk = Self::monomial(CoeffPoly::constant(sign), k);
            out = out.add(&dk.multiply(&Self::function(u.clone()), depth));
        }
        out.with_floor(self.floor)
    }

    fn scalar_leading(&self, what: &str) -> Result<(i64, BigRational)> {
        let top = self.top_order().ok_or_else(|| Error::Series(format!("cannot take {what} of the zero series")))?;
        let lead = self.coefficient(top);
        match lead.as_constant() {
            Some(c) if !c.is_zero() => Ok((top, c)),
            _ => Err(Error::Series(format!("{what} needs a scalar leading coefficient, found {lead}"))),
        }
    }

    /// `B` with `self * B = 1` for every order `>= floor(B)`, built by
    /// cancelling the leading residual term one order at a time.
    pub fn invert(&self, depth: i64) -> Result<Self> {
        let (m, alpha) = self.scalar_leading("an inverse")?;
        let mut target = -depth;
        if let Some(fa) = self.floor {
            target = target.max(fa - 2 * m);
        }
        let alpha_inv = alpha.recip();
        let product_depth = -(target + m);
        let mut b = Self::monomial(CoeffPoly::constant(alpha_inv.clone()), -m);
        let mut residual = Self::identity().sub(&self.multiply(&b, product_depth)).with_floor(Some(target + m));
        while let Some(k) = residual.top_order() {
            let step = Self::monomial(residual.coefficient(k).scale(&alpha_inv), k - m);
            residual = residual.sub(&self.multiply(&step, product_depth)).with_floor(Some(target + m));
            if residual.coefficient(k).is_zero() {
                b = b.add(&step);
            } else {
                return Err(Error::Series(format!("inversion stalled at order {k}")));
            }
        }
        Ok(b.with_floor(Some(target)))
    }

    /// `Q` with `Q * Q = self` for every order `>= floor(Q)`. The leading order
    /// must be even and its coefficient a positive rational square; the
    /// positive root is taken for the leading term.
    pub fn sqrt(&self, depth: i64) -> Result<Self> {
        let (lead, alpha) = self.scalar_leading("a square root")?;
        if lead % 2 != 0 {
            return Err(Error::Series(format!("no square root branch for leading order {lead}")));
        }
        let root = rational_sqrt(&alpha)
            .ok_or_else(|| Error::Series(format!("leading coefficient {alpha} has no rational square root")))?;
        let half = lead / 2;
        let mut target = -depth;
        if let Some(fa) = self.floor {
            target = target.max(fa - half);
        }
        let cutoff = target + half;
        let product_depth = -cutoff;
        let two_root_inv = (root.clone() * int(2)).recip();
        let mut q = Self::monomial(CoeffPoly::constant(root), half);
        let mut residual = self.sub(&q.multiply(&q, product_depth)).with_floor(Some(cutoff));
        while let Some(k) = residual.top_order() {
            let step = Self::monomial(residual.coefficient(k).scale(&two_root_inv), k - half);
            let cross = q
                .multiply(&step, product_depth)
                .add(&step.multiply(&q, product_depth))
                .add(&step.multiply(&step, product_depth));
            residual = residual.sub(&cross).with_floor(Some(cutoff));
            if !residual.coefficient(k).is_zero() {
                return Err(Error::Series(format!("square root stalled at order {k}")));
            }
            q = q.add(&step);
        }
        Ok(q.with_floor(Some(target)))
    }

    /// Terms at orders `>= order` with the series floor raised to `order`.
    pub fn truncate_below(&self, order: i64) -> Self {
        self.clone().with_floor(Some(order))
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

impl fmt::Display for PdoSeries {
    /// Descending orders, `d^k: <coefficient>` separated by `; `, followed by
    /// `O(d^(floor-1))` for truncated series.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.terms().map(|(k, u)| format!("d^{k}: {u}")).collect();
        if parts.is_empty() {
            parts.push("0".into());
        }
        if let Some(fl) = self.floor {
            parts.push(format!("O(d^{})", fl - 1));
        }
        write!(f, "{}", parts.join("; "))
    }
}

/// `d^-1 f = sum_{n=0}^{K-1} (-1)^n f^(n) d^(-1-n)`.
pub fn compose_dinv_f(f: &CoeffPoly, depth: usize) -> Result<PdoSeries> {
    if depth < 1 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    let dinv = PdoSeries::monomial(CoeffPoly::one(), -1);
    Ok(dinv.multiply(&PdoSeries::function(f.clone()), depth as i64))
}

/// `[d^-r, f] = sum_{n>=1} (-1)^n C(n+r-1, n) f^(n) d^(-n-r)`, keeping orders `>= -depth`.
pub fn commute_dinvr_f(r: u32, f: &CoeffPoly, depth: usize) -> Result<PdoSeries> {
    if r < 1 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    let mut out = PdoSeries::zero();
    let mut deriv = f.derivative();
    let mut n: i64 = 1;
    while -(n + r as i64) >= -(depth as i64) && !deriv.is_zero() {
        let sign = if n % 2 == 0 { int(1) } else { int(-1) };
        let c = sign * binomial(n + r as i64 - 1, n as u32);
        out.add_term(-n - r as i64, &deriv.scale(&c));
        deriv = deriv.derivative();
        n += 1;
    }
    Ok(out.with_floor(Some(-(depth as i64))))
}
