//! Generalized ladder operators with `[a1, a1^dagger] = diag(0, w_1, w_2, ...)`.
//!
//! The shift operator `S = sum c_n^(1/2) |n><n+1|` satisfies the generalized
//! partial-isometry condition, and `a1 = S^dagger a S` has the superdiagonal
//! `sqrt(W_n)` with `W_n = w_1 + ... + w_n`.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix};

use crate::error::{Error, Result};
use crate::fock::{self, apply_spectral_function, BasisTag, TruncatedOperator, C64};
use crate::isospectral::IsospectralOperators;
use crate::numerics::gauss_legendre;

/// Rule producing the algebra weights `w_1, w_2, ...`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSequence {
    /// `w_n = w` for every `n`.
    Constant(f64),
    /// `w_1 = w`, `w_n = 1` for `n >= 2`.
    Distorted(f64),
    /// `w_n = n`.
    Linear,
    /// `w_1 = w`, `w_n = 0` for `n >= 2`.
    SingleWeight(f64),
    /// `w_n = q^n`.
    Geometric(f64),
    /// `w_n = n^nu`.
    Power(f64),
    /// Explicit `w_1, w_2, ...`; extended by zeros past the end.
    Custom(Vec<f64>),
}

impl WeightSequence {
    /// Checks the parameters: positive `w`, positive `q`, finite `nu`, and for
    /// custom lists nonnegative finite entries with `w_1 > 0`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InadmissibleWeights(msg));
        match self {
            WeightSequence::Constant(w) | WeightSequence::Distorted(w) | WeightSequence::SingleWeight(w) => {
                if !(w.is_finite() && *w > 0.0) {
                    return bad(format!("w must be positive, got {w}"));
                }
            }
            WeightSequence::Geometric(q) => {
                if !(q.is_finite() && *q > 0.0) {
                    return bad(format!("q must be positive, got {q}"));
                }
            }
            WeightSequence::Power(nu) => {
                if !nu.is_finite() {
                    return bad(format!("nu must be finite, got {nu}"));
                }
            }
            WeightSequence::Linear => {}
            WeightSequence::Custom(ws) => {
                if ws.is_empty() || !(ws[0] > 0.0) {
                    return bad("custom weights need w_1 > 0".into());
                }
                if let Some(w) = ws.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
                    return bad(format!("custom weight {w} is not a nonnegative number"));
                }
            }
        }
        Ok(())
    }

    /// `w_n` for `n >= 1`; `w_0 = 0`.
    pub fn w(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match self {
            WeightSequence::Constant(w) => *w,
            WeightSequence::Distorted(w) => {
                if n == 1 {
                    *w
                } else {
                    1.0
                }
            }
            WeightSequence::Linear => n as f64,
            WeightSequence::SingleWeight(w) => {
                if n == 1 {
                    *w
                } else {
                    0.0
                }
            }
            WeightSequence::Geometric(q) => q.powi(n as i32),
            WeightSequence::Power(nu) => (n as f64).powf(*nu),
            WeightSequence::Custom(ws) => ws.get(n - 1).copied().unwrap_or(0.0),
        }
    }

    /// `W_n = w_1 + ... + w_n`, with `W_0 = 0`.
    #[allow(non_snake_case)]
    pub fn W(&self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            WeightSequence::Constant(w) => w * nf,
            WeightSequence::Distorted(w) => {
                if n == 0 {
                    0.0
                } else {
                    w + nf - 1.0
                }
            }
            WeightSequence::Linear => nf * (nf + 1.0) / 2.0,
            WeightSequence::SingleWeight(w) => {
                if n == 0 {
                    0.0
                } else {
                    *w
                }
            }
            WeightSequence::Geometric(q) => geometric_partial_sum(*q, n),
            WeightSequence::Power(_) | WeightSequence::Custom(_) => self.partial_sums(n)[n],
        }
    }

    /// `ln W_n`, finite for geometric weights even where `W_n` overflows.
    #[allow(non_snake_case)]
    pub fn ln_W(&self, n: usize) -> f64 {
        match self {
            WeightSequence::Geometric(q) if *q > 1.0 && n > 0 => {
                let lq = q.ln();
                let nf = n as f64;
                // W_n = q (q^n - 1)/(q - 1)
                lq + nf * lq + (-(-nf * lq).exp()).ln_1p() - (q - 1.0).ln()
            }
            _ => self.W(n).ln(),
        }
    }

    /// `[W_0, W_1, ..., W_n]`.
    pub fn partial_sums(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(0.0);
        let mut acc = 0.0;
        for k in 1..=n {
            acc += self.w(k);
            out.push(acc);
        }
        out
    }
}

/// `q + q^2 + ... + q^n`, accurate near `q = 1`.
fn geometric_partial_sum(q: f64, n: usize) -> f64 {
    let d = q - 1.0;
    if d == 0.0 {
        return n as f64;
    }
    q * (n as f64 * d.ln_1p()).exp_m1() / d
}

/// `W_n W_{n-2} W_{n-4} ...` over indices `>= 1`; `partial_sums[k]` holds `W_k`.
pub fn generalized_double_factorial(partial_sums: &[f64], n: usize) -> Result<f64> {
    if n >= partial_sums.len() {
        return Err(Error::IndexOutOfRange { index: n, available: partial_sums.len() });
    }
    let mut k = n;
    let mut prod = 1.0;
    while k >= 1 {
        prod *= partial_sums[k];
        if k < 2 {
            break;
        }
        k -= 2;
    }
    Ok(prod)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub c: Vec<f64>,
    pub weights: WeightSequence,
}

impl CoefficientTable {
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// `max_n |(n+1) c_n c_{n+1} / W_{n+1} - 1|`.
    pub fn telescoped_defect(&self) -> f64 {
        let sums = self.weights.partial_sums(self.c.len());
        (0..self.c.len().saturating_sub(1))
            .map(|n| ((n as f64 + 1.0) * self.c[n] * self.c[n + 1] / sums[n + 1] - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// `c_0 = 1`, `c_0 c_1 = w_1`, `(n+1) c_n c_{n+1} - n c_n c_{n-1} = w_{n+1}`.
pub fn c_coefficients_recursive(weights: &WeightSequence, n: usize) -> Result<CoefficientTable> {
    weights.validate()?;
    let mut c = Vec::with_capacity(n);
    if n > 0 {
        c.push(1.0);
    }
    if n > 1 {
        c.push(weights.w(1));
    }
    for k in 1..n.saturating_sub(1) {
        if c[k] == 0.0 {
            return Err(Error::RecursionBreakdown(k));
        }
        let next = (weights.w(k + 1) + k as f64 * c[k] * c[k - 1]) / ((k as f64 + 1.0) * c[k]);
        c.push(next);
    }
    Ok(CoefficientTable { c, weights: weights.clone() })
}

/// `c_n = ((n-1)!!/n!!) (W_n!!/W_{n-1}!!)`, evaluated as an alternating
/// product of ratios `W_k/k` and `k/W_k` so that no factorial overflows.
pub fn c_coefficients_closed(weights: &WeightSequence, n: usize) -> Result<CoefficientTable> {
    weights.validate()?;
    let sums = weights.partial_sums(n);
    let mut c = Vec::with_capacity(n);
    for m in 0..n {
        let mut prod = 1.0;
        for k in 1..=m {
            let ratio = sums[k] / k as f64;
            if (m - k) % 2 == 0 {
                prod *= ratio;
            } else {
                if sums[k] == 0.0 {
                    return Err(Error::RecursionBreakdown(k));
                }
                prod /= ratio;
            }
        }
        c.push(prod);
    }
    Ok(CoefficientTable { c, weights: weights.clone() })
}

/// `S = sum_n sqrt(c_n) |n><n+1|`.
pub fn shift_matrix(weights: &WeightSequence, n: usize, basis: BasisTag) -> Result<TruncatedOperator> {
    if n < 2 {
        return Err(Error::TruncationTooSmall(n, 2));
    }
    let table = c_coefficients_recursive(weights, n)?;
    let mut s = DMatrix::zeros(n, n);
    for k in 0..n - 1 {
        let ck = table.c[k];
        if !(ck >= 0.0) {
            return Err(Error::InadmissibleWeights(format!("c_{k} = {ck} is negative")));
        }
        s[(k, k + 1)] = ck.sqrt();
    }
    TruncatedOperator::from_real(&s, basis)
}

/// `(a1, a1^dagger)` by conjugation `a1 = S^dagger a S`.
pub fn ladder_matrices(
    weights: &WeightSequence,
    n: usize,
    basis: BasisTag,
) -> Result<(TruncatedOperator, TruncatedOperator)> {
    let s = shift_matrix(weights, n, basis)?;
    let a = fock::annihilation_matrix(n)?.retag(basis);
    let lowering = s.adjoint().matmul(&a)?.matmul(&s)?;
    let raising = lowering.adjoint();
    Ok((lowering, raising))
}

/// `(a1, a1^dagger)` by filling `sqrt(W_n)` on the superdiagonal from index 1.
pub fn ladder_matrices_direct(
    weights: &WeightSequence,
    n: usize,
    basis: BasisTag,
) -> Result<(TruncatedOperator, TruncatedOperator)> {
    if n < 2 {
        return Err(Error::TruncationTooSmall(n, 2));
    }
    weights.validate()?;
    let sums = weights.partial_sums(n);
    let mut m = DMatrix::zeros(n, n);
    for k in 1..n - 1 {
        m[(k, k + 1)] = sums[k].sqrt();
    }
    let lowering = TruncatedOperator::from_real(&m, basis)?;
    let raising = lowering.adjoint();
    Ok((lowering, raising))
}

/// `U X U^dagger` for a Fock-tagged abstract operator `X`.
///
/// The result holds the Fock components of the transported operator, so it
/// keeps the Fock tag; its Theta components follow from
/// [`IsospectralOperators::to_theta_components`].
pub fn transport_to_theta(x: &TruncatedOperator, u: &TruncatedOperator) -> Result<TruncatedOperator> {
    if x.basis() != BasisTag::Fock {
        return Err(Error::BasisMismatch(x.basis(), BasisTag::Fock));
    }
    u.matmul(x)?.matmul(&u.adjoint())
}

/// The five weight families with printed closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormCase {
    /// `w_n = w`
    Constant(f64),
    /// `w_1 = w`, `w_n = 1` otherwise
    Distorted(f64),
    /// `w_n = n`
    Linear,
    /// `w_1 = w`, `w_n = 0` otherwise
    SingleWeight(f64),
    /// `w_n = q^n`
    Geometric(f64),
}

impl ClosedFormCase {
    pub fn weights(&self) -> WeightSequence {
        match *self {
            ClosedFormCase::Constant(w) => WeightSequence::Constant(w),
            ClosedFormCase::Distorted(w) => WeightSequence::Distorted(w),
            ClosedFormCase::Linear => WeightSequence::Linear,
            ClosedFormCase::SingleWeight(w) => WeightSequence::SingleWeight(w),
            ClosedFormCase::Geometric(q) => WeightSequence::Geometric(q),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            ClosedFormCase::Constant(w) => format!("i (w={w})"),
            ClosedFormCase::Distorted(w) => format!("ii (w={w})"),
            ClosedFormCase::Linear => "iii".into(),
            ClosedFormCase::SingleWeight(w) => format!("iv (w={w})"),
            ClosedFormCase::Geometric(q) => format!("v (q={q})"),
        }
    }
}

/// `(1 - q^(n+1)) / (1 - q)`, stable near `q = 1`.
fn q_number(q: f64, n: f64) -> f64 {
    let d = q - 1.0;
    if d == 0.0 {
        return n + 1.0;
    }
    ((n + 1.0) * d.ln_1p()).exp_m1() / d
}

/// The printed closed form of `a1~` for one case, in Fock components, built
/// from spectral functions of `H` sandwiched between `b^dagger` and `b`.
pub fn closed_form_case(case: ClosedFormCase, ops: &IsospectralOperators) -> Result<TruncatedOperator> {
    let h = &ops.h;
    let inv_sqrt = apply_spectral_function(h, |t| (t + 1.0).powf(-0.5))?;
    let inv = apply_spectral_function(h, |t| 1.0 / (t + 1.0))?;
    let a = &ops.a;
    let real = |v: f64| C64::new(v, 0.0);
    let middle = match case {
        ClosedFormCase::Constant(w) => {
            check_nonnegative(w)?;
            inv_sqrt.matmul(a)?.matmul(&inv_sqrt)?.scale(real(w.sqrt()))
        }
        ClosedFormCase::Distorted(w) => {
            check_nonnegative(w)?;
            let f = apply_spectral_function(h, |t| ((t + w) / (t + 2.0)).sqrt() / (t + 1.0))?;
            f.matmul(a)?
        }
        ClosedFormCase::Linear => inv_sqrt.matmul(a)?.scale(real(0.5f64.sqrt())),
        ClosedFormCase::SingleWeight(w) => {
            check_nonnegative(w)?;
            inv.matmul(a)?.matmul(&inv_sqrt)?.scale(real(w.sqrt()))
        }
        ClosedFormCase::Geometric(q) => {
            if !(q > 0.0) {
                return Err(Error::InvalidParameter(format!("q must be positive, got {q}")));
            }
            let g = apply_spectral_function(h, |t| q_number(q, t).sqrt())?;
            inv.matmul(&g)?.matmul(a)?.matmul(&inv_sqrt)?.scale(real(q.sqrt()))
        }
    };
    ops.b_dagger.matmul(&middle)?.matmul(&ops.b)
}

fn check_nonnegative(w: f64) -> Result<()> {
    if w < 0.0 || !w.is_finite() {
        Err(Error::InvalidParameter(format!("w must be nonnegative, got {w}")))
    } else {
        Ok(())
    }
}

/// `b^dagger [sum_n sqrt(W_{n+1}/((n+1)(n+2))) |n><n+1|] b` in Fock components.
pub fn general_form(weights: &WeightSequence, ops: &IsospectralOperators) -> Result<TruncatedOperator> {
    weights.validate()?;
    let n = ops.dim();
    let sums = weights.partial_sums(n);
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n - 1 {
        let kf = k as f64;
        m[(k, k + 1)] = (sums[k + 1] / ((kf + 1.0) * (kf + 2.0))).sqrt();
    }
    let m = TruncatedOperator::from_real(&m, BasisTag::Fock)?;
    ops.b_dagger.matmul(&m)?.matmul(&ops.b)
}

/// `b^dagger (H+1)^(-1/2) G(H) a G(H) (H+1)^(-1/2) b` for a scalar function `G`.
pub fn symmetric_form(g: impl Fn(f64) -> f64, ops: &IsospectralOperators) -> Result<TruncatedOperator> {
    let side = apply_spectral_function(&ops.h, |t| g(t) / (t + 1.0).sqrt())?;
    let middle = side.matmul(&ops.a)?.matmul(&side)?;
    ops.b_dagger.matmul(&middle)?.matmul(&ops.b)
}

const RESOLVENT_NODES: usize = 200;

/// `X^(-1/2) = (1/pi) int_0^inf xi^(-1/2) (xi + X)^(-1) d xi`.
///
/// With `xi = tan^2(theta)` the integrand becomes
/// `(2/pi) (sin^2(theta) + cos^2(theta) X)^(-1)` on `(0, pi/2)`, integrated
/// with 200-node Gauss-Legendre and one LU solve per node.
pub fn resolvent_inv_sqrt(x: &TruncatedOperator) -> Result<TruncatedOperator> {
    let scale = x.norm_inf().max(1.0);
    let defect = x.hermiticity_defect();
    if defect > 1e-10 * scale {
        return Err(Error::NotHermitian(defect));
    }
    let sym = (x.entries() + x.entries().adjoint()) * C64::new(0.5, 0.0);
    let n = x.dim();
    // A complex Hermitian M = A + iB is positive definite exactly when the
    // real symmetric [[A, -B], [B, A]] is.
    let embedded = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = sym[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    if Cholesky::new(embedded).is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    let id = DMatrix::<C64>::identity(n, n);
    let (nodes, weights) = gauss_legendre(RESOLVENT_NODES, 0.0, PI / 2.0);
    let mut acc = DMatrix::<C64>::zeros(n, n);
    for (&theta, &wt) in nodes.iter().zip(&weights) {
        let (s, c) = theta.sin_cos();
        let m = &id * C64::new(s * s, 0.0) + &sym * C64::new(c * c, 0.0);
        let inv = m.lu().solve(&id).ok_or(Error::NotPositiveDefinite)?;
        acc += inv * C64::new(2.0 * wt / PI, 0.0);
    }
    TruncatedOperator::new(acc, x.basis())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isospectral::{IsospectralParams, ThetaBasis};
    use crate::numerics::QuadratureGrid;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn named_cases() -> Vec<WeightSequence> {
        vec![
            WeightSequence::Constant(2.0),
            WeightSequence::Distorted(0.5),
            WeightSequence::Linear,
            WeightSequence::SingleWeight(2.0),
            WeightSequence::Geometric(0.7),
            WeightSequence::Geometric(1.3),
        ]
    }

    fn operators(n: usize) -> IsospectralOperators {
        let p = IsospectralParams::new(2.0).unwrap();
        let basis = ThetaBasis::new(p, QuadratureGrid::for_truncation(n).unwrap(), n).unwrap();
        IsospectralOperators::new(&basis).unwrap()
    }

    #[test]
    fn weight_accessors() {
        let d = WeightSequence::Distorted(2.0);
        assert_eq!((d.w(1), d.w(2), d.w(7)), (2.0, 1.0, 1.0));
        assert_eq!(d.W(3), 4.0);
        assert_eq!(WeightSequence::Linear.W(4), 10.0);
        assert_eq!(WeightSequence::SingleWeight(3.0).W(9), 3.0);
        let g = WeightSequence::Geometric(0.5);
        assert!((g.W(3) - 0.875).abs() < 1e-15);
        let near = WeightSequence::Geometric(1.0 + 1e-12);
        assert!((near.W(10) - 10.0).abs() < 1e-9);
        let c = WeightSequence::Custom(vec![1.0, 0.5, 0.25]);
        assert_eq!(c.W(5), 1.75);
        assert!(WeightSequence::Custom(vec![0.0, 1.0]).validate().is_err());
        assert!(WeightSequence::Custom(vec![1.0, -1.0]).validate().is_err());
        assert!(WeightSequence::Geometric(0.0).validate().is_err());
        for ws in named_cases() {
            let sums = ws.partial_sums(50);
            for n in 0..=50 {
                assert!((sums[n] - ws.W(n)).abs() <= 1e-12 * sums[n].max(1.0));
            }
        }
    }

    #[test]
    fn double_factorial_examples() {
        let ones: Vec<f64> = (0..=8).map(|k| k as f64).collect();
        assert_eq!(generalized_double_factorial(&ones, 6).unwrap(), 48.0);
        assert_eq!(generalized_double_factorial(&ones, 1).unwrap(), 1.0);
        assert_eq!(generalized_double_factorial(&ones, 0).unwrap(), 1.0);
        let lin = WeightSequence::Linear.partial_sums(5);
        assert_eq!(generalized_double_factorial(&lin, 3).unwrap(), 6.0);
        assert!(generalized_double_factorial(&lin, 9).is_err());
    }

    #[test]
    fn recursion_examples() {
        let t = c_coefficients_recursive(&WeightSequence::Constant(1.0), 40).unwrap();
        assert!(t.c.iter().all(|&c| (c - 1.0).abs() < 1e-13));
        let t = c_coefficients_recursive(&WeightSequence::Distorted(2.0), 5).unwrap();
        assert_eq!(t.c[0], 1.0);
        assert_eq!(t.c[1], 2.0);
        assert!(rel(t.c[2], 0.75) < 1e-15);
        assert!(rel(t.c[3], 16.0 / 9.0) < 1e-15);
    }

    #[test]
    fn closed_form_matches_recursion() {
        for ws in named_cases() {
            let a = c_coefficients_recursive(&ws, 501).unwrap();
            let b = c_coefficients_closed(&ws, 501).unwrap();
            let worst = a.c.iter().zip(&b.c).map(|(x, y)| rel(*y, *x)).fold(0.0, f64::max);
            assert!(worst < 1e-12, "{ws:?}: {worst:e}");
            assert!(a.telescoped_defect() < 1e-12);
            assert!(b.telescoped_defect() < 1e-12);
        }
        let d = c_coefficients_closed(&WeightSequence::Distorted(3.0), 3).unwrap();
        assert!(rel(d.c[2], 0.5 * 4.0 / 3.0) < 1e-15);
    }

    #[test]
    fn shift_examples() {
        let n = 32;
        let k = fock::interior_dim(n);
        let s = shift_matrix(&WeightSequence::Constant(1.0), n, BasisTag::Fock).unwrap();
        let ss = s.matmul(&s.adjoint()).unwrap();
        let id = TruncatedOperator::identity(n, BasisTag::Fock).unwrap();
        assert!(ss.sub(&id).unwrap().window_norm_inf(k) < 1e-15);
        let sds = s.adjoint().matmul(&s).unwrap();
        let mut proj = id.clone().into_entries();
        proj[(0, 0)] = C64::new(0.0, 0.0);
        let proj = TruncatedOperator::new(proj, BasisTag::Fock).unwrap();
        assert!(sds.sub(&proj).unwrap().window_norm_inf(k) < 1e-15);

        let h = fock::number_matrix(n).unwrap();
        let closed = apply_spectral_function(&h, |t| (1.0 + t).powf(-0.5))
            .unwrap()
            .matmul(&fock::annihilation_matrix(n).unwrap())
            .unwrap();
        assert!(closed.sub(&s).unwrap().norm_inf() < 1e-12);

        let s2 = shift_matrix(&WeightSequence::Distorted(2.0), n, BasisTag::Fock).unwrap();
        let d = s2.matmul(&s2.adjoint()).unwrap().diagonal_entries();
        for (got, want) in d.iter().zip([1.0, 2.0, 0.75, 16.0 / 9.0]) {
            assert!((got.re - want).abs() < 1e-14);
        }
    }

    #[test]
    fn ladder_structure() {
        let n = 24;
        let (lo, hi) = ladder_matrices(&WeightSequence::Constant(1.0), n, BasisTag::Fock).unwrap();
        let e = |i| fock::StateVector::basis_state(i, n, BasisTag::Fock).unwrap();
        assert_eq!(lo.apply(&e(0)).unwrap().norm(), 0.0);
        assert_eq!(lo.apply(&e(1)).unwrap().norm(), 0.0);
        assert_eq!(hi.apply(&e(0)).unwrap().norm(), 0.0);
        for k in 1..n - 1 {
            assert!((lo.entry(k, k + 1).re - (k as f64).sqrt()).abs() < 1e-13);
        }
    }

    #[test]
    fn two_paths_and_commutator_in_fock_basis() {
        let n = 64;
        let k = fock::interior_dim(n);
        for ws in named_cases() {
            let (lo, hi) = ladder_matrices(&ws, n, BasisTag::Fock).unwrap();
            let (dlo, _) = ladder_matrices_direct(&ws, n, BasisTag::Fock).unwrap();
            let scale = dlo.norm_inf().max(1.0);
            assert!(lo.sub(&dlo).unwrap().norm_inf() < 1e-12 * scale, "{ws:?}");
            let comm = fock::commutator(&lo, &hi).unwrap();
            let target: Vec<f64> = (0..n).map(|i| ws.w(i)).collect();
            let target = TruncatedOperator::diagonal(&target, BasisTag::Fock).unwrap();
            let resid = comm.sub(&target).unwrap().window_norm_inf(k);
            assert!(resid < 1e-12 * scale, "{ws:?}: {resid:e}");
        }
    }

    #[test]
    fn transport_examples() {
        let n = 64;
        let ops = operators(n);
        let id = TruncatedOperator::identity(n, BasisTag::Fock).unwrap();
        let t = transport_to_theta(&id, &ops.u).unwrap();
        assert!(t.sub(&id).unwrap().window_norm_inf(fock::quadrature_window(n)) < 1e-7);

        // The transported states U|k> are orthonormal only for k inside the
        // quadrature window, so the spectrum check uses an operator supported there.
        let w = fock::quadrature_window(n);
        let values: Vec<f64> = (0..n).map(|k| if k < w { k as f64 + 0.5 } else { 0.0 }).collect();
        let h = TruncatedOperator::diagonal(&values, BasisTag::Fock).unwrap();
        let th = transport_to_theta(&h, &ops.u).unwrap();
        let ev_a = fock::hermitian_eigensystem(&h).unwrap().values;
        let ev_b = fock::hermitian_eigensystem(&th).unwrap().values;
        for (a, b) in ev_a.iter().zip(&ev_b) {
            assert!((a - b).abs() < 1e-8 * a.max(1.0), "{a} vs {b}");
        }
        assert!(transport_to_theta(&h.retag(BasisTag::Theta(2.0)), &ops.u).is_err());
    }

    #[test]
    fn closed_forms_match_general_construction() {
        let n = 64;
        let ops = operators(n);
        let w = fock::quadrature_window(n);
        let cases = [
            ClosedFormCase::Constant(2.0),
            ClosedFormCase::Distorted(0.5),
            ClosedFormCase::Linear,
            ClosedFormCase::SingleWeight(2.0),
            ClosedFormCase::Geometric(0.7),
            ClosedFormCase::Geometric(1.3),
        ];
        for case in cases {
            let closed = closed_form_case(case, &ops).unwrap();
            let general = general_form(&case.weights(), &ops).unwrap();
            assert!(closed.sub(&general).unwrap().norm_inf() < 1e-10 * general.norm_inf().max(1.0));
            let (direct, _) = ladder_matrices_direct(&case.weights(), n, ops.theta_tag()).unwrap();
            let theta = ops.to_theta_components(&closed).unwrap();
            let resid = theta.sub(&direct).unwrap().window_norm_inf(w);
            assert!(resid < 1e-7, "{}: {resid:e}", case.label());
        }
    }

    #[test]
    fn closed_form_special_relations() {
        let n = 48;
        let ops = operators(n);
        let i1 = closed_form_case(ClosedFormCase::Constant(1.0), &ops).unwrap();
        let ii1 = closed_form_case(ClosedFormCase::Distorted(1.0), &ops).unwrap();
        assert!(i1.sub(&ii1).unwrap().norm_inf() < 1e-12);
        let v = closed_form_case(ClosedFormCase::Geometric(1.0 + 1e-8), &ops).unwrap();
        assert!(v.sub(&i1).unwrap().norm_inf() < 1e-5);

        let w: f64 = 2.0;
        let sym = symmetric_form(|_| w.powf(0.25), &ops).unwrap();
        let i2 = closed_form_case(ClosedFormCase::Constant(w), &ops).unwrap();
        assert!(sym.sub(&i2).unwrap().norm_inf() < 1e-10);

        assert!(closed_form_case(ClosedFormCase::Geometric(0.0), &ops).is_err());
        assert!(closed_form_case(ClosedFormCase::Constant(-1.0), &ops).is_err());
    }

    #[test]
    fn linear_case_commutator_is_h_tilde() {
        let n = 64;
        let ops = operators(n);
        let lo = closed_form_case(ClosedFormCase::Linear, &ops).unwrap();
        let comm = fock::commutator(&lo, &lo.adjoint()).unwrap();
        let d = comm.sub(&ops.h_tilde).unwrap();
        assert!(d.window_norm_inf(fock::quadrature_window(n)) < 1e-6);
    }

    #[test]
    fn resolvent_examples() {
        let id = TruncatedOperator::identity(3, BasisTag::Fock).unwrap();
        assert!(resolvent_inv_sqrt(&id).unwrap().sub(&id).unwrap().norm_inf() < 1e-12);
        let x = TruncatedOperator::diagonal(&[1.0, 2.0, 5.0], BasisTag::Fock).unwrap();
        let r = resolvent_inv_sqrt(&x).unwrap();
        for (i, v) in [1.0f64, 2.0, 5.0].iter().enumerate() {
            assert!((r.entry(i, i).re - v.powf(-0.5)).abs() < 1e-8);
        }
        let n = 32;
        let h = fock::number_matrix(n).unwrap();
        let xp = h.add(&TruncatedOperator::identity(n, BasisTag::Fock).unwrap()).unwrap();
        let spectral = apply_spectral_function(&xp, |t| t.powf(-0.5)).unwrap();
        assert!(resolvent_inv_sqrt(&xp).unwrap().sub(&spectral).unwrap().norm_inf() < 1e-6);
        let neg = TruncatedOperator::diagonal(&[1.0, -1.0], BasisTag::Fock).unwrap();
        assert_eq!(resolvent_inv_sqrt(&neg), Err(Error::NotPositiveDefinite));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn telescoped_identity_for_random_weights(ws in prop::collection::vec(0.05f64..5.0, 1..60)) {
            let seq = WeightSequence::Custom(ws.clone());
            let n = ws.len() + 1;
            let rec = c_coefficients_recursive(&seq, n).unwrap();
            let closed = c_coefficients_closed(&seq, n).unwrap();
            prop_assert!(rec.telescoped_defect() < 1e-12);
            for (a, b) in rec.c.iter().zip(&closed.c) {
                prop_assert!(rel(*b, *a) < 1e-12);
            }
        }

        #[test]
        fn commutator_diagonal_for_random_weights(ws in prop::collection::vec(0.05f64..5.0, 20..21)) {
            let seq = WeightSequence::Custom(ws.clone());
            let (lo, hi) = ladder_matrices(&seq, 21, BasisTag::Fock).unwrap();
            let comm = fock::commutator(&lo, &hi).unwrap();
            for i in 0..fock::interior_dim(21) {
                prop_assert!((comm.entry(i, i).re - seq.w(i)).abs() < 1e-11);
            }
        }
    }
}
