//! Annihilation-operator coherent states of the generalized algebra, their
//! Bargmann representation and the growth of the associated entire functions.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::{self, BasisTag, StateVector, TruncatedOperator, C64};
use crate::isospectral::IsospectralOperators;
use crate::ladder::{ladder_matrices_direct, transport_to_theta, WeightSequence};

/// Relative size of the dropped tail of `h` that a truncated coherent state may ignore.
pub const CS_TAIL_LIMIT: f64 = 1e-24;

/// Relative accuracy requested from [`normalization_h`].
const H_TAIL_LIMIT: f64 = 1e-16;
const H_MAX_TERMS: usize = 1_000_000;

/// `ln d_n = -sum_{k<=n} ln W_k` for `n < count`.
pub fn log_d_coefficients(weights: &WeightSequence, count: usize) -> Result<Vec<f64>> {
    weights.validate()?;
    let sums = weights.partial_sums(count);
    let mut out = Vec::with_capacity(count);
    let mut acc = 0.0;
    for n in 0..count {
        if n > 0 {
            if !(sums[n] > 0.0) {
                let valid_prefix = out.iter().map(|l: &f64| l.exp()).collect();
                return Err(Error::VanishingPartialSum { index: n, valid_prefix });
            }
            acc -= sums[n].ln();
        }
        out.push(acc);
    }
    Ok(out)
}

/// `d_0 = 1`, `d_n = (W_1 ... W_n)^-1` for `n < count`.
pub fn d_coefficients(weights: &WeightSequence, count: usize) -> Result<Vec<f64>> {
    Ok(log_d_coefficients(weights, count)?.into_iter().map(f64::exp).collect())
}

/// `h(t) = sum_n d_n t^n`, summed until a certified tail bound drops below
/// `1e-16` of the partial sum.
///
/// Since `W_n` is nondecreasing, the term ratios `t / W_{n+1}` never
/// increase, so once a ratio `r < 1` is reached the rest is bounded by a
/// geometric series.
pub fn normalization_h(t: f64, weights: &WeightSequence) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("h needs a finite t >= 0, got {t}")));
    }
    weights.validate()?;
    let radius = radius_of_convergence(weights);
    if radius.is_finite() && t.sqrt() >= radius {
        return Err(Error::BeyondRadius { argument: t.sqrt(), radius });
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut big_w = 0.0;
    for n in 1..H_MAX_TERMS {
        big_w += weights.w(n);
        if !(big_w > 0.0) {
            return Err(Error::VanishingPartialSum { index: n, valid_prefix: vec![] });
        }
        let ratio = t / big_w;
        term *= ratio;
        sum += term;
        // Remaining terms are bounded by term * r/(1-r) with r = t / W_{n+1} <= ratio.
        let next_ratio = t / (big_w + weights.w(n + 1));
        if next_ratio < 1.0 && term * next_ratio / (1.0 - next_ratio) <= H_TAIL_LIMIT * sum {
            return Ok(sum);
        }
    }
    Err(Error::BeyondRadius { argument: t.sqrt(), radius })
}

/// Parameters of one coherent state `|zeta; theta_1>` truncated to `n` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct CsSpec {
    pub zeta: C64,
    pub weights: WeightSequence,
    pub n: usize,
}

/// Coefficients `h^(-1/2) d_k^(1/2) zeta^k` on `theta_{k+1}`, `k = 0 .. N-2`.
///
/// Refuses when the dropped tail `sum_{k >= N-1} d_k |zeta|^(2k)` may exceed
/// `1e-24 h`.
pub fn cs_vector(spec: &CsSpec, basis: BasisTag) -> Result<StateVector> {
    let n = spec.n;
    if n < 2 {
        return Err(Error::TruncationTooSmall(n, 2));
    }
    let t = spec.zeta.norm_sqr();
    let h = normalization_h(t, &spec.weights)?;
    let log_d = log_d_coefficients(&spec.weights, n)?;
    if t > 0.0 {
        let k = n - 1;
        let last = (log_d[k] + k as f64 * t.ln()).exp();
        let r = t / spec.weights.W(n);
        let tail = if r < 1.0 { last / (1.0 - r) } else { f64::INFINITY };
        if tail > CS_TAIL_LIMIT * h {
            return Err(Error::TruncationTail { tail: tail / h, allowed: CS_TAIL_LIMIT });
        }
    }
    let mut coeffs = vec![C64::new(0.0, 0.0); n];
    let (r, arg) = (spec.zeta.norm(), spec.zeta.arg());
    let log_norm = -0.5 * h.ln();
    for k in 0..n - 1 {
        let mag = if k == 0 { 1.0 } else if r == 0.0 { 0.0 } else { (0.5 * log_d[k] + k as f64 * r.ln()).exp() };
        coeffs[k + 1] = C64::from_polar(mag * log_norm.exp(), k as f64 * arg);
    }
    Ok(StateVector::from_vec(coeffs, basis))
}

/// `||a1~ |zeta> - zeta |zeta>||` in Fock components: the ladder operator is
/// `U a1 U^dagger` and the state `U c`, both built from the quadrature `U`.
pub fn cs_eigen_residual(spec: &CsSpec, ops: &IsospectralOperators) -> Result<f64> {
    if ops.dim() != spec.n {
        return Err(Error::DimensionMismatch(ops.dim(), spec.n));
    }
    let (lowering, _) = ladder_matrices_direct(&spec.weights, spec.n, BasisTag::Fock)?;
    let a1 = transport_to_theta(&lowering, &ops.u)?;
    let c = cs_vector(spec, BasisTag::Fock)?;
    let v = ops.u.apply(&c)?;
    let r = a1.apply(&v)?.sub(&v.scale(spec.zeta))?;
    Ok(r.norm())
}

/// `Psi(zeta) = sum_k d_k^(1/2) <theta_{k+1}|Psi> zeta^k` at each sample.
pub fn bargmann_transform(psi: &StateVector, weights: &WeightSequence, samples: &[C64]) -> Result<Vec<C64>> {
    if !matches!(psi.basis(), BasisTag::Theta(_)) {
        return Err(Error::BasisMismatch(psi.basis(), BasisTag::Theta(f64::NAN)));
    }
    let radius = radius_of_convergence(weights);
    let n = psi.dim();
    let log_d = log_d_coefficients(weights, n)?;
    let mut out = Vec::with_capacity(samples.len());
    for &z in samples {
        if radius.is_finite() && z.norm() >= radius {
            return Err(Error::BeyondRadius { argument: z.norm(), radius });
        }
        let mut acc = C64::new(0.0, 0.0);
        let mut zp = C64::new(1.0, 0.0);
        for k in 0..n - 1 {
            acc += psi.coeff(k + 1) * zp * (0.5 * log_d[k]).exp();
            zp *= z;
        }
        out.push(acc);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthClass {
    /// Entire functions of finite positive order.
    Entire,
    /// Entire functions of order zero (super-factorial growth of the products).
    ZeroOrder,
    /// The series for `h` has a finite radius of convergence.
    NotEntire,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitDiagnostics {
    /// Coefficients of `n^2, n ln n, n, 1`.
    pub coefficients: [f64; 4],
    pub std_errors: [f64; 4],
    pub rms_residual: f64,
    /// `|c_2| n_max^2` relative to the fitted value at `n_max`.
    pub quadratic_share: f64,
    /// `|c_1| n_max ln n_max` relative to the fitted value at `n_max`.
    pub nlogn_share: f64,
    /// `W` at the two ends of the ratio test and its extrapolated limit.
    pub w_half: f64,
    pub w_end: f64,
    pub w_limit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    pub class: GrowthClass,
    /// `None` when not entire.
    pub rho: Option<f64>,
    /// Radius in `|zeta|`; infinite for entire functions.
    pub radius: f64,
    pub fit: FitDiagnostics,
}

const FIT_START: usize = 1_000;
const FIT_END: usize = 10_000;
const SHARE_THRESHOLD: f64 = 0.01;

/// Classifies the growth of `ln(W_1 ... W_n)` and estimates the order
/// `rho = lim 2 n ln n / ln(W_1 ... W_n)`.
///
/// `ln(W_1 ... W_n)` is fitted on `n in [1e3, 1e4]` against
/// `{n^2, n ln n, n, 1}`. A quadratic term contributing more than 1% of the
/// fitted value at `n = 1e4` means order zero. Otherwise, if the `n ln n`
/// term contributes less than 1%, the products grow at most geometrically and
/// `h` has radius `sqrt(lim W_n)`; else `rho = 2 / c_{n ln n}`.
pub fn order_estimate(weights: &WeightSequence) -> Result<OrderEstimate> {
    weights.validate()?;
    let sums = weights.partial_sums(FIT_END);
    if let Some(k) = (1..=FIT_END).find(|&k| !(sums[k] > 0.0)) {
        return Err(Error::VanishingPartialSum { index: k, valid_prefix: vec![] });
    }
    let mut log_prod = vec![0.0; FIT_END + 1];
    for k in 1..=FIT_END {
        let ln_w = if sums[k].is_finite() { sums[k].ln() } else { weights.ln_W(k) };
        log_prod[k] = log_prod[k - 1] + ln_w;
    }
    let rows = FIT_END - FIT_START + 1;
    let basis = |n: f64| [n * n, n * n.ln(), n, 1.0];
    let nmax = FIT_END as f64;
    let scales = basis(nmax).map(|v: f64| v.abs().max(1.0));
    let a = DMatrix::from_fn(rows, 4, |r, c| basis((FIT_START + r) as f64)[c] / scales[c]);
    let y = DVector::from_fn(rows, |r, _| log_prod[FIT_START + r]);
    let qr = a.clone().qr();
    let rmat = qr.r();
    let qty = qr.q().transpose() * &y;
    let scaled = rmat.solve_upper_triangular(&qty).ok_or_else(|| Error::InvalidParameter("singular fit".into()))?;
    let resid = &y - &a * &scaled;
    let rss = resid.norm_squared();
    let sigma2 = rss / (rows - 4) as f64;
    let rinv = rmat.try_inverse().unwrap_or_else(|| DMatrix::zeros(4, 4));
    let cov = &rinv * rinv.transpose() * sigma2;
    let mut coefficients = [0.0; 4];
    let mut std_errors = [0.0; 4];
    for c in 0..4 {
        coefficients[c] = scaled[c] / scales[c];
        std_errors[c] = cov[(c, c)].max(0.0).sqrt() / scales[c];
    }
    let b = basis(nmax);
    let fitted: f64 = (0..4).map(|c| coefficients[c] * b[c]).sum();
    let scale = fitted.abs().max(nmax);
    let quadratic_share = (coefficients[0] * b[0]).abs() / scale;
    let nlogn_share = (coefficients[1] * b[1]).abs() / scale;

    let w_half = sums[FIT_END / 2];
    let w_end = sums[FIT_END];
    let w_limit = 2.0 * w_end - w_half;
    let fit = FitDiagnostics {
        coefficients,
        std_errors,
        rms_residual: (rss / rows as f64).sqrt(),
        quadratic_share,
        nlogn_share,
        w_half,
        w_end,
        w_limit,
    };
    let (class, rho, radius) = if quadratic_share > SHARE_THRESHOLD {
        (GrowthClass::ZeroOrder, Some(0.0), f64::INFINITY)
    } else if nlogn_share < SHARE_THRESHOLD {
        (GrowthClass::NotEntire, None, w_limit.sqrt())
    } else {
        (GrowthClass::Entire, Some(2.0 / coefficients[1]), f64::INFINITY)
    };
    Ok(OrderEstimate { class, rho, radius, fit })
}

/// Radius of convergence in `|zeta|` of the series for `h(|zeta|^2)`;
/// infinite unless the partial sums `W_n` stay bounded.
pub fn radius_of_convergence(weights: &WeightSequence) -> f64 {
    match order_estimate(weights) {
        Ok(e) => e.radius,
        Err(_) => f64::INFINITY,
    }
}

/// Both sides of `q (q+q^2) ... (q+...+q^n) = q^n (q-1)^(1-n) (q^2-1) ... (q^n-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QFactorial {
    pub log_product: f64,
    pub log_closed: f64,
}

impl QFactorial {
    pub fn product(&self) -> f64 {
        self.log_product.exp()
    }

    pub fn closed(&self) -> f64 {
        self.log_closed.exp()
    }

    /// `|closed / product - 1|`
    pub fn relative_difference(&self) -> f64 {
        (self.log_closed - self.log_product).exp_m1().abs()
    }
}

/// Evaluates both sides in log space; at `q = 1` both reduce to `n!`.
pub fn q_factorial(q: f64, n: usize) -> Result<QFactorial> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("q must be positive, got {q}")));
    }
    let w = WeightSequence::Geometric(q);
    let log_product: f64 = (1..=n).map(|k| w.ln_W(k)).sum();
    if q == 1.0 {
        return Ok(QFactorial { log_product, log_closed: (2..=n).map(|k| (k as f64).ln()).sum() });
    }
    let lq = q.ln();
    let nf = n as f64;
    let mut log_closed = nf * lq + (1.0 - nf) * (q - 1.0).abs().ln();
    for k in 2..=n {
        log_closed += (k as f64 * lq).exp_m1().abs().ln();
    }
    Ok(QFactorial { log_product, log_closed })
}

/// `D = exp(zeta a1~^dagger - conj(zeta) a1~)` from the eigendecomposition of
/// the Hermitian matrix `i (zeta a1~^dagger - conj(zeta) a1~)`.
pub fn displacement_operator(
    zeta: C64,
    lowering: &TruncatedOperator,
    raising: &TruncatedOperator,
) -> Result<TruncatedOperator> {
    let x = raising.scale(zeta).sub(&lowering.scale(zeta.conj()))?;
    let defect = x.anti_hermiticity_defect();
    if defect > 1e-10 * x.norm_inf().max(1.0) {
        return Err(Error::NotAntiHermitian(defect));
    }
    let ix = x.scale(C64::new(0.0, 1.0));
    fock::hermitian_eigensystem(&ix)?.map_complex(|mu| C64::new(0.0, -mu).exp())
}

/// `H1~ = a1~^dagger a1~`.
pub fn h_tilde_1(lowering: &TruncatedOperator, raising: &TruncatedOperator) -> Result<TruncatedOperator> {
    raising.matmul(lowering)
}

/// Excited displaced states `|zeta; theta_n>` built two ways.
#[derive(Debug, Clone)]
pub struct GeneralizedCs {
    /// `(D a1~^dagger D^dagger)^(n-1) |zeta; theta_1>`, normalized after every step.
    pub via_ladder: StateVector,
    /// `D |theta_n>`.
    pub via_displacement: StateVector,
}

impl GeneralizedCs {
    pub fn discrepancy(&self) -> Result<f64> {
        self.via_ladder.distance(&self.via_displacement)
    }
}

/// Generalized coherent states for `w_n = 1`, in the basis of `lowering`.
pub fn generalized_cs(
    zeta: C64,
    n: usize,
    lowering: &TruncatedOperator,
    raising: &TruncatedOperator,
) -> Result<GeneralizedCs> {
    let dim = lowering.dim();
    if n < 2 || n + 10 > dim {
        return Err(Error::InvalidParameter(format!("need 2 <= n <= N - 10, got n = {n}, N = {dim}")));
    }
    let tag = lowering.basis();
    let d = displacement_operator(zeta, lowering, raising)?;
    let up = d.matmul(raising)?.matmul(&d.adjoint())?;
    let spec = CsSpec { zeta, weights: WeightSequence::Constant(1.0), n: dim };
    let mut v = cs_vector(&spec, tag)?;
    for _ in 1..n {
        v = up.apply(&v)?.normalized();
    }
    let base = StateVector::basis_state(n, dim, tag)?;
    Ok(GeneralizedCs { via_ladder: v, via_displacement: d.apply(&base)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::interior_dim;

    fn ln_factorial(n: usize) -> f64 {
        (2..=n).map(|k| (k as f64).ln()).sum()
    }

    fn theta() -> BasisTag {
        BasisTag::Theta(2.0)
    }

    #[test]
    fn d_coefficient_examples() {
        let d = d_coefficients(&WeightSequence::Constant(1.0), 30).unwrap();
        for (n, v) in d.iter().enumerate() {
            assert!((v / (-ln_factorial(n)).exp() - 1.0).abs() < 1e-12);
        }
        let w = 2.5;
        let d = d_coefficients(&WeightSequence::Constant(w), 30).unwrap();
        for (n, v) in d.iter().enumerate() {
            let oracle = (-(n as f64) * w.ln() - ln_factorial(n)).exp();
            assert!((v / oracle - 1.0).abs() < 1e-12);
        }
        let d = d_coefficients(&WeightSequence::Linear, 30).unwrap();
        for (n, v) in d.iter().enumerate() {
            let oracle = (n as f64 * 2f64.ln() - ln_factorial(n) - ln_factorial(n + 1)).exp();
            assert!((v / oracle - 1.0).abs() < 1e-12);
        }
        let big = log_d_coefficients(&WeightSequence::Linear, 10_001).unwrap();
        assert!(big[10_000].is_finite());
        match d_coefficients(&WeightSequence::Custom(vec![1.0]), 5) {
            Ok(v) => assert_eq!(v.len(), 5),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn h_examples() {
        for t in [0.0, 0.5, 3.0, 10.0] {
            let h = normalization_h(t, &WeightSequence::Constant(1.0)).unwrap();
            assert!((h / t.exp() - 1.0).abs() < 1e-12);
        }
        let w = 2.0;
        for t in [0.3, 1.0, 1.9] {
            let h = normalization_h(t, &WeightSequence::SingleWeight(w)).unwrap();
            assert!((h - w / (w - t)).abs() < 1e-10 * h);
        }
        assert!(matches!(normalization_h(2.0, &WeightSequence::SingleWeight(2.0)), Err(Error::BeyondRadius { .. })));

        let q: f64 = 0.5;
        let direct: f64 = {
            let mut s = 0.0;
            let mut log_prod = 0.0;
            for n in 0..10_000 {
                if n > 0 {
                    log_prod += (q * (1.0 - q.powi(n as i32)) / (1.0 - q)).ln();
                }
                s += (n as f64 * 0.5f64.ln() - log_prod).exp();
            }
            s
        };
        let h = normalization_h(0.5, &WeightSequence::Geometric(q)).unwrap();
        assert!((h - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn cs_examples() {
        let n = 64;
        let zero = cs_vector(&CsSpec { zeta: C64::new(0.0, 0.0), weights: WeightSequence::Linear, n }, theta()).unwrap();
        assert_eq!(zero, StateVector::basis_state(1, n, theta()).unwrap());

        let zeta = C64::new(1.0, 0.5);
        let cs = cs_vector(&CsSpec { zeta, weights: WeightSequence::Constant(1.0), n }, theta()).unwrap();
        let pre = (-0.5 * zeta.norm_sqr()).exp();
        let mut zp = C64::new(1.0, 0.0);
        for k in 0..n - 1 {
            let oracle = zp * pre * (-0.5 * ln_factorial(k)).exp();
            assert!((cs.coeff(k + 1) - oracle).norm() < 1e-14);
            zp *= zeta;
        }
        let (lo, _) = ladder_matrices_direct(&WeightSequence::Constant(1.0), n, theta()).unwrap();
        let r = lo.apply(&cs).unwrap().sub(&cs.scale(zeta)).unwrap().norm();
        assert!(r < 1e-6);

        let small = CsSpec { zeta: C64::new(4.0, 0.0), weights: WeightSequence::Constant(1.0), n: 16 };
        assert!(matches!(cs_vector(&small, theta()), Err(Error::TruncationTail { .. })));
    }

    #[test]
    fn cs_normalization_over_cases() {
        let cases = [
            WeightSequence::Constant(2.0),
            WeightSequence::Distorted(0.5),
            WeightSequence::Linear,
            WeightSequence::SingleWeight(5.0),
            WeightSequence::Geometric(1.3),
            WeightSequence::Geometric(0.9),
        ];
        let zetas = [C64::new(0.3, -0.2), C64::new(1.0, 0.5), C64::new(-1.2, 1.5)];
        for ws in &cases {
            let radius = radius_of_convergence(ws);
            for &zeta in &zetas {
                if zeta.norm() >= radius {
                    continue;
                }
                let spec = CsSpec { zeta, weights: ws.clone(), n: 96 };
                match cs_vector(&spec, theta()) {
                    Ok(v) => assert!((v.norm() - 1.0).abs() < 1e-10, "{ws:?} {zeta}"),
                    Err(Error::TruncationTail { .. }) => {}
                    Err(e) => panic!("{ws:?} {zeta}: {e}"),
                }
            }
        }
    }

    #[test]
    fn bargmann_examples() {
        let n = 48;
        let ws = WeightSequence::Constant(1.0);
        let samples = [C64::new(0.0, 0.0), C64::new(0.4, -0.3), C64::new(-1.0, 0.8), C64::new(1.5, 0.0), C64::new(0.0, 2.0)];
        let theta1 = StateVector::basis_state(1, n, theta()).unwrap();
        for v in bargmann_transform(&theta1, &ws, &samples).unwrap() {
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-15);
        }

        let z0 = C64::new(0.6, 0.2);
        let cs = cs_vector(&CsSpec { zeta: z0, weights: ws.clone(), n }, theta()).unwrap();
        let got = bargmann_transform(&cs, &ws, &samples).unwrap();
        for (z, g) in samples.iter().zip(&got) {
            let oracle = (z0 * z).exp() * (-0.5 * z0.norm_sqr()).exp();
            assert!((g - oracle).norm() < 1e-10, "{z}");
            let bound = cs.norm() * normalization_h(z.norm_sqr(), &ws).unwrap().sqrt();
            assert!(g.norm() <= bound * (1.0 + 1e-12));
        }

        let lin = WeightSequence::Linear;
        let cs = cs_vector(&CsSpec { zeta: z0, weights: lin.clone(), n }, theta()).unwrap();
        let got = bargmann_transform(&cs, &lin, &samples).unwrap();
        let h0 = normalization_h(z0.norm_sqr(), &lin).unwrap();
        let d = d_coefficients(&lin, n).unwrap();
        for (z, g) in samples.iter().zip(&got) {
            let oracle: C64 = (0..n - 1).map(|k| (z0 * z).powu(k as u32) * d[k]).sum::<C64>() / h0.sqrt();
            assert!((g - oracle).norm() < 1e-12 * oracle.norm().max(1.0));
        }

        let fock_state = StateVector::basis_state(1, n, BasisTag::Fock).unwrap();
        assert!(bargmann_transform(&fock_state, &ws, &samples).is_err());
        let single = WeightSequence::SingleWeight(2.0);
        assert!(matches!(
            bargmann_transform(&theta1, &single, &[C64::new(1.5, 0.0)]),
            Err(Error::BeyondRadius { .. })
        ));
    }

    #[test]
    fn order_examples() {
        for (ws, rho, tol) in [
            (WeightSequence::Constant(1.0), 2.0, 0.02),
            (WeightSequence::Constant(3.0), 2.0, 0.02),
            (WeightSequence::Distorted(0.5), 2.0, 0.02),
            (WeightSequence::Linear, 1.0, 0.02),
            (WeightSequence::Power(0.5), 2.0 / 1.5, 0.05),
            (WeightSequence::Power(2.0), 2.0 / 3.0, 0.05),
            (WeightSequence::Power(3.0), 0.5, 0.05),
        ] {
            let e = order_estimate(&ws).unwrap();
            assert_eq!(e.class, GrowthClass::Entire, "{ws:?}");
            let got = e.rho.unwrap();
            assert!((got - rho).abs() < tol, "{ws:?}: {got}");
            assert!(e.radius.is_infinite());
        }
        let e = order_estimate(&WeightSequence::Geometric(1.2)).unwrap();
        assert_eq!((e.class, e.rho), (GrowthClass::ZeroOrder, Some(0.0)));
        let e = order_estimate(&WeightSequence::Geometric(1.0)).unwrap();
        assert_eq!(e.class, GrowthClass::Entire);
        assert!((e.rho.unwrap() - 2.0).abs() < 0.02);

        let e = order_estimate(&WeightSequence::SingleWeight(2.0)).unwrap();
        assert_eq!(e.class, GrowthClass::NotEntire);
        assert!((e.radius - 2f64.sqrt()).abs() < 1e-3);
        let e = order_estimate(&WeightSequence::Geometric(0.5)).unwrap();
        assert_eq!(e.class, GrowthClass::NotEntire);
        assert!((e.radius - 1.0).abs() < 1e-3);
        assert!(radius_of_convergence(&WeightSequence::Constant(1.0)).is_infinite());
    }

    #[test]
    fn q_factorial_examples() {
        let f = q_factorial(2.0, 3).unwrap();
        assert!((f.product() - 168.0).abs() < 1e-9);
        assert!((f.closed() - 168.0).abs() < 1e-9);
        let f = q_factorial(0.5, 10).unwrap();
        assert!(f.relative_difference() < 1e-12);
        let f = q_factorial(1.0, 6).unwrap();
        assert!((f.product() - 720.0).abs() < 1e-9 && (f.closed() - 720.0).abs() < 1e-9);
        let f = q_factorial(1.3, 2000).unwrap();
        assert!(f.log_product.is_finite() && f.relative_difference() < 1e-9);
        assert!(q_factorial(-1.0, 3).is_err());
    }

    fn w1_pair(n: usize) -> (TruncatedOperator, TruncatedOperator) {
        ladder_matrices_direct(&WeightSequence::Constant(1.0), n, theta()).unwrap()
    }

    #[test]
    fn displacement_examples() {
        let n = 64;
        let (lo, hi) = w1_pair(n);
        let id = TruncatedOperator::identity(n, theta()).unwrap();
        let d0 = displacement_operator(C64::new(0.0, 0.0), &lo, &hi).unwrap();
        assert!(d0.sub(&id).unwrap().norm_inf() < 1e-12);

        let zeta = C64::new(0.7, -0.2);
        let d = displacement_operator(zeta, &lo, &hi).unwrap();
        let unit = d.adjoint().matmul(&d).unwrap().sub(&id).unwrap();
        assert!(unit.window_norm_inf(interior_dim(n)) < 1e-7);
        let theta1 = StateVector::basis_state(1, n, theta()).unwrap();
        let cs = cs_vector(&CsSpec { zeta, weights: WeightSequence::Constant(1.0), n }, theta()).unwrap();
        assert!(d.apply(&theta1).unwrap().distance(&cs).unwrap() < 1e-6);

        let (blo, _) = ladder_matrices_direct(&WeightSequence::Linear, n, theta()).unwrap();
        assert!(matches!(displacement_operator(zeta, &blo, &lo), Err(Error::NotAntiHermitian(_))));
    }

    #[test]
    fn generalized_cs_examples() {
        let n = 64;
        let (lo, hi) = w1_pair(n);
        for k in [2usize, 3] {
            let g = generalized_cs(C64::new(0.0, 0.0), k, &lo, &hi).unwrap();
            let base = StateVector::basis_state(k, n, theta()).unwrap();
            assert!(g.via_ladder.distance(&base).unwrap() < 1e-12);
            assert!(g.via_displacement.distance(&base).unwrap() < 1e-12);
        }
        let zeta = C64::new(0.5, 0.0);
        let states: Vec<StateVector> = (2..=4)
            .map(|k| {
                let g = generalized_cs(zeta, k, &lo, &hi).unwrap();
                assert!(g.discrepancy().unwrap() < 1e-5);
                g.via_displacement
            })
            .collect();
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let t = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b).unwrap() - C64::new(t, 0.0)).norm() < 1e-5);
            }
        }
        assert!(generalized_cs(zeta, 60, &lo, &hi).is_err());
    }

    #[test]
    fn h_tilde_1_examples() {
        let n = 40;
        let (lo, hi) = w1_pair(n);
        let h1 = h_tilde_1(&lo, &hi).unwrap();
        let diag = h1.diagonal_entries();
        assert_eq!(diag[0].re, 0.0);
        assert_eq!(diag[1].re, 0.0);
        for k in 2..n {
            assert!((diag[k].re - (k as f64 - 1.0)).abs() < 1e-12);
        }
        let comm = fock::commutator(&lo, &hi).unwrap();
        for k in 1..interior_dim(n) {
            assert!((comm.entry(k, k).re - 1.0).abs() < 1e-12);
        }
        let zeta = C64::new(0.7, -0.2);
        let d = displacement_operator(zeta, &lo, &hi).unwrap();
        let displaced = d.matmul(&h1).unwrap().matmul(&d.adjoint()).unwrap();
        let cs = cs_vector(&CsSpec { zeta, weights: WeightSequence::Constant(1.0), n }, theta()).unwrap();
        assert!(displaced.apply(&cs).unwrap().norm() < 1e-6);
    }
}
