//! The one-parameter isospectral family built on the Riccati solution
//! `phi_lambda(x) = exp(-x^2) / (lambda + int_0^x exp(-y^2) dy)`.
//!
//! Position-space objects (`phi`, `theta_n`) are evaluated in closed form;
//! matrix objects are Fock-basis truncations assembled from quadrature
//! overlaps `U_mn = <psi_m, theta_n>`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{self, BasisTag, StateVector, TruncatedOperator, C64};
use crate::numerics::{self, central_difference, HermiteFunctionTable, QuadratureGrid, FD_STEP};

const SQRT_PI_OVER_2: f64 = 0.886_226_925_452_758;
const LAMBDA_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsospectralParams {
    lambda: f64,
}

impl IsospectralParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda.abs() <= SQRT_PI_OVER_2 + LAMBDA_GUARD {
            return Err(Error::ForbiddenLambda(lambda));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn tag(&self) -> BasisTag {
        BasisTag::Theta(self.lambda)
    }

    /// `lambda + (sqrt(pi)/2) erf(x)`, using `erfc` on the side where the two
    /// terms nearly cancel.
    pub fn denominator(&self, x: f64) -> f64 {
        let l = self.lambda;
        if x < 0.0 {
            (l - SQRT_PI_OVER_2) + SQRT_PI_OVER_2 * numerics::erfc(-x)
        } else {
            (l + SQRT_PI_OVER_2) - SQRT_PI_OVER_2 * numerics::erfc(x)
        }
    }

    pub fn phi(&self, x: f64) -> f64 {
        (-x * x).exp() / self.denominator(x)
    }

    /// `phi' = -2 x phi - phi^2`, exact by the Riccati equation.
    pub fn phi_prime(&self, x: f64) -> f64 {
        let p = self.phi(x);
        -2.0 * x * p - p * p
    }
}

pub fn phi_lambda(x: f64, p: &IsospectralParams) -> f64 {
    p.phi(x)
}

/// `max_j |f'(x_j) + 2 x_j f(x_j) + f(x_j)^2|` with `f'` from central differences.
pub fn riccati_residual_of(f: impl Fn(f64) -> f64, grid: &QuadratureGrid) -> f64 {
    grid.points()
        .iter()
        .map(|&x| {
            let v = f(x);
            (central_difference(&f, x, FD_STEP) + 2.0 * x * v + v * v).abs()
        })
        .fold(0.0, f64::max)
}

pub fn riccati_residual(p: &IsospectralParams, grid: &QuadratureGrid) -> f64 {
    riccati_residual_of(|x| p.phi(x), grid)
}

/// Closed form `((lambda^2 - pi/4)/sqrt(pi))^(1/2)` of the ground-state normalization.
pub fn theta0_normalization_closed_form(p: &IsospectralParams) -> f64 {
    ((p.lambda * p.lambda - PI / 4.0) / PI.sqrt()).sqrt()
}

/// Sampled isospectral eigenfunctions `theta_0 .. theta_{N-1}`.
#[derive(Debug, Clone)]
pub struct ThetaBasis {
    params: IsospectralParams,
    grid: QuadratureGrid,
    n: usize,
    norm0: f64,
    psi: HermiteFunctionTable,
    theta: DMatrix<f64>,
}

impl ThetaBasis {
    pub fn new(params: IsospectralParams, grid: QuadratureGrid, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TruncationTooSmall(n, 2));
        }
        let psi = HermiteFunctionTable::new(n, &grid);
        let sign = params.lambda.signum();
        let unnormalized = grid.integrate(|x| {
            let g = params.denominator(x);
            (-x * x).exp() / (g * g)
        });
        let norm0 = unnormalized.powf(-0.5);

        let m = grid.node_count();
        let mut theta = DMatrix::zeros(n, m);
        for (j, &x) in grid.points().iter().enumerate() {
            let phi = params.phi(x);
            theta[(0, j)] = norm0 * sign * (-0.5 * x * x).exp() / params.denominator(x);
            for k in 1..n {
                theta[(k, j)] = psi.values()[(k, j)] + phi * psi.values()[(k - 1, j)] / (2.0 * k as f64).sqrt();
            }
        }
        Ok(Self { params, grid, n, norm0, psi, theta })
    }

    pub fn params(&self) -> &IsospectralParams {
        &self.params
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn tag(&self) -> BasisTag {
        self.params.tag()
    }

    /// Quadrature value of the ground-state normalization constant.
    pub fn theta0_normalization(&self) -> f64 {
        self.norm0
    }

    pub fn psi_table(&self) -> &HermiteFunctionTable {
        &self.psi
    }

    /// `theta_k(x_j)`, rows indexed by `k`.
    pub fn samples(&self) -> &DMatrix<f64> {
        &self.theta
    }

    pub fn theta_row(&self, k: usize) -> Vec<f64> {
        self.theta.row(k).iter().copied().collect()
    }

    /// `theta_k` at an arbitrary point.
    pub fn theta(&self, k: usize, x: f64) -> f64 {
        let p = &self.params;
        if k == 0 {
            return self.norm0 * p.lambda.signum() * (-0.5 * x * x).exp() / p.denominator(x);
        }
        let psi = numerics::hermite_functions_upto(k, x);
        psi[k] + p.phi(x) * psi[k - 1] / (2.0 * k as f64).sqrt()
    }

    /// `(b f)(x) = (x f + f' + phi f)/sqrt(2)` with a central-difference `f'`.
    pub fn apply_b(&self, f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let v = f(x);
        (x * v + central_difference(&f, x, FD_STEP) + self.params.phi(x) * v) / 2f64.sqrt()
    }

    /// `(b^dagger f)(x) = (x f - f' + phi f)/sqrt(2)`.
    pub fn apply_b_dagger(&self, f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let v = f(x);
        (x * v - central_difference(&f, x, FD_STEP) + self.params.phi(x) * v) / 2f64.sqrt()
    }

    /// `<theta_m, theta_n>` by quadrature for `m, n < N`.
    pub fn gram(&self) -> DMatrix<f64> {
        let weighted = self.weighted(&self.theta);
        weighted * self.theta.transpose()
    }

    fn weighted(&self, rows: &DMatrix<f64>) -> DMatrix<f64> {
        let mut w = rows.clone();
        for (j, wt) in self.grid.weights().iter().enumerate() {
            w.column_mut(j).scale_mut(*wt);
        }
        w
    }

    /// `<theta_m | H - phi' | theta_n>` by quadrature, with the kinetic part
    /// integrated by parts: `(1/2) int theta_m' theta_n' + (1/2) int (x^2 - 1) theta_m theta_n`.
    pub fn h_tilde_position_matrix(&self, k: usize) -> DMatrix<f64> {
        let k = k.min(self.n);
        let pts = self.grid.points();
        let mut deriv = DMatrix::zeros(k, pts.len());
        for (j, &x) in pts.iter().enumerate() {
            for m in 0..k {
                deriv[(m, j)] = central_difference(|y| self.theta(m, y), x, FD_STEP);
            }
        }
        let rows = self.theta.rows(0, k).into_owned();
        let mut potential = rows.clone();
        for (j, &x) in pts.iter().enumerate() {
            let v = 0.5 * (x * x - 1.0) - self.params.phi_prime(x);
            potential.column_mut(j).scale_mut(v);
        }
        let kinetic = self.weighted(&deriv) * deriv.transpose() * 0.5;
        kinetic + self.weighted(&potential) * rows.transpose()
    }
}

pub fn theta_wavefunctions(p: IsospectralParams, grid: QuadratureGrid, n: usize) -> Result<ThetaBasis> {
    ThetaBasis::new(p, grid, n)
}

/// `U_mn = <psi_m, theta_n>` (Fock components).
pub fn u_matrix(basis: &ThetaBasis) -> TruncatedOperator {
    let n = basis.dim();
    let psi = basis.psi.values().rows(0, n).into_owned();
    let u = basis.weighted(&psi) * basis.theta.transpose();
    TruncatedOperator::from_real(&u, BasisTag::Fock).expect("square matrix of size >= 2")
}

/// The standard and isospectral operators for one `lambda`, all in Fock components.
#[derive(Debug, Clone)]
pub struct IsospectralOperators {
    pub u: TruncatedOperator,
    pub a: TruncatedOperator,
    pub b: TruncatedOperator,
    pub b_dagger: TruncatedOperator,
    pub h: TruncatedOperator,
    pub h_tilde: TruncatedOperator,
    theta_tag: BasisTag,
}

impl IsospectralOperators {
    pub fn new(basis: &ThetaBasis) -> Result<Self> {
        let n = basis.dim();
        let u = u_matrix(basis);
        let a = fock::annihilation_matrix(n)?;
        let b = a.matmul(&u.adjoint())?;
        let b_dagger = u.matmul(&a.adjoint())?;
        let h = fock::number_matrix(n)?;
        let h_tilde = b_dagger.matmul(&b)?;
        Ok(Self { u, a, b, b_dagger, h, h_tilde, theta_tag: basis.tag() })
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn theta_tag(&self) -> BasisTag {
        self.theta_tag
    }

    /// `<theta_m|X|theta_n> = (U^dagger X U)_mn`
    pub fn to_theta_components(&self, x: &TruncatedOperator) -> Result<TruncatedOperator> {
        let y = self.u.adjoint().matmul(x)?.matmul(&self.u)?;
        Ok(y.retag(self.theta_tag))
    }

    /// Inverse of [`Self::to_theta_components`]: `U X U^dagger`.
    pub fn to_fock_components(&self, x: &TruncatedOperator) -> Result<TruncatedOperator> {
        let x = x.clone();
        if x.basis() != self.theta_tag {
            return Err(Error::BasisMismatch(x.basis(), self.theta_tag));
        }
        let x = x.retag(BasisTag::Fock);
        self.u.matmul(&x)?.matmul(&self.u.adjoint())
    }

    pub fn state_to_fock(&self, v: &StateVector) -> Result<StateVector> {
        if v.basis() != self.theta_tag {
            return Err(Error::BasisMismatch(v.basis(), self.theta_tag));
        }
        let v = StateVector::new(v.coeffs().clone(), BasisTag::Fock);
        self.u.apply(&v)
    }

    /// `A = b^dagger a b`, in Fock components.
    pub fn fernandez_lowering_fock(&self) -> Result<TruncatedOperator> {
        self.b_dagger.matmul(&self.a)?.matmul(&self.b)
    }
}

pub fn b_matrix(basis: &ThetaBasis) -> Result<TruncatedOperator> {
    Ok(IsospectralOperators::new(basis)?.b)
}

pub fn b_dagger_matrix(basis: &ThetaBasis) -> Result<TruncatedOperator> {
    Ok(IsospectralOperators::new(basis)?.b_dagger)
}

/// `H~ = b^dagger b` in Fock components.
pub fn h_tilde_matrix(basis: &ThetaBasis) -> Result<TruncatedOperator> {
    Ok(IsospectralOperators::new(basis)?.h_tilde)
}

/// `A = b^dagger a b` in Theta components; ideally `sum_{n>=2} (n-1) sqrt(n) |theta_{n-1}><theta_n|`.
pub fn a_fernandez_matrix(basis: &ThetaBasis) -> Result<TruncatedOperator> {
    let ops = IsospectralOperators::new(basis)?;
    ops.to_theta_components(&ops.fernandez_lowering_fock()?)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

const CS_TAIL_LIMIT: f64 = 1e-14;

/// Eigenstates of `A`: normalized `sum_n z^n / (n! sqrt((n+1)!)) theta_{n+1}`.
pub fn fernandez_cs(z: C64, basis: &ThetaBasis) -> Result<StateVector> {
    let n = basis.dim();
    let log_tail = n as f64 * z.norm().ln() - ln_factorial(n) - 0.5 * ln_factorial(n + 1);
    let tail = log_tail.exp();
    if z.norm() > 0.0 && tail >= CS_TAIL_LIMIT {
        return Err(Error::TruncationTail { tail, allowed: CS_TAIL_LIMIT });
    }
    let mut coeffs = vec![C64::new(0.0, 0.0); n];
    let mut zp = C64::new(1.0, 0.0);
    for k in 0..n - 1 {
        let mag = (-(ln_factorial(k) + 0.5 * ln_factorial(k + 1))).exp();
        coeffs[k + 1] = zp * mag;
        zp *= z;
    }
    Ok(StateVector::from_vec(coeffs, basis.tag()).normalized())
}

/// Standard oscillator coherent state `e^{-|alpha|^2/2} sum alpha^n/sqrt(n!) |n>` in a tagged basis.
pub fn oscillator_cs(alpha: C64, n: usize, tag: BasisTag) -> Result<StateVector> {
    let log_tail = -0.5 * alpha.norm_sqr() + n as f64 * alpha.norm().ln() - 0.5 * ln_factorial(n);
    let tail = log_tail.exp();
    if alpha.norm() > 0.0 && tail >= CS_TAIL_LIMIT {
        return Err(Error::TruncationTail { tail, allowed: CS_TAIL_LIMIT });
    }
    let pre = (-0.5 * alpha.norm_sqr()).exp();
    let mut coeffs = Vec::with_capacity(n);
    let mut ap = C64::new(1.0, 0.0);
    for k in 0..n {
        coeffs.push(ap * pre * (-0.5 * ln_factorial(k)).exp());
        ap *= alpha;
    }
    Ok(StateVector::from_vec(coeffs, tag))
}

/// `e^{-|alpha|^2/2} sum alpha^n/sqrt(n!) theta_n` in Theta components.
pub fn kumar_khare_cs(alpha: C64, basis: &ThetaBasis) -> Result<StateVector> {
    oscillator_cs(alpha, basis.dim(), basis.tag())
}
