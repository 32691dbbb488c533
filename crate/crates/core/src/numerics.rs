//! Special functions and quadrature used by every position-space computation.
//!
//! Everything here is deterministic: grids have a fixed node count derived
//! from the truncation size, so repeated runs reproduce the same sums.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// `2 / sqrt(pi)`
const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Switch point between the power series and the continued fraction.
const ERF_SERIES_LIMIT: f64 = 3.0;

/// Step used for central first differences of sampled functions.
pub const FD_STEP: f64 = 1e-5;

/// Error function, accurate to about 1e-15 absolute over the real line.
///
/// For `|x| <= 3` the all-positive series
/// `erf(x) = 2/sqrt(pi) * exp(-x^2) * sum 2^k x^(2k+1) / (2k+1)!!` is summed;
/// beyond that `1 - erfc(|x|)` with `erfc` from its continued fraction.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    let ax = x.abs();
    let value = if ax <= ERF_SERIES_LIMIT {
        erf_series(ax)
    } else {
        1.0 - erfc_continued_fraction(ax)
    };
    value.copysign(x)
}

/// Complementary error function `1 - erf(x)`.
///
/// Uses the continued fraction for `x > 3` so the tail keeps full relative
/// precision; callers that need `lambda + erf` close to cancellation rely on it.
pub fn erfc(x: f64) -> f64 {
    if x > ERF_SERIES_LIMIT {
        erfc_continued_fraction(x)
    } else if x < -ERF_SERIES_LIMIT {
        2.0 - erfc_continued_fraction(-x)
    } else {
        1.0 - erf(x)
    }
}

fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= 2.0 * x2 / (2.0 * k + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    TWO_OVER_SQRT_PI * (-x2).exp() * sum
}

/// `erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`,
/// evaluated with the modified Lentz algorithm. Only called for `x > 3`.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..500 {
        let a = n as f64 * 0.5;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// Normalized oscillator eigenfunction `psi_n(x)` by the stable three-term
/// recurrence `psi_{n+1} = x sqrt(2/(n+1)) psi_n - sqrt(n/(n+1)) psi_{n-1}`.
pub fn hermite_function(n: i64, x: f64) -> Result<f64> {
    if n < 0 {
        return Err(Error::NegativeIndex(n));
    }
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n as usize {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// All `psi_0 .. psi_max_index` at one abscissa.
pub fn hermite_functions_upto(max_index: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_index + 1);
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(cur);
    for k in 0..max_index {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Composite trapezoid grid on a symmetric window `[-L, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    points: Vec<f64>,
    weights: Vec<f64>,
    half_width: f64,
}

impl QuadratureGrid {
    /// Grid for truncation size `n`: `L = sqrt(2n) + 8`, `max(4000, 40 n)` nodes.
    pub fn for_truncation(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::TruncationTooSmall(n, 8));
        }
        let half_width = (2.0 * n as f64).sqrt() + 8.0;
        Self::trapezoid(half_width, (40 * n).max(4000))
    }

    /// Equally spaced trapezoid rule with `nodes` points including both ends.
    pub fn trapezoid(half_width: f64, nodes: usize) -> Result<Self> {
        if nodes < 3 || !(half_width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "trapezoid grid needs >= 3 nodes and a positive half width (got {nodes}, {half_width})"
            )));
        }
        let h = 2.0 * half_width / (nodes - 1) as f64;
        // Fill from both ends so x_j = -x_{n-1-j} holds bit for bit.
        let mut points = vec![0.0; nodes];
        for j in 0..nodes.div_ceil(2) {
            let x = -half_width + j as f64 * h;
            points[j] = x;
            points[nodes - 1 - j] = -x;
        }
        if nodes % 2 == 1 {
            points[nodes / 2] = 0.0;
        }
        let mut weights = vec![h; nodes];
        weights[0] = 0.5 * h;
        weights[nodes - 1] = 0.5 * h;
        Ok(Self { points, weights, half_width })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn node_count(&self) -> usize {
        self.points.len()
    }

    /// Samples `f` at every grid point.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.points.iter().map(|&x| f(x)).collect()
    }

    /// `sum_j w_j f(x_j)`
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `sum_j w_j f(x_j) g(x_j)` for functions already sampled on `grid`.
pub fn inner_product(f: &[f64], g: &[f64], grid: &QuadratureGrid) -> Result<f64> {
    let n = grid.node_count();
    for len in [f.len(), g.len()] {
        if len != n {
            return Err(Error::SampleLength { expected: n, found: len });
        }
    }
    Ok(f.iter().zip(g).zip(grid.weights()).map(|((a, b), w)| w * a * b).sum())
}

/// `psi_n(x_j)` for `n <= max_index` on every grid point (rows are `n`).
#[derive(Debug, Clone)]
pub struct HermiteFunctionTable {
    values: DMatrix<f64>,
}

impl HermiteFunctionTable {
    pub fn new(max_index: usize, grid: &QuadratureGrid) -> Self {
        let mut values = DMatrix::zeros(max_index + 1, grid.node_count());
        for (j, &x) in grid.points().iter().enumerate() {
            for (n, v) in hermite_functions_upto(max_index, x).into_iter().enumerate() {
                values[(n, j)] = v;
            }
        }
        Self { values }
    }

    pub fn max_index(&self) -> usize {
        self.values.nrows() - 1
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Samples of `psi_n` as a contiguous vector.
    pub fn row(&self, n: usize) -> Vec<f64> {
        self.values.row(n).iter().copied().collect()
    }
}

/// Gauss-Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = mid - half * z;
        nodes[n - 1 - i] = mid + half * z;
        weights[i] = half * w;
        weights[n - 1 - i] = half * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (z * p1 - p0) / (z * z - 1.0))
}

/// Central first difference with step `h`.
pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
