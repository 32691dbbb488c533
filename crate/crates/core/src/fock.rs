//! Truncated Fock-space linear algebra.
//!
//! Every matrix carries a [`BasisTag`] naming the orthonormal basis its
//! components refer to: `Fock` means entries `<m|X|n>`, `Theta(lambda)` means
//! entries `<theta_m|X|theta_n>`. Arithmetic refuses to mix tags.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Margin kept away from the truncation edge for structural checks.
///
/// Banded operators (a, a†, S and their short products) are exact on
/// indices `n < N - INTERIOR_MARGIN`.
pub const INTERIOR_MARGIN: usize = 5;

/// Number of leading indices unaffected by the truncation edge of banded operators.
pub fn interior_dim(n: usize) -> usize {
    n.saturating_sub(INTERIOR_MARGIN)
}

/// Leading indices on which quantities built from the quadrature matrix `U`
/// are trusted.
///
/// `U` is dense, so the Fock-space leakage of `theta_n` grows steadily towards
/// the edge instead of being confined to a few rows. For `n < N/4` the
/// leakage `1 - sum_m |U_mn|^2` stays below about 1e-9 for the parameter
/// ranges used here.
pub fn quadrature_window(n: usize) -> usize {
    n / 4
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisTag {
    Fock,
    Theta(f64),
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisTag::Fock => write!(f, "Fock"),
            BasisTag::Theta(l) => write!(f, "Theta(lambda={l})"),
        }
    }
}

fn check_tags(a: BasisTag, b: BasisTag) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::BasisMismatch(a, b))
    }
}

/// Dense complex `N x N` matrix tagged with its basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    entries: DMatrix<C64>,
    basis: BasisTag,
}

impl TruncatedOperator {
    pub fn new(entries: DMatrix<C64>, basis: BasisTag) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch(entries.nrows(), entries.ncols()));
        }
        if entries.nrows() < 2 {
            return Err(Error::TruncationTooSmall(entries.nrows(), 2));
        }
        Ok(Self { entries, basis })
    }

    pub fn from_real(entries: &DMatrix<f64>, basis: BasisTag) -> Result<Self> {
        Self::new(entries.map(|v| C64::new(v, 0.0)), basis)
    }

    pub fn identity(n: usize, basis: BasisTag) -> Result<Self> {
        Self::new(DMatrix::identity(n, n), basis)
    }

    pub fn diagonal(values: &[f64], basis: BasisTag) -> Result<Self> {
        let d = DVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0)));
        Self::new(DMatrix::from_diagonal(&d), basis)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    /// Same entries, different basis label. Only meaningful when the caller
    /// knows the components coincide (e.g. a direct fill in either basis).
    pub fn retag(mut self, basis: BasisTag) -> Self {
        self.basis = basis;
        self
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        check_tags(self.basis, other.basis)?;
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self { entries: &self.entries * &other.entries, basis: self.basis })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self { entries: &self.entries + &other.entries, basis: self.basis })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self { entries: &self.entries - &other.entries, basis: self.basis })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { entries: &self.entries * c, basis: self.basis }
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint(), basis: self.basis }
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        check_tags(self.basis, v.basis)?;
        if self.dim() != v.dim() {
            return Err(Error::DimensionMismatch(self.dim(), v.dim()));
        }
        Ok(StateVector { coeffs: &self.entries * &v.coeffs, basis: self.basis })
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.window_norm_inf(self.dim())
    }

    /// Max absolute row sum of the leading `k x k` block.
    pub fn window_norm_inf(&self, k: usize) -> f64 {
        let k = k.min(self.dim());
        (0..k)
            .map(|i| (0..k).map(|j| self.entries[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus in the leading `k x k` block.
    pub fn window_max_abs(&self, k: usize) -> f64 {
        let k = k.min(self.dim());
        let mut m: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                m = m.max(self.entries[(i, j)].norm());
            }
        }
        m
    }

    /// `max |X - X^dagger|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |X + X^dagger|` over all entries.
    pub fn anti_hermiticity_defect(&self) -> f64 {
        (&self.entries + self.entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Diagonal entries as complex numbers.
    pub fn diagonal_entries(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.entries[(i, i)]).collect()
    }
}

pub fn commutator(x: &TruncatedOperator, y: &TruncatedOperator) -> Result<TruncatedOperator> {
    x.matmul(y)?.sub(&y.matmul(x)?)
}

pub fn adjoint(x: &TruncatedOperator) -> TruncatedOperator {
    x.adjoint()
}

pub fn op_norm_inf(x: &TruncatedOperator) -> f64 {
    x.norm_inf()
}

/// Standard lowering operator with `<n-1|a|n> = sqrt(n)`.
pub fn annihilation_matrix(n: usize) -> Result<TruncatedOperator> {
    if n < 2 {
        return Err(Error::TruncationTooSmall(n, 2));
    }
    let mut m = DMatrix::zeros(n, n);
    for k in 1..n {
        m[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    TruncatedOperator::new(m, BasisTag::Fock)
}

pub fn creation_matrix(n: usize) -> Result<TruncatedOperator> {
    Ok(annihilation_matrix(n)?.adjoint())
}

/// `H = a^dagger a = diag(0, 1, ..., N-1)`.
pub fn number_matrix(n: usize) -> Result<TruncatedOperator> {
    if n < 2 {
        return Err(Error::TruncationTooSmall(n, 2));
    }
    let values: Vec<f64> = (0..n).map(|k| k as f64).collect();
    TruncatedOperator::diagonal(&values, BasisTag::Fock)
}

/// Complex coefficient vector in a tagged basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    coeffs: DVector<C64>,
    basis: BasisTag,
}

impl StateVector {
    pub fn new(coeffs: DVector<C64>, basis: BasisTag) -> Self {
        Self { coeffs, basis }
    }

    pub fn from_vec(coeffs: Vec<C64>, basis: BasisTag) -> Self {
        Self { coeffs: DVector::from_vec(coeffs), basis }
    }

    /// Unit vector along basis index `index`.
    pub fn basis_state(index: usize, n: usize, basis: BasisTag) -> Result<Self> {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, available: n });
        }
        let mut coeffs = DVector::zeros(n);
        coeffs[index] = C64::new(1.0, 0.0);
        Ok(Self { coeffs, basis })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn coeffs(&self) -> &DVector<C64> {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> C64 {
        self.coeffs[i]
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self { coeffs: &self.coeffs / C64::new(n, 0.0), basis: self.basis }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { coeffs: &self.coeffs * c, basis: self.basis }
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Result<C64> {
        check_tags(self.basis, other.basis)?;
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.coeffs.dotc(&other.coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_tags(self.basis, other.basis)?;
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(Self { coeffs: &self.coeffs - &other.coeffs, basis: self.basis })
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }
}

/// Eigen-decomposition `X = V diag(mu) V^dagger` with ascending `mu`.
#[derive(Debug, Clone)]
pub struct HermitianEigensystem {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
    pub basis: BasisTag,
}

const HERMITIAN_TOLERANCE: f64 = 1e-10;

pub fn hermitian_eigensystem(x: &TruncatedOperator) -> Result<HermitianEigensystem> {
    let scale = x.norm_inf().max(1.0);
    let defect = x.hermiticity_defect();
    if defect > HERMITIAN_TOLERANCE * scale {
        return Err(Error::NotHermitian(defect));
    }
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = (x.entries() + x.entries().adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let n = x.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut vectors = DMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        values.push(eig.eigenvalues[k]);
        let v = eig.eigenvectors.column(k);
        // Phase: largest-magnitude component real positive.
        let pivot = v.iter().copied().fold(C64::new(0.0, 0.0), |best, z| {
            if z.norm() > best.norm() {
                z
            } else {
                best
            }
        });
        let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { C64::new(1.0, 0.0) };
        for r in 0..n {
            vectors[(r, col)] = v[r] * phase;
        }
    }
    Ok(HermitianEigensystem { values, vectors, basis: x.basis() })
}

impl HermitianEigensystem {
    /// `V diag(g(mu)) V^dagger`, complex-valued `g`.
    pub fn map_complex(&self, g: impl Fn(f64) -> C64) -> Result<TruncatedOperator> {
        let mut diag = Vec::with_capacity(self.values.len());
        for &mu in &self.values {
            let v = g(mu);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::SpectralFunctionUndefined(mu));
            }
            diag.push(v);
        }
        let d = DMatrix::from_diagonal(&DVector::from_vec(diag));
        TruncatedOperator::new(&self.vectors * d * self.vectors.adjoint(), self.basis)
    }
}

/// `g(X) = V diag(g(mu)) V^dagger` for Hermitian `X`.
pub fn apply_spectral_function(
    x: &TruncatedOperator,
    g: impl Fn(f64) -> f64,
) -> Result<TruncatedOperator> {
    hermitian_eigensystem(x)?.map_complex(|mu| C64::new(g(mu), 0.0))
}
