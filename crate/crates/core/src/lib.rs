//! Ladder operators, coherent states and pseudo-differential expansions for
//! the isospectral oscillator family `H~ = b^dagger b`.
//!
//! Operators live on a truncated Fock space as complex matrices tagged with
//! the basis their components refer to. The isospectral basis `theta_n` is
//! sampled on a quadrature grid and connected to the Fock basis through the
//! unitary `U`.

pub mod coherent;
pub mod error;
pub mod fock;
pub mod isospectral;
pub mod ladder;
pub mod numerics;
pub mod pseudodiff;
pub mod verify;

pub use coherent::{CsSpec, GrowthClass, OrderEstimate};
pub use error::{Error, Result};
pub use fock::{BasisTag, StateVector, TruncatedOperator, C64};
pub use isospectral::{IsospectralOperators, IsospectralParams, ThetaBasis};
pub use ladder::{ClosedFormCase, WeightSequence};
pub use numerics::QuadratureGrid;
pub use pseudodiff::PdoSeries;
