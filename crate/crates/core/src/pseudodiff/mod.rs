//! Formal pseudo-differential calculus in `d = d/dx` and `d^-1`.
//!
//! Coefficients are polynomials in `x` and `phi` with exact rational
//! coefficients; `phi'` never appears because differentiation reduces it
//! through the Riccati relation. Scalars outside the rationals (`i`,
//! `sqrt(2)`, half-powers of `w` and `q`) are carried separately as
//! [`SymbolicScalar`] prefactors, and the ladder expansions are computed for
//! `sqrt(2)`-rescaled operators so that every coefficient stays rational.

mod expansions;
mod poly;
mod scalar;
mod series;

pub use expansions::{
    b_dagger_times_b, classical_limit_check, expand_ladder_case_ii, inverse_sqrt_one_plus_h, lowering_b,
    number_operator, product_identities, raising_b, ClassicalLimitReport, LadderExpansion, ProductIdentityReport,
    DEFAULT_DEPTH,
};
pub use poly::{int, rat, rat_from_f64, CoeffPoly};
pub use scalar::SymbolicScalar;
pub use series::{binomial, commute_dinvr_f, compose_dinv_f, PdoSeries};
