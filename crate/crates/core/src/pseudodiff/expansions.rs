use num_rational::BigRational;

use super::poly::{int, rat, CoeffPoly};
use super::scalar::SymbolicScalar;
use super::series::PdoSeries;
use crate::error::{Error, Result};

/// Default number of negative orders retained in reported expansions.
pub const DEFAULT_DEPTH: usize = 6;

/// Extra orders carried internally so that products of truncated factors
/// still resolve every retained order.
const GUARD_ORDERS: usize = 4;

fn poly(terms: &[((u32, u32), BigRational)]) -> CoeffPoly {
    CoeffPoly::from_terms(terms.iter().cloned())
}

fn optional_phi(with_phi: bool) -> CoeffPoly {
    if with_phi {
        CoeffPoly::phi()
    } else {
        CoeffPoly::zero()
    }
}

/// `sqrt(2) b = x + d + phi` (or `x + d` without `phi`).
fn scaled_b(with_phi: bool) -> PdoSeries {
    PdoSeries::from_terms([(1, CoeffPoly::one()), (0, &CoeffPoly::x() + &optional_phi(with_phi))])
}

/// `sqrt(2) b^dagger = x - d + phi`.
fn scaled_b_dagger(with_phi: bool) -> PdoSeries {
    PdoSeries::from_terms([(1, CoeffPoly::constant(int(-1))), (0, &CoeffPoly::x() + &optional_phi(with_phi))])
}

/// `sqrt(2) b`; `b` itself carries an irrational `2^(-1/2)`.
pub fn lowering_b() -> PdoSeries {
    scaled_b(true)
}

/// `sqrt(2) b^dagger`.
pub fn raising_b() -> PdoSeries {
    scaled_b_dagger(true)
}

/// `H + shift = (x^2 - d^2 - 1)/2 + shift`.
fn shifted_h(shift: BigRational) -> PdoSeries {
    PdoSeries::from_terms([
        (2, CoeffPoly::constant(rat(-1, 2))),
        (0, poly(&[((2, 0), rat(1, 2)), ((0, 0), rat(-1, 2) + shift)])),
    ])
}

/// `H = (x^2 - d^2 - 1)/2`.
pub fn number_operator() -> PdoSeries {
    shifted_h(int(0))
}

/// `b^dagger b = (1/2)(sqrt(2) b^dagger)(sqrt(2) b)`, exact.
pub fn b_dagger_times_b() -> PdoSeries {
    scaled_b_dagger(true).multiply(&scaled_b(true), 0).scale(&rat(1, 2))
}

/// `(1 + H)^(-1/2) = c Q` with `c = -sqrt(2) i` and `Q = (d^2 - x^2 - 1)^(-1/2)`.
pub fn inverse_sqrt_one_plus_h(depth: usize) -> Result<(SymbolicScalar, PdoSeries)> {
    let prefactor = SymbolicScalar::integer(-1) * SymbolicScalar::sqrt2() * SymbolicScalar::i();
    let d = (depth + GUARD_ORDERS) as i64;
    let a = PdoSeries::from_terms([(2, CoeffPoly::one()), (0, poly(&[((2, 0), int(-1)), ((0, 0), int(-1))]))]);
    let q = a.invert(d)?.sqrt(d)?;
    Ok((prefactor, q.truncate_below(-(depth as i64))))
}

/// Formal expansions of `sqrt(2) a1~` and `sqrt(2) a1~^dagger` for the weights
/// `w_1 = w`, `w_n = 1` (n >= 2).
#[derive(Debug, Clone)]
pub struct LadderExpansion {
    pub w: BigRational,
    pub depth: usize,
    /// `sqrt(2) a1~`
    pub lowering: PdoSeries,
    /// `sqrt(2) a1~^dagger`
    pub raising: PdoSeries,
}

impl LadderExpansion {
    /// The leading terms in closed form:
    /// `x + d - (w - 2 - phi') d^-1 + [x(2-w) + phi phi' + x phi' + 2 phi] d^-2` and
    /// `x - d + (w - 2 - phi') d^-1 + [x(2-w) - x phi' - phi phi'] d^-2`,
    /// with `phi'` reduced.
    pub fn leading_terms_closed_form(w: &BigRational) -> (PdoSeries, PdoSeries) {
        let pp = CoeffPoly::phi_prime();
        let x = CoeffPoly::x();
        let phi = CoeffPoly::phi();
        let w_minus_2_minus_pp = &CoeffPoly::constant(w - int(2)) - &pp;
        let x_2_minus_w = x.scale(&(int(2) - w));
        let low_m2 = &(&(&x_2_minus_w + &(&phi * &pp)) + &(&x * &pp)) + &phi.scale(&int(2));
        let high_m2 = &(&x_2_minus_w - &(&x * &pp)) - &(&phi * &pp);
        let low = PdoSeries::from_terms([(1, CoeffPoly::one()), (0, x.clone()), (-1, -&w_minus_2_minus_pp), (-2, low_m2)]);
        let high = PdoSeries::from_terms([(1, CoeffPoly::constant(int(-1))), (0, x), (-1, w_minus_2_minus_pp), (-2, high_m2)]);
        (low.truncate_below(-2), high.truncate_below(-2))
    }
}

fn build_case_ii(w: &BigRational, depth: usize, with_phi: bool) -> Result<LadderExpansion> {
    let d = (depth + GUARD_ORDERS) as i64;
    let half = rat(1, 2);
    // f(H) = (H+1)^(-1) ((H+w)(H+2)^(-1))^(1/2)
    let inv_h1 = shifted_h(int(1)).invert(d)?;
    let ratio = shifted_h(w.clone()).multiply(&shifted_h(int(2)).invert(d)?, d);
    let f = inv_h1.multiply(&ratio.sqrt(d)?, d);
    let plus = PdoSeries::from_terms([(1, CoeffPoly::one()), (0, CoeffPoly::x())]);
    let minus = PdoSeries::from_terms([(1, CoeffPoly::constant(int(-1))), (0, CoeffPoly::x())]);
    let bd = scaled_b_dagger(with_phi);
    let b = scaled_b(with_phi);
    // sqrt(2) b^dagger f(H) a b = (1/2) (sqrt2 b^dagger) f (sqrt2 a) (sqrt2 b)
    let lowering = bd.multiply(&f, d).multiply(&plus, d).multiply(&b, d).scale(&half);
    // sqrt(2) b^dagger a^dagger f(H) b
    let raising = bd.multiply(&minus, d).multiply(&f, d).multiply(&b, d).scale(&half);
    let cut = -(depth as i64);
    for s in [&lowering, &raising] {
        if s.floor().is_some_and(|fl| fl > cut) {
            return Err(Error::Series(format!("expansion only resolved down to order {:?}", s.floor())));
        }
    }
    Ok(LadderExpansion {
        w: w.clone(),
        depth,
        lowering: lowering.truncate_below(cut),
        raising: raising.truncate_below(cut),
    })
}

/// Expands `b^dagger f(H) a b` with `f(H) = (H+1)^(-1) ((H+w)/(H+2))^(1/2)` and
/// its adjoint, keeping orders down to `d^-depth`.
pub fn expand_ladder_case_ii(w: &BigRational, depth: usize) -> Result<LadderExpansion> {
    if depth < 4 {
        return Err(Error::Series(format!("depth {depth} is too shallow; need at least 4")));
    }
    build_case_ii(w, depth, true)
}

/// Residuals of `a1~ a1~^dagger = (1/2)(-d^2 + x^2 + 2w - 3) - phi'` and
/// `a1~^dagger a1~ = (1/2)(-d^2 + x^2 + 2w - 5) - phi'`.
#[derive(Debug, Clone)]
pub struct ProductIdentityReport {
    pub lowering_raising: PdoSeries,
    pub raising_lowering: PdoSeries,
    /// Lowest order at which both residuals are resolved.
    pub resolved_to: i64,
}

impl ProductIdentityReport {
    pub fn holds(&self) -> bool {
        self.lowering_raising.is_zero() && self.raising_lowering.is_zero()
    }
}

pub fn product_identities(w: &BigRational, depth: usize) -> Result<ProductIdentityReport> {
    let e = expand_ladder_case_ii(w, depth)?;
    let d = depth as i64;
    let target = |c: i64| {
        PdoSeries::from_terms([
            (2, CoeffPoly::constant(rat(-1, 2))),
            (0, &poly(&[((2, 0), rat(1, 2)), ((0, 0), w + rat(c, 2))]) - &CoeffPoly::phi_prime()),
        ])
    };
    let half = rat(1, 2);
    let lr = e.lowering.multiply(&e.raising, d).scale(&half).sub(&target(-3));
    let rl = e.raising.multiply(&e.lowering, d).scale(&half).sub(&target(-5));
    let resolved_to = lr.floor().unwrap_or(-d).max(rl.floor().unwrap_or(-d));
    Ok(ProductIdentityReport { lowering_raising: lr, raising_lowering: rl, resolved_to })
}

/// Behaviour of the expansions when `phi` and its derivatives are set to zero.
#[derive(Debug, Clone)]
pub struct ClassicalLimitReport {
    /// `sqrt(2) a1~` at `w = 1` with `phi -> 0`.
    pub lowering_w1: PdoSeries,
    /// Substituting `phi -> 0` agrees with expanding the `phi`-free operators directly.
    pub substitution_consistent: bool,
    /// `sqrt(2) b` reduces to `x + d`.
    pub b_reduces_to_a: bool,
    /// `b^dagger b` reduces to `H`.
    pub h_tilde_reduces_to_h: bool,
}

impl ClassicalLimitReport {
    pub fn holds(&self) -> bool {
        self.substitution_consistent && self.b_reduces_to_a && self.h_tilde_reduces_to_h
    }
}

pub fn classical_limit_check(depth: usize) -> Result<ClassicalLimitReport> {
    let mut consistent = true;
    let mut lowering_w1 = PdoSeries::zero();
    for w in [int(1), int(2), rat(7, 2)] {
        let full = expand_ladder_case_ii(&w, depth)?;
        let bare = build_case_ii(&w, depth, false)?;
        consistent &= full.lowering.without_phi() == bare.lowering && full.raising.without_phi() == bare.raising;
        if w == int(1) {
            lowering_w1 = full.lowering.without_phi();
        }
    }
    let a = PdoSeries::from_terms([(1, CoeffPoly::one()), (0, CoeffPoly::x())]);
    Ok(ClassicalLimitReport {
        lowering_w1,
        substitution_consistent: consistent,
        b_reduces_to_a: scaled_b(true).without_phi() == a,
        h_tilde_reduces_to_h: b_dagger_times_b().without_phi() == number_operator(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_ws() -> Vec<BigRational> {
        vec![int(1), int(2), rat(7, 2)]
    }

    #[test]
    fn b_dagger_b_is_h_minus_phi_prime() {
        let expected = number_operator().add(&PdoSeries::function(-&CoeffPoly::phi_prime()));
        assert_eq!(b_dagger_times_b(), expected);
        assert!(b_dagger_times_b().is_exact());
        assert_eq!(b_dagger_times_b().to_string(), "d^2: -1/2; d^0: -1/2 + phi^2 + 2 x phi + 1/2 x^2");
    }

    #[test]
    fn inverse_square_root_of_one_plus_h() {
        let (c, q) = inverse_sqrt_one_plus_h(DEFAULT_DEPTH).unwrap();
        assert_eq!(c.to_string(), "-i*sqrt2");
        assert_eq!(
            q.truncate_below(-4).to_string(),
            "d^-1: 1; d^-3: 1/2 + 1/2 x^2; d^-4: -3/2 x; O(d^-5)"
        );
        // c^2 Q^2 must be (1 + H)^-1.
        let c2 = (&c * &c).as_rational().cloned().unwrap();
        let d = DEFAULT_DEPTH as i64;
        let lhs = q.multiply(&q, d).scale(&c2);
        let rhs = shifted_h(int(1)).invert(d + 2).unwrap();
        let fl = lhs.floor().unwrap();
        assert_eq!(lhs.truncate_below(fl), rhs.truncate_below(fl));
        assert!(fl <= -5);
    }

    #[test]
    fn ladder_expansion_leading_terms() {
        for w in sample_ws() {
            let e = expand_ladder_case_ii(&w, DEFAULT_DEPTH).unwrap();
            let (low, high) = LadderExpansion::leading_terms_closed_form(&w);
            assert_eq!(e.lowering.truncate_below(-2), low, "w = {w}");
            assert_eq!(e.raising.truncate_below(-2), high, "w = {w}");
            assert_eq!(e.lowering.coefficient(0), CoeffPoly::x());
            assert_eq!(e.lowering.coefficient(1), CoeffPoly::one());
        }
        assert!(expand_ladder_case_ii(&int(1), 3).is_err());
    }

    #[test]
    fn raising_is_formal_adjoint_of_lowering() {
        for w in sample_ws() {
            let e = expand_ladder_case_ii(&w, DEFAULT_DEPTH).unwrap();
            let adj = e.lowering.adjoint(DEFAULT_DEPTH as i64);
            let fl = adj.floor().unwrap();
            assert_eq!(adj, e.raising.truncate_below(fl), "w = {w}");
        }
    }

    #[test]
    fn products_reproduce_shifted_h_tilde() {
        for w in sample_ws() {
            let r = product_identities(&w, 8).unwrap();
            assert!(r.holds(), "w = {w}: {} / {}", r.lowering_raising, r.raising_lowering);
            assert!(r.resolved_to <= -6);
        }
    }

    #[test]
    fn classical_limit() {
        let r = classical_limit_check(DEFAULT_DEPTH).unwrap();
        assert!(r.holds());
        assert_eq!(r.lowering_w1.truncate_below(-2).to_string(), "d^1: 1; d^0: x; d^-1: 1; d^-2: x; O(d^-3)");
    }
}
