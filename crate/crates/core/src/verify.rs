//! Numerical verification of the whole toolkit, one report per acceptance
//! criterion. Each report lists named measurements next to their thresholds.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use crate::coherent::{
    cs_eigen_residual, cs_vector, displacement_operator, generalized_cs, order_estimate, CsSpec, GrowthClass,
};
use crate::error::{Error, Result};
use crate::fock::{self, interior_dim, quadrature_window, BasisTag, StateVector, TruncatedOperator, C64};
use crate::isospectral::{
    a_fernandez_matrix, fernandez_cs, riccati_residual, IsospectralOperators, IsospectralParams, ThetaBasis,
};
use crate::ladder::{
    c_coefficients_closed, c_coefficients_recursive, closed_form_case, general_form, ladder_matrices_direct,
    resolvent_inv_sqrt, ClosedFormCase, WeightSequence,
};
use crate::numerics::QuadratureGrid;
use crate::pseudodiff::{
    expand_ladder_case_ii, inverse_sqrt_one_plus_h, int, product_identities, rat, CoeffPoly, LadderExpansion,
    PdoSeries, DEFAULT_DEPTH,
};

/// One named measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `measured < threshold`; NaN fails.
    pub fn below(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self { name: name.into(), measured, threshold, pass: measured < threshold }
    }

    /// Counts mismatches; passes only at zero.
    pub fn exact(name: impl Into<String>, mismatches: usize) -> Self {
        Self { name: name.into(), measured: mismatches as f64, threshold: 0.0, pass: mismatches == 0 }
    }

    fn from_result(name: impl Into<String>, r: Result<f64>, threshold: f64) -> Self {
        Self::below(name, r.unwrap_or(f64::INFINITY), threshold)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass) && self.elapsed <= self.budget
    }

    /// The check furthest past (or closest to) its threshold, as `measured / threshold`.
    pub fn worst(&self) -> Option<&Check> {
        let ratio = |c: &Check| {
            if c.threshold > 0.0 {
                c.measured / c.threshold
            } else if c.pass {
                0.0
            } else {
                f64::INFINITY
            }
        };
        self.checks.iter().max_by(|a, b| ratio(a).total_cmp(&ratio(b)))
    }
}

/// `lambda` and `N` for the truncation-sensitive criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub lambda: f64,
    pub n: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { lambda: 2.0, n: 64 }
    }
}

fn timed(id: u8, name: &'static str, budget_s: f64, body: impl FnOnce() -> Vec<Check>) -> CriterionReport {
    let start = Instant::now();
    let checks = body();
    CriterionReport { id, name, checks, elapsed: start.elapsed(), budget: Duration::from_secs_f64(budget_s) }
}

fn operators(lambda: f64, n: usize) -> Result<(ThetaBasis, IsospectralOperators)> {
    let p = IsospectralParams::new(lambda)?;
    let basis = ThetaBasis::new(p, QuadratureGrid::for_truncation(n)?, n)?;
    let ops = IsospectralOperators::new(&basis)?;
    Ok((basis, ops))
}

fn failed(name: &str, e: Error) -> Check {
    Check { name: format!("{name}: {e}"), measured: f64::INFINITY, threshold: 0.0, pass: false }
}

pub const ISOSPECTRAL_LEVELS: usize = 40;

/// Lowest eigenvalues of `b^dagger b` against `0, 1, 2, ...`.
pub fn isospectral_deviations(lambda: f64, n: usize, levels: usize) -> Result<Vec<f64>> {
    let (_, ops) = operators(lambda, n)?;
    let values = fock::hermitian_eigensystem(&ops.h_tilde)?.values;
    Ok(values.iter().take(levels).enumerate().map(|(k, v)| (v - k as f64).abs()).collect())
}

pub fn criterion_1(cfg: VerifyConfig) -> CriterionReport {
    timed(1, "isospectrality of b^dagger b", 2.0, || {
        let name = format!("max |E_k - k|, k < {ISOSPECTRAL_LEVELS} (N={}, lambda={})", cfg.n, cfg.lambda);
        let r = isospectral_deviations(cfg.lambda, cfg.n, ISOSPECTRAL_LEVELS).map(|d| {
            if d.len() < ISOSPECTRAL_LEVELS {
                f64::INFINITY
            } else {
                d.into_iter().fold(0.0, f64::max)
            }
        });
        vec![Check::from_result(name, r, 1e-6)]
    })
}

pub fn criterion_2(cfg: VerifyConfig) -> CriterionReport {
    timed(2, "Riccati residual", 1.0, || {
        [1.0, 2.0, 10.0]
            .into_iter()
            .map(|lambda| {
                let name = format!("max |phi' + 2 x phi + phi^2|, lambda={lambda}");
                let r = IsospectralParams::new(lambda)
                    .and_then(|p| Ok(riccati_residual(&p, &QuadratureGrid::for_truncation(cfg.n)?)));
                Check::from_result(name, r, 1e-8)
            })
            .collect()
    })
}

/// The six named weight cases used across criteria 3 to 5.
pub fn named_cases() -> Vec<ClosedFormCase> {
    vec![
        ClosedFormCase::Constant(2.0),
        ClosedFormCase::Distorted(0.5),
        ClosedFormCase::Linear,
        ClosedFormCase::SingleWeight(2.0),
        ClosedFormCase::Geometric(0.7),
        ClosedFormCase::Geometric(1.3),
    ]
}

/// Three fixed-seed sequences of 500 weights drawn uniformly from `[0.05, 5)`.
pub fn random_custom_weights() -> Vec<WeightSequence> {
    (0..3u64)
        .map(|seed| {
            let mut rng = StdRng::seed_from_u64(0x5eed + seed);
            WeightSequence::Custom((0..500).map(|_| rng.random_range(0.05..5.0)).collect())
        })
        .collect()
}

pub fn criterion_3() -> CriterionReport {
    timed(3, "closed form of c_n against the recursion", 1.0, || {
        let mut seqs: Vec<(String, WeightSequence)> =
            named_cases().into_iter().map(|c| (format!("case {}", c.label()), c.weights())).collect();
        for (i, ws) in random_custom_weights().into_iter().enumerate() {
            seqs.push((format!("random custom #{}", i + 1), ws));
        }
        let mut checks = Vec::new();
        for (label, ws) in seqs {
            let tables = c_coefficients_recursive(&ws, 501).and_then(|a| Ok((c_coefficients_closed(&ws, 501)?, a)));
            match tables {
                Ok((closed, rec)) => {
                    let worst = rec.c.iter().zip(&closed.c).map(|(r, c)| ((c - r) / r).abs()).fold(0.0, f64::max);
                    checks.push(Check::below(format!("{label}: relative closed/recursive, n <= 500"), worst, 1e-12));
                    let tele = rec.telescoped_defect().max(closed.telescoped_defect());
                    checks.push(Check::below(format!("{label}: (n+1) c_n c_(n+1) - W_(n+1)"), tele, 1e-12));
                }
                Err(e) => checks.push(failed(&label, e)),
            }
        }
        checks
    })
}

fn weight_diagonal(ws: &WeightSequence, n: usize, tag: BasisTag) -> Result<TruncatedOperator> {
    let values: Vec<f64> = (0..n).map(|k| ws.w(k)).collect();
    TruncatedOperator::diagonal(&values, tag)
}

/// Largest entry of `[a1~, a1~^dagger] - diag(0, w_1, w_2, ...)` in Theta
/// components, built through the quadrature `U`, on the leading `N/4` indices.
pub fn commutator_residual_quadrature(ws: &WeightSequence, ops: &IsospectralOperators) -> Result<f64> {
    let lo = ops.to_theta_components(&general_form(ws, ops)?)?;
    let comm = fock::commutator(&lo, &lo.adjoint())?;
    let target = weight_diagonal(ws, ops.dim(), ops.theta_tag())?;
    Ok(comm.sub(&target)?.window_max_abs(quadrature_window(ops.dim())))
}

/// The same entrywise residual for the directly filled matrices on `N - 5`
/// indices, relative to the largest `w_n` there.
pub fn commutator_residual_direct(ws: &WeightSequence, n: usize) -> Result<f64> {
    let (lo, hi) = ladder_matrices_direct(ws, n, BasisTag::Fock)?;
    let comm = fock::commutator(&lo, &hi)?;
    let k = interior_dim(n);
    let scale = (0..k).map(|i| ws.w(i).abs()).fold(1.0, f64::max);
    Ok(comm.sub(&weight_diagonal(ws, n, BasisTag::Fock)?)?.window_max_abs(k) / scale)
}

pub fn criterion_4(cfg: VerifyConfig) -> CriterionReport {
    timed(4, "commutator diagonal", 5.0, || {
        let ops = match operators(cfg.lambda, cfg.n) {
            Ok((_, ops)) => ops,
            Err(e) => return vec![failed("operators", e)],
        };
        let mut checks = Vec::new();
        for case in named_cases() {
            let ws = case.weights();
            checks.push(Check::from_result(
                format!("case {}: Theta basis via U, N/4 window", case.label()),
                commutator_residual_quadrature(&ws, &ops),
                1e-6,
            ));
            checks.push(Check::from_result(
                format!("case {}: direct fill, relative", case.label()),
                commutator_residual_direct(&ws, cfg.n),
                1e-12,
            ));
        }
        checks
    })
}

pub fn criterion_5(cfg: VerifyConfig) -> CriterionReport {
    timed(5, "closed forms against the general construction", 5.0, || {
        let ops = match operators(cfg.lambda, cfg.n) {
            Ok((_, ops)) => ops,
            Err(e) => return vec![failed("operators", e)],
        };
        let k = interior_dim(cfg.n);
        let mut checks = Vec::new();
        for case in named_cases() {
            let r = closed_form_case(case, &ops)
                .and_then(|c| Ok(c.sub(&general_form(&case.weights(), &ops)?)?.window_norm_inf(k)));
            checks.push(Check::from_result(format!("case {}", case.label()), r, 1e-7));
        }
        let limit = closed_form_case(ClosedFormCase::Constant(1.0), &ops).and_then(|i1| {
            let mut worst: f64 = 0.0;
            for q in [1.0 - 1e-8, 1.0 + 1e-8] {
                let v = closed_form_case(ClosedFormCase::Geometric(q), &ops)?;
                worst = worst.max(v.sub(&i1)?.window_norm_inf(k));
            }
            Ok(worst)
        });
        checks.push(Check::from_result("case v at q = 1 +- 1e-8 against case i (w=1)", limit, 1e-5));
        checks
    })
}

pub fn criterion_6() -> CriterionReport {
    timed(6, "resolvent square root", 1.0, || {
        let n = 32;
        let r = (|| {
            let x = fock::number_matrix(n)?.add(&TruncatedOperator::identity(n, BasisTag::Fock)?)?;
            let spectral = fock::apply_spectral_function(&x, |t| t.powf(-0.5))?;
            Ok(resolvent_inv_sqrt(&x)?.sub(&spectral)?.norm_inf())
        })();
        vec![Check::from_result("||resolvent - spectral (1+H)^(-1/2)||_inf, N=32", r, 1e-6)]
    })
}

/// `A = d^2 - x^2 - 1`, with `(1 + H)^(-1/2) = -sqrt(2) i A^(-1/2)`.
fn shifted_oscillator_symbol() -> PdoSeries {
    PdoSeries::from_terms([(2, CoeffPoly::one()), (0, CoeffPoly::from_terms([((2, 0), int(-1)), ((0, 0), int(-1))]))])
}

/// Mismatch counts for the `(1 + H)^(-1/2)` expansion: its golden
/// coefficients and `Q Q A = 1` through the resolved orders.
pub fn pdo_q_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    match inverse_sqrt_one_plus_h(DEFAULT_DEPTH) {
        Ok((_, q)) => {
            let want3 = CoeffPoly::from_terms([((0, 0), rat(1, 2)), ((2, 0), rat(1, 2))]);
            let want4 = CoeffPoly::monomial(rat(-3, 2), 1, 0);
            let m = usize::from(q.coefficient(-3) != want3) + usize::from(q.coefficient(-4) != want4);
            checks.push(Check::exact("Q coefficients 1/2 (1 + x^2) at d^-3 and -3/2 x at d^-4", m));
            let d = DEFAULT_DEPTH as i64;
            let back = q.multiply(&q, d).multiply(&shifted_oscillator_symbol(), d).sub(&PdoSeries::identity());
            let resolved = back.floor().is_some_and(|f| f <= -(DEFAULT_DEPTH as i64) + 2);
            let bad = back.terms().count() + usize::from(!resolved);
            checks.push(Check::exact("Q Q A - 1 through the resolved orders", bad));
        }
        Err(e) => checks.push(failed("inverse square root", e)),
    }
    checks
}

/// Mismatch counts for the ladder expansions at one `w`: leading terms
/// against their closed form and both product identities.
pub fn pdo_ladder_checks(w: &BigRational) -> Vec<Check> {
    let mut checks = Vec::new();
    let label = format!("w={w}");
    match expand_ladder_case_ii(w, DEFAULT_DEPTH) {
        Ok(e) => {
            let (low, high) = LadderExpansion::leading_terms_closed_form(w);
            let m = usize::from(e.lowering.truncate_below(-2) != low) + usize::from(e.raising.truncate_below(-2) != high);
            checks.push(Check::exact(format!("{label}: a1~ and a1~^dagger through d^-2"), m));
        }
        Err(err) => checks.push(failed(&label, err)),
    }
    match product_identities(w, DEFAULT_DEPTH + 2) {
        Ok(r) => {
            let bad = r.lowering_raising.terms().count()
                + r.raising_lowering.terms().count()
                + usize::from(r.resolved_to > -(DEFAULT_DEPTH as i64));
            checks.push(Check::exact(format!("{label}: a1~ a1~^dagger and a1~^dagger a1~ residuals"), bad));
        }
        Err(err) => checks.push(failed(&label, err)),
    }
    checks
}

/// [`pdo_q_checks`] followed by [`pdo_ladder_checks`] at `w = 1, 2, 7/2`.
pub fn pdo_checks() -> Vec<Check> {
    let mut checks = pdo_q_checks();
    for w in [int(1), int(2), rat(7, 2)] {
        checks.extend(pdo_ladder_checks(&w));
    }
    checks
}

pub fn criterion_7() -> CriterionReport {
    timed(7, "pseudo-differential identities", 5.0, pdo_checks)
}

/// `a1~^dagger a1~ - (H~ - 1)` for `w = 1` on `theta_n`, `1 <= n < N/4`, in
/// Theta components built through `U`.
pub fn h_tilde_1_matrix_residual(lambda: f64, n: usize) -> Result<f64> {
    let (_, ops) = operators(lambda, n)?;
    let lo = ops.to_theta_components(&closed_form_case(ClosedFormCase::Distorted(1.0), &ops)?)?;
    let h1 = lo.adjoint().matmul(&lo)?;
    let ht = ops.to_theta_components(&ops.h_tilde)?;
    let id = TruncatedOperator::identity(n, ops.theta_tag())?;
    let diff = h1.sub(&ht.sub(&id)?)?;
    let k = quadrature_window(n);
    let mut worst: f64 = 0.0;
    for i in 1..k {
        for j in 1..k {
            worst = worst.max(diff.entry(i, j).norm());
        }
    }
    Ok(worst)
}

pub const CS_ZETA: C64 = C64::new(1.0, 0.5);

/// `||a1~ |zeta> - zeta |zeta>||` in Fock components for one case and truncation.
pub fn cs_residual(case: ClosedFormCase, lambda: f64, n: usize, zeta: C64) -> Result<f64> {
    let (_, ops) = operators(lambda, n)?;
    cs_eigen_residual(&CsSpec { zeta, weights: case.weights(), n }, &ops)
}

pub fn criterion_8(cfg: VerifyConfig) -> CriterionReport {
    timed(8, "coherent-state eigen-residual", 5.0, || {
        let mut checks = Vec::new();
        let cases = [ClosedFormCase::Constant(2.0), ClosedFormCase::Distorted(0.5), ClosedFormCase::Linear];
        for case in cases {
            let label = format!("case {}", case.label());
            checks.push(Check::from_result(
                format!("{label}: residual at N={}", cfg.n),
                cs_residual(case, cfg.lambda, cfg.n, CS_ZETA),
                1e-6,
            ));
            let pair = cs_residual(case, cfg.lambda, 48, CS_ZETA)
                .and_then(|r48| Ok((r48, cs_residual(case, cfg.lambda, 96, CS_ZETA)?)));
            match pair {
                Ok((r48, r96)) => {
                    checks.push(Check::exact(format!("{label}: residual(96) < residual(48)"), usize::from(r96 >= r48)))
                }
                Err(e) => checks.push(failed(&label, e)),
            }
        }
        checks
    })
}

pub fn criterion_9(cfg: VerifyConfig) -> CriterionReport {
    timed(9, "Perelomov equivalence", 5.0, || {
        let n = cfg.n;
        let tag = BasisTag::Theta(cfg.lambda);
        let (lo, hi) = match ladder_matrices_direct(&WeightSequence::Constant(1.0), n, tag) {
            Ok(p) => p,
            Err(e) => return vec![failed("ladder", e)],
        };
        let zeta = C64::new(0.7, -0.2);
        let mut checks = Vec::new();
        let perelomov = (|| {
            let d = displacement_operator(zeta, &lo, &hi)?;
            let cs = cs_vector(&CsSpec { zeta, weights: WeightSequence::Constant(1.0), n }, tag)?;
            let dth = d.apply(&StateVector::basis_state(1, n, tag)?)?;
            let unitary = d.adjoint().matmul(&d)?.sub(&TruncatedOperator::identity(n, tag)?)?;
            Ok((dth.distance(&cs)?, unitary.window_norm_inf(interior_dim(n))))
        })();
        match perelomov {
            Ok((dist, unit)) => {
                checks.push(Check::below("||D theta_1 - |zeta>||, zeta = 0.7-0.2i", dist, 1e-6));
                checks.push(Check::below("||D^dagger D - I|| on N-5 indices", unit, 1e-7));
            }
            Err(e) => checks.push(failed("displacement", e)),
        }
        for k in [2, 3] {
            let r = generalized_cs(C64::new(0.5, 0.0), k, &lo, &hi).and_then(|g| g.discrepancy());
            checks.push(Check::from_result(format!("two-path |zeta; theta_{k}>, zeta = 0.5"), r, 1e-5));
        }
        checks
    })
}

/// `sqrt(sum_n w_n)` summed term by term until the terms stop changing the sum.
pub fn summed_radius(ws: &WeightSequence) -> f64 {
    let mut s = 0.0;
    for k in 1..10_000_000 {
        let t = ws.w(k);
        s += t;
        if t <= 1e-17 * s && ws.w(k + 1) <= t {
            break;
        }
    }
    s.sqrt()
}

pub fn criterion_10() -> CriterionReport {
    timed(10, "order of the Bargmann functions", 10.0, || {
        let mut checks = Vec::new();
        let entire = [
            ("case i (w=2)", WeightSequence::Constant(2.0), 2.0, 0.02),
            ("case ii (w=0.5)", WeightSequence::Distorted(0.5), 2.0, 0.02),
            ("case iii", WeightSequence::Linear, 1.0, 0.02),
            ("w_n = n^0.5", WeightSequence::Power(0.5), 2.0 / 1.5, 0.05),
            ("w_n = n^1", WeightSequence::Power(1.0), 1.0, 0.05),
            ("w_n = n^2", WeightSequence::Power(2.0), 2.0 / 3.0, 0.05),
        ];
        for (label, ws, rho, tol) in entire {
            let r = order_estimate(&ws).map(|e| match (e.class, e.rho) {
                (GrowthClass::Entire, Some(got)) => (got - rho).abs(),
                _ => f64::INFINITY,
            });
            checks.push(Check::from_result(format!("{label}: |rho - {rho:.4}|"), r, tol));
        }
        let zero = order_estimate(&WeightSequence::Geometric(1.2)).map(|e| e.class == GrowthClass::ZeroOrder);
        checks.push(Check::exact("q=1.2 classified as order zero", usize::from(!zero.unwrap_or(false))));
        for (label, ws) in [("case iv (w=2)", WeightSequence::SingleWeight(2.0)), ("q=0.5", WeightSequence::Geometric(0.5))] {
            match order_estimate(&ws) {
                Ok(e) => {
                    checks.push(Check::exact(format!("{label}: classified not entire"), usize::from(e.class != GrowthClass::NotEntire)));
                    checks.push(Check::below(format!("{label}: |radius - summed limit|"), (e.radius - summed_radius(&ws)).abs(), 1e-3));
                }
                Err(err) => checks.push(failed(label, err)),
            }
        }
        checks
    })
}

/// `(||U - I||, ||H~ - H||, max |theta_n - psi_n|)` on `N - 5` indices.
pub fn large_lambda_defects(lambda: f64, n: usize) -> Result<(f64, f64, f64)> {
    let (basis, ops) = operators(lambda, n)?;
    let k = interior_dim(n);
    let id = TruncatedOperator::identity(n, BasisTag::Fock)?;
    let u = ops.u.sub(&id)?.window_norm_inf(k);
    let h = ops.h_tilde.sub(&ops.h)?.window_norm_inf(k);
    let samples = basis.samples();
    let psi = basis.psi_table().values();
    let mut theta: f64 = 0.0;
    for row in 0..k {
        for col in 0..samples.ncols() {
            theta = theta.max((samples[(row, col)] - psi[(row, col)]).abs());
        }
    }
    Ok((u, h, theta))
}

pub fn criterion_11(cfg: VerifyConfig) -> CriterionReport {
    timed(11, "large-lambda degeneration", 2.0, || match large_lambda_defects(1e6, cfg.n) {
        Ok((u, h, th)) => vec![
            Check::below("||U - I||_inf at lambda = 1e6", u, 1e-5),
            Check::below("||H~ - H||_inf at lambda = 1e6", h, 1e-4),
            Check::below("max |theta_n - psi_n| at lambda = 1e6", th, 1e-5),
        ],
        Err(e) => vec![failed("lambda = 1e6", e)],
    })
}

pub fn criterion_12(cfg: VerifyConfig) -> CriterionReport {
    timed(12, "Fernandez lowering operator", 2.0, || {
        let r = (|| {
            let (basis, _) = operators(cfg.lambda, cfg.n)?;
            let a = a_fernandez_matrix(&basis)?;
            let w = quadrature_window(cfg.n);
            if w < 3 {
                return Err(Error::TruncationTooSmall(cfg.n, 12));
            }
            let mut entries: f64 = 0.0;
            for k in 2..w {
                let want = (k as f64 - 1.0) * (k as f64).sqrt();
                entries = entries.max((a.entry(k - 1, k) - C64::new(want, 0.0)).norm());
            }
            let z = C64::new(0.8, 0.3);
            let cs = fernandez_cs(z, &basis)?;
            let r = a.apply(&cs)?.sub(&cs.scale(z))?;
            let resid = (0..w).map(|m| r.coeff(m).norm()).fold(0.0, f64::max);
            Ok((entries, resid))
        })();
        match r {
            Ok((entries, resid)) => vec![
                Check::below("max |A_(n-1,n) - (n-1) sqrt(n)| on N/4 indices", entries, 1e-6),
                Check::below("eigen-residual of the A coherent state, z = 0.8+0.3i", resid, 1e-7),
            ],
            Err(e) => vec![failed("Fernandez operator", e)],
        }
    })
}

/// Runs every criterion in order.
pub fn run_all(cfg: VerifyConfig) -> Vec<CriterionReport> {
    vec![
        criterion_1(cfg),
        criterion_2(cfg),
        criterion_3(),
        criterion_4(cfg),
        criterion_5(cfg),
        criterion_6(),
        criterion_7(),
        criterion_8(cfg),
        criterion_9(cfg),
        criterion_10(),
        criterion_11(cfg),
        criterion_12(cfg),
    ]
}
