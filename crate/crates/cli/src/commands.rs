use serde_json::Value;

use isoladder::coherent::{cs_eigen_residual, cs_vector, normalization_h, order_estimate, radius_of_convergence};
use isoladder::fock::{self, interior_dim, quadrature_window};
use isoladder::ladder::{general_form, ladder_matrices};
use isoladder::pseudodiff::{
    b_dagger_times_b, classical_limit_check, expand_ladder_case_ii, inverse_sqrt_one_plus_h, rat_from_f64,
    DEFAULT_DEPTH,
};
use isoladder::verify::{self, Check, VerifyConfig};
use isoladder::{
    BasisTag, CsSpec, Error, GrowthClass, IsospectralOperators, IsospectralParams, QuadratureGrid, ThetaBasis,
    TruncatedOperator, WeightSequence,
};

use crate::config::{describe, Format, RunConfig};
use crate::output::{complex, nums, num, obj, Cell, Table};

/// What a subcommand produced.
pub struct Outcome {
    pub table: Table,
    pub json: Value,
    pub pass: bool,
    /// Human-readable lines for standard error.
    pub notes: Vec<String>,
    pub default_format: Format,
}

pub enum Failure {
    /// The configuration violates a precondition; exit code 2.
    Invalid(String),
    /// A computation failed; exit code 1.
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ForbiddenLambda(_)
            | Error::InadmissibleWeights(_)
            | Error::BeyondRadius { .. }
            | Error::TruncationTail { .. }
            | Error::TruncationTooSmall(..)
            | Error::InvalidParameter(_)
            | Error::VanishingPartialSum { .. } => Failure::Invalid(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type CmdResult = Result<Outcome, Failure>;

fn operators(lambda: f64, n: usize) -> Result<(ThetaBasis, IsospectralOperators), Error> {
    let basis = ThetaBasis::new(IsospectralParams::new(lambda)?, QuadratureGrid::for_truncation(n)?, n)?;
    let ops = IsospectralOperators::new(&basis)?;
    Ok((basis, ops))
}

pub const SPECTRUM_LEVELS: usize = 40;
pub const SPECTRUM_DEVIATION: f64 = 1e-6;
pub const ORTHONORMALITY: f64 = 1e-8;

pub fn spectrum(cfg: &RunConfig) -> CmdResult {
    let (basis, ops) = operators(cfg.lambda, cfg.n)?;
    let values = fock::hermitian_eigensystem(&ops.h_tilde)?.values;
    let gram = basis.gram();
    let levels = SPECTRUM_LEVELS.min(cfg.n);
    let mut table = Table::new(vec!["n", "eigenvalue", "deviation", "orthonormality_residual", "u_column_defect"]);
    let (mut worst_dev, mut worst_orth, mut worst_u) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..levels {
        let dev = (values[k] - k as f64).abs();
        let orth = (0..cfg.n).map(|j| (gram[(k, j)] - if j == k { 1.0 } else { 0.0 }).abs()).fold(0.0, f64::max);
        let ucol = (0..cfg.n)
            .map(|m| (ops.u.entry(m, k).re - if m == k { 1.0 } else { 0.0 }).abs().max(ops.u.entry(m, k).im.abs()))
            .fold(0.0, f64::max);
        worst_dev = worst_dev.max(dev);
        worst_orth = worst_orth.max(orth);
        worst_u = worst_u.max(ucol);
        table.push(vec![Cell::Int(k as i64), Cell::Float(values[k]), Cell::Float(dev), Cell::Float(orth), Cell::Float(ucol)]);
    }
    let pass = levels == SPECTRUM_LEVELS && worst_dev < SPECTRUM_DEVIATION && worst_orth < ORTHONORMALITY;
    let json = obj([
        ("lambda", num(cfg.lambda)),
        ("trunc", Value::from(cfg.n)),
        ("rows", table.to_json()),
        ("max_deviation", num(worst_dev)),
        ("max_orthonormality_residual", num(worst_orth)),
        ("max_u_column_defect", num(worst_u)),
        ("pass", Value::from(pass)),
    ]);
    let notes = vec![
        format!("max |E_n - n| over {levels} levels: {worst_dev:.3e} (threshold {SPECTRUM_DEVIATION:.0e})"),
        format!("max orthonormality residual: {worst_orth:.3e} (threshold {ORTHONORMALITY:.0e})"),
        format!("max |U - I| over these columns: {worst_u:.3e}"),
    ];
    Ok(Outcome { table, json, pass, notes, default_format: Format::Csv })
}

pub const COMMUTATOR_FOCK: f64 = 1e-12;
pub const COMMUTATOR_THETA: f64 = 1e-6;

struct DiagonalReport {
    window: usize,
    diagonal: Vec<f64>,
    target: Vec<f64>,
    offdiag_max: f64,
    scale: f64,
}

impl DiagonalReport {
    fn new(comm: &TruncatedOperator, ws: &WeightSequence, window: usize) -> Self {
        let diagonal: Vec<f64> = (0..window).map(|k| comm.entry(k, k).re).collect();
        let target: Vec<f64> = (0..window).map(|k| ws.w(k)).collect();
        let mut offdiag_max: f64 = 0.0;
        for i in 0..window {
            for j in 0..window {
                let e = comm.entry(i, j);
                offdiag_max = offdiag_max.max(if i == j { e.im.abs() } else { e.norm() });
            }
        }
        let scale = target.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        Self { window, diagonal, target, offdiag_max, scale }
    }

    fn residuals(&self) -> Vec<f64> {
        self.diagonal.iter().zip(&self.target).map(|(d, t)| (d - t).abs()).collect()
    }

    fn worst(&self) -> f64 {
        self.residuals().into_iter().fold(self.offdiag_max, f64::max)
    }

    fn json(&self, threshold: f64, relative: bool, pass: bool) -> Value {
        obj([
            ("window", Value::from(self.window)),
            ("diagonal", nums(self.diagonal.iter().copied())),
            ("target", nums(self.target.iter().copied())),
            ("residual", nums(self.residuals())),
            ("offdiag_max", num(self.offdiag_max)),
            ("threshold", num(threshold)),
            ("relative", Value::from(relative)),
            ("pass", Value::from(pass)),
        ])
    }
}

pub fn commutator(cfg: &RunConfig) -> CmdResult {
    let ws = &cfg.weights;
    let (lo, hi) = ladder_matrices(ws, cfg.n, BasisTag::Fock)?;
    let fock_report = DiagonalReport::new(&fock::commutator(&lo, &hi)?, ws, interior_dim(cfg.n));
    let fock_pass = fock_report.worst() / fock_report.scale < COMMUTATOR_FOCK;

    let (_, ops) = operators(cfg.lambda, cfg.n)?;
    let theta_lo = ops.to_theta_components(&general_form(ws, &ops)?)?;
    let theta_comm = fock::commutator(&theta_lo, &theta_lo.adjoint())?;
    let theta_report = DiagonalReport::new(&theta_comm, ws, quadrature_window(cfg.n));
    let theta_pass = theta_report.worst() < COMMUTATOR_THETA;

    let mut table = Table::new(vec!["basis", "index", "diagonal", "target", "residual"]);
    for (label, r) in [("fock", &fock_report), ("theta", &theta_report)] {
        for (k, res) in r.residuals().into_iter().enumerate() {
            table.push(vec![
                Cell::Text(label.into()),
                Cell::Int(k as i64),
                Cell::Float(r.diagonal[k]),
                Cell::Float(r.target[k]),
                Cell::Float(res),
            ]);
        }
    }
    let pass = fock_pass && theta_pass;
    let json = obj([
        ("weights", Value::from(describe(ws))),
        ("lambda", num(cfg.lambda)),
        ("trunc", Value::from(cfg.n)),
        ("fock", fock_report.json(COMMUTATOR_FOCK, true, fock_pass)),
        ("theta", theta_report.json(COMMUTATOR_THETA, false, theta_pass)),
        ("pass", Value::from(pass)),
    ]);
    let notes = vec![
        format!("fock: worst {:.3e} relative to {:.3e} on {} indices", fock_report.worst(), fock_report.scale, fock_report.window),
        format!("theta: worst {:.3e} on {} indices", theta_report.worst(), theta_report.window),
    ];
    Ok(Outcome { table, json, pass, notes, default_format: Format::Json })
}

pub const CS_RESIDUAL: f64 = 1e-6;

pub fn coherent(cfg: &RunConfig) -> CmdResult {
    let radius = radius_of_convergence(&cfg.weights);
    if cfg.zeta.norm() >= radius {
        return Err(Error::BeyondRadius { argument: cfg.zeta.norm(), radius }.into());
    }
    let h = normalization_h(cfg.zeta.norm_sqr(), &cfg.weights)?;
    let mut sizes = vec![48, 64, 96, cfg.n];
    sizes.sort_unstable();
    sizes.dedup();
    let mut table = Table::new(vec!["n", "residual", "norm"]);
    let mut main_residual = f64::INFINITY;
    let mut refused = Vec::new();
    for n in sizes {
        let spec = CsSpec { zeta: cfg.zeta, weights: cfg.weights.clone(), n };
        let state = match cs_vector(&spec, BasisTag::Fock) {
            Ok(v) => v,
            Err(e @ Error::TruncationTail { .. }) if n != cfg.n => {
                refused.push(format!("N={n}: {e}"));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let (_, ops) = operators(cfg.lambda, n)?;
        let r = cs_eigen_residual(&spec, &ops)?;
        if n == cfg.n {
            main_residual = r;
        }
        table.push(vec![Cell::Int(n as i64), Cell::Float(r), Cell::Float(state.norm())]);
    }
    let pass = main_residual < CS_RESIDUAL;
    let json = obj([
        ("weights", Value::from(describe(&cfg.weights))),
        ("zeta", complex(cfg.zeta)),
        ("h", num(h)),
        ("radius", num(radius)),
        ("rows", table.to_json()),
        ("residual", num(main_residual)),
        ("threshold", num(CS_RESIDUAL)),
        ("pass", Value::from(pass)),
    ]);
    let mut notes = vec![format!("residual at N={}: {main_residual:.3e} (threshold {CS_RESIDUAL:.0e})", cfg.n)];
    notes.extend(refused);
    Ok(Outcome { table, json, pass, notes, default_format: Format::Csv })
}

/// What the order estimator should find for the families with a known answer.
enum Expected {
    Rho(f64, f64),
    Zero,
    Radius(f64),
    Unknown,
}

fn expected_order(ws: &WeightSequence) -> Expected {
    match *ws {
        WeightSequence::Constant(_) | WeightSequence::Distorted(_) => Expected::Rho(2.0, 0.02),
        WeightSequence::Linear => Expected::Rho(1.0, 0.02),
        WeightSequence::Power(nu) if nu > -1.0 => Expected::Rho(2.0 / (1.0 + nu), 0.05),
        WeightSequence::Geometric(q) if q > 1.0 => Expected::Zero,
        WeightSequence::Geometric(q) if q == 1.0 => Expected::Rho(2.0, 0.02),
        WeightSequence::Geometric(q) => Expected::Radius((q / (1.0 - q)).sqrt()),
        WeightSequence::SingleWeight(w) => Expected::Radius(w.sqrt()),
        _ => Expected::Unknown,
    }
}

pub fn order(cfg: &RunConfig) -> CmdResult {
    let e = order_estimate(&cfg.weights)?;
    let class = match e.class {
        GrowthClass::Entire => "entire",
        GrowthClass::ZeroOrder => "order-zero",
        GrowthClass::NotEntire => "not-entire",
    };
    let (expected, check) = match expected_order(&cfg.weights) {
        Expected::Rho(rho, tol) => {
            let ok = e.class == GrowthClass::Entire && e.rho.is_some_and(|r| (r - rho).abs() < tol);
            (obj([("rho", num(rho)), ("tolerance", num(tol))]), Some(ok))
        }
        Expected::Zero => (obj([("rho", num(0.0))]), Some(e.class == GrowthClass::ZeroOrder)),
        Expected::Radius(r) => {
            let ok = e.class == GrowthClass::NotEntire && (e.radius - r).abs() < 1e-3;
            (obj([("radius", num(r)), ("tolerance", num(1e-3))]), Some(ok))
        }
        Expected::Unknown => (Value::Null, None),
    };
    let pass = check.unwrap_or(true);
    let f = &e.fit;
    let names = ["n^2", "n ln n", "n", "1"];
    let mut table = Table::new(vec!["quantity", "value"]);
    table.push(vec![Cell::Text("class".into()), Cell::Text(class.into())]);
    table.push(vec![Cell::Text("rho".into()), Cell::Float(e.rho.unwrap_or(f64::NAN))]);
    table.push(vec![Cell::Text("radius".into()), Cell::Float(e.radius)]);
    for (name, (c, s)) in names.iter().zip(f.coefficients.iter().zip(&f.std_errors)) {
        table.push(vec![Cell::Text(format!("coefficient {name}")), Cell::Float(*c)]);
        table.push(vec![Cell::Text(format!("std error {name}")), Cell::Float(*s)]);
    }
    table.push(vec![Cell::Text("quadratic share".into()), Cell::Float(f.quadratic_share)]);
    table.push(vec![Cell::Text("n ln n share".into()), Cell::Float(f.nlogn_share)]);
    table.push(vec![Cell::Text("rms residual".into()), Cell::Float(f.rms_residual)]);
    let json = obj([
        ("weights", Value::from(describe(&cfg.weights))),
        ("class", Value::from(class)),
        ("rho", e.rho.map(num).unwrap_or(Value::Null)),
        ("radius", num(e.radius)),
        (
            "fit",
            obj([
                ("basis", Value::from(names.to_vec())),
                ("coefficients", nums(f.coefficients)),
                ("std_errors", nums(f.std_errors)),
                ("rms_residual", num(f.rms_residual)),
                ("quadratic_share", num(f.quadratic_share)),
                ("nlogn_share", num(f.nlogn_share)),
                ("w_half", num(f.w_half)),
                ("w_end", num(f.w_end)),
                ("w_limit", num(f.w_limit)),
            ]),
        ),
        ("expected", expected),
        ("pass", Value::from(pass)),
    ]);
    let notes = vec![match e.rho {
        Some(r) => format!("{class}, rho = {r:.6}"),
        None => format!("{class}, radius = {:.6}", e.radius),
    }];
    Ok(Outcome { table, json, pass, notes, default_format: Format::Json })
}

fn check_json(c: &Check) -> Value {
    obj([
        ("name", Value::from(c.name.as_str())),
        ("measured", num(c.measured)),
        ("threshold", num(c.threshold)),
        ("pass", Value::from(c.pass)),
    ])
}

fn check_table(checks: &[Check]) -> Table {
    let mut t = Table::new(vec!["check", "measured", "threshold", "pass"]);
    for c in checks {
        t.push(vec![Cell::Text(c.name.clone()), Cell::Float(c.measured), Cell::Float(c.threshold), Cell::Bool(c.pass)]);
    }
    t
}

pub fn pdo(cfg: &RunConfig) -> CmdResult {
    let w = rat_from_f64(cfg.w).ok_or_else(|| Failure::Invalid(format!("w must be finite, got {}", cfg.w)))?;
    let expansion = expand_ladder_case_ii(&w, DEFAULT_DEPTH)?;
    let (prefactor, q) = inverse_sqrt_one_plus_h(DEFAULT_DEPTH)?;
    let mut checks = verify::pdo_q_checks();
    checks.extend(verify::pdo_ladder_checks(&w));
    let limit = classical_limit_check(DEFAULT_DEPTH)?;
    checks.push(Check::exact("phi -> 0 reduces b, b^dagger b and the expansions to the oscillator", usize::from(!limit.holds())));
    if cfg.w == 1.0 {
        let r = verify::h_tilde_1_matrix_residual(cfg.lambda, cfg.n)?;
        checks.push(Check::below("w=1: a1~^dagger a1~ - (H~ - 1) on theta_n, n >= 1 (matrices)", r, 1e-6));
    }
    let pass = checks.iter().all(|c| c.pass);
    let coeffs = |s: &isoladder::PdoSeries| {
        Value::Array(
            s.terms()
                .map(|(k, u)| obj([("order", Value::from(*k)), ("coefficient", Value::from(u.to_string()))]))
                .collect(),
        )
    };
    let json = obj([
        ("w", Value::from(w.to_string())),
        ("depth", Value::from(DEFAULT_DEPTH)),
        (
            "series",
            obj([
                ("b_dagger_b", Value::from(b_dagger_times_b().to_string())),
                ("inverse_sqrt_one_plus_h", obj([("prefactor", Value::from(prefactor.to_string())), ("q", Value::from(q.to_string()))])),
                ("sqrt2_lowering", Value::from(expansion.lowering.to_string())),
                ("sqrt2_raising", Value::from(expansion.raising.to_string())),
            ]),
        ),
        ("lowering_coefficients", coeffs(&expansion.lowering)),
        ("raising_coefficients", coeffs(&expansion.raising)),
        ("checks", Value::Array(checks.iter().map(check_json).collect())),
        ("pass", Value::from(pass)),
    ]);
    let notes = checks.iter().map(|c| format!("{} {}", if c.pass { "PASS" } else { "FAIL" }, c.name)).collect();
    Ok(Outcome { table: check_table(&checks), json, pass, notes, default_format: Format::Json })
}

pub fn report(cfg: &RunConfig) -> CmdResult {
    let reports = verify::run_all(VerifyConfig { lambda: cfg.lambda, n: cfg.n });
    let mut table = Table::new(vec!["criterion", "check", "measured", "threshold", "pass"]);
    let mut entries = Vec::new();
    let mut notes = Vec::new();
    for r in &reports {
        for c in &r.checks {
            table.push(vec![
                Cell::Int(r.id as i64),
                Cell::Text(c.name.clone()),
                Cell::Float(c.measured),
                Cell::Float(c.threshold),
                Cell::Bool(c.pass),
            ]);
        }
        let worst = r.worst();
        entries.push(obj([
            ("id", Value::from(r.id)),
            ("name", Value::from(r.name)),
            ("measured", worst.map(|c| num(c.measured)).unwrap_or(Value::Null)),
            ("threshold", worst.map(|c| num(c.threshold)).unwrap_or(Value::Null)),
            ("within_budget", Value::from(r.elapsed <= r.budget)),
            ("pass", Value::from(r.pass())),
            ("checks", Value::Array(r.checks.iter().map(check_json).collect())),
        ]));
        notes.push(format!(
            "{} criterion {:>2} {:<46} {:>7.3}s",
            if r.pass() { "PASS" } else { "FAIL" },
            r.id,
            r.name,
            r.elapsed.as_secs_f64()
        ));
    }
    let pass = reports.iter().all(|r| r.pass());
    let json = obj([
        ("lambda", num(cfg.lambda)),
        ("trunc", Value::from(cfg.n)),
        ("criteria", Value::Array(entries)),
        ("pass", Value::from(pass)),
    ]);
    Ok(Outcome { table, json, pass, notes, default_format: Format::Json })
}
