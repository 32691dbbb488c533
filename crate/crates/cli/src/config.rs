//! Run configuration: defaults, a flat `key = value` file and command-line
//! flags, merged with precedence flags > file > defaults.

use std::path::PathBuf;

use isoladder::{IsospectralParams, WeightSequence, C64};

/// Everything a subcommand needs, validated.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lambda: f64,
    pub n: usize,
    pub weights: WeightSequence,
    pub zeta: C64,
    /// The `w` parameter as given; the pseudo-differential expansions use it
    /// directly.
    pub w: f64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub const MIN_TRUNCATION: usize = 8;
pub const MAX_TRUNCATION: usize = 400;

/// Unvalidated settings from one source; `None` means "not given here".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub lambda: Option<f64>,
    pub trunc: Option<usize>,
    pub weights: Option<String>,
    pub w: Option<f64>,
    pub q: Option<f64>,
    pub nu: Option<f64>,
    pub custom: Option<Vec<f64>>,
    pub zeta_re: Option<f64>,
    pub zeta_im: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

impl Settings {
    /// Fields set in `over` replace those in `self`.
    pub fn overridden_by(self, over: Settings) -> Settings {
        Settings {
            lambda: over.lambda.or(self.lambda),
            trunc: over.trunc.or(self.trunc),
            weights: over.weights.or(self.weights),
            w: over.w.or(self.w),
            q: over.q.or(self.q),
            nu: over.nu.or(self.nu),
            custom: over.custom.or(self.custom),
            zeta_re: over.zeta_re.or(self.zeta_re),
            zeta_im: over.zeta_im.or(self.zeta_im),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
        }
    }

    /// Parses a flat config file: one `key = value` per line, `#` starts a
    /// comment, keys use the flag names with `-` or `_`.
    pub fn parse_file(text: &str) -> Result<Settings, String> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value, got {raw:?}", i + 1))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            let at = |e: String| format!("config line {}: {e}", i + 1);
            match key.as_str() {
                "lambda" => s.lambda = Some(parse_num(&key, value).map_err(at)?),
                "trunc" => s.trunc = Some(value.parse().map_err(|_| at(format!("trunc must be an integer, got {value:?}")))?),
                "weights" => s.weights = Some(value.to_string()),
                "w" => s.w = Some(parse_num(&key, value).map_err(at)?),
                "q" => s.q = Some(parse_num(&key, value).map_err(at)?),
                "nu" => s.nu = Some(parse_num(&key, value).map_err(at)?),
                "custom" => s.custom = Some(parse_list(value).map_err(at)?),
                "zeta_re" => s.zeta_re = Some(parse_num(&key, value).map_err(at)?),
                "zeta_im" => s.zeta_im = Some(parse_num(&key, value).map_err(at)?),
                "out" => s.out = Some(PathBuf::from(value)),
                "format" => s.format = Some(value.to_string()),
                other => return Err(at(format!("unknown key {other:?}"))),
            }
        }
        Ok(s)
    }

    /// Fills defaults (lambda = 2, N = 64, distorted weights with w = 1,
    /// zeta = 1 + 0.5i) and validates.
    pub fn resolve(self) -> Result<RunConfig, String> {
        let lambda = self.lambda.unwrap_or(2.0);
        IsospectralParams::new(lambda).map_err(|e| e.to_string())?;
        let n = self.trunc.unwrap_or(64);
        if !(MIN_TRUNCATION..=MAX_TRUNCATION).contains(&n) {
            return Err(format!("trunc must lie in [{MIN_TRUNCATION}, {MAX_TRUNCATION}], got {n}"));
        }
        let w = self.w.unwrap_or(1.0);
        let kind = self.weights.as_deref().unwrap_or("distorted");
        let weights = match kind {
            "constant" => WeightSequence::Constant(w),
            "distorted" => WeightSequence::Distorted(w),
            "linear" => WeightSequence::Linear,
            "single" => WeightSequence::SingleWeight(w),
            "geometric" => WeightSequence::Geometric(self.q.ok_or("geometric weights need q")?),
            "power" => WeightSequence::Power(self.nu.ok_or("power weights need nu")?),
            "custom" => WeightSequence::Custom(self.custom.ok_or("custom weights need a custom list")?),
            other => {
                return Err(format!(
                    "unknown weights {other:?}; expected constant, distorted, linear, single, geometric, power or custom"
                ))
            }
        };
        weights.validate().map_err(|e| e.to_string())?;
        let zeta = C64::new(self.zeta_re.unwrap_or(1.0), self.zeta_im.unwrap_or(0.5));
        if !(zeta.re.is_finite() && zeta.im.is_finite()) {
            return Err(format!("zeta must be finite, got {zeta}"));
        }
        let format = match self.format.as_deref() {
            None => None,
            Some("csv") => Some(Format::Csv),
            Some("json") => Some(Format::Json),
            Some(other) => return Err(format!("format must be csv or json, got {other:?}")),
        };
        Ok(RunConfig { lambda, n, weights, zeta, w, out: self.out, format })
    }
}

fn parse_num(key: &str, value: &str) -> Result<f64, String> {
    value.parse().map_err(|_| format!("{key} must be a number, got {value:?}"))
}

pub fn parse_list(value: &str) -> Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| format!("custom weight {:?} is not a number", t.trim())))
        .collect()
}

/// A short human-readable name for a weight rule.
pub fn describe(ws: &WeightSequence) -> String {
    match ws {
        WeightSequence::Constant(w) => format!("constant w={w}"),
        WeightSequence::Distorted(w) => format!("distorted w={w}"),
        WeightSequence::Linear => "linear".into(),
        WeightSequence::SingleWeight(w) => format!("single w={w}"),
        WeightSequence::Geometric(q) => format!("geometric q={q}"),
        WeightSequence::Power(nu) => format!("power nu={nu}"),
        WeightSequence::Custom(v) => format!("custom ({} weights)", v.len()),
    }
}
