mod commands;
mod config;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{Failure, Outcome};
use config::{Format, RunConfig, Settings};

#[derive(Parser)]
#[command(name = "isoladder", version, about = "Ladder operators and coherent states of the isospectral oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Lowest eigenvalues of b^dagger b with orthonormality diagnostics.
    Spectrum,
    /// Diagonal of [a1~, a1~^dagger] in the Fock and Theta bases.
    Commutator,
    /// Coherent-state eigen-residual against the truncation.
    Coherent,
    /// Order or radius of convergence of the Bargmann functions.
    Order,
    /// Pseudo-differential expansions of the ladder operators.
    Pdo,
    /// The full verification suite.
    Report,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Commutator => "commutator",
            Command::Coherent => "coherent",
            Command::Order => "order",
            Command::Pdo => "pdo",
            Command::Report => "report",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    Constant,
    Distorted,
    Linear,
    Single,
    Geometric,
    Power,
    Custom,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct Opts {
    /// Isospectral parameter, |lambda| > sqrt(pi)/2.
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Truncation size N.
    #[arg(long, global = true)]
    trunc: Option<usize>,
    #[arg(long, global = true, value_enum)]
    weights: Option<WeightsArg>,
    /// Weight parameter for constant, distorted and single weights.
    #[arg(long, global = true)]
    w: Option<f64>,
    /// Ratio for geometric weights.
    #[arg(long, global = true)]
    q: Option<f64>,
    /// Exponent for power weights.
    #[arg(long, global = true, allow_hyphen_values = true)]
    nu: Option<f64>,
    /// Comma-separated w_1, w_2, ... for custom weights.
    #[arg(long, global = true)]
    custom: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    zeta_re: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    zeta_im: Option<f64>,
    /// Directory for the output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Flat key = value file; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Opts {
    fn settings(&self) -> Result<Settings, String> {
        let weights = self.weights.map(|w| {
            match w {
                WeightsArg::Constant => "constant",
                WeightsArg::Distorted => "distorted",
                WeightsArg::Linear => "linear",
                WeightsArg::Single => "single",
                WeightsArg::Geometric => "geometric",
                WeightsArg::Power => "power",
                WeightsArg::Custom => "custom",
            }
            .to_string()
        });
        let format = self.format.map(|f| match f {
            FormatArg::Csv => "csv".to_string(),
            FormatArg::Json => "json".to_string(),
        });
        Ok(Settings {
            lambda: self.lambda,
            trunc: self.trunc,
            weights,
            w: self.w,
            q: self.q,
            nu: self.nu,
            custom: self.custom.as_deref().map(config::parse_list).transpose()?,
            zeta_re: self.zeta_re,
            zeta_im: self.zeta_im,
            out: self.out.clone(),
            format,
        })
    }
}

fn load(opts: &Opts) -> Result<RunConfig, String> {
    let file = match &opts.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            Settings::parse_file(&text)?
        }
        None => Settings::default(),
    };
    file.overridden_by(opts.settings()?).resolve()
}

fn emit(cmd: Command, cfg: &RunConfig, outcome: &Outcome) -> Result<(), String> {
    let format = cfg.format.unwrap_or(outcome.default_format);
    let body = match format {
        Format::Csv => outcome.table.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.json).map_err(|e| e.to_string())?;
            s.push('\n');
            s
        }
    };
    match &cfg.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
            let path = dir.join(format!("{}.{}", cmd.name(), format.extension()));
            fs::write(&path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli.opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: invalid configuration: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Commutator => commands::commutator(&cfg),
        Command::Coherent => commands::coherent(&cfg),
        Command::Order => commands::order(&cfg),
        Command::Pdo => commands::pdo(&cfg),
        Command::Report => commands::report(&cfg),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: invalid configuration: {e}");
            return ExitCode::from(2);
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    for line in &outcome.notes {
        eprintln!("{line}");
    }
    if let Err(e) = emit(cli.command, &cfg, &outcome) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
