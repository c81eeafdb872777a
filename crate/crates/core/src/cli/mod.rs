//! Batch front end: one subcommand per figure plus generic sweeps and spectra.

mod config;
mod output;
mod run;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{CommandKind, CutoffPolicy, GridSegment, GridSpec, OutputFormat, RunConfig};
pub use output::{format_real, DataFile, OutputSet, LIBRARY};
pub use run::{oracle_checks, run, CheckOutcome, RunSummary};

use crate::criticality::{SweepMode, SweepParameter};
use crate::dicke;
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "open-dicke", version, about = "Transport through a qubit coupled to the open Dicke model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Current and its λ-derivative versus coupling, plus derivative minima and scaling fits.
    Fig2(RunArgs),
    /// Fano factor and its λ-derivative versus coupling, plus peak positions and fits.
    Fig3(RunArgs),
    /// Damped Liouvillian spectra and gap histograms.
    Fig4(RunArgs),
    /// Any observable along a λ or ω₀ grid with a chosen backend.
    Sweep(RunArgs),
    /// One damped Liouvillian spectrum per coupling.
    Spectrum(RunArgs),
    /// Runs the built-in oracle checks and prints one line per check.
    Oracle(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Ground,
    Normal,
    Me,
    MeTq,
}

impl From<ModeArg> for SweepMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Ground => SweepMode::GroundState,
            ModeArg::Normal => SweepMode::NormalPhase,
            ModeArg::Me => SweepMode::MeNoBackaction,
            ModeArg::MeTq => SweepMode::MeFull,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

/// Flags shared by every subcommand. Unset flags keep the value from
/// `--config` or the command's figure defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON run configuration; flags given alongside override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Qubit numbers, comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Include the N → ∞ normal-phase curve.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub inf: Option<bool>,
    /// λ grid as min:max:step, several segments comma separated.
    #[arg(long = "lambda-grid", conflicts_with = "omega0_grid")]
    pub lambda_grid: Option<String>,
    /// ω₀ grid as min:max:step (λ then comes from --lambda).
    #[arg(long = "omega0-grid")]
    pub omega0_grid: Option<String>,
    /// Couplings for spectra, or the fixed λ of an ω₀ sweep.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega0: Option<f64>,
    #[arg(long = "gamma-b", allow_negative_numbers = true)]
    pub gamma_b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Coherent tunneling of the transport qubit.
    #[arg(long, allow_negative_numbers = true)]
    pub tc: Option<f64>,
    #[arg(long = "gamma-l", allow_negative_numbers = true)]
    pub gamma_l: Option<f64>,
    #[arg(long = "gamma-r", allow_negative_numbers = true)]
    pub gamma_r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Fixed Fock cutoff.
    #[arg(long = "n-max", conflicts_with = "auto_cutoff")]
    pub n_max: Option<usize>,
    /// Relative tolerance of the automatic Fock cutoff.
    #[arg(long = "auto-cutoff", allow_negative_numbers = true)]
    pub auto_cutoff: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Histogram bins for spectra.
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Fig2(_) => CommandKind::Fig2,
            Command::Fig3(_) => CommandKind::Fig3,
            Command::Fig4(_) => CommandKind::Fig4,
            Command::Sweep(_) => CommandKind::Sweep,
            Command::Spectrum(_) => CommandKind::Spectrum,
            Command::Oracle(_) => CommandKind::Oracle,
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Fig2(a)
            | Command::Fig3(a)
            | Command::Fig4(a)
            | Command::Sweep(a)
            | Command::Spectrum(a)
            | Command::Oracle(a) => a,
        }
    }
}

/// Resolves flags (over an optional config file, over figure defaults) into a validated configuration.
pub fn parse_config(command: CommandKind, args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let cfg = RunConfig::from_json_file(path)?;
            if cfg.command != command {
                return Err(Error::Config {
                    key: "command".into(),
                    reason: format!("file is for `{}`, invoked as `{}`", cfg.command.name(), command.name()),
                });
            }
            cfg
        }
        None => RunConfig::defaults(command),
    };

    let spec = &mut cfg.spec;
    if let Some(v) = args.omega {
        spec.dicke.omega = v;
    }
    if let Some(v) = args.omega0 {
        spec.dicke.omega0 = v;
    }
    if let Some(v) = args.gamma_b {
        spec.gamma_b = v;
    }
    if let Some(v) = args.g {
        spec.g = v;
    }
    if let Some(v) = args.tc {
        spec.delta = v;
    }
    if let Some(v) = args.gamma_l {
        spec.gamma_l = v;
    }
    if let Some(v) = args.gamma_r {
        spec.gamma_r = v;
    }
    if let Some(v) = args.epsilon {
        spec.epsilon = v;
    }
    if let Some(n) = &args.n {
        cfg.n_values = n.clone();
    }
    if let Some(inf) = args.inf {
        cfg.infinite = inf;
    }
    if let Some(m) = args.mode {
        cfg.mode = m.into();
    }
    if let Some(text) = &args.lambda_grid {
        cfg.grid = GridSpec::parse(SweepParameter::Lambda, text, "--lambda-grid")?;
    }
    if let Some(text) = &args.omega0_grid {
        cfg.grid = GridSpec::parse(SweepParameter::Omega0, text, "--omega0-grid")?;
    }
    if let Some(l) = &args.lambda {
        cfg.lambdas = l.clone();
        if let Some(&first) = l.first() {
            cfg.spec.dicke.lambda = first;
        }
    } else if args.omega.is_some() || args.omega0.is_some() {
        // spectra default to the critical coupling of the requested frequencies
        if matches!(command, CommandKind::Fig4 | CommandKind::Spectrum) && args.config.is_none() {
            let lc = dicke::critical_coupling(cfg.spec.dicke.omega, cfg.spec.dicke.omega0)?;
            cfg.lambdas = if command == CommandKind::Fig4 {
                vec![lc, 0.1 * lc]
            } else {
                vec![lc]
            };
        }
    }
    if cfg.grid.parameter == SweepParameter::Omega0 && args.lambda.is_none() && args.config.is_none() {
        // the detuned transition quoted for λ = 0.1ω
        cfg.spec.dicke.lambda = 0.1 * cfg.spec.dicke.omega;
    }
    if let Some(n_max) = args.n_max {
        cfg.cutoff = CutoffPolicy::Fixed { n_max };
    }
    if let Some(tol) = args.auto_cutoff {
        cfg.cutoff = CutoffPolicy::Auto { rel_tol: tol };
    }
    if let Some(b) = args.bins {
        cfg.bins = b;
    }
    if let Some(f) = args.format {
        cfg.format = match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Entry point shared by the binary and tests; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = parse_config(cli.command.kind(), cli.command.args()).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(summary) => {
            for line in &summary.lines {
                println!("{line}");
            }
            if summary.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

pub fn main() -> ExitCode {
    main_with_args(std::env::args_os())
}
