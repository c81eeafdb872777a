use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::criticality::{SweepMode, SweepParameter};
use crate::dicke;
use crate::error::{Error, Result};
use crate::open_system::SystemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Fig2,
    Fig3,
    Fig4,
    Sweep,
    Spectrum,
    Oracle,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Fig2 => "fig2",
            CommandKind::Fig3 => "fig3",
            CommandKind::Fig4 => "fig4",
            CommandKind::Sweep => "sweep",
            CommandKind::Spectrum => "spectrum",
            CommandKind::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CutoffPolicy {
    Fixed { n_max: usize },
    /// Ground-state convergence test at the largest grid coupling.
    Auto { rel_tol: f64 },
}

/// Inclusive uniform segment `min:max:step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSegment {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

/// Union of uniform segments along one parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub parameter: SweepParameter,
    pub segments: Vec<GridSegment>,
}

impl GridSpec {
    /// Parses `min:max:step[,min:max:step…]`.
    pub fn parse(parameter: SweepParameter, text: &str, key: &str) -> Result<Self> {
        let bad = |reason: String| Error::Config {
            key: key.to_string(),
            reason,
        };
        let mut segments = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let fields: Vec<&str> = part.split(':').collect();
            if fields.len() != 3 {
                return Err(bad(format!("expected min:max:step, got `{part}`")));
            }
            let num = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("`{s}` is not a number")))
            };
            segments.push(GridSegment {
                min: num(fields[0])?,
                max: num(fields[1])?,
                step: num(fields[2])?,
            });
        }
        let grid = Self { parameter, segments };
        grid.points_checked(key)?;
        Ok(grid)
    }

    /// Default coupling grid: fine on `[0.30, 0.60]`, coarse wings out to 0.80.
    pub fn default_lambda() -> Self {
        Self {
            parameter: SweepParameter::Lambda,
            segments: vec![
                GridSegment {
                    min: 0.0,
                    max: 0.275,
                    step: 0.025,
                },
                GridSegment {
                    min: 0.30,
                    max: 0.60,
                    step: 2.5e-3,
                },
                GridSegment {
                    min: 0.625,
                    max: 0.80,
                    step: 0.025,
                },
            ],
        }
    }

    fn points_checked(&self, key: &str) -> Result<Vec<f64>> {
        if self.segments.is_empty() {
            return Err(Error::Config {
                key: key.into(),
                reason: "grid has no segments".into(),
            });
        }
        let mut points = Vec::new();
        for s in &self.segments {
            let check = |ok: bool, reason: &str| {
                if ok {
                    Ok(())
                } else {
                    Err(Error::Config {
                        key: key.into(),
                        reason: format!("{reason} in segment {}:{}:{}", s.min, s.max, s.step),
                    })
                }
            };
            check(s.min.is_finite() && s.max.is_finite(), "bounds must be finite")?;
            check(s.min <= s.max, "minimum exceeds maximum")?;
            check(s.step > 0.0 && s.step.is_finite(), "step must be positive")?;
            check((s.max - s.min) / s.step < 1e6, "too many points")?;
            points.extend(crate::criticality::uniform_grid(s.min, s.max, s.step)?);
        }
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        Ok(points)
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        self.points_checked("grid")
    }
}

/// Everything a run needs; serialized verbatim into every output header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    /// Template system; `n_qubits`, `n_max` and the swept parameter are set per curve.
    pub spec: SystemSpec,
    pub n_values: Vec<usize>,
    /// Add the `N → ∞` normal-phase curve.
    pub infinite: bool,
    pub grid: GridSpec,
    pub cutoff: CutoffPolicy,
    pub mode: SweepMode,
    /// Couplings for spectra.
    pub lambdas: Vec<f64>,
    pub bins: usize,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
}

impl RunConfig {
    /// Figure defaults for each command.
    pub fn defaults(command: CommandKind) -> Self {
        let lambda_c = 0.5;
        let base = Self {
            command,
            spec: SystemSpec::current_figure(4, 1, 0.0),
            n_values: vec![4, 8, 16, 20, 24],
            infinite: true,
            grid: GridSpec::default_lambda(),
            cutoff: CutoffPolicy::Auto { rel_tol: 1e-6 },
            mode: SweepMode::GroundState,
            lambdas: vec![lambda_c],
            bins: crate::chaos::DEFAULT_BINS,
            output_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
        };
        match command {
            CommandKind::Fig2 | CommandKind::Oracle => base,
            CommandKind::Fig3 => Self {
                spec: SystemSpec::noise_figure(4, 1, 0.0),
                ..base
            },
            CommandKind::Fig4 | CommandKind::Spectrum => {
                let (n, n_max) = if command == CommandKind::Fig4 { (6, 10) } else { (4, 8) };
                let mut spec = SystemSpec::current_figure(n, n_max, lambda_c);
                spec.include_tq = false;
                spec.gamma_b = 0.1;
                Self {
                    spec,
                    n_values: vec![n],
                    infinite: false,
                    cutoff: CutoffPolicy::Fixed { n_max },
                    lambdas: if command == CommandKind::Fig4 {
                        vec![lambda_c, 0.1 * lambda_c]
                    } else {
                        vec![lambda_c]
                    },
                    ..base
                }
            }
            CommandKind::Sweep => Self {
                n_values: vec![4],
                infinite: false,
                ..base
            },
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: Self = serde_json::from_str(&text).map_err(|e| Error::Config {
            key: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |key: &str, reason: String| Error::Config {
            key: key.into(),
            reason,
        };
        let domain = |e: Error| match e {
            Error::InvalidParameter { name, reason } => cfg(&flag_for(name), reason),
            other => other,
        };
        if self.n_values.is_empty() && !self.infinite {
            return Err(cfg("--N", "at least one N is required".into()));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n == 0) {
            return Err(cfg("--N", format!("N must be positive, got {n}")));
        }
        let mut probe = self.spec;
        probe.dicke.n_qubits = self.n_values.first().copied().unwrap_or(1);
        probe.dicke.n_max = probe.dicke.n_max.max(1);
        probe.validate().map_err(domain)?;
        if self.command == CommandKind::Oracle {
            return Ok(());
        }
        let points = self.grid.points_checked(match self.grid.parameter {
            SweepParameter::Lambda => "--lambda-grid",
            SweepParameter::Omega0 => "--omega0-grid",
        })?;
        if self.grid.parameter == SweepParameter::Omega0 && self.mode == SweepMode::NormalPhase {
            let d = &self.spec.dicke;
            let w0c = dicke::critical_omega0(d.omega, d.lambda)?;
            if let Some(bad) = points.iter().find(|&&w| w <= w0c) {
                return Err(cfg(
                    "--omega0-grid",
                    format!("normal-phase mode requires ω₀ > ω₀,c = {w0c}; grid contains {bad}"),
                ));
            }
        }
        if self.grid.parameter == SweepParameter::Lambda && self.mode == SweepMode::NormalPhase {
            let d = &self.spec.dicke;
            let lc = dicke::critical_coupling(d.omega, d.omega0)?;
            if let Some(bad) = points.iter().find(|&&l| l >= lc) {
                return Err(cfg(
                    "--lambda-grid",
                    format!("normal-phase mode requires λ < λ_c = {lc}; grid contains {bad}"),
                ));
            }
        }
        if points.iter().any(|&x| x < 0.0) {
            return Err(cfg("grid", "values must be non-negative".into()));
        }
        match self.cutoff {
            CutoffPolicy::Fixed { n_max } if n_max == 0 => {
                return Err(cfg("--n-max", "must be at least 1".into()));
            }
            CutoffPolicy::Auto { rel_tol } if !(rel_tol > 0.0 && rel_tol < 1.0) => {
                return Err(cfg("--auto-cutoff", format!("tolerance must lie in (0, 1), got {rel_tol}")));
            }
            _ => {}
        }
        if self.mode == SweepMode::MeFull && !self.spec.include_tq {
            return Err(cfg("--mode", "me-tq needs the transport qubit".into()));
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(**l >= 0.0)) {
            return Err(cfg("--lambda", format!("coupling must be non-negative, got {l}")));
        }
        if self.bins < 10 {
            return Err(cfg("--bins", "at least 10 bins are required".into()));
        }
        Ok(())
    }
}

fn flag_for(name: &str) -> String {
    match name {
        "gamma_b" => "--gamma-b".into(),
        "gamma_l" => "--gamma-l".into(),
        "gamma_r" => "--gamma-r".into(),
        "delta" => "--tc".into(),
        "omega0" => "--omega0".into(),
        other => format!("--{}", other.replace('_', "-")),
    }
}
