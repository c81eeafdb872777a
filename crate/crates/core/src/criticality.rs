//! Coupling sweeps, derivative curves, and finite-size scaling fits.

use serde::{Deserialize, Serialize};

use crate::dicke::{self, DickeTerms};
use crate::eigen::{self, EigenOptions};
use crate::error::{Error, Result};
use crate::open_system::{self, SteadyStateSolver, SystemSpec};
use crate::transport::{self, TransportQubit};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Lambda,
    Omega0,
}

/// Backend used to obtain `⟨a†a⟩` and the transport observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Finite-N Dicke ground state with the passive-measurement formulas.
    GroundState,
    /// `N → ∞` normal-phase occupation with the passive-measurement formulas.
    NormalPhase,
    /// Cavity-loss master equation without the transport qubit.
    MeNoBackaction,
    /// Cavity loss plus the transport qubit and its back-action.
    MeFull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Occupation,
    Current,
    Fano,
}

impl Observable {
    pub fn label(self) -> &'static str {
        match self {
            Observable::Occupation => "occupation",
            Observable::Current => "current",
            Observable::Fano => "fano",
        }
    }
}

/// One observable along a sorted parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub parameter_grid: Vec<f64>,
    pub observable: Vec<f64>,
    pub kind: Observable,
    /// Number of derivatives taken with respect to the parameter.
    pub derivative_order: u32,
    pub mode: SweepMode,
    pub spec: SystemSpec,
}

impl SweepResult {
    pub fn len(&self) -> usize {
        self.parameter_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parameter_grid.is_empty()
    }

    pub fn name(&self) -> String {
        match self.derivative_order {
            0 => self.kind.label().to_string(),
            1 => format!("d_{}", self.kind.label()),
            k => format!("d{k}_{}", self.kind.label()),
        }
    }
}

/// Every observable of a sweep, evaluated once per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub parameter_grid: Vec<f64>,
    pub mode: SweepMode,
    pub spec: SystemSpec,
    pub occupation: Vec<f64>,
    /// `I/e`; the passive formula except in [`SweepMode::MeFull`].
    pub current: Vec<f64>,
    pub fano: Vec<f64>,
}

impl Sweep {
    pub fn curve(&self, kind: Observable) -> SweepResult {
        let observable = match kind {
            Observable::Occupation => &self.occupation,
            Observable::Current => &self.current,
            Observable::Fano => &self.fano,
        };
        SweepResult {
            parameter: self.parameter,
            parameter_grid: self.parameter_grid.clone(),
            observable: observable.clone(),
            kind,
            derivative_order: 0,
            mode: self.mode,
            spec: self.spec,
        }
    }
}

/// Uniform grid `min, min+step, …` up to `max` (inclusive within rounding).
pub fn uniform_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite()) {
        return Err(Error::param("grid", "bounds must be finite"));
    }
    if min > max {
        return Err(Error::param("grid", format!("minimum {min} exceeds maximum {max}")));
    }
    if !(step > 0.0) {
        return Err(Error::param("grid", "step must be positive"));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| min + i as f64 * step).collect())
}

/// Default coupling grid: step 2.5e-3 on `[0.30, 0.60]` with 0.025 wings on `[0, 0.275]` and `[0.625, 0.80]`.
pub fn default_lambda_grid() -> Vec<f64> {
    [(0.0, 0.275, 0.025), (0.30, 0.60, 2.5e-3), (0.625, 0.80, 0.025)]
        .iter()
        .flat_map(|&(a, b, h)| uniform_grid(a, b, h).expect("static grid"))
        .collect()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::param("grid", "must not be empty"));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::param("grid", "values must be finite"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("grid", "must be strictly increasing"));
    }
    Ok(())
}

fn at(spec: &SystemSpec, parameter: SweepParameter, x: f64) -> SystemSpec {
    let mut s = *spec;
    match parameter {
        SweepParameter::Lambda => s.dicke.lambda = x,
        SweepParameter::Omega0 => s.dicke.omega0 = x,
    }
    s
}

fn passive_point(tq: &TransportQubit, occupation: f64) -> Result<(f64, f64)> {
    let current = transport::passive_current(tq, occupation)?;
    let (_, fano) = transport::passive_noise(tq, occupation)?;
    Ok((current, fano))
}

/// Evaluates `⟨a†a⟩`, `I/e` and `F(0)` along `grid` with the chosen backend.
pub fn sweep(spec: &SystemSpec, parameter: SweepParameter, grid: &[f64], mode: SweepMode) -> Result<Sweep> {
    sweep_with(spec, parameter, grid, mode, &EigenOptions::default())
}

pub fn sweep_with(
    spec: &SystemSpec,
    parameter: SweepParameter,
    grid: &[f64],
    mode: SweepMode,
    opts: &EigenOptions,
) -> Result<Sweep> {
    check_grid(grid)?;
    spec.validate()?;
    let tq = TransportQubit::from(spec);
    let mut occupation = Vec::with_capacity(grid.len());
    let mut current = Vec::with_capacity(grid.len());
    let mut fano = Vec::with_capacity(grid.len());

    match mode {
        SweepMode::NormalPhase => {
            for &x in grid {
                let s = at(spec, parameter, x);
                let d = &s.dicke;
                let lambda_c = dicke::critical_coupling(d.omega, d.omega0)?;
                if d.lambda >= lambda_c {
                    return Err(Error::param(
                        "grid",
                        format!("normal-phase mode requires λ < λ_c; point {x} gives λ = {} ≥ {lambda_c}", d.lambda),
                    ));
                }
                let occ = dicke::normal_phase_occupation(d.omega, d.omega0, d.lambda)?.occupation;
                let (i, f) = passive_point(&tq, occ)?;
                occupation.push(occ);
                current.push(i);
                fano.push(f);
            }
        }
        SweepMode::GroundState => {
            let base = spec.dicke;
            let basis = base.basis();
            // λ sweeps reuse the split Hamiltonian; ω₀ sweeps rebuild it
            let terms = match parameter {
                SweepParameter::Lambda => Some(DickeTerms::new(&base)?),
                SweepParameter::Omega0 => None,
            };
            let mut previous: Option<Vec<C64>> = None;
            for &x in grid {
                let s = at(spec, parameter, x);
                s.dicke.validate()?;
                let h = match &terms {
                    Some(t) => t.hamiltonian(x),
                    None => dicke::dicke_hamiltonian(&s.dicke)?,
                };
                let start = previous.take().unwrap_or_else(|| dicke::even_parity_start(&basis));
                let gs = eigen::ground_state_with(&h.data, opts, Some(&start))?;
                let occ = dicke::boson_occupation(&gs.state, &basis);
                let (i, f) = passive_point(&tq, occ)?;
                occupation.push(occ);
                current.push(i);
                fano.push(f);
                previous = Some(gs.state);
            }
        }
        SweepMode::MeNoBackaction => {
            for &x in grid {
                let s = SystemSpec {
                    include_tq: false,
                    ..at(spec, parameter, x)
                };
                let l = open_system::build_liouvillian(&s)?;
                let rho = open_system::steady_state(&l)?;
                let occ = rho.boson_occupation()?;
                let (i, f) = passive_point(&tq, occ)?;
                occupation.push(occ);
                current.push(i);
                fano.push(f);
            }
        }
        SweepMode::MeFull => {
            if !spec.include_tq {
                return Err(Error::MissingTransportQubit);
            }
            for &x in grid {
                let s = at(spec, parameter, x);
                let l = open_system::build_liouvillian(&s)?;
                let solver = SteadyStateSolver::new(&l)?;
                let (result, occ) = transport::me_transport(&solver, &s)?;
                occupation.push(occ);
                current.push(result.current);
                fano.push(result.fano);
            }
        }
    }

    Ok(Sweep {
        parameter,
        parameter_grid: grid.to_vec(),
        mode,
        spec: *spec,
        occupation,
        current,
        fano,
    })
}

/// Three-point finite differences: central (exact for quadratics on any
/// spacing) inside, second-order one-sided at the ends.
pub fn derivative(curve: &SweepResult) -> Result<SweepResult> {
    let x = &curve.parameter_grid;
    let y = &curve.observable;
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!("grid has {n} points, observable {}", y.len())));
    }
    check_grid(x)?;

    // derivative at x[at] of the parabola through points i, i+1, i+2
    let three_point = |i: usize, at: usize| -> f64 {
        let (x0, x1, x2) = (x[i], x[i + 1], x[i + 2]);
        let (y0, y1, y2) = (y[i], y[i + 1], y[i + 2]);
        let t = x[at];
        y0 * ((t - x1) + (t - x2)) / ((x0 - x1) * (x0 - x2))
            + y1 * ((t - x0) + (t - x2)) / ((x1 - x0) * (x1 - x2))
            + y2 * ((t - x0) + (t - x1)) / ((x2 - x0) * (x2 - x1))
    };

    let mut out = Vec::with_capacity(n);
    out.push(three_point(0, 0));
    for i in 1..n - 1 {
        out.push(three_point(i - 1, i));
    }
    out.push(three_point(n - 3, n - 1));

    Ok(SweepResult {
        observable: out,
        derivative_order: curve.derivative_order + 1,
        ..curve.clone()
    })
}

/// Location and value of the interior minimum, refined by the parabola
/// through the grid minimum and its neighbours.
pub fn find_minimum(curve: &SweepResult) -> Result<(f64, f64)> {
    let x = &curve.parameter_grid;
    let y = &curve.observable;
    if x.len() < 3 || y.len() != x.len() {
        return Err(Error::InsufficientData { needed: 3, got: x.len().min(y.len()) });
    }
    let mut k = 0;
    for i in 1..y.len() {
        if y[i] < y[k] {
            k = i;
        }
    }
    if y.iter().any(|v| v.is_nan()) {
        return Err(Error::Undefined("minimum", "curve contains NaN".into()));
    }
    if k == 0 || k + 1 == y.len() {
        return Err(Error::ExtremumNotBracketed { index: k });
    }
    let (x0, x1, x2) = (x[k - 1], x[k], x[k + 1]);
    let (y0, y1, y2) = (y[k - 1], y[k], y[k + 1]);
    // divided differences of the interpolating parabola
    let f01 = (y1 - y0) / (x1 - x0);
    let f12 = (y2 - y1) / (x2 - x1);
    let curvature = (f12 - f01) / (x2 - x0);
    if curvature <= 0.0 {
        return Ok((x1, y1));
    }
    let vertex = 0.5 * (x0 + x1) - f01 / (2.0 * curvature);
    let value = y0 + f01 * (vertex - x0) + curvature * (vertex - x0) * (vertex - x1);
    Ok((vertex, value))
}

/// Location and value of the interior maximum.
pub fn find_maximum(curve: &SweepResult) -> Result<(f64, f64)> {
    let negated = SweepResult {
        observable: curve.observable.iter().map(|v| -v).collect(),
        ..curve.clone()
    };
    let (x, v) = find_minimum(&negated)?;
    Ok((x, -v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    /// `y = prefactor · N^exponent`
    PowerLaw,
    /// `y = prefactor + exponent · log₂N`
    Log2Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    /// Power-law exponent, or slope per doubling of `N` for [`FitKind::Log2Linear`].
    pub exponent: f64,
    pub exponent_err: f64,
    /// Amplitude of the power law, or the intercept of the log-linear fit.
    pub prefactor: f64,
    pub points: Vec<(f64, f64)>,
    pub fit_kind: FitKind,
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, stderr(b))`.
fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::param("points", "abscissas are degenerate"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let err = (rss / (nf - 2.0) / sxx).sqrt();
    Ok((intercept, slope, err))
}

/// Power law `y ∝ N^exponent` by least squares in log-log coordinates.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: points.len() });
    }
    if let Some(&(n, y)) = points.iter().find(|&&(n, y)| !(y > 0.0) || !(n > 0.0)) {
        return Err(Error::param("points", format!("power-law fit needs positive data, got ({n}, {y})")));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (a, b, err) = ols(&x, &y)?;
    Ok(ScalingFit {
        exponent: b,
        exponent_err: err,
        prefactor: a.exp(),
        points: points.to_vec(),
        fit_kind: FitKind::PowerLaw,
    })
}

/// Straight line in `(log₂N, y)`.
pub fn fit_log_scaling(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: points.len() });
    }
    if let Some(&(n, _)) = points.iter().find(|&&(n, _)| !(n > 0.0)) {
        return Err(Error::param("points", format!("N must be positive, got {n}")));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.log2()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (a, b, err) = ols(&x, &y)?;
    Ok(ScalingFit {
        exponent: b,
        exponent_err: err,
        prefactor: a,
        points: points.to_vec(),
        fit_kind: FitKind::Log2Linear,
    })
}

/// Position and value of the current-derivative minimum for one `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeMinimum {
    pub n_qubits: usize,
    pub n_max: usize,
    pub lambda_m: f64,
    pub value: f64,
}

/// Ground-state sweep of `spec` for `N`, cutoff chosen at the largest grid
/// coupling, then the minimum of `d(I/e)/dλ`.
pub fn current_derivative_minimum(
    spec: &SystemSpec,
    n_qubits: usize,
    grid: &[f64],
    cutoff_tol: f64,
) -> Result<(DerivativeMinimum, Sweep)> {
    check_grid(grid)?;
    let top = spec.dicke.with_lambda(*grid.last().unwrap());
    let top = dicke::DickeParams { n_qubits, ..top };
    let n_max = dicke::cutoff_convergence(&top, cutoff_tol)?;
    let mut s = *spec;
    s.dicke.n_qubits = n_qubits;
    s.dicke.n_max = n_max;
    let sw = sweep(&s, SweepParameter::Lambda, grid, SweepMode::GroundState)?;
    let d = derivative(&sw.curve(Observable::Current))?;
    let (lambda_m, value) = find_minimum(&d)?;
    Ok((
        DerivativeMinimum {
            n_qubits,
            n_max,
            lambda_m,
            value,
        },
        sw,
    ))
}
