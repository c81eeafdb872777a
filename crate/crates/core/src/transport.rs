//! Current and zero-frequency shot noise through the transport qubit.
//!
//! Two families of closed forms live here:
//!
//! * the `passive_*` functions evaluate the passive-measurement expressions
//!   used for the figure curves, with `T_c ≡ Δ` and detuning `ε + g⟨a†a⟩`;
//! * the `counting_*` functions are the counting-statistics result for the
//!   three-state model exactly as it is simulated (`H = εσ_z + Δσ_x`, so the
//!   `L`–`R` level difference is `2ε`, and the ratio `Γ_R/Γ_L` in the
//!   current denominator).
//!
//! The two coincide when `ε + g⟨a†a⟩ = 0` and `Γ_L = Γ_R`. Elsewhere they
//! differ by the substitutions `ε → 2ε` and `Γ_L/Γ_R → Γ_R/Γ_L`; the
//! master-equation route agrees with the `counting_*` forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::open_system::{DensityMatrix, LiouvillianMatrix, SteadyStateSolver, SystemSpec};
use crate::operators;
use crate::sparse::CsrMatrix;
use crate::C64;

/// Transport-qubit parameters entering the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportQubit {
    pub epsilon: f64,
    /// Coherent tunneling `Δ`, written `T_c` in the transport formulas.
    pub delta: f64,
    pub g: f64,
    pub gamma_l: f64,
    pub gamma_r: f64,
}

impl From<&SystemSpec> for TransportQubit {
    fn from(spec: &SystemSpec) -> Self {
        Self {
            epsilon: spec.epsilon,
            delta: spec.delta,
            g: spec.g,
            gamma_l: spec.gamma_l,
            gamma_r: spec.gamma_r,
        }
    }
}

impl TransportQubit {
    /// `ε + g⟨a†a⟩`
    pub fn effective_detuning(&self, occupation: f64) -> f64 {
        self.epsilon + self.g * occupation
    }

    fn check_rates(&self) -> Result<()> {
        if !(self.gamma_r > 0.0) {
            return Err(Error::param("gamma_r", "closed form requires Γ_R > 0"));
        }
        if !(self.gamma_l > 0.0) {
            return Err(Error::param("gamma_l", "closed form requires Γ_L > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportResult {
    /// `I/e`
    pub current: f64,
    /// `S(0)/e²`
    pub noise_zero_freq: f64,
    /// `F(0) = S(0)/2eI`
    pub fano: f64,
    pub effective_detuning: f64,
}

/// Closed-form passive-measurement current:
/// `I/e = T_c²Γ_R / [T_c²(2 + Γ_L/Γ_R) + Γ_R²/4 + (ε + g⟨a†a⟩)²]`.
pub fn passive_current(tq: &TransportQubit, occupation: f64) -> Result<f64> {
    if !(tq.gamma_r > 0.0) {
        return Err(Error::param("gamma_r", "closed form requires Γ_R > 0"));
    }
    let tc2 = tq.delta * tq.delta;
    let e = tq.effective_detuning(occupation);
    let gr = tq.gamma_r;
    Ok(tc2 * gr / (tc2 * (2.0 + tq.gamma_l / gr) + gr * gr / 4.0 + e * e))
}

/// Bracket of the closed-form noise formula, `F(0) = 1 − 8Γ_L T_c² A / B²`,
/// evaluated with detuning `detuning`.
fn fano_bracket(tq: &TransportQubit, detuning: f64) -> f64 {
    let (gl, gr) = (tq.gamma_l, tq.gamma_r);
    let tc2 = tq.delta * tq.delta;
    let e2 = detuning * detuning;
    let numerator = 4.0 * e2 * (gr - gl) + gr * (3.0 * gl * gr + gr * gr + 8.0 * tc2);
    let denominator = 4.0 * tc2 * (2.0 * gl + gr) + gl * gr * gr + 4.0 * e2 * gl;
    1.0 - 8.0 * gl * tc2 * numerator / (denominator * denominator)
}

/// Closed-form passive-measurement noise; returns `(S(0), F(0))`.
pub fn passive_noise(tq: &TransportQubit, occupation: f64) -> Result<(f64, f64)> {
    tq.check_rates()?;
    let current = passive_current(tq, occupation)?;
    if current == 0.0 {
        return Err(Error::Undefined("Fano factor", "current vanishes".into()));
    }
    let fano = fano_bracket(tq, tq.effective_detuning(occupation));
    Ok((2.0 * current * fano, fano))
}

pub fn passive_transport(tq: &TransportQubit, occupation: f64) -> Result<TransportResult> {
    let current = passive_current(tq, occupation)?;
    let (noise_zero_freq, fano) = passive_noise(tq, occupation)?;
    Ok(TransportResult {
        current,
        noise_zero_freq,
        fano,
        effective_detuning: tq.effective_detuning(occupation),
    })
}

/// Counting-statistics current of the simulated three-state model:
/// `I/e = Δ²Γ_R / [Δ²(2 + Γ_R/Γ_L) + Γ_R²/4 + (2ε_eff)²]`.
pub fn counting_current(tq: &TransportQubit, occupation: f64) -> Result<f64> {
    tq.check_rates()?;
    let tc2 = tq.delta * tq.delta;
    let level_gap = 2.0 * tq.effective_detuning(occupation);
    let (gl, gr) = (tq.gamma_l, tq.gamma_r);
    Ok(tc2 * gr / (tc2 * (2.0 + gr / gl) + gr * gr / 4.0 + level_gap * level_gap))
}

/// Counting-statistics noise of the simulated model; returns `(S(0), F(0))`.
pub fn counting_noise(tq: &TransportQubit, occupation: f64) -> Result<(f64, f64)> {
    let current = counting_current(tq, occupation)?;
    if current == 0.0 {
        return Err(Error::Undefined("Fano factor", "current vanishes".into()));
    }
    let fano = fano_bracket(tq, 2.0 * tq.effective_detuning(occupation));
    Ok((2.0 * current * fano, fano))
}

pub fn counting_transport(tq: &TransportQubit, occupation: f64) -> Result<TransportResult> {
    let current = counting_current(tq, occupation)?;
    let (noise_zero_freq, fano) = counting_noise(tq, occupation)?;
    Ok(TransportResult {
        current,
        noise_zero_freq,
        fano,
        effective_detuning: tq.effective_detuning(occupation),
    })
}

/// First two cumulant rates of the jumps `X` counted at `rate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingStatistics {
    pub current: f64,
    /// `S(0) = 2·C₂`
    pub noise_zero_freq: f64,
    pub fano: f64,
}

/// Counts jumps `ρ → rate·XρX†` in the stationary state of the factorized generator.
///
/// `C₁ = rate·Tr(X†Xρ)`, `C₂ = C₁ − 2·rate²·Re Tr(X†X · L⁺[XρX†])`.
pub fn counting_statistics(solver: &SteadyStateSolver, rate: f64, jump: &CsrMatrix) -> Result<CountingStatistics> {
    let rho = solver.steady_state();
    let d = rho.dim();
    if jump.nrows() != d {
        return Err(Error::DimensionMismatch(format!(
            "jump operator dimension {} vs state dimension {d}",
            jump.nrows()
        )));
    }
    let projector = jump.adjoint().matmul(jump);
    let current = rate * rho.expectation(&projector).re;

    // vec(XρX†) via (X̄ ⊗ X) vec(ρ)
    let jumped = jump.conj().kron(jump).matvec(&rho.vectorize());
    let response = solver.pseudoinverse_apply(&jumped)?;
    let response = DensityMatrix::from_vectorized(&response, rho.layout.clone())?;
    let correlation = response.expectation(&projector).re;

    let second = current - 2.0 * rate * rate * correlation;
    let noise_zero_freq = 2.0 * second;
    let fano = if current != 0.0 {
        second / current
    } else {
        f64::NAN
    };
    Ok(CountingStatistics {
        current,
        noise_zero_freq,
        fano,
    })
}

fn right_jump(rho: &DensityMatrix) -> Result<CsrMatrix> {
    rho.layout.embed_tq(&operators::tq_operators().s_r.data)
}

/// `I/e = Γ_R·Tr[s_R†s_R ρ]`
pub fn me_current(rho: &DensityMatrix, gamma_r: f64) -> Result<f64> {
    let s_r = right_jump(rho)?;
    let occupation_r = rho.expectation(&s_r.adjoint().matmul(&s_r)).re;
    Ok(gamma_r * occupation_r)
}

/// Zero-frequency noise `S(0)/e²` of the right-lead current from a
/// factorized generator.
pub fn me_noise_with_solver(solver: &SteadyStateSolver, gamma_r: f64) -> Result<f64> {
    let s_r = right_jump(solver.steady_state())?;
    Ok(counting_statistics(solver, gamma_r, &s_r)?.noise_zero_freq)
}

/// Zero-frequency noise for a generator and its stationary state.
pub fn me_noise_zero_freq(l: &LiouvillianMatrix, rho_ss: &DensityMatrix, gamma_r: f64) -> Result<f64> {
    if !rho_ss.layout.has_tq {
        return Err(Error::MissingTransportQubit);
    }
    let solver = SteadyStateSolver::new(l)?;
    let deviation = solver
        .steady_state()
        .vectorize()
        .iter()
        .zip(rho_ss.vectorize())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if deviation > 1e-8 {
        return Err(Error::DimensionMismatch(format!(
            "supplied state is not stationary for this generator ({deviation:e})"
        )));
    }
    me_noise_with_solver(&solver, gamma_r)
}

/// Full master-equation transport: returns the result and the cavity occupation.
pub fn me_transport(solver: &SteadyStateSolver, spec: &SystemSpec) -> Result<(TransportResult, f64)> {
    let rho = solver.steady_state();
    let s_r = right_jump(rho)?;
    let stats = counting_statistics(solver, spec.gamma_r, &s_r)?;
    let occupation = match rho.layout.basis {
        Some(_) => rho.boson_occupation()?,
        None => 0.0,
    };
    Ok((
        TransportResult {
            current: stats.current,
            noise_zero_freq: stats.noise_zero_freq,
            fano: stats.fano,
            effective_detuning: spec.epsilon + spec.g * occupation,
        },
        occupation,
    ))
}

/// Probability of each TQ state in a density matrix (`|0⟩, |L⟩, |R⟩`).
pub fn tq_populations(rho: &DensityMatrix) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (state, slot) in out.iter_mut().enumerate() {
        let proj = CsrMatrix::from_triplets(3, 3, &[(state, state, C64::new(1.0, 0.0))]);
        *slot = rho.expectation(&rho.layout.embed_tq(&proj)?).re;
    }
    Ok(out)
}
