//! The closed Dicke model: Hamiltonian, finite-N ground states, and the exact
//! normal-phase solution in the thermodynamic limit.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::eigen::{self, EigenOptions, GroundState};
use crate::error::{Error, Result};
use crate::operators::{self, BasisSpec, OperatorMatrix, SpinComponent};
use crate::C64;

/// Largest Fock cutoff [`cutoff_convergence`] will try.
pub const DEFAULT_CUTOFF_CAP: usize = 400;
/// Step between the two cutoffs compared by [`cutoff_convergence`].
pub const CUTOFF_STEP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DickeParams {
    pub omega: f64,
    pub omega0: f64,
    pub lambda: f64,
    pub n_qubits: usize,
    pub n_max: usize,
}

impl DickeParams {
    pub fn new(omega: f64, omega0: f64, lambda: f64, n_qubits: usize, n_max: usize) -> Result<Self> {
        let p = Self {
            omega,
            omega0,
            lambda,
            n_qubits,
            n_max,
        };
        p.validate()?;
        Ok(p)
    }

    /// Resonant parameters `ω = ω₀ = 1`.
    pub fn resonant(lambda: f64, n_qubits: usize, n_max: usize) -> Result<Self> {
        Self::new(1.0, 1.0, lambda, n_qubits, n_max)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) {
            return Err(Error::param("omega", "must be positive"));
        }
        if !(self.omega0 >= 0.0) {
            return Err(Error::param("omega0", "must be non-negative"));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::param("lambda", "must be non-negative"));
        }
        self.basis().validate()
    }

    pub fn basis(&self) -> BasisSpec {
        BasisSpec {
            n_max: self.n_max,
            n_qubits: self.n_qubits,
            include_tq: false,
        }
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn with_n_max(self, n_max: usize) -> Self {
        Self { n_max, ..self }
    }
}

/// `H = H_free + λ·V` split, so sweeps over λ reuse both pieces.
#[derive(Debug, Clone)]
pub struct DickeTerms {
    /// `ω₀ J_z + ω a†a`
    pub free: OperatorMatrix,
    /// `(a† + a)(J₊ + J₋)/√N`
    pub coupling: OperatorMatrix,
}

impl DickeTerms {
    pub fn new(p: &DickeParams) -> Result<Self> {
        p.validate()?;
        let basis = p.basis();
        let a = operators::boson_annihilation(p.n_max)?;
        let num = operators::boson_number(p.n_max)?;
        let jz = operators::collective_spin(p.n_qubits, SpinComponent::Z)?;
        let jp = operators::collective_spin(p.n_qubits, SpinComponent::Plus)?;
        let jm = operators::collective_spin(p.n_qubits, SpinComponent::Minus)?;

        let free = basis
            .embed_spin(&jz)
            .scale(p.omega0)
            .add(&basis.embed_boson(&num).scale(p.omega));
        let x = a.add(&a.adjoint());
        let jx2 = jp.add(&jm);
        let coupling = operators::tensor(&[&x, &jx2]).scale(1.0 / (p.n_qubits as f64).sqrt());
        Ok(Self { free, coupling })
    }

    pub fn hamiltonian(&self, lambda: f64) -> OperatorMatrix {
        let mut h = self.free.add(&self.coupling.scale(lambda));
        h.label = format!("H_D(λ={lambda})");
        h
    }
}

/// `H_D = ω₀J_z + ω a†a + (λ/√N)(a† + a)(J₊ + J₋)` on boson ⊗ spin.
pub fn dicke_hamiltonian(p: &DickeParams) -> Result<OperatorMatrix> {
    Ok(DickeTerms::new(p)?.hamiltonian(p.lambda))
}

/// Deterministic start vector confined to the even-parity sector.
pub fn even_parity_start(basis: &BasisSpec) -> Vec<C64> {
    basis
        .parity_diagonal()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if p > 0 {
                C64::new(1.0 / (1.0 + i as f64).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect()
}

/// Ground state of `H_D`, seeded in the even-parity sector unless `start` is given.
pub fn dicke_ground_state(
    p: &DickeParams,
    opts: &EigenOptions,
    start: Option<&[C64]>,
) -> Result<GroundState> {
    let h = dicke_hamiltonian(p)?;
    let seed = match start {
        Some(s) => s.to_vec(),
        None => even_parity_start(&p.basis()),
    };
    eigen::ground_state_with(&h.data, opts, Some(&seed))
}

/// `⟨ψ|a†a|ψ⟩` for a normalized state on `basis`.
pub fn boson_occupation(state: &[C64], basis: &BasisSpec) -> f64 {
    state
        .iter()
        .enumerate()
        .map(|(idx, amp)| {
            let (_, n, _) = basis.decompose(idx);
            n as f64 * amp.norm_sqr()
        })
        .sum()
}

/// Critical coupling `λ_c = √(ω ω₀)/2`.
pub fn critical_coupling(omega: f64, omega0: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::param("omega", "must be positive"));
    }
    if !(omega0 > 0.0) {
        return Err(Error::param("omega0", "must be positive"));
    }
    Ok((omega * omega0).sqrt() / 2.0)
}

/// Qubit splitting at which a fixed coupling becomes critical: `ω₀,c = 4λ²/ω`.
pub fn critical_omega0(omega: f64, lambda: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::param("omega", "must be positive"));
    }
    Ok(4.0 * lambda * lambda / omega)
}

/// Normal-phase excitation energies `(ε₋, ε₊)`.
pub fn excitation_branches(omega: f64, omega0: f64, lambda: f64) -> Result<(f64, f64)> {
    let lambda_c = critical_coupling(omega, omega0)?;
    if lambda > lambda_c {
        return Err(Error::NormalPhaseInvalid { lambda, lambda_c });
    }
    let disc = ((omega0 * omega0 - omega * omega).powi(2)
        + 16.0 * lambda * lambda * omega * omega0)
        .sqrt();
    let plus_sq = 0.5 * (omega * omega + omega0 * omega0 + disc);
    // ε₋²ε₊² = ωω₀(ωω₀ − 4λ²), which avoids cancellation near λ_c
    let product = omega * omega0 * (omega * omega0 - 4.0 * lambda * lambda);
    let minus_sq = (product / plus_sq).max(0.0);
    Ok((minus_sq.sqrt(), plus_sq.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalPhaseSolution {
    pub eps_minus: f64,
    pub eps_plus: f64,
    /// Mixing angle γ⁽¹⁾ in `[0, π/2]`.
    pub gamma_angle: f64,
    pub c: f64,
    pub s: f64,
    /// `[s c (ε₋ − ε₊)]²`
    pub d: f64,
    /// `⟨a†a⟩` in the ground state.
    pub occupation: f64,
    /// βΩ of the equivalent thermal oscillator (infinite when decoupled).
    pub beta_omega: f64,
    /// Ω of the equivalent thermal oscillator with unit mass.
    pub effective_frequency: f64,
    /// Effective temperature `T = Ω / (βΩ)`.
    pub effective_temperature: f64,
}

/// Exact `N → ∞` ground-state photon number below the transition.
pub fn normal_phase_occupation(omega: f64, omega0: f64, lambda: f64) -> Result<NormalPhaseSolution> {
    let lambda_c = critical_coupling(omega, omega0)?;
    if !(lambda >= 0.0) {
        return Err(Error::param("lambda", "must be non-negative"));
    }
    if lambda >= lambda_c {
        return Err(Error::NormalPhaseInvalid { lambda, lambda_c });
    }
    let (em, ep) = excitation_branches(omega, omega0, lambda)?;

    let denom = omega0 * omega0 - omega * omega;
    let two_gamma = if denom == 0.0 {
        FRAC_PI_2
    } else {
        (4.0 * lambda * (omega * omega0).sqrt()).atan2(denom)
    };
    let gamma_angle = 0.5 * two_gamma;
    let (s, c) = gamma_angle.sin_cos();
    let d = (s * c * (em - ep)).powi(2);

    let product = em * ep;
    let mixed = em * s * s + ep * c * c;
    let occupation =
        (d + product) / (4.0 * omega * mixed) + omega * mixed / (4.0 * product) - 0.5;

    let (beta_omega, effective_frequency) = if d > 0.0 {
        let cosh = 1.0 + 2.0 * product / d;
        (cosh.acosh(), (product * (d + product)).sqrt() / mixed)
    } else {
        (f64::INFINITY, product / mixed)
    };
    let effective_temperature = if beta_omega.is_finite() {
        effective_frequency / beta_omega
    } else {
        0.0
    };

    Ok(NormalPhaseSolution {
        eps_minus: em,
        eps_plus: ep,
        gamma_angle,
        c,
        s,
        d,
        occupation,
        beta_omega,
        effective_frequency,
        effective_temperature,
    })
}

/// Result of a Fock-cutoff convergence scan.
#[derive(Debug, Clone)]
pub struct CutoffScan {
    pub n_max: usize,
    /// `(n_max, ⟨a†a⟩)` for every cutoff evaluated, ascending.
    pub occupations: Vec<(usize, f64)>,
}

/// Smallest cutoff whose ground-state `⟨a†a⟩` moves by less than `rel_tol`
/// (relative) when the cutoff grows by [`CUTOFF_STEP`].
pub fn cutoff_convergence(p: &DickeParams, rel_tol: f64) -> Result<usize> {
    Ok(cutoff_scan(p, rel_tol, DEFAULT_CUTOFF_CAP, &EigenOptions::default())?.n_max)
}

pub fn cutoff_scan(
    p: &DickeParams,
    rel_tol: f64,
    cap: usize,
    opts: &EigenOptions,
) -> Result<CutoffScan> {
    if !(rel_tol > 0.0) {
        return Err(Error::param("rel_tol", "must be positive"));
    }
    p.with_n_max(1).validate()?;

    let mut cache: HashMap<usize, f64> = HashMap::new();
    let mut previous: Option<(usize, Vec<C64>)> = None;
    let mut occupation = |n_max: usize| -> Result<f64> {
        if let Some(&v) = cache.get(&n_max) {
            return Ok(v);
        }
        let params = p.with_n_max(n_max);
        let basis = params.basis();
        let start = previous
            .as_ref()
            .map(|(old_max, old)| lift_state(old, *old_max, &basis));
        let gs = dicke_ground_state(&params, opts, start.as_deref())?;
        let occ = boson_occupation(&gs.state, &basis);
        previous = Some((n_max, gs.state));
        cache.insert(n_max, occ);
        Ok(occ)
    };

    let mut last = [f64::NAN, f64::NAN];
    let mut converged = |n_max: usize, last: &mut [f64; 2]| -> Result<bool> {
        let lo = occupation(n_max)?;
        let hi = occupation(n_max + CUTOFF_STEP)?;
        *last = [lo, hi];
        Ok((hi - lo).abs() <= rel_tol * hi.abs())
    };

    // Coarse pass in strides of CUTOFF_STEP (each probe reuses the previous
    // upper cutoff), then bisection back to the first converged cutoff. The
    // change between cutoffs shrinks monotonically once the occupation is
    // resolved, so this finds the same cutoff as a unit-stride scan.
    let top = cap.saturating_sub(CUTOFF_STEP);
    let mut failing = 0;
    let mut passing = None;
    let mut n_max = 1;
    while n_max <= top {
        if converged(n_max, &mut last)? {
            passing = Some(n_max);
            break;
        }
        failing = n_max;
        n_max += CUTOFF_STEP;
    }
    let Some(mut passing) = passing else {
        return Err(Error::CutoffCapExceeded { cap, last });
    };
    while passing > failing + 1 && passing > 1 {
        let mid = (failing + passing) / 2;
        if mid == 0 {
            break;
        }
        if converged(mid, &mut last)? {
            passing = mid;
        } else {
            failing = mid;
        }
    }

    let mut occupations: Vec<_> = cache.into_iter().collect();
    occupations.sort_unstable_by_key(|&(n, _)| n);
    Ok(CutoffScan {
        n_max: passing,
        occupations,
    })
}

/// Embeds a state from a smaller Fock cutoff into `basis` (zero-padded).
pub fn lift_state(state: &[C64], old_n_max: usize, basis: &BasisSpec) -> Vec<C64> {
    let old = BasisSpec {
        n_max: old_n_max,
        ..*basis
    };
    let mut out = vec![C64::new(0.0, 0.0); basis.dimension()];
    for (idx, &amp) in state.iter().enumerate() {
        let (tq, n, k) = old.decompose(idx);
        if n <= basis.n_max {
            out[basis.compose(tq, n, k)] = amp;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::dense_hermitian_eigen;

    #[test]
    fn decoupled_hamiltonian_is_diagonal() {
        let p = DickeParams::resonant(0.0, 3, 5).unwrap();
        let h = dicke_hamiltonian(&p).unwrap();
        assert!(h.data.iter().all(|(i, j, _)| i == j));
        let gs = eigen::ground_state(&h, 1e-10).unwrap();
        assert!((gs.energy + 1.5).abs() < 1e-12);
    }

    #[test]
    fn single_qubit_reduces_to_rabi() {
        let lambda = 0.3;
        let p = DickeParams::resonant(lambda, 1, 4).unwrap();
        let h = dicke_hamiltonian(&p).unwrap();
        let a = operators::boson_annihilation(4).unwrap();
        let sx = operators::collective_spin(1, SpinComponent::Plus)
            .unwrap()
            .add(&operators::collective_spin(1, SpinComponent::Minus).unwrap());
        let rabi = p
            .basis()
            .embed_spin(&operators::collective_spin(1, SpinComponent::Z).unwrap())
            .add(&p.basis().embed_boson(&operators::boson_number(4).unwrap()))
            .add(&operators::tensor(&[&a.add(&a.adjoint()), &sx]).scale(lambda));
        assert!((&h.data - &rabi.data).max_abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let p = DickeParams::new(1.0, 0.7, 0.45, 6, 12).unwrap();
        let h = dicke_hamiltonian(&p).unwrap();
        assert!(h.hermiticity_defect() <= 1e-14);
    }

    #[test]
    fn parity_commutes_with_hamiltonian() {
        let p = DickeParams::resonant(0.3, 4, 20).unwrap();
        let h = dicke_hamiltonian(&p).unwrap();
        let pi = operators::parity_operator(4, 20).unwrap();
        assert!(h.commutator(&pi).data.max_abs() <= 1e-12);
    }

    #[test]
    fn ground_state_at_zero_coupling() {
        let p = DickeParams::resonant(0.0, 2, 6).unwrap();
        let gs = dicke_ground_state(&p, &EigenOptions::default(), None).unwrap();
        assert!((gs.energy + 1.0).abs() < 1e-12);
        let basis = p.basis();
        let target = basis.compose(None, 0, 0);
        assert!((gs.state[target].norm() - 1.0).abs() < 1e-12);
        assert_eq!(boson_occupation(&gs.state, &basis), 0.0);
    }

    #[test]
    fn occupation_of_fock_state() {
        let basis = BasisSpec::new(5, 2, false).unwrap();
        let mut psi = vec![C64::new(0.0, 0.0); basis.dimension()];
        psi[basis.compose(None, 3, 1)] = C64::new(0.0, 1.0);
        assert!((boson_occupation(&psi, &basis) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn critical_coupling_values() {
        assert_eq!(critical_coupling(1.0, 1.0).unwrap(), 0.5);
        assert_eq!(critical_coupling(4.0, 1.0).unwrap(), 1.0);
        assert!((critical_omega0(1.0, 0.1).unwrap() - 0.04).abs() < 1e-15);
        assert!(critical_coupling(0.0, 1.0).is_err());
    }

    #[test]
    fn branches_at_zero_coupling() {
        let (m, p) = excitation_branches(1.0, 2.5, 0.0).unwrap();
        assert_eq!((m, p), (1.0, 2.5));
        let (m, p) = excitation_branches(1.3, 0.4, 0.0).unwrap();
        assert!((m - 0.4).abs() < 1e-15 && (p - 1.3).abs() < 1e-15);
    }

    #[test]
    fn branches_resonant_value() {
        let (m, p) = excitation_branches(1.0, 1.0, 0.4).unwrap();
        assert!((m - 0.2f64.sqrt()).abs() < 1e-14);
        assert!((p - 1.8f64.sqrt()).abs() < 1e-14);
        let (m, _) = excitation_branches(1.0, 1.0, 0.5).unwrap();
        assert_eq!(m, 0.0);
        assert!(matches!(
            excitation_branches(1.0, 1.0, 0.51),
            Err(Error::NormalPhaseInvalid { .. })
        ));
    }

    #[test]
    fn lower_branch_decreases() {
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let (m, _) = excitation_branches(1.0, 1.0, i as f64 * 0.01).unwrap();
            assert!(m < prev);
            prev = m;
        }
    }

    #[test]
    fn normal_phase_resonant_reference() {
        let sol = normal_phase_occupation(1.0, 1.0, 0.4).unwrap();
        assert!((sol.eps_minus * sol.eps_plus - 0.6).abs() < 1e-14);
        assert!((sol.d - 0.2).abs() < 1e-14);
        assert!((sol.gamma_angle - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let mixed = sol.eps_minus * sol.s * sol.s + sol.eps_plus * sol.c * sol.c;
        assert!((mixed - 0.894_427_190_999_916).abs() < 1e-12);
        // 0.2/√0.8 + √0.8/2.4 − 1/2
        let expected = 0.2 / 0.8f64.sqrt() + 0.8f64.sqrt() / 2.4 - 0.5;
        assert!((sol.occupation - expected).abs() < 1e-14);
        assert!((sol.occupation - 0.09629).abs() < 1e-5);
        assert!((sol.c * sol.c + sol.s * sol.s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normal_phase_vacuum_limit() {
        for (w, w0) in [(1.0, 1.0), (1.0, 2.0), (2.0, 0.5)] {
            let sol = normal_phase_occupation(w, w0, 0.0).unwrap();
            assert!(sol.occupation.abs() < 1e-15, "{w} {w0}: {}", sol.occupation);
            assert!(sol.eps_plus >= sol.eps_minus);
        }
    }

    #[test]
    fn normal_phase_rejects_superradiant() {
        assert!(normal_phase_occupation(1.0, 1.0, 0.5).is_err());
        assert!(normal_phase_occupation(1.0, 1.0, 0.7).is_err());
    }

    /// Two coupled oscillators (the Holstein-Primakoff limit), diagonalized in a
    /// truncated two-mode Fock space, reproduce the closed form off resonance.
    #[test]
    fn normal_phase_matches_two_oscillator_oracle() {
        let cut = 28;
        for (omega, omega0, lambda) in [(1.0, 1.7, 0.4), (1.0, 0.6, 0.25), (1.0, 1.0, 0.3)] {
            let dim = cut + 1;
            let mut t = Vec::new();
            let idx = |na: usize, nb: usize| na * dim + nb;
            for na in 0..dim {
                for nb in 0..dim {
                    let e = omega * na as f64 + omega0 * nb as f64;
                    t.push((idx(na, nb), idx(na, nb), C64::new(e, 0.0)));
                    // λ (a + a†)(b + b†)
                    for (na2, fa) in [(na.wrapping_sub(1), (na as f64).sqrt()), (na + 1, (na as f64 + 1.0).sqrt())] {
                        for (nb2, fb) in [(nb.wrapping_sub(1), (nb as f64).sqrt()), (nb + 1, (nb as f64 + 1.0).sqrt())] {
                            if na2 < dim && nb2 < dim {
                                t.push((idx(na2, nb2), idx(na, nb), C64::new(lambda * fa * fb, 0.0)));
                            }
                        }
                    }
                }
            }
            let h = crate::sparse::CsrMatrix::from_triplets(dim * dim, dim * dim, &t);
            let (_, vecs) = dense_hermitian_eigen(&h).unwrap();
            let occ: f64 = (0..dim * dim)
                .map(|i| (i / dim) as f64 * vecs[(i, 0)].norm_sqr())
                .sum();
            let sol = normal_phase_occupation(omega, omega0, lambda).unwrap();
            assert!(
                (occ - sol.occupation).abs() < 1e-8,
                "ω₀={omega0} λ={lambda}: oracle {occ} vs {}",
                sol.occupation
            );
        }
    }

    #[test]
    fn cutoff_at_zero_coupling_is_minimal() {
        let p = DickeParams::resonant(0.0, 4, 1).unwrap();
        assert_eq!(cutoff_convergence(&p, 1e-6).unwrap(), 1);
    }

    #[test]
    fn cutoff_rejects_bad_tolerance() {
        let p = DickeParams::resonant(0.2, 4, 1).unwrap();
        assert!(cutoff_convergence(&p, 0.0).is_err());
    }

    #[test]
    fn cutoff_cap_reports_last_estimates() {
        let p = DickeParams::resonant(0.49, 8, 1).unwrap();
        match cutoff_scan(&p, 1e-12, 14, &EigenOptions::default()) {
            Err(Error::CutoffCapExceeded { cap, last }) => {
                assert_eq!(cap, 14);
                assert!(last[1] > last[0]);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn lift_state_preserves_amplitudes() {
        let small = BasisSpec::new(2, 2, false).unwrap();
        let big = BasisSpec::new(5, 2, false).unwrap();
        let psi: Vec<C64> = (0..small.dimension()).map(|i| C64::new(i as f64, 0.0)).collect();
        let lifted = lift_state(&psi, 2, &big);
        for idx in 0..small.dimension() {
            let (_, n, k) = small.decompose(idx);
            assert_eq!(lifted[big.compose(None, n, k)], psi[idx]);
        }
    }
}
