//! Liouvillian spectra of the damped Dicke model and their gap statistics.

use std::f64::consts::PI;

use serde::Serialize;

use crate::dicke::DickeParams;
use crate::eigen;
use crate::error::{Error, Result};
use crate::open_system::{self, LiouvillianMatrix, SystemSpec};
use crate::operators::OperatorMatrix;
use crate::C64;

/// Largest vectorized dimension handed to the dense eigensolver.
pub const DENSE_SPECTRUM_LIMIT: usize = 10_000;
/// Zero tolerance relative to the spectral radius.
pub const ZERO_TOL_REL: f64 = 1e-10;
pub const DEFAULT_BINS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    /// `χ_i = iE_i + ν_i`, grouped by symmetry block.
    pub eigenvalues: Vec<C64>,
    /// Ascending imaginary parts above `zero_tol`.
    pub positive_imag: Vec<f64>,
    pub zero_tol: f64,
    /// Eigenvalues with `|χ| < zero_tol`.
    pub stationary_count: usize,
    /// Eigenvalues with `|Im χ| ≤ zero_tol`.
    pub real_count: usize,
    pub s_max: f64,
    /// `(E/S_max bin centre, probability)`
    pub histogram: Vec<(f64, f64)>,
}

impl SpectrumResult {
    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Fraction of the positive branch with `E/S_max ≤ upper`.
    pub fn low_gap_mass(&self, upper: f64) -> f64 {
        if self.positive_imag.is_empty() {
            return 0.0;
        }
        let count = self.positive_imag.iter().filter(|&&v| v <= upper * self.s_max).count();
        count as f64 / self.positive_imag.len() as f64
    }
}

/// All eigenvalues of `L`, diagonalizing each symmetry block separately.
pub fn liouvillian_eigenvalues(l: &LiouvillianMatrix) -> Result<Vec<C64>> {
    let n = l.data.nrows();
    if n > DENSE_SPECTRUM_LIMIT {
        return Err(Error::DimensionGuard {
            dim: n,
            limit: DENSE_SPECTRUM_LIMIT,
        });
    }
    let mut out = Vec::with_capacity(n);
    for block in l.solver_blocks() {
        out.extend(eigen::dense_eigenvalues(&l.data.submatrix(&block).to_dense())?);
    }
    Ok(out)
}

/// Spectrum of `−i[H_D, ·] + γ_b D[a]`, without the transport qubit.
pub fn damped_spectrum(dicke: &DickeParams, gamma_b: f64) -> Result<SpectrumResult> {
    damped_spectrum_with_bins(dicke, gamma_b, DEFAULT_BINS)
}

pub fn damped_spectrum_with_bins(dicke: &DickeParams, gamma_b: f64, bins: usize) -> Result<SpectrumResult> {
    let spec = SystemSpec {
        dicke: *dicke,
        epsilon: 0.0,
        delta: 0.0,
        g: 0.0,
        gamma_l: 0.0,
        gamma_r: 0.0,
        gamma_b,
        include_tq: false,
    };
    spec.validate()?;
    let dim = dicke.basis().dimension();
    if dim * dim > DENSE_SPECTRUM_LIMIT {
        return Err(Error::DimensionGuard {
            dim: dim * dim,
            limit: DENSE_SPECTRUM_LIMIT,
        });
    }
    let l = open_system::build_liouvillian(&spec)?;
    let eigenvalues = liouvillian_eigenvalues(&l)?;
    spectrum_from_eigenvalues(eigenvalues, bins)
}

/// Classifies a spectrum with the default zero tolerance and histograms its positive branch.
pub fn spectrum_from_eigenvalues(eigenvalues: Vec<C64>, bins: usize) -> Result<SpectrumResult> {
    let radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let zero_tol = ZERO_TOL_REL * radius;
    let positive_imag = positive_imaginary_branch(&eigenvalues, zero_tol);
    let stationary_count = eigenvalues.iter().filter(|z| z.norm() < zero_tol).count();
    let real_count = eigenvalues.iter().filter(|z| z.im.abs() <= zero_tol).count();
    let s_max = positive_imag.last().copied().unwrap_or(0.0);
    let histogram = if positive_imag.is_empty() {
        Vec::new()
    } else {
        gap_distribution(&positive_imag, bins)?
    };
    Ok(SpectrumResult {
        eigenvalues,
        positive_imag,
        zero_tol,
        stationary_count,
        real_count,
        s_max,
        histogram,
    })
}

/// Imaginary parts strictly above `zero_tol`, ascending.
pub fn positive_imaginary_branch(eigs: &[C64], zero_tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = eigs.iter().map(|z| z.im).filter(|&v| v > zero_tol).collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Equal-width histogram of `values / max(values)` over `[0, 1]`.
pub fn gap_distribution(values: &[f64], bins: usize) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if bins < 10 {
        return Err(Error::param("bins", "at least 10 bins are required"));
    }
    let s_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(s_max > 0.0) || values.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::param("values", "gaps must be non-negative with a positive maximum"));
    }
    let mut counts = vec![0usize; bins];
    for v in values {
        let idx = ((v / s_max) * bins as f64).floor() as usize;
        counts[idx.min(bins - 1)] += 1;
    }
    let total = values.len() as f64;
    let width = 1.0 / bins as f64;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(i, &c)| ((i as f64 + 0.5) * width, c as f64 / total))
        .collect())
}

/// Ascending spectrum of a Hermitian operator.
fn hermitian_spectrum(h: &OperatorMatrix) -> Result<Vec<f64>> {
    if h.hermiticity_defect() > 1e-12 * h.data.max_abs().max(1.0) {
        return Err(Error::param("h", "operator is not Hermitian"));
    }
    eigen::dense_hermitian_eigenvalues(&h.data)
}

/// Every difference `E_k − E_j` over ordered pairs, ascending (`d²` values).
pub fn pairwise_differences(h: &OperatorMatrix) -> Result<Vec<f64>> {
    let e = hermitian_spectrum(h)?;
    let mut out = Vec::with_capacity(e.len() * e.len());
    for a in &e {
        for b in &e {
            out.push(a - b);
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Positive gaps `E_k − E_j` of `h`, ascending; gaps below `10⁻¹⁰` times the
/// bandwidth count as degeneracies and are dropped.
pub fn closed_gaps_oracle(h: &OperatorMatrix) -> Result<Vec<f64>> {
    let e = hermitian_spectrum(h)?;
    let bandwidth = match (e.first(), e.last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0.0,
    };
    let tol = ZERO_TOL_REL * bandwidth;
    let mut out = Vec::new();
    for (k, hi) in e.iter().enumerate() {
        for lo in &e[..k] {
            let gap = hi - lo;
            if gap > tol {
                out.push(gap);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceDistributions {
    pub wigner_dyson: Vec<f64>,
    pub poisson: Vec<f64>,
}

/// `P_WD(s) = (πs/2) exp(−πs²/4)` and `P_P(s) = exp(−s)` on `s_grid`.
pub fn reference_distributions(s_grid: &[f64]) -> Result<ReferenceDistributions> {
    if let Some(s) = s_grid.iter().find(|s| !(**s >= 0.0)) {
        return Err(Error::param("s_grid", format!("spacings must be non-negative, got {s}")));
    }
    Ok(ReferenceDistributions {
        wigner_dyson: s_grid.iter().map(|&s| 0.5 * PI * s * (-0.25 * PI * s * s).exp()).collect(),
        poisson: s_grid.iter().map(|&s| (-s).exp()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicke;
    use crate::sparse::CsrMatrix;

    fn diag(values: &[f64]) -> OperatorMatrix {
        let d: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
        OperatorMatrix::new(CsrMatrix::from_diagonal(&d), vec![values.len()], "diag").unwrap()
    }

    #[test]
    fn oracle_on_diagonal() {
        assert_eq!(closed_gaps_oracle(&diag(&[0.0, 1.0, 3.0])).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn positive_branch_of_three_levels() {
        let e = [0.0, 1.0, 3.0];
        let eigs: Vec<C64> = e
            .iter()
            .flat_map(|a| e.iter().map(move |b| C64::new(0.0, a - b)))
            .collect();
        assert_eq!(positive_imaginary_branch(&eigs, 1e-12), vec![1.0, 2.0, 3.0]);
        assert!(positive_imaginary_branch(&[C64::new(0.0, 0.0); 4], 1e-12).is_empty());
    }

    #[test]
    fn hand_enumerable_four_level_case() {
        // N = 1, n_max = 1, λ = 0: levels −½, ½, ½, 3/2
        let p = DickeParams::resonant(0.0, 1, 1).unwrap();
        let s = damped_spectrum(&p, 0.0).unwrap();
        assert_eq!(s.eigenvalues.len(), 16);
        let expected = [1.0, 1.0, 1.0, 1.0, 2.0];
        assert_eq!(s.positive_imag.len(), expected.len());
        for (a, b) in s.positive_imag.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(s.real_count, 6);
    }

    #[test]
    fn closed_spectrum_is_every_energy_gap() {
        let p = DickeParams::resonant(0.3, 2, 4).unwrap();
        let l = open_system::build_liouvillian(&SystemSpec {
            include_tq: false,
            ..SystemSpec::current_figure(2, 4, 0.3)
        })
        .unwrap();
        let mut imag: Vec<f64> = liouvillian_eigenvalues(&l).unwrap().iter().map(|z| z.im).collect();
        imag.sort_by(f64::total_cmp);
        let oracle = pairwise_differences(&dicke::dicke_hamiltonian(&p).unwrap()).unwrap();
        assert_eq!(imag.len(), oracle.len());
        for (a, b) in imag.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn damped_spectrum_is_stable_and_conjugate_symmetric() {
        let p = DickeParams::resonant(0.5, 2, 5).unwrap();
        let s = damped_spectrum(&p, 0.1).unwrap();
        assert!(s.max_real_part() <= 1e-8);
        assert_eq!(s.stationary_count, 1);
        // greedy matching of each eigenvalue with an unused conjugate
        let mut used = vec![false; s.eigenvalues.len()];
        for z in &s.eigenvalues {
            let target = z.conj();
            let (best, dist) = s
                .eigenvalues
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, w)| (i, (w - target).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            assert!(dist < 1e-9, "no conjugate partner for {z}");
            used[best] = true;
        }
    }

    #[test]
    fn guard_rejects_large_problems() {
        let p = DickeParams::resonant(0.5, 6, 14).unwrap();
        assert!(matches!(damped_spectrum(&p, 0.1), Err(Error::DimensionGuard { .. })));
    }

    #[test]
    fn histogram_sums_to_one() {
        let values: Vec<f64> = (1..=1000).map(|i| i as f64 * 1e-3).collect();
        let h = gap_distribution(&values, 50).unwrap();
        assert_eq!(h.len(), 50);
        assert!((h.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() < 1e-12);
        // uniform input: every bin holds 20 of 1000 values, give or take the endpoint
        assert!(h.iter().all(|x| (x.1 - 0.02).abs() <= 1e-3 + 1e-12));
        assert!(gap_distribution(&[], 50).is_err());
        assert!(gap_distribution(&values, 5).is_err());
    }

    #[test]
    fn reference_curves() {
        let r = reference_distributions(&[0.0, 1.0]).unwrap();
        assert_eq!(r.wigner_dyson[0], 0.0);
        assert_eq!(r.poisson[0], 1.0);
        assert!(reference_distributions(&[-1.0]).is_err());
        // trapezoid rule on [0, 12]
        let h = 1e-4;
        let grid: Vec<f64> = (0..=120_000).map(|i| i as f64 * h).collect();
        let wd = reference_distributions(&grid).unwrap().wigner_dyson;
        let integral = h * (wd.iter().sum::<f64>() - 0.5 * (wd[0] + wd[wd.len() - 1]));
        assert!((integral - 1.0).abs() < 1e-6);
    }
}
