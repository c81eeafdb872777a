//! Hermitian ground states and dense spectra.
//!
//! Small problems go straight to a dense self-adjoint eigensolver. Larger ones
//! use Lanczos with full reorthogonalization and explicit restarts from the
//! current Ritz vector.

use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::operators::OperatorMatrix;
use crate::sparse::CsrMatrix;
use crate::C64;

/// Gap below which the two lowest states are reported as a degenerate doublet.
pub const DEGENERACY_GAP: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: Vec<C64>,
    /// `‖H v - E v‖`
    pub residual: f64,
    /// Lanczos steps taken; zero for the dense path.
    pub iterations: usize,
    /// Second-lowest eigenpair, set only when it lies within [`DEGENERACY_GAP`].
    pub partner: Option<(f64, Vec<C64>)>,
}

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub tol: f64,
    /// Problems smaller than this use the dense solver.
    pub dense_below: usize,
    pub max_krylov: usize,
    pub max_restarts: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            dense_below: 400,
            max_krylov: 300,
            max_restarts: 60,
        }
    }
}

impl EigenOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

pub fn ground_state(h: &OperatorMatrix, tol: f64) -> Result<GroundState> {
    ground_state_with(&h.data, &EigenOptions::with_tol(tol), None)
}

/// Lowest eigenpair of a Hermitian matrix, optionally seeded with a start vector.
pub fn ground_state_with(
    h: &CsrMatrix,
    opts: &EigenOptions,
    start: Option<&[C64]>,
) -> Result<GroundState> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch("Hamiltonian must be square".into()));
    }
    if h.nrows() < opts.dense_below {
        dense_ground_state(h)
    } else {
        lanczos_ground_state(h, opts, start)
    }
}

fn residual_norm(h: &CsrMatrix, energy: f64, v: &[C64]) -> f64 {
    h.matvec(v)
        .iter()
        .zip(v)
        .map(|(hv, x)| (hv - x * energy).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn dense_ground_state(h: &CsrMatrix) -> Result<GroundState> {
    let (values, vectors) = dense_hermitian_eigen(h)?;
    let column = |c: usize| -> Vec<C64> { (0..vectors.nrows()).map(|r| vectors[(r, c)]).collect() };
    let state = column(0);
    let partner = (values.len() > 1 && values[1] - values[0] < DEGENERACY_GAP)
        .then(|| (values[1], column(1)));
    Ok(GroundState {
        energy: values[0],
        residual: residual_norm(h, values[0], &state),
        state,
        iterations: 0,
        partner,
    })
}

/// Full spectrum (ascending) and eigenvectors of a Hermitian matrix.
pub fn dense_hermitian_eigen(h: &CsrMatrix) -> Result<(Vec<f64>, Mat<C64>)> {
    let n = h.nrows();
    let evd_err = |e: faer::linalg::evd::EvdError| Error::LinearSolve(format!("{e:?}"));
    if h.is_real() {
        let mut m = Mat::<f64>::zeros(n, n);
        for (i, j, v) in h.iter() {
            m[(i, j)] = v.re;
        }
        let evd = m.self_adjoint_eigen(Side::Lower).map_err(evd_err)?;
        let values = (0..n).map(|i| evd.S()[i]).collect();
        let u = evd.U();
        let vectors = Mat::from_fn(n, n, |i, j| C64::new(u[(i, j)], 0.0));
        Ok((values, vectors))
    } else {
        let m = h.to_dense();
        let evd = m.self_adjoint_eigen(Side::Lower).map_err(evd_err)?;
        let values = (0..n).map(|i| evd.S()[i].re).collect();
        Ok((values, evd.U().to_owned()))
    }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn dense_hermitian_eigenvalues(h: &CsrMatrix) -> Result<Vec<f64>> {
    let n = h.nrows();
    let evd_err = |e: faer::linalg::evd::EvdError| Error::LinearSolve(format!("{e:?}"));
    if h.is_real() {
        let mut m = Mat::<f64>::zeros(n, n);
        for (i, j, v) in h.iter() {
            m[(i, j)] = v.re;
        }
        m.self_adjoint_eigenvalues(Side::Lower).map_err(evd_err)
    } else {
        let values = h
            .to_dense()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(evd_err)?;
        Ok(values)
    }
}

/// All eigenvalues of a general complex matrix.
pub fn dense_eigenvalues(m: &Mat<C64>) -> Result<Vec<C64>> {
    m.eigenvalues()
        .map_err(|e| Error::LinearSolve(format!("{e:?}")))
}

fn default_start(n: usize) -> Vec<C64> {
    // deterministic, dense, and not aligned with any basis state
    (0..n)
        .map(|i| {
            let x = i as f64;
            C64::new(1.0 + 0.5 * (0.7 * x + 0.3).sin(), 0.25 * (1.3 * x).cos())
        })
        .collect()
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> Mat<f64> {
    let m = alpha.len();
    let mut t = Mat::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    t
}

fn lanczos_ground_state(
    h: &CsrMatrix,
    opts: &EigenOptions,
    start: Option<&[C64]>,
) -> Result<GroundState> {
    let n = h.nrows();
    let mut v0 = match start {
        Some(s) if s.len() == n && norm(s) > 0.0 => s.to_vec(),
        Some(s) if s.len() != n => {
            return Err(Error::DimensionMismatch(format!(
                "start vector has length {}, matrix dimension {n}",
                s.len()
            )))
        }
        _ => default_start(n),
    };
    let krylov = opts.max_krylov.min(n).max(2);
    let mut total_iterations = 0;
    let mut last_residual = f64::INFINITY;

    for _ in 0..opts.max_restarts.max(1) {
        let nv = norm(&v0);
        v0.iter_mut().for_each(|x| *x /= nv);

        let mut basis: Vec<Vec<C64>> = vec![v0.clone()];
        let mut alpha: Vec<f64> = Vec::with_capacity(krylov);
        let mut beta: Vec<f64> = Vec::with_capacity(krylov);
        let mut w = vec![C64::new(0.0, 0.0); n];

        for step in 0..krylov {
            h.matvec_into(&basis[step], &mut w);
            total_iterations += 1;
            let a = dot(&basis[step], &w).re;
            alpha.push(a);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
                }
            }
            let b = norm(&w);
            if step + 1 == krylov || b < 1e-13 * a.abs().max(1.0) {
                break;
            }
            // cheap residual estimate β·|last Ritz component| every few steps
            if (step + 1) % 10 == 0 {
                let evd = tridiagonal(&alpha, &beta).self_adjoint_eigen(Side::Lower);
                if let Ok(evd) = evd {
                    if b * evd.U()[(step, 0)].abs() < 0.1 * opts.tol {
                        break;
                    }
                }
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }

        let m = alpha.len();
        let evd = tridiagonal(&alpha, &beta)
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        let ritz = |c: usize| -> Vec<C64> {
            let mut x = vec![C64::new(0.0, 0.0); n];
            for (k, q) in basis.iter().enumerate().take(m) {
                let y = evd.U()[(k, c)];
                x.iter_mut().zip(q).for_each(|(xi, qi)| *xi += qi * y);
            }
            let nx = norm(&x);
            x.iter_mut().for_each(|xi| *xi /= nx);
            x
        };

        let energy = evd.S()[0];
        let x = ritz(0);
        let residual = residual_norm(h, energy, &x);
        last_residual = residual;
        if residual <= opts.tol {
            let partner = (m > 1 && evd.S()[1] - energy < DEGENERACY_GAP).then(|| {
                let x1 = ritz(1);
                (evd.S()[1], x1)
            });
            return Ok(GroundState {
                energy,
                state: x,
                residual,
                iterations: total_iterations,
                partner,
            });
        }
        v0 = x;
    }
    Err(Error::NoConvergence {
        iterations: total_iterations,
        residual: last_residual,
    })
}
