//! Lindblad master equation for the Dicke model, the transport qubit and the
//! leaky cavity, plus steady states and the stationary pseudoinverse.
//!
//! Superoperators act on column-stacked density matrices:
//! `vec(ρ)[i + j·d] = ρ[i, j]`, so `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::dicke::{DickeParams, DickeTerms};
use crate::eigen;
use crate::error::{Error, Result};
use crate::operators::{self, BasisSpec, OperatorMatrix, TQ_DIM};
use crate::sparse::CsrMatrix;
use crate::C64;

/// Tolerances a steady state must satisfy.
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;
/// Relative size below which an eigenvalue counts as a stationary mode.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Blocks up to this vectorized size get an explicit uniqueness check.
const DENSE_UNIQUENESS_LIMIT: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub dicke: DickeParams,
    /// TQ level splitting ε.
    pub epsilon: f64,
    /// TQ coherent tunneling Δ (the `T_c` of the closed-form transport formulas).
    pub delta: f64,
    /// Dispersive coupling `g σ_z a†a`.
    pub g: f64,
    pub gamma_l: f64,
    pub gamma_r: f64,
    /// Cavity decay rate.
    pub gamma_b: f64,
    pub include_tq: bool,
}

impl SystemSpec {
    /// Transport parameters used for the current-versus-coupling figures:
    /// `T_c = 0.1`, `Γ_L = Γ_R = 0.1`, `ε = 0`, `ω = ω₀ = 1`, `g = 0.1`.
    pub fn current_figure(n_qubits: usize, n_max: usize, lambda: f64) -> Self {
        Self {
            dicke: DickeParams {
                omega: 1.0,
                omega0: 1.0,
                lambda,
                n_qubits,
                n_max,
            },
            epsilon: 0.0,
            delta: 0.1,
            g: 0.1,
            gamma_l: 0.1,
            gamma_r: 0.1,
            gamma_b: 0.0,
            include_tq: true,
        }
    }

    /// Same as [`SystemSpec::current_figure`] with `Γ_L = Γ_R = 0.01`, used for noise.
    pub fn noise_figure(n_qubits: usize, n_max: usize, lambda: f64) -> Self {
        Self {
            gamma_l: 0.01,
            gamma_r: 0.01,
            ..Self::current_figure(n_qubits, n_max, lambda)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.dicke.validate()?;
        if !(self.gamma_b >= 0.0) {
            return Err(Error::param("gamma_b", "rate must be non-negative"));
        }
        if self.include_tq {
            for (name, v) in [("gamma_l", self.gamma_l), ("gamma_r", self.gamma_r)] {
                if !(v >= 0.0) {
                    return Err(Error::param(name, "rate must be non-negative"));
                }
            }
            for (name, v) in [("epsilon", self.epsilon), ("delta", self.delta), ("g", self.g)] {
                if !v.is_finite() {
                    return Err(Error::param(name, "must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn basis(&self) -> BasisSpec {
        BasisSpec {
            include_tq: self.include_tq,
            ..self.dicke.basis()
        }
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self {
            dicke: self.dicke.with_lambda(lambda),
            ..self
        }
    }
}

/// Tensor structure of a Hilbert space: factor dimensions, whether factor 0 is
/// the transport qubit, and the Dicke basis when there is one.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub dims: Vec<usize>,
    pub has_tq: bool,
    pub basis: Option<BasisSpec>,
}

impl Layout {
    pub fn from_basis(basis: BasisSpec) -> Self {
        Self {
            dims: basis.dims(),
            has_tq: basis.include_tq,
            basis: Some(basis),
        }
    }

    /// A bare transport qubit.
    pub fn tq_only() -> Self {
        Self {
            dims: vec![TQ_DIM],
            has_tq: true,
            basis: None,
        }
    }

    pub fn plain(dim: usize) -> Self {
        Self {
            dims: vec![dim],
            has_tq: false,
            basis: None,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dims.iter().product()
    }

    /// Lifts a TQ operator to the full space.
    pub fn embed_tq(&self, op: &CsrMatrix) -> Result<CsrMatrix> {
        if !self.has_tq {
            return Err(Error::MissingTransportQubit);
        }
        let rest: usize = self.dims[1..].iter().product();
        Ok(op.kron(&CsrMatrix::identity(rest)))
    }
}

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub data: Mat<C64>,
    pub layout: Layout,
}

impl DensityMatrix {
    /// Reshapes a column-stacked vector into a density matrix.
    pub fn from_vectorized(vec: &[C64], layout: Layout) -> Result<Self> {
        let d = layout.dimension();
        if vec.len() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "vectorized state has length {}, expected {}",
                vec.len(),
                d * d
            )));
        }
        Ok(Self {
            data: Mat::from_fn(d, d, |i, j| vec[i + j * d]),
            layout,
        })
    }

    pub fn pure(state: &[C64], layout: Layout) -> Self {
        let d = state.len();
        Self {
            data: Mat::from_fn(d, d, |i, j| state[i] * state[j].conj()),
            layout,
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn vectorize(&self) -> Vec<C64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for j in 0..d {
            for i in 0..d {
                out.push(self.data[(i, j)]);
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.data[(i, i)]).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..=i {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let values = self
            .data
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        Ok(values.first().copied().unwrap_or(0.0))
    }

    /// `Tr(O ρ)`
    pub fn expectation(&self, op: &CsrMatrix) -> C64 {
        op.iter().map(|(i, j, v)| v * self.data[(j, i)]).sum()
    }

    /// Mean cavity occupation; requires a Dicke basis.
    pub fn boson_occupation(&self) -> Result<f64> {
        let basis = self
            .layout
            .basis
            .ok_or_else(|| Error::DimensionMismatch("layout has no boson factor".into()))?;
        Ok((0..self.dim())
            .map(|idx| basis.decompose(idx).1 as f64 * self.data[(idx, idx)].re)
            .sum())
    }

    /// Checks Hermiticity, unit trace and numerical positivity.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > HERMITICITY_TOL {
            return Err(Error::LinearSolve(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::LinearSolve(format!("density matrix trace {tr}")));
        }
        let min = self.min_eigenvalue()?;
        if min < -POSITIVITY_TOL {
            return Err(Error::LinearSolve(format!(
                "density matrix not positive (min eigenvalue {min:e})"
            )));
        }
        Ok(())
    }
}

/// Vectorized Lindblad generator acting on `vec(ρ)`.
#[derive(Debug, Clone)]
pub struct LiouvillianMatrix {
    pub data: CsrMatrix,
    pub layout: Layout,
}

impl LiouvillianMatrix {
    /// Hilbert-space dimension `d` (the matrix is `d² × d²`).
    pub fn hilbert_dim(&self) -> usize {
        self.layout.dimension()
    }

    pub fn apply(&self, vec: &[C64]) -> Vec<C64> {
        self.data.matvec(vec)
    }

    /// Indices `i + j d` of the diagonal elements; the trace functional is
    /// the sum over these.
    pub fn trace_indices(&self) -> impl Iterator<Item = usize> {
        let d = self.hilbert_dim();
        (0..d).map(move |i| i + i * d)
    }

    /// `‖vec(I)ᵀ L‖_∞ / max|L|`
    pub fn trace_defect(&self) -> f64 {
        let d = self.hilbert_dim();
        let mut ones = vec![C64::new(0.0, 0.0); d * d];
        for k in self.trace_indices() {
            ones[k] = C64::new(1.0, 0.0);
        }
        let row = self.data.vecmat(&ones);
        let worst = row.iter().map(|v| v.norm()).fold(0.0, f64::max);
        worst / self.data.max_abs().max(f64::MIN_POSITIVE)
    }

    /// Partition of `vec(ρ)` indices into blocks that `L` never mixes,
    /// using a ±1 symmetry diagonal (`ρ_ij` with `p_i p_j = +1` vs `-1`).
    /// Returns `None` if `L` couples the two blocks.
    pub fn symmetry_blocks(&self, parity: &[i8]) -> Option<[Vec<usize>; 2]> {
        let d = self.hilbert_dim();
        if parity.len() != d {
            return None;
        }
        let sector = |k: usize| parity[k % d] * parity[k / d];
        if self.data.iter().any(|(r, c, _)| sector(r) != sector(c)) {
            return None;
        }
        let (even, odd): (Vec<usize>, Vec<usize>) = (0..d * d).partition(|&k| sector(k) > 0);
        Some([even, odd])
    }

    /// Index blocks used by the solvers: the parity split when the layout has
    /// a Dicke basis and `L` respects it, otherwise a single block.
    pub fn solver_blocks(&self) -> Vec<Vec<usize>> {
        if let Some(basis) = self.layout.basis {
            if let Some([even, odd]) = self.symmetry_blocks(&basis.parity_diagonal()) {
                return vec![even, odd];
            }
        }
        let d = self.hilbert_dim();
        vec![(0..d * d).collect()]
    }
}

/// `-i[H, ·] + Σ rate·D[X]` with `D[X]ρ = XρX† − ½{X†X, ρ}`.
pub fn lindbladian(h: &CsrMatrix, jumps: &[(f64, &CsrMatrix)]) -> CsrMatrix {
    let d = h.nrows();
    let id = CsrMatrix::identity(d);
    let minus_i = C64::new(0.0, -1.0);
    let mut l = (&id.kron(h) - &h.transpose().kron(&id)).scale(minus_i);
    for &(rate, x) in jumps {
        if rate == 0.0 {
            continue;
        }
        let xdx = x.adjoint().matmul(x);
        let sandwich = x.conj().kron(x);
        let anti = &id.kron(&xdx) + &xdx.transpose().kron(&id);
        let dissipator = &sandwich - &anti.scale_real(0.5);
        l = &l + &dissipator.scale_real(rate);
    }
    l
}

/// `H = H_D + εσ_z + Δσ_x + g σ_z a†a` on `TQ ⊗ boson ⊗ spin`, or `H_D` alone
/// without the transport qubit.
pub fn build_hamiltonian(spec: &SystemSpec) -> Result<OperatorMatrix> {
    spec.validate()?;
    let h_dicke = DickeTerms::new(&spec.dicke)?.hamiltonian(spec.dicke.lambda);
    if !spec.include_tq {
        return Ok(h_dicke);
    }
    let basis = spec.basis();
    let tq = operators::tq_operators();
    let num = operators::boson_number(spec.dicke.n_max)?;
    let h_tq = tq.sigma_z.scale(spec.epsilon).add(&tq.sigma_x.scale(spec.delta));

    let mut h = operators::tensor(&[&OperatorMatrix::identity(TQ_DIM), &h_dicke])
        .add(&basis.embed_tq(&h_tq))
        .add(&basis.embed(Some(&tq.sigma_z), Some(&num), None).scale(spec.g));
    h.label = "H".into();
    Ok(h)
}

/// Full generator: Hamiltonian part, `Γ_L D[s_L†]`, `Γ_R D[s_R]` and `γ_b D[a]`.
pub fn build_liouvillian(spec: &SystemSpec) -> Result<LiouvillianMatrix> {
    let h = build_hamiltonian(spec)?;
    let basis = spec.basis();
    let a = basis.embed_boson(&operators::boson_annihilation(spec.dicke.n_max)?);
    let mut jumps: Vec<(f64, CsrMatrix)> = vec![(spec.gamma_b, a.data)];
    if spec.include_tq {
        let tq = operators::tq_operators();
        jumps.push((spec.gamma_l, basis.embed_tq(&tq.s_l.adjoint()).data));
        jumps.push((spec.gamma_r, basis.embed_tq(&tq.s_r).data));
    }
    let refs: Vec<(f64, &CsrMatrix)> = jumps.iter().map(|(r, x)| (*r, x)).collect();
    Ok(LiouvillianMatrix {
        data: lindbladian(&h.data, &refs),
        layout: Layout::from_basis(basis),
    })
}

/// Transport qubit on its own: `H = εσ_z + Δσ_x`, `Γ_L D[s_L†] + Γ_R D[s_R]`.
pub fn tq_liouvillian(epsilon: f64, delta: f64, gamma_l: f64, gamma_r: f64) -> LiouvillianMatrix {
    let tq = operators::tq_operators();
    let h = tq.sigma_z.scale(epsilon).add(&tq.sigma_x.scale(delta));
    let load = tq.s_l.adjoint();
    LiouvillianMatrix {
        data: lindbladian(&h.data, &[(gamma_l, &load.data), (gamma_r, &tq.s_r.data)]),
        layout: Layout::tq_only(),
    }
}

struct BlockSolver {
    indices: Vec<usize>,
    /// Position of the trace-replaced row within the block, if any.
    replaced: Option<usize>,
    lu: Lu<usize, C64>,
}

impl BlockSolver {
    fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let b = Mat::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        let x = self.lu.solve(&b);
        (0..rhs.len()).map(|i| x[(i, 0)]).collect()
    }
}

/// Factorized generator: the steady state and the stationary pseudoinverse
/// share one sparse LU per symmetry block.
pub struct SteadyStateSolver {
    liouvillian: LiouvillianMatrix,
    blocks: Vec<BlockSolver>,
    rho: DensityMatrix,
}

impl SteadyStateSolver {
    pub fn new(l: &LiouvillianMatrix) -> Result<Self> {
        let d = l.hilbert_dim();
        let trace_set: Vec<usize> = l.trace_indices().collect();
        let scale = l.data.max_abs().max(f64::MIN_POSITIVE);
        let mut blocks = Vec::new();

        for indices in l.solver_blocks() {
            let sub = l.data.submatrix(&indices);
            let trace_pos: Vec<usize> = indices
                .iter()
                .enumerate()
                .filter(|(_, k)| trace_set.binary_search(k).is_ok())
                .map(|(pos, _)| pos)
                .collect();

            if indices.len() <= DENSE_UNIQUENESS_LIMIT {
                let values = eigen::dense_eigenvalues(&sub.to_dense())?;
                let zeros = values.iter().filter(|v| v.norm() < DEGENERACY_TOL * scale).count();
                let allowed = usize::from(!trace_pos.is_empty());
                if zeros > allowed {
                    return Err(Error::DegenerateSteadyState { count: zeros });
                }
            }

            let replaced = trace_pos.first().copied();
            let system = match replaced {
                Some(row) => {
                    let mut triplets: Vec<_> = sub.iter().filter(|&(r, _, _)| r != row).collect();
                    triplets.extend(trace_pos.iter().map(|&c| (row, c, C64::new(1.0, 0.0))));
                    CsrMatrix::from_triplets(sub.nrows(), sub.ncols(), &triplets)
                }
                None => sub,
            };
            let lu = system
                .to_faer_csc()
                .sp_lu()
                .map_err(|e| Error::LinearSolve(format!("sparse LU failed: {e:?}")))?;
            blocks.push(BlockSolver {
                indices,
                replaced,
                lu,
            });
        }

        let mut vec = vec![C64::new(0.0, 0.0); d * d];
        for block in blocks.iter().filter(|b| b.replaced.is_some()) {
            let mut rhs = vec![C64::new(0.0, 0.0); block.indices.len()];
            rhs[block.replaced.unwrap()] = C64::new(1.0, 0.0);
            for (pos, x) in block.solve(&rhs).into_iter().enumerate() {
                vec[block.indices[pos]] = x;
            }
        }
        if vec.iter().any(|x| !x.is_finite()) {
            return Err(Error::DegenerateSteadyState { count: 2 });
        }
        let residual = l.apply(&vec).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if residual > 1e-10 * scale.max(1.0) {
            return Err(Error::LinearSolve(format!(
                "steady-state residual {residual:e}; generator is likely singular beyond the stationary mode"
            )));
        }

        let mut rho = DensityMatrix::from_vectorized(&vec, l.layout.clone())?;
        // remove the rounding-level anti-Hermitian part
        let herm = Mat::from_fn(d, d, |i, j| (rho.data[(i, j)] + rho.data[(j, i)].conj()) * 0.5);
        rho.data = herm;
        rho.validate()?;

        Ok(Self {
            liouvillian: l.clone(),
            blocks,
            rho,
        })
    }

    pub fn steady_state(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn liouvillian(&self) -> &LiouvillianMatrix {
        &self.liouvillian
    }

    /// Drazin-type inverse on the decaying subspace: returns `Q x` where
    /// `L x = Q y` and `Q = 1 − vec(ρ_ss) vec(I)ᵀ`.
    pub fn pseudoinverse_apply(&self, y: &[C64]) -> Result<Vec<C64>> {
        let n = self.rho.dim() * self.rho.dim();
        if y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "vector has length {}, expected {n}",
                y.len()
            )));
        }
        let rho_vec = self.rho.vectorize();
        let qy = project_out(&self.liouvillian, &rho_vec, y);

        let mut x = vec![C64::new(0.0, 0.0); n];
        for block in &self.blocks {
            let mut rhs: Vec<C64> = block.indices.iter().map(|&k| qy[k]).collect();
            if let Some(row) = block.replaced {
                // the replaced row now imposes Tr x = 0
                rhs[row] = C64::new(0.0, 0.0);
            }
            for (pos, v) in block.solve(&rhs).into_iter().enumerate() {
                x[block.indices[pos]] = v;
            }
        }

        let residual: f64 = self
            .liouvillian
            .apply(&x)
            .iter()
            .zip(&qy)
            .map(|(lx, b)| (lx - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale = qy.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
        if !residual.is_finite() || residual > 1e-8 * scale * self.liouvillian.data.max_abs().max(1.0) {
            return Err(Error::LinearSolve(format!("pseudoinverse residual {residual:e}")));
        }
        Ok(project_out(&self.liouvillian, &rho_vec, &x))
    }
}

fn project_out(l: &LiouvillianMatrix, rho_vec: &[C64], y: &[C64]) -> Vec<C64> {
    let tr: C64 = l.trace_indices().map(|k| y[k]).sum();
    y.iter().zip(rho_vec).map(|(yi, ri)| yi - ri * tr).collect()
}

/// Unique stationary state of `L` with unit trace.
pub fn steady_state(l: &LiouvillianMatrix) -> Result<DensityMatrix> {
    Ok(SteadyStateSolver::new(l)?.rho)
}

/// One-shot pseudoinverse; factorizes `L` each call.
pub fn pseudoinverse_apply(l: &LiouvillianMatrix, rho_ss: &DensityMatrix, y: &[C64]) -> Result<Vec<C64>> {
    let solver = SteadyStateSolver::new(l)?;
    let diff = solver
        .rho
        .vectorize()
        .iter()
        .zip(rho_ss.vectorize())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if diff > 1e-8 {
        return Err(Error::DimensionMismatch(format!(
            "supplied state is not the stationary state of L (max deviation {diff:e})"
        )));
    }
    solver.pseudoinverse_apply(y)
}
