//! Elementary operators of the composite system.
//!
//! The composite basis is ordered `[TQ] ⊗ boson ⊗ collective spin`, with the
//! transport-qubit factor present only when requested. Spin states are the
//! Dicke ladder `|j, m⟩`, `m = -j..=j` in ascending order, so index `k = m + j`.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;
use crate::C64;

/// Dimension of the transport qubit: empty `|0⟩`, left `|L⟩`, right `|R⟩`.
pub const TQ_DIM: usize = 3;
pub const TQ_EMPTY: usize = 0;
pub const TQ_LEFT: usize = 1;
pub const TQ_RIGHT: usize = 2;

/// Sparse complex operator with its tensor-factor dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub data: CsrMatrix,
    pub dims: Vec<usize>,
    pub label: String,
}

impl OperatorMatrix {
    pub fn new(data: CsrMatrix, dims: Vec<usize>, label: impl Into<String>) -> Result<Self> {
        if !data.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let product: usize = dims.iter().product();
        if product != data.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} multiply to {product}, matrix has dimension {}",
                data.nrows()
            )));
        }
        Ok(Self {
            data,
            dims,
            label: label.into(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: CsrMatrix::identity(dim),
            dims: vec![dim],
            label: format!("I{dim}"),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
            dims: self.dims.clone(),
            label: format!("({})†", self.label),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self {
            data: self.data.matmul(&other.data),
            dims: self.dims.clone(),
            label: format!("{} {}", self.label, other.label),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self {
            data: self.data.commutator(&other.data),
            dims: self.dims.clone(),
            label: format!("[{}, {}]", self.label, other.label),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            data: &self.data + &other.data,
            dims: self.dims.clone(),
            label: format!("{} + {}", self.label, other.label),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            data: self.data.scale_real(factor),
            dims: self.dims.clone(),
            label: format!("{factor}·{}", self.label),
        }
    }

    /// Largest entry magnitude of `self - self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.data - &self.data.adjoint()).max_abs()
    }

    /// `⟨ψ|O|ψ⟩` for a state vector.
    pub fn expectation(&self, state: &[C64]) -> C64 {
        let o_psi = self.data.matvec(state);
        state
            .iter()
            .zip(&o_psi)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Layout of the composite Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BasisSpec {
    /// Fock cutoff; the boson factor has dimension `n_max + 1`.
    pub n_max: usize,
    /// Qubit count; the collective spin factor has dimension `n_qubits + 1`.
    pub n_qubits: usize,
    pub include_tq: bool,
}

impl BasisSpec {
    pub fn new(n_max: usize, n_qubits: usize, include_tq: bool) -> Result<Self> {
        let spec = Self {
            n_max,
            n_qubits,
            include_tq,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::param("n_max", "Fock cutoff must be at least 1"));
        }
        if self.n_qubits < 1 {
            return Err(Error::param("N", "qubit count must be at least 1"));
        }
        Ok(())
    }

    pub fn boson_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn spin_dim(&self) -> usize {
        self.n_qubits + 1
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(3);
        if self.include_tq {
            dims.push(TQ_DIM);
        }
        dims.push(self.boson_dim());
        dims.push(self.spin_dim());
        dims
    }

    pub fn dimension(&self) -> usize {
        self.dims().iter().product()
    }

    /// Splits a composite index into `(tq, n, k)`; `tq` is `None` without a TQ factor.
    pub fn decompose(&self, index: usize) -> (Option<usize>, usize, usize) {
        let spin = self.spin_dim();
        let dicke = self.boson_dim() * spin;
        let (tq, rest) = if self.include_tq {
            (Some(index / dicke), index % dicke)
        } else {
            (None, index)
        };
        (tq, rest / spin, rest % spin)
    }

    pub fn compose(&self, tq: Option<usize>, n: usize, k: usize) -> usize {
        let dicke = self.boson_dim() * self.spin_dim();
        tq.unwrap_or(0) * dicke + n * self.spin_dim() + k
    }

    /// Lifts a boson-factor operator to the composite space.
    pub fn embed_boson(&self, op: &OperatorMatrix) -> OperatorMatrix {
        self.embed(None, Some(op), None)
    }

    pub fn embed_spin(&self, op: &OperatorMatrix) -> OperatorMatrix {
        self.embed(None, None, Some(op))
    }

    /// Lifts a TQ operator; panics if the basis has no TQ factor.
    pub fn embed_tq(&self, op: &OperatorMatrix) -> OperatorMatrix {
        assert!(self.include_tq, "basis has no transport-qubit factor");
        self.embed(Some(op), None, None)
    }

    pub fn embed(
        &self,
        tq: Option<&OperatorMatrix>,
        boson: Option<&OperatorMatrix>,
        spin: Option<&OperatorMatrix>,
    ) -> OperatorMatrix {
        let boson_id = OperatorMatrix::identity(self.boson_dim());
        let spin_id = OperatorMatrix::identity(self.spin_dim());
        let mut factors: Vec<&OperatorMatrix> = Vec::with_capacity(3);
        let tq_id;
        if self.include_tq {
            tq_id = OperatorMatrix::identity(TQ_DIM);
            factors.push(tq.unwrap_or(&tq_id));
        }
        factors.push(boson.unwrap_or(&boson_id));
        factors.push(spin.unwrap_or(&spin_id));
        tensor(&factors)
    }

    /// Diagonal of the Dicke parity `exp[iπ(n + m + j)]` on the composite basis.
    pub fn parity_diagonal(&self) -> Vec<i8> {
        (0..self.dimension())
            .map(|idx| {
                let (_, n, k) = self.decompose(idx);
                if (n + k) % 2 == 0 {
                    1
                } else {
                    -1
                }
            })
            .collect()
    }
}

pub fn boson_annihilation(n_max: usize) -> Result<OperatorMatrix> {
    if n_max < 1 {
        return Err(Error::param("n_max", "Fock cutoff must be at least 1"));
    }
    let triplets: Vec<_> = (1..=n_max)
        .map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0)))
        .collect();
    let dim = n_max + 1;
    OperatorMatrix::new(CsrMatrix::from_triplets(dim, dim, &triplets), vec![dim], "a")
}

pub fn boson_number(n_max: usize) -> Result<OperatorMatrix> {
    let a = boson_annihilation(n_max)?;
    let mut n = a.adjoint().matmul(&a);
    n.label = "a†a".into();
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinComponent {
    Z,
    Plus,
    Minus,
}

/// Collective spin operator in the maximal `j = N/2` multiplet.
pub fn collective_spin(n_qubits: usize, component: SpinComponent) -> Result<OperatorMatrix> {
    if n_qubits < 1 {
        return Err(Error::param("N", "qubit count must be at least 1"));
    }
    let dim = n_qubits + 1;
    let j = n_qubits as f64 / 2.0;
    let m = |k: usize| k as f64 - j;
    let ladder = |k: usize| (j * (j + 1.0) - m(k) * (m(k) + 1.0)).sqrt();
    let (triplets, label): (Vec<_>, _) = match component {
        SpinComponent::Z => ((0..dim).map(|k| (k, k, C64::new(m(k), 0.0))).collect(), "Jz"),
        SpinComponent::Plus => (
            (0..dim - 1).map(|k| (k + 1, k, C64::new(ladder(k), 0.0))).collect(),
            "J+",
        ),
        SpinComponent::Minus => (
            (0..dim - 1).map(|k| (k, k + 1, C64::new(ladder(k), 0.0))).collect(),
            "J-",
        ),
    };
    OperatorMatrix::new(CsrMatrix::from_triplets(dim, dim, &triplets), vec![dim], label)
}

/// Transport-qubit operators in the basis `{|0⟩, |L⟩, |R⟩}`.
#[derive(Debug, Clone)]
pub struct TqOperators {
    pub sigma_z: OperatorMatrix,
    pub sigma_x: OperatorMatrix,
    /// `|0⟩⟨L|`
    pub s_l: OperatorMatrix,
    /// `|0⟩⟨R|`
    pub s_r: OperatorMatrix,
}

pub fn tq_operators() -> TqOperators {
    let one = C64::new(1.0, 0.0);
    let op = |triplets: &[(usize, usize, C64)], label: &str| OperatorMatrix {
        data: CsrMatrix::from_triplets(TQ_DIM, TQ_DIM, triplets),
        dims: vec![TQ_DIM],
        label: label.into(),
    };
    TqOperators {
        sigma_z: op(&[(TQ_LEFT, TQ_LEFT, one), (TQ_RIGHT, TQ_RIGHT, -one)], "σz"),
        sigma_x: op(&[(TQ_LEFT, TQ_RIGHT, one), (TQ_RIGHT, TQ_LEFT, one)], "σx"),
        s_l: op(&[(TQ_EMPTY, TQ_LEFT, one)], "sL"),
        s_r: op(&[(TQ_EMPTY, TQ_RIGHT, one)], "sR"),
    }
}

/// Kronecker product in composition order; an empty list yields the 1x1 identity.
pub fn tensor(factors: &[&OperatorMatrix]) -> OperatorMatrix {
    let mut iter = factors.iter();
    let Some(first) = iter.next() else {
        return OperatorMatrix::identity(1);
    };
    iter.fold((*first).clone(), |acc, f| OperatorMatrix {
        data: acc.data.kron(&f.data),
        dims: acc.dims.iter().chain(&f.dims).copied().collect(),
        label: format!("{} ⊗ {}", acc.label, f.label),
    })
}

/// Dicke parity `Π = exp[iπ(a†a + J_z + j)]` on boson ⊗ spin.
pub fn parity_operator(n_qubits: usize, n_max: usize) -> Result<OperatorMatrix> {
    let basis = BasisSpec::new(n_max, n_qubits, false)?;
    let diag: Vec<C64> = basis
        .parity_diagonal()
        .into_iter()
        .map(|p| C64::new(p as f64, 0.0))
        .collect();
    OperatorMatrix::new(CsrMatrix::from_diagonal(&diag), basis.dims(), "Π")
}
