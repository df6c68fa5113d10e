//! Dense state-vector and density-matrix primitives.
//!
//! Qubit 0 is the most significant bit of a computational-basis index, so the
//! basis state `|q0 q1 ... q_{n-1}>` has index `q0 * 2^(n-1) + ... + q_{n-1}`.
//! Every other module relies on this ordering.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance on the norm of a state vector accepted by [`PureState::new`].
pub const NORM_TOL: f64 = 1e-9;
/// Hermiticity and trace tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-12;
/// Smallest eigenvalue tolerated before a matrix is declared non-positive.
pub const PSD_TOL: f64 = 1e-10;
/// Hermiticity tolerance (relative to the max-norm) for the eigensolver.
pub const EIG_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} is not a power of two >= 2"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Largest absolute entry of a complex matrix.
pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of `|A - A^dagger|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Kronecker product with `a` on the more significant qubits.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    let i = C64::new(0.0, 1.0);
    CMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// `op` acting on `qubit` of an `n_qubits` register, identity elsewhere.
pub fn embed_single(op: &CMatrix, qubit: usize, n_qubits: usize) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for q in 0..n_qubits {
        out = if q == qubit {
            kron(&out, op)
        } else {
            kron(&out, &CMatrix::identity(2, 2))
        };
    }
    out
}

/// A normalized state vector over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    n_qubits: usize,
}

impl PureState {
    /// Accepts amplitudes whose norm is within [`NORM_TOL`] of one and
    /// rescales them to unit norm.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amplitudes: amplitudes / C64::from(norm),
            n_qubits,
        })
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(amplitudes / C64::from(norm))
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if n_qubits == 0 || index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} invalid for {n_qubits} qubits"
            )));
        }
        let mut v = CVector::zeros(dim);
        v[index] = ONE;
        Self::new(v)
    }

    /// Builds a state from a bit string such as `"011"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let index = usize::from_str_radix(bits, 2)
            .map_err(|_| Error::InvalidArgument(format!("bad bit string {bits:?}")))?;
        Self::basis(bits.len(), index)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
            n_qubits: self.n_qubits + other.n_qubits,
        }
    }

    /// Multiplies every amplitude by `phase` (must have unit modulus).
    pub fn with_global_phase(&self, phase: C64) -> PureState {
        PureState {
            amplitudes: &self.amplitudes * phase,
            n_qubits: self.n_qubits,
        }
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// A Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    n_qubits: usize,
}

impl DensityMatrix {
    /// Validates all three density-matrix invariants.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Wraps a square power-of-two matrix without checking positivity or
    /// trace. Used for outputs of maps that are CPTP by construction.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        let n_qubits = qubits_for_dim(matrix.nrows())?;
        Ok(Self { matrix, n_qubits })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.amplitudes();
        Self {
            matrix: v * v.adjoint(),
            n_qubits: psi.n_qubits(),
        }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            matrix: CMatrix::identity(dim, dim) / C64::from(dim as f64),
            n_qubits,
        }
    }

    /// Checks hermiticity, unit trace and positivity.
    pub fn validate(&self) -> Result<()> {
        let deviation = hermiticity_defect(&self.matrix);
        if deviation > DENSITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > DENSITY_TOL {
            return Err(Error::BadTrace { trace });
        }
        let min_eigenvalue = self.min_eigenvalue();
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let sym = hermitian_part(&self.matrix);
        SymmetricEigen::new(sym)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.nrows(),
            });
        }
        Ok(Self {
            matrix: u * &self.matrix * u.adjoint(),
            n_qubits: self.n_qubits,
        })
    }
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::from(0.5)
}

/// `a (x) b`; `a`'s qubits come first (lower indices).
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix {
        matrix: kron(&a.matrix, &b.matrix),
        n_qubits: a.n_qubits + b.n_qubits,
    }
}

/// Traces out every qubit not listed in `keep`. The result's qubit `k` is the
/// input's qubit `keep[k]`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    if keep.is_empty() {
        return Err(Error::InvalidArgument("nothing to keep".into()));
    }
    let mut seen = vec![false; n];
    for &q in keep {
        if q >= n {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: n,
            });
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    let traced: Vec<usize> = (0..n).filter(|q| !seen[*q]).collect();

    let scatter = |bits: usize, qubits: &[usize]| -> usize {
        let m = qubits.len();
        qubits.iter().enumerate().fold(0usize, |acc, (k, &q)| {
            let bit = (bits >> (m - 1 - k)) & 1;
            acc | (bit << (n - 1 - q))
        })
    };

    let kept_dim = 1usize << keep.len();
    let env_dim = 1usize << traced.len();
    let kept_index: Vec<usize> = (0..kept_dim).map(|r| scatter(r, keep)).collect();
    let env_index: Vec<usize> = (0..env_dim).map(|e| scatter(e, &traced)).collect();

    let m = rho.matrix();
    let out = CMatrix::from_fn(kept_dim, kept_dim, |r, c| {
        env_index
            .iter()
            .map(|&e| m[(kept_index[r] | e, kept_index[c] | e)])
            .sum()
    });
    Ok(DensityMatrix {
        matrix: out,
        n_qubits: keep.len(),
    })
}

/// `<psi| rho |psi>`, clipped to `[0, 1]`.
pub fn fidelity_pure(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    if rho.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: psi.dim(),
        });
    }
    let v = psi.amplitudes();
    let f = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
    Ok(f.clamp(0.0, 1.0))
}

/// Eigenvalues sorted in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianSpectrum {
    /// `Q diag(f(lambda)) Q^dagger`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let q = &self.eigenvectors;
        let n = q.nrows();
        let mut scaled = q.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let s = C64::from(f(lambda));
            for i in 0..n {
                scaled[(i, k)] *= s;
            }
        }
        scaled * q.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map_eigenvalues(|x| x)
    }
}

pub fn hermitian_eigensystem(a: &CMatrix) -> Result<HermitianSpectrum> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            actual: a.ncols(),
        });
    }
    let deviation = hermiticity_defect(a);
    if deviation > EIG_TOL * max_norm(a).max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors =
        CMatrix::from_fn(a.nrows(), a.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Square root of a PSD matrix; eigenvalues down to `-PSD_TOL` are clipped
/// to zero.
pub fn psd_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let spec = hermitian_eigensystem(a)?;
    let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -PSD_TOL * max_norm(a).max(1.0) {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    Ok(spec.map_eigenvalues(|x| x.max(0.0).sqrt()))
}

/// `1/2 ||rho - sigma||_1`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    let diff = rho.matrix() - sigma.matrix();
    let spec = hermitian_eigensystem(&diff)?;
    Ok(0.5 * spec.eigenvalues.iter().map(|x| x.abs()).sum::<f64>())
}
