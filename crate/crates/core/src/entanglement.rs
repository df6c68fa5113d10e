//! Wootters concurrence of two-qubit states.

use crate::error::{Error, Result};
use crate::qstate::{hermitian_eigensystem, kron, pauli_y, CMatrix, DensityMatrix, C64, PSD_TOL};

/// Snap distance for values just outside `[0, 1]`.
const SNAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Concurrence(f64);

impl Concurrence {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Concurrence> for f64 {
    fn from(c: Concurrence) -> f64 {
        c.0
    }
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: rho.dim(),
        });
    }
    Ok(())
}

/// `(Y (x) Y) rho^* (Y (x) Y)`.
pub fn spin_flip(rho: &DensityMatrix) -> Result<CMatrix> {
    check_two_qubit(rho)?;
    let yy = kron(&pauli_y(), &pauli_y());
    Ok(&yy * rho.matrix().conjugate() * &yy)
}

/// Eigenvalues of `rho` below this fraction of the largest are treated as
/// rounding noise when factoring `rho = A A^dagger`.
const RANK_CUTOFF: f64 = 1e-13;

/// `C = max(0, l1 - l2 - l3 - l4)` where `l_i` are the square roots of the
/// eigenvalues of `rho * spin_flip(rho)` in decreasing order.
///
/// With `rho = A A^dagger` from the eigendecomposition and
/// `A~ = (Y (x) Y) A^*`, the `l_i` are the singular values of `A^dagger A~`
/// (the Hermitian matrix `sqrt(rho) spin_flip(rho) sqrt(rho)` has the same
/// nonzero spectrum as its square). Working with singular values keeps the
/// small `l_i` accurate to rounding instead of to its square root.
pub fn concurrence(rho: &DensityMatrix) -> Result<Concurrence> {
    check_two_qubit(rho)?;
    let spec = hermitian_eigensystem(rho.matrix())?;
    let top = spec.eigenvalues[0].max(0.0);
    let min = spec.eigenvalues[3];
    if min < -PSD_TOL {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    let kept: Vec<usize> = (0..4)
        .filter(|&k| spec.eigenvalues[k] > RANK_CUTOFF * top)
        .collect();
    let a = CMatrix::from_fn(4, kept.len(), |i, c| {
        let k = kept[c];
        spec.eigenvectors[(i, k)] * C64::from(spec.eigenvalues[k].sqrt())
    });
    let yy = kron(&pauli_y(), &pauli_y());
    let a_flip = &yy * a.conjugate();
    let m = a.adjoint() * a_flip;
    let mut l: Vec<f64> = m.singular_values().iter().copied().collect();
    l.sort_by(|x, y| y.total_cmp(x));
    l.resize(4, 0.0);
    let c = l[0] - l[1] - l[2] - l[3];
    let c = if c < 0.0 {
        0.0
    } else if c > 1.0 && c - 1.0 <= SNAP_TOL {
        1.0
    } else {
        c.min(1.0)
    };
    Ok(Concurrence(c))
}
