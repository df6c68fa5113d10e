//! Seeded random states and unitaries for sampling and property tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::qstate::{CMatrix, CVector, DensityMatrix, PureState, C64};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> PureState {
    let dim = 1usize << n_qubits;
    let v = CVector::from_fn(dim, |_, _| gaussian(rng));
    PureState::normalized(v).expect("gaussian vector is non-zero")
}

/// `G G^dagger / tr` for a `dim x rank` Ginibre matrix `G`.
pub fn random_density<R: Rng + ?Sized>(n_qubits: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let dim = 1usize << n_qubits;
    let g = CMatrix::from_fn(dim, rank.max(1), |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::from_matrix_unchecked(m / tr).expect("square power-of-two matrix")
}

/// Random single-qubit unitary `e^{i a} Rz(b) Ry(c) Rz(d)`.
pub fn random_qubit_unitary<R: Rng + ?Sized>(rng: &mut R) -> CMatrix {
    use std::f64::consts::TAU;
    let (a, b, c, d): (f64, f64, f64, f64) = (
        rng.random::<f64>() * TAU,
        rng.random::<f64>() * TAU,
        rng.random::<f64>() * TAU,
        rng.random::<f64>() * TAU,
    );
    let rz = |x: f64| {
        CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::from_polar(1.0, -x / 2.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::from_polar(1.0, x / 2.0),
            ],
        )
    };
    let ry = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::from((c / 2.0).cos()),
            C64::from(-(c / 2.0).sin()),
            C64::from((c / 2.0).sin()),
            C64::from((c / 2.0).cos()),
        ],
    );
    (rz(b) * ry * rz(d)) * C64::from_polar(1.0, a)
}
