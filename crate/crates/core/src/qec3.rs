//! Three-qubit phase-flip code.
//!
//! Each logical qubit lives in a block of three physical qubits with
//! `|0~> = |+++>` and `|1~> = |--->`. A single `Z` error on a block is
//! detected by the stabilizers `X_a X_b` and `X_b X_c` and undone by the
//! matching `Z` correction. Recovery is applied as the deterministic
//! sum-over-syndromes channel, block by block.

use crate::dephasing::{BathSpec, DephasingFactors};
use crate::error::{Error, Result};
use crate::qstate::{CMatrix, CVector, DensityMatrix, PureState, C64};

/// Largest code-space leakage accepted by [`PhaseFlipCode::decode`].
pub const LEAKAGE_TOL: f64 = 1e-6;

/// Assignment of physical qubits to code blocks; block `i` carries logical
/// qubit `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeLayout {
    blocks: Vec<[usize; 3]>,
}

impl Default for CodeLayout {
    fn default() -> Self {
        Self {
            blocks: vec![[0, 1, 2], [3, 4, 5]],
        }
    }
}

impl CodeLayout {
    pub fn new(blocks: Vec<[usize; 3]>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument(
                "code layout needs at least one block".into(),
            ));
        }
        let n = 3 * blocks.len();
        let mut seen = vec![false; n];
        for &q in blocks.iter().flatten() {
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
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[[usize; 3]] {
        &self.blocks
    }

    pub fn n_logical(&self) -> usize {
        self.blocks.len()
    }

    pub fn n_physical(&self) -> usize {
        3 * self.blocks.len()
    }
}

/// Operator with few non-zero entries per row and real coefficients.
#[derive(Debug, Clone)]
struct SparseOp {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseOp {
    /// `K rho K^dagger`, accumulated into `out`.
    fn sandwich_into(&self, rho: &CMatrix, out: &mut CMatrix) {
        let dim = self.rows.len();
        let mut left = CMatrix::zeros(dim, dim);
        for (i, row) in self.rows.iter().enumerate() {
            for &(k, w) in row {
                for l in 0..dim {
                    left[(i, l)] += rho[(k, l)] * w;
                }
            }
        }
        for (j, row) in self.rows.iter().enumerate() {
            for &(l, w) in row {
                for i in 0..dim {
                    out[(i, j)] += left[(i, l)] * w;
                }
            }
        }
    }

    fn to_dense(&self) -> CMatrix {
        let dim = self.rows.len();
        let mut m = CMatrix::zeros(dim, dim);
        for (i, row) in self.rows.iter().enumerate() {
            for &(k, w) in row {
                m[(i, k)] += C64::from(w);
            }
        }
        m
    }
}

fn bit_mask(qubit: usize, n: usize) -> usize {
    1 << (n - 1 - qubit)
}

/// Syndrome projector times correction for one block and syndrome
/// `(s_ab, s_bc)` with `s = +1` meaning the trivial outcome.
fn recovery_kraus(block: [usize; 3], s_ab: i32, s_bc: i32, n: usize) -> SparseOp {
    let [a, b, c] = block;
    let (ma, mb, mc) = (bit_mask(a, n), bit_mask(b, n), bit_mask(c, n));
    let correction = match (s_ab, s_bc) {
        (-1, 1) => Some(ma),
        (-1, -1) => Some(mb),
        (1, -1) => Some(mc),
        _ => None,
    };
    let flips = [
        (0usize, 1.0),
        (ma | mb, s_ab as f64),
        (mb | mc, s_bc as f64),
        (ma | mc, (s_ab * s_bc) as f64),
    ];
    let rows = (0..1usize << n)
        .map(|row| {
            let sign = match correction {
                Some(m) if row & m != 0 => -1.0,
                _ => 1.0,
            };
            flips
                .iter()
                .map(|&(f, w)| (row ^ f, 0.25 * w * sign))
                .collect()
        })
        .collect();
    SparseOp { rows }
}

const SYNDROMES: [(i32, i32); 4] = [(1, 1), (-1, 1), (-1, -1), (1, -1)];

/// Encoder, recovery channel and decoder for a [`CodeLayout`].
#[derive(Debug, Clone)]
pub struct PhaseFlipCode {
    layout: CodeLayout,
    isometry: CMatrix,
    recovery: Vec<Vec<SparseOp>>,
}

impl Default for PhaseFlipCode {
    fn default() -> Self {
        Self::new(CodeLayout::default())
    }
}

impl PhaseFlipCode {
    pub fn new(layout: CodeLayout) -> Self {
        let n = layout.n_physical();
        let k = layout.n_logical();
        let amp = (0.5f64).powf(n as f64 / 2.0);
        let isometry = CMatrix::from_fn(1 << n, 1 << k, |z, logical| {
            let mut sign = 1.0;
            for (i, block) in layout.blocks().iter().enumerate() {
                if (logical >> (k - 1 - i)) & 1 == 1 {
                    let parity = block.iter().filter(|&&q| z & bit_mask(q, n) != 0).count();
                    if parity % 2 == 1 {
                        sign = -sign;
                    }
                }
            }
            C64::from(amp * sign)
        });
        let recovery = layout
            .blocks()
            .iter()
            .map(|&block| {
                SYNDROMES
                    .iter()
                    .map(|&(s1, s2)| recovery_kraus(block, s1, s2, n))
                    .collect()
            })
            .collect();
        Self {
            layout,
            isometry,
            recovery,
        }
    }

    pub fn layout(&self) -> &CodeLayout {
        &self.layout
    }

    /// Columns are the encoded logical basis states.
    pub fn isometry(&self) -> &CMatrix {
        &self.isometry
    }

    pub fn logical_dim(&self) -> usize {
        self.isometry.ncols()
    }

    pub fn physical_dim(&self) -> usize {
        self.isometry.nrows()
    }

    fn check_dim(&self, rho: &DensityMatrix, expected: usize) -> Result<()> {
        if rho.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: rho.dim(),
            });
        }
        Ok(())
    }

    pub fn encode(&self, rho_logical: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_dim(rho_logical, self.logical_dim())?;
        let w = &self.isometry;
        DensityMatrix::from_matrix_unchecked(w * rho_logical.matrix() * w.adjoint())
    }

    pub fn encode_pure(&self, psi: &PureState) -> Result<PureState> {
        if psi.dim() != self.logical_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.logical_dim(),
                actual: psi.dim(),
            });
        }
        PureState::new(&self.isometry * psi.amplitudes())
    }

    /// Recovery on an arbitrary operator (linear extension of the channel).
    pub fn recover_operator(&self, op: &CMatrix) -> CMatrix {
        let mut current = op.clone();
        for block in &self.recovery {
            let mut next = CMatrix::zeros(current.nrows(), current.ncols());
            for k in block {
                k.sandwich_into(&current, &mut next);
            }
            current = next;
        }
        current
    }

    pub fn recover(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_dim(rho, self.physical_dim())?;
        DensityMatrix::from_matrix_unchecked(self.recover_operator(rho.matrix()))
    }

    /// `(W^dagger A W, 1 - tr(W^dagger A W))` without the leakage check.
    pub fn project_logical(&self, op: &CMatrix) -> (CMatrix, f64) {
        let w = &self.isometry;
        let inner = w.adjoint() * op * w;
        let leakage = 1.0 - inner.trace().re;
        (inner, leakage)
    }

    /// Maps a code-space state back to the logical register, renormalized.
    pub fn decode(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_dim(rho, self.physical_dim())?;
        let (inner, leakage) = self.project_logical(rho.matrix());
        if leakage.abs() > LEAKAGE_TOL {
            return Err(Error::Leakage { leakage });
        }
        let trace = 1.0 - leakage;
        DensityMatrix::from_matrix_unchecked(inner / C64::from(trace))
    }

    /// Kraus operators (dense) of the recovery channel restricted to one
    /// block; they act on the full physical register.
    pub fn block_recovery_kraus(&self, block: usize) -> Vec<CMatrix> {
        self.recovery[block]
            .iter()
            .map(SparseOp::to_dense)
            .collect()
    }

    /// Choi matrix `sum_ij E_ij (x) R(E_ij)` of the single-block recovery
    /// channel acting on three qubits.
    pub fn block_recovery_choi() -> CMatrix {
        let kraus: Vec<SparseOp> = SYNDROMES
            .iter()
            .map(|&(s1, s2)| recovery_kraus([0, 1, 2], s1, s2, 3))
            .collect();
        let dim = 8;
        let mut choi = CMatrix::zeros(dim * dim, dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut unit = CMatrix::zeros(dim, dim);
                unit[(i, j)] = C64::from(1.0);
                let mut out = CMatrix::zeros(dim, dim);
                for k in &kraus {
                    k.sandwich_into(&unit, &mut out);
                }
                for a in 0..dim {
                    for b in 0..dim {
                        choi[(i * dim + a, j * dim + b)] = out[(a, b)];
                    }
                }
            }
        }
        choi
    }
}

/// One free-evolution window of length `T` followed by recovery. The bath
/// correlations restart from zero in every window.
#[derive(Debug, Clone)]
pub struct QecCycle {
    code: PhaseFlipCode,
    factors: DephasingFactors,
}

impl QecCycle {
    pub fn new(code: PhaseFlipCode, bath: &BathSpec, period: f64) -> Result<Self> {
        if bath.n_physical() != code.layout().n_physical() {
            return Err(Error::DimensionMismatch {
                expected: code.layout().n_physical(),
                actual: bath.n_physical(),
            });
        }
        let factors = DephasingFactors::new(bath, period)?;
        Ok(Self { code, factors })
    }

    pub fn code(&self) -> &PhaseFlipCode {
        &self.code
    }

    pub fn period(&self) -> f64 {
        self.factors.duration()
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.code.recover(&self.factors.apply(rho)?)
    }

    pub fn apply_operator(&self, op: &CMatrix) -> CMatrix {
        self.code.recover_operator(&self.factors.apply_operator(op))
    }
}

/// `recover(evolve(rho, bath, T))` with the default two-block layout.
pub fn qec_cycle(rho: &DensityMatrix, bath: &BathSpec, period: f64) -> Result<DensityMatrix> {
    QecCycle::new(PhaseFlipCode::default(), bath, period)?.apply(rho)
}

/// Logical x-basis product state `|i~ j~ ...>_x`; bit 0 is `+`, 1 is `-`.
pub fn logical_x_state(bits: &[u8]) -> Result<PureState> {
    if bits.is_empty() || bits.iter().any(|&b| b > 1) {
        return Err(Error::InvalidArgument(
            "x-basis labels must be 0 or 1".into(),
        ));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = CVector::from_element(1, C64::from(1.0));
    for &b in bits {
        let sign = if b == 0 { 1.0 } else { -1.0 };
        let single = CVector::from_vec(vec![C64::from(s), C64::from(sign * s)]);
        v = v.kronecker(&single);
    }
    PureState::new(v)
}
