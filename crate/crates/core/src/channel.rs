//! The logical two-qubit channel produced by one QEC period, its
//! representations, and the short-period master-equation analytics.
//!
//! Choi convention: `J = sum_ij E_ij (x) Phi(E_ij)` with the input index
//! first, so `J[(i*d + a, j*d + b)] = Phi(E_ij)[a, b]` and `tr J = d`.
//!
//! Chi convention: `Phi(rho) = sum_mn chi_mn P_m rho P_n^dagger` over the
//! unnormalized two-qubit Paulis; a trace-preserving map has `tr chi = 1`.

use rayon::prelude::*;

use crate::dephasing::BathSpec;
use crate::error::{Error, Result};
use crate::qec3::{CodeLayout, PhaseFlipCode, QecCycle, LEAKAGE_TOL};
use crate::qstate::{
    hermitian_eigensystem, hermiticity_defect, kron, max_norm, pauli_x, pauli_y, pauli_z, CMatrix,
    DensityMatrix, C64, PSD_TOL,
};

/// Trace-preservation tolerance on `tr_out J - 1`.
pub const TP_TOL: f64 = 1e-10;
/// Relative eigenvalue cutoff when extracting Kraus operators.
pub const KRAUS_CUTOFF: f64 = 1e-10;
/// Fits with a larger residual fall outside the seven-operator family.
pub const FIT_FLAG_THRESHOLD: f64 = 1e-3;

const LOGICAL_DIM: usize = 4;

/// A completely positive trace-preserving map on two logical qubits.
#[derive(Debug, Clone)]
pub struct LogicalChannel {
    choi: CMatrix,
    period: f64,
    bath: Option<BathSpec>,
}

fn vec_of(op: &CMatrix) -> Vec<C64> {
    let d = op.nrows();
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        for a in 0..d {
            v.push(op[(a, i)]);
        }
    }
    v
}

impl LogicalChannel {
    pub fn identity() -> Self {
        Self::from_kraus(&[CMatrix::identity(LOGICAL_DIM, LOGICAL_DIM)])
            .expect("identity is a valid Kraus set")
    }

    /// Channel `rho -> sum_k K rho K^dagger`.
    pub fn from_kraus(kraus: &[CMatrix]) -> Result<Self> {
        let d = LOGICAL_DIM;
        let mut choi = CMatrix::zeros(d * d, d * d);
        for k in kraus {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: k.nrows(),
                });
            }
            let v = vec_of(k);
            for r in 0..d * d {
                for c in 0..d * d {
                    choi[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        Ok(Self {
            choi,
            period: 0.0,
            bath: None,
        })
    }

    /// Wraps a Choi matrix after checking it is CPTP.
    pub fn from_choi(choi: CMatrix) -> Result<Self> {
        let d2 = LOGICAL_DIM * LOGICAL_DIM;
        if choi.nrows() != d2 || choi.ncols() != d2 {
            return Err(Error::DimensionMismatch {
                expected: d2,
                actual: choi.nrows(),
            });
        }
        let ch = Self {
            choi,
            period: 0.0,
            bath: None,
        };
        ch.check_cptp()?;
        Ok(ch)
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn bath(&self) -> Option<&BathSpec> {
        self.bath.as_ref()
    }

    /// `Phi(op)` for any 4x4 operator.
    pub fn apply(&self, op: &CMatrix) -> CMatrix {
        let d = LOGICAL_DIM;
        CMatrix::from_fn(d, d, |a, b| {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..d {
                for j in 0..d {
                    s += op[(i, j)] * self.choi[(i * d + a, j * d + b)];
                }
            }
            s
        })
    }

    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != LOGICAL_DIM {
            return Err(Error::DimensionMismatch {
                expected: LOGICAL_DIM,
                actual: rho.dim(),
            });
        }
        DensityMatrix::from_matrix_unchecked(self.apply(rho.matrix()))
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &LogicalChannel) -> LogicalChannel {
        let d = LOGICAL_DIM;
        let mut choi = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut unit = CMatrix::zeros(d, d);
                unit[(i, j)] = C64::new(1.0, 0.0);
                let out = other.apply(&self.apply(&unit));
                for a in 0..d {
                    for b in 0..d {
                        choi[(i * d + a, j * d + b)] = out[(a, b)];
                    }
                }
            }
        }
        LogicalChannel {
            choi,
            period: self.period + other.period,
            bath: self.bath.clone(),
        }
    }

    /// Maximum of `|tr_out J - 1|` over entries.
    pub fn trace_defect(&self) -> f64 {
        let d = LOGICAL_DIM;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let s: C64 = (0..d).map(|a| self.choi[(i * d + a, j * d + a)]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - C64::from(want)).norm());
            }
        }
        worst
    }

    pub fn min_choi_eigenvalue(&self) -> Result<f64> {
        let spec = hermitian_eigensystem(&self.choi)?;
        Ok(spec.eigenvalues.last().copied().unwrap_or(0.0))
    }

    pub fn check_cptp(&self) -> Result<()> {
        let herm = hermiticity_defect(&self.choi);
        if herm > PSD_TOL {
            return Err(Error::NotCptp(format!(
                "Choi matrix not Hermitian ({herm:e})"
            )));
        }
        let min = self.min_choi_eigenvalue()?;
        if min < -PSD_TOL {
            return Err(Error::NotCptp(format!("Choi eigenvalue {min:e} < 0")));
        }
        let tp = self.trace_defect();
        if tp > TP_TOL {
            return Err(Error::NotCptp(format!("not trace preserving ({tp:e})")));
        }
        Ok(())
    }

    /// Largest entry of the difference between two Choi matrices.
    pub fn distance(&self, other: &LogicalChannel) -> f64 {
        max_norm(&(&self.choi - &other.choi))
    }
}

/// Choi matrix of `rho_L -> decode(recover(evolve(encode(rho_L), bath, T)))`.
pub fn logical_channel(
    bath: &BathSpec,
    period: f64,
    layout: &CodeLayout,
) -> Result<LogicalChannel> {
    let code = PhaseFlipCode::new(layout.clone());
    if code.logical_dim() != LOGICAL_DIM {
        return Err(Error::InvalidArgument(format!(
            "logical channel needs two logical qubits, layout has {}",
            layout.n_logical()
        )));
    }
    let cycle = QecCycle::new(code, bath, period)?;
    let d = LOGICAL_DIM;
    let w = cycle.code().isometry().clone();

    let outputs: Vec<Result<CMatrix>> = (0..d * d)
        .into_par_iter()
        .map(|unit_index| {
            let (i, j) = (unit_index / d, unit_index % d);
            let mut unit = CMatrix::zeros(d, d);
            unit[(i, j)] = C64::new(1.0, 0.0);
            let physical = cycle.apply_operator(&(&w * unit * w.adjoint()));
            let (inner, _) = cycle.code().project_logical(&physical);
            let outside = max_norm(&(&physical - &w * &inner * w.adjoint()));
            if outside > LEAKAGE_TOL {
                return Err(Error::Leakage { leakage: outside });
            }
            Ok(inner)
        })
        .collect();

    let mut choi = CMatrix::zeros(d * d, d * d);
    for (unit_index, out) in outputs.into_iter().enumerate() {
        let out = out?;
        let (i, j) = (unit_index / d, unit_index % d);
        for a in 0..d {
            for b in 0..d {
                choi[(i * d + a, j * d + b)] = out[(a, b)];
            }
        }
    }
    Ok(LogicalChannel {
        choi,
        period,
        bath: Some(bath.clone()),
    })
}

/// Kraus operators from the eigendecomposition of the Choi matrix.
pub fn choi_to_kraus(ch: &LogicalChannel) -> Result<Vec<CMatrix>> {
    let spec = hermitian_eigensystem(ch.choi())?;
    let largest = spec.eigenvalues.first().copied().unwrap_or(0.0);
    let smallest = spec.eigenvalues.last().copied().unwrap_or(0.0);
    if smallest < -PSD_TOL * largest.max(1.0) {
        return Err(Error::NotPositive {
            min_eigenvalue: smallest,
        });
    }
    let d = LOGICAL_DIM;
    let cutoff = KRAUS_CUTOFF * largest;
    let kraus = spec
        .eigenvalues
        .iter()
        .enumerate()
        .take_while(|(_, &lambda)| lambda > cutoff)
        .map(|(col, &lambda)| {
            let v = spec.eigenvectors.column(col);
            let scale = C64::from(lambda.sqrt());
            CMatrix::from_fn(d, d, |a, i| v[i * d + a] * scale)
        })
        .collect();
    Ok(kraus)
}

/// The 16 two-qubit Paulis `P_{4p + q} = sigma_p (x) sigma_q` with
/// `sigma = (I, X, Y, Z)`.
pub fn two_qubit_paulis() -> Vec<CMatrix> {
    let singles = [CMatrix::identity(2, 2), pauli_x(), pauli_y(), pauli_z()];
    let mut out = Vec::with_capacity(16);
    for p in &singles {
        for q in &singles {
            out.push(kron(p, q));
        }
    }
    out
}

/// Positions of `1, X1, X2, X1 X2` in [`two_qubit_paulis`].
pub const X_SUBSET: [usize; 4] = [0, 4, 1, 5];

/// Full 16x16 process matrix in the Pauli basis.
pub fn pauli_chi(ch: &LogicalChannel) -> CMatrix {
    let d = LOGICAL_DIM;
    let vecs: Vec<Vec<C64>> = two_qubit_paulis().iter().map(vec_of).collect();
    let jv: Vec<Vec<C64>> = vecs
        .iter()
        .map(|v| {
            (0..d * d)
                .map(|r| (0..d * d).map(|c| ch.choi[(r, c)] * v[c]).sum())
                .collect()
        })
        .collect();
    let norm = C64::from((d * d) as f64);
    CMatrix::from_fn(16, 16, |m, n| {
        let s: C64 = vecs[m].iter().zip(&jv[n]).map(|(a, b)| a.conj() * b).sum();
        s / norm
    })
}

/// Process matrix restricted to `{1, X1, X2, X1 X2}`.
#[derive(Debug, Clone)]
pub struct ChiMatrix {
    pub chi: CMatrix,
    /// Diagonal weight on the twelve Paulis outside the subset.
    pub leakage: f64,
}

impl ChiMatrix {
    pub fn entry(&self, m: usize, n: usize) -> C64 {
        self.chi[(m, n)]
    }
}

pub fn chi_in_x_basis(ch: &LogicalChannel) -> ChiMatrix {
    let full = pauli_chi(ch);
    let chi = CMatrix::from_fn(4, 4, |m, n| full[(X_SUBSET[m], X_SUBSET[n])]);
    let leakage = (0..16)
        .filter(|k| !X_SUBSET.contains(k))
        .map(|k| full[(k, k)].re)
        .sum();
    ChiMatrix { chi, leakage }
}

/// Weights of the seven-operator Kraus family
///
/// ```text
/// M0 = m0 1                 M4 = m4 (X1 + s4 X2)
/// M1 = m1 X1                M5 = m5 (1 + s5 X1X2)
/// M2 = m2 X2                M6 = m6 (1 - i s6 X1X2)
/// M3 = m3 X1X2
/// ```
///
/// `s6 = m6_sign` is the sign of `Im chi(1, X1X2)`; `s4` and `s5` are the
/// signs of the real coherences `chi(X1, X2)` and `chi(1, X1X2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausFamilyFit {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    pub m5: f64,
    pub m6_abs: f64,
    pub m6_sign: f64,
    pub m4_sign: f64,
    pub m5_sign: f64,
    pub residual: f64,
}

fn sign_of(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

impl KrausFamilyFit {
    pub fn weights(&self) -> [f64; 7] {
        [
            self.m0,
            self.m1,
            self.m2,
            self.m3,
            self.m4,
            self.m5,
            self.m6_abs,
        ]
    }

    /// True when the channel is outside the family.
    pub fn flagged(&self) -> bool {
        self.residual > FIT_FLAG_THRESHOLD
    }

    pub fn operators(&self) -> Vec<CMatrix> {
        let i4 = CMatrix::identity(4, 4);
        let x = pauli_x();
        let id2 = CMatrix::identity(2, 2);
        let x1 = kron(&x, &id2);
        let x2 = kron(&id2, &x);
        let x12 = kron(&x, &x);
        let c = |v: f64| C64::from(v);
        vec![
            &i4 * c(self.m0),
            &x1 * c(self.m1),
            &x2 * c(self.m2),
            &x12 * c(self.m3),
            (&x1 + &x2 * c(self.m4_sign)) * c(self.m4),
            (&i4 + &x12 * c(self.m5_sign)) * c(self.m5),
            (&i4 - &x12 * C64::new(0.0, self.m6_sign)) * c(self.m6_abs),
        ]
    }

    pub fn reconstruct(&self) -> LogicalChannel {
        LogicalChannel::from_kraus(&self.operators()).expect("4x4 operators")
    }

    /// `max |sum M^dagger M - 1|`.
    pub fn completeness_defect(&self) -> f64 {
        let sum = self
            .operators()
            .iter()
            .fold(CMatrix::zeros(4, 4), |acc, m| acc + m.adjoint() * m);
        max_norm(&(sum - CMatrix::identity(4, 4)))
    }
}

/// Reads the family weights off the chi matrix in the `{1, X1, X2, X1X2}`
/// subset. Negative squared weights are clipped to zero and the clipped
/// amount, together with the chi entries the family cannot produce, makes
/// up the residual.
pub fn fit_seven_kraus(chi: &ChiMatrix) -> Result<KrausFamilyFit> {
    if chi.leakage > LEAKAGE_TOL {
        return Err(Error::InvalidArgument(format!(
            "process weight {:e} outside the 1/X1/X2/X1X2 operators",
            chi.leakage
        )));
    }
    let e = |m: usize, n: usize| chi.entry(m, n);
    let (id, x1, x2, x12) = (0, 1, 2, 3);

    let mut clipped = 0.0;
    let mut take_root = |square: f64| {
        if square < 0.0 {
            clipped += -square;
            0.0
        } else {
            square.sqrt()
        }
    };

    let c12 = e(x1, x2);
    let c0 = e(id, x12);
    let m4_sq = c12.re.abs();
    let m5_sq = c0.re.abs();
    let m6_sq = c0.im.abs();
    let m4 = take_root(m4_sq);
    let m5 = take_root(m5_sq);
    let m6_abs = take_root(m6_sq);
    let m1 = take_root(e(x1, x1).re - m4_sq);
    let m2 = take_root(e(x2, x2).re - m4_sq);
    let m0 = take_root(e(id, id).re - m5_sq - m6_sq);
    let m3 = take_root(e(x12, x12).re - m5_sq - m6_sq);

    let unexplained = [
        e(id, x1),
        e(id, x2),
        e(x1, x12),
        e(x2, x12),
        C64::new(0.0, c12.im),
    ]
    .iter()
    .map(|z| z.norm_sqr())
    .sum::<f64>()
    .sqrt();

    Ok(KrausFamilyFit {
        m0,
        m1,
        m2,
        m3,
        m4,
        m5,
        m6_abs,
        m6_sign: sign_of(c0.im),
        m4_sign: sign_of(c12.re),
        m5_sign: sign_of(c0.re),
        residual: unexplained + clipped,
    })
}

/// Effective flip rates of the short-period master equation
/// `drho/dt = -(g1 + g2) rho + g1 X1 rho X1 + g2 X2 rho X2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterRates {
    pub gamma: Vec<f64>,
}

impl MasterRates {
    pub fn gamma1(&self) -> f64 {
        self.gamma[0]
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma.get(1).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.gamma.iter().sum()
    }
}

/// `gamma_i = 2/T sum_{j>k in block i} (T^2 V_jk^2 + 2 Gamma_jk(T)^2 + Gamma_jj(T) Gamma_kk(T))`.
pub fn master_rates(bath: &BathSpec, period: f64, layout: &CodeLayout) -> Result<MasterRates> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "period must be > 0, got {period}"
        )));
    }
    if bath.n_physical() != layout.n_physical() {
        return Err(Error::DimensionMismatch {
            expected: layout.n_physical(),
            actual: bath.n_physical(),
        });
    }
    let g = bath.gamma_at(period);
    let v = bath.coupling();
    let gamma = layout
        .blocks()
        .iter()
        .map(|block| {
            let mut sum = 0.0;
            for (idx, &j) in block.iter().enumerate() {
                for &k in &block[..idx] {
                    sum += period * period * v[(j, k)].powi(2)
                        + 2.0 * g[(j, k)].powi(2)
                        + g[(j, j)] * g[(k, k)];
                }
            }
            2.0 / period * sum
        })
        .collect();
    Ok(MasterRates { gamma })
}

/// Closed-form concurrence and fidelity of an initial logical Bell state
/// `(|00~> + |11~>)/sqrt 2` under the master equation.
pub fn analytic_qec_predictions(rates: &MasterRates, t: f64) -> (f64, f64) {
    let c = (-2.0 * rates.total() * t).exp();
    (c, 0.5 * (1.0 + c))
}

/// Exact solution of the master equation over `t` as a channel: independent
/// `X` flips on each logical qubit with probability `(1 - e^{-2 g_i t}) / 2`.
pub fn master_equation_channel(rates: &MasterRates, t: f64) -> LogicalChannel {
    let p1 = 0.5 * (1.0 - (-2.0 * rates.gamma1() * t).exp());
    let p2 = 0.5 * (1.0 - (-2.0 * rates.gamma2() * t).exp());
    let x = pauli_x();
    let id2 = CMatrix::identity(2, 2);
    let kraus = [
        CMatrix::identity(4, 4) * C64::from(((1.0 - p1) * (1.0 - p2)).sqrt()),
        kron(&x, &id2) * C64::from((p1 * (1.0 - p2)).sqrt()),
        kron(&id2, &x) * C64::from(((1.0 - p1) * p2).sqrt()),
        kron(&x, &x) * C64::from((p1 * p2).sqrt()),
    ];
    LogicalChannel::from_kraus(&kraus).expect("4x4 operators")
}
