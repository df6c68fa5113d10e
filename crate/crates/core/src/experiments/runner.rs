use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    chi_in_x_basis, fit_seven_kraus, logical_channel, KrausFamilyFit, LogicalChannel,
};
use crate::dephasing::{evolve, BathSpec};
use crate::entanglement::concurrence;
use crate::error::{Error, Result};
use crate::experiments::family::InitialStateFamily;
use crate::qec3::{logical_x_state, CodeLayout, QecCycle};
use crate::qstate::{fidelity_pure, CVector, DensityMatrix, PureState, C64};

/// One sample of a fidelity/concurrence trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeSeriesRecord {
    pub step: usize,
    pub time: f64,
    pub fidelity: f64,
    pub concurrence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub fn state(self) -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (z, p, m) = (C64::from(0.0), C64::from(s), C64::from(-s));
        let amps = match self {
            BellState::PhiPlus => [p, z, z, p],
            BellState::PhiMinus => [p, z, z, m],
            BellState::PsiPlus => [z, p, p, z],
            BellState::PsiMinus => [z, p, m, z],
        };
        PureState::new(CVector::from_row_slice(&amps)).expect("normalized")
    }
}

/// Two-qubit initial condition. For QEC runs the same vector is read in the
/// logical basis and encoded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `|00>`, or `|0~0~>` when encoded.
    ZeroZero,
    Bell(BellState),
    /// `|ij>_x`, eigenstates of `X (x) X`.
    XBasis([u8; 2]),
    /// Equal mixture of the four `|ij>_x` runs.
    XBasisAverage,
    Family(InitialStateFamily),
}

impl InitialState {
    /// Weighted pure states whose runs are averaged; weights sum to one.
    pub fn weighted_states(&self) -> Result<Vec<(f64, PureState)>> {
        Ok(match self {
            InitialState::ZeroZero => vec![(1.0, PureState::from_bits("00")?)],
            InitialState::Bell(b) => vec![(1.0, b.state())],
            InitialState::XBasis(bits) => vec![(1.0, logical_x_state(bits)?)],
            InitialState::XBasisAverage => {
                let mut v = Vec::with_capacity(4);
                for i in 0..2u8 {
                    for j in 0..2u8 {
                        v.push((0.25, logical_x_state(&[i, j])?));
                    }
                }
                v
            }
            InitialState::Family(f) => f.samples()?,
        })
    }
}

fn record(
    step: usize,
    time: f64,
    rho: &DensityMatrix,
    psi0: &PureState,
) -> Result<TimeSeriesRecord> {
    Ok(TimeSeriesRecord {
        step,
        time,
        fidelity: fidelity_pure(rho, psi0)?,
        concurrence: concurrence(rho)?.value(),
    })
}

/// Pointwise weighted mean of per-state trajectories. Runs are evaluated in
/// parallel and reduced in input order.
pub fn average_over_states<F>(
    samples: &[(f64, PureState)],
    runner: F,
) -> Result<Vec<TimeSeriesRecord>>
where
    F: Fn(&PureState) -> Result<Vec<TimeSeriesRecord>> + Sync,
{
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no states to average".into()));
    }
    let runs: Vec<Result<Vec<TimeSeriesRecord>>> =
        samples.par_iter().map(|(_, psi)| runner(psi)).collect();
    let total: f64 = samples.iter().map(|(w, _)| w).sum();
    let mut acc: Option<Vec<TimeSeriesRecord>> = None;
    for ((w, _), run) in samples.iter().zip(runs) {
        let run = run?;
        let w = w / total;
        match acc.as_mut() {
            None => {
                acc = Some(
                    run.iter()
                        .map(|r| TimeSeriesRecord {
                            fidelity: w * r.fidelity,
                            concurrence: w * r.concurrence,
                            ..*r
                        })
                        .collect(),
                )
            }
            Some(a) => {
                if a.len() != run.len() {
                    return Err(Error::DimensionMismatch {
                        expected: a.len(),
                        actual: run.len(),
                    });
                }
                for (x, r) in a.iter_mut().zip(&run) {
                    x.fidelity += w * r.fidelity;
                    x.concurrence += w * r.concurrence;
                }
            }
        }
    }
    let mut out = acc.expect("non-empty");
    for r in &mut out {
        r.fidelity = r.fidelity.clamp(0.0, 1.0);
        r.concurrence = r.concurrence.clamp(0.0, 1.0);
    }
    Ok(out)
}

/// Physical two-qubit trajectory without error correction, sampled at
/// `t_k = k dt` for `k = 0..=n_steps`.
pub fn no_qec_series(
    psi0: &PureState,
    bath: &BathSpec,
    dt: f64,
    n_steps: usize,
) -> Result<Vec<TimeSeriesRecord>> {
    if psi0.n_qubits() != 2 || bath.n_physical() != 2 {
        return Err(Error::InvalidArgument(
            "no-QEC runs use two physical qubits".into(),
        ));
    }
    let rho0 = psi0.projector();
    (0..=n_steps)
        .map(|k| {
            let t = k as f64 * dt;
            record(k, t, &evolve(&rho0, bath, t)?, psi0)
        })
        .collect()
}

pub fn run_no_qec(
    bath: &BathSpec,
    dt: f64,
    n_steps: usize,
    initial: &InitialState,
) -> Result<Vec<TimeSeriesRecord>> {
    check_schedule(dt, n_steps)?;
    let samples = initial.weighted_states()?;
    average_over_states(&samples, |psi| no_qec_series(psi, bath, dt, n_steps))
}

/// Logical trajectory under repeated application of a one-period channel.
pub fn qec_series(
    psi0: &PureState,
    channel: &LogicalChannel,
    n_steps: usize,
) -> Result<Vec<TimeSeriesRecord>> {
    let mut rho = psi0.projector();
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(record(0, 0.0, &rho, psi0)?);
    for k in 1..=n_steps {
        rho = channel.apply_density(&rho)?;
        out.push(record(k, k as f64 * channel.period(), &rho, psi0)?);
    }
    Ok(out)
}

/// Same trajectory propagated on the six physical qubits with
/// [`QecCycle`] and decoded after every window.
pub fn qec_series_physical(
    psi0: &PureState,
    cycle: &QecCycle,
    n_steps: usize,
) -> Result<Vec<TimeSeriesRecord>> {
    let code = cycle.code();
    let mut rho = code.encode(&psi0.projector())?;
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(record(0, 0.0, &code.decode(&rho)?, psi0)?);
    for k in 1..=n_steps {
        rho = cycle.apply(&rho)?;
        out.push(record(
            k,
            k as f64 * cycle.period(),
            &code.decode(&rho)?,
            psi0,
        )?);
    }
    Ok(out)
}

/// Repeated QEC windows of length `period` on two encoded logical qubits.
///
/// Recovery always returns the register to the code space and every window
/// restarts the bath correlations, so each application is the same logical
/// channel; it is built once and reused for every state.
pub fn run_qec(
    bath: &BathSpec,
    period: f64,
    n_steps: usize,
    initial: &InitialState,
) -> Result<Vec<TimeSeriesRecord>> {
    check_schedule(period, n_steps)?;
    let channel = logical_channel(bath, period, &CodeLayout::default())?;
    channel.check_cptp()?;
    let samples = initial.weighted_states()?;
    average_over_states(&samples, |psi| qec_series(psi, &channel, n_steps))
}

fn check_schedule(step: f64, n_steps: usize) -> Result<()> {
    if !(step >= 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time step must be >= 0, got {step}"
        )));
    }
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be >= 1".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausRow {
    pub period: f64,
    pub fit: KrausFamilyFit,
}

impl KrausRow {
    pub fn flagged(&self) -> bool {
        self.fit.flagged()
    }
}

/// Seven-operator weights over a grid of QEC periods, in grid order.
pub fn sweep_kraus_weights(bath: &BathSpec, grid: &[f64]) -> Result<Vec<KrausRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty period grid".into()));
    }
    if grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "period grid must be positive and strictly increasing".into(),
        ));
    }
    let layout = CodeLayout::default();
    grid.par_iter()
        .map(|&period| {
            let ch = logical_channel(bath, period, &layout)?;
            ch.check_cptp()?;
            let fit = fit_seven_kraus(&chi_in_x_basis(&ch))?;
            Ok(KrausRow { period, fit })
        })
        .collect()
}

/// `n` evenly spaced periods `T_max k / n`, `k = 1..=n`.
pub fn period_grid(t_max: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| t_max * k as f64 / n as f64).collect()
}
