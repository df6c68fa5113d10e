//! JSON scenario files.
//!
//! ```json
//! {
//!   "mode": "qec_logical",
//!   "bath": { "v": 1.0, "gamma_rate": 0.1 },
//!   "T": 0.7853981633974483,
//!   "n_steps": 8,
//!   "initial": { "family": { "theta": 0.0 } },
//!   "outputs": { "csv": "fig3.csv", "svg": "fig3.svg" }
//! }
//! ```

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dephasing::{BathSpec, CouplingConvention};
use crate::error::{Error, Result};
use crate::experiments::runner::{
    period_grid, run_no_qec, run_qec, sweep_kraus_weights, InitialState, KrausRow, TimeSeriesRecord,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    NoQecPhysical,
    QecLogical,
    KrausSweep,
}

impl Mode {
    /// Physical qubits the bath acts on.
    pub fn register_size(self) -> usize {
        match self {
            Mode::NoQecPhysical => 2,
            Mode::QecLogical | Mode::KrausSweep => 6,
        }
    }
}

/// A scalar or a full symmetric matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Scalar(f64),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairConvention {
    #[default]
    Unordered,
    Ordered,
}

impl From<PairConvention> for CouplingConvention {
    fn from(p: PairConvention) -> Self {
        match p {
            PairConvention::Unordered => CouplingConvention::UnorderedPairs,
            PairConvention::Ordered => CouplingConvention::OrderedPairs,
        }
    }
}

/// Bath parameters. A scalar `v` sets every off-diagonal coupling; a scalar
/// `gamma_rate` sets every entry of the rate matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub v: Param,
    pub gamma_rate: Param,
    #[serde(default)]
    pub pair_convention: PairConvention,
}

impl Default for BathConfig {
    fn default() -> Self {
        Self {
            v: Param::Scalar(1.0),
            gamma_rate: Param::Scalar(0.1),
            pair_convention: PairConvention::Unordered,
        }
    }
}

fn to_matrix(
    name: &str,
    p: &Param,
    n: usize,
    scalar: impl Fn(usize, usize, f64) -> f64,
) -> Result<DMatrix<f64>> {
    match p {
        Param::Scalar(x) => Ok(DMatrix::from_fn(n, n, |i, j| scalar(i, j, *x))),
        Param::Matrix(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::Config(format!("{name} must be a {n}x{n} matrix")));
            }
            Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
        }
    }
}

impl BathConfig {
    pub fn build(&self, n_physical: usize) -> Result<BathSpec> {
        let v = to_matrix(
            "v",
            &self.v,
            n_physical,
            |i, j, x| if i == j { 0.0 } else { x },
        )?;
        let g = to_matrix("gamma_rate", &self.gamma_rate, n_physical, |_, _, x| x)?;
        if g.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Config("bath parameters must be finite".into()));
        }
        let bath = BathSpec::new(g, v).map_err(|e| Error::Config(format!("bath: {e}")))?;
        Ok(bath.with_convention(self.pair_convention.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub csv: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
}

/// One experiment. `T` is the QEC period (or the largest period of a sweep);
/// `dt` is the sampling step of a run without correction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode: Mode,
    #[serde(default)]
    pub bath: BathConfig,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub n_steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
    pub outputs: Outputs,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioOutput {
    Series(Vec<TimeSeriesRecord>),
    Sweep(Vec<KrausRow>),
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn require(&self, name: &str, value: Option<f64>) -> Result<f64> {
        let x = value
            .ok_or_else(|| Error::Config(format!("mode {:?} requires `{name}`", self.mode)))?;
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::Config(format!(
                "`{name}` must be a finite time >= 0, got {x}"
            )));
        }
        Ok(x)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be >= 1".into()));
        }
        match self.mode {
            Mode::NoQecPhysical => {
                self.require("dt", self.dt)?;
            }
            Mode::QecLogical => {
                self.require("T", self.period)?;
            }
            Mode::KrausSweep => {
                if self.require("T", self.period)? == 0.0 {
                    return Err(Error::Config("sweep needs T > 0".into()));
                }
            }
        }
        self.bath.build(self.mode.register_size())?;
        Ok(())
    }

    /// Initial condition, defaulting to the x-basis average for physical runs
    /// and `|0~0~>` for QEC runs.
    pub fn initial_state(&self) -> InitialState {
        self.initial.clone().unwrap_or(match self.mode {
            Mode::NoQecPhysical => InitialState::XBasisAverage,
            _ => InitialState::ZeroZero,
        })
    }

    pub fn run(&self) -> Result<ScenarioOutput> {
        self.validate()?;
        let bath = self.bath.build(self.mode.register_size())?;
        Ok(match self.mode {
            Mode::NoQecPhysical => {
                let dt = self.require("dt", self.dt)?;
                ScenarioOutput::Series(run_no_qec(&bath, dt, self.n_steps, &self.initial_state())?)
            }
            Mode::QecLogical => {
                let t = self.require("T", self.period)?;
                ScenarioOutput::Series(run_qec(&bath, t, self.n_steps, &self.initial_state())?)
            }
            Mode::KrausSweep => {
                let t = self.require("T", self.period)?;
                ScenarioOutput::Sweep(sweep_kraus_weights(&bath, &period_grid(t, self.n_steps))?)
            }
        })
    }
}
