//! Scenario runner, state families and output writers.

pub mod config;
pub mod family;
pub mod output;
pub mod runner;

pub use config::{BathConfig, Mode, Outputs, ScenarioConfig, ScenarioOutput};
pub use family::{sample_family_state, AveragingScheme, InitialStateFamily};
pub use output::{emit_csv, emit_svg, emit_sweep_csv, emit_sweep_svg, format_sig};
pub use runner::{
    average_over_states, run_no_qec, run_qec, sweep_kraus_weights, BellState, InitialState,
    KrausRow, TimeSeriesRecord,
};

use crate::error::Result;

/// Caps the global thread pool at `SIM_THREADS` when set. Later calls are
/// no-ops once the pool exists.
pub fn configure_threads() {
    let n = std::env::var("SIM_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok());
    if let Some(n) = n.filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

impl ScenarioConfig {
    /// Runs the scenario and writes its CSV and optional SVG.
    pub fn execute(&self) -> Result<ScenarioOutput> {
        let out = self.run()?;
        match &out {
            ScenarioOutput::Series(r) => {
                emit_csv(r, &self.outputs.csv)?;
                if let Some(svg) = &self.outputs.svg {
                    emit_svg(r, svg)?;
                }
            }
            ScenarioOutput::Sweep(rows) => {
                emit_sweep_csv(rows, &self.outputs.csv)?;
                if let Some(svg) = &self.outputs.svg {
                    emit_sweep_svg(rows, svg)?;
                }
            }
        }
        Ok(out)
    }
}
