//! Entanglement between logical qubits protected by a three-qubit
//! phase-flip code while coupled to a spatially correlated dephasing bath.
//!
//! The crate is organized bottom-up:
//!
//! - [`qstate`]: dense states, density matrices and Hermitian eigensolver.
//! - [`dephasing`]: exact element-wise reduced dynamics under the bath.
//! - [`entanglement`]: Wootters concurrence.
//! - [`qec3`]: phase-flip encoding, syndrome recovery and the QEC cycle.
//! - [`channel`]: the logical channel of one cycle, its Choi/chi/Kraus forms,
//!   the seven-operator fit and the short-period master-equation rates.
//! - [`experiments`]: scenario runner, state families, CSV/SVG output.

pub mod channel;
pub mod dephasing;
pub mod entanglement;
pub mod error;
pub mod experiments;
pub mod qec3;
pub mod qstate;
pub mod random;

pub use error::{Error, Result};
