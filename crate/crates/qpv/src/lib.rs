//! Quantum-process-verification toolkit.
//!
//! Builds pass-or-fail verification strategies for quantum processes in two
//! flavors: ancilla-assisted (the process acts on half of a maximally
//! entangled state and the resulting Choi state is tested with local
//! measurements) and prepare-and-measure (random product inputs, one binary
//! effect per output). The crate computes spectral gaps and sample budgets,
//! converts ancilla-assisted strategies into prepare-and-measure ensembles,
//! bounds worst-case acceptance of faulty processes with independent oracles,
//! and runs seeded Monte Carlo verification experiments, all with dense
//! linear algebra at desk scale.

pub mod cap;
pub mod channel;
pub mod error;
pub mod meas;
pub mod oracle;
pub mod pauli;
pub mod pmpv;
pub mod protocols;
pub mod simulate;
pub mod strategy;
pub mod tensor;
pub mod wire;

pub use error::{Error, Result};
