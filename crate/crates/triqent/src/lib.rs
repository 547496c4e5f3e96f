//! Canonical decomposition, operational entanglement measures and local-unitary
//! classification of pure three-qubit states.
//!
//! Qubits are numbered from 0 and qubit 0 is the most significant bit of an
//! amplitude index. The distinguished party of the decomposition is qubit 0.

pub mod bipartite;
pub mod campaign;
pub mod canonical;
pub mod classify;
pub mod ensemble;
pub mod error;
pub mod gensim;
pub mod linalg;
pub mod measures;
pub mod oracle;
pub mod sampling;
pub mod state;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
