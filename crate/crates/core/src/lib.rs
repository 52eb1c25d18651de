//! Simulation and exact verification of a two-ancilla error-prevention code
//! that protects `n` system qubits in the Zeno regime.
//!
//! The pieces, bottom up:
//!
//! - [`pauli`]: exact Pauli-string algebra and the encoder conjugation rules.
//! - [`statevec`]: dense state vectors, operators, matrix exponentials and
//!   projective measurement.
//! - [`code`]: the encoder `C = Σ_a |a⟩⟨a| ⊗ σ_a^{⊗n}`, state preparation and
//!   the ancilla syndrome measurement.
//! - [`noise`]: independent per-qubit environment coupling and its evolution.
//! - [`protocol`]: protected cycles, repeated-measurement runs, ε sweeps and
//!   the two-time measurement protocol.
//! - [`heisenberg`]: operator-level checks of the conditional-flip identities.
//! - [`verify`]: the full identity suite behind `zeno verify`.
//! - [`config`], [`experiment`] and [`output`]: experiment configuration,
//!   execution and CSV/JSON records used by the `zeno` binary.
//!
//! Register layout everywhere: two ancilla qubits, then `n` system qubits, then
//! `n` environment qubits, little-endian (qubit `q` is bit `q` of the index).

pub mod code;
pub mod config;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod heisenberg;
pub mod noise;
pub mod output;
pub mod pauli;
pub mod protocol;
pub mod statevec;
pub mod verify;

pub use code::{build_code, Syndrome, ZenoCode};
pub use error::{Result, ZenoError};
pub use noise::NoiseModel;
pub use pauli::{CoefficientTable, Pauli, PauliString};
pub use statevec::{DenseOperator, RegisterLayout, StateVector};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Number of ancilla qubits used by the code.
pub const ANCILLA_QUBITS: usize = 2;

/// The generator behind every stochastic operation in the crate.
pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}
