//! Dense state-vector simulation of *quantum matrices*.
//!
//! A quantum matrix is a state over a row register and a column register,
//! `Σ c_ij |i⟩⊗|j⟩`, where each amplitude stores one entry of a classical
//! matrix directly (no square roots). An auxiliary flag qubit separates the
//! loaded data (`|0⟩_a`) from the residual `√(1-f²)` branch (`|1⟩_a`).
//!
//! The crate is organised bottom-up:
//!
//! - [`sim`]: amplitudes, gates, circuits, the dense [`StateVector`] and gate
//!   statistics.
//! - [`qmatrix`]: register layout, masking, the uniform/pointwise/constant
//!   loaders and the debug read-out [`QMatrix::read_matrix`].
//! - [`arith`]: reorderings, sums, reductions and products on loaded arrays.
//! - [`oracle`]: array oracles and the constant and step-wise linear shifts.
//! - [`qcoin`]: unamplified sampling estimates followed by Grover-amplified
//!   zoom-in on an amplitude.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod arith;
mod error;
mod math;
pub mod oracle;
pub mod qcoin;
pub mod qmatrix;
pub mod sim;

pub use error::{Error, Result};
pub use qmatrix::{ClassicalMatrix, Ledger, QMatrix, RegisterLayout};
pub use sim::{
    Amplitude, BasisPattern, Circuit, Control, Gate, GateCounts, GateKind, GateStats, Op,
    StateVector, DEFAULT_MAX_QUBITS,
};
