//! Dense state-vector engine: gates, circuits, sampling and gate counting.

mod circuit;
mod dense;
mod gate;
mod state;
mod stats;

pub use circuit::{Circuit, Op};
pub use dense::DenseOperator;
pub use gate::{BasisPattern, Control, Gate, GateKind};
pub use state::{Amplitude, StateVector, DEFAULT_MAX_QUBITS};
pub use stats::{GateCounts, GateStats};

/// Runs `circuit` `k` times on `state`, switching to a dense matrix power
/// when the register is small and `k` is large.
pub fn run_power(state: &mut StateVector, circuit: &Circuit, k: u64) -> crate::Result<()> {
    circuit.validate(state.n_qubits())?;
    if k == 0 {
        return Ok(());
    }
    let dim = state.dim() as f64;
    let ops = circuit.len().max(1) as f64;
    let replay = k as f64 * ops * dim;
    let dense = dim * dim * ops + 2.0 * (64 - k.leading_zeros()) as f64 * dim * dim * dim;
    if state.n_qubits() <= 7 && dense < replay {
        DenseOperator::of_circuit(circuit, state.n_qubits())?
            .pow(k)
            .apply_to(state)?;
        state.record(circuit.label(), circuit.counts().scaled(k));
    } else {
        for _ in 0..k {
            state.run(circuit)?;
        }
    }
    Ok(())
}
