use alloc::vec;
use alloc::vec::Vec;

use super::circuit::Circuit;
use super::state::{apply_op, Amplitude, StateVector};
use crate::error::{Error, Result};

/// Column-major dense matrix of a circuit over a small register.
///
/// Used to raise a circuit to a large power by repeated squaring when that
/// is cheaper than replaying it gate by gate.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    data: Vec<Amplitude>,
}

impl DenseOperator {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Amplitude::new(0.0, 0.0); dim * dim];
        for k in 0..dim {
            data[k * dim + k] = Amplitude::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    /// Columns are the images of the basis states under `circuit`.
    pub fn of_circuit(circuit: &Circuit, n_qubits: usize) -> Result<Self> {
        circuit.validate(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut data = vec![Amplitude::new(0.0, 0.0); dim * dim];
        for (col, column) in data.chunks_mut(dim).enumerate() {
            column[col] = Amplitude::new(1.0, 0.0);
            for op in circuit.ops() {
                apply_op(column, op);
            }
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Amplitude {
        self.data[col * self.dim + row]
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &DenseOperator) -> DenseOperator {
        let n = self.dim;
        let mut out = vec![Amplitude::new(0.0, 0.0); n * n];
        for j in 0..n {
            for k in 0..n {
                let b = rhs.data[j * n + k];
                if b == Amplitude::new(0.0, 0.0) {
                    continue;
                }
                let a_col = &self.data[k * n..(k + 1) * n];
                for (o, a) in out[j * n..(j + 1) * n].iter_mut().zip(a_col) {
                    *o += a * b;
                }
            }
        }
        DenseOperator { dim: n, data: out }
    }

    pub fn pow(&self, mut k: u64) -> DenseOperator {
        let mut result = DenseOperator::identity(self.dim);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = base.mul(&result);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn apply_to(&self, state: &mut StateVector) -> Result<()> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: state.dim(),
            });
        }
        let input = state.amplitudes().to_vec();
        let out = state.amps_mut();
        out.iter_mut().for_each(|a| *a = Amplitude::new(0.0, 0.0));
        for (col, x) in input.iter().enumerate() {
            if *x == Amplitude::new(0.0, 0.0) {
                continue;
            }
            for (o, m) in out.iter_mut().zip(&self.data[col * self.dim..(col + 1) * self.dim]) {
                *o += m * x;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_matches_repeated_application() {
        let mut c = Circuit::new("q");
        c.ry(0.37, 0).cx(0, 1).h(1).reflect(crate::sim::BasisPattern::basis(2, 2));
        let op = DenseOperator::of_circuit(&c, 2).unwrap();

        let mut direct = StateVector::new(2).unwrap();
        for _ in 0..13 {
            direct.run(&c).unwrap();
        }
        let mut dense = StateVector::new(2).unwrap();
        op.pow(13).apply_to(&mut dense).unwrap();
        for (a, b) in direct.amplitudes().iter().zip(dense.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn zeroth_power_is_identity() {
        let mut c = Circuit::new("q");
        c.h(0);
        let op = DenseOperator::of_circuit(&c, 1).unwrap().pow(0);
        assert_eq!(op, DenseOperator::identity(2));
    }
}
