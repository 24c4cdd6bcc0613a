use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::gate::{BasisPattern, Control, Gate};
use super::stats::GateCounts;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Op {
    Gate(Gate),
    /// `1 - 2 P` where `P` projects onto the basis states matching the
    /// pattern: a sign flip of every matching amplitude.
    Reflect(BasisPattern),
    /// Multiplies the whole state by -1.
    GlobalPhase,
}

impl Op {
    pub fn inverse(&self) -> Op {
        match self {
            Op::Gate(g) => Op::Gate(g.inverse()),
            other => other.clone(),
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        match self {
            Op::Gate(g) => g.validate(n_qubits),
            Op::Reflect(p) => p.validate(n_qubits),
            Op::GlobalPhase => Ok(()),
        }
    }

    fn controlled(&self, controls: &[Control]) -> Result<Op> {
        Ok(match self {
            Op::Gate(g) => Op::Gate(g.clone().controlled(controls.iter().copied())),
            Op::Reflect(p) => Op::Reflect(p.with(&BasisPattern::from_controls(controls)?)?),
            // A controlled global phase is a sign flip on the control sector.
            Op::GlobalPhase => Op::Reflect(BasisPattern::from_controls(controls)?),
        })
    }
}

/// An ordered, labelled list of operations.
///
/// Planners in [`crate::qmatrix`], [`crate::arith`] and [`crate::oracle`]
/// return circuits without touching a state; [`StateVector::run`] executes
/// them and books their cost under the circuit label.
///
/// [`StateVector::run`]: super::StateVector::run
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Circuit {
    label: String,
    ops: Vec<Op>,
}

impl Circuit {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            ops: Vec::new(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: Op) -> &mut Self {
        self.ops.push(op);
        self
    }

    pub fn gate(&mut self, gate: Gate) -> &mut Self {
        self.push(Op::Gate(gate))
    }

    pub fn x(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::x(q))
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::h(q))
    }

    pub fn ry(&mut self, angle: f64, q: usize) -> &mut Self {
        self.gate(Gate::ry(angle, q))
    }

    pub fn cx(&mut self, control: usize, target: usize) -> &mut Self {
        self.gate(Gate::cx(control, target))
    }

    /// Exchanges two qubits with three CNOTs.
    pub fn swap(&mut self, a: usize, b: usize) -> &mut Self {
        self.cx(a, b).cx(b, a).cx(a, b)
    }

    pub fn reflect(&mut self, pattern: BasisPattern) -> &mut Self {
        self.push(Op::Reflect(pattern))
    }

    pub fn global_phase(&mut self) -> &mut Self {
        self.push(Op::GlobalPhase)
    }

    pub fn append(&mut self, other: &Circuit) -> &mut Self {
        self.ops.extend(other.ops.iter().cloned());
        self
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            label: self.label.to_string(),
            ops: self.ops.iter().rev().map(Op::inverse).collect(),
        }
    }

    /// Same circuit with every operation additionally conditioned on `controls`.
    pub fn controlled(&self, controls: &[Control]) -> Result<Circuit> {
        Ok(Circuit {
            label: self.label.clone(),
            ops: self
                .ops
                .iter()
                .map(|op| op.controlled(controls))
                .collect::<Result<_>>()?,
        })
    }

    /// `mask · body · mask`, the conjugation used for every masked operation.
    pub fn conjugated(mask: &Circuit, body: &Circuit, label: impl Into<String>) -> Circuit {
        let mut out = Circuit::new(label);
        out.append(mask).append(body).append(&mask.inverse());
        out
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        self.ops.iter().try_for_each(|op| op.validate(n_qubits))
    }

    /// Gate cost of one execution, computed without simulating.
    pub fn counts(&self) -> GateCounts {
        self.ops
            .iter()
            .fold(GateCounts::default(), |acc, op| acc + GateCounts::of_op(op))
    }

    /// Qubits touched by any operation.
    pub fn touches(&self, qubit: usize) -> bool {
        self.ops.iter().any(|op| match op {
            Op::Gate(g) => g.target == qubit || g.controls.iter().any(|c| c.qubit == qubit),
            Op::Reflect(p) => p.get(qubit).is_some(),
            Op::GlobalPhase => false,
        })
    }
}
