use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Primitive single-qubit gates of the simulator alphabet.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GateKind {
    X,
    H,
    /// `Ry(θ) = [[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`.
    Ry(f64),
}

/// A control qubit and the bit value it must hold for the gate to act.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Control {
    pub qubit: usize,
    pub on_one: bool,
}

impl Control {
    pub const fn one(qubit: usize) -> Self {
        Self {
            qubit,
            on_one: true,
        }
    }

    pub const fn zero(qubit: usize) -> Self {
        Self {
            qubit,
            on_one: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn new(kind: GateKind, target: usize) -> Self {
        Self {
            kind,
            target,
            controls: Vec::new(),
        }
    }

    pub fn x(target: usize) -> Self {
        Self::new(GateKind::X, target)
    }

    pub fn h(target: usize) -> Self {
        Self::new(GateKind::H, target)
    }

    pub fn ry(angle: f64, target: usize) -> Self {
        Self::new(GateKind::Ry(angle), target)
    }

    /// `X` on `target` controlled on `control` being 1.
    pub fn cx(control: usize, target: usize) -> Self {
        Self::x(target).controlled([Control::one(control)])
    }

    pub fn controlled(mut self, controls: impl IntoIterator<Item = Control>) -> Self {
        self.controls.extend(controls);
        self
    }

    pub fn inverse(&self) -> Self {
        let kind = match self.kind {
            GateKind::Ry(angle) => GateKind::Ry(-angle),
            other => other,
        };
        Self {
            kind,
            target: self.target,
            controls: self.controls.clone(),
        }
    }

    /// Checks indices against `n_qubits`, rejects repeated controls and a
    /// target that doubles as a control.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        check_qubit(self.target, n_qubits)?;
        for (k, c) in self.controls.iter().enumerate() {
            check_qubit(c.qubit, n_qubits)?;
            if c.qubit == self.target {
                return Err(Error::TargetIsControl(c.qubit));
            }
            if self.controls[..k].iter().any(|d| d.qubit == c.qubit) {
                return Err(Error::DuplicateQubit(c.qubit));
            }
        }
        if let GateKind::Ry(angle) = self.kind {
            if !angle.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(())
    }

    /// Bit mask and required value over the control qubits.
    pub(crate) fn control_mask(&self) -> (usize, usize) {
        self.controls.iter().fold((0, 0), |(mask, value), c| {
            let bit = 1usize << c.qubit;
            (mask | bit, if c.on_one { value | bit } else { value })
        })
    }
}

pub(crate) fn check_qubit(qubit: usize, n_qubits: usize) -> Result<()> {
    if qubit >= n_qubits {
        Err(Error::Address { qubit, n_qubits })
    } else {
        Ok(())
    }
}

/// An assignment of bit values to a subset of qubits.
///
/// Matches every basis index `z` with `z & mask == value`. A pattern that
/// names every qubit of a state is a single basis state.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BasisPattern {
    bits: Vec<(usize, bool)>,
}

impl BasisPattern {
    pub fn new(bits: impl IntoIterator<Item = (usize, bool)>) -> Result<Self> {
        let mut bits: Vec<(usize, bool)> = bits.into_iter().collect();
        bits.sort_unstable();
        for pair in bits.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::Pattern(format!(
                    "qubit {} assigned more than once",
                    pair[0].0
                )));
            }
        }
        Ok(Self { bits })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Little-endian assignment of `value` onto `qubits` (qubits[0] holds bit 0).
    pub fn from_register(qubits: &[usize], value: usize) -> Result<Self> {
        Self::new(
            qubits
                .iter()
                .enumerate()
                .map(|(k, &q)| (q, (value >> k) & 1 == 1)),
        )
    }

    /// The full basis state `index` over `n_qubits` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        Self {
            bits: (0..n_qubits).map(|q| (q, (index >> q) & 1 == 1)).collect(),
        }
    }

    pub fn bits(&self) -> &[(usize, bool)] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, qubit: usize) -> Option<bool> {
        self.bits
            .iter()
            .find_map(|&(q, b)| (q == qubit).then_some(b))
    }

    pub fn mask(&self) -> usize {
        self.bits.iter().fold(0, |m, &(q, _)| m | (1 << q))
    }

    pub fn value(&self) -> usize {
        self.bits
            .iter()
            .fold(0, |v, &(q, b)| if b { v | (1 << q) } else { v })
    }

    pub fn matches(&self, index: usize) -> bool {
        index & self.mask() == self.value()
    }

    /// True when the pattern fixes all `n_qubits` qubits.
    pub fn is_full(&self, n_qubits: usize) -> bool {
        self.bits.len() == n_qubits && self.bits.iter().all(|&(q, _)| q < n_qubits)
    }

    /// Union with another pattern; conflicting assignments are an error.
    pub fn with(&self, other: &BasisPattern) -> Result<Self> {
        Self::new(self.bits.iter().chain(other.bits.iter()).copied())
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        self.bits
            .iter()
            .try_for_each(|&(q, _)| check_qubit(q, n_qubits))
    }

    pub(crate) fn from_controls(controls: &[Control]) -> Result<Self> {
        Self::new(controls.iter().map(|c| (c.qubit, c.on_one)))
    }
}
