use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use core::ops::{Add, AddAssign};

use super::circuit::Op;
use super::gate::{Gate, GateKind};

/// Gate tallies for one operation or a whole run.
///
/// Controlled gates are simulated semantically; the counts below follow a
/// fixed decomposition so resource claims can be read off directly:
///
/// - a control that fires on 0 costs two extra `X` gates;
/// - `C^c X` is a CNOT for `c = 1`, otherwise one multi-controlled gate
///   plus `2c - 3` Toffolis;
/// - controlled `Ry`/`H` is two `Ry` plus one `C^c X`;
/// - a reflection about a pattern of `m` qubits is a multi-controlled Z:
///   the `X` masks, two `H` and one `C^{m-1} X`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GateCounts {
    pub x: u64,
    pub h: u64,
    pub ry: u64,
    pub cnot: u64,
    pub multi_controlled: u64,
    pub toffoli_estimate: u64,
    pub reflections: u64,
}

impl GateCounts {
    pub fn of_gate(gate: &Gate) -> Self {
        let mut counts = Self::default();
        let n_controls = gate.controls.len() as u64;
        counts.x += 2 * gate.controls.iter().filter(|c| !c.on_one).count() as u64;
        match (gate.kind, n_controls) {
            (GateKind::X, 0) => counts.x += 1,
            (GateKind::H, 0) => counts.h += 1,
            (GateKind::Ry(_), 0) => counts.ry += 1,
            (GateKind::X, c) => counts.add_mcx(c),
            (GateKind::H | GateKind::Ry(_), c) => {
                counts.ry += 2;
                counts.add_mcx(c);
            }
        }
        counts
    }

    pub fn of_op(op: &Op) -> Self {
        match op {
            Op::Gate(gate) => Self::of_gate(gate),
            Op::Reflect(pattern) => {
                let mut counts = Self {
                    reflections: 1,
                    ..Self::default()
                };
                let m = pattern.len() as u64;
                if m > 0 {
                    counts.x += 2 * pattern.bits().iter().filter(|(_, b)| !b).count() as u64;
                    counts.h += 2;
                    counts.add_mcx(m - 1);
                }
                counts
            }
            Op::GlobalPhase => Self::default(),
        }
    }

    fn add_mcx(&mut self, controls: u64) {
        match controls {
            0 => self.x += 1,
            1 => self.cnot += 1,
            c => {
                self.multi_controlled += 1;
                self.toffoli_estimate += 2 * c - 3;
            }
        }
    }

    pub fn scaled(&self, k: u64) -> Self {
        Self {
            x: self.x * k,
            h: self.h * k,
            ry: self.ry * k,
            cnot: self.cnot * k,
            multi_controlled: self.multi_controlled * k,
            toffoli_estimate: self.toffoli_estimate * k,
            reflections: self.reflections * k,
        }
    }

    pub fn total(&self) -> u64 {
        self.x + self.h + self.ry + self.cnot + self.multi_controlled
    }
}

impl Add for GateCounts {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            x: self.x + rhs.x,
            h: self.h + rhs.h,
            ry: self.ry + rhs.ry,
            cnot: self.cnot + rhs.cnot,
            multi_controlled: self.multi_controlled + rhs.multi_controlled,
            toffoli_estimate: self.toffoli_estimate + rhs.toffoli_estimate,
            reflections: self.reflections + rhs.reflections,
        }
    }
}

impl AddAssign for GateCounts {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// Cumulative counts plus a per-operation breakdown. Only grows until
/// [`GateStats::reset`] is called.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GateStats {
    pub totals: GateCounts,
    pub by_op: BTreeMap<String, GateCounts>,
}

impl GateStats {
    pub fn record(&mut self, label: &str, counts: GateCounts) {
        self.totals += counts;
        *self.by_op.entry(label.to_string()).or_default() += counts;
    }

    pub fn op(&self, label: &str) -> GateCounts {
        self.by_op.get(label).copied().unwrap_or_default()
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }
}
