//! Array oracles and the constant and step-wise linear shifts built on them.
//!
//! An [`Oracle`] embeds an array `f` as
//! `|0⟩|j⟩ → f_j|0⟩|j⟩ + √(1-f_j²)|1⟩|j⟩` on a flag qubit and a column
//! register. The shift constructions put `f` and a constant on two rows of a
//! quantum matrix and mix them with a Hadamard on a row qubit, so one row
//! ends up holding `(f ± s)/2`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::qmatrix::{controls_on, embedding_angle, plan_constant_row, MaskPlan, QMatrix, RegisterLayout};
use crate::sim::{Circuit, Control, Gate, GateCounts, DEFAULT_MAX_QUBITS};

#[derive(Clone, Debug, PartialEq)]
pub struct Oracle {
    name: String,
    source: Vec<f64>,
    values: Vec<f64>,
    inf_norm: f64,
}

impl Oracle {
    /// Wraps `f` as an oracle. Arrays already inside `[-1, 1]` are embedded
    /// as given; otherwise `f / ‖f‖_∞` is embedded and the norm kept.
    pub fn from_array(f: &[f64]) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::EmptyArray);
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !f.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(f.len()));
        }
        let max = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let inf_norm = if max > 1.0 { max } else { 1.0 };
        Ok(Self {
            name: "oracle".to_string(),
            source: f.to_vec(),
            values: f.iter().map(|v| v / inf_norm).collect(),
            inf_norm,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The array as supplied.
    pub fn source(&self) -> &[f64] {
        &self.source
    }

    /// The embedded values, all in `[-1, 1]`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Divisor applied to the source; 1 when the source was embedded as is.
    pub fn inf_norm(&self) -> f64 {
        self.inf_norm
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Column qubits needed, `log2(len)`.
    pub fn n_bits(&self) -> usize {
        self.values.len().trailing_zeros() as usize
    }

    /// Pointwise build on `flag` and `cols`, additionally conditioned on
    /// `controls`.
    pub fn circuit(&self, flag: usize, cols: &[usize], controls: &[Control]) -> Result<Circuit> {
        if cols.len() != self.n_bits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_bits(),
                found: cols.len(),
            });
        }
        let mut all = controls_on(cols);
        all.extend_from_slice(controls);
        let mut c = Circuit::new(self.name.clone());
        for (j, &v) in self.values.iter().enumerate() {
            let mask = MaskPlan::for_address(cols, j).circuit("mask");
            let mut rot = Circuit::new("rotate");
            rot.gate(Gate::ry(embedding_angle(v), flag).controlled(all.iter().copied()));
            c.append(&Circuit::conjugated(&mask, &rot, ""));
        }
        Ok(c)
    }

    pub fn inverse_circuit(&self, flag: usize, cols: &[usize], controls: &[Control]) -> Result<Circuit> {
        Ok(self.circuit(flag, cols, controls)?.inverse())
    }

    /// Cost of one uncontrolled application.
    pub fn gate_cost(&self) -> GateCounts {
        let n = self.n_bits();
        let cols: Vec<usize> = (0..n).collect();
        self.circuit(n, &cols, &[])
            .map(|c| c.counts())
            .unwrap_or_default()
    }
}

/// Shift constant per refinement level: `s`, then `2s/3^{k-1}` for `k ≥ 2`.
///
/// Level 2 gives the `(-5/3, -1/3, 1/3, 5/3)·s` staircase. Each later step
/// is a third of the previous one, which keeps the staircase strictly
/// monotone for `s > 0` at any depth.
pub fn staircase_shifts(s: f64, levels: usize) -> Vec<f64> {
    (1..=levels)
        .map(|k| {
            if k == 1 {
                s
            } else {
                2.0 * s / libm::pow(3.0, (k - 1) as f64)
            }
        })
        .collect()
}

/// Classical offset added to `f̃_j` on the marker row: the sum over levels
/// of `±s_k`, signed by column bit `n_J - k`.
pub fn staircase_offsets(s: f64, levels: usize, n_j: usize) -> Vec<f64> {
    let shifts = staircase_shifts(s, levels);
    (0..1usize << n_j)
        .map(|j| {
            shifts
                .iter()
                .enumerate()
                .map(|(k, &sk)| {
                    let bit = n_j.checked_sub(k + 1).map_or(0, |b| (j >> b) & 1);
                    if bit == 1 {
                        sk
                    } else {
                        -sk
                    }
                })
                .sum()
        })
        .collect()
}

/// Result of [`constant_shift`]. Sector values are amplitudes times `√J`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantShift {
    pub qmatrix: QMatrix,
    pub shift: f64,
    /// Sector value per unit of classical value.
    pub scale: f64,
    /// Row 0: `scale · (f̃ + s)`.
    pub sum: Vec<f64>,
    /// Row 1: `scale · (f̃ - s)`.
    pub diff: Vec<f64>,
}

/// Result of [`step_shift`] and [`linear_shift`].
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftOutput {
    pub qmatrix: QMatrix,
    pub shift: f64,
    pub levels: usize,
    /// Row carrying the result, `2^levels - 1`.
    pub marker_row: usize,
    /// `2^{-levels}`.
    pub scale: f64,
    /// Per-level constants from [`staircase_shifts`].
    pub shifts: Vec<f64>,
    /// `offset_j` so that `sector_j = scale · (f̃_j + offset_j)`.
    pub offsets: Vec<f64>,
    pub sector: Vec<f64>,
}

fn check_shift(s: f64) -> Result<()> {
    if !s.is_finite() {
        return Err(Error::NonFinite);
    }
    if s.abs() > 1.0 {
        return Err(Error::Range {
            what: "shift",
            value: s,
        });
    }
    Ok(())
}

/// Circuit for `levels` refinement levels on the layout `(levels, n_J)`,
/// starting from the uniform state. Without `steps` and with one level this
/// is the plain constant shift.
pub fn plan_shift(oracle: &Oracle, s: f64, levels: usize, steps: bool) -> Result<(RegisterLayout, Circuit)> {
    check_shift(s)?;
    if levels == 0 {
        return Err(Error::Range {
            what: "levels",
            value: 0.0,
        });
    }
    let n_j = oracle.n_bits();
    if steps && levels > n_j {
        return Err(Error::IndexOutOfRange {
            what: "levels",
            index: levels,
            bound: n_j + 1,
        });
    }
    let layout = RegisterLayout::new(levels, n_j);
    let rows = layout.row_qubits().to_vec();
    let cols = layout.col_qubits().to_vec();
    let label = if steps { "linear_shift" } else { "constant_shift" };
    let mut c = Circuit::new(label);

    // f on row 0
    let mask = MaskPlan::new(&layout, Some(0), None)?.circuit("mask");
    let load = oracle.circuit(layout.aux(), &cols, &controls_on(&rows))?;
    c.append(&Circuit::conjugated(&mask, &load, ""));

    for (k, &sk) in staircase_shifts(s, levels).iter().enumerate() {
        // Constant on the row that pairs with the current result row.
        let row = (1usize << (k + 1)) - 1;
        let constant = sk * libm::pow(math::FRAC_1_SQRT_2, k as f64);
        c.append(&plan_constant_row(&layout, row, constant)?);
        // Rows above this level stay untouched until their own level.
        let upper: Vec<Control> = rows[k + 1..].iter().map(|&q| Control::zero(q)).collect();
        c.gate(Gate::h(rows[k]).controlled(upper.iter().copied()));
        if steps {
            let bit = cols[n_j - 1 - k];
            c.gate(Gate::cx(bit, rows[k]).controlled(upper.iter().copied()));
        }
    }
    Ok((layout, c))
}

fn run_shift(oracle: &Oracle, s: f64, levels: usize, steps: bool, max_qubits: usize) -> Result<QMatrix> {
    let (layout, circuit) = plan_shift(oracle, s, levels, steps)?;
    let mut qm = QMatrix::init_uniform_with_limit(layout, max_qubits)?;
    qm.set_inf_norm(oracle.inf_norm());
    qm.run(&circuit, libm::pow(0.5, levels as f64))?;
    Ok(qm)
}

fn sector(qm: &QMatrix, row: usize) -> Result<Vec<f64>> {
    let root_j = math::sqrt(qm.layout().cols() as f64);
    Ok(qm
        .row_amplitudes(false, row)?
        .into_iter()
        .map(|a| a * root_j)
        .collect())
}

/// `f` on row 0, `s` on row 1, Hadamard on the row qubit.
pub fn constant_shift(oracle: &Oracle, s: f64) -> Result<ConstantShift> {
    let qmatrix = run_shift(oracle, s, 1, false, DEFAULT_MAX_QUBITS)?;
    Ok(ConstantShift {
        sum: sector(&qmatrix, 0)?,
        diff: sector(&qmatrix, 1)?,
        qmatrix,
        shift: s,
        scale: 0.5,
    })
}

/// Constant shift followed by a CNOT from the most significant column bit:
/// `(f̃ - s)/2` on the lower half of the row, `(f̃ + s)/2` on the upper half.
pub fn step_shift(oracle: &Oracle, s: f64) -> Result<ShiftOutput> {
    linear_shift(oracle, s, 1)
}

/// `levels` rounds of [`step_shift`], each refining the staircase at half
/// the previous step width.
pub fn linear_shift(oracle: &Oracle, s: f64, levels: usize) -> Result<ShiftOutput> {
    linear_shift_with_limit(oracle, s, levels, DEFAULT_MAX_QUBITS)
}

pub fn linear_shift_with_limit(
    oracle: &Oracle,
    s: f64,
    levels: usize,
    max_qubits: usize,
) -> Result<ShiftOutput> {
    let qmatrix = run_shift(oracle, s, levels, true, max_qubits)?;
    let marker_row = (1usize << levels) - 1;
    Ok(ShiftOutput {
        sector: sector(&qmatrix, marker_row)?,
        qmatrix,
        shift: s,
        levels,
        marker_row,
        scale: libm::pow(0.5, levels as f64),
        shifts: staircase_shifts(s, levels),
        offsets: staircase_offsets(s, levels, oracle.n_bits()),
    })
}
