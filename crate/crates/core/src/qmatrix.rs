//! Quantum-matrix layout, masking, loaders and read-out.
//!
//! A [`QMatrix`] couples a [`StateVector`] with the [`RegisterLayout`] that
//! gives its qubits meaning and a [`Ledger`] of the scalar factors picked up
//! along the way, so that [`QMatrix::read_matrix`] can be compared exactly
//! against classical reference values.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::sim::{BasisPattern, Circuit, Control, Gate, StateVector, DEFAULT_MAX_QUBITS};

/// Tolerance used by [`QMatrix::check`] for composed pipelines.
pub const PIPELINE_TOL: f64 = 1e-10;

/// Assignment of qubits to roles.
///
/// `row_qubits` and `col_qubits` are little-endian: element 0 holds the
/// least significant bit of the row (column) index.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegisterLayout {
    aux: usize,
    mul: Option<usize>,
    row_qubits: Vec<usize>,
    col_qubits: Vec<usize>,
}

impl RegisterLayout {
    /// Columns on qubits `0..n_j`, rows on `n_j..n_j+n_i`, aux flag last.
    pub fn new(n_i: usize, n_j: usize) -> Self {
        Self {
            aux: n_i + n_j,
            mul: None,
            row_qubits: (n_j..n_j + n_i).collect(),
            col_qubits: (0..n_j).collect(),
        }
    }

    /// As [`RegisterLayout::new`] with a multiplier qubit after the aux flag.
    pub fn with_mul(n_i: usize, n_j: usize) -> Self {
        Self {
            mul: Some(n_i + n_j + 1),
            ..Self::new(n_i, n_j)
        }
    }

    /// Arbitrary assignment. The indices must be distinct and cover
    /// `0..n_qubits` exactly.
    pub fn custom(
        aux: usize,
        mul: Option<usize>,
        row_qubits: Vec<usize>,
        col_qubits: Vec<usize>,
    ) -> Result<Self> {
        let layout = Self {
            aux,
            mul,
            row_qubits,
            col_qubits,
        };
        let mut all: Vec<usize> = layout.all_qubits();
        all.sort_unstable();
        if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateQubit(w[0]));
        }
        if let Some((k, &q)) = all.iter().enumerate().find(|(k, &q)| *k != q) {
            return Err(Error::IndexOutOfRange {
                what: "layout qubit",
                index: q,
                bound: k,
            });
        }
        Ok(layout)
    }

    fn all_qubits(&self) -> Vec<usize> {
        let mut all = vec![self.aux];
        all.extend(self.mul);
        all.extend(&self.row_qubits);
        all.extend(&self.col_qubits);
        all
    }

    pub fn aux(&self) -> usize {
        self.aux
    }

    pub fn mul(&self) -> Option<usize> {
        self.mul
    }

    pub fn row_qubits(&self) -> &[usize] {
        &self.row_qubits
    }

    pub fn col_qubits(&self) -> &[usize] {
        &self.col_qubits
    }

    pub fn n_i(&self) -> usize {
        self.row_qubits.len()
    }

    pub fn n_j(&self) -> usize {
        self.col_qubits.len()
    }

    /// `I = 2^{n_I}`.
    pub fn rows(&self) -> usize {
        1 << self.n_i()
    }

    /// `J = 2^{n_J}`.
    pub fn cols(&self) -> usize {
        1 << self.n_j()
    }

    pub fn n_qubits(&self) -> usize {
        1 + usize::from(self.mul.is_some()) + self.n_i() + self.n_j()
    }

    /// Basis index of `|aux⟩|mul⟩|i⟩|j⟩`.
    pub fn index(&self, aux_bit: bool, mul_bit: bool, i: usize, j: usize) -> usize {
        let mut z = 0;
        if aux_bit {
            z |= 1 << self.aux;
        }
        if let (Some(m), true) = (self.mul, mul_bit) {
            z |= 1 << m;
        }
        for (k, &q) in self.row_qubits.iter().enumerate() {
            z |= ((i >> k) & 1) << q;
        }
        for (k, &q) in self.col_qubits.iter().enumerate() {
            z |= ((j >> k) & 1) << q;
        }
        z
    }

    pub fn check_row(&self, i: usize) -> Result<()> {
        if i >= self.rows() {
            return Err(Error::IndexOutOfRange {
                what: "row",
                index: i,
                bound: self.rows(),
            });
        }
        Ok(())
    }

    pub fn check_col(&self, j: usize) -> Result<()> {
        if j >= self.cols() {
            return Err(Error::IndexOutOfRange {
                what: "column",
                index: j,
                bound: self.cols(),
            });
        }
        Ok(())
    }

    /// Pattern for `|0⟩_a (|0⟩_mul) |i⟩|j⟩`.
    pub fn entry_pattern(&self, i: usize, j: usize) -> Result<BasisPattern> {
        self.check_row(i)?;
        self.check_col(j)?;
        let mut bits = vec![(self.aux, false)];
        bits.extend(self.mul.map(|m| (m, false)));
        BasisPattern::new(bits)?
            .with(&BasisPattern::from_register(&self.row_qubits, i)?)?
            .with(&BasisPattern::from_register(&self.col_qubits, j)?)
    }
}

/// Row-major real matrix with validated, finite entries.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassicalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ClassicalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyArray);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Result<Self> {
        Self::new(rows, cols, vec![value; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    /// `max |f_ij|`.
    pub fn inf_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `f / ‖f‖_∞` and the norm. An all-zero matrix is returned unchanged
    /// with norm 1.
    pub fn normalized(&self) -> (ClassicalMatrix, f64) {
        let norm = self.inf_norm();
        if norm == 0.0 {
            return (self.clone(), 1.0);
        }
        let data = self.data.iter().map(|v| v / norm).collect();
        (
            ClassicalMatrix {
                rows: self.rows,
                cols: self.cols,
                data,
            },
            norm,
        )
    }

    pub fn max_abs_diff(&self, other: &ClassicalMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn check_shape(&self, layout: &RegisterLayout) -> Result<()> {
        if self.rows != layout.rows() {
            return Err(Error::DimensionMismatch {
                expected: layout.rows(),
                found: self.rows,
            });
        }
        if self.cols != layout.cols() {
            return Err(Error::DimensionMismatch {
                expected: layout.cols(),
                found: self.cols,
            });
        }
        Ok(())
    }
}

/// `X` gates that turn a target address into all-ones.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskPlan {
    gates: Vec<Gate>,
}

impl MaskPlan {
    /// Flips every qubit of the register whose address bit is 0.
    pub fn for_address(qubits: &[usize], address: usize) -> Self {
        Self {
            gates: qubits
                .iter()
                .enumerate()
                .filter(|(k, _)| (address >> k) & 1 == 0)
                .map(|(_, &q)| Gate::x(q))
                .collect(),
        }
    }

    /// Masks the row register for `row` and the column register for `col`;
    /// a `None` leaves that register untouched.
    pub fn new(layout: &RegisterLayout, row: Option<usize>, col: Option<usize>) -> Result<Self> {
        let mut gates = Vec::new();
        if let Some(i) = row {
            layout.check_row(i)?;
            gates.extend(Self::for_address(layout.row_qubits(), i).gates);
        }
        if let Some(j) = col {
            layout.check_col(j)?;
            gates.extend(Self::for_address(layout.col_qubits(), j).gates);
        }
        Ok(Self { gates })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn circuit(&self, label: &str) -> Circuit {
        let mut c = Circuit::new(label);
        for g in &self.gates {
            c.gate(g.clone());
        }
        c
    }
}

/// All-ones controls over a register.
pub(crate) fn controls_on(qubits: &[usize]) -> Vec<Control> {
    qubits.iter().map(|&q| Control::one(q)).collect()
}

/// `θ = 2·arccos(v)`, so that `Ry(θ)|0⟩` carries `v` on `|0⟩` for any
/// `v ∈ [-1, 1]`.
pub fn embedding_angle(v: f64) -> f64 {
    2.0 * math::acos(v.clamp(-1.0, 1.0))
}

pub fn plan_uniform(layout: &RegisterLayout) -> Circuit {
    let mut c = Circuit::new("init_uniform");
    for &q in layout.row_qubits().iter().chain(layout.col_qubits()) {
        c.h(q);
    }
    c
}

/// Pointwise loader: for every entry, mask, rotate the aux flag under full
/// row+column control, unmask. `values` must already be scaled into
/// `[-1, 1]`.
pub fn plan_pointwise(layout: &RegisterLayout, values: &ClassicalMatrix) -> Result<Circuit> {
    values.check_shape(layout)?;
    let mut controls = controls_on(layout.row_qubits());
    controls.extend(controls_on(layout.col_qubits()));
    let mut circuit = Circuit::new("load_pointwise");
    for i in 0..layout.rows() {
        for j in 0..layout.cols() {
            let mask = MaskPlan::new(layout, Some(i), Some(j))?.circuit("mask");
            let mut rot = Circuit::new("rotate");
            rot.gate(
                Gate::ry(embedding_angle(values.get(i, j)), layout.aux())
                    .controlled(controls.iter().copied()),
            );
            circuit.append(&Circuit::conjugated(&mask, &rot, ""));
        }
    }
    Ok(circuit)
}

/// Constant row loader: masks only the row register, so the cost does not
/// depend on the number of columns.
pub fn plan_constant_row(layout: &RegisterLayout, i: usize, c: f64) -> Result<Circuit> {
    if !(-1.0..=1.0).contains(&c) {
        return Err(Error::Range {
            what: "constant",
            value: c,
        });
    }
    let mask = MaskPlan::new(layout, Some(i), None)?.circuit("mask");
    let mut rot = Circuit::new("rotate");
    rot.gate(Gate::ry(embedding_angle(c), layout.aux()).controlled(controls_on(layout.row_qubits())));
    Ok(Circuit::conjugated(&mask, &rot, "load_constant_row"))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LedgerEntry {
    pub op: String,
    pub factor: f64,
}

/// Scalar bookkeeping relating amplitudes to classical values.
///
/// After loading `f`, `read_matrix` returns `factor · op(f / inf_norm)`
/// where `op` is the classical semantics of the operations applied.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Ledger {
    pub inf_norm: f64,
    pub factor: f64,
    pub entries: Vec<LedgerEntry>,
}

impl Default for Ledger {
    fn default() -> Self {
        Self {
            inf_norm: 1.0,
            factor: 1.0,
            entries: Vec::new(),
        }
    }
}

impl Ledger {
    pub fn record(&mut self, op: &str, factor: f64) {
        self.factor *= factor;
        self.entries.push(LedgerEntry {
            op: op.to_string(),
            factor,
        });
    }
}

/// A state vector interpreted through a register layout.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    layout: RegisterLayout,
    state: StateVector,
    ledger: Ledger,
}

impl QMatrix {
    /// Ground state `|0⟩_a|0⟩|0⟩`.
    pub fn new(layout: RegisterLayout) -> Result<Self> {
        Self::with_limit(layout, DEFAULT_MAX_QUBITS)
    }

    pub fn with_limit(layout: RegisterLayout, max_qubits: usize) -> Result<Self> {
        let state = StateVector::with_limit(layout.n_qubits(), max_qubits)?;
        Ok(Self {
            layout,
            state,
            ledger: Ledger::default(),
        })
    }

    /// Uniform superposition `1/√(IJ) Σ |0⟩_a|i⟩|j⟩`; the aux flag is untouched.
    pub fn init_uniform(layout: RegisterLayout) -> Result<Self> {
        Self::init_uniform_with_limit(layout, DEFAULT_MAX_QUBITS)
    }

    pub fn init_uniform_with_limit(layout: RegisterLayout, max_qubits: usize) -> Result<Self> {
        let mut qm = Self::with_limit(layout, max_qubits)?;
        let c = plan_uniform(&qm.layout);
        qm.state.run(&c)?;
        Ok(qm)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut StateVector {
        &mut self.state
    }

    pub fn into_state(self) -> StateVector {
        self.state
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub(crate) fn set_inf_norm(&mut self, norm: f64) {
        self.ledger.inf_norm = norm;
    }

    /// Runs a planned circuit and books its scalar factor.
    pub fn run(&mut self, circuit: &Circuit, factor: f64) -> Result<()> {
        self.state.run(circuit)?;
        self.ledger.record(circuit.label(), factor);
        Ok(())
    }

    /// Applies the mask for `(row, col)`; applying it twice is the identity.
    pub fn mask(&mut self, row: Option<usize>, col: Option<usize>) -> Result<()> {
        let c = MaskPlan::new(&self.layout, row, col)?.circuit("mask");
        self.state.run(&c)
    }

    /// Loads `f / ‖f‖_∞` into the aux=0 sector, one entry at a time. Expects
    /// the state produced by [`QMatrix::init_uniform`].
    pub fn load_pointwise(&mut self, f: &ClassicalMatrix) -> Result<()> {
        f.check_shape(&self.layout)?;
        let (normalized, norm) = f.normalized();
        let c = plan_pointwise(&self.layout, &normalized)?;
        self.state.run(&c)?;
        self.ledger.inf_norm = norm;
        self.ledger.record("load_pointwise", 1.0);
        Ok(())
    }

    /// Scales row `i` of the aux=0 sector by `c ∈ [-1, 1]`, moving the
    /// `√(1-c²)` remainder to aux=1.
    pub fn load_constant_row(&mut self, i: usize, c: f64) -> Result<()> {
        let circuit = plan_constant_row(&self.layout, i, c)?;
        self.run(&circuit, 1.0)
    }

    /// The aux=0 (and mul=0) sector as an `I × J` matrix, times `√(IJ)`.
    ///
    /// This peeks at amplitudes directly and exists for verification only;
    /// a device would have to go through [`crate::qcoin`].
    pub fn read_matrix(&self) -> ClassicalMatrix {
        let (rows, cols) = (self.layout.rows(), self.layout.cols());
        let scale = math::sqrt((rows * cols) as f64);
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = self.layout.index(false, false, i, j);
                data.push(self.state.amplitude(z).re * scale);
            }
        }
        ClassicalMatrix { rows, cols, data }
    }

    /// Raw real amplitudes of row `i` in the given aux sector (mul=0).
    pub fn row_amplitudes(&self, aux_bit: bool, i: usize) -> Result<Vec<f64>> {
        self.layout.check_row(i)?;
        Ok((0..self.layout.cols())
            .map(|j| self.state.amplitude(self.layout.index(aux_bit, false, i, j)).re)
            .collect())
    }

    /// Norm and finiteness check at pipeline tolerance.
    pub fn check(&self) -> Result<()> {
        self.state.check_normalized(PIPELINE_TOL)?;
        if !(self.ledger.factor.is_finite() && self.ledger.inf_norm.is_finite())
            || self.ledger.inf_norm <= 0.0
        {
            return Err(Error::Inconsistency("ledger holds a non-finite factor".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_indexing() {
        let l = RegisterLayout::with_mul(2, 3);
        assert_eq!(l.n_qubits(), 7);
        assert_eq!(l.aux(), 5);
        assert_eq!(l.mul(), Some(6));
        assert_eq!(l.index(false, false, 2, 5), (2 << 3) | 5);
        assert_eq!(l.index(true, true, 0, 0), (1 << 5) | (1 << 6));
        assert!(RegisterLayout::custom(0, None, vec![1, 1], vec![]).is_err());
        assert!(RegisterLayout::custom(0, None, vec![2], vec![3]).is_err());
        let l = RegisterLayout::custom(2, None, vec![0], vec![1]).unwrap();
        assert_eq!(l.index(false, false, 1, 0), 1);
    }

    #[test]
    fn uniform_init() {
        let qm = QMatrix::init_uniform(RegisterLayout::new(1, 1)).unwrap();
        let aux = qm.layout().aux();
        for z in 0..qm.state().dim() {
            let expected = if z >> aux & 1 == 0 { 0.5 } else { 0.0 };
            assert!((qm.state().amplitude(z).re - expected).abs() < 1e-12);
        }
        let qm = QMatrix::init_uniform(RegisterLayout::new(2, 2)).unwrap();
        let m = qm.read_matrix();
        assert!(m.data().iter().all(|v| (v - 1.0).abs() < 1e-12));
        let aux_one = BasisPattern::new([(qm.layout().aux(), true)]).unwrap();
        assert_eq!(qm.state().probability_of(&aux_one).unwrap(), 0.0);
    }

    #[test]
    fn mask_counts_and_self_inverse() {
        let l = RegisterLayout::new(3, 2);
        assert!(MaskPlan::new(&l, Some(7), Some(3)).unwrap().is_empty());
        let plan = MaskPlan::new(&l, Some(0), None).unwrap();
        assert_eq!(plan.len(), 3);
        assert!(plan.gates().iter().all(|g| l.row_qubits().contains(&g.target)));
        assert!(MaskPlan::new(&l, Some(8), None).is_err());

        let mut qm = QMatrix::init_uniform(l.clone()).unwrap();
        qm.load_pointwise(&ClassicalMatrix::new(8, 4, (0..32).map(|k| k as f64 - 10.0).collect()).unwrap())
            .unwrap();
        let before = qm.state().clone();
        qm.mask(Some(5), Some(1)).unwrap();
        qm.mask(Some(5), Some(1)).unwrap();
        assert_eq!(qm.state().amplitudes(), before.amplitudes());
    }

    #[test]
    fn pointwise_by_hand() {
        // f = [[0.5, -0.5]], ‖f‖∞ = 0.5 → aux=0 amplitudes (1/√2, -1/√2)
        let f = ClassicalMatrix::from_rows(&[vec![0.5, -0.5]]).unwrap();
        let mut qm = QMatrix::init_uniform(RegisterLayout::new(0, 1)).unwrap();
        qm.load_pointwise(&f).unwrap();
        let amps = qm.row_amplitudes(false, 0).unwrap();
        assert!((amps[0] - math::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((amps[1] + math::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(qm.ledger().inf_norm, 0.5);
    }

    #[test]
    fn pointwise_constant_one_leaves_aux_empty() {
        let f = ClassicalMatrix::filled(2, 4, 1.0).unwrap();
        let mut qm = QMatrix::init_uniform(RegisterLayout::new(1, 2)).unwrap();
        qm.load_pointwise(&f).unwrap();
        let aux_one = BasisPattern::new([(qm.layout().aux(), true)]).unwrap();
        assert!(qm.state().probability_of(&aux_one).unwrap() < 1e-24);
        let amp = 1.0 / math::sqrt(8.0);
        assert!(qm.row_amplitudes(false, 1).unwrap().iter().all(|a| (a - amp).abs() < 1e-12));
    }

    #[test]
    fn pointwise_rejects_wrong_shape() {
        let f = ClassicalMatrix::filled(2, 2, 1.0).unwrap();
        let mut qm = QMatrix::init_uniform(RegisterLayout::new(1, 2)).unwrap();
        assert!(matches!(qm.load_pointwise(&f), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn constant_row_edge_values() {
        let l = RegisterLayout::new(2, 2);
        let mut qm = QMatrix::init_uniform(l.clone()).unwrap();
        let before = qm.state().clone();
        qm.load_constant_row(1, 1.0).unwrap();
        for (a, b) in qm.state().amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }

        qm.load_constant_row(2, 0.0).unwrap();
        assert!(qm.row_amplitudes(false, 2).unwrap().iter().all(|a| a.abs() < 1e-12));
        assert!(qm
            .row_amplitudes(true, 2)
            .unwrap()
            .iter()
            .all(|a| (a - 0.25).abs() < 1e-12));
        assert!(matches!(
            qm.load_constant_row(0, 1.5),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn constant_row_cost() {
        let mut qm = QMatrix::init_uniform(RegisterLayout::new(3, 2)).unwrap();
        qm.load_constant_row(0, 0.3).unwrap();
        let c = qm.state().stats().op("load_constant_row");
        assert_eq!(c.x, 6);
        assert_eq!(c.ry, 2);
        assert_eq!(c.multi_controlled, 1);
        assert_eq!(c.h, 0);
    }
}
