//! Reorderings, sums, reductions and products on a loaded quantum matrix.
//!
//! Every operation comes as a planner returning a [`Circuit`] and as a
//! [`QMatrix`] method that runs the plan and books its scalar factor in the
//! ledger. The classical meaning of each operation is given on the method.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::oracle::Oracle;
use crate::qmatrix::{controls_on, embedding_angle, plan_uniform, MaskPlan, QMatrix, RegisterLayout};
use crate::sim::{Circuit, Control, Gate};

/// Which part of the matrix an operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RowSelector {
    /// A single row; the operation acts along the column index.
    Row(usize),
    /// A single column; the operation acts along the row index.
    Column(usize),
    /// Every row at once.
    Whole,
}

impl RowSelector {
    pub fn validate(&self, layout: &RegisterLayout) -> Result<()> {
        match *self {
            RowSelector::Row(i) => layout.check_row(i),
            RowSelector::Column(j) => layout.check_col(j),
            RowSelector::Whole => Ok(()),
        }
    }

    /// Mask for the selected address plus the all-ones controls that pick
    /// it out, and the register the operation acts on.
    fn split<'a>(&self, layout: &'a RegisterLayout) -> Result<(Circuit, Vec<Control>, &'a [usize])> {
        self.validate(layout)?;
        Ok(match *self {
            RowSelector::Row(i) => (
                MaskPlan::new(layout, Some(i), None)?.circuit("mask"),
                controls_on(layout.row_qubits()),
                layout.col_qubits(),
            ),
            RowSelector::Column(j) => (
                MaskPlan::new(layout, None, Some(j))?.circuit("mask"),
                controls_on(layout.col_qubits()),
                layout.row_qubits(),
            ),
            RowSelector::Whole => (Circuit::new("mask"), Vec::new(), layout.col_qubits()),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Direction {
    /// `out[j] = in[(j + 1) mod J]`.
    Left,
    /// `out[j] = in[(j - 1) mod J]`.
    Right,
}

/// Row: `c_{i,j} → c_{i,J-1-j}`. Column: `c_{i,j} → c_{I-1-i,j}`.
/// Whole: both indices reversed, with no controls at all.
pub fn plan_reverse(layout: &RegisterLayout, sel: RowSelector) -> Result<Circuit> {
    if sel == RowSelector::Whole {
        let mut c = Circuit::new("reverse");
        for &q in layout.row_qubits().iter().chain(layout.col_qubits()) {
            c.x(q);
        }
        return Ok(c);
    }
    let (mask, controls, target) = sel.split(layout)?;
    let mut body = Circuit::new("flip");
    for &q in target {
        body.gate(Gate::x(q).controlled(controls.iter().copied()));
    }
    Ok(Circuit::conjugated(&mask, &body, "reverse"))
}

/// Exchanges column `pos` with the pivot `J-1`, on every row or only on
/// `row`.
///
/// Zero bits of `pos` are walked from least to most significant. Each step
/// but the last swaps the pivot with its neighbour across that bit and then
/// flips the bit, so the last step swaps the pivot with the image of `pos`;
/// the earlier steps are then undone in reverse.
pub fn plan_swap_with_pivot(layout: &RegisterLayout, row: Option<usize>, pos: usize) -> Result<Circuit> {
    layout.check_col(pos)?;
    let cols = layout.col_qubits();
    let mut mask = Circuit::new("mask");
    let mut row_controls = Vec::new();
    if let Some(i) = row {
        mask = MaskPlan::new(layout, Some(i), None)?.circuit("mask");
        row_controls = controls_on(layout.row_qubits());
    }
    let pivot_swap = |b: usize| {
        let others = cols
            .iter()
            .filter(|&&q| q != cols[b])
            .map(|&q| Control::one(q));
        Gate::x(cols[b])
            .controlled(others)
            .controlled(row_controls.iter().copied())
    };

    let zeros: Vec<usize> = (0..cols.len()).filter(|b| (pos >> b) & 1 == 0).collect();
    let mut body = Circuit::new("swap");
    if let Some((&last, walk)) = zeros.split_last() {
        let mut prefix = Circuit::new("walk");
        for &b in walk {
            prefix.gate(pivot_swap(b));
            prefix.x(cols[b]);
        }
        body.append(&prefix);
        body.gate(pivot_swap(last));
        body.append(&prefix.inverse());
    }
    Ok(Circuit::conjugated(&mask, &body, "swap_with_pivot"))
}

/// Exchanges columns `i` and `j` as pivot↔j, pivot↔i, pivot↔j.
pub fn plan_swap_elements(
    layout: &RegisterLayout,
    row: Option<usize>,
    i: usize,
    j: usize,
) -> Result<Circuit> {
    layout.check_col(i)?;
    layout.check_col(j)?;
    let pivot = layout.cols() - 1;
    let mut c = Circuit::new("swap_elements");
    if i == j {
        return Ok(c);
    }
    if i == pivot || j == pivot {
        c.append(&plan_swap_with_pivot(layout, row, i.min(j))?);
        return Ok(c);
    }
    let pj = plan_swap_with_pivot(layout, row, j)?;
    c.append(&pj)
        .append(&plan_swap_with_pivot(layout, row, i)?)
        .append(&pj);
    Ok(c)
}

/// Binary increment (right) or decrement (left) of the selected register:
/// bit `b` flips when every lower bit is 1, highest bit first.
pub fn plan_cyclic_shift(layout: &RegisterLayout, direction: Direction, sel: RowSelector) -> Result<Circuit> {
    let (mask, controls, target) = sel.split(layout)?;
    let mut inc = Circuit::new("increment");
    for b in (0..target.len()).rev() {
        inc.gate(
            Gate::x(target[b])
                .controlled(controls_on(&target[..b]))
                .controlled(controls.iter().copied()),
        );
    }
    let body = match direction {
        Direction::Right => inc,
        Direction::Left => inc.inverse(),
    };
    Ok(Circuit::conjugated(&mask, &body, "cyclic_shift"))
}

/// Hadamard on the least significant row qubit.
pub fn plan_pairwise_sum_diff(layout: &RegisterLayout) -> Result<Circuit> {
    let &q = layout.row_qubits().first().ok_or(Error::NoRowRegister)?;
    let mut c = Circuit::new("pairwise_sum_diff");
    c.h(q);
    Ok(c)
}

/// Walsh-Hadamard over the column register.
pub fn plan_reduce_rows(layout: &RegisterLayout) -> Circuit {
    let mut c = Circuit::new("reduce_rows");
    for &q in layout.col_qubits() {
        c.h(q);
    }
    c
}

/// Rotates the mul flag by `2·arccos(α)` under control of the selected
/// address.
pub fn plan_scale_by_constant(layout: &RegisterLayout, sel: RowSelector, alpha: f64) -> Result<Circuit> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Range {
            what: "alpha",
            value: alpha,
        });
    }
    let mul = layout.mul().ok_or(Error::FlagCollision)?;
    let (mask, controls, _) = sel.split(layout)?;
    let mut body = Circuit::new("rotate");
    body.gate(Gate::ry(embedding_angle(alpha), mul).controlled(controls));
    Ok(Circuit::conjugated(&mask, &body, "scale_by_constant"))
}

impl QMatrix {
    /// See [`plan_reverse`].
    pub fn reverse(&mut self, sel: RowSelector) -> Result<()> {
        let c = plan_reverse(self.layout(), sel)?;
        self.run(&c, 1.0)
    }

    /// Swaps column `pos` with column `J-1` on `row`, or on every row for
    /// `None`.
    pub fn swap_with_pivot(&mut self, row: Option<usize>, pos: usize) -> Result<()> {
        let c = plan_swap_with_pivot(self.layout(), row, pos)?;
        self.run(&c, 1.0)
    }

    pub fn swap_elements(&mut self, row: Option<usize>, i: usize, j: usize) -> Result<()> {
        let c = plan_swap_elements(self.layout(), row, i, j)?;
        self.run(&c, 1.0)
    }

    pub fn cyclic_shift(&mut self, direction: Direction, sel: RowSelector) -> Result<()> {
        let c = plan_cyclic_shift(self.layout(), direction, sel)?;
        self.run(&c, 1.0)
    }

    /// Rows `(2i, 2i+1)` become `(a+b, a-b)`; ledger factor `1/√2`.
    pub fn pairwise_sum_diff(&mut self) -> Result<()> {
        let c = plan_pairwise_sum_diff(self.layout())?;
        self.run(&c, math::FRAC_1_SQRT_2)
    }

    /// Each row becomes its unnormalized Walsh transform, so column 0 holds
    /// the row sum; ledger factor `2^{-n_J/2}`.
    pub fn reduce_rows(&mut self) -> Result<()> {
        let c = plan_reduce_rows(self.layout());
        let factor = 1.0 / math::sqrt(self.layout().cols() as f64);
        self.run(&c, factor)
    }

    /// Multiplies the selected part of the mul=0 sector by `α ∈ [0, 1]`.
    /// Only the whole-matrix case is booked as a ledger factor.
    pub fn scale_by_constant(&mut self, sel: RowSelector, alpha: f64) -> Result<()> {
        let c = plan_scale_by_constant(self.layout(), sel, alpha)?;
        let factor = if sel == RowSelector::Whole { alpha } else { 1.0 };
        self.run(&c, factor)
    }
}

/// `O_f` on (aux, columns), swap aux with mul, `O_g` on (aux, columns). The
/// aux=0, mul=0 sector then holds `f̃_j·g̃_j` on every row.
pub fn multiply_arrays(f: &Oracle, g: &Oracle, layout: &RegisterLayout) -> Result<QMatrix> {
    let mul = layout.mul().ok_or(Error::FlagCollision)?;
    let mut qm = QMatrix::init_uniform(layout.clone())?;
    let aux = layout.aux();
    let cols = layout.col_qubits();
    qm.run(&f.circuit(aux, cols, &[])?, 1.0)?;
    let mut swap = Circuit::new("swap_flags");
    swap.swap(aux, mul);
    qm.run(&swap, 1.0)?;
    qm.run(&g.circuit(aux, cols, &[])?, 1.0)?;
    qm.set_inf_norm(f.inf_norm() * g.inf_norm());
    Ok(qm)
}

pub fn square_array(f: &Oracle, layout: &RegisterLayout) -> Result<QMatrix> {
    multiply_arrays(f, f, layout)
}

/// Product followed by a reduction: column 0 of the product sector holds
/// `⟨f̃, g̃⟩ / √J` in amplitude units.
pub fn scalar_product(f: &Oracle, g: &Oracle, layout: &RegisterLayout) -> Result<QMatrix> {
    let mut qm = multiply_arrays(f, g, layout)?;
    qm.reduce_rows()?;
    Ok(qm)
}

/// The full circuit run by [`multiply_arrays`], for cost reports.
pub fn plan_multiply(f: &Oracle, g: &Oracle, layout: &RegisterLayout) -> Result<Circuit> {
    let mul = layout.mul().ok_or(Error::FlagCollision)?;
    let aux = layout.aux();
    let mut c = plan_uniform(layout).with_label("multiply_arrays");
    c.append(&f.circuit(aux, layout.col_qubits(), &[])?);
    c.swap(aux, mul);
    c.append(&g.circuit(aux, layout.col_qubits(), &[])?);
    Ok(c)
}
