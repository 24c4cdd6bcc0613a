//! Classical reference semantics shared by the integration tests. Everything
//! here works on plain `Vec<Vec<f64>>` and never touches the simulator.
#![allow(dead_code)]

use qmatrix_core::ClassicalMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rows = Vec<Vec<f64>>;

pub const ALGEBRA_TOL: f64 = 1e-12;
pub const PIPELINE_TOL: f64 = 1e-10;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rows(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Rows {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect()
}

pub fn random_array(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

pub fn inf_norm(rows: &Rows) -> f64 {
    rows.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn normalized(rows: &Rows) -> Rows {
    let n = inf_norm(rows);
    rows.iter()
        .map(|r| r.iter().map(|v| v / n).collect())
        .collect()
}

pub fn scaled(rows: &Rows, factor: f64) -> Rows {
    rows.iter()
        .map(|r| r.iter().map(|v| v * factor).collect())
        .collect()
}

pub fn max_diff(a: &Rows, b: &Rows) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| {
            assert_eq!(x.len(), y.len());
            x.iter().zip(y).map(|(p, q)| (p - q).abs())
        })
        .fold(0.0, f64::max)
}

pub fn to_rows(m: &ClassicalMatrix) -> Rows {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn matrix(rows: &Rows) -> ClassicalMatrix {
    ClassicalMatrix::from_rows(rows).unwrap()
}

pub fn reverse_row(rows: &Rows, i: usize) -> Rows {
    let mut out = rows.clone();
    out[i].reverse();
    out
}

pub fn reverse_column(rows: &Rows, j: usize) -> Rows {
    let mut out = rows.clone();
    let n = rows.len();
    for i in 0..n {
        out[i][j] = rows[n - 1 - i][j];
    }
    out
}

pub fn reverse_whole(rows: &Rows) -> Rows {
    let mut out: Rows = rows.iter().rev().cloned().collect();
    for r in &mut out {
        r.reverse();
    }
    out
}

/// Swap of columns `a` and `b`, on one row or on all rows.
pub fn swap_columns(rows: &Rows, row: Option<usize>, a: usize, b: usize) -> Rows {
    let mut out = rows.clone();
    for (i, r) in out.iter_mut().enumerate() {
        if row.is_none_or(|k| k == i) {
            r.swap(a, b);
        }
    }
    out
}

/// `left`: `out[j] = in[(j+1) mod J]`; otherwise `out[j] = in[(j-1) mod J]`.
pub fn rotate_row(r: &[f64], left: bool) -> Vec<f64> {
    let n = r.len();
    (0..n)
        .map(|j| if left { r[(j + 1) % n] } else { r[(j + n - 1) % n] })
        .collect()
}

pub fn rotate_rows(rows: &Rows, row: Option<usize>, left: bool) -> Rows {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            if row.is_none_or(|k| k == i) {
                rotate_row(r, left)
            } else {
                r.clone()
            }
        })
        .collect()
}

pub fn rotate_column(rows: &Rows, j: usize, left: bool) -> Rows {
    let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
    let rot = rotate_row(&col, left);
    let mut out = rows.clone();
    for (i, r) in out.iter_mut().enumerate() {
        r[j] = rot[i];
    }
    out
}

/// Rows `(2i, 2i+1)` → `(a + b, a - b)`, unnormalized.
pub fn pair_sum_diff(rows: &Rows) -> Rows {
    let mut out = rows.clone();
    for p in (0..rows.len()).step_by(2) {
        for j in 0..rows[p].len() {
            out[p][j] = rows[p][j] + rows[p + 1][j];
            out[p + 1][j] = rows[p][j] - rows[p + 1][j];
        }
    }
    out
}

/// Unnormalized Walsh transform of every row: `out[k] = Σ_j (-1)^{k·j} in[j]`.
pub fn walsh_rows(rows: &Rows) -> Rows {
    rows.iter()
        .map(|r| {
            (0..r.len())
                .map(|k| {
                    r.iter()
                        .enumerate()
                        .map(|(j, v)| if (k & j).count_ones() % 2 == 0 { *v } else { -v })
                        .sum()
                })
                .collect()
        })
        .collect()
}

pub fn scale_row(rows: &Rows, i: usize, alpha: f64) -> Rows {
    let mut out = rows.clone();
    out[i].iter_mut().for_each(|v| *v *= alpha);
    out
}

pub fn elementwise(f: &[f64], g: &[f64]) -> Vec<f64> {
    f.iter().zip(g).map(|(a, b)| a * b).collect()
}

pub fn dot(f: &[f64], g: &[f64]) -> f64 {
    f.iter().zip(g).map(|(a, b)| a * b).sum()
}

/// Piecewise-constant offsets of a refinement staircase, built by halving
/// intervals: level 1 splits the index range in two halves offset by `∓s`,
/// each later level splits every piece again with the next constant.
pub fn staircase(len: usize, constants: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (level, &c) in constants.iter().enumerate() {
        let piece = len >> (level + 1);
        for (j, v) in out.iter_mut().enumerate() {
            if (j / piece).is_multiple_of(2) {
                *v -= c;
            } else {
                *v += c;
            }
        }
    }
    out
}
