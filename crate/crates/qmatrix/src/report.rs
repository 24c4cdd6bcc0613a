//! Serializable reports and their text renderings. JSON field order is the
//! struct declaration order, so equal inputs give byte-identical output.

use qmatrix_core::qcoin::{EstimationTrace, SignProbe};
use qmatrix_core::{GateCounts, Ledger, RegisterLayout};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).unwrap();
        for r in &self.rows {
            w.write_record(r).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(&mut out, &self.header);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(&mut out, &rule);
        for r in &self.rows {
            line(&mut out, r);
        }
        out
    }
}

pub trait Report: Serialize {
    fn table(&self) -> Table;

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.table().to_csv(),
            Format::Table => self.table().to_text(),
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:.12}")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayoutInfo {
    pub n_i: usize,
    pub n_j: usize,
    pub n_qubits: usize,
    pub has_mul: bool,
}

impl From<&RegisterLayout> for LayoutInfo {
    fn from(l: &RegisterLayout) -> Self {
        Self {
            n_i: l.n_i(),
            n_j: l.n_j(),
            n_qubits: l.n_qubits(),
            has_mul: l.mul().is_some(),
        }
    }
}

/// An oracle as a document: the array as supplied plus its normalization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleDoc {
    pub name: String,
    pub source: Vec<f64>,
    pub inf_norm: f64,
    pub values: Vec<f64>,
}

impl From<&qmatrix_core::oracle::Oracle> for OracleDoc {
    fn from(o: &qmatrix_core::oracle::Oracle) -> Self {
        Self {
            name: o.name().to_string(),
            source: o.source().to_vec(),
            inf_norm: o.inf_norm(),
            values: o.values().to_vec(),
        }
    }
}

fn matrix_rows(table: &mut Table, name: &str, rows: &[Vec<f64>]) {
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            table.push(vec![name.into(), i.to_string(), j.to_string(), num(*v)]);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoadReport {
    pub layout: LayoutInfo,
    pub input: Vec<Vec<f64>>,
    pub inf_norm: f64,
    /// `f / ‖f‖∞` as read back from the state.
    pub normalized: Vec<Vec<f64>>,
    /// Read-back times the norm, in the units of the input.
    pub round_trip: Vec<Vec<f64>>,
    pub max_error: f64,
    pub ledger: Ledger,
    pub gates: BTreeMap<String, GateCounts>,
}

impl Report for LoadReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["matrix", "i", "j", "value"]);
        matrix_rows(&mut t, "input", &self.input);
        matrix_rows(&mut t, "normalized", &self.normalized);
        matrix_rows(&mut t, "round_trip", &self.round_trip);
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoReport {
    pub op: String,
    pub params: BTreeMap<String, String>,
    pub layout: LayoutInfo,
    /// Normalized matrix before the operation.
    pub before: Vec<Vec<f64>>,
    /// Read-back after the operation, `ledger.factor · op(before)`.
    pub after: Vec<Vec<f64>>,
    /// `after / ledger.factor · ledger.inf_norm`, the classical result.
    pub result: Vec<Vec<f64>>,
    pub oracles: Vec<OracleDoc>,
    pub ledger: Ledger,
    pub gates: BTreeMap<String, GateCounts>,
}

impl Report for DemoReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["matrix", "i", "j", "value"]);
        matrix_rows(&mut t, "before", &self.before);
        matrix_rows(&mut t, "after", &self.after);
        matrix_rows(&mut t, "result", &self.result);
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftReport {
    pub oracle: OracleDoc,
    pub shift: f64,
    pub layout: LayoutInfo,
    pub scale: f64,
    /// `(f̃ + s)·scale` on the flag-0 sector.
    pub sum: Vec<f64>,
    /// `(f̃ - s)·scale` on the flag-0 sector.
    pub diff: Vec<f64>,
    pub ledger: Ledger,
    pub gates: BTreeMap<String, GateCounts>,
}

impl Report for ShiftReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["j", "sum", "diff"]);
        for (j, (s, d)) in self.sum.iter().zip(&self.diff).enumerate() {
            t.push(vec![j.to_string(), num(*s), num(*d)]);
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinShiftReport {
    pub oracle: OracleDoc,
    pub shift: f64,
    pub levels: usize,
    pub layout: LayoutInfo,
    pub marker_row: usize,
    pub scale: f64,
    pub level_shifts: Vec<f64>,
    pub offsets: Vec<f64>,
    pub sector: Vec<f64>,
    pub ledger: Ledger,
    pub gates: BTreeMap<String, GateCounts>,
}

impl Report for LinShiftReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["j", "offset", "sector", "sector_over_scale"]);
        for (j, (o, s)) in self.offsets.iter().zip(&self.sector).enumerate() {
            t.push(vec![j.to_string(), num(*o), num(*s), num(s / self.scale)]);
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    pub shots: u64,
    pub counts: u64,
    pub k: u64,
    pub shift: f64,
    pub gamma_planned: f64,
    pub gamma_realized: f64,
    /// Amplitude interval after this stage.
    pub mu_tilde: f64,
    pub delta: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceReport {
    pub seed: u64,
    pub sign_probe: Option<SignProbe>,
    pub stages: Vec<StageRecord>,
    pub estimate: f64,
    pub half_width: f64,
}

impl From<(u64, &EstimationTrace)> for TraceReport {
    fn from((seed, t): (u64, &EstimationTrace)) -> Self {
        let initial = StageRecord {
            stage: 0,
            shots: t.initial.shots,
            counts: t.initial.counts,
            k: 0,
            shift: 0.0,
            gamma_planned: 1.0,
            gamma_realized: 1.0,
            mu_tilde: t.initial.mu_tilde,
            delta: t.initial.delta,
            lower: t.initial.lower(),
            upper: t.initial.upper(),
        };
        let later = t.stages.iter().enumerate().map(|(n, s)| StageRecord {
            stage: n + 1,
            shots: s.shots,
            counts: s.counts,
            k: s.k,
            shift: s.shift,
            gamma_planned: s.gamma_planned,
            gamma_realized: s.gamma,
            mu_tilde: s.interval_after.mu_tilde,
            delta: s.interval_after.delta,
            lower: s.interval_after.lower(),
            upper: s.interval_after.upper(),
        });
        Self {
            seed,
            sign_probe: t.sign_probe,
            stages: core::iter::once(initial).chain(later).collect(),
            estimate: t.estimate,
            half_width: t.half_width,
        }
    }
}

/// What the estimated amplitude refers to.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    Amplitude {
        amplitude: f64,
    },
    Entry {
        row: usize,
        col: usize,
        /// Converts an amplitude estimate to `|f_ij|` in input units.
        to_entry: f64,
        true_amplitude: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub target: Target,
    pub shots_per_stage: u64,
    pub stages: usize,
    pub failure_prob: f64,
    pub runs: Vec<TraceReport>,
}

impl Report for EstimateReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["seed", "stage", "k", "gamma", "estimate", "half_width"]);
        for run in &self.runs {
            for s in &run.stages {
                t.push(vec![
                    run.seed.to_string(),
                    s.stage.to_string(),
                    s.k.to_string(),
                    num(s.gamma_realized),
                    num(s.mu_tilde),
                    num(s.delta),
                ]);
            }
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResourceReport {
    pub target: String,
    pub layout: LayoutInfo,
    pub params: BTreeMap<String, String>,
    pub totals: GateCounts,
    pub by_op: BTreeMap<String, GateCounts>,
}

impl Report for ResourceReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&[
            "op",
            "x",
            "h",
            "ry",
            "cnot",
            "multi_controlled",
            "toffoli_estimate",
            "reflections",
        ]);
        let rows = self
            .by_op
            .iter()
            .map(|(k, v)| (k.as_str(), v))
            .chain(core::iter::once(("total", &self.totals)));
        for (name, c) in rows {
            t.push(vec![
                name.to_string(),
                c.x.to_string(),
                c.h.to_string(),
                c.ry.to_string(),
                c.cnot.to_string(),
                c.multi_controlled.to_string(),
                c.toffoli_estimate.to_string(),
                c.reflections.to_string(),
            ]);
        }
        t
    }
}
