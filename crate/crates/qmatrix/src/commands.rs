//! Command-line surface of `qmat` and the code behind each subcommand.

use crate::error::{CliError, Result};
use crate::io::{read_array, read_matrix};
use crate::report::*;
use clap::{Args, Parser, Subcommand, ValueEnum};
use qmatrix_core::arith::{multiply_arrays, scalar_product, square_array, Direction, RowSelector};
use qmatrix_core::oracle::{constant_shift, linear_shift_with_limit, Oracle};
use qmatrix_core::qcoin::{qcoin_estimate, Preparation, QCoinConfig};
use qmatrix_core::qmatrix::PIPELINE_TOL;
use qmatrix_core::{
    BasisPattern, ClassicalMatrix, Error, GateCounts, QMatrix, RegisterLayout, DEFAULT_MAX_QUBITS,
};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const MAX_QUBITS_ENV: &str = "QMAT_MAX_QUBITS";

#[derive(Debug, Parser)]
#[command(name = "qmat", version, about = "Quantum matrix simulation, arithmetic demos and amplitude read-out")]
pub struct Cli {
    /// Output format; only JSON is a stable interface.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a matrix, read it back and report the round trip.
    Load(LoadArgs),
    /// Apply one arithmetic operation and report the matrix before and after.
    Demo(DemoArgs),
    /// Constant shift of an array: sum and difference sectors.
    Shift(ShiftArgs),
    /// Step-wise linear shift with a refinement staircase.
    Linshift(LinShiftArgs),
    /// Zoom-in amplitude estimation.
    Estimate(EstimateArgs),
    /// Gate counts of one operation.
    Resources(ResourceArgs),
}

#[derive(Debug, Args)]
pub struct Shape {
    /// Row qubits.
    #[arg(long = "nI")]
    pub n_i: Option<usize>,
    /// Column qubits.
    #[arg(long = "nJ")]
    pub n_j: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LoadArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub shape: Shape,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DemoOp {
    Reverse,
    /// Swap with the last position.
    Swap,
    SwapElements,
    Cyclic,
    Pairwise,
    Reduce,
    Scale,
    Multiply,
    Square,
    ScalarProduct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Dir {
    Left,
    Right,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(value_enum)]
    pub op: DemoOp,
    #[arg(long)]
    pub input: PathBuf,
    /// Second array for multiply and scalar-product.
    #[arg(long)]
    pub input2: Option<PathBuf>,
    #[command(flatten)]
    pub shape: Shape,
    #[arg(long)]
    pub row: Option<usize>,
    #[arg(long)]
    pub col: Option<usize>,
    /// Column position(s): one for swap, two for swap-elements.
    #[arg(long)]
    pub pos: Vec<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "left")]
    pub direction: Dir,
}

#[derive(Debug, Args)]
pub struct ShiftArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub shift: f64,
}

#[derive(Debug, Args)]
pub struct LinShiftArgs {
    /// Array to shift; without it a zero array of length 2^nJ is used.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long = "nJ")]
    pub n_j: Option<usize>,
    #[arg(long)]
    pub shift: f64,
    #[arg(long, default_value_t = 1)]
    pub levels: usize,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Estimate this single amplitude.
    #[arg(long, conflicts_with = "input")]
    pub amplitude: Option<f64>,
    /// Estimate entry (--row, --col) of this matrix.
    #[arg(long, requires_all = ["row", "col"])]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub row: Option<usize>,
    #[arg(long)]
    pub col: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 3)]
    pub stages: usize,
    #[arg(long, default_value_t = 0.05)]
    pub failure_prob: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent runs with seeds seed, seed+1, ….
    #[arg(long, default_value_t = 1)]
    pub repeats: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ResourceTarget {
    LoadUniform,
    LoadPointwise,
    LoadConstant,
    Mask,
    Reverse,
    Swap,
    SwapElements,
    Cyclic,
    Pairwise,
    Reduce,
    Scale,
    Multiply,
    Shift,
    Linshift,
}

#[derive(Debug, Args)]
pub struct ResourceArgs {
    #[arg(value_enum)]
    pub target: ResourceTarget,
    #[command(flatten)]
    pub shape: Shape,
    #[arg(long)]
    pub row: Option<usize>,
    #[arg(long)]
    pub col: Option<usize>,
    #[arg(long)]
    pub pos: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.3)]
    pub shift: f64,
    #[arg(long, default_value_t = 1)]
    pub levels: usize,
    #[arg(long, value_enum, default_value = "left")]
    pub direction: Dir,
}

/// Simulator capacity, from the environment or the library default.
pub fn max_qubits() -> Result<usize> {
    match std::env::var(MAX_QUBITS_ENV) {
        Err(_) => Ok(DEFAULT_MAX_QUBITS),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n >= 1)
            .ok_or_else(|| CliError::Config(format!("{MAX_QUBITS_ENV}={v} is not a positive integer"))),
    }
}

fn check_capacity(n_qubits: usize, limit: usize) -> Result<()> {
    if n_qubits > limit {
        return Err(CliError::Config(format!(
            "this run needs {n_qubits} qubits, capacity is {limit} (set {MAX_QUBITS_ENV} to raise it)"
        )));
    }
    Ok(())
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn inconsistency(msg: impl Into<String>) -> CliError {
    CliError::Core(Error::Inconsistency(msg.into()))
}

pub fn run(cli: &Cli) -> Result<String> {
    let limit = max_qubits()?;
    let f = cli.format;
    Ok(match &cli.command {
        Command::Load(a) => load(a, limit)?.render(f),
        Command::Demo(a) => demo(a, limit)?.render(f),
        Command::Shift(a) => shift(a, limit)?.render(f),
        Command::Linshift(a) => linshift(a, limit)?.render(f),
        Command::Estimate(a) => estimate(a, limit)?.render(f),
        Command::Resources(a) => resources(a, limit)?.render(f),
    })
}

fn log2_of(n: usize) -> usize {
    n.trailing_zeros() as usize
}

/// Layout of `m`, checked against any explicit `--nI`/`--nJ`.
fn layout_for(m: &ClassicalMatrix, shape: &Shape, mul: bool) -> Result<RegisterLayout> {
    let (n_i, n_j) = (log2_of(m.rows()), log2_of(m.cols()));
    for (flag, given, found) in [("--nI", shape.n_i, n_i), ("--nJ", shape.n_j, n_j)] {
        if given.is_some_and(|g| g != found) {
            return Err(config(format!(
                "{flag} {} does not match the input ({found})",
                given.unwrap()
            )));
        }
    }
    Ok(if mul {
        RegisterLayout::with_mul(n_i, n_j)
    } else {
        RegisterLayout::new(n_i, n_j)
    })
}

fn selector(row: Option<usize>, col: Option<usize>) -> Result<RowSelector> {
    match (row, col) {
        (Some(_), Some(_)) => Err(config("give at most one of --row and --col")),
        (Some(i), None) => Ok(RowSelector::Row(i)),
        (None, Some(j)) => Ok(RowSelector::Column(j)),
        (None, None) => Ok(RowSelector::Whole),
    }
}

fn direction(d: Dir) -> Direction {
    match d {
        Dir::Left => Direction::Left,
        Dir::Right => Direction::Right,
    }
}

fn gates(qm: &QMatrix) -> BTreeMap<String, GateCounts> {
    qm.state().stats().by_op.clone()
}

fn scaled_rows(m: &ClassicalMatrix, factor: f64) -> Vec<Vec<f64>> {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|v| v * factor).collect())
        .collect()
}

fn load_matrix(f: &ClassicalMatrix, layout: RegisterLayout, limit: usize) -> Result<QMatrix> {
    check_capacity(layout.n_qubits(), limit)?;
    let mut qm = QMatrix::init_uniform_with_limit(layout, limit)?;
    qm.load_pointwise(f)?;
    qm.check()?;
    Ok(qm)
}

pub fn load(a: &LoadArgs, limit: usize) -> Result<LoadReport> {
    let f = read_matrix(&a.input)?;
    let qm = load_matrix(&f, layout_for(&f, &a.shape, false)?, limit)?;
    let ledger = qm.ledger().clone();
    let normalized = qm.read_matrix();
    let round_trip = scaled_rows(&normalized, ledger.inf_norm / ledger.factor);
    let max_error = f
        .to_rows()
        .iter()
        .flatten()
        .zip(round_trip.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if max_error > PIPELINE_TOL * ledger.inf_norm.max(1.0) {
        return Err(inconsistency(format!("round trip error {max_error:e}")));
    }
    Ok(LoadReport {
        layout: qm.layout().into(),
        input: f.to_rows(),
        inf_norm: ledger.inf_norm,
        normalized: scaled_rows(&normalized, 1.0 / ledger.factor),
        round_trip,
        max_error,
        gates: gates(&qm),
        ledger,
    })
}

fn params(pairs: &[(&str, Option<String>)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v)))
        .collect()
}

pub fn demo(a: &DemoArgs, limit: usize) -> Result<DemoReport> {
    let mut p = params(&[
        ("row", a.row.map(|v| v.to_string())),
        ("col", a.col.map(|v| v.to_string())),
        ("alpha", a.alpha.map(|v| v.to_string())),
    ]);
    if !a.pos.is_empty() {
        p.insert("pos".into(), format!("{:?}", a.pos));
    }
    let product = matches!(a.op, DemoOp::Multiply | DemoOp::Square | DemoOp::ScalarProduct);
    if product {
        return demo_product(a, p, limit);
    }
    if matches!(a.op, DemoOp::Cyclic) {
        p.insert("direction".into(), format!("{:?}", a.direction).to_lowercase());
    }
    let f = read_matrix(&a.input)?;
    let mut qm = load_matrix(&f, layout_for(&f, &a.shape, false)?, limit)?;
    let before = qm.read_matrix().to_rows();
    match a.op {
        DemoOp::Reverse => qm.reverse(selector(a.row, a.col)?)?,
        DemoOp::Swap => match a.pos.as_slice() {
            [pos] => qm.swap_with_pivot(a.row, *pos)?,
            _ => return Err(config("swap takes exactly one --pos")),
        },
        DemoOp::SwapElements => match a.pos.as_slice() {
            [i, j] => qm.swap_elements(a.row, *i, *j)?,
            _ => return Err(config("swap-elements takes exactly two --pos")),
        },
        DemoOp::Cyclic => qm.cyclic_shift(direction(a.direction), selector(a.row, a.col)?)?,
        DemoOp::Pairwise => qm.pairwise_sum_diff()?,
        DemoOp::Reduce => qm.reduce_rows()?,
        DemoOp::Scale => {
            let alpha = a.alpha.ok_or_else(|| config("scale needs --alpha"))?;
            qm.scale_by_constant(selector(a.row, a.col)?, alpha)?
        }
        DemoOp::Multiply | DemoOp::Square | DemoOp::ScalarProduct => unreachable!(),
    }
    qm.check()?;
    Ok(demo_report(a.op, p, before, &qm, Vec::new()))
}

fn demo_product(a: &DemoArgs, p: BTreeMap<String, String>, limit: usize) -> Result<DemoReport> {
    let f = Oracle::from_array(&read_array(&a.input)?)?.named("f");
    let g = match (a.op, &a.input2) {
        (DemoOp::Square, None) => None,
        (DemoOp::Square, Some(_)) => return Err(config("square takes a single --input")),
        (_, Some(path)) => Some(Oracle::from_array(&read_array(path)?)?.named("g")),
        (_, None) => return Err(config("this op needs --input2")),
    };
    if let Some(g) = &g {
        if g.len() != f.len() {
            return Err(config(format!("arrays differ in length: {} vs {}", f.len(), g.len())));
        }
    }
    let layout = RegisterLayout::with_mul(a.shape.n_i.unwrap_or(0), f.n_bits());
    if a.shape.n_j.is_some_and(|n| n != f.n_bits()) {
        return Err(config("--nJ does not match the input length"));
    }
    check_capacity(layout.n_qubits(), limit)?;
    let qm = match (a.op, &g) {
        (DemoOp::Square, _) => square_array(&f, &layout)?,
        (DemoOp::Multiply, Some(g)) => multiply_arrays(&f, g, &layout)?,
        (_, Some(g)) => scalar_product(&f, g, &layout)?,
        _ => unreachable!(),
    };
    qm.check()?;
    let mut before = vec![f.values().to_vec()];
    let mut oracles = vec![OracleDoc::from(&f)];
    if let Some(g) = &g {
        before.push(g.values().to_vec());
        oracles.push(g.into());
    }
    Ok(demo_report(a.op, p, before, &qm, oracles))
}

fn demo_report(
    op: DemoOp,
    params: BTreeMap<String, String>,
    before: Vec<Vec<f64>>,
    qm: &QMatrix,
    oracles: Vec<OracleDoc>,
) -> DemoReport {
    let ledger = qm.ledger().clone();
    let after = qm.read_matrix();
    let result = if ledger.factor == 0.0 {
        // Whole-matrix scaling by zero leaves nothing to divide out.
        scaled_rows(&after, 0.0)
    } else {
        scaled_rows(&after, ledger.inf_norm / ledger.factor)
    };
    DemoReport {
        op: op.to_possible_value().unwrap().get_name().to_string(),
        params,
        layout: qm.layout().into(),
        before,
        after: after.to_rows(),
        result,
        oracles,
        gates: gates(qm),
        ledger,
    }
}

pub fn shift(a: &ShiftArgs, limit: usize) -> Result<ShiftReport> {
    let o = Oracle::from_array(&read_array(&a.input)?)?;
    check_capacity(o.n_bits() + 1, limit)?;
    let out = constant_shift(&o, a.shift)?;
    out.qmatrix.check()?;
    Ok(ShiftReport {
        oracle: (&o).into(),
        shift: a.shift,
        layout: out.qmatrix.layout().into(),
        scale: out.scale,
        sum: out.sum,
        diff: out.diff,
        ledger: out.qmatrix.ledger().clone(),
        gates: gates(&out.qmatrix),
    })
}

fn array_or_zeros(input: Option<&Path>, n_j: Option<usize>) -> Result<Vec<f64>> {
    match (input, n_j) {
        (Some(p), n_j) => {
            let f = read_array(p)?;
            if n_j.is_some_and(|n| 1usize << n != f.len()) {
                return Err(config("--nJ does not match the input length"));
            }
            Ok(f)
        }
        (None, Some(n)) if n < usize::BITS as usize => Ok(vec![0.0; 1 << n]),
        _ => Err(config("give --input or --nJ")),
    }
}

pub fn linshift(a: &LinShiftArgs, limit: usize) -> Result<LinShiftReport> {
    let o = Oracle::from_array(&array_or_zeros(a.input.as_deref(), a.n_j)?)?;
    check_capacity(o.n_bits() + a.levels + 1, limit)?;
    let out = linear_shift_with_limit(&o, a.shift, a.levels, limit)?;
    out.qmatrix.check()?;
    Ok(LinShiftReport {
        oracle: (&o).into(),
        shift: a.shift,
        levels: a.levels,
        layout: out.qmatrix.layout().into(),
        marker_row: out.marker_row,
        scale: out.scale,
        level_shifts: out.shifts,
        offsets: out.offsets,
        sector: out.sector,
        ledger: out.qmatrix.ledger().clone(),
        gates: gates(&out.qmatrix),
    })
}

pub fn estimate(a: &EstimateArgs, limit: usize) -> Result<EstimateReport> {
    if a.repeats == 0 {
        return Err(config("--repeats must be at least 1"));
    }
    let (prep, chi, target) = match (a.amplitude, &a.input) {
        (Some(amp), None) => {
            if !(-1.0..=1.0).contains(&amp) {
                return Err(config(format!("--amplitude {amp} is outside [-1, 1]")));
            }
            (
                Preparation::for_amplitude(amp)?,
                BasisPattern::basis(1, 0),
                Target::Amplitude { amplitude: amp },
            )
        }
        (None, Some(path)) => {
            let f = read_matrix(path)?;
            let layout = layout_for(&f, &Shape { n_i: None, n_j: None }, false)?;
            check_capacity(layout.n_qubits(), limit)?;
            let (row, col) = (a.row.unwrap(), a.col.unwrap());
            let chi = layout.entry_pattern(row, col)?;
            let prep = Preparation::for_matrix(&layout, &f)?;
            let norm = f.normalized().1;
            let root = ((layout.rows() * layout.cols()) as f64).sqrt();
            let target = Target::Entry {
                row,
                col,
                to_entry: root * norm,
                true_amplitude: f.get(row, col).abs() / norm / root,
            };
            (prep, chi, target)
        }
        _ => return Err(config("give --amplitude or --input with --row and --col")),
    };
    let runs = (a.seed..a.seed + a.repeats)
        .into_par_iter()
        .map(|seed| {
            let cfg = QCoinConfig {
                shots_per_stage: a.shots,
                stages: a.stages,
                failure_prob: a.failure_prob,
                seed,
            };
            let trace = qcoin_estimate(&prep, &chi, &cfg)?;
            let ok = trace.estimate.is_finite()
                && trace.half_widths().iter().all(|w| w.is_finite() && *w >= 0.0)
                && (0.0..=1.0).contains(&trace.estimate);
            if !ok {
                return Err(inconsistency(format!("seed {seed}: trace left the unit interval")));
            }
            Ok(TraceReport::from((seed, &trace)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimateReport {
        target,
        shots_per_stage: a.shots,
        stages: a.stages,
        failure_prob: a.failure_prob,
        runs,
    })
}

pub fn resources(a: &ResourceArgs, limit: usize) -> Result<ResourceReport> {
    use ResourceTarget as T;
    let n_i = a.shape.n_i.unwrap_or(0);
    let n_j = a
        .shape
        .n_j
        .ok_or_else(|| config("resources needs --nJ"))?;
    let mut p = params(&[
        ("row", a.row.map(|v| v.to_string())),
        ("col", a.col.map(|v| v.to_string())),
    ]);
    if !a.pos.is_empty() {
        p.insert("pos".into(), format!("{:?}", a.pos));
    }
    let zeros = vec![0.0; 1usize << n_j.min(usize::BITS as usize - 1)];
    let qm = match a.target {
        T::Multiply => {
            let layout = RegisterLayout::with_mul(n_i, n_j);
            check_capacity(layout.n_qubits(), limit)?;
            let o = Oracle::from_array(&zeros)?;
            multiply_arrays(&o, &o, &layout)?
        }
        T::Shift => {
            check_capacity(n_j + 1, limit)?;
            p.insert("shift".into(), a.shift.to_string());
            constant_shift(&Oracle::from_array(&zeros)?, a.shift)?.qmatrix
        }
        T::Linshift => {
            check_capacity(n_j + a.levels + 1, limit)?;
            p.insert("shift".into(), a.shift.to_string());
            p.insert("levels".into(), a.levels.to_string());
            linear_shift_with_limit(&Oracle::from_array(&zeros)?, a.shift, a.levels, limit)?.qmatrix
        }
        _ => {
            let layout = RegisterLayout::new(n_i, n_j);
            check_capacity(layout.n_qubits(), limit)?;
            let mut qm = if a.target == T::LoadUniform {
                QMatrix::with_limit(layout.clone(), limit)?
            } else {
                QMatrix::init_uniform_with_limit(layout.clone(), limit)?
            };
            qm.state_mut().reset_stats();
            match a.target {
                T::LoadUniform => qm.run(&qmatrix_core::qmatrix::plan_uniform(&layout), 1.0)?,
                T::LoadPointwise => {
                    qm.load_pointwise(&ClassicalMatrix::filled(layout.rows(), layout.cols(), 0.0)?)?
                }
                T::LoadConstant => {
                    p.insert("value".into(), a.alpha.to_string());
                    qm.load_constant_row(a.row.unwrap_or(0), a.alpha)?
                }
                T::Mask => qm.mask(a.row, a.col)?,
                T::Reverse => qm.reverse(selector(a.row, a.col)?)?,
                T::Swap => qm.swap_with_pivot(a.row, a.pos.first().copied().unwrap_or(0))?,
                T::SwapElements => match a.pos.as_slice() {
                    [i, j] => qm.swap_elements(a.row, *i, *j)?,
                    _ => return Err(config("swap-elements takes exactly two --pos")),
                },
                T::Cyclic => qm.cyclic_shift(direction(a.direction), selector(a.row, a.col)?)?,
                T::Pairwise => qm.pairwise_sum_diff()?,
                T::Reduce => qm.reduce_rows()?,
                T::Scale => {
                    p.insert("alpha".into(), a.alpha.to_string());
                    qm.scale_by_constant(selector(a.row, a.col)?, a.alpha)?
                }
                T::Multiply | T::Shift | T::Linshift => unreachable!(),
            }
            qm
        }
    };
    qm.check()?;
    let stats = qm.state().stats();
    Ok(ResourceReport {
        target: a.target.to_possible_value().unwrap().get_name().to_string(),
        layout: qm.layout().into(),
        params: p,
        totals: stats.totals,
        by_op: stats.by_op.clone(),
    })
}
