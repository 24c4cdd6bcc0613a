//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p qmatrix-core --test acceptance`.

mod common;

use common::*;
use qmatrix_core::arith::{multiply_arrays, scalar_product, Direction, RowSelector};
use qmatrix_core::oracle::{linear_shift, Oracle};
use qmatrix_core::qcoin::{amplification_factor, grover_operator, qcoin_estimate, Preparation, QCoinConfig};
use qmatrix_core::qmatrix::MaskPlan;
use qmatrix_core::{BasisPattern, Circuit, QMatrix, RegisterLayout, StateVector};
use rand::Rng;
use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn load(rows: &Rows) -> QMatrix {
    let n_i = rows.len().trailing_zeros() as usize;
    let n_j = rows[0].len().trailing_zeros() as usize;
    let mut qm = QMatrix::init_uniform(RegisterLayout::with_mul(n_i, n_j)).unwrap();
    qm.load_pointwise(&matrix(rows)).unwrap();
    qm
}

fn op_error(rows: &Rows, op: impl FnOnce(&mut QMatrix), classical: impl FnOnce(&Rows) -> Rows) -> f64 {
    let mut qm = load(rows);
    op(&mut qm);
    let expected = scaled(&classical(&normalized(rows)), qm.ledger().factor);
    max_diff(&to_rows(&qm.read_matrix()), &expected)
}

fn arithmetic_equivalence() -> Outcome {
    const SIZES: [usize; 3] = [2, 4, 8];
    let mut rng = rng(1001);
    let mut worst = 0.0f64;
    let mut checks = 0;
    for _ in 0..100 {
        let (ni, nj) = (SIZES[rng.random_range(0..3)], SIZES[rng.random_range(0..3)]);
        let rows = random_rows(&mut rng, ni, nj);
        let i = rng.random_range(0..ni);
        let j = rng.random_range(0..nj);
        let (a, b) = (rng.random_range(0..nj), rng.random_range(0..nj));
        let alpha = rng.random_range(0.0..=1.0);
        let errs = [
            op_error(&rows, |q| q.reverse(RowSelector::Row(i)).unwrap(), |f| reverse_row(f, i)),
            op_error(&rows, |q| q.reverse(RowSelector::Column(j)).unwrap(), |f| reverse_column(f, j)),
            op_error(&rows, |q| q.reverse(RowSelector::Whole).unwrap(), reverse_whole),
            op_error(&rows, |q| q.swap_with_pivot(Some(i), a).unwrap(), |f| swap_columns(f, Some(i), a, nj - 1)),
            op_error(&rows, |q| q.swap_elements(Some(i), a, b).unwrap(), |f| swap_columns(f, Some(i), a, b)),
            op_error(&rows, |q| q.cyclic_shift(Direction::Left, RowSelector::Row(i)).unwrap(), |f| {
                rotate_rows(f, Some(i), true)
            }),
            op_error(&rows, |q| q.cyclic_shift(Direction::Right, RowSelector::Whole).unwrap(), |f| {
                rotate_rows(f, None, false)
            }),
            op_error(&rows, |q| q.cyclic_shift(Direction::Left, RowSelector::Column(j)).unwrap(), |f| {
                rotate_column(f, j, true)
            }),
            op_error(&rows, |q| q.pairwise_sum_diff().unwrap(), pair_sum_diff),
            op_error(&rows, |q| q.reduce_rows().unwrap(), walsh_rows),
            op_error(&rows, |q| q.scale_by_constant(RowSelector::Row(i), alpha).unwrap(), |f| {
                scale_row(f, i, alpha)
            }),
        ];
        checks += errs.len();
        worst = errs.iter().fold(worst, |m, e| m.max(*e));

        let f = random_array(&mut rng, nj);
        let g = random_array(&mut rng, nj);
        let (of, og) = (Oracle::from_array(&f).unwrap(), Oracle::from_array(&g).unwrap());
        let layout = RegisterLayout::with_mul(0, nj.trailing_zeros() as usize);
        let prod = multiply_arrays(&of, &og, &layout).map_err(|e| e.to_string())?;
        worst = worst.max(max_diff(&to_rows(&prod.read_matrix()), &vec![elementwise(&f, &g)]));
        let sp = scalar_product(&of, &og, &layout).map_err(|e| e.to_string())?;
        worst = worst.max((sp.read_matrix().get(0, 0) - sp.ledger().factor * dot(&f, &g)).abs());
        checks += 2;
    }
    ensure(worst < PIPELINE_TOL, || format!("max error {worst:.3e}"))?;
    Ok(format!("{checks} checks, max error {worst:.3e}"))
}

fn pivot_worked_example() -> Outcome {
    let f: Vec<f64> = (0..8).map(|k| (k as f64 - 3.5) / 4.0).collect();
    let mut qm = load(&vec![f.clone()]);
    qm.swap_with_pivot(None, 0).map_err(|e| e.to_string())?;
    let mut want = f.clone();
    want.swap(0, 7);
    let got = to_rows(&qm.read_matrix()).remove(0);
    let scale = qm.ledger().inf_norm;
    let err = got
        .iter()
        .zip(&want)
        .map(|(a, b)| (a * scale - b).abs())
        .fold(0.0, f64::max);
    ensure(err < ALGEBRA_TOL, || format!("error {err:.3e}, got {got:?}"))?;
    Ok(format!("max error {err:.3e}"))
}

fn constant_row_cost() -> Outcome {
    let n_i = 3;
    let counts: Vec<_> = [1usize, 3, 6]
        .iter()
        .map(|&n_j| {
            let mut qm = QMatrix::init_uniform(RegisterLayout::new(n_i, n_j)).unwrap();
            qm.state_mut().reset_stats();
            qm.load_constant_row(0, 0.4).unwrap();
            qm.state().stats().totals
        })
        .collect();
    ensure(counts.windows(2).all(|w| w[0] == w[1]), || format!("{counts:?}"))?;
    let layout = RegisterLayout::new(n_i, 6);
    let mut worst_mask = 0;
    for i in 0..layout.rows() {
        worst_mask = worst_mask.max(2 * MaskPlan::new(&layout, Some(i), None).unwrap().len());
    }
    ensure(worst_mask <= 2 * n_i, || format!("mask uses {worst_mask} X gates"))?;
    ensure(counts[0].x as usize <= 2 * n_i, || format!("{} X gates", counts[0].x))?;
    Ok(format!("{:?} for n_J = 1, 3, 6; mask X ≤ {worst_mask}", counts[0]))
}

fn grover_closed_form() -> Outcome {
    let mut rng = rng(1004);
    let mut worst = 0.0f64;
    let mut powers = 0;
    for trial in 0..50 {
        let (prep, chi) = if trial % 2 == 0 {
            let (n_i, n_j) = (rng.random_range(0..=2), rng.random_range(0..=2));
            let layout = RegisterLayout::new(n_i, n_j);
            let rows = random_rows(&mut rng, 1 << n_i, 1 << n_j);
            let prep = Preparation::for_matrix(&layout, &matrix(&rows)).unwrap();
            let chi = layout
                .entry_pattern(rng.random_range(0..1 << n_i), rng.random_range(0..1 << n_j))
                .unwrap();
            (prep, chi)
        } else {
            let mut c = Circuit::new("prepare");
            for _ in 0..12 {
                let q = rng.random_range(0..3);
                match rng.random_range(0..3) {
                    0 => c.h(q),
                    1 => c.ry(rng.random_range(-3.0..3.0), q),
                    _ => c.cx(q, (q + 1) % 3),
                };
            }
            let sigma = BasisPattern::basis(3, rng.random_range(0..8));
            let chi = BasisPattern::basis(3, rng.random_range(0..8));
            (Preparation::new(3, sigma, c).unwrap(), chi)
        };
        let theta = prep.overlap(&chi).unwrap().asin();
        let q = grover_operator(&prep, &chi).map_err(|e| e.to_string())?;
        for k in 0..=8u64 {
            if (2 * k + 1) as f64 * theta.abs() > FRAC_PI_2 {
                break;
            }
            let mut state: StateVector = prep.prepared_state().unwrap();
            q.apply(&mut state, k).unwrap();
            let err = (state.amplitude(chi.value()).re - ((2 * k + 1) as f64 * theta).sin()).abs();
            worst = worst.max(err);
            powers += 1;
        }
    }
    ensure(worst < 1e-9, || format!("closed form error {worst:.3e}"))?;

    let prep = Preparation::for_amplitude(0.3).unwrap();
    let mut gamma_err = 0.0f64;
    for seed in 0..20 {
        let cfg = QCoinConfig { seed, ..QCoinConfig::default() };
        let t = qcoin_estimate(&prep, &BasisPattern::basis(1, 0), &cfg).map_err(|e| e.to_string())?;
        for st in &t.stages {
            let want = amplification_factor(st.theta, st.k);
            gamma_err = gamma_err.max((st.gamma - want).abs() / want.max(1.0));
        }
    }
    ensure(gamma_err <= 1e-12, || format!("gamma error {gamma_err:.3e}"))?;
    Ok(format!("{powers} powers, max error {worst:.3e}; gamma error {gamma_err:.1e}"))
}

fn qcoin_convergence() -> Outcome {
    let prep = Preparation::for_amplitude(0.3).unwrap();
    let chi = BasisPattern::basis(1, 0);
    let (mut shrunk, mut covered) = (0, 0);
    let runs = 200;
    for seed in 0..runs {
        let cfg = QCoinConfig {
            shots_per_stage: 10_000,
            stages: 3,
            failure_prob: 0.05,
            seed,
        };
        let t = qcoin_estimate(&prep, &chi, &cfg).map_err(|e| e.to_string())?;
        if t.half_width < t.initial.delta / 4.0 {
            shrunk += 1;
        }
        if t.final_interval().contains(0.3) {
            covered += 1;
        }
    }
    ensure(shrunk * 10 >= runs * 9, || format!("shrunk in {shrunk}/{runs}"))?;
    ensure(covered * 100 >= runs * 95, || format!("covered in {covered}/{runs}"))?;
    Ok(format!("shrunk {shrunk}/{runs}, covered {covered}/{runs}"))
}

fn staircase_example() -> Outcome {
    let s = 0.3;
    let out = linear_shift(&Oracle::from_array(&[0.0; 8]).unwrap(), s, 2).map_err(|e| e.to_string())?;
    ensure(out.marker_row == 3, || format!("marker row {}", out.marker_row))?;
    let got: Vec<f64> = out.sector.iter().map(|v| v / out.scale).collect();
    let literal = [-0.5, -0.5, -0.1, -0.1, 0.1, 0.1, 0.5, 0.5];
    let coeffs: Vec<f64> = [-5.0, -5.0, -1.0, -1.0, 1.0, 1.0, 5.0, 5.0]
        .iter()
        .map(|c| c / 3.0 * s)
        .collect();
    let reference = staircase(8, &out.shifts);
    for (name, want) in [("literal", &literal[..]), ("coefficients", &coeffs), ("reference", &reference)] {
        let err = got.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(err < PIPELINE_TOL, || format!("{name}: error {err:.3e}, got {got:?}"))?;
    }
    Ok(format!("{got:.3?}"))
}

fn invariants() -> Outcome {
    let mut rng = rng(1007);
    let mut worst_norm = 0.0f64;
    let mut worst_inv = 0.0f64;
    for _ in 0..50 {
        let rows = random_rows(&mut rng, 4, 8);
        let i = rng.random_range(0..4);
        let j = rng.random_range(0..8);
        let base = load(&rows);
        let mut qm = base.clone();
        qm.reverse(RowSelector::Row(i)).unwrap();
        qm.swap_with_pivot(Some(i), j).unwrap();
        qm.cyclic_shift(Direction::Left, RowSelector::Column(j)).unwrap();
        qm.pairwise_sum_diff().unwrap();
        qm.reduce_rows().unwrap();
        qm.scale_by_constant(RowSelector::Row(i), 0.5).unwrap();
        qm.load_constant_row(i, -0.25).unwrap();
        worst_norm = worst_norm.max((qm.state().norm_sqr() - 1.0).abs());

        let mut qm = base.clone();
        for sel in [RowSelector::Row(i), RowSelector::Column(j), RowSelector::Whole] {
            qm.reverse(sel).unwrap();
            qm.reverse(sel).unwrap();
        }
        qm.pairwise_sum_diff().unwrap();
        qm.pairwise_sum_diff().unwrap();
        qm.mask(Some(i), Some(j)).unwrap();
        qm.mask(Some(i), Some(j)).unwrap();
        let diff = qm
            .state()
            .amplitudes()
            .iter()
            .zip(base.state().amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst_inv = worst_inv.max(diff);
    }
    ensure(worst_norm < ALGEBRA_TOL, || format!("norm drift {worst_norm:.3e}"))?;
    ensure(worst_inv < ALGEBRA_TOL, || format!("involution error {worst_inv:.3e}"))?;

    let chi = BasisPattern::basis(1, 0);
    for seed in 0..20 {
        let a = rng.random_range(0.05..0.95);
        let prep = Preparation::for_amplitude(a).unwrap();
        let cfg = QCoinConfig { seed, ..QCoinConfig::default() };
        let plus = qcoin_estimate(&prep, &chi, &cfg).map_err(|e| e.to_string())?;
        let minus = qcoin_estimate(&prep.sign_flipped(), &chi, &cfg).map_err(|e| e.to_string())?;
        ensure((plus.estimate - minus.estimate).abs() < 1e-9, || {
            format!("sign flip changed estimate at seed {seed}")
        })?;
    }
    Ok(format!("norm drift {worst_norm:.1e}, involution error {worst_inv:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("arithmetic equivalence", arithmetic_equivalence),
        ("pivot swap worked example", pivot_worked_example),
        ("constant-row cost", constant_row_cost),
        ("grover closed form", grover_closed_form),
        ("qcoin convergence", qcoin_convergence),
        ("two-level staircase", staircase_example),
        ("invariants", invariants),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{secs:.2}s]", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail}) [{secs:.2}s]", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
