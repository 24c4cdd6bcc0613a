//! Amplitude read-out: an unamplified sampling estimate followed by rounds of
//! shift-and-amplify that zoom in on the magnitude of one amplitude.
//!
//! A [`Preparation`] maps a basis state `|σ⟩` to the state of interest `|Ψ⟩`.
//! Stage 0 samples `|⟨χ|Ψ⟩|²` directly. Each later stage subtracts the
//! current lower bound `s` from the amplitude (at the price of a factor
//! 1/2), amplifies the small remainder with `k` Grover iterations and
//! inverts the sine map to get a tighter interval.

use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::oracle::Oracle;
use crate::qmatrix::{embedding_angle, plan_pointwise, plan_uniform, ClassicalMatrix, RegisterLayout};
use crate::sim::{run_power, BasisPattern, Circuit, Control, Gate, StateVector, DEFAULT_MAX_QUBITS};

/// Floor on `μ̃` when turning a probability half-width into an amplitude
/// half-width.
pub const AMPLITUDE_FLOOR: f64 = 0.05;

/// Largest Grover power a stage will use.
pub const MAX_GROVER_POWER: u64 = 1 << 24;

const CONSISTENCY_TOL: f64 = 1e-9;

/// A circuit taking the basis state `sigma` to the state of interest.
#[derive(Clone, Debug, PartialEq)]
pub struct Preparation {
    n_qubits: usize,
    sigma: BasisPattern,
    circuit: Circuit,
}

impl Preparation {
    /// `sigma` must fix every one of the `n_qubits` qubits.
    pub fn new(n_qubits: usize, sigma: BasisPattern, circuit: Circuit) -> Result<Self> {
        require_full(&sigma, n_qubits, "sigma")?;
        circuit.validate(n_qubits)?;
        Ok(Self {
            n_qubits,
            sigma,
            circuit,
        })
    }

    /// Uniform plus pointwise loading of `f`, entered from
    /// `|1⟩_a|0⟩|0⟩` through a leading `X` on aux.
    pub fn for_matrix(layout: &RegisterLayout, f: &ClassicalMatrix) -> Result<Self> {
        let (normalized, _) = f.normalized();
        let mut c = Circuit::new("prepare");
        c.x(layout.aux());
        c.append(&plan_uniform(layout));
        c.append(&plan_pointwise(layout, &normalized)?);
        let sigma = BasisPattern::basis(layout.n_qubits(), 1 << layout.aux());
        Self::new(layout.n_qubits(), sigma, c)
    }

    /// Uniform columns plus the oracle on a flag above them, entered from
    /// flag = 1.
    pub fn for_oracle(oracle: &Oracle) -> Result<Self> {
        let n = oracle.n_bits();
        let cols: Vec<usize> = (0..n).collect();
        let mut c = Circuit::new("prepare");
        c.x(n);
        for &q in &cols {
            c.h(q);
        }
        c.append(&oracle.circuit(n, &cols, &[])?);
        Self::new(n + 1, BasisPattern::basis(n + 1, 1 << n), c)
    }

    /// One qubit carrying `a` on `|0⟩`.
    pub fn for_amplitude(a: f64) -> Result<Self> {
        Self::for_oracle(&Oracle::from_array(&[a])?)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn sigma(&self) -> &BasisPattern {
        &self.sigma
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// The same preparation with every amplitude negated.
    pub fn sign_flipped(&self) -> Self {
        let mut flipped = self.clone();
        flipped.circuit.global_phase();
        flipped
    }

    pub fn prepared_state(&self) -> Result<StateVector> {
        self.prepared_state_with_limit(DEFAULT_MAX_QUBITS)
    }

    pub fn prepared_state_with_limit(&self, max_qubits: usize) -> Result<StateVector> {
        let mut s = StateVector::basis_with_limit(self.n_qubits, self.sigma.value(), max_qubits)?;
        s.run(&self.circuit)?;
        Ok(s)
    }

    /// Exact real amplitude `⟨χ|Ψ⟩`; for checks, not for estimation.
    pub fn overlap(&self, chi: &BasisPattern) -> Result<f64> {
        require_full(chi, self.n_qubits, "chi")?;
        Ok(self.prepared_state()?.amplitude(chi.value()).re)
    }
}

fn require_full(p: &BasisPattern, n_qubits: usize, what: &str) -> Result<()> {
    if p.is_full(n_qubits) {
        Ok(())
    } else {
        Err(Error::Pattern(alloc::format!(
            "{what} must fix all {n_qubits} qubits"
        )))
    }
}

/// `[μ̃ - δ, μ̃ + δ]` on an amplitude magnitude, clamped to `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfidenceInterval {
    pub mu_tilde: f64,
    pub delta: f64,
    pub shots: u64,
    pub counts: u64,
    pub failure_prob: f64,
}

impl ConfidenceInterval {
    pub fn lower(&self) -> f64 {
        (self.mu_tilde - self.delta).clamp(0.0, 1.0)
    }

    pub fn upper(&self) -> f64 {
        (self.mu_tilde + self.delta).clamp(0.0, 1.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower() <= x && x <= self.upper()
    }
}

/// Chebyshev half-width on a frequency with worst-case variance 1/4:
/// `√(1/(4·shots·failure_prob))`.
pub fn probability_half_width(shots: u64, failure_prob: f64) -> f64 {
    math::sqrt(1.0 / (4.0 * shots as f64 * failure_prob))
}

fn check_sampling(shots: u64, failure_prob: f64) -> Result<()> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    if !(failure_prob > 0.0 && failure_prob < 1.0) {
        return Err(Error::Range {
            what: "failure_prob",
            value: failure_prob,
        });
    }
    Ok(())
}

/// Binomial draw of hits on `chi` from an already prepared state.
fn draw(state: &StateVector, chi: &BasisPattern, shots: u64, seed: u64) -> Result<u64> {
    Ok(state.sample_patterns(core::slice::from_ref(chi), shots, seed)?[0])
}

fn interval_from_counts(counts: u64, shots: u64, failure_prob: f64) -> ConfidenceInterval {
    let delta_p = probability_half_width(shots, failure_prob);
    let (mu_tilde, delta) = if counts == 0 {
        (0.0, math::sqrt(delta_p))
    } else {
        let mu = math::sqrt(counts as f64 / shots as f64);
        (mu, delta_p / (2.0 * mu.max(AMPLITUDE_FLOOR)))
    };
    ConfidenceInterval {
        mu_tilde,
        delta,
        shots,
        counts,
        failure_prob,
    }
}

/// `μ̃ = √(hits/shots)` with half-width `δ_P / (2·max(μ̃, 0.05))`. With no
/// hits the interval is `[0, √δ_P]`.
pub fn unamplified_estimate(
    prep: &Preparation,
    chi: &BasisPattern,
    shots: u64,
    seed: u64,
    failure_prob: f64,
) -> Result<ConfidenceInterval> {
    check_sampling(shots, failure_prob)?;
    require_full(chi, prep.n_qubits, "chi")?;
    let state = prep.prepared_state()?;
    let counts = draw(&state, chi, shots, seed)?;
    Ok(interval_from_counts(counts, shots, failure_prob))
}

/// A preparation whose `diff` sector holds `(a - s)/2` and whose `sum`
/// sector holds `(a + s)/2`, where `a = ⟨χ|Ψ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftedPreparation {
    pub preparation: Preparation,
    pub shift: f64,
    /// Amplitude per unit of `a - s`.
    pub scale: f64,
    pub diff: BasisPattern,
    pub sum: BasisPattern,
}

/// Shift by the interval's lower bound `μ̃ - δ`.
pub fn shifted_prepare(
    prep: &Preparation,
    chi: &BasisPattern,
    interval: &ConfidenceInterval,
) -> Result<ShiftedPreparation> {
    shift_by(prep, chi, interval.mu_tilde - interval.delta)
}

/// One extra qubit `r` in superposition selects between `Ψ` (r = 0) and a
/// reference state carrying `s` on `χ` (r = 1); a final Hadamard on `r`
/// leaves the sum on r = 0 and the difference on r = 1.
pub fn shift_by(prep: &Preparation, chi: &BasisPattern, s: f64) -> Result<ShiftedPreparation> {
    if !s.is_finite() || s.abs() > 1.0 {
        return Err(Error::Range {
            what: "shift",
            value: s,
        });
    }
    let n = prep.n_qubits;
    require_full(chi, n, "chi")?;
    let r = n;
    let mut c = Circuit::new("shifted_prepare");
    c.h(r);
    c.append(&prep.circuit.controlled(&[Control::zero(r)])?);

    // Reference branch: walk σ onto χ, then rotate one qubit of χ so that
    // exactly `s` stays on χ.
    let &(rot, _) = chi.bits().last().ok_or(Error::EmptyArray)?;
    for &(q, bit) in chi.bits() {
        if prep.sigma.get(q) != Some(bit) {
            c.cx(r, q);
        }
    }
    c.gate(Gate::ry(embedding_angle(s), rot).controlled([Control::one(r)]));
    c.h(r);

    let sigma = prep.sigma.with(&BasisPattern::new([(r, false)])?)?;
    Ok(ShiftedPreparation {
        preparation: Preparation::new(n + 1, sigma, c)?,
        shift: s,
        scale: 0.5,
        diff: chi.with(&BasisPattern::new([(r, true)])?)?,
        sum: chi.with(&BasisPattern::new([(r, false)])?)?,
    })
}

/// One application of `Q = -O R_σ O⁻¹ R_χ`.
///
/// With the leading sign, `⟨χ|Q^k|Ψ⟩ = sin((2k+1)θ)` for `sin θ = ⟨χ|Ψ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroverOperator {
    circuit: Circuit,
}

impl GroverOperator {
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// Applies `Q^k`; small registers use a dense matrix power.
    pub fn apply(&self, state: &mut StateVector, k: u64) -> Result<()> {
        run_power(state, &self.circuit, k)
    }
}

pub fn grover_operator(prep: &Preparation, chi: &BasisPattern) -> Result<GroverOperator> {
    require_full(chi, prep.n_qubits, "chi")?;
    let mut c = Circuit::new("grover");
    c.reflect(chi.clone());
    c.append(&prep.circuit.inverse());
    c.reflect(prep.sigma.clone());
    c.append(&prep.circuit);
    c.global_phase();
    Ok(GroverOperator { circuit: c })
}

/// Largest `k ≥ 0` with `(2k+1)·θ ≤ π/2`.
pub fn choose_k(theta: f64) -> Result<u64> {
    if !(theta > 0.0 && theta <= math::FRAC_PI_2) {
        return Err(Error::Range {
            what: "theta",
            value: theta,
        });
    }
    let k = math::floor((math::FRAC_PI_2 / theta - 1.0) / 2.0 + 1e-9);
    Ok((k.max(0.0) as u64).min(MAX_GROVER_POWER))
}

/// `γ = sin²((2k+1)θ) / sin²θ`, with the `(2k+1)²` limit at `θ = 0`.
pub fn amplification_factor(theta: f64, k: u64) -> f64 {
    let m = (2 * k + 1) as f64;
    let den = math::sin(theta);
    if den.abs() < 1e-150 {
        return m * m;
    }
    let num = math::sin(m * theta);
    (num * num) / (den * den)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QCoinConfig {
    pub shots_per_stage: u64,
    pub stages: usize,
    pub failure_prob: f64,
    pub seed: u64,
}

impl Default for QCoinConfig {
    fn default() -> Self {
        Self {
            shots_per_stage: 10_000,
            stages: 3,
            failure_prob: 0.05,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SignProbe {
    pub shift: f64,
    pub sum_counts: u64,
    pub diff_counts: u64,
    /// +1, -1, or 0 when the counts tie.
    pub sign: i8,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroverStage {
    /// Signed shift applied to the amplitude.
    pub shift: f64,
    /// Amplitude per unit of `|a| - |shift|`; 1 when unshifted.
    pub scale: f64,
    pub k: u64,
    /// Realized angle, `asin(√P̂)/(2k+1)`.
    pub theta: f64,
    /// γ at the interval midpoint, used when planning.
    pub gamma_planned: f64,
    /// γ at [`GroverStage::theta`].
    pub gamma: f64,
    pub shots: u64,
    pub counts: u64,
    /// Chebyshev half-width on the amplified probability.
    pub amplified_half_width: f64,
    /// `amplified_half_width / gamma`.
    pub transferred_half_width: f64,
    pub interval_before: ConfidenceInterval,
    pub interval_after: ConfidenceInterval,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimationTrace {
    pub initial: ConfidenceInterval,
    pub sign_probe: Option<SignProbe>,
    pub stages: Vec<GroverStage>,
    /// Estimate of `|⟨χ|Ψ⟩|`.
    pub estimate: f64,
    pub half_width: f64,
}

impl EstimationTrace {
    /// Half-width after stage 0, 1, ….
    pub fn half_widths(&self) -> Vec<f64> {
        core::iter::once(self.initial.delta)
            .chain(self.stages.iter().map(|s| s.interval_after.delta))
            .collect()
    }

    pub fn final_interval(&self) -> ConfidenceInterval {
        self.stages
            .last()
            .map_or(self.initial, |s| s.interval_after)
    }
}

fn magnitude_interval(lo: f64, hi: f64, template: &ConfidenceInterval, counts: u64) -> ConfidenceInterval {
    ConfidenceInterval {
        mu_tilde: (lo + hi) / 2.0,
        delta: (hi - lo) / 2.0,
        counts,
        ..*template
    }
}

/// Zoom-in estimate of `|⟨χ|Ψ⟩|`.
///
/// The Grover power of each stage is chosen from the top of the current
/// interval, so the amplified angle cannot pass `π/2` while the interval
/// holds. The sign of the amplitude is settled once, by comparing the sum
/// and difference sectors of a shifted state, so the output does not depend
/// on it.
pub fn qcoin_estimate(
    prep: &Preparation,
    chi: &BasisPattern,
    config: &QCoinConfig,
) -> Result<EstimationTrace> {
    let QCoinConfig {
        shots_per_stage: shots,
        stages,
        failure_prob,
        seed,
    } = *config;
    check_sampling(shots, failure_prob)?;
    require_full(chi, prep.n_qubits, "chi")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let initial = unamplified_estimate(prep, chi, shots, rng.next_u64(), failure_prob)?;
    let (mut lo, mut hi) = (initial.lower(), initial.upper());
    let mut current = initial;
    let mut sign: Option<i8> = None;
    let mut sign_probe = None;
    let mut trace = Vec::with_capacity(stages);
    let delta_p = probability_half_width(shots, failure_prob);

    for _ in 0..stages {
        let stage_seed = rng.next_u64();
        let probe_seed = rng.next_u64();
        let mut s = lo;
        if s > 0.0 && sign.is_none() {
            let shifted = shift_by(prep, chi, s)?;
            let state = shifted.preparation.prepared_state()?;
            // Same seed for both draws keeps the probe symmetric under a
            // sign flip of the amplitude.
            let sum_counts = draw(&state, &shifted.sum, shots, probe_seed)?;
            let diff_counts = draw(&state, &shifted.diff, shots, probe_seed)?;
            let found = match sum_counts.cmp(&diff_counts) {
                core::cmp::Ordering::Greater => 1,
                core::cmp::Ordering::Less => -1,
                core::cmp::Ordering::Equal => 0,
            };
            sign_probe = Some(SignProbe {
                shift: s,
                sum_counts,
                diff_counts,
                sign: found,
            });
            if found != 0 {
                sign = Some(found);
            }
        }
        let sgn = match sign {
            Some(v) => f64::from(v),
            None => {
                s = 0.0;
                1.0
            }
        };

        let (target_prep, target_chi, scale) = if s > 0.0 {
            let shifted = shift_by(prep, chi, sgn * s)?;
            (shifted.preparation, shifted.diff, shifted.scale)
        } else {
            (prep.clone(), chi.clone(), 1.0)
        };

        let b_max = (scale * (hi - s)).clamp(1e-12, 1.0);
        let k = choose_k(math::asin(b_max))?;
        let b_mid = (scale * ((lo + hi) / 2.0 - s)).clamp(0.0, 1.0);
        let gamma_planned = amplification_factor(math::asin(b_mid), k);

        let mut state = target_prep.prepared_state()?;
        grover_operator(&target_prep, &target_chi)?.apply(&mut state, k)?;
        let counts = draw(&state, &target_chi, shots, stage_seed)?;

        let p_hat = counts as f64 / shots as f64;
        let m = (2 * k + 1) as f64;
        let to_magnitude = |p: f64| {
            let theta = math::asin(math::sqrt(p.clamp(0.0, 1.0))) / m;
            s + math::sin(theta) / scale
        };
        let new_lo = to_magnitude(p_hat - delta_p);
        let new_hi = to_magnitude(p_hat + delta_p);
        if new_lo > 1.0 + CONSISTENCY_TOL {
            return Err(Error::Inconsistency(alloc::format!(
                "amplitude lower bound {new_lo} exceeds 1"
            )));
        }
        let theta = math::asin(math::sqrt(p_hat)) / m;
        let gamma = amplification_factor(theta, k);

        // Keep the overlap with the previous interval when there is one.
        let (mut a, mut b) = (new_lo.min(1.0), new_hi.min(1.0));
        if a <= hi && b >= lo {
            a = a.max(lo);
            b = b.min(hi);
        }
        lo = a;
        hi = b;
        let after = magnitude_interval(lo, hi, &current, counts);
        trace.push(GroverStage {
            shift: sgn * s,
            scale,
            k,
            theta,
            gamma_planned,
            gamma,
            shots,
            counts,
            amplified_half_width: delta_p,
            transferred_half_width: delta_p / gamma,
            interval_before: current,
            interval_after: after,
        });
        current = after;
    }

    Ok(EstimationTrace {
        initial,
        sign_probe,
        estimate: if trace.is_empty() { initial.mu_tilde } else { current.mu_tilde },
        half_width: current.delta,
        stages: trace,
    })
}
