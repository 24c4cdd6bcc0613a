use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::circuit::{Circuit, Op};
use super::gate::{BasisPattern, Gate, GateKind};
use super::stats::{GateCounts, GateStats};
use crate::error::{Error, Result};
use crate::math;

pub type Amplitude = Complex64;

/// Capacity bound used by [`StateVector::new`].
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Dense amplitude vector over `n_qubits` qubits.
///
/// Basis index `z` stores qubit `q` in bit `q` of `z` (qubit 0 is the least
/// significant bit). The state is single-writer: gates mutate it in place.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Amplitude>,
    stats: GateStats,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits, `1 <= n_qubits <= DEFAULT_MAX_QUBITS`.
    pub fn new(n_qubits: usize) -> Result<Self> {
        Self::with_limit(n_qubits, DEFAULT_MAX_QUBITS)
    }

    pub fn with_limit(n_qubits: usize, max_qubits: usize) -> Result<Self> {
        Self::basis_with_limit(n_qubits, 0, max_qubits)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        Self::basis_with_limit(n_qubits, index, DEFAULT_MAX_QUBITS)
    }

    pub fn basis_with_limit(n_qubits: usize, index: usize, max_qubits: usize) -> Result<Self> {
        // usize shifts cap the representable size regardless of the limit.
        let hard_cap = max_qubits.min(usize::BITS as usize - 2);
        if n_qubits == 0 || n_qubits > hard_cap {
            return Err(Error::Capacity {
                requested: n_qubits,
                max: hard_cap,
            });
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                what: "basis",
                index,
                bound: dim,
            });
        }
        let mut amps = vec![Amplitude::new(0.0, 0.0); dim];
        amps[index] = Amplitude::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amps,
            stats: GateStats::default(),
        })
    }

    /// Wraps raw amplitudes; the length must be a power of two. No
    /// normalisation is enforced so tests can build arbitrary vectors.
    pub fn from_amplitudes(amps: Vec<Amplitude>) -> Result<Self> {
        let n_qubits = math::log2_exact(amps.len()).ok_or(Error::NotPowerOfTwo(amps.len()))?;
        if n_qubits == 0 {
            return Err(Error::Capacity {
                requested: 0,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            n_qubits,
            amps,
            stats: GateStats::default(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Amplitude {
        self.amps[index]
    }

    pub fn stats(&self) -> &GateStats {
        &self.stats
    }

    pub fn reset_stats(&mut self) {
        self.stats.reset();
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Errors with [`Error::Inconsistency`] when `|‖ψ‖² - 1| > tol` or an
    /// amplitude is not finite.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        if self.amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Inconsistency("non-finite amplitude".into()));
        }
        let dev = (self.norm_sqr() - 1.0).abs();
        if dev > tol {
            return Err(Error::Inconsistency(alloc::format!(
                "norm deviates from 1 by {dev:e}"
            )));
        }
        Ok(())
    }

    /// Applies one gate, booked under the label `"apply"`.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        apply_gate(&mut self.amps, gate);
        self.stats.record("apply", GateCounts::of_gate(gate));
        Ok(())
    }

    /// Runs a circuit. The whole circuit is validated before any amplitude
    /// changes, so a failing circuit leaves the state untouched.
    pub fn run(&mut self, circuit: &Circuit) -> Result<()> {
        circuit.validate(self.n_qubits)?;
        for op in circuit.ops() {
            apply_op(&mut self.amps, op);
        }
        self.stats.record(circuit.label(), circuit.counts());
        Ok(())
    }

    /// `H` on each listed qubit in ascending index order.
    pub fn walsh_hadamard(&mut self, qubits: &[usize]) -> Result<()> {
        let mut sorted = qubits.to_vec();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateQubit(w[0]));
        }
        let mut circuit = Circuit::new("walsh_hadamard");
        for q in sorted {
            circuit.h(q);
        }
        self.run(&circuit)
    }

    /// `Σ |ψ_z|²` over the basis states matching `pattern`.
    pub fn probability_of(&self, pattern: &BasisPattern) -> Result<f64> {
        pattern.validate(self.n_qubits)?;
        let (mask, value) = (pattern.mask(), pattern.value());
        let p: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(z, _)| z & mask == value)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        Ok(p.clamp(0.0, 1.0))
    }

    /// Multinomial draw of `shots` basis indices from `|ψ_z|²`.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<BTreeMap<usize, u64>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let cumulative: Vec<f64> = self
            .amps
            .iter()
            .scan(0.0, |acc, a| {
                *acc += a.norm_sqr();
                Some(*acc)
            })
            .collect();
        let total = *cumulative.last().unwrap_or(&0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hist = BTreeMap::new();
        for _ in 0..shots {
            let u = rng.random::<f64>() * total;
            let z = cumulative
                .partition_point(|&c| c <= u)
                .min(cumulative.len() - 1);
            *hist.entry(z).or_insert(0) += 1;
        }
        Ok(hist)
    }

    /// Categorical draw over disjoint patterns: returns how many of `shots`
    /// outcomes fell in each pattern. Outcomes matching none are dropped.
    pub fn sample_patterns(
        &self,
        patterns: &[BasisPattern],
        shots: u64,
        seed: u64,
    ) -> Result<Vec<u64>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let probs = patterns
            .iter()
            .map(|p| self.probability_of(p))
            .collect::<Result<Vec<f64>>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![0u64; patterns.len()];
        for _ in 0..shots {
            let mut u = rng.random::<f64>();
            for (count, &p) in counts.iter_mut().zip(&probs) {
                if u < p {
                    *count += 1;
                    break;
                }
                u -= p;
            }
        }
        Ok(counts)
    }

    /// `⟨self|other⟩ = Σ conj(self_z) other_z`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Amplitude> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Amplitude] {
        &mut self.amps
    }

    pub(crate) fn record(&mut self, label: &str, counts: GateCounts) {
        self.stats.record(label, counts);
    }
}

pub(crate) fn apply_op(amps: &mut [Amplitude], op: &Op) {
    match op {
        Op::Gate(g) => apply_gate(amps, g),
        Op::Reflect(p) => {
            let (mask, value) = (p.mask(), p.value());
            for (z, a) in amps.iter_mut().enumerate() {
                if z & mask == value {
                    *a = -*a;
                }
            }
        }
        Op::GlobalPhase => amps.iter_mut().for_each(|a| *a = -*a),
    }
}

/// Masked pairwise update: only pairs `(z, z | t)` whose controls hold are
/// touched, every other amplitude is left bit-identical.
pub(crate) fn apply_gate(amps: &mut [Amplitude], gate: &Gate) {
    let t = 1usize << gate.target;
    let (cmask, cval) = gate.control_mask();
    let for_pairs = |amps: &mut [Amplitude], f: &dyn Fn(Amplitude, Amplitude) -> (Amplitude, Amplitude)| {
        for z in 0..amps.len() {
            if z & t != 0 || z & cmask != cval {
                continue;
            }
            let (a, b) = f(amps[z], amps[z | t]);
            amps[z] = a;
            amps[z | t] = b;
        }
    };
    match gate.kind {
        GateKind::X => for_pairs(amps, &|a, b| (b, a)),
        GateKind::H => {
            let r = math::FRAC_1_SQRT_2;
            for_pairs(amps, &|a, b| ((a + b) * r, (a - b) * r))
        }
        GateKind::Ry(angle) => {
            let (c, s) = (math::cos(angle / 2.0), math::sin(angle / 2.0));
            for_pairs(amps, &|a, b| (a * c - b * s, a * s + b * c))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Control;

    fn close(a: Amplitude, re: f64) -> bool {
        (a.re - re).abs() < 1e-12 && a.im.abs() < 1e-12
    }

    #[test]
    fn ground_states() {
        let s = StateVector::new(1).unwrap();
        assert_eq!(s.amplitudes(), &[Amplitude::new(1.0, 0.0), Amplitude::new(0.0, 0.0)]);
        let s = StateVector::new(3).unwrap();
        assert_eq!(s.dim(), 8);
        assert!(close(s.amplitude(0), 1.0));
        assert!(matches!(
            StateVector::new(25),
            Err(Error::Capacity { requested: 25, .. })
        ));
        assert!(StateVector::new(0).is_err());
    }

    #[test]
    fn x_and_h() {
        let mut s = StateVector::new(1).unwrap();
        s.apply(&Gate::x(0)).unwrap();
        assert!(close(s.amplitude(1), 1.0));

        let mut s = StateVector::new(1).unwrap();
        s.apply(&Gate::h(0)).unwrap();
        assert!(close(s.amplitude(0), math::FRAC_1_SQRT_2));
        assert!(close(s.amplitude(1), math::FRAC_1_SQRT_2));
    }

    #[test]
    fn toffoli_truth_table() {
        // X on q0 controlled on q1 = q2 = 1, against a classical truth table.
        let gate = Gate::x(0).controlled([Control::one(1), Control::one(2)]);
        for z in 0..8usize {
            let mut s = StateVector::basis(3, z).unwrap();
            s.apply(&gate).unwrap();
            let expected = if z & 0b110 == 0b110 { z ^ 1 } else { z };
            assert!(close(s.amplitude(expected), 1.0), "input {z:03b}");
        }
    }

    #[test]
    fn control_on_zero() {
        let gate = Gate::x(1).controlled([Control::zero(0)]);
        for z in 0..4usize {
            let mut s = StateVector::basis(2, z).unwrap();
            s.apply(&gate).unwrap();
            let expected = if z & 1 == 0 { z ^ 2 } else { z };
            assert!(close(s.amplitude(expected), 1.0));
        }
        let s = StateVector::new(2).unwrap();
        let mut t = s.clone();
        t.apply(&gate).unwrap();
        assert_eq!(t.stats().totals.x, 2);
        assert_eq!(t.stats().totals.cnot, 1);
    }

    #[test]
    fn ry_convention() {
        let mut s = StateVector::new(1).unwrap();
        s.apply(&Gate::ry(1.0, 0)).unwrap();
        assert!(close(s.amplitude(0), math::cos(0.5)));
        assert!(close(s.amplitude(1), math::sin(0.5)));
    }

    #[test]
    fn address_errors() {
        let mut s = StateVector::new(2).unwrap();
        assert!(matches!(s.apply(&Gate::x(2)), Err(Error::Address { .. })));
        let before = s.clone();
        let mut c = Circuit::new("bad");
        c.x(0).x(5);
        assert!(s.run(&c).is_err());
        assert_eq!(s, before);
    }

    #[test]
    fn walsh_hadamard_uniform_and_involution() {
        let mut s = StateVector::new(2).unwrap();
        s.walsh_hadamard(&[1, 0]).unwrap();
        for a in s.amplitudes() {
            assert!(close(*a, 0.5));
        }
        s.walsh_hadamard(&[0, 1]).unwrap();
        assert!(close(s.amplitude(0), 1.0));
        assert!(s.walsh_hadamard(&[0, 0]).is_err());
    }

    #[test]
    fn probabilities() {
        let s = StateVector::basis(1, 1).unwrap();
        let one = BasisPattern::new([(0, true)]).unwrap();
        assert_eq!(s.probability_of(&one).unwrap(), 1.0);

        let mut h = StateVector::new(1).unwrap();
        h.apply(&Gate::h(0)).unwrap();
        let zero = BasisPattern::new([(0, false)]).unwrap();
        assert!((h.probability_of(&zero).unwrap() - 0.5).abs() < 1e-12);
        assert!((h.probability_of(&BasisPattern::empty()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampling() {
        let s = StateVector::basis(1, 1).unwrap();
        let hist = s.sample(100, 3).unwrap();
        assert_eq!(hist.get(&1), Some(&100));
        assert_eq!(hist.len(), 1);
        assert_eq!(s.sample(0, 3), Err(Error::ZeroShots));

        let mut h = StateVector::new(1).unwrap();
        h.apply(&Gate::h(0)).unwrap();
        let hist = h.sample(100_000, 42).unwrap();
        let zeros = *hist.get(&0).unwrap() as f64;
        // binomial(1e5, 1/2): σ = √(1e5/4) ≈ 158.1
        assert!((zeros - 50_000.0).abs() < 5.0 * 158.2, "zeros = {zeros}");
        assert_eq!(hist, h.sample(100_000, 42).unwrap());
    }

    #[test]
    fn pattern_sampling_matches_probabilities() {
        let mut s = StateVector::new(2).unwrap();
        s.apply(&Gate::ry(1.2, 0)).unwrap();
        s.apply(&Gate::h(1)).unwrap();
        let pats = [
            BasisPattern::basis(2, 1),
            BasisPattern::basis(2, 3),
        ];
        let counts = s.sample_patterns(&pats, 40_000, 9).unwrap();
        let p = math::sin(0.6) * math::sin(0.6) / 2.0;
        for c in counts {
            let sigma = (40_000.0 * p * (1.0 - p)).sqrt();
            assert!((c as f64 - 40_000.0 * p).abs() < 5.0 * sigma);
        }
    }

    #[test]
    fn inner_products() {
        let zero = StateVector::new(1).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        assert!(close(zero.inner_product(&one).unwrap(), 0.0));
        assert!(close(zero.inner_product(&zero).unwrap(), 1.0));
        let mut h = zero.clone();
        h.apply(&Gate::h(0)).unwrap();
        assert!(close(zero.inner_product(&h).unwrap(), math::FRAC_1_SQRT_2));
        let two = StateVector::new(2).unwrap();
        assert!(matches!(
            zero.inner_product(&two),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
