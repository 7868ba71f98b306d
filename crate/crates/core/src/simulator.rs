//! Dense statevector simulation of mixer schedules.
//!
//! Gates are the two primitives the circuits need: a zero-controlled X
//! rotation (the partial mixer; controls project onto |0⟩, not the usual
//! |1⟩ convention) and a diagonal Hamming-weight phase. Amplitudes are stored
//! in wire order; [`StateVector::qubit_map`] records which graph vertex each
//! wire carries so results can always be reported in vertex-id order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ansatz::MixerSchedule;

/// Hard memory bound for a dense state (2^30 amplitudes = 16 GiB); solvers
/// enforce their own, much lower, configurable cap.
pub const MAX_QUBITS: usize = 30;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{0} qubits exceed the dense-simulation limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("warm-start bitstring has length {got}, expected {expected}")]
    WarmLengthMismatch { expected: usize, got: usize },
    #[error("wire {wire} out of range for {n_qubits} qubits")]
    WireOutOfRange { wire: usize, n_qubits: usize },
    #[error("target wire {0} appears in its own control set")]
    TargetInControls(usize),
    #[error("parameter vector has length {got}, schedule needs {expected}")]
    ParamCountMismatch { expected: usize, got: usize },
    #[error("initial state has {got} qubits, schedule has {expected} wires")]
    InitialSizeMismatch { expected: usize, got: usize },
}

/// Normalized complex amplitudes over the computational basis of `n_qubits`
/// wires.
#[derive(Debug, Clone)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
    qubit_map: Vec<usize>,
}

impl StateVector {
    /// The all-zeros basis state with the identity wire→vertex map.
    pub fn new(n_qubits: usize) -> Result<Self, SimError> {
        Self::basis(n_qubits, None)
    }

    /// A computational basis state; `warm` defaults to all zeros.
    pub fn basis(n_qubits: usize, warm: Option<&[bool]>) -> Result<Self, SimError> {
        if n_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits(n_qubits));
        }
        let index = match warm {
            None => 0usize,
            Some(bits) => {
                if bits.len() != n_qubits {
                    return Err(SimError::WarmLengthMismatch {
                        expected: n_qubits,
                        got: bits.len(),
                    });
                }
                bits.iter()
                    .enumerate()
                    .fold(0usize, |acc, (w, &b)| acc | (usize::from(b) << w))
            }
        };
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        amps[index] = Complex64::ONE;
        Ok(StateVector {
            n_qubits,
            amps,
            qubit_map: (0..n_qubits).collect(),
        })
    }

    /// Replaces the wire→vertex map (length must match the qubit count).
    pub fn with_qubit_map(mut self, qubit_map: Vec<usize>) -> Self {
        assert_eq!(qubit_map.len(), self.n_qubits);
        self.qubit_map = qubit_map;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Wire index → graph vertex id.
    pub fn qubit_map(&self) -> &[usize] {
        &self.qubit_map
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Applies `exp(-i·angle·M)` with `M = X_target · Π_c (1+Z_c)/2`: basis
    /// pairs differing only in the target bit rotate iff every control bit is
    /// zero; everything else is untouched.
    pub fn apply_partial_mixer(
        &mut self,
        target: usize,
        controls: &[usize],
        angle: f64,
    ) -> Result<(), SimError> {
        if target >= self.n_qubits {
            return Err(SimError::WireOutOfRange { wire: target, n_qubits: self.n_qubits });
        }
        let mut control_mask = 0usize;
        for &c in controls {
            if c >= self.n_qubits {
                return Err(SimError::WireOutOfRange { wire: c, n_qubits: self.n_qubits });
            }
            if c == target {
                return Err(SimError::TargetInControls(target));
            }
            control_mask |= 1 << c;
        }
        let target_bit = 1usize << target;
        let cos = Complex64::new(angle.cos(), 0.0);
        let minus_i_sin = Complex64::new(0.0, -angle.sin());

        for idx in 0..self.amps.len() {
            if idx & target_bit != 0 || idx & control_mask != 0 {
                continue;
            }
            let flipped = idx | target_bit;
            let a = self.amps[idx];
            let b = self.amps[flipped];
            self.amps[idx] = cos * a + minus_i_sin * b;
            self.amps[flipped] = minus_i_sin * a + cos * b;
        }
        debug_assert!((self.norm() - 1.0).abs() < 1e-9);
        Ok(())
    }

    /// Multiplies each basis amplitude by `exp(-i·angle·hamming(basis))`.
    pub fn apply_phase_separator(&mut self, angle: f64) {
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            let weight = idx.count_ones() as f64;
            *amp *= Complex64::from_polar(1.0, -angle * weight);
        }
    }

    /// `Σ_basis |amp|² · hamming(basis)`, always within `[0, n]`.
    pub fn expectation_hamming(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(idx, a)| a.norm_sqr() * idx.count_ones() as f64)
            .sum()
    }

    /// Basis indices with probability above `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > tol)
            .map(|(idx, _)| idx)
            .collect()
    }

    /// Draws `shots` basis indices i.i.d. from `|amp|²`; deterministic per
    /// seed.
    pub fn sample(&self, shots: usize, seed: u64) -> Vec<usize> {
        let mut cumulative = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cumulative.push(acc);
        }
        let total = acc;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..shots)
            .map(|_| {
                let r = rng.gen::<f64>() * total;
                cumulative.partition_point(|&c| c <= r).min(self.amps.len() - 1)
            })
            .collect()
    }

    /// Bits of a basis index in wire order.
    pub fn bits_of_index(&self, index: usize) -> Vec<bool> {
        (0..self.n_qubits).map(|w| index >> w & 1 == 1).collect()
    }
}

/// The all-zeros (or warm-started) initial state.
pub fn initial_state(n_qubits: usize, warm: Option<&[bool]>) -> Result<StateVector, SimError> {
    StateVector::basis(n_qubits, warm)
}

/// Runs a schedule: per layer, every active mixer slot in order (first-layer
/// control sets in layer one, the wider sets afterwards), then one phase
/// separator. Parameters are consumed per layer as active mixer angles in
/// slot order followed by the phase angle. The returned state carries the
/// schedule's wire→vertex map.
pub fn simulate(
    schedule: &MixerSchedule,
    params: &[f64],
    initial: StateVector,
) -> Result<StateVector, SimError> {
    if params.len() != schedule.param_count() {
        return Err(SimError::ParamCountMismatch {
            expected: schedule.param_count(),
            got: params.len(),
        });
    }
    if initial.n_qubits() != schedule.num_wires() {
        return Err(SimError::InitialSizeMismatch {
            expected: schedule.num_wires(),
            got: initial.n_qubits(),
        });
    }
    let wire_of = |vertex: usize| -> usize {
        schedule
            .qubits
            .iter()
            .position(|&v| v == vertex)
            .expect("control vertices are scheduled")
    };

    let mut state = initial;
    let mut next = 0usize;
    for layer in 0..schedule.layers {
        for (wire, slot) in schedule.slots.iter().enumerate() {
            if !slot.active {
                continue;
            }
            let controls = if layer == 0 { &slot.controls } else { &slot.later_controls };
            let control_wires: Vec<usize> = controls.iter().map(|&v| wire_of(v)).collect();
            state.apply_partial_mixer(wire, &control_wires, params[next])?;
            next += 1;
        }
        state.apply_phase_separator(params[next]);
        next += 1;
    }
    Ok(state.with_qubit_map(schedule.qubits.clone()))
}

/// Largest amplitude-wise deviation between two states after aligning global
/// phase (each state is rotated so its largest-magnitude amplitude is real
/// and positive).
pub fn max_diff_phase_aligned(a: &StateVector, b: &StateVector) -> f64 {
    assert_eq!(a.n_qubits, b.n_qubits);
    let align = |s: &StateVector| -> Vec<Complex64> {
        let largest = s
            .amps
            .iter()
            .max_by(|x, y| x.norm_sqr().total_cmp(&y.norm_sqr()))
            .copied()
            .unwrap_or(Complex64::ONE);
        let phase = if largest.norm() > 0.0 {
            largest / largest.norm()
        } else {
            Complex64::ONE
        };
        s.amps.iter().map(|amp| amp / phase).collect()
    };
    align(a)
        .iter()
        .zip(align(b))
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_schedule, build_schedule_with_controls, ControlMode};
    use crate::graph::Graph;
    use std::collections::BTreeSet;
    use std::f64::consts::{FRAC_PI_2, PI};

    const EPS: f64 = 1e-10;

    #[test]
    fn initial_states() {
        let s = initial_state(3, None).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::ONE);
        assert_eq!(s.norm(), 1.0);

        let warm = [true, false, true];
        let s = initial_state(3, Some(&warm)).unwrap();
        assert_eq!(s.amplitudes()[0b101], Complex64::ONE);

        assert!(matches!(
            initial_state(3, Some(&[true])),
            Err(SimError::WarmLengthMismatch { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn half_pi_rotation_flips_deterministically() {
        let mut s = initial_state(1, None).unwrap();
        s.apply_partial_mixer(0, &[], FRAC_PI_2).unwrap();
        assert!((s.amplitudes()[1] - Complex64::new(0.0, -1.0)).norm() < EPS);
        assert!(s.amplitudes()[0].norm() < EPS);
        let samples = s.sample(100, 7);
        assert!(samples.iter().all(|&i| i == 1));
    }

    #[test]
    fn set_control_blocks_the_rotation() {
        // |01⟩ with wire 0 set: mixing wire 1 controlled on wire 0 is a no-op.
        let mut s = initial_state(2, Some(&[true, false])).unwrap();
        let before = s.amplitudes().to_vec();
        s.apply_partial_mixer(1, &[0], 1.234).unwrap();
        assert_eq!(s.amplitudes(), &before[..]);
    }

    #[test]
    fn zero_angle_is_identity() {
        let mut s = initial_state(3, None).unwrap();
        s.apply_partial_mixer(1, &[], FRAC_PI_2).unwrap();
        let before = s.amplitudes().to_vec();
        s.apply_partial_mixer(2, &[0], 0.0).unwrap();
        assert_eq!(s.amplitudes(), &before[..]);
    }

    #[test]
    fn opposite_angles_cancel() {
        let mut s = initial_state(4, None).unwrap();
        for (w, angle) in [(0, 0.7), (1, 1.1), (2, 0.3)] {
            s.apply_partial_mixer(w, &[], angle).unwrap();
        }
        let before = s.amplitudes().to_vec();
        s.apply_partial_mixer(3, &[0, 2], 0.9).unwrap();
        s.apply_partial_mixer(3, &[0, 2], -0.9).unwrap();
        for (a, b) in s.amplitudes().iter().zip(&before) {
            assert!((a - b).norm() < EPS);
        }
    }

    #[test]
    fn wire_errors_are_reported() {
        let mut s = initial_state(2, None).unwrap();
        assert!(matches!(
            s.apply_partial_mixer(5, &[], 0.1),
            Err(SimError::WireOutOfRange { wire: 5, .. })
        ));
        assert!(matches!(
            s.apply_partial_mixer(1, &[1], 0.1),
            Err(SimError::TargetInControls(1))
        ));
    }

    #[test]
    fn phase_separator_examples() {
        let mut s = initial_state(2, None).unwrap();
        let before = s.amplitudes().to_vec();
        s.apply_phase_separator(0.0);
        assert_eq!(s.amplitudes(), &before[..]);

        let mut s = initial_state(2, Some(&[true, true])).unwrap();
        let before = s.amplitudes().to_vec();
        s.apply_phase_separator(std::f64::consts::PI);
        // Hamming weight 2 picks up exp(-2πi) = 1.
        for (a, b) in s.amplitudes().iter().zip(&before) {
            assert!((a - b).norm() < EPS);
        }

        // Equal superposition on one qubit: |1⟩ picks up -i relative to |0⟩.
        let mut s = initial_state(1, None).unwrap();
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        s.amps = vec![amp, amp];
        s.apply_phase_separator(FRAC_PI_2);
        let ratio = s.amplitudes()[1] / s.amplitudes()[0];
        assert!((ratio - Complex64::new(0.0, -1.0)).norm() < EPS);
    }

    #[test]
    fn expectation_examples() {
        let s = initial_state(3, Some(&[true, false, true])).unwrap();
        assert_eq!(s.expectation_hamming(), 2.0);

        // Uniform superposition via explicit amplitudes.
        let mut s = initial_state(3, None).unwrap();
        let dim = s.amps.len();
        for a in &mut s.amps {
            *a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        }
        assert!((s.expectation_hamming() - 1.5).abs() < EPS);
    }

    #[test]
    fn sampling_matches_expectation_statistically() {
        let mut s = initial_state(1, None).unwrap();
        s.apply_partial_mixer(0, &[], std::f64::consts::FRAC_PI_4).unwrap();
        let p1 = s.amplitudes()[1].norm_sqr();
        let shots = 100_000;
        let ones: usize = s.sample(shots, 99).iter().sum();
        // 5σ binomial bound.
        let sigma = (shots as f64 * p1 * (1.0 - p1)).sqrt();
        assert!((ones as f64 - shots as f64 * p1).abs() < 5.0 * sigma);
    }

    #[test]
    fn uniform_single_qubit_sampling_frequency() {
        let mut s = initial_state(1, None).unwrap();
        s.apply_partial_mixer(0, &[], std::f64::consts::FRAC_PI_4).unwrap();
        // sin²(π/4) = 1/2: a uniform coin.
        let shots = 100_000;
        for seed in [1, 2, 3] {
            let ones: usize = s.sample(shots, seed).iter().sum();
            let freq = ones as f64 / shots as f64;
            assert!((0.49..=0.51).contains(&freq), "seed {seed}: {freq}");
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let mut s = initial_state(3, None).unwrap();
        for w in 0..3 {
            s.apply_partial_mixer(w, &[], 0.4 + w as f64).unwrap();
        }
        assert_eq!(s.sample(1000, 5), s.sample(1000, 5));
        assert_ne!(s.sample(1000, 5), s.sample(1000, 6));
    }

    #[test]
    fn simulate_with_zero_mixer_angles_keeps_the_initial_basis_state() {
        let g = Graph::path(5);
        let schedule =
            build_schedule(&g, &[vec![0, 1], vec![3, 4]], &[2], &BTreeSet::new(), 1).unwrap();
        let params = vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.3];
        let state = simulate(&schedule, &params, initial_state(5, None).unwrap()).unwrap();
        // Phase separator only contributes a global phase on a basis state.
        assert!((state.amplitudes()[0].norm() - 1.0).abs() < EPS);
    }

    #[test]
    fn p5_support_contains_only_independent_sets() {
        let g = Graph::path(5);
        let schedule =
            build_schedule(&g, &[vec![0, 1], vec![3, 4]], &[2], &BTreeSet::new(), 1).unwrap();
        let params = vec![FRAC_PI_2; 6];
        let state = simulate(&schedule, &params, initial_state(5, None).unwrap()).unwrap();
        for idx in state.support(1e-12) {
            let bits_by_wire = state.bits_of_index(idx);
            let mut bits = vec![false; 5];
            for (w, &v) in schedule.qubits.iter().enumerate() {
                bits[v] = bits_by_wire[w];
            }
            assert!(g.is_independent(&bits).unwrap(), "index {idx:b}");
        }
    }

    #[test]
    fn restricted_equals_full_from_all_zeros() {
        for seed in 0..6 {
            let g = crate::graph::generate::watts_strogatz(8, 2, 0.6, seed).unwrap();
            let p = crate::partition::edge_partition(&g, 2, 0.05, seed).unwrap();
            let restricted =
                build_schedule(&g, &p.parts, &p.separator, &BTreeSet::new(), 1).unwrap();
            let full = build_schedule_with_controls(
                &g,
                &p.parts,
                &p.separator,
                &BTreeSet::new(),
                1,
                ControlMode::Full,
            )
            .unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..5 {
                let params: Vec<f64> = (0..restricted.param_count())
                    .map(|_| rng.gen_range(0.0..std::f64::consts::PI))
                    .collect();
                let a = simulate(&restricted, &params, initial_state(8, None).unwrap()).unwrap();
                let b = simulate(&full, &params, initial_state(8, None).unwrap()).unwrap();
                assert!(max_diff_phase_aligned(&a, &b) < EPS, "seed {seed}");
            }
        }
    }

    #[test]
    fn two_layer_circuits_still_preserve_independence() {
        let g = Graph::path(5);
        let schedule =
            build_schedule(&g, &[vec![0, 1], vec![3, 4]], &[2], &BTreeSet::new(), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let params: Vec<f64> = (0..schedule.param_count())
                .map(|_| rng.gen_range(-PI..PI))
                .collect();
            let state = simulate(&schedule, &params, initial_state(5, None).unwrap()).unwrap();
            for idx in state.support(1e-18) {
                let mut bits = vec![false; 5];
                for (w, &v) in schedule.qubits.iter().enumerate() {
                    bits[v] = idx >> w & 1 == 1;
                }
                assert!(g.is_independent(&bits).unwrap(), "{idx:b}");
            }
        }
    }

    #[test]
    fn param_count_mismatch_is_an_error() {
        let g = Graph::path(3);
        let schedule =
            build_schedule(&g, &[vec![0, 1, 2]], &[], &BTreeSet::new(), 1).unwrap();
        assert!(matches!(
            simulate(&schedule, &[0.1], initial_state(3, None).unwrap()),
            Err(SimError::ParamCountMismatch { expected: 4, got: 1 })
        ));
    }

    #[test]
    fn norm_is_preserved_through_long_circuits() {
        let g = Graph::cycle(6);
        let schedule =
            build_schedule(&g, &[(0..6).collect()], &[], &BTreeSet::new(), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params: Vec<f64> = (0..schedule.param_count())
            .map(|_| rng.gen_range(-3.0..3.0))
            .collect();
        let state = simulate(&schedule, &params, initial_state(6, None).unwrap()).unwrap();
        assert!((state.norm() - 1.0).abs() < 1e-9);
    }
}
