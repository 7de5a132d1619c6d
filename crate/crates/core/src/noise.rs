//! Collective rotation channels, single-qubit Pauli errors and fidelity
//! bookkeeping.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collective::{collective_factor, dfs_basis, random_rotation_vector, real_v};
use crate::encoding::LogicalFrame;
use crate::error::{Error, Result};
use crate::hilbert::{apply_local_amplitudes, fidelity, Axis, LocalOperator, StateVector};
use crate::linalg::ComplexMatrix;

/// A list of collective rotations `D(v) = e^{iv·S}`, real `v` only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollectiveChannel {
    pub samples: Vec<[f64; 3]>,
}

impl CollectiveChannel {
    pub fn new(samples: Vec<[f64; 3]>) -> Result<Self> {
        if samples.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite rotation vector".into()));
        }
        Ok(Self { samples })
    }

    /// `count` rotations drawn from stream `i` of `seed` (one stream per sample).
    pub fn sampled(count: usize, seed: u64) -> Self {
        let samples = (0..count as u64).map(|i| random_rotation_vector(&mut trial_rng(seed, i))).collect();
        Self { samples }
    }
}

pub(crate) fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub trials: usize,
    pub min_fidelity: f64,
    pub mean_fidelity: f64,
    pub max_leakage: f64,
}

/// Applies a 2×2 matrix to every qubit of `s`.
pub fn apply_factor(s: &StateVector, g: &ComplexMatrix) -> Result<StateVector> {
    let n = s.num_qubits();
    let mut amps = s.amplitudes().to_vec();
    for q in 1..=n {
        amps = apply_local_amplitudes(&LocalOperator::single(q, g.clone())?, &amps, n)?;
    }
    StateVector::normalized(n, amps)
}

/// `D(v)·s` in product form.
pub fn apply_collective(s: &StateVector, v: [f64; 3], k: usize) -> Result<StateVector> {
    if s.num_qubits() != k {
        return Err(Error::Shape(format!("{}-qubit state, {k}-qubit channel", s.num_qubits())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite rotation vector".into()));
    }
    apply_factor(s, &collective_factor(real_v(v)))
}

/// Runs `trials` random collective rotations on every state and records
/// fidelity to the input and leakage out of the spin-0 subspace.
///
/// Trial `t` draws its rotation from stream `t` of `seed`, so the result
/// does not depend on scheduling.
pub fn collective_fidelity_sweep(states: &[StateVector], trials: usize, seed: u64) -> Result<FidelityReport> {
    let Some(first) = states.first() else {
        return Err(Error::InvalidArgument("no input states".into()));
    };
    let k = first.num_qubits();
    if states.iter().any(|s| s.num_qubits() != k) {
        return Err(Error::Shape("input states differ in qubit count".into()));
    }
    if trials == 0 {
        return Ok(FidelityReport {
            trials: 0,
            min_fidelity: 1.0,
            mean_fidelity: 1.0,
            max_leakage: 0.0,
        });
    }
    let dfs = dfs_basis(k)?;
    let per_trial: Vec<(f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let v = random_rotation_vector(&mut trial_rng(seed, t as u64));
            let mut min_f = f64::INFINITY;
            let mut sum_f = 0.0;
            let mut leak = 0.0f64;
            for s in states {
                let out = apply_collective(s, v, k)?;
                let f = fidelity(s, &out)?;
                min_f = min_f.min(f);
                sum_f += f;
                // leakage added by the channel, not what the input already had
                leak = leak.max((dfs.leakage(out.amplitudes()) - dfs.leakage(s.amplitudes())).abs());
            }
            Ok((min_f, sum_f, leak))
        })
        .collect::<Result<Vec<_>>>()?;
    let count = (trials * states.len()) as f64;
    Ok(FidelityReport {
        trials,
        min_fidelity: per_trial.iter().map(|t| t.0).fold(1.0, f64::min),
        mean_fidelity: (per_trial.iter().map(|t| t.1).sum::<f64>() / count).min(1.0),
        max_leakage: per_trial.iter().map(|t| t.2).fold(0.0, f64::max),
    })
}

/// `σ_axis` on one qubit.
pub fn single_qubit_error(s: &StateVector, axis: Axis, qubit: usize) -> Result<StateVector> {
    s.apply_local(&LocalOperator::pauli(axis, qubit)?)
}

/// `‖(I−P)s‖` for the frame's code projector.
pub fn detection_statistic(s: &StateVector, frame: &LogicalFrame) -> Result<f64> {
    if s.num_qubits() != frame.num_qubits() {
        return Err(Error::Shape("state/frame register mismatch".into()));
    }
    Ok(frame.leakage(s.amplitudes()))
}

/// All single-qubit Pauli errors on `n` qubits, in (qubit, axis) order.
pub fn single_qubit_paulis(n: usize) -> Vec<(usize, Axis)> {
    (1..=n).flat_map(|q| Axis::ALL.map(|a| (q, a))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collective::collective_operators;
    use crate::encoding::{encode, logical_one, logical_zero, random_encoded};
    use crate::hilbert::{self, basis_state};
    use crate::linalg::{hermitian_expm, C64};

    #[test]
    fn identity_rotation() {
        let s = random_encoded(1, &mut trial_rng(1, 0)).unwrap();
        assert!(apply_collective(&s, [0.0; 3], 4).unwrap().distance(&s) < 1e-15);
        let p = basis_state("0110").unwrap();
        assert!(apply_collective(&p, [0.0; 3], 4).unwrap().distance(&p) < 1e-15);
    }

    #[test]
    fn encoded_states_are_immune() {
        let mut rng = trial_rng(2, 0);
        for _ in 0..20 {
            let v = random_rotation_vector(&mut rng);
            let z = logical_zero();
            let out = apply_collective(&z, v, 4).unwrap();
            assert!((fidelity(&z, &out).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_state_rotates_qubitwise() {
        let v = [0.0, 0.0, std::f64::consts::FRAC_PI_2];
        let g = collective_factor(real_v(v));
        let q = basis_state("0").unwrap().apply_matrix(&g).unwrap();
        let mut want = q.clone();
        for _ in 1..4 {
            want = want.tensor(&q).unwrap();
        }
        let got = apply_collective(&basis_state("0000").unwrap(), v, 4).unwrap();
        assert!(got.distance(&want) < 1e-15);
    }

    #[test]
    fn product_form_matches_exponential() {
        let ops = collective_operators(4).unwrap();
        let mut rng = trial_rng(3, 0);
        for _ in 0..10 {
            let v = random_rotation_vector(&mut rng);
            let s = StateVector::random(4, &mut rng).unwrap();
            let u = hermitian_expm(&ops.dot(v).unwrap(), 1.0).unwrap();
            let want = s.apply_matrix(&u).unwrap();
            assert!(apply_collective(&s, v, 4).unwrap().distance(&want) < 1e-10);
        }
    }

    #[test]
    fn channels_compose() {
        let mut rng = trial_rng(4, 0);
        for _ in 0..10 {
            let (v1, v2) = (random_rotation_vector(&mut rng), random_rotation_vector(&mut rng));
            let s = StateVector::random(4, &mut rng).unwrap();
            let twice = apply_collective(&apply_collective(&s, v1, 4).unwrap(), v2, 4).unwrap();
            let g = &collective_factor(real_v(v2)) * &collective_factor(real_v(v1));
            assert!(apply_factor(&s, &g).unwrap().distance(&twice) < 1e-10);
        }
    }

    #[test]
    fn sweep_examples() {
        let mut rng = trial_rng(5, 0);
        let states: Vec<StateVector> = (0..4).map(|_| random_encoded(1, &mut rng).unwrap()).collect();
        let r = collective_fidelity_sweep(&states, 200, 9).unwrap();
        assert!(r.min_fidelity >= 1.0 - 1e-12);
        assert!(r.max_leakage <= 1e-12);
        assert!(r.min_fidelity <= r.mean_fidelity);

        let r = collective_fidelity_sweep(&[basis_state("0000").unwrap()], 200, 9).unwrap();
        assert!(r.min_fidelity < 0.99);

        let r = collective_fidelity_sweep(&states, 0, 9).unwrap();
        assert_eq!((r.trials, r.min_fidelity, r.mean_fidelity, r.max_leakage), (0, 1.0, 1.0, 0.0));

        let a = collective_fidelity_sweep(&states, 7, 11).unwrap();
        let b = collective_fidelity_sweep(&states, 7, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn detection_statistic_matches_projector() {
        let frame = LogicalFrame::new(1).unwrap();
        let p = frame.projector().unwrap();
        let residual = &ComplexMatrix::identity(16) - &p;
        let z = logical_zero();
        assert!(detection_statistic(&z, &frame).unwrap() < 1e-14);

        let plus = encode(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)], 1).unwrap();
        for s in [z, logical_one(), plus] {
            for (q, axis) in single_qubit_paulis(4) {
                let e = single_qubit_error(&s, axis, q).unwrap();
                let oracle = hilbert::norm(&residual.mul_vec(e.amplitudes()));
                assert!((detection_statistic(&e, &frame).unwrap() - oracle).abs() < 1e-12);
                assert!(oracle > 0.1, "error {axis:?}{q} left no syndrome");
            }
            let v = [0.3, -1.2, 0.4];
            let rotated = apply_collective(&s, v, 4).unwrap();
            assert!(detection_statistic(&rotated, &frame).unwrap() < 1e-12);
        }
    }
}
