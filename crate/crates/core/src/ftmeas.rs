//! Fault-tolerant readout of the encoded `Z̄`.
//!
//! Destructive readout measures `σ_z` on qubits 1, 2 and `σ_x` on qubits 3,
//! 4 of a cluster; the sixteen possible patterns split cleanly between
//! `|0_L⟩` and `|1_L⟩`. The nondestructive version copies `Z̄` onto a fresh
//! `|0_L⟩` ancilla with the encoded CNOT, reads the ancilla destructively,
//! and repeats; the rounds are majority-voted.

use std::sync::OnceLock;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::{logical_one, logical_zero, singlet, triplet, TripletComponent, CLUSTER_SIZE};
use crate::error::{Error, Result};
use crate::gates::{encoded_cnot, encoded_not};
use crate::hilbert::{self, apply_local_amplitudes, fidelity, measure_pauli, Axis, LocalOperator, StateVector};
use crate::linalg::{ComplexMatrix, C64};
use crate::noise::trial_rng;
use crate::report::{Check, VerificationReport};

/// The destructive measurement sequence, on cluster-relative qubits 1..4.
pub const MEASUREMENT_AXES: [Axis; 4] = [Axis::Z, Axis::Z, Axis::X, Axis::X];

/// Overlap above which two patterns count as shared between `|0_L⟩` and `|1_L⟩`.
pub const OVERLAP_TOL: f64 = 1e-12;

/// Pattern index: bit `k` is set when measurement `k` returned −1.
pub fn pattern_index(outcomes: &[i8; 4]) -> usize {
    outcomes
        .iter()
        .enumerate()
        .filter(|(_, &o)| o < 0)
        .map(|(k, _)| 1usize << k)
        .sum()
}

pub fn pattern_outcomes(index: usize) -> [i8; 4] {
    std::array::from_fn(|k| if index >> k & 1 == 1 { -1 } else { 1 })
}

/// Pattern → logical bit, with the exact pattern distributions of the two
/// code states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierTable {
    pub bits: [u8; 16],
    pub p_zero: [f64; 16],
    pub p_one: [f64; 16],
}

impl ClassifierTable {
    pub fn classify(&self, outcomes: &[i8; 4]) -> u8 {
        self.bits[pattern_index(outcomes)]
    }

    /// `Σ_pattern min(P₀, P₁)`.
    pub fn overlap(&self) -> f64 {
        self.p_zero.iter().zip(&self.p_one).map(|(a, b)| a.min(*b)).sum()
    }
}

fn projector(axis: Axis, outcome: i8) -> ComplexMatrix {
    let sign = C64::new(f64::from(outcome), 0.0);
    (&ComplexMatrix::identity(2) + &axis.matrix().scale(sign)).scale(C64::new(0.5, 0.0))
}

/// `Π_pattern` applied to the cluster starting at `offset + 1`.
fn project_pattern(amps: &[C64], n: usize, offset: usize, pattern: usize) -> Result<Vec<C64>> {
    let outcomes = pattern_outcomes(pattern);
    let mut v = amps.to_vec();
    for (k, axis) in MEASUREMENT_AXES.iter().enumerate() {
        let op = LocalOperator::single(offset + k + 1, projector(*axis, outcomes[k]))?;
        v = apply_local_amplitudes(&op, &v, n)?;
    }
    Ok(v)
}

/// Exact distribution of the sixteen patterns on the cluster at `offset`.
pub fn pattern_distribution(s: &StateVector, offset: usize) -> Result<[f64; 16]> {
    let mut p = [0.0; 16];
    for (pattern, slot) in p.iter_mut().enumerate() {
        *slot = hilbert::norm(&project_pattern(s.amplitudes(), s.num_qubits(), offset, pattern)?).powi(2);
    }
    Ok(p)
}

/// Builds the classifier from the projector arithmetic on `|0_L⟩`, `|1_L⟩`.
/// Patterns impossible for both map to 0.
pub fn build_classifier() -> Result<ClassifierTable> {
    let p_zero = pattern_distribution(&logical_zero(), 0)?;
    let p_one = pattern_distribution(&logical_one(), 0)?;
    let mut bits = [0u8; 16];
    for pattern in 0..16 {
        let overlap = p_zero[pattern].min(p_one[pattern]);
        if overlap > OVERLAP_TOL {
            return Err(Error::ClassifierOverlap { pattern, overlap });
        }
        bits[pattern] = u8::from(p_one[pattern] > p_zero[pattern]);
    }
    Ok(ClassifierTable { bits, p_zero, p_one })
}

static CLASSIFIER: OnceLock<ClassifierTable> = OnceLock::new();

pub fn classifier() -> Result<&'static ClassifierTable> {
    if let Some(t) = CLASSIFIER.get() {
        return Ok(t);
    }
    let built = build_classifier()?;
    Ok(CLASSIFIER.get_or_init(|| built))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DestructiveOutcome {
    pub bit: u8,
    pub outcomes: [i8; 4],
    /// Born probability of each outcome given the earlier ones.
    pub probabilities: [f64; 4],
}

/// Measures the cluster at `offset` of `s`; returns the outcome and the
/// collapsed full state.
fn measure_cluster<R: Rng + ?Sized>(
    s: &StateVector,
    offset: usize,
    table: &ClassifierTable,
    rng: &mut R,
) -> Result<(DestructiveOutcome, StateVector)> {
    let mut state = s.clone();
    let mut outcomes = [0i8; 4];
    let mut probabilities = [0.0; 4];
    for (k, axis) in MEASUREMENT_AXES.iter().enumerate() {
        let m = measure_pauli(&state, *axis, offset + k + 1, rng)?;
        outcomes[k] = m.outcome;
        probabilities[k] = m.prob;
        state = m.post;
    }
    let bit = table.classify(&outcomes);
    Ok((DestructiveOutcome { bit, outcomes, probabilities }, state))
}

/// Destructive readout of a four-qubit encoded state.
pub fn destructive_measure<R: Rng + ?Sized>(
    s: &StateVector,
    table: &ClassifierTable,
    rng: &mut R,
) -> Result<DestructiveOutcome> {
    if s.num_qubits() != CLUSTER_SIZE {
        return Err(Error::Shape(format!("destructive readout needs 4 qubits, got {}", s.num_qubits())));
    }
    Ok(measure_cluster(s, 0, table, rng)?.0)
}

pub fn majority_vote(bits: &[u8]) -> Result<u8> {
    if bits.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "majority vote needs an odd number of bits, got {}",
            bits.len()
        )));
    }
    let ones = bits.iter().filter(|&&b| b != 0).count();
    Ok(u8::from(2 * ones > bits.len()))
}

/// `Z̄` eigenvalue of a logical bit: +1 for 0, −1 for 1.
pub fn zbar_eigenvalue(bit: u8) -> i8 {
    if bit == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    /// `Z̄` outcome (±1) of every round.
    pub outcomes: Vec<i8>,
    /// Whether each round's ancilla was prepared faulty.
    pub faulty_ancilla: Vec<bool>,
    pub voted: i8,
    pub voted_bit: u8,
    pub post_state: StateVector,
    pub seed: u64,
    pub stream: u64,
    pub rounds: usize,
}

fn check_protocol_args(rounds: usize, p: f64) -> Result<()> {
    if rounds == 0 || rounds.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("rounds must be odd and ≥ 1, got {rounds}")));
    }
    if !(0.0..0.5).contains(&p) {
        return Err(Error::InvalidArgument(format!("ancilla error probability must be in [0, 1/2), got {p}")));
    }
    Ok(())
}

static FLIPPED_ANCILLA: OnceLock<StateVector> = OnceLock::new();

/// `X̄|0_L⟩`, via the exchange-compiled `X̄`.
fn flipped_ancilla() -> Result<&'static StateVector> {
    if let Some(s) = FLIPPED_ANCILLA.get() {
        return Ok(s);
    }
    let built = encoded_not()?.schedule.apply(&logical_zero())?;
    Ok(FLIPPED_ANCILLA.get_or_init(|| built))
}

fn ancilla(faulty: bool) -> Result<StateVector> {
    Ok(if faulty { flipped_ancilla()?.clone() } else { logical_zero() })
}

/// `⟨e₅e₆e₇e₈| post⟩` where the `e`'s are the measured ancilla eigenvectors.
fn contract_ancilla(post: &[C64], outcomes: &[i8; 4]) -> Vec<C64> {
    let vecs: Vec<[C64; 2]> = MEASUREMENT_AXES
        .iter()
        .zip(outcomes)
        .map(|(a, &o)| a.eigenvector(o))
        .collect();
    let anc: Vec<C64> = (0..16)
        .map(|a| (0..4).map(|k| vecs[k][(a >> (3 - k)) & 1]).product())
        .collect();
    (0..16)
        .map(|x| (0..16).map(|a| anc[a].conj() * post[x * 16 + a]).sum())
        .collect()
}

/// One round: CNOT onto a fresh ancilla, destructive readout of the ancilla.
fn zbar_round<R: Rng + ?Sized>(
    data: &StateVector,
    faulty: bool,
    table: &ClassifierTable,
    rng: &mut R,
) -> Result<(u8, StateVector)> {
    let joint = data.tensor(&ancilla(faulty)?)?;
    let after = joint.apply_matrix(&encoded_cnot()?.unitary)?;
    let (out, post) = measure_cluster(&after, CLUSTER_SIZE, table, rng)?;
    let data = StateVector::normalized(CLUSTER_SIZE, contract_ancilla(post.amplitudes(), &out.outcomes))?;
    Ok((out.bit, data))
}

/// Repeated nondestructive `Z̄` readout with majority voting. Each ancilla
/// is independently replaced by `X̄|0_L⟩` with probability `p`. Randomness
/// comes from stream `stream` of `seed`.
pub fn nondestructive_zbar(data: &StateVector, rounds: usize, p: f64, seed: u64, stream: u64) -> Result<MeasurementRecord> {
    let mut rng = trial_rng(seed, stream);
    nondestructive_zbar_with(data, rounds, p, &mut rng, seed, stream)
}

fn nondestructive_zbar_with(
    data: &StateVector,
    rounds: usize,
    p: f64,
    rng: &mut ChaCha8Rng,
    seed: u64,
    stream: u64,
) -> Result<MeasurementRecord> {
    check_protocol_args(rounds, p)?;
    if data.num_qubits() != CLUSTER_SIZE {
        return Err(Error::Shape(format!("data must be 4 qubits, got {}", data.num_qubits())));
    }
    let table = classifier()?;
    let mut state = data.clone();
    let mut bits = Vec::with_capacity(rounds);
    let mut faulty_ancilla = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let faulty = p > 0.0 && rng.random::<f64>() < p;
        let (bit, next) = zbar_round(&state, faulty, table, rng)?;
        bits.push(bit);
        faulty_ancilla.push(faulty);
        state = next;
    }
    let voted_bit = majority_vote(&bits)?;
    Ok(MeasurementRecord {
        outcomes: bits.iter().map(|&b| zbar_eigenvalue(b)).collect(),
        faulty_ancilla,
        voted: zbar_eigenvalue(voted_bit),
        voted_bit,
        post_state: state,
        seed,
        stream,
        rounds,
    })
}

/// Kraus operators of one readout round on the data cluster, one per
/// (ancilla preparation, readout pattern), with the preparation weight folded in.
fn round_kraus(p: f64) -> Result<Vec<(u8, ComplexMatrix)>> {
    let cnot = &encoded_cnot()?.unitary;
    let table = classifier()?;
    let dim = 1usize << CLUSTER_SIZE;
    let mut out = Vec::new();
    for (faulty, weight) in [(false, 1.0 - p), (true, p)] {
        if weight == 0.0 {
            continue;
        }
        let anc = ancilla(faulty)?;
        let after: Vec<Vec<C64>> = (0..dim)
            .map(|x| {
                let mut e = vec![C64::new(0.0, 0.0); dim];
                e[x] = C64::new(1.0, 0.0);
                cnot.mul_vec(&kron_amps(&e, anc.amplitudes()))
            })
            .collect();
        for pattern in 0..16 {
            let outcomes = pattern_outcomes(pattern);
            let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
            for (x, col) in after.iter().enumerate() {
                let proj = project_pattern(col, 2 * CLUSTER_SIZE, CLUSTER_SIZE, pattern)?;
                for (r, z) in contract_ancilla(&proj, &outcomes).into_iter().enumerate() {
                    entries[r * dim + x] = z * weight.sqrt();
                }
            }
            let k = ComplexMatrix::from_row_major(dim, dim, entries)?;
            if k.max_abs() > 1e-14 {
                out.push((table.bits[pattern], k));
            }
        }
    }
    Ok(out)
}

/// Exact probabilities of voted bit 0 and 1, summed over every ancilla
/// preparation and readout pattern. Branches with the same count of 1
/// readouts are merged into one unnormalized density matrix.
pub fn exact_vote_distribution(data: &StateVector, rounds: usize, p: f64) -> Result<[f64; 2]> {
    check_protocol_args(rounds, p)?;
    if data.num_qubits() != CLUSTER_SIZE {
        return Err(Error::Shape(format!("data must be 4 qubits, got {}", data.num_qubits())));
    }
    let kraus = round_kraus(p)?;
    let dim = data.dim();
    let mut by_ones = vec![ComplexMatrix::zeros(dim, dim); rounds + 1];
    by_ones[0] = ComplexMatrix::outer(data.amplitudes(), data.amplitudes());
    for round in 0..rounds {
        let mut next = vec![ComplexMatrix::zeros(dim, dim); rounds + 1];
        for (ones, rho) in by_ones.iter().enumerate().take(round + 1) {
            for (bit, k) in &kraus {
                let term = &(k * rho) * &k.adjoint();
                let slot = &mut next[ones + usize::from(*bit)];
                *slot = &*slot + &term;
            }
        }
        by_ones = next;
    }
    let mut dist = [0.0; 2];
    for (ones, rho) in by_ones.iter().enumerate() {
        dist[usize::from(2 * ones > rounds)] += rho.trace().re;
    }
    Ok(dist)
}

fn kron_amps(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// `Σ_{k>r/2} C(r,k) p^k (1−p)^{r−k}`.
pub fn binomial_tail(rounds: usize, p: f64) -> f64 {
    (rounds / 2 + 1..=rounds)
        .map(|k| {
            let c = (0..k).fold(1.0, |acc, i| acc * (rounds - i) as f64 / (i + 1) as f64);
            c * p.powi(k as i32) * (1.0 - p).powi((rounds - k) as i32)
        })
        .sum()
}

/// Five binomial standard errors around `prob` for `shots` trials.
pub fn five_sigma(prob: f64, shots: usize) -> f64 {
    let p = prob.clamp(0.0, 1.0);
    5.0 * (p * (1.0 - p) / shots as f64).sqrt()
}

/// `|s⟩⊗|s⟩`, or with probability `p_fault` the first singlet replaced by a
/// uniformly chosen triplet component.
pub fn prepare_logical_zero<R: Rng + ?Sized>(p_fault: f64, rng: &mut R) -> Result<StateVector> {
    Ok(prepare_logical_zero_traced(p_fault, rng)?.0)
}

fn prepare_logical_zero_traced<R: Rng + ?Sized>(
    p_fault: f64,
    rng: &mut R,
) -> Result<(StateVector, Option<TripletComponent>)> {
    if !(0.0..=1.0).contains(&p_fault) {
        return Err(Error::InvalidArgument(format!("fault probability {p_fault} outside [0, 1]")));
    }
    if p_fault > 0.0 && rng.random::<f64>() < p_fault {
        let m = TripletComponent::ALL[rng.random_range(0..3)];
        return Ok((triplet(m).tensor(&singlet())?, Some(m)));
    }
    Ok((logical_zero(), None))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreparationVerdict {
    pub accepted: bool,
    pub fidelity_to_zero: f64,
    pub record: MeasurementRecord,
}

/// Runs the nondestructive readout on a prepared state and accepts iff the
/// vote is logical 0.
pub fn verify_preparation(s: &StateVector, rounds: usize, seed: u64, stream: u64) -> Result<PreparationVerdict> {
    let record = nondestructive_zbar(s, rounds, 0.0, seed, stream)?;
    Ok(PreparationVerdict {
        accepted: record.voted_bit == 0,
        fidelity_to_zero: fidelity(&record.post_state, &logical_zero())?,
        record,
    })
}

/// Exact acceptance probability of a preparation with fault rate `p_fault`.
pub fn acceptance_oracle(p_fault: f64, rounds: usize) -> Result<f64> {
    let mut acc = (1.0 - p_fault) * exact_vote_distribution(&logical_zero(), rounds, 0.0)?[0];
    for m in TripletComponent::ALL {
        let bad = triplet(m).tensor(&singlet())?;
        acc += p_fault / 3.0 * exact_vote_distribution(&bad, rounds, 0.0)?[0];
    }
    Ok(acc)
}

/// Prepares and verifies `shots` states; compares the acceptance rate with
/// the exact oracle and checks post-acceptance fidelity of fault-free shots.
pub fn verify_preparation_batch(p_fault: f64, shots: usize, rounds: usize, seed: u64) -> Result<VerificationReport> {
    if shots == 0 {
        return Err(Error::InvalidArgument("need at least one shot".into()));
    }
    let results: Vec<(bool, bool, f64)> = (0..shots as u64)
        .into_par_iter()
        .map(|shot| {
            let mut rng = trial_rng(seed, shot);
            let (s, fault) = prepare_logical_zero_traced(p_fault, &mut rng)?;
            let record = nondestructive_zbar_with(&s, rounds, 0.0, &mut rng, seed, shot)?;
            let f = fidelity(&record.post_state, &logical_zero())?;
            Ok((record.voted_bit == 0, fault.is_some(), f))
        })
        .collect::<Result<Vec<_>>>()?;
    let accepted = results.iter().filter(|r| r.0).count();
    let rate = accepted as f64 / shots as f64;
    let oracle = acceptance_oracle(p_fault, rounds)?;
    let worst_clean = results
        .iter()
        .filter(|r| r.0 && !r.1)
        .map(|r| 1.0 - r.2)
        .fold(0.0, f64::max);
    let mut report = VerificationReport::new("preparation");
    report.push(
        Check::at_most("acceptance_rate", (rate - oracle).abs(), five_sigma(oracle, shots).max(1e-12))
            .with_details(format!("{accepted}/{shots} accepted, oracle {oracle:.6}")),
    );
    report.push(Check::at_most("clean_post_infidelity", worst_clean, 1e-9));
    Ok(report)
}

/// One CSV row per shot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotRow {
    pub shot: u64,
    pub seed: u64,
    pub outcomes: String,
    pub voted_bit: u8,
    pub post_fidelity: f64,
}

impl ShotRow {
    pub fn new(record: &MeasurementRecord, reference: &StateVector) -> Result<Self> {
        let outcomes = record
            .outcomes
            .iter()
            .map(|o| format!("{o:+}"))
            .collect::<Vec<_>>()
            .join(";");
        Ok(Self {
            shot: record.stream,
            seed: record.seed,
            outcomes,
            voted_bit: record.voted_bit,
            post_fidelity: fidelity(&record.post_state, reference)?,
        })
    }
}

/// Runs `shots` independent protocol runs (shot `i` uses stream `i`).
pub fn run_shots(data: &StateVector, shots: usize, rounds: usize, p: f64, seed: u64) -> Result<Vec<MeasurementRecord>> {
    check_protocol_args(rounds, p)?;
    (0..shots as u64)
        .into_par_iter()
        .map(|shot| nondestructive_zbar(data, rounds, p, seed, shot))
        .collect()
}

/// Total-variation distance between the ancilla readout distributions with
/// and without a collective rotation `v` on all eight qubits before the CNOT.
pub fn collective_tolerance_tv(data: &StateVector, v: [f64; 3]) -> Result<f64> {
    let joint = data.tensor(&logical_zero())?;
    let cnot = &encoded_cnot()?.unitary;
    let plain = pattern_distribution(&joint.apply_matrix(cnot)?, CLUSTER_SIZE)?;
    let rotated = crate::noise::apply_collective(&joint, v, 2 * CLUSTER_SIZE)?;
    let noisy = pattern_distribution(&rotated.apply_matrix(cnot)?, CLUSTER_SIZE)?;
    Ok(0.5 * plain.iter().zip(&noisy).map(|(a, b)| (a - b).abs()).sum::<f64>())
}
