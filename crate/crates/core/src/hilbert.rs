//! Multi-qubit pure states and local operators.
//!
//! Basis indices are big-endian: qubit 1 is the most significant bit, i.e.
//! the leftmost tensor factor, so `|x⟩₁|y⟩₂` has index `2x + y`. Qubit
//! indices in public APIs are 1-based.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_dim, kron, paulis, ComplexMatrix, C64};

/// Largest supported register.
pub const MAX_QUBITS: usize = 12;

/// Norm tolerance for states handed to [`StateVector::new`].
pub const NORM_TOL: f64 = 1e-12;

/// Tolerance used when an operation is expected to preserve the norm.
const NORM_PRESERVE_TOL: f64 = 1e-10;

/// Pauli measurement / error axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Axis::X => paulis::sigma_x(),
            Axis::Y => paulis::sigma_y(),
            Axis::Z => paulis::sigma_z(),
        }
    }

    /// The ±1 eigenvector of this Pauli on one qubit.
    pub fn eigenvector(self, outcome: i8) -> [C64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = if outcome >= 0 { 1.0 } else { -1.0 };
        match self {
            Axis::Z if outcome >= 0 => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            Axis::Z => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            Axis::X => [C64::new(h, 0.0), C64::new(s * h, 0.0)],
            Axis::Y => [C64::new(h, 0.0), C64::new(0.0, s * h)],
        }
    }
}

/// A normalized pure state on `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState")]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

#[derive(Deserialize)]
struct RawState {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl TryFrom<RawState> for StateVector {
    type Error = Error;
    fn try_from(raw: RawState) -> Result<Self> {
        StateVector::new(raw.num_qubits, raw.amplitudes)
    }
}

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "qubit count must be in 1..={MAX_QUBITS}, got {n}"
        )));
    }
    Ok(())
}

fn check_amplitudes(n: usize, amplitudes: &[C64]) -> Result<()> {
    check_qubit_count(n)?;
    if amplitudes.len() != 1 << n {
        return Err(Error::Shape(format!(
            "{} amplitudes for {n} qubits",
            amplitudes.len()
        )));
    }
    if let Some(idx) = amplitudes.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { row: idx, col: 0 });
    }
    Ok(())
}

/// `len` i.i.d. standard complex Gaussian amplitudes (unnormalized).
pub fn gaussian_amplitudes<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<C64> {
    (0..len)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub(crate) fn norm(amplitudes: &[C64]) -> f64 {
    amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner_product(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

impl StateVector {
    /// Accepts amplitudes already normalized to within `1e-12`.
    pub fn new(num_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_amplitudes(num_qubits, &amplitudes)?;
        let nrm = norm(&amplitudes);
        if (nrm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm: nrm });
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(num_qubits: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        check_amplitudes(num_qubits, &amplitudes)?;
        let nrm = norm(&amplitudes);
        if nrm < 1e-300 {
            return Err(Error::NotNormalized { norm: nrm });
        }
        amplitudes.iter_mut().for_each(|z| *z /= nrm);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// For amplitudes produced by a norm-preserving operation: renormalizes
    /// away rounding, but rejects a genuine norm change.
    pub(crate) fn from_evolved(num_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let nrm = norm(&amplitudes);
        if (nrm - 1.0).abs() > NORM_PRESERVE_TOL {
            return Err(Error::NotNormalized { norm: nrm });
        }
        Self::normalized(num_qubits, amplitudes)
    }

    /// `|0…0⟩`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes: amps,
        })
    }

    /// A random state with i.i.d. complex Gaussian amplitudes (Haar-distributed).
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        Self::normalized(num_qubits, gaussian_amplitudes(1 << num_qubits, rng))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Shape(format!(
                "inner product of {}- and {}-qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(inner_product(&self.amplitudes, &other.amplitudes))
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.num_qubits + other.num_qubits;
        check_qubit_count(n)?;
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Self {
            num_qubits: n,
            amplitudes: amps,
        })
    }

    pub fn with_global_phase(&self, phi: f64) -> StateVector {
        let w = C64::from_polar(1.0, phi);
        Self {
            num_qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|z| z * w).collect(),
        }
    }

    /// Applies a unitary on `support`; errors if the norm is not preserved.
    pub fn apply_local(&self, op: &LocalOperator) -> Result<StateVector> {
        apply_local(op, self)
    }

    /// Applies a full `2^n × 2^n` unitary; errors if the norm is not preserved.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<StateVector> {
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::Shape(format!(
                "{}x{} operator on a {}-dim state",
                m.rows(),
                m.cols(),
                self.dim()
            )));
        }
        Self::from_evolved(self.num_qubits, m.mul_vec(&self.amplitudes))
    }

    /// Euclidean distance between amplitude vectors (phase sensitive).
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Computational basis state from a bitstring such as `"0110"`.
pub fn basis_state(bits: &str) -> Result<StateVector> {
    let n = bits.len();
    check_qubit_count(n)?;
    let mut index = 0usize;
    for ch in bits.chars() {
        index = (index << 1)
            | match ch {
                '0' => 0,
                '1' => 1,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "bitstring contains {other:?}"
                    )))
                }
            };
    }
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    amps[index] = C64::new(1.0, 0.0);
    StateVector::new(n, amps)
}

/// An operator acting on an ordered list of qubits.
///
/// `support[0]` is the leftmost tensor factor of `matrix`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator {
    support: Vec<usize>,
    matrix: ComplexMatrix,
}

impl LocalOperator {
    pub fn new(support: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidArgument("empty operator support".into()));
        }
        if support.contains(&0) {
            return Err(Error::QubitIndex {
                index: 0,
                num_qubits: MAX_QUBITS,
            });
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != support.len() {
            return Err(Error::InvalidArgument(format!(
                "repeated qubit in support {support:?}"
            )));
        }
        let dim = 1usize << support.len();
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::Shape(format!(
                "{}x{} matrix for a {}-qubit support",
                matrix.rows(),
                matrix.cols(),
                support.len()
            )));
        }
        Ok(Self { support, matrix })
    }

    pub fn single(qubit: usize, matrix: ComplexMatrix) -> Result<Self> {
        Self::new(vec![qubit], matrix)
    }

    pub fn pauli(axis: Axis, qubit: usize) -> Result<Self> {
        Self::single(qubit, axis.matrix())
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    fn check_support(&self, n: usize) -> Result<()> {
        match self.support.iter().find(|&&q| q > n) {
            Some(&q) => Err(Error::QubitIndex {
                index: q,
                num_qubits: n,
            }),
            None => Ok(()),
        }
    }
}

/// `op` applied to raw amplitudes of an `n`-qubit register, contracting only
/// over the support axes. No normalization is assumed or imposed.
pub fn apply_local_amplitudes(op: &LocalOperator, amps: &[C64], n: usize) -> Result<Vec<C64>> {
    op.check_support(n)?;
    if amps.len() != 1 << n {
        return Err(Error::Shape(format!("{} amplitudes for {n} qubits", amps.len())));
    }
    let m = op.support.len();
    let local_dim = 1usize << m;
    // bit offset in the global index for each local basis index
    let offsets: Vec<usize> = (0..local_dim)
        .map(|a| {
            op.support
                .iter()
                .enumerate()
                .filter(|(k, _)| (a >> (m - 1 - k)) & 1 == 1)
                .map(|(_, &q)| 1usize << (n - q))
                .sum()
        })
        .collect();
    let mask: usize = op.support.iter().map(|&q| 1usize << (n - q)).sum();
    let mat = op.matrix.as_dmatrix();
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    let mut gathered = vec![C64::new(0.0, 0.0); local_dim];
    for base in (0..amps.len()).filter(|b| b & mask == 0) {
        for (g, &off) in gathered.iter_mut().zip(&offsets) {
            *g = amps[base + off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (c, g) in gathered.iter().enumerate() {
                acc += mat[(r, c)] * g;
            }
            out[base + off] = acc;
        }
    }
    Ok(out)
}

/// Applies a unitary local operator to a state.
pub fn apply_local(op: &LocalOperator, s: &StateVector) -> Result<StateVector> {
    let out = apply_local_amplitudes(op, &s.amplitudes, s.num_qubits)?;
    StateVector::from_evolved(s.num_qubits, out)
}

/// The full `2^n × 2^n` matrix of `op`, built as `op ⊗ I` followed by a
/// basis permutation. Independent of [`apply_local_amplitudes`].
pub fn embed_full(op: &LocalOperator, n: usize) -> Result<ComplexMatrix> {
    op.check_support(n)?;
    check_dim(1usize << n)?;
    let m = op.support.len();
    let rest: Vec<usize> = (1..=n).filter(|q| !op.support.contains(q)).collect();
    let padded = kron(op.matrix(), &ComplexMatrix::identity(1 << (n - m)))?;
    // order[k] = physical qubit sitting at tensor position k of `padded`
    let order: Vec<usize> = op.support.iter().chain(rest.iter()).copied().collect();
    let permute = |x: usize| -> usize {
        order.iter().enumerate().fold(0usize, |acc, (k, &q)| {
            let bit = (x >> (n - q)) & 1;
            acc | (bit << (n - 1 - k))
        })
    };
    let dim = 1usize << n;
    let perm: Vec<usize> = (0..dim).map(permute).collect();
    let pm = padded.as_dmatrix();
    let full = nalgebra::DMatrix::from_fn(dim, dim, |r, c| pm[(perm[r], perm[c])]);
    Ok(ComplexMatrix::from_dmatrix_unchecked(full))
}

/// Outcome of a projective single-qubit Pauli measurement.
#[derive(Clone, Debug)]
pub struct PauliMeasurement {
    pub outcome: i8,
    pub post: StateVector,
    pub prob: f64,
}

fn projector(axis: Axis, qubit: usize, outcome: i8) -> Result<LocalOperator> {
    let sign = if outcome >= 0 { 1.0 } else { -1.0 };
    let p = (&ComplexMatrix::identity(2) + &axis.matrix().scale(C64::new(sign, 0.0)))
        .scale(C64::new(0.5, 0.0));
    LocalOperator::single(qubit, p)
}

/// Probability of `outcome` (±1) and the normalized post-measurement state,
/// if that branch has nonzero weight.
pub fn project_pauli(
    s: &StateVector,
    axis: Axis,
    qubit: usize,
    outcome: i8,
) -> Result<(f64, Option<StateVector>)> {
    let proj = projector(axis, qubit, outcome)?;
    let v = apply_local_amplitudes(&proj, &s.amplitudes, s.num_qubits)?;
    let p = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let post = if p > 1e-28 {
        Some(StateVector::normalized(s.num_qubits, v)?)
    } else {
        None
    };
    Ok((p.min(1.0), post))
}

/// Born-rule measurement of `σ_axis` on `qubit`.
pub fn measure_pauli<R: Rng + ?Sized>(
    s: &StateVector,
    axis: Axis,
    qubit: usize,
    rng: &mut R,
) -> Result<PauliMeasurement> {
    let (p_plus, post_plus) = project_pauli(s, axis, qubit, 1)?;
    let u: f64 = rng.random();
    let take_plus = match post_plus {
        None => false,
        Some(_) if p_plus >= 1.0 - 1e-14 => true,
        Some(_) => u < p_plus,
    };
    if take_plus {
        return Ok(PauliMeasurement {
            outcome: 1,
            post: post_plus.expect("branch with weight"),
            prob: p_plus,
        });
    }
    let (p_minus, post_minus) = project_pauli(s, axis, qubit, -1)?;
    let post = post_minus.ok_or(Error::Numeric {
        what: "measurement branch",
        residual: p_minus,
    })?;
    Ok(PauliMeasurement {
        outcome: -1,
        post,
        prob: p_minus,
    })
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}
