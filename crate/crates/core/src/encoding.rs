//! The four-qubit logical qubit and its tensor powers.
//!
//! ```text
//! |0_L⟩ = |s⟩⊗|s⟩
//! |1_L⟩ = (|t₊⟩⊗|t₋⟩ − |t₀⟩⊗|t₀⟩ + |t₋⟩⊗|t₊⟩)/√3
//! ```
//!
//! Logical qubit `ℓ` (1-based) lives on physical qubits `4ℓ−3 ..= 4ℓ`, and
//! the first logical qubit is the most significant bit of a logical index.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{self, apply_local_amplitudes, Axis, LocalOperator, StateVector};
use crate::linalg::{ComplexMatrix, C64};
use crate::report::{Check, VerificationReport};

/// Physical qubits per logical qubit.
pub const CLUSTER_SIZE: usize = 4;

/// Largest number of logical qubits that fits the 12-qubit register.
pub const MAX_LOGICAL: usize = hilbert::MAX_QUBITS / CLUSTER_SIZE;

/// Tolerance for "normalized" logical amplitude input.
const AMPLITUDE_NORM_TOL: f64 = 1e-10;

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `(|01⟩ − |10⟩)/√2`.
pub fn singlet() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::new(2, vec![r(0.0), r(h), r(-h), r(0.0)]).expect("unit vector")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TripletComponent {
    Minus,
    Zero,
    Plus,
}

impl TripletComponent {
    pub const ALL: [TripletComponent; 3] = [Self::Minus, Self::Zero, Self::Plus];
}

/// `|t₋⟩ = |00⟩`, `|t₀⟩ = (|01⟩ + |10⟩)/√2`, `|t₊⟩ = |11⟩`.
pub fn triplet(m: TripletComponent) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = match m {
        TripletComponent::Minus => vec![r(1.0), r(0.0), r(0.0), r(0.0)],
        TripletComponent::Zero => vec![r(0.0), r(h), r(h), r(0.0)],
        TripletComponent::Plus => vec![r(0.0), r(0.0), r(0.0), r(1.0)],
    };
    StateVector::new(2, amps).expect("unit vector")
}

pub fn logical_zero() -> StateVector {
    singlet().tensor(&singlet()).expect("4 qubits")
}

pub fn logical_one() -> StateVector {
    use TripletComponent::*;
    let pm = triplet(Plus).tensor(&triplet(Minus)).expect("4 qubits");
    let zz = triplet(Zero).tensor(&triplet(Zero)).expect("4 qubits");
    let mp = triplet(Minus).tensor(&triplet(Plus)).expect("4 qubits");
    let k = 1.0 / 3f64.sqrt();
    let amps = pm
        .amplitudes()
        .iter()
        .zip(zz.amplitudes())
        .zip(mp.amplitudes())
        .map(|((a, b), c)| (a - b + c) * k)
        .collect();
    StateVector::new(4, amps).expect("unit vector")
}

/// Orthonormal encoded basis `{|x₁…x_L⟩_L}` inside `4L` physical qubits.
#[derive(Clone, Debug)]
pub struct LogicalFrame {
    num_logical: usize,
    basis: Vec<StateVector>,
}

impl LogicalFrame {
    pub fn new(num_logical: usize) -> Result<Self> {
        if num_logical == 0 || num_logical > MAX_LOGICAL {
            return Err(Error::InvalidArgument(format!(
                "logical qubit count must be in 1..={MAX_LOGICAL}, got {num_logical}"
            )));
        }
        let cluster = [logical_zero(), logical_one()];
        let basis = (0..1usize << num_logical)
            .map(|x| {
                (1..num_logical).try_fold(
                    cluster[(x >> (num_logical - 1)) & 1].clone(),
                    |acc, l| acc.tensor(&cluster[(x >> (num_logical - 1 - l)) & 1]),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { num_logical, basis })
    }

    pub fn num_logical(&self) -> usize {
        self.num_logical
    }

    pub fn num_qubits(&self) -> usize {
        CLUSTER_SIZE * self.num_logical
    }

    pub fn basis(&self) -> &[StateVector] {
        &self.basis
    }

    /// The encoded basis state with logical index `x`.
    pub fn basis_state(&self, x: usize) -> &StateVector {
        &self.basis[x]
    }

    /// `⟨x_L|amps⟩` for every logical index.
    pub fn components(&self, amps: &[C64]) -> Vec<C64> {
        self.basis
            .iter()
            .map(|b| hilbert::inner_product(b.amplitudes(), amps))
            .collect()
    }

    /// `P·amps`.
    pub fn project(&self, amps: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        for (b, c) in self.basis.iter().zip(self.components(amps)) {
            out.iter_mut().zip(b.amplitudes()).for_each(|(o, x)| *o += c * x);
        }
        out
    }

    /// `‖(I − P)·amps‖` from the explicit residual vector.
    pub fn leakage(&self, amps: &[C64]) -> f64 {
        let p = self.project(amps);
        hilbert::norm(&amps.iter().zip(&p).map(|(a, b)| a - b).collect::<Vec<_>>())
    }

    /// Dense projector `Σ_x |x_L⟩⟨x_L|`.
    pub fn projector(&self) -> Result<ComplexMatrix> {
        let dim = 1usize << self.num_qubits();
        crate::linalg::check_dim(dim)?;
        let mut p = ComplexMatrix::zeros(dim, dim);
        for b in &self.basis {
            p = &p + &ComplexMatrix::outer(b.amplitudes(), b.amplitudes());
        }
        Ok(p)
    }
}

/// Logical amplitudes plus the norm of the component outside the code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageDecomposition {
    pub logical_amplitudes: Vec<C64>,
    pub leakage_norm: f64,
}

/// `Σ_x a_x |x_L⟩`.
pub fn encode(amplitudes: &[C64], num_logical: usize) -> Result<StateVector> {
    let frame = LogicalFrame::new(num_logical)?;
    if amplitudes.len() != 1 << num_logical {
        return Err(Error::Shape(format!(
            "{} logical amplitudes for {num_logical} logical qubits",
            amplitudes.len()
        )));
    }
    let nrm = hilbert::norm(amplitudes);
    if (nrm - 1.0).abs() > AMPLITUDE_NORM_TOL {
        return Err(Error::NotNormalized { norm: nrm });
    }
    let mut out = vec![C64::new(0.0, 0.0); 1 << frame.num_qubits()];
    for (b, a) in frame.basis.iter().zip(amplitudes) {
        out.iter_mut().zip(b.amplitudes()).for_each(|(o, x)| *o += a * x);
    }
    StateVector::normalized(frame.num_qubits(), out)
}

/// Encoded state with Gaussian-random (then normalized) logical amplitudes.
pub fn random_encoded<R: Rng + ?Sized>(num_logical: usize, rng: &mut R) -> Result<StateVector> {
    let mut a = hilbert::gaussian_amplitudes(1 << num_logical, rng);
    let n = hilbert::norm(&a);
    a.iter_mut().for_each(|z| *z /= n);
    encode(&a, num_logical)
}

pub fn logical_components(s: &StateVector, frame: &LogicalFrame) -> Result<LeakageDecomposition> {
    if s.num_qubits() != frame.num_qubits() {
        return Err(Error::Shape(format!(
            "{}-qubit state against a {}-qubit frame",
            s.num_qubits(),
            frame.num_qubits()
        )));
    }
    Ok(LeakageDecomposition {
        logical_amplitudes: frame.components(s.amplitudes()),
        leakage_norm: frame.leakage(s.amplitudes()),
    })
}

/// Knill–Laflamme detection conditions for all single-qubit Paulis on the
/// four-qubit code: `⟨0_L|E|1_L⟩ = 0` and `⟨0_L|E|0_L⟩ = ⟨1_L|E|1_L⟩`.
pub fn distance2_report(tol: f64) -> Result<VerificationReport> {
    let zero = logical_zero();
    let one = logical_one();
    let mut off_diag = (0.0f64, String::new());
    let mut diag = (0.0f64, String::new());
    for q in 1..=CLUSTER_SIZE {
        for axis in Axis::ALL {
            let op = LocalOperator::pauli(axis, q)?;
            let e1 = apply_local_amplitudes(&op, one.amplitudes(), 4)?;
            let e0 = apply_local_amplitudes(&op, zero.amplitudes(), 4)?;
            let o = hilbert::inner_product(zero.amplitudes(), &e1).norm();
            let d = (hilbert::inner_product(zero.amplitudes(), &e0)
                - hilbert::inner_product(one.amplitudes(), &e1))
            .norm();
            let label = format!("σ_{axis:?} on qubit {q}").to_lowercase();
            if o >= off_diag.0 {
                off_diag = (o, label.clone());
            }
            if d >= diag.0 {
                diag = (d, label);
            }
        }
    }
    Ok(VerificationReport::new("distance2")
        .with(
            Check::at_most("off_diagonal", off_diag.0, tol)
                .with_details(format!("max |⟨0_L|E|1_L⟩| over 12 Paulis (worst: {})", off_diag.1)),
        )
        .with(
            Check::at_most("diagonal_difference", diag.0, tol).with_details(format!(
                "max |⟨0_L|E|0_L⟩ − ⟨1_L|E|1_L⟩| over 12 Paulis (worst: {})",
                diag.1
            )),
        ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collective::{check_dfs_condition, collective_residual};
    use crate::gates::{exchange, ExchangePair};
    use crate::hilbert::basis_state;
    use crate::linalg::{hermitian_expm, HermitianMatrix};

    fn amp(s: &StateVector, bits: &str) -> C64 {
        s.amplitudes()[usize::from_str_radix(bits, 2).unwrap()]
    }

    #[test]
    fn singlet_and_triplets() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(singlet().amplitudes(), &[r(0.), r(h), r(-h), r(0.)]);
        assert_eq!(triplet(TripletComponent::Minus), basis_state("00").unwrap());
        for m in TripletComponent::ALL {
            assert_eq!(singlet().inner(&triplet(m)).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn logical_zero_expansion() {
        let z = logical_zero();
        for bits in ["0101", "1010"] {
            assert!((amp(&z, bits) - r(0.5)).norm() < 1e-15);
        }
        for bits in ["0110", "1001"] {
            assert!((amp(&z, bits) - r(-0.5)).norm() < 1e-15);
        }
        let nonzero = z.amplitudes().iter().filter(|a| a.norm() > 0.0).count();
        assert_eq!(nonzero, 4);
    }

    #[test]
    fn logical_one_expansion() {
        let o = logical_one();
        let a = 1.0 / 3f64.sqrt();
        let b = -1.0 / (2.0 * 3f64.sqrt());
        for bits in ["1100", "0011"] {
            assert!((amp(&o, bits) - r(a)).norm() < 1e-15);
        }
        for bits in ["0101", "0110", "1001", "1010"] {
            assert!((amp(&o, bits) - r(b)).norm() < 1e-15);
        }
        assert_eq!(o.amplitudes().iter().filter(|a| a.norm() > 0.0).count(), 6);
        assert!(logical_zero().inner(&o).unwrap().norm() < 1e-15);
    }

    #[test]
    fn logical_states_are_spin_zero() {
        for s in [logical_zero(), logical_one()] {
            assert!(collective_residual(&s).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn encode_examples() {
        let z = encode(&[r(1.), r(0.)], 1).unwrap();
        assert!(z.distance(&logical_zero()) < 1e-15);

        let zz = encode(&[r(1.), r(0.), r(0.), r(0.)], 2).unwrap();
        let want = logical_zero().tensor(&logical_zero()).unwrap();
        assert!(zz.distance(&want) < 1e-15);
        assert!(collective_residual(&zz).unwrap() < 1e-12);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = encode(&[r(h), r(h)], 1).unwrap();
        assert!(check_dfs_condition(&[plus], 4, 1e-10).unwrap().passed);

        assert!(matches!(encode(&[r(1.), r(1.)], 1), Err(Error::NotNormalized { .. })));
        assert!(encode(&[r(1.)], 1).is_err());
        assert!(encode(&vec![r(0.); 16], 4).is_err());
    }

    #[test]
    fn frame_is_orthonormal() {
        let f = LogicalFrame::new(3).unwrap();
        for (i, a) in f.basis().iter().enumerate() {
            for (j, b) in f.basis().iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b).unwrap() - r(want)).norm() < 1e-12);
            }
        }
        // each cluster separately is annihilated by its own collective spin
        for b in f.basis() {
            for cluster in 0..3 {
                for axis in Axis::ALL {
                    let mut acc = vec![C64::new(0.0, 0.0); b.dim()];
                    for q in (4 * cluster + 1)..=(4 * cluster + 4) {
                        let op = LocalOperator::pauli(axis, q).unwrap();
                        let t = apply_local_amplitudes(&op, b.amplitudes(), 12).unwrap();
                        acc.iter_mut().zip(t).for_each(|(a, x)| *a += x);
                    }
                    assert!(hilbert::norm(&acc) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn logical_components_examples() {
        let frame = LogicalFrame::new(1).unwrap();
        let d = logical_components(&logical_one(), &frame).unwrap();
        assert!((d.logical_amplitudes[0]).norm() < 1e-15);
        assert!((d.logical_amplitudes[1] - r(1.)).norm() < 1e-15);
        assert!(d.leakage_norm < 1e-15);

        let d = logical_components(&basis_state("0000").unwrap(), &frame).unwrap();
        assert!((d.leakage_norm - 1.0).abs() < 1e-15);

        let e13 = exchange(ExchangePair::new(1, 3).unwrap(), 4).unwrap();
        let e13 = HermitianMatrix::new(crate::hilbert::embed_full(&e13, 4).unwrap()).unwrap();
        for theta in [0.1, 0.9, 2.5, -1.3] {
            let u = hermitian_expm(&e13, theta).unwrap();
            let s = logical_zero().apply_matrix(&u).unwrap();
            assert!(logical_components(&s, &frame).unwrap().leakage_norm < 1e-12);
        }
    }

    #[test]
    fn sigma_z_on_qubit_one_is_detected() {
        let z1 = LocalOperator::pauli(Axis::Z, 1).unwrap();
        let e1 = apply_local_amplitudes(&z1, logical_one().amplitudes(), 4).unwrap();
        assert!(hilbert::inner_product(logical_zero().amplitudes(), &e1).norm() < 1e-15);
    }

    #[test]
    fn distance2_passes() {
        let rep = distance2_report(1e-12).unwrap();
        assert!(rep.passed, "{rep:?}");
    }
}
