//! Exchange operators and pulse schedules built from them.
//!
//! A pulse `(i, j, φ)` switches on the exchange Hamiltonian `E_ij` and
//! applies `exp(−iφ E_ij) = cos φ I − i sin φ E_ij`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{apply_local_amplitudes, embed_full, Axis, LocalOperator, StateVector};
use crate::linalg::{paulis, ComplexMatrix, HermitianMatrix, C64};

/// An unordered pair of distinct physical qubits (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPair")]
pub struct ExchangePair {
    i: usize,
    j: usize,
}

#[derive(Deserialize)]
struct RawPair {
    i: usize,
    j: usize,
}

impl TryFrom<RawPair> for ExchangePair {
    type Error = Error;
    fn try_from(raw: RawPair) -> Result<Self> {
        ExchangePair::new(raw.i, raw.j)
    }
}

impl ExchangePair {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i == j || i == 0 || j == 0 {
            return Err(Error::InvalidArgument(format!(
                "exchange pair needs distinct 1-based qubits, got ({i}, {j})"
            )));
        }
        Ok(Self { i, j })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    fn check(&self, n: usize) -> Result<()> {
        let hi = self.i.max(self.j);
        if hi > n {
            return Err(Error::QubitIndex {
                index: hi,
                num_qubits: n,
            });
        }
        Ok(())
    }
}

/// `E_ij` as a two-qubit SWAP on the pair.
pub fn exchange(pair: ExchangePair, n: usize) -> Result<LocalOperator> {
    pair.check(n)?;
    LocalOperator::new(vec![pair.i, pair.j], paulis::swap())
}

/// `½(I + σ_x⊗σ_x + σ_y⊗σ_y + σ_z⊗σ_z)` on the pair.
pub fn exchange_from_heisenberg(pair: ExchangePair, n: usize) -> Result<LocalOperator> {
    pair.check(n)?;
    let mut acc = ComplexMatrix::identity(4);
    for axis in Axis::ALL {
        let m = axis.matrix();
        acc = &acc + &crate::linalg::kron(&m, &m)?;
    }
    LocalOperator::new(vec![pair.i, pair.j], acc.scale(C64::new(0.5, 0.0)))
}

/// `E_ij` embedded in the full `n`-qubit space.
pub fn exchange_hamiltonian(i: usize, j: usize, n: usize) -> Result<HermitianMatrix> {
    HermitianMatrix::new(embed_full(&exchange(ExchangePair::new(i, j)?, n)?, n)?)
}

/// `exp(−iφ E)` on the pair's two qubits.
pub fn exchange_pulse(pair: ExchangePair, angle: f64) -> Result<LocalOperator> {
    let m = &ComplexMatrix::identity(4).scale(C64::new(angle.cos(), 0.0))
        + &paulis::swap().scale(C64::new(0.0, -angle.sin()));
    LocalOperator::new(vec![pair.i, pair.j], m)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    #[serde(flatten)]
    pub pair: ExchangePair,
    pub angle: f64,
}

/// An ordered (time-ordered) list of exchange pulses on `num_qubits` qubits.
///
/// JSON form: `{"num_qubits": n, "pulses": [{"i": .., "j": .., "angle": ..}, ..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule")]
pub struct PulseSchedule {
    num_qubits: usize,
    pulses: Vec<Pulse>,
}

#[derive(Deserialize)]
struct RawSchedule {
    num_qubits: usize,
    pulses: Vec<Pulse>,
}

impl TryFrom<RawSchedule> for PulseSchedule {
    type Error = Error;
    fn try_from(raw: RawSchedule) -> Result<Self> {
        let mut s = PulseSchedule::new(raw.num_qubits)?;
        for p in raw.pulses {
            s.push(p.pair, p.angle)?;
        }
        Ok(s)
    }
}

impl PulseSchedule {
    pub fn new(num_qubits: usize) -> Result<Self> {
        if !(2..=crate::hilbert::MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::InvalidArgument(format!(
                "schedule register must have 2..={} qubits, got {num_qubits}",
                crate::hilbert::MAX_QUBITS
            )));
        }
        Ok(Self {
            num_qubits,
            pulses: Vec::new(),
        })
    }

    pub fn push(&mut self, pair: ExchangePair, angle: f64) -> Result<()> {
        pair.check(self.num_qubits)?;
        if !angle.is_finite() {
            return Err(Error::InvalidArgument(format!("pulse angle {angle}")));
        }
        self.pulses.push(Pulse { pair, angle });
        Ok(())
    }

    /// Appends all pulses of `other` (same register).
    pub fn extend(&mut self, other: &PulseSchedule) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::Shape("concatenating schedules on different registers".into()));
        }
        self.pulses.extend_from_slice(&other.pulses);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    fn apply_amplitudes(&self, mut amps: Vec<C64>) -> Result<Vec<C64>> {
        for p in &self.pulses {
            amps = apply_local_amplitudes(&exchange_pulse(p.pair, p.angle)?, &amps, self.num_qubits)?;
        }
        Ok(amps)
    }

    /// Runs the whole schedule on `s`.
    pub fn apply(&self, s: &StateVector) -> Result<StateVector> {
        if s.num_qubits() != self.num_qubits {
            return Err(Error::Shape("state/schedule register mismatch".into()));
        }
        let out = self.apply_amplitudes(s.amplitudes().to_vec())?;
        StateVector::normalized(self.num_qubits, out)
    }

    /// The schedule's full unitary.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        let dim = 1usize << self.num_qubits;
        crate::linalg::check_dim(dim)?;
        let mut cols = Vec::with_capacity(dim * dim);
        for c in 0..dim {
            let mut e = vec![C64::new(0.0, 0.0); dim];
            e[c] = C64::new(1.0, 0.0);
            cols.push(self.apply_amplitudes(e)?);
        }
        let m = nalgebra::DMatrix::from_fn(dim, dim, |r, c| cols[c][r]);
        Ok(ComplexMatrix::from_dmatrix_unchecked(m))
    }

    /// States at `samples` evenly spaced interior times of every pulse
    /// (fractions `k/(samples+1)`, `k = 1..=samples`), in time order.
    pub fn interior_states(&self, s: &StateVector, samples: usize) -> Result<Vec<StateVector>> {
        if s.num_qubits() != self.num_qubits {
            return Err(Error::Shape("state/schedule register mismatch".into()));
        }
        let mut out = Vec::with_capacity(self.pulses.len() * samples);
        let mut current = s.amplitudes().to_vec();
        for p in &self.pulses {
            for k in 1..=samples {
                let frac = k as f64 / (samples + 1) as f64;
                let partial = exchange_pulse(p.pair, p.angle * frac)?;
                let amps = apply_local_amplitudes(&partial, &current, self.num_qubits)?;
                out.push(StateVector::normalized(self.num_qubits, amps)?);
            }
            current = apply_local_amplitudes(&exchange_pulse(p.pair, p.angle)?, &current, self.num_qubits)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{singlet, triplet, TripletComponent};
    use crate::hilbert::basis_state;
    use crate::linalg::hermitian_expm;

    #[test]
    fn pair_validation() {
        assert!(ExchangePair::new(2, 2).is_err());
        assert!(ExchangePair::new(0, 1).is_err());
        assert!(exchange(ExchangePair::new(1, 5).unwrap(), 4).is_err());
    }

    #[test]
    fn exchange_examples() {
        let e = exchange(ExchangePair::new(1, 2).unwrap(), 2).unwrap();
        assert_eq!(basis_state("01").unwrap().apply_local(&e).unwrap(), basis_state("10").unwrap());
        let sq = e.matrix() * e.matrix();
        assert_eq!(sq, ComplexMatrix::identity(4));
        let s = singlet();
        assert!(s.apply_local(&e).unwrap().distance(&s.with_global_phase(std::f64::consts::PI)) < 1e-15);
        for m in TripletComponent::ALL {
            let t = triplet(m);
            assert!(t.apply_local(&e).unwrap().distance(&t) < 1e-15);
        }
    }

    #[test]
    fn heisenberg_form_is_the_swap() {
        let pair = ExchangePair::new(1, 2).unwrap();
        let h = exchange_from_heisenberg(pair, 2).unwrap();
        let e = exchange(pair, 2).unwrap();
        assert!(h.matrix().distance(e.matrix()) < 1e-14);
        assert!((h.matrix().trace() - C64::new(2.0, 0.0)).norm() < 1e-14);
        let spectral = HermitianMatrix::new(h.matrix().clone()).unwrap().spectral().unwrap();
        let mut ev = spectral.eigenvalues().to_vec();
        ev.sort_by(f64::total_cmp);
        for (got, want) in ev.iter().zip([-1.0, 1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn pulse_closed_form_matches_expm() {
        let pair = ExchangePair::new(1, 2).unwrap();
        let e = HermitianMatrix::new(paulis::swap()).unwrap();
        for phi in [0.2, -1.4, 3.0] {
            let closed = exchange_pulse(pair, phi).unwrap();
            let via_eig = hermitian_expm(&e, -phi).unwrap();
            assert!(closed.matrix().distance(&via_eig) < 1e-14);
        }
    }

    #[test]
    fn schedule_json_shape() {
        let mut s = PulseSchedule::new(4).unwrap();
        s.push(ExchangePair::new(1, 3).unwrap(), 0.25).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json().unwrap()).unwrap();
        assert_eq!(v["num_qubits"], 4);
        assert_eq!(v["pulses"][0]["i"], 1);
        assert_eq!(v["pulses"][0]["j"], 3);
        assert_eq!(v["pulses"][0]["angle"], 0.25);
        assert_eq!(PulseSchedule::from_json(&s.to_json().unwrap()).unwrap(), s);

        let bad = r#"{"num_qubits": 4, "pulses": [{"i": 1, "j": 7, "angle": 0.1}]}"#;
        assert!(PulseSchedule::from_json(bad).is_err());
        let bad = r#"{"num_qubits": 4, "pulses": [{"i": 2, "j": 2, "angle": 0.1}]}"#;
        assert!(PulseSchedule::from_json(bad).is_err());
    }

    #[test]
    fn schedule_unitary_matches_apply() {
        let mut s = PulseSchedule::new(3).unwrap();
        s.push(ExchangePair::new(1, 2).unwrap(), 0.4).unwrap();
        s.push(ExchangePair::new(2, 3).unwrap(), -1.1).unwrap();
        let u = s.unitary().unwrap();
        assert!(u.is_unitary(1e-13));
        let psi = basis_state("011").unwrap();
        assert!(s.apply(&psi).unwrap().distance(&psi.apply_matrix(&u).unwrap()) < 1e-14);
        assert_eq!(s.interior_states(&psi, 10).unwrap().len(), 20);
    }
}
