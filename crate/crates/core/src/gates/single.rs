//! Gates on one encoded qubit (four physical qubits).
//!
//! On the logical basis `E12 ↦ −σ_z` and `E13 ↦ m·σ` with
//! `m = (−√3/2, 0, 1/2)`, so a pulse on (1,2) is a z rotation and a pulse on
//! (1,3) is a rotation about `m`. Two non-parallel axes are enough to reach
//! every SU(2) element with exchange pulses alone.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::exchange::{exchange_hamiltonian, ExchangePair, PulseSchedule};
use super::trotter::trotter_sum;
use crate::encoding::{LogicalFrame, CLUSTER_SIZE};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_expm, ComplexMatrix, HermitianMatrix, C64};

/// Operator read off on an encoded basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalGateMatrix {
    pub matrix: ComplexMatrix,
    pub residual_leakage: f64,
}

/// `⟨b_x|op|b_y⟩` over the frame's basis, plus the largest norm of
/// `(I−P)·op·b_y`.
pub fn logical_action(op: &ComplexMatrix, frame: &LogicalFrame) -> Result<LogicalGateMatrix> {
    let dim = 1usize << frame.num_qubits();
    if op.rows() != dim || op.cols() != dim {
        return Err(Error::Shape(format!(
            "operator is {}x{}, frame space has dimension {dim}",
            op.rows(),
            op.cols()
        )));
    }
    let d = frame.basis().len();
    let mut entries = vec![C64::new(0.0, 0.0); d * d];
    let mut leak = 0.0f64;
    for (y, b) in frame.basis().iter().enumerate() {
        let image = op.mul_vec(b.amplitudes());
        for (x, c) in frame.components(&image).into_iter().enumerate() {
            entries[x * d + y] = c;
        }
        leak = leak.max(frame.leakage(&image));
    }
    Ok(LogicalGateMatrix {
        matrix: ComplexMatrix::from_row_major(d, d, entries)?,
        residual_leakage: leak,
    })
}

/// `|tr(A†B)| / d`: 1 iff two unitaries agree up to a global phase.
pub fn gate_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (&a.adjoint() * b).trace().norm() / a.rows() as f64
}

/// `E_ij` on one cluster.
pub fn e(i: usize, j: usize) -> Result<HermitianMatrix> {
    exchange_hamiltonian(i, j, CLUSTER_SIZE)
}

/// `Z̄ = −E12`.
pub fn encoded_z_hamiltonian() -> Result<HermitianMatrix> {
    Ok(e(1, 2)?.scale(-1.0))
}

/// `H_x = −(2/√3)(E13 + E12/2)`, the encoded `σ_x`.
pub fn encoded_x_hamiltonian() -> Result<HermitianMatrix> {
    let k = -2.0 / 3f64.sqrt();
    HermitianMatrix::linear_combination(&[(k, &e(1, 3)?), (0.5 * k, &e(1, 2)?)])
}

/// `exp(iθE12/2)`; its logical action is exactly `exp(−iθσ_z/2)`.
pub fn rotation_z(theta: f64) -> Result<ComplexMatrix> {
    hermitian_expm(&e(1, 2)?, theta / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationMode {
    /// E13 and E12 switched on together.
    Ideal,
    /// Lie-sum approximant with this many steps.
    Trotter(usize),
}

/// Coefficients `(α, β)` with `exp(−iθH_x/2) = exp(i(αE13 + βE12))`.
fn x_rotation_coefficients(theta: f64) -> (f64, f64) {
    let s3 = 3f64.sqrt();
    (theta / s3, theta / (2.0 * s3))
}

/// `exp(−iθH_x/2)` or its Trotter approximant.
pub fn rotation_x(theta: f64, mode: RotationMode) -> Result<ComplexMatrix> {
    match mode {
        RotationMode::Ideal => hermitian_expm(&encoded_x_hamiltonian()?, -theta / 2.0),
        RotationMode::Trotter(n) => {
            let (alpha, beta) = x_rotation_coefficients(theta);
            trotter_sum(&e(1, 3)?, &e(1, 2)?, alpha, beta, n)
        }
    }
}

fn cluster_pairs(cluster: usize, num_qubits: usize) -> Result<(ExchangePair, ExchangePair)> {
    let first = CLUSTER_SIZE * cluster + 1;
    if first + 3 > num_qubits {
        return Err(Error::QubitIndex {
            index: first + 3,
            num_qubits,
        });
    }
    Ok((
        ExchangePair::new(first, first + 1)?,
        ExchangePair::new(first, first + 2)?,
    ))
}

/// Pulses realizing the Trotterized `exp(−iθH_x/2)` on a 0-based cluster.
pub fn rotation_x_trotter_schedule(
    theta: f64,
    steps: usize,
    cluster: usize,
    num_qubits: usize,
) -> Result<PulseSchedule> {
    if steps == 0 {
        return Err(Error::InvalidArgument("Trotter step count must be ≥ 1".into()));
    }
    let (z_pair, m_pair) = cluster_pairs(cluster, num_qubits)?;
    let (alpha, beta) = x_rotation_coefficients(theta);
    let mut s = PulseSchedule::new(num_qubits)?;
    for _ in 0..steps {
        s.push(z_pair, -beta / steps as f64)?;
        s.push(m_pair, -alpha / steps as f64)?;
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    /// `rotation_z(α)·rotation_x(β)·rotation_z(γ)` on four qubits.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        let x = rotation_x(self.beta, RotationMode::Ideal)?;
        Ok(&(&rotation_z(self.alpha)? * &x) * &rotation_z(self.gamma)?)
    }
}

const DEGENERATE_TOL: f64 = 1e-12;

fn wrap(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    if a.abs() < 1e-15 {
        0.0
    } else {
        a
    }
}

fn check_qubit_unitary(target: &ComplexMatrix) -> Result<()> {
    if target.rows() != 2 || target.cols() != 2 {
        return Err(Error::Shape("expected a 2x2 target".into()));
    }
    let r = target.unitarity_residual();
    if r > 1e-10 {
        return Err(Error::Numeric {
            what: "target unitarity",
            residual: r,
        });
    }
    Ok(())
}

/// Strips the global phase so the determinant is 1.
fn special(target: &ComplexMatrix) -> ComplexMatrix {
    let det = target.get(0, 0) * target.get(1, 1) - target.get(0, 1) * target.get(1, 0);
    target.scale(det.sqrt().inv())
}

/// z–x–z angles with `R_z(α)R_x(β)R_z(γ) ≃ target` up to global phase.
///
/// When `β` is 0 or π only `α ± γ` is fixed; `γ` is then set to 0.
pub fn euler_synthesize(target: &ComplexMatrix) -> Result<EulerAngles> {
    check_qubit_unitary(target)?;
    let u = special(target);
    let (u00, u10) = (u.get(0, 0), u.get(1, 0));
    let beta = 2.0 * u10.norm().atan2(u00.norm());
    let (alpha, gamma) = if u10.norm() < DEGENERATE_TOL {
        (-2.0 * u00.arg(), 0.0)
    } else if u00.norm() < DEGENERATE_TOL {
        (2.0 * u10.arg() + PI, 0.0)
    } else {
        let sum = -2.0 * u00.arg();
        let diff = 2.0 * u10.arg() + PI;
        ((sum + diff) / 2.0, (sum - diff) / 2.0)
    };
    Ok(EulerAngles {
        alpha: wrap(alpha),
        beta,
        gamma: wrap(gamma),
    })
}

/// Rotation by `θ` about `m = (−√3/2, 0, 1/2)`, the logical image of E13.
fn rotation_m(theta: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let (mx, mz) = (-(3f64.sqrt()) / 2.0, 0.5);
    ComplexMatrix::from_row_major(
        2,
        2,
        vec![
            C64::new(c, -s * mz),
            C64::new(0.0, -s * mx),
            C64::new(0.0, -s * mx),
            C64::new(c, s * mz),
        ],
    )
    .expect("2x2")
}

/// Angles `(a, b, c)` with `U = R_z(a)R_m(b)R_z(c)`; needs `|U00|² ≥ 1/4`.
fn zmz_angles(u: &ComplexMatrix) -> (f64, f64, f64) {
    let (u00, u10) = (u.get(0, 0), u.get(1, 0));
    let s2 = ((4.0 / 3.0) * (1.0 - u00.norm_sqr())).clamp(0.0, 1.0);
    let half_s = s2.sqrt();
    let half_c = (1.0 - s2).sqrt();
    let b = 2.0 * half_s.atan2(half_c);
    let m00 = C64::new(half_c, -0.5 * half_s);
    if half_s < DEGENERATE_TOL {
        return (-2.0 * u00.arg(), 0.0, 0.0);
    }
    let sum = 2.0 * (m00.arg() - u00.arg());
    let diff = 2.0 * (u10.arg() - PI / 2.0);
    ((sum + diff) / 2.0, b, (sum - diff) / 2.0)
}

/// Exchange-only pulses on a 0-based cluster implementing a single-qubit
/// target (up to global phase), using only E12 and E13 pulses.
pub fn compile_single_qubit(
    target: &ComplexMatrix,
    cluster: usize,
    num_qubits: usize,
) -> Result<PulseSchedule> {
    check_qubit_unitary(target)?;
    let (z_pair, m_pair) = cluster_pairs(cluster, num_qubits)?;
    let mut u = special(target);
    // rotations about z and m only reach |U00|² ≥ 1/4 in one z-m-z pass
    let mut tail = None;
    if u.get(0, 0).norm_sqr() < 0.25 {
        u = &rotation_m(-PI) * &u;
        tail = Some(PI);
    }
    let (a, b, c) = zmz_angles(&u);
    let mut s = PulseSchedule::new(num_qubits)?;
    // pulse(E12, φ) ↦ R_z(−2φ), pulse(E13, φ) ↦ R_m(2φ)
    let steps = [(z_pair, -c / 2.0), (m_pair, b / 2.0), (z_pair, -a / 2.0)];
    for (pair, angle) in steps {
        let angle = wrap(angle);
        if angle != 0.0 {
            s.push(pair, angle)?;
        }
    }
    if let Some(t) = tail {
        s.push(m_pair, t / 2.0)?;
    }
    Ok(s)
}

/// A single-qubit encoded gate: exchange pulses, their 4-qubit unitary and
/// the z–x–z decomposition of the logical target.
#[derive(Clone, Debug)]
pub struct EncodedGate {
    pub schedule: PulseSchedule,
    pub unitary: ComplexMatrix,
    pub euler: EulerAngles,
}

pub fn encoded_gate(target: &ComplexMatrix) -> Result<EncodedGate> {
    let schedule = compile_single_qubit(target, 0, CLUSTER_SIZE)?;
    Ok(EncodedGate {
        unitary: schedule.unitary()?,
        euler: euler_synthesize(target)?,
        schedule,
    })
}

pub fn hadamard() -> ComplexMatrix {
    let h = 1.0 / 2f64.sqrt();
    ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]]).expect("2x2")
}

pub fn encoded_hadamard() -> Result<EncodedGate> {
    encoded_gate(&hadamard())
}

pub fn encoded_not() -> Result<EncodedGate> {
    encoded_gate(&crate::linalg::paulis::sigma_x())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert;
    use crate::collective::{collective_operators, stabilizer_element};
    use crate::linalg::paulis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn frame() -> LogicalFrame {
        LogicalFrame::new(1).unwrap()
    }

    fn action(h: &HermitianMatrix) -> LogicalGateMatrix {
        logical_action(h.matrix(), &frame()).unwrap()
    }

    fn random_su2(rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let v: [f64; 3] = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let h = HermitianMatrix::linear_combination(&[
            (v[0], &HermitianMatrix::new(paulis::sigma_x()).unwrap()),
            (v[1], &HermitianMatrix::new(paulis::sigma_y()).unwrap()),
            (v[2], &HermitianMatrix::new(paulis::sigma_z()).unwrap()),
        ])
        .unwrap();
        hermitian_expm(&h, 1.0).unwrap()
    }

    #[test]
    fn z_and_x_actions() {
        let z = action(&encoded_z_hamiltonian().unwrap());
        assert!(z.matrix.distance(&paulis::sigma_z()) < 1e-12);
        assert!(z.residual_leakage < 1e-12);

        let s3 = 3f64.sqrt() / 2.0;
        let e13 = action(&e(1, 3).unwrap());
        let want = ComplexMatrix::from_real_rows(&[&[0.5, -s3], &[-s3, -0.5]]).unwrap();
        assert!(e13.matrix.distance(&want) < 1e-12);
        assert!(e13.residual_leakage < 1e-12);

        let x = action(&encoded_x_hamiltonian().unwrap());
        assert!(x.matrix.distance(&paulis::sigma_x()) < 1e-12);
        assert!(x.residual_leakage < 1e-12);

        let id = logical_action(&ComplexMatrix::identity(16), &frame()).unwrap();
        assert!(id.matrix.distance(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn projected_exchange_equalities() {
        let p = frame().projector().unwrap();
        let proj = |h: HermitianMatrix| &(&p * h.matrix()) * &p;
        assert!(proj(e(1, 2).unwrap()).distance(&proj(e(3, 4).unwrap())) < 1e-12);
        assert!(proj(e(1, 3).unwrap()).distance(&proj(e(2, 4).unwrap())) < 1e-12);
        assert!(action(&e(1, 2).unwrap()).matrix.distance(&action(&e(3, 4).unwrap()).matrix) < 1e-12);
        assert!(action(&e(1, 3).unwrap()).matrix.distance(&action(&e(2, 4).unwrap()).matrix) < 1e-12);
        // but not as full-space operators
        assert!(e(1, 2).unwrap().matrix().distance(e(3, 4).unwrap().matrix()) > 1.0);
    }

    #[test]
    fn logical_paulis_close_su2() {
        let z = action(&encoded_z_hamiltonian().unwrap()).matrix;
        let x = action(&encoded_x_hamiltonian().unwrap()).matrix;
        assert!(ComplexMatrix::anticommutator(&z, &x).max_abs() < 1e-12);
        assert!((&z * &z).distance(&ComplexMatrix::identity(2)) < 1e-12);
        assert!((&x * &x).distance(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn h_x_commutes_with_collective_spin() {
        let ops = collective_operators(4).unwrap();
        let hx = encoded_x_hamiltonian().unwrap();
        for axis in hilbert::Axis::ALL {
            assert!(ComplexMatrix::commutator(hx.matrix(), ops.component(axis)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn rotations() {
        let f = frame();
        let rz = logical_action(&rotation_z(2.0 * PI).unwrap(), &f).unwrap();
        assert!(rz.matrix.distance(&ComplexMatrix::identity(2).scale(C64::new(-1.0, 0.0))) < 1e-12);
        for theta in [0.3, -1.7, 2.9] {
            let got = logical_action(&rotation_z(theta).unwrap(), &f).unwrap().matrix;
            let want = ComplexMatrix::from_diagonal(&[
                C64::from_polar(1.0, -theta / 2.0),
                C64::from_polar(1.0, theta / 2.0),
            ]);
            assert!(got.distance(&want) < 1e-12);
        }
        let rx = logical_action(&rotation_x(PI, RotationMode::Ideal).unwrap(), &f).unwrap();
        let want = paulis::sigma_x().scale(C64::new(0.0, -1.0));
        assert!(rx.matrix.distance(&want) < 1e-12);
        let one = f.basis_state(1);
        let mapped = f.basis_state(0).apply_matrix(&rotation_x(PI, RotationMode::Ideal).unwrap()).unwrap();
        assert!((hilbert::fidelity(&mapped, one).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trotterized_x_rotation_converges() {
        let theta = PI / 2.0;
        let f = frame();
        let ideal = logical_action(&rotation_x(theta, RotationMode::Ideal).unwrap(), &f).unwrap().matrix;
        let infidelity = |n| {
            let m = logical_action(&rotation_x(theta, RotationMode::Trotter(n)).unwrap(), &f).unwrap();
            assert!(m.residual_leakage < 1e-12);
            1.0 - gate_fidelity(&m.matrix, &ideal)
        };
        let err16 = infidelity(16);
        assert!(err16 < 1e-2, "{err16}");
        assert!(infidelity(64) < err16);
        let sched = rotation_x_trotter_schedule(theta, 16, 0, 4).unwrap();
        let u = sched.unitary().unwrap();
        assert!(u.distance(&rotation_x(theta, RotationMode::Trotter(16)).unwrap()) < 1e-12);
    }

    #[test]
    fn euler_examples() {
        let id = euler_synthesize(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!((id.alpha, id.beta, id.gamma), (0.0, 0.0, 0.0));
        let theta = 0.8;
        let rz = ComplexMatrix::from_diagonal(&[C64::from_polar(1.0, -theta / 2.0), C64::from_polar(1.0, theta / 2.0)]);
        let a = euler_synthesize(&rz).unwrap();
        assert!((a.alpha - theta).abs() < 1e-12 && a.beta.abs() < 1e-12 && a.gamma == 0.0);

        let h = euler_synthesize(&hadamard().scale(C64::new(0.0, 1.0))).unwrap();
        let got = logical_action(&h.unitary().unwrap(), &frame()).unwrap().matrix;
        assert!(gate_fidelity(&got, &hadamard()) > 1.0 - 1e-10);
    }

    #[test]
    fn euler_and_compilation_on_random_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = frame();
        let mut targets: Vec<ComplexMatrix> = (0..40).map(|_| random_su2(&mut rng)).collect();
        targets.push(paulis::sigma_x());
        targets.push(paulis::sigma_y());
        targets.push(hadamard());
        for t in &targets {
            let angles = euler_synthesize(t).unwrap();
            let got = logical_action(&angles.unitary().unwrap(), &f).unwrap().matrix;
            assert!(gate_fidelity(&got, t) > 1.0 - 1e-10);

            let sched = compile_single_qubit(t, 0, 4).unwrap();
            assert!(sched.len() <= 4);
            let act = logical_action(&sched.unitary().unwrap(), &f).unwrap();
            assert!(act.residual_leakage < 1e-12);
            assert!(gate_fidelity(&act.matrix, t) > 1.0 - 1e-12);
        }
    }

    #[test]
    fn schedules_never_leak_mid_pulse() {
        let f = frame();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sched = encoded_hadamard().unwrap().schedule;
        for _ in 0..5 {
            let s = crate::encoding::random_encoded(1, &mut rng).unwrap();
            for mid in sched.interior_states(&s, 10).unwrap() {
                assert!(f.leakage(mid.amplitudes()) < 1e-12);
            }
        }
    }

    #[test]
    fn gates_commute_with_stabilizer() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gates = [
            rotation_z(0.7).unwrap(),
            rotation_x(1.1, RotationMode::Ideal).unwrap(),
            rotation_x(1.1, RotationMode::Trotter(4)).unwrap(),
            encoded_hadamard().unwrap().unitary,
        ];
        for _ in 0..5 {
            let v = crate::collective::random_rotation_vector(&mut rng);
            let d = stabilizer_element(crate::collective::real_v(v), 4).unwrap().matrix;
            for g in &gates {
                assert!(ComplexMatrix::commutator(g, &d).frobenius_norm() < 1e-10);
            }
        }
    }

    #[test]
    fn wrong_cluster_is_rejected() {
        assert!(compile_single_qubit(&hadamard(), 1, 4).is_err());
        assert!(compile_single_qubit(&ComplexMatrix::identity(3), 0, 4).is_err());
    }
}
