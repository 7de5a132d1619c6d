//! Two encoded qubits on eight physical qubits: `h1`, `h2`, the
//! controlled-phase generator `c`, and the encoded CNOT built from it.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::exchange::{exchange_hamiltonian, PulseSchedule};
use super::single::{compile_single_qubit, gate_fidelity, hadamard, logical_action, LogicalGateMatrix};
use crate::encoding::{LogicalFrame, CLUSTER_SIZE};
use crate::error::Result;
use crate::linalg::{paulis, ComplexMatrix, HermitianMatrix, Spectral, C64};
use crate::report::{Check, VerificationReport};

pub const TWO_CLUSTER_QUBITS: usize = 2 * CLUSTER_SIZE;

/// Prefactor of the double commutator in `c`. With 1/32 the generator has
/// eigenvalue 4 on `|0_L 1_L⟩`; 1/128 normalizes it to 1 so that
/// `exp(iπc) = diag(1, −1, 1, 1)` on the encoded basis.
pub const C_PREFACTOR: f64 = 1.0 / 128.0;

fn e8(i: usize, j: usize) -> Result<ComplexMatrix> {
    Ok(exchange_hamiltonian(i, j, TWO_CLUSTER_QUBITS)?.into_matrix())
}

/// `h1 = [E26, E12 + E25] + [E15, E12 + E16]` as written: anti-Hermitian.
pub fn h1_generator() -> Result<ComplexMatrix> {
    let e12 = e8(1, 2)?;
    let a = ComplexMatrix::commutator(&e8(2, 6)?, &(&e12 + &e8(2, 5)?));
    let b = ComplexMatrix::commutator(&e8(1, 5)?, &(&e12 + &e8(1, 6)?));
    Ok(&a + &b)
}

/// `i·h1`, the Hermitian form of `h1`.
pub fn h1_hamiltonian() -> Result<HermitianMatrix> {
    HermitianMatrix::new(h1_generator()?.scale(C64::new(0.0, 1.0)))
}

/// `h2 = Σ_{j=5..8} (E1j + E2j)`.
pub fn h2_hamiltonian() -> Result<HermitianMatrix> {
    let mut acc = ComplexMatrix::zeros(1 << TWO_CLUSTER_QUBITS, 1 << TWO_CLUSTER_QUBITS);
    for j in 5..=8 {
        acc = &(&acc + &e8(1, j)?) + &e8(2, j)?;
    }
    HermitianMatrix::new(acc)
}

/// `[h1, [h2, h1]]` without prefactor.
pub fn double_commutator() -> Result<ComplexMatrix> {
    let h1 = h1_generator()?;
    let h2 = h2_hamiltonian()?;
    let inner = ComplexMatrix::commutator(h2.matrix(), &h1);
    Ok(ComplexMatrix::commutator(&h1, &inner))
}

struct Cphase {
    c: HermitianMatrix,
    spectral: Spectral,
    frame: LogicalFrame,
}

static CPHASE: OnceLock<Cphase> = OnceLock::new();

fn cphase() -> Result<&'static Cphase> {
    if let Some(c) = CPHASE.get() {
        return Ok(c);
    }
    // Hermiticity is checked on the raw double commutator, not assumed
    let c = HermitianMatrix::new(double_commutator()?.scale(C64::new(C_PREFACTOR, 0.0)))?;
    let built = Cphase {
        spectral: c.spectral()?,
        frame: LogicalFrame::new(2)?,
        c,
    };
    Ok(CPHASE.get_or_init(|| built))
}

/// `c = C_PREFACTOR · [h1, [h2, h1]]` (built once).
pub fn c_hamiltonian() -> Result<&'static HermitianMatrix> {
    Ok(&cphase()?.c)
}

/// `exp(iθc)` on all eight qubits.
pub fn controlled_phase_unitary(theta: f64) -> Result<ComplexMatrix> {
    Ok(cphase()?.spectral.expm(theta))
}

/// Logical action of `exp(iθc)` on `{|0_L0_L⟩, |0_L1_L⟩, |1_L0_L⟩, |1_L1_L⟩}`.
pub fn controlled_phase(theta: f64) -> Result<LogicalGateMatrix> {
    let cp = cphase()?;
    logical_action(&cp.spectral.expm(theta), &cp.frame)
}

/// Encoded CNOT, control = first logical qubit:
/// `(I⊗H̄)(X̄⊗I) exp(iπc) (X̄⊗I)(I⊗H̄)`.
#[derive(Clone, Debug)]
pub struct EncodedCnot {
    /// Exchange pulses before the controlled phase.
    pub pre: PulseSchedule,
    pub controlled_phase_angle: f64,
    /// Exchange pulses after the controlled phase.
    pub post: PulseSchedule,
    pub unitary: ComplexMatrix,
}

impl EncodedCnot {
    pub fn logical_action(&self) -> Result<LogicalGateMatrix> {
        logical_action(&self.unitary, &cphase()?.frame)
    }
}

/// Ideal CNOT on two qubits (control first), big-endian basis.
pub fn cnot_matrix() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
    .expect("4x4")
}

static CNOT: OnceLock<EncodedCnot> = OnceLock::new();

fn layer() -> Result<PulseSchedule> {
    let mut s = compile_single_qubit(&paulis::sigma_x(), 0, TWO_CLUSTER_QUBITS)?;
    s.extend(&compile_single_qubit(&hadamard(), 1, TWO_CLUSTER_QUBITS)?)?;
    Ok(s)
}

/// The encoded CNOT (built once).
pub fn encoded_cnot() -> Result<&'static EncodedCnot> {
    if let Some(c) = CNOT.get() {
        return Ok(c);
    }
    // X̄⊗I and I⊗H̄ act on different clusters, so one layer serves both sides
    let pre = layer()?;
    let post = pre.clone();
    let layer_u = pre.unitary()?;
    let unitary = &(&layer_u * &controlled_phase_unitary(PI)?) * &layer_u;
    let built = EncodedCnot {
        pre,
        controlled_phase_angle: PI,
        post,
        unitary,
    };
    Ok(CNOT.get_or_init(|| built))
}

/// Checks the action of `c` and of `exp(iθc)` on the two-cluster code.
pub fn cphase_report(tol: f64) -> Result<VerificationReport> {
    let cp = cphase()?;
    let mut report = VerificationReport::new("cphase");
    let names = ["0L0L", "0L1L", "1L0L", "1L1L"];
    for (x, name) in names.iter().enumerate() {
        let b = cp.frame.basis_state(x).amplitudes();
        let image = cp.c.matrix().mul_vec(b);
        let want = if x == 1 { 1.0 } else { 0.0 };
        let residual = crate::hilbert::norm(
            &image.iter().zip(b).map(|(i, v)| i - v * want).collect::<Vec<_>>(),
        );
        report.push(
            Check::at_most(format!("c_action_{name}"), residual, tol)
                .with_details(format!("‖c|{name}⟩ − {want}·|{name}⟩‖")),
        );
    }
    report.push(Check::at_most(
        "c_hermitian",
        double_commutator()?.hermiticity_residual() * C_PREFACTOR,
        tol,
    ));

    let target = ComplexMatrix::from_diagonal(&[
        C64::new(1.0, 0.0),
        C64::new(-1.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(1.0, 0.0),
    ]);
    let at_pi = controlled_phase(PI)?;
    report.push(Check::at_most("cp_pi_is_diag_1_m1_1_1", at_pi.matrix.distance(&target), tol));

    let mut leak = at_pi.residual_leakage;
    let mut diag = 0.0f64;
    for k in 0..10 {
        let theta = 0.1 + 0.6 * k as f64;
        let g = controlled_phase(theta)?;
        leak = leak.max(g.residual_leakage);
        let want = ComplexMatrix::from_diagonal(&[
            C64::new(1.0, 0.0),
            C64::from_polar(1.0, theta),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
        ]);
        diag = diag.max(g.matrix.distance(&want));
    }
    report.push(Check::at_most("cp_theta_leakage", leak, tol).with_details("10 angles in (0, 2π)"));
    report.push(Check::at_most("cp_theta_diagonal", diag, tol));

    let cnot = encoded_cnot()?.logical_action()?;
    report.push(Check::at_most("cnot_leakage", cnot.residual_leakage, tol));
    report.push(
        Check::at_most("cnot_truth_table", (1.0 - gate_fidelity(&cnot.matrix, &cnot_matrix())).max(0.0), tol)
            .with_details("1 − |tr(U†CNOT)|/4"),
    );
    Ok(report)
}
