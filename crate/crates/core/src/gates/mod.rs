//! Exchange-only gates on encoded qubits.

mod exchange;
mod single;
mod trotter;
mod two_cluster;

pub use exchange::{
    exchange, exchange_from_heisenberg, exchange_hamiltonian, exchange_pulse, ExchangePair, Pulse,
    PulseSchedule,
};
pub use single::{
    compile_single_qubit, e, encoded_gate, encoded_hadamard, encoded_not, encoded_x_hamiltonian,
    encoded_z_hamiltonian, euler_synthesize, gate_fidelity, hadamard, logical_action, rotation_x,
    rotation_x_trotter_schedule, rotation_z, EncodedGate, EulerAngles, LogicalGateMatrix, RotationMode,
};
pub use trotter::{
    lie_product, lie_product_limit, loglog_slope, reference_sweep, sweep, trotter_sum, trotter_sum_limit,
    ConvergenceSweep, Formula, SweepRow,
};
pub use two_cluster::{
    c_hamiltonian, cnot_matrix, controlled_phase, controlled_phase_unitary, cphase_report,
    double_commutator, encoded_cnot, h1_generator, h1_hamiltonian, h2_hamiltonian, EncodedCnot,
    C_PREFACTOR, TWO_CLUSTER_QUBITS,
};

use std::f64::consts::PI;

use crate::collective::{stabilizer_commutator_norm, theorem_check, STABILIZER_SAMPLES};
use crate::encoding::{random_encoded, LogicalFrame, CLUSTER_SIZE};
use crate::error::Result;
use crate::linalg::{paulis, ComplexMatrix, HermitianMatrix};
use crate::report::{Check, VerificationReport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Encoded single-qubit gate set: logical actions, su(2) closure and the
/// exchange-compiled Hadamard.
pub fn gates_report(tol: f64) -> Result<VerificationReport> {
    let frame = LogicalFrame::new(1)?;
    let mut r = VerificationReport::new("gates");

    let heis = exchange_from_heisenberg(ExchangePair::new(1, 2)?, 2)?;
    let swap = exchange(ExchangePair::new(1, 2)?, 2)?;
    r.push(Check::at_most("heisenberg_equals_swap", heis.matrix().distance(swap.matrix()), tol));

    let z = logical_action(encoded_z_hamiltonian()?.matrix(), &frame)?;
    r.push(Check::at_most("zbar_is_sigma_z", z.matrix.distance(&paulis::sigma_z()), tol));
    r.push(Check::at_most("zbar_leakage", z.residual_leakage, tol));

    let s3 = 3f64.sqrt() / 2.0;
    let e13_want = ComplexMatrix::from_real_rows(&[&[0.5, -s3], &[-s3, -0.5]])?;
    let e13 = logical_action(e(1, 3)?.matrix(), &frame)?;
    r.push(Check::at_most("e13_action", e13.matrix.distance(&e13_want), tol));
    r.push(Check::at_most("e13_leakage", e13.residual_leakage, tol));

    let x = logical_action(encoded_x_hamiltonian()?.matrix(), &frame)?;
    r.push(Check::at_most("xbar_is_sigma_x", x.matrix.distance(&paulis::sigma_x()), tol));
    r.push(Check::at_most("xbar_leakage", x.residual_leakage, tol));

    let anti = ComplexMatrix::anticommutator(&z.matrix, &x.matrix).max_abs();
    r.push(Check::at_most("zbar_xbar_anticommute", anti, tol));

    let e12 = logical_action(e(1, 2)?.matrix(), &frame)?.matrix;
    let e34 = logical_action(e(3, 4)?.matrix(), &frame)?.matrix;
    let e24 = logical_action(e(2, 4)?.matrix(), &frame)?.matrix;
    r.push(Check::at_most("projected_e12_equals_e34", e12.distance(&e34), tol));
    r.push(Check::at_most("projected_e13_equals_e24", e13.matrix.distance(&e24), tol));

    let rz = logical_action(&rotation_z(2.0 * PI)?, &frame)?.matrix;
    r.push(Check::at_most(
        "rotation_z_2pi_is_minus_identity",
        (&rz + &ComplexMatrix::identity(2)).frobenius_norm(),
        tol,
    ));

    let h = encoded_hadamard()?;
    let act = logical_action(&h.unitary, &frame)?;
    r.push(Check::at_most("hadamard_fidelity", (1.0 - gate_fidelity(&act.matrix, &hadamard())).max(0.0), tol));
    r.push(Check::at_most("hadamard_leakage", act.residual_leakage, tol));
    let euler = logical_action(&h.euler.unitary()?, &frame)?;
    r.push(Check::at_most(
        "hadamard_euler_fidelity",
        (1.0 - gate_fidelity(&euler.matrix, &hadamard())).max(0.0),
        tol,
    ));
    Ok(r)
}

/// Every pulse schedule this crate emits, labelled.
pub fn emitted_schedules() -> Result<Vec<(&'static str, PulseSchedule)>> {
    let cnot = encoded_cnot()?;
    Ok(vec![
        ("hadamard", encoded_hadamard()?.schedule),
        ("not", encoded_not()?.schedule),
        ("rotation_x_trotter", rotation_x_trotter_schedule(PI / 2.0, 16, 0, CLUSTER_SIZE)?),
        ("cnot_pre", cnot.pre.clone()),
        ("cnot_post", cnot.post.clone()),
    ])
}

/// Every gate generator used by this crate, labelled.
pub fn gate_generators() -> Result<Vec<(&'static str, HermitianMatrix)>> {
    let mut out = vec![
        ("e12", e(1, 2)?),
        ("e13", e(1, 3)?),
        ("e34", e(3, 4)?),
        ("e24", e(2, 4)?),
        ("h_x", encoded_x_hamiltonian()?),
        ("i_h1", h1_hamiltonian()?),
        ("h2", h2_hamiltonian()?),
        ("c", c_hamiltonian()?.clone()),
    ];
    for (i, j) in [(1, 5), (1, 6), (2, 5), (2, 6)] {
        let name = match (i, j) {
            (1, 5) => "e15",
            (1, 6) => "e16",
            (2, 5) => "e25",
            _ => "e26",
        };
        out.push((name, exchange_hamiltonian(i, j, TWO_CLUSTER_QUBITS)?));
    }
    Ok(out)
}

/// Stabilizer commutation of every generator and the no-leakage property
/// at interior times of every emitted pulse schedule.
pub fn theorem_report(tol: f64, seed: u64) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("theorem");
    for (name, h) in gate_generators()? {
        let mut sub = theorem_check(&h, STABILIZER_SAMPLES, tol)?;
        sub.suite = format!("theorem_{name}");
        r.absorb(sub);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (name, sched) in emitted_schedules()? {
        let num_logical = sched.num_qubits() / CLUSTER_SIZE;
        let frame = LogicalFrame::new(num_logical)?;
        let mut leak = 0.0f64;
        let mut samples = 0usize;
        for _ in 0..3 {
            let s = random_encoded(num_logical, &mut rng)?;
            for mid in sched.interior_states(&s, 10)? {
                leak = leak.max(frame.leakage(mid.amplitudes()));
                samples += 1;
            }
        }
        r.push(
            Check::at_most(format!("mid_pulse_leakage_{name}"), leak, tol)
                .with_details(format!("{} pulses, {samples} interior states", sched.len())),
        );
    }

    let cnot = encoded_cnot()?;
    let mut comm = 0.0f64;
    for v in crate::collective::fixed_rotation_sample(STABILIZER_SAMPLES) {
        comm = comm.max(stabilizer_commutator_norm(&cnot.unitary, v)?);
    }
    r.push(Check::at_most("cnot_commutes_with_stabilizer", comm, tol));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gates_suite_passes() {
        let r = gates_report(1e-12).unwrap();
        for c in &r.checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn theorem_suite_passes() {
        let r = theorem_report(1e-10, 0).unwrap();
        for c in &r.checks {
            assert!(c.passed, "{c:?}");
        }
        assert!(r.check("mid_pulse_leakage_cnot_pre").is_some());
    }
}
