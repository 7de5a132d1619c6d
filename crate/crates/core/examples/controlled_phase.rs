//! Two-cluster controlled phase built from the double commutator of
//! exchange Hamiltonians, and the CNOT assembled from it.

use std::f64::consts::PI;

use dfsforge::encoding::LogicalFrame;
use dfsforge::gates::{c_hamiltonian, controlled_phase, encoded_cnot, gate_fidelity, cnot_matrix};
use dfsforge::hilbert::fidelity;

fn main() -> dfsforge::error::Result<()> {
    let frame = LogicalFrame::new(2)?;
    let c = c_hamiltonian()?;
    for (x, label) in ["0L0L", "0L1L", "1L0L", "1L1L"].iter().enumerate() {
        let s = frame.basis_state(x);
        let image = c.matrix().mul_vec(s.amplitudes());
        let weight: f64 = image.iter().map(|z| z.norm_sqr()).sum();
        println!("c|{label}⟩ has norm² {weight:.3}");
    }

    let cp = controlled_phase(PI)?;
    let diag: Vec<String> = (0..4).map(|i| format!("{:+.3}", cp.matrix.get(i, i))).collect();
    println!("C_P(π) diagonal: {}", diag.join(" "));

    let cnot = encoded_cnot()?;
    println!(
        "CNOT: {} pre pulses, C_P angle {:.4}, {} post pulses",
        cnot.pre.len(),
        cnot.controlled_phase_angle,
        cnot.post.len()
    );
    let act = cnot.logical_action()?;
    println!("logical fidelity to CNOT: {:.15}", gate_fidelity(&act.matrix, &cnot_matrix()));
    for x in 0..4 {
        let out = frame.basis_state(x).apply_matrix(&cnot.unitary)?;
        let y = (0..4)
            .max_by(|&a, &b| {
                let fa = fidelity(&out, frame.basis_state(a)).unwrap_or(0.0);
                let fb = fidelity(&out, frame.basis_state(b)).unwrap_or(0.0);
                fa.total_cmp(&fb)
            })
            .unwrap_or(0);
        println!("  |{:02b}⟩_L -> |{:02b}⟩_L", x, y);
    }
    Ok(())
}
