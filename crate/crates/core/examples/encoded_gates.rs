//! Logical action of exchange Hamiltonians on one encoded qubit, and an
//! exchange-only Hadamard with its Euler decomposition.

use dfsforge::encoding::LogicalFrame;
use dfsforge::gates::{e, encoded_hadamard, encoded_x_hamiltonian, gate_fidelity, hadamard, logical_action};
use dfsforge::linalg::ComplexMatrix;

fn show(name: &str, m: &ComplexMatrix) {
    println!("{name}:");
    for r in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|c| format!("{:+.4}", m.get(r, c))).collect();
        println!("  [{}]", row.join(", "));
    }
}

fn main() -> dfsforge::error::Result<()> {
    let frame = LogicalFrame::new(1)?;
    for (name, h) in [("E12", e(1, 2)?), ("E13", e(1, 3)?), ("H_x", encoded_x_hamiltonian()?)] {
        let act = logical_action(h.matrix(), &frame)?;
        show(name, &act.matrix);
        println!("  leakage {:.1e}", act.residual_leakage);
    }

    let h = encoded_hadamard()?;
    println!(
        "Euler angles: alpha {:.6}, beta {:.6}, gamma {:.6}",
        h.euler.alpha, h.euler.beta, h.euler.gamma
    );
    for p in h.schedule.pulses() {
        println!("  pulse E{}{} angle {:+.6}", p.pair.i(), p.pair.j(), p.angle);
    }
    let act = logical_action(&h.unitary, &frame)?;
    println!("gate fidelity to H: {:.15}", gate_fidelity(&act.matrix, &hadamard()));
    Ok(())
}
