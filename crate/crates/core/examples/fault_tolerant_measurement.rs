//! Repeated nondestructive readout of the encoded Z with faulty ancillas,
//! compared with the exact vote distribution.

use dfsforge::encoding::{encode, logical_zero};
use dfsforge::ftmeas::{binomial_tail, exact_vote_distribution, run_shots};
use dfsforge::linalg::C64;

fn main() -> dfsforge::error::Result<()> {
    let shots = 2000;
    for p in [0.0, 0.05, 0.1, 0.2] {
        for rounds in [1, 3, 5] {
            let records = run_shots(&logical_zero(), shots, rounds, p, 42)?;
            let wrong = records.iter().filter(|r| r.voted_bit != 0).count();
            println!(
                "p = {p:.2}, rounds = {rounds}: error rate {:.4} (binomial tail {:.4})",
                wrong as f64 / shots as f64,
                binomial_tail(rounds, p)
            );
        }
    }

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = encode(&[C64::new(h, 0.0), C64::new(h, 0.0)], 1)?;
    let exact = exact_vote_distribution(&plus, 3, 0.1)?;
    let records = run_shots(&plus, shots, 3, 0.1, 42)?;
    let zeros = records.iter().filter(|r| r.voted_bit == 0).count();
    println!(
        "|+_L⟩: voted 0 in {zeros}/{shots} shots, exact probability {:.4}",
        exact[0]
    );
    Ok(())
}
