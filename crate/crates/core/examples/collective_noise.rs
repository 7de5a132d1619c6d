//! Random collective rotations leave encoded states alone and scramble
//! product states.

use dfsforge::encoding::random_encoded;
use dfsforge::hilbert::basis_state;
use dfsforge::noise::collective_fidelity_sweep;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dfsforge::error::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let encoded = (0..4).map(|_| random_encoded(1, &mut rng)).collect::<Result<Vec<_>, _>>()?;
    let r = collective_fidelity_sweep(&encoded, 200, 7)?;
    println!(
        "encoded: min fidelity {:.15}, mean {:.15}, leakage {:.1e}",
        r.min_fidelity, r.mean_fidelity, r.max_leakage
    );
    let r = collective_fidelity_sweep(&[basis_state("0000")?], 200, 7)?;
    println!("|0000⟩:  min fidelity {:.4}, mean {:.4}", r.min_fidelity, r.mean_fidelity);
    Ok(())
}
