//! Dimensions of the collective-decoherence-free subspace and a check that
//! the four-qubit code states are annihilated by every total-spin operator.

use dfsforge::collective::{check_dfs_condition, dfs_basis, dfs_dimension};
use dfsforge::encoding::{logical_one, logical_zero};

fn main() -> dfsforge::error::Result<()> {
    for k in [2, 4, 6, 8] {
        let basis = dfs_basis(k)?;
        println!("K = {k}: nullspace dimension {} (formula {})", basis.dim(), dfs_dimension(k)?);
    }

    let report = check_dfs_condition(&[logical_zero(), logical_one()], 4, 1e-12)?;
    for c in &report.checks {
        println!("{:<28} residual {:.2e}  {}", c.name, c.residual, if c.passed { "ok" } else { "FAILED" });
    }
    Ok(())
}
