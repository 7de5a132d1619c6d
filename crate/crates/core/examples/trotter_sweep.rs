//! Convergence of the two product formulas with the number of steps.

use dfsforge::gates::{reference_sweep, Formula};

fn main() -> dfsforge::error::Result<()> {
    for formula in [Formula::Sum, Formula::Product] {
        let sweep = reference_sweep(formula, &formula.default_steps())?;
        println!("{formula:?}");
        for row in &sweep.rows {
            println!("  n = {:>5}  error {:.3e}", row.n, row.error);
        }
        let (lo, hi) = formula.slope_window();
        println!("  log-log slope {:.3} (expected in [{lo}, {hi}])", sweep.slope.unwrap_or(f64::NAN));
    }
    Ok(())
}
