//! Lie sum and Lie product approximants and their convergence sweeps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_expm, paulis, ComplexMatrix, HermitianMatrix, C64};

fn check_pair(a: &HermitianMatrix, b: &HermitianMatrix, n: usize) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!("generator dims {} and {}", a.dim(), b.dim())));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("step count must be ≥ 1".into()));
    }
    Ok(())
}

/// `(e^{iαA/n} e^{iβB/n})^n`.
pub fn trotter_sum(a: &HermitianMatrix, b: &HermitianMatrix, alpha: f64, beta: f64, n: usize) -> Result<ComplexMatrix> {
    check_pair(a, b, n)?;
    let step = &hermitian_expm(a, alpha / n as f64)? * &hermitian_expm(b, beta / n as f64)?;
    Ok(step.pow(n))
}

/// `e^{i(αA+βB)}`.
pub fn trotter_sum_limit(a: &HermitianMatrix, b: &HermitianMatrix, alpha: f64, beta: f64) -> Result<ComplexMatrix> {
    hermitian_expm(&HermitianMatrix::linear_combination(&[(alpha, a), (beta, b)])?, 1.0)
}

/// `Q^n` with `Q = e^{iA/√n} e^{iB/√n} e^{−iA/√n} e^{−iB/√n}`.
pub fn lie_product(a: &HermitianMatrix, b: &HermitianMatrix, n: usize) -> Result<ComplexMatrix> {
    check_pair(a, b, n)?;
    let t = 1.0 / (n as f64).sqrt();
    let q = &(&(&hermitian_expm(a, t)? * &hermitian_expm(b, t)?) * &hermitian_expm(a, -t)?) * &hermitian_expm(b, -t)?;
    Ok(q.pow(n))
}

/// `exp([iA, iB]) = exp(−[A,B])`, the limit of [`lie_product`].
pub fn lie_product_limit(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<ComplexMatrix> {
    // −[A,B] = i·(i[A,B]) with i[A,B] Hermitian
    let comm = ComplexMatrix::commutator(a.matrix(), b.matrix()).scale(C64::new(0.0, 1.0));
    hermitian_expm(&HermitianMatrix::new(comm)?, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formula {
    Sum,
    Product,
}

impl Formula {
    pub fn default_steps(self) -> Vec<usize> {
        match self {
            Formula::Sum => (1..=8).map(|k| 1usize << k).collect(),
            Formula::Product => (2..=10).map(|k| 1usize << k).collect(),
        }
    }

    /// Accepted fitted-slope window for the reference generators.
    pub fn slope_window(self) -> (f64, f64) {
        match self {
            Formula::Sum => (-1.2, -0.8),
            Formula::Product => (-0.7, -0.3),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSweep {
    pub formula: Formula,
    pub rows: Vec<SweepRow>,
    pub slope: Option<f64>,
}

fn check_steps(ns: &[usize]) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::InvalidArgument("no step counts given".into()));
    }
    if ns[0] == 0 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("step counts must be positive and strictly ascending".into()));
    }
    Ok(())
}

/// Frobenius error of the approximant against its limit for each `n`.
pub fn sweep(
    formula: Formula,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    alpha: f64,
    beta: f64,
    ns: &[usize],
) -> Result<ConvergenceSweep> {
    check_steps(ns)?;
    let exact = match formula {
        Formula::Sum => trotter_sum_limit(a, b, alpha, beta)?,
        Formula::Product => lie_product_limit(a, b)?,
    };
    let rows = ns
        .iter()
        .map(|&n| {
            let approx = match formula {
                Formula::Sum => trotter_sum(a, b, alpha, beta, n)?,
                Formula::Product => lie_product(a, b, n)?,
            };
            Ok(SweepRow {
                n,
                error: approx.distance(&exact),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let slope = loglog_slope(&rows);
    Ok(ConvergenceSweep { formula, rows, slope })
}

/// The reference sweeps: σ_x/σ_z (α = β = 1) for the sum formula,
/// σ_x/σ_y for the product formula.
pub fn reference_sweep(formula: Formula, ns: &[usize]) -> Result<ConvergenceSweep> {
    let x = HermitianMatrix::new(paulis::sigma_x())?;
    let other = match formula {
        Formula::Sum => paulis::sigma_z(),
        Formula::Product => paulis::sigma_y(),
    };
    sweep(formula, &x, &HermitianMatrix::new(other)?, 1.0, 1.0, ns)
}

/// Least-squares slope of `ln error` against `ln n`; `None` with fewer than
/// two rows or a non-positive error.
pub fn loglog_slope(rows: &[SweepRow]) -> Option<f64> {
    if rows.len() < 2 || rows.iter().any(|r| r.error <= 0.0 || !r.error.is_finite()) {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((r.n as f64).ln(), r.error.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(m: ComplexMatrix) -> HermitianMatrix {
        HermitianMatrix::new(m).unwrap()
    }

    #[test]
    fn commuting_inputs_are_exact() {
        let z = h(paulis::sigma_z());
        let z2 = z.scale(0.3);
        for n in [1, 3, 10] {
            let approx = trotter_sum(&z, &z2, 0.7, -1.3, n).unwrap();
            assert!(approx.distance(&trotter_sum_limit(&z, &z2, 0.7, -1.3).unwrap()) < 1e-12);
            let q = lie_product(&z, &z2, n).unwrap();
            assert!(q.distance(&ComplexMatrix::identity(2)) < 1e-12);
        }
    }

    #[test]
    fn single_step_is_the_group_commutator() {
        let (x, y) = (h(paulis::sigma_x()), h(paulis::sigma_y()));
        let manual = &(&(&hermitian_expm(&x, 1.0).unwrap() * &hermitian_expm(&y, 1.0).unwrap())
            * &hermitian_expm(&x, -1.0).unwrap())
            * &hermitian_expm(&y, -1.0).unwrap();
        assert!(lie_product(&x, &y, 1).unwrap().distance(&manual) < 1e-15);
    }

    #[test]
    fn product_limit_is_exp_of_2i_sigma_z() {
        let (x, y) = (h(paulis::sigma_x()), h(paulis::sigma_y()));
        // −[σx, σy] = −2iσz; independent closed form cos2 I − i sin2 σz
        let want = &ComplexMatrix::identity(2).scale(C64::new(2f64.cos(), 0.0))
            + &paulis::sigma_z().scale(C64::new(0.0, -(2f64.sin())));
        assert!(lie_product_limit(&x, &y).unwrap().distance(&want) < 1e-14);
    }

    #[test]
    fn reference_slopes() {
        let s = reference_sweep(Formula::Sum, &Formula::Sum.default_steps()).unwrap();
        let slope = s.slope.unwrap();
        assert!((-1.2..=-0.8).contains(&slope), "{slope}");
        let p = reference_sweep(Formula::Product, &Formula::Product.default_steps()).unwrap();
        let slope = p.slope.unwrap();
        assert!((-0.7..=-0.3).contains(&slope), "{slope}");
        assert!(p.rows.windows(2).all(|w| w[1].error < w[0].error));
    }

    #[test]
    fn outputs_are_unitary() {
        let (x, y) = (h(paulis::sigma_x()), h(paulis::sigma_y()));
        for n in [1, 2, 7, 100] {
            assert!(trotter_sum(&x, &y, 0.4, 2.0, n).unwrap().unitarity_residual() < 1e-12);
            assert!(lie_product(&x, &y, n).unwrap().unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn degenerate_sweeps() {
        let s = reference_sweep(Formula::Sum, &[8]).unwrap();
        assert_eq!(s.rows.len(), 1);
        assert!(s.slope.is_none());
        assert!(reference_sweep(Formula::Sum, &[]).is_err());
        assert!(reference_sweep(Formula::Sum, &[4, 2]).is_err());
        assert!(trotter_sum(&h(paulis::sigma_x()), &h(paulis::sigma_y()), 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn slope_of_exact_power_law() {
        let rows: Vec<SweepRow> = [2usize, 4, 8, 16].iter().map(|&n| SweepRow { n, error: 3.0 / (n * n) as f64 }).collect();
        assert!((loglog_slope(&rows).unwrap() + 2.0).abs() < 1e-12);
    }
}
