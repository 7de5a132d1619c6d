//! Collective decoherence: total-spin operators, the spin-0 decoherence-free
//! subspace, and the continuous stabilizer `D(v) = exp(i v·S)`.
//!
//! Under collective coupling every qubit sees the same bath operator, so the
//! system couples through `S_α = Σ_j σ_α^j`. A state is decoherence-free iff
//! it is annihilated by all three `S_α`, equivalently iff it is fixed by
//! every `D(v)`. `D(v)` factorizes as `G(v)^{⊗K}` with
//! `G(v) = cos‖v‖ I + i sin‖v‖ (v̂·σ)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::hilbert::{self, apply_local_amplitudes, Axis, LocalOperator, StateVector};
use crate::linalg::{
    check_dim, expm_general, hermitian_expm, kron, nullspace_basis, paulis, vstack,
    ComplexMatrix, HermitianMatrix, C64, DEFAULT_NULLSPACE_TOL,
};
use crate::report::{Check, VerificationReport};

/// Fixed sample count for random stabilizer parameters.
pub const STABILIZER_SAMPLES: usize = 20;

/// Seed of the fixed stabilizer sample used by the checks in this module.
pub const SAMPLE_SEED: u64 = 0xD15_5EED;

/// Agreement required between the exponential and product forms of `D(v)`.
pub const FORM_AGREEMENT_TOL: f64 = 1e-10;

/// `S_x, S_y, S_z` on `K` qubits as dense matrices.
#[derive(Clone, Debug)]
pub struct CollectiveOperators {
    pub num_qubits: usize,
    pub sx: ComplexMatrix,
    pub sy: ComplexMatrix,
    pub sz: ComplexMatrix,
}

impl CollectiveOperators {
    pub fn component(&self, axis: Axis) -> &ComplexMatrix {
        match axis {
            Axis::X => &self.sx,
            Axis::Y => &self.sy,
            Axis::Z => &self.sz,
        }
    }

    /// `[S_x; S_y; S_z]` stacked vertically.
    pub fn stacked(&self) -> Result<ComplexMatrix> {
        check_dim(3 << self.num_qubits)?;
        vstack(&[&self.sx, &self.sy, &self.sz])
    }

    /// `v·S` for real `v`.
    pub fn dot(&self, v: [f64; 3]) -> Result<HermitianMatrix> {
        HermitianMatrix::new(
            &(&self.sx.scale(C64::new(v[0], 0.0)) + &self.sy.scale(C64::new(v[1], 0.0)))
                + &self.sz.scale(C64::new(v[2], 0.0)),
        )
    }
}

fn check_register(k: usize) -> Result<()> {
    if k == 0 || k > hilbert::MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "collective register must have 1..={} qubits, got {k}",
            hilbert::MAX_QUBITS
        )));
    }
    check_dim(1 << k)
}

pub fn collective_operators(k: usize) -> Result<CollectiveOperators> {
    check_register(k)?;
    let dim = 1usize << k;
    let mut sx = nalgebra::DMatrix::<C64>::zeros(dim, dim);
    let mut sy = sx.clone();
    let mut sz = sx.clone();
    for x in 0..dim {
        for j in 1..=k {
            let shift = k - j;
            let bit = (x >> shift) & 1;
            let y = x ^ (1 << shift);
            sx[(y, x)] += C64::new(1.0, 0.0);
            // σ_y|0⟩ = i|1⟩, σ_y|1⟩ = −i|0⟩
            sy[(y, x)] += if bit == 0 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) };
            sz[(x, x)] += if bit == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) };
        }
    }
    Ok(CollectiveOperators {
        num_qubits: k,
        sx: ComplexMatrix::from_dmatrix_unchecked(sx),
        sy: ComplexMatrix::from_dmatrix_unchecked(sy),
        sz: ComplexMatrix::from_dmatrix_unchecked(sz),
    })
}

/// `S_α·amps` without building the `2^K` matrix.
pub fn collective_apply(axis: Axis, amps: &[C64], k: usize) -> Result<Vec<C64>> {
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for j in 1..=k {
        let term = apply_local_amplitudes(&LocalOperator::pauli(axis, j)?, amps, k)?;
        out.iter_mut().zip(term).for_each(|(o, t)| *o += t);
    }
    Ok(out)
}

/// `max_α ‖S_α ψ‖`.
pub fn collective_residual(s: &StateVector) -> Result<f64> {
    let mut worst = 0.0f64;
    for axis in Axis::ALL {
        let v = collective_apply(axis, s.amplitudes(), s.num_qubits())?;
        worst = worst.max(hilbert::norm(&v));
    }
    Ok(worst)
}

/// Number of spin-0 states of `k` spin-½ particles:
/// `C(k, k/2) − C(k, k/2 + 1)`.
pub fn dfs_dimension(k: usize) -> Result<usize> {
    if k == 0 || k % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "spin-0 sector needs an even, positive qubit count, got {k}"
        )));
    }
    Ok(binomial(k, k / 2) - binomial(k, k / 2 + 1))
}

fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Orthonormal basis and projector of the collective DFS on `K` qubits.
#[derive(Clone, Debug)]
pub struct DfsBasis {
    pub num_qubits: usize,
    pub vectors: Vec<StateVector>,
}

impl DfsBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// `P·amps`.
    pub fn project(&self, amps: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        for b in &self.vectors {
            let c = hilbert::inner_product(b.amplitudes(), amps);
            out.iter_mut().zip(b.amplitudes()).for_each(|(o, x)| *o += c * x);
        }
        out
    }

    /// `‖(I − P)·amps‖`, computed from the residual vector.
    pub fn leakage(&self, amps: &[C64]) -> f64 {
        let p = self.project(amps);
        amps.iter()
            .zip(&p)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Dense projector `Σ_b |b⟩⟨b|`.
    pub fn projector(&self) -> Result<ComplexMatrix> {
        let dim = 1usize << self.num_qubits;
        check_dim(dim)?;
        let mut p = ComplexMatrix::zeros(dim, dim);
        for b in &self.vectors {
            p = &p + &ComplexMatrix::outer(b.amplitudes(), b.amplitudes());
        }
        Ok(p)
    }

    /// A random unit vector inside the DFS.
    pub fn random_state<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<StateVector> {
        let coeffs = hilbert::gaussian_amplitudes(self.dim(), rng);
        let mut amps = vec![C64::new(0.0, 0.0); 1 << self.num_qubits];
        for (b, c) in self.vectors.iter().zip(&coeffs) {
            amps.iter_mut().zip(b.amplitudes()).for_each(|(o, x)| *o += c * x);
        }
        StateVector::normalized(self.num_qubits, amps)
    }
}

static DFS_CACHE: [OnceLock<DfsBasis>; hilbert::MAX_QUBITS + 1] = [const { OnceLock::new() }; hilbert::MAX_QUBITS + 1];

/// The DFS as the joint nullspace of `S_x, S_y, S_z` (SVD of the stack).
/// Computed once per `k`.
pub fn dfs_basis(k: usize) -> Result<DfsBasis> {
    if let Some(b) = DFS_CACHE.get(k).and_then(OnceLock::get) {
        return Ok(b.clone());
    }
    let built = build_dfs_basis(k)?;
    Ok(DFS_CACHE[k].get_or_init(|| built).clone())
}

fn build_dfs_basis(k: usize) -> Result<DfsBasis> {
    let expected = dfs_dimension(k)?;
    let ops = collective_operators(k)?;
    let stacked = ops.stacked()?;
    let raw = nullspace_basis(&stacked, DEFAULT_NULLSPACE_TOL)?;
    if raw.len() != expected {
        return Err(Error::Numeric {
            what: "DFS nullspace rank",
            residual: (raw.len() as f64 - expected as f64).abs(),
        });
    }
    let mut vectors = Vec::with_capacity(raw.len());
    for v in raw {
        let s = StateVector::normalized(k, v)?;
        let residual = collective_residual(&s)?;
        if residual > 1e-10 {
            return Err(Error::Numeric {
                what: "DFS basis annihilation",
                residual,
            });
        }
        vectors.push(s);
    }
    Ok(DfsBasis { num_qubits: k, vectors })
}

/// `sin z / z` with the removable singularity at 0.
fn sinc(z: C64) -> C64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        C64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// `‖v‖` as the principal square root of `Σ v_α²` (complex for complex `v`).
pub fn complex_norm(v: [C64; 3]) -> C64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// The single-qubit factor `G(v) = exp(i v·σ) = cos‖v‖ I + i sin‖v‖ (v·σ)/‖v‖`.
pub fn collective_factor(v: [C64; 3]) -> ComplexMatrix {
    let z = complex_norm(v);
    let i = C64::new(0.0, 1.0);
    let vs = &(&paulis::sigma_x().scale(v[0]) + &paulis::sigma_y().scale(v[1]))
        + &paulis::sigma_z().scale(v[2]);
    &ComplexMatrix::identity(2).scale(z.cos()) + &vs.scale(i * sinc(z))
}

/// `G(v)^{⊗k}`.
pub fn product_form(v: [C64; 3], k: usize) -> Result<ComplexMatrix> {
    check_register(k)?;
    let g = collective_factor(v);
    let mut acc = g.clone();
    for _ in 1..k {
        acc = kron(&acc, &g)?;
    }
    Ok(acc)
}

/// `exp(i v·S)` from the collective operators directly.
pub fn exponential_form(v: [C64; 3], k: usize) -> Result<ComplexMatrix> {
    let ops = collective_operators(k)?;
    if v.iter().all(|z| z.im == 0.0) {
        hermitian_expm(&ops.dot([v[0].re, v[1].re, v[2].re])?, 1.0)
    } else {
        let i = C64::new(0.0, 1.0);
        let gen = &(&ops.sx.scale(i * v[0]) + &ops.sy.scale(i * v[1])) + &ops.sz.scale(i * v[2]);
        expm_general(&gen)
    }
}

/// An element `D(v)` of the continuous collective stabilizer.
#[derive(Clone, Debug)]
pub struct StabilizerElement {
    pub v: [C64; 3],
    pub num_qubits: usize,
    pub matrix: ComplexMatrix,
}

impl StabilizerElement {
    pub fn is_real(&self) -> bool {
        self.v.iter().all(|z| z.im == 0.0)
    }
}

/// Builds `D(v)` in both exponential and product form, requires them to
/// agree, and returns the product form.
pub fn stabilizer_element(v: [C64; 3], k: usize) -> Result<StabilizerElement> {
    let product = product_form(v, k)?;
    let exponential = exponential_form(v, k)?;
    let residual = product.distance(&exponential);
    if residual > FORM_AGREEMENT_TOL * product.frobenius_norm().max(1.0) {
        return Err(Error::Numeric {
            what: "stabilizer product/exponential agreement",
            residual,
        });
    }
    Ok(StabilizerElement {
        v,
        num_qubits: k,
        matrix: product,
    })
}

pub fn real_v(v: [f64; 3]) -> [C64; 3] {
    v.map(|x| C64::new(x, 0.0))
}

/// Direction uniform on the sphere, magnitude uniform in `[0, π]`.
pub fn random_rotation_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let cos_t: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let mag: f64 = rng.random_range(0.0..=std::f64::consts::PI);
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    [mag * sin_t * phi.cos(), mag * sin_t * phi.sin(), mag * cos_t]
}

/// The fixed sample of real stabilizer parameters used by the checks.
pub fn fixed_rotation_sample(count: usize) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    (0..count).map(|_| random_rotation_vector(&mut rng)).collect()
}

/// `D(v)|ψ⟩` for real `v`, applied qubit by qubit.
pub fn apply_stabilizer(s: &StateVector, v: [f64; 3]) -> Result<StateVector> {
    let g = collective_factor(real_v(v));
    let mut amps = s.amplitudes().to_vec();
    for q in 1..=s.num_qubits() {
        amps = apply_local_amplitudes(&LocalOperator::single(q, g.clone())?, &amps, s.num_qubits())?;
    }
    StateVector::normalized(s.num_qubits(), amps)
}

/// `G^{⊗k}·M`, applying the 2×2 factor qubit by qubit to every column.
fn product_times(g: &ComplexMatrix, m: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    let dim = m.rows();
    let mut cols = Vec::with_capacity(m.cols());
    for c in 0..m.cols() {
        let mut col = m.column(c);
        for q in 1..=k {
            col = apply_local_amplitudes(&LocalOperator::single(q, g.clone())?, &col, k)?;
        }
        cols.push(col);
    }
    Ok(ComplexMatrix::from_dmatrix_unchecked(nalgebra::DMatrix::from_fn(dim, m.cols(), |r, c| cols[c][r])))
}

/// `‖[M, D(v)]‖_F` for real `v` without forming `D(v)` densely.
pub fn stabilizer_commutator_norm(m: &ComplexMatrix, v: [f64; 3]) -> Result<f64> {
    let dim = m.rows();
    if !m.is_square() || !dim.is_power_of_two() || dim < 2 {
        return Err(Error::Shape(format!("operator of shape {}x{} is not on qubits", dim, m.cols())));
    }
    let k = dim.trailing_zeros() as usize;
    check_register(k)?;
    let g = collective_factor(real_v(v));
    // M·D = (D†·M†)†
    let md = product_times(&g.adjoint(), &m.adjoint(), k)?.adjoint();
    let dm = product_times(&g, m, k)?;
    Ok(md.distance(&dm))
}

/// Checks `S_α|ψ⟩ = 0` and `D(v)|ψ⟩ = |ψ⟩` over the fixed sample of `v`.
pub fn check_dfs_condition(states: &[StateVector], k: usize, tol: f64) -> Result<VerificationReport> {
    if let Some(s) = states.iter().find(|s| s.num_qubits() != k) {
        return Err(Error::Shape(format!(
            "{}-qubit state in a {k}-qubit DFS check",
            s.num_qubits()
        )));
    }
    let sample = fixed_rotation_sample(STABILIZER_SAMPLES);
    let mut annihilation = 0.0f64;
    let mut invariance = 0.0f64;
    for s in states {
        annihilation = annihilation.max(collective_residual(s)?);
        for &v in &sample {
            invariance = invariance.max(apply_stabilizer(s, v)?.distance(s));
        }
    }
    Ok(VerificationReport::new("dfs-condition")
        .with(
            Check::at_most("collective_annihilation", annihilation, tol)
                .with_details(format!("max ‖S_α ψ‖ over {} states", states.len())),
        )
        .with(
            Check::at_most("stabilizer_invariance", invariance, tol)
                .with_details(format!("max ‖D(v)ψ − ψ‖ over {} samples", sample.len())),
        ))
}

/// Sufficient condition for a Hamiltonian to keep DFS states inside the DFS
/// at all times, specialized to `v′ = v`: `[H, D(v)] = 0`. Also checks the
/// dynamical consequence `‖(I − P)·exp(iθH)ψ‖ ≈ 0` on random DFS states.
pub fn theorem_check(h: &HermitianMatrix, samples: usize, tol: f64) -> Result<VerificationReport> {
    let dim = h.dim();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::Shape(format!("Hamiltonian dimension {dim} is not 2^k")));
    }
    let k = dim.trailing_zeros() as usize;
    let mut commutator = 0.0f64;
    for v in fixed_rotation_sample(samples) {
        commutator = commutator.max(stabilizer_commutator_norm(h.matrix(), v)?);
    }
    let mut report = VerificationReport::new("theorem").with(
        Check::at_most("commutes_with_stabilizer", commutator, tol)
            .with_details(format!("max ‖[H, D(v)]‖_F over {samples} samples")),
    );

    if k.is_multiple_of(2) {
        let dfs = dfs_basis(k)?;
        let spectral = h.spectral()?;
        let u_basis = spectral.eigenvectors();
        let u_dag = u_basis.adjoint();
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 0xA5A5);
        let mut leakage = 0.0f64;
        for _ in 0..samples {
            let psi = dfs.random_state(&mut rng)?;
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let mut coeffs = u_dag.mul_vec(psi.amplitudes());
            for (c, &l) in coeffs.iter_mut().zip(spectral.eigenvalues()) {
                *c *= C64::from_polar(1.0, theta * l);
            }
            let evolved = u_basis.mul_vec(&coeffs);
            leakage = leakage.max(dfs.leakage(&evolved));
        }
        report.push(
            Check::at_most("evolution_stays_in_dfs", leakage, tol)
                .with_details(format!("max ‖(I−P)e^{{iθH}}ψ‖ over {samples} draws")),
        );
    }
    Ok(report)
}
