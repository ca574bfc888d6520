//! Matrix-free spin operators on bitmask bases.
//!
//! The Hamiltonian is `H = ½ Σ_{edges} J_ij (¼ − s_i·s_j)` with every
//! unordered pair counted once. Using `s_i·s_j = P_ij/2 − ¼` for the swap
//! `P_ij`, each edge contributes `(J_ij/4)(1 − P_ij)`: zero on basis states
//! whose bits `i` and `j` agree, and `(J/4)(x[m] − x[m ⊕ bits])` otherwise.
//! All operators here are real symmetric in the computational basis and
//! preserve total `S^z`.

use std::ops::{AddAssign, Mul, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::basis::{Basis, BasisError, Mask, Space, StateVector};
use crate::config::DEFAULT_DENSE_CAP;
use crate::graph::CouplingGraph;

/// Rows per rayon task; smaller sectors run on the calling thread.
const PAR_MIN_DIM: usize = 1 << 13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("vector lives on {found:?} but the operator is bound to {expected:?}")]
    SectorMismatch { expected: Space, found: Space },
    #[error("sector dimension {dim} exceeds the dense cap {cap}")]
    SectorTooLargeForDense { dim: usize, cap: usize },
    #[error("site index out of range: ({i}, {j}) for {n} sites")]
    SiteOutOfRange { i: usize, j: usize, n: usize },
    #[error("operator needs {expected} sites, basis has {found}")]
    SiteCountMismatch { expected: usize, found: usize },
    #[error("matrix is not unitary: ‖u†u − 1‖ = {0:e}")]
    NotUnitary(f64),
    #[error("matrix is not special unitary: |det u − 1| = {0:e}")]
    NotSpecialUnitary(f64),
    #[error("coupling must be positive and finite, got {0}")]
    InvalidCoupling(f64),
    #[error(transparent)]
    Basis(#[from] BasisError),
}

/// Scalars an operator can act on: real vectors for the eigensolvers,
/// complex ones for rotated states.
pub trait Amplitude: Copy + Send + Sync + Zero + AddAssign + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl Amplitude for f64 {}
impl Amplitude for Complex64 {}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    Hamiltonian(Arc<CouplingGraph>),
    TotalSpinSquared,
    /// `s_i·s_j`
    PairCoupling(usize, usize),
    /// `P_ij`, exchanging spins `i` and `j`
    Swap(usize, usize),
}

/// An operator bound to one basis.
#[derive(Debug, Clone)]
pub struct ImplicitOperator {
    kind: OperatorKind,
    basis: Arc<Basis>,
}

#[inline]
fn swap_bits(mask: Mask, i: usize, j: usize) -> Mask {
    let bits = (1 << i) | (1 << j);
    if ((mask >> i) ^ (mask >> j)) & 1 == 1 {
        mask ^ bits
    } else {
        mask
    }
}

impl ImplicitOperator {
    pub fn new(kind: OperatorKind, basis: Arc<Basis>) -> Result<Self, OperatorError> {
        let n = basis.sites();
        match &kind {
            OperatorKind::Hamiltonian(g) if g.vertex_count() != n => {
                return Err(OperatorError::SiteCountMismatch { expected: g.vertex_count(), found: n });
            }
            OperatorKind::PairCoupling(i, j) | OperatorKind::Swap(i, j) if *i >= n || *j >= n || i == j => {
                return Err(OperatorError::SiteOutOfRange { i: *i, j: *j, n });
            }
            _ => {}
        }
        Ok(Self { kind, basis })
    }

    pub fn hamiltonian(graph: Arc<CouplingGraph>, basis: Arc<Basis>) -> Result<Self, OperatorError> {
        Self::new(OperatorKind::Hamiltonian(graph), basis)
    }

    pub fn total_spin_squared(basis: Arc<Basis>) -> Self {
        Self { kind: OperatorKind::TotalSpinSquared, basis }
    }

    pub fn pair_coupling(i: usize, j: usize, basis: Arc<Basis>) -> Result<Self, OperatorError> {
        Self::new(OperatorKind::PairCoupling(i, j), basis)
    }

    pub fn swap(i: usize, j: usize, basis: Arc<Basis>) -> Result<Self, OperatorError> {
        Self::new(OperatorKind::Swap(i, j), basis)
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `y = op · x` for a bound [`StateVector`].
    pub fn apply(&self, x: &StateVector) -> Result<StateVector, OperatorError> {
        let expected = self.basis.space();
        if x.space != expected {
            return Err(OperatorError::SectorMismatch { expected, found: x.space });
        }
        let mut y = vec![Complex64::zero(); x.amplitudes.len()];
        self.apply_into(&x.amplitudes, &mut y);
        Ok(StateVector::new(expected, y))
    }

    /// `y = op · x` on raw amplitude slices of length `dim()`.
    ///
    /// Each output entry is a gather over its own row, so large bases are
    /// split into independent row ranges.
    pub fn apply_into<T: Amplitude>(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.dim(), "input length does not match the basis");
        assert_eq!(y.len(), self.dim(), "output length does not match the basis");
        if y.len() >= PAR_MIN_DIM {
            y.par_chunks_mut(PAR_MIN_DIM / 4).enumerate().for_each(|(chunk, out)| {
                let offset = chunk * (PAR_MIN_DIM / 4);
                for (r, slot) in out.iter_mut().enumerate() {
                    *slot = self.row(offset + r, x);
                }
            });
        } else {
            for (r, slot) in y.iter_mut().enumerate() {
                *slot = self.row(r, x);
            }
        }
    }

    pub fn apply_vec<T: Amplitude>(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); x.len()];
        self.apply_into(x, &mut y);
        y
    }

    #[inline]
    fn lookup<T: Amplitude>(&self, x: &[T], mask: Mask) -> T {
        match self.basis.index(mask) {
            Some(idx) => x[idx],
            None => unreachable!("swap left the bound sector"),
        }
    }

    #[inline]
    fn row<T: Amplitude>(&self, r: usize, x: &[T]) -> T {
        let mask = self.basis.mask(r);
        let xr = x[r];
        match &self.kind {
            OperatorKind::Hamiltonian(g) => {
                let mut acc = T::zero();
                for e in g.edges() {
                    let swapped = swap_bits(mask, e.i, e.j);
                    if swapped != mask {
                        acc += (xr - self.lookup(x, swapped)) * (0.25 * e.coupling);
                    }
                }
                acc
            }
            OperatorKind::TotalSpinSquared => {
                let n = self.basis.sites();
                let nf = n as f64;
                // Σ_{i<j} P_ij, with equal-bit pairs acting as the identity.
                let mut acc = xr * (0.75 * nf - 0.25 * nf * (nf - 1.0));
                for i in 0..n {
                    for j in i + 1..n {
                        let swapped = swap_bits(mask, i, j);
                        acc += if swapped == mask { xr } else { self.lookup(x, swapped) };
                    }
                }
                acc
            }
            OperatorKind::PairCoupling(i, j) => {
                let swapped = swap_bits(mask, *i, *j);
                let px = if swapped == mask { xr } else { self.lookup(x, swapped) };
                px * 0.5 - xr * 0.25
            }
            OperatorKind::Swap(i, j) => {
                let swapped = swap_bits(mask, *i, *j);
                if swapped == mask {
                    xr
                } else {
                    self.lookup(x, swapped)
                }
            }
        }
    }

    /// Dense matrix `⟨a|op|b⟩`, built column by column from [`apply_into`](Self::apply_into).
    pub fn materialize_dense(&self) -> Result<DMatrix<f64>, OperatorError> {
        self.materialize_dense_with_cap(DEFAULT_DENSE_CAP)
    }

    pub fn materialize_dense_with_cap(&self, cap: usize) -> Result<DMatrix<f64>, OperatorError> {
        let dim = self.dim();
        if dim > cap {
            return Err(OperatorError::SectorTooLargeForDense { dim, cap });
        }
        let mut m = DMatrix::zeros(dim, dim);
        let mut unit = vec![0.0; dim];
        let mut col = vec![0.0; dim];
        for b in 0..dim {
            unit[b] = 1.0;
            self.apply_into(&unit, &mut col);
            m.column_mut(b).copy_from_slice(&col);
            unit[b] = 0.0;
        }
        Ok(m)
    }
}

/// Eigenvalues (ascending) of one edge term `(J/2)(¼ − s_i·s_j)` on two spins.
pub fn edge_term_eigenvalues(coupling: f64) -> Result<[f64; 4], OperatorError> {
    let graph = CouplingGraph::build(2, &[(0, 1, coupling)]).map_err(|_| OperatorError::InvalidCoupling(coupling))?;
    let basis = Arc::new(Basis::full(2)?);
    let dense = ImplicitOperator::hamiltonian(Arc::new(graph), basis)?.materialize_dense()?;
    let mut values: Vec<f64> = SymmetricEigen::new(dense).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok([values[0], values[1], values[2], values[3]])
}

/// True iff the two-spin edge term has spectrum `{0, 0, 0, J/2}` within `tol`.
///
/// This is the positive-semidefinite building block of `H`: each edge term
/// is a nonnegative multiple of the singlet projector.
pub fn edge_term_spectrum_check(coupling: f64, tol: f64) -> bool {
    match edge_term_eigenvalues(coupling) {
        Ok(values) => {
            let expected = [0.0, 0.0, 0.0, coupling / 2.0];
            values.iter().zip(expected).all(|(v, e)| (v - e).abs() < tol)
        }
        Err(_) => false,
    }
}

/// A 2×2 special-unitary matrix, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2(pub [[Complex64; 2]; 2]);

impl Su2 {
    pub const IDENTITY: Su2 = Su2([
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ]);

    /// Validates `‖u†u − 1‖ < 1e-10` (Frobenius) and `|det u − 1| < 1e-10`.
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self, OperatorError> {
        let mut dev = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let prod: Complex64 = (0..2).map(|t| m[t][r].conj() * m[t][c]).sum();
                let target = if r == c { 1.0 } else { 0.0 };
                dev += (prod - target).norm_sqr();
            }
        }
        let dev = dev.sqrt();
        if dev.is_nan() || dev >= 1e-10 {
            return Err(OperatorError::NotUnitary(dev));
        }
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let det_dev = (det - 1.0).norm();
        if det_dev.is_nan() || det_dev >= 1e-10 {
            return Err(OperatorError::NotSpecialUnitary(det_dev));
        }
        Ok(Su2(m))
    }

    /// `[[a, −b̄], [b, ā]]` with `(a, b)` the first column.
    pub fn from_column(a: Complex64, b: Complex64) -> Result<Self, OperatorError> {
        Self::new([[a, -b.conj()], [b, a.conj()]])
    }

    /// Rotation `exp(−i θ n·σ/2)` about the unit axis `(nx, ny, nz)`.
    pub fn rotation(theta: f64, axis: [f64; 3]) -> Result<Self, OperatorError> {
        let len = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        let [nx, ny, nz] = axis.map(|a| a / len);
        let (s, c) = (theta / 2.0).sin_cos();
        Self::new([
            [Complex64::new(c, -nz * s), Complex64::new(-ny * s, -nx * s)],
            [Complex64::new(ny * s, -nx * s), Complex64::new(c, nz * s)],
        ])
    }

    /// Haar-distributed sample: a normalized pair of complex Gaussians as first column.
    pub fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-12 {
                continue;
            }
            let a = Complex64::new(g[0], g[1]) / norm;
            let b = Complex64::new(g[2], g[3]) / norm;
            if let Ok(u) = Self::from_column(a, b) {
                return u;
            }
        }
    }

    pub fn column0(&self) -> (Complex64, Complex64) {
        (self.0[0][0], self.0[1][0])
    }
}

/// `⊗_i u|↑⟩` on the full `2^N` space.
///
/// Site `i` contributes `u₀₀` when its bit is clear (up) and `u₁₀` when set.
pub fn rotated_product_state(u: &Su2, n: usize) -> Result<StateVector, OperatorError> {
    let basis = Basis::full(n)?;
    let (up, down) = u.column0();
    // amplitude(m) = up^(N − popcount) · down^popcount, built by doubling.
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(amps.len() * 2);
        next.extend(amps.iter().map(|a| a * up));
        next.extend(amps.iter().map(|a| a * down));
        amps = next;
    }
    Ok(StateVector::new(basis.space(), amps))
}

/// Spin axis for [`total_spin_component`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// `S^α x = Σ_i s_i^α x` on a full-space vector.
///
/// With bit set meaning down, `s^z` contributes `+½` for a clear bit and `−½`
/// for a set one; `s^x` flips the bit with weight `½`; `s^y` flips it with
/// weight `+i/2` going up→down and `−i/2` going down→up.
pub fn total_spin_component(axis: Axis, n: usize, x: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(x.len(), 1usize << n, "expected a full-space vector");
    let mut y = vec![Complex64::zero(); x.len()];
    for (m, out) in y.iter_mut().enumerate() {
        let mut acc = Complex64::zero();
        for site in 0..n {
            let bit = (m >> site) & 1;
            match axis {
                Axis::Z => acc += x[m] * if bit == 0 { 0.5 } else { -0.5 },
                Axis::X => acc += x[m ^ (1 << site)] * 0.5,
                // ⟨m|s^y|m'⟩ with m' = m ⊕ site: ⟨↓|s^y|↑⟩ = i/2, ⟨↑|s^y|↓⟩ = −i/2.
                Axis::Y => {
                    let factor = if bit == 1 { Complex64::new(0.0, 0.5) } else { Complex64::new(0.0, -0.5) };
                    acc += x[m ^ (1 << site)] * factor;
                }
            }
        }
        *out = acc;
    }
    y
}

/// A random real vector from a seeded generator, for tests and Lanczos starts.
pub fn random_real<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{all_up_state, SectorBasis};
    use crate::graph::{generate, CouplingRule, GraphKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sector(n: usize, k: usize) -> Arc<Basis> {
        Arc::new(Basis::sector(n, k).unwrap())
    }

    fn two_site(j: f64) -> Arc<CouplingGraph> {
        Arc::new(CouplingGraph::build(2, &[(0, 1, j)]).unwrap())
    }

    #[test]
    fn singlet_energy_is_half_coupling() {
        let h = ImplicitOperator::hamiltonian(two_site(2.0), sector(2, 1)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // masks 0b01 (site 0 down) and 0b10 (site 1 down)
        let singlet = StateVector::from_real(Space::Sector { n: 2, k: 1 }, &[-s, s]);
        let y = h.apply(&singlet).unwrap();
        for (a, b) in y.amplitudes.iter().zip(&singlet.amplitudes) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn all_up_is_annihilated() {
        let h = ImplicitOperator::hamiltonian(two_site(2.0), sector(2, 0)).unwrap();
        let y = h.apply(&all_up_state(2).unwrap()).unwrap();
        assert_eq!(y.norm(), 0.0);
    }

    #[test]
    fn sector_mismatch_is_rejected() {
        let h = ImplicitOperator::hamiltonian(two_site(1.0), sector(2, 1)).unwrap();
        assert!(matches!(h.apply(&all_up_state(2).unwrap()), Err(OperatorError::SectorMismatch { .. })));
        assert!(ImplicitOperator::swap(0, 2, sector(2, 1)).is_err());
        assert!(ImplicitOperator::pair_coupling(1, 1, sector(2, 1)).is_err());
        assert!(ImplicitOperator::hamiltonian(two_site(1.0), sector(3, 1)).is_err());
    }

    #[test]
    fn dense_two_site() {
        let h = ImplicitOperator::hamiltonian(two_site(1.0), sector(2, 1)).unwrap();
        let m = h.materialize_dense().unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[0.25, -0.25, -0.25, 0.25]));
        let p = ImplicitOperator::swap(0, 1, sector(2, 1)).unwrap().materialize_dense().unwrap();
        assert_eq!(p, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let big = ImplicitOperator::total_spin_squared(sector(14, 7));
        assert!(matches!(big.materialize_dense_with_cap(100), Err(OperatorError::SectorTooLargeForDense { .. })));
    }

    #[test]
    fn chain_matches_dense_product() {
        let g = Arc::new(generate(GraphKind::Chain(3), CouplingRule::Uniform(1.0)).unwrap());
        let h = ImplicitOperator::hamiltonian(g, sector(3, 1)).unwrap();
        let dense = h.materialize_dense().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = random_real(&mut rng, 3);
        let y = h.apply_vec(&x);
        let y_dense = &dense * nalgebra::DVector::from_column_slice(&x);
        for (a, b) in y.iter().zip(y_dense.iter()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn edge_term_spectra() {
        for (j, top) in [(1.0, 0.5), (2.0, 1.0), (0.3, 0.15)] {
            let vals = edge_term_eigenvalues(j).unwrap();
            for v in &vals[..3] {
                assert!(v.abs() < 1e-12);
            }
            assert!((vals[3] - top).abs() < 1e-12);
            assert!(edge_term_spectrum_check(j, 1e-12));
        }
        assert!(!edge_term_spectrum_check(-1.0, 1e-12));
    }

    #[test]
    fn su2_validation() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        assert!(Su2::new([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]).is_ok());
        assert!(matches!(
            Su2::new([[c(2.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.5, 0.0)]]),
            Err(OperatorError::NotUnitary(_))
        ));
        assert!(matches!(
            Su2::new([[c(0.0, 1.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]]),
            Err(OperatorError::NotSpecialUnitary(_))
        ));
    }

    #[test]
    fn product_state_examples() {
        let up = rotated_product_state(&Su2::IDENTITY, 4).unwrap();
        assert_eq!(up.amplitudes[0], Complex64::new(1.0, 0.0));
        assert!((up.norm() - 1.0).abs() < 1e-15);

        let flip = Su2::rotation(std::f64::consts::PI, [0.0, 1.0, 0.0]).unwrap();
        let down = rotated_product_state(&flip, 3).unwrap();
        assert!((down.amplitudes[0b111].norm() - 1.0).abs() < 1e-12);
        assert!((down.norm() - 1.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = Su2::haar(&mut rng);
        let psi = rotated_product_state(&u, 3).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        let s2 = ImplicitOperator::total_spin_squared(Arc::new(Basis::full(3).unwrap()));
        let s2psi = s2.apply(&psi).unwrap();
        let value = crate::basis::inner(&psi.amplitudes, &s2psi.amplitudes);
        assert!((value.re - 3.75).abs() < 1e-10 && value.im.abs() < 1e-10);
        for (a, b) in s2psi.amplitudes.iter().zip(&psi.amplitudes) {
            assert!((a - b * 3.75).norm() < 1e-10);
        }
    }

    #[test]
    fn spin_components_on_single_site_pairs() {
        // Two sites, |↑↑⟩: S^z = 1, S^+ annihilates it, S^x maps it to (|↓↑⟩ + |↑↓⟩)/2.
        let mut x = vec![Complex64::zero(); 4];
        x[0] = Complex64::new(1.0, 0.0);
        let z = total_spin_component(Axis::Z, 2, &x);
        assert_eq!(z[0], Complex64::new(1.0, 0.0));
        let sx = total_spin_component(Axis::X, 2, &x);
        assert_eq!(sx[1], Complex64::new(0.5, 0.0));
        assert_eq!(sx[2], Complex64::new(0.5, 0.0));
        let sy = total_spin_component(Axis::Y, 2, &x);
        // s^y|↑⟩ = (i/2)|↓⟩
        assert_eq!(sy[1], Complex64::new(0.0, 0.5));
        // S² = Sx² + Sy² + Sz² on a random full-space vector.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 4;
        let v: Vec<Complex64> =
            (0..16).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let mut sum = vec![Complex64::zero(); 16];
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let once = total_spin_component(axis, n, &v);
            let twice = total_spin_component(axis, n, &once);
            for (s, t) in sum.iter_mut().zip(twice) {
                *s += t;
            }
        }
        let s2 = ImplicitOperator::total_spin_squared(Arc::new(Basis::full(n).unwrap()));
        let direct = s2.apply_vec(&v);
        for (a, b) in sum.iter().zip(direct) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn large_sector_parallel_path_matches_serial_rows() {
        let g = Arc::new(generate(GraphKind::Ring(14), CouplingRule::Uniform(1.0)).unwrap());
        let b = sector(14, 7);
        let sb = match b.as_ref() {
            Basis::Sector(s) => s.clone(),
            _ => unreachable!(),
        };
        let h = ImplicitOperator::hamiltonian(g, b).unwrap();
        assert!(h.dim() < PAR_MIN_DIM);
        let g16 = Arc::new(generate(GraphKind::Ring(16), CouplingRule::Uniform(1.0)).unwrap());
        let h16 = ImplicitOperator::hamiltonian(g16, sector(16, 8)).unwrap();
        assert!(h16.dim() >= PAR_MIN_DIM);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_real(&mut rng, h16.dim());
        let y = h16.apply_vec(&x);
        for r in (0..h16.dim()).step_by(97) {
            assert_eq!(y[r], h16.row(r, &x));
        }
        assert_eq!(sb.len(), 3432);
    }

    #[test]
    fn sector_basis_for_operator_is_rank_consistent() {
        let s = SectorBasis::enumerate(6, 3).unwrap();
        for (p, &m) in s.states().iter().enumerate() {
            assert_eq!(s.rank(m), Some(p));
        }
    }
}
