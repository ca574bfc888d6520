//! Per-sector spectra and the zero-energy ground space.
//!
//! Small sectors are diagonalized densely. Larger ones use Lanczos with full
//! reorthogonalization; eigenpairs are found one at a time, each run deflated
//! against the pairs already locked, which also resolves exact degeneracies
//! that a single Krylov sequence cannot see.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::basis::{Basis, BasisError, SectorBasis, Space, StateVector};
use crate::config::{Tolerances, DEFAULT_DENSE_CAP, DEFAULT_FULL_SPACE_CAP};
use crate::graph::CouplingGraph;
use crate::operators::{random_real, ImplicitOperator, OperatorError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("sector dimension {dim} exceeds the dense cap {cap}")]
    SectorTooLargeForDense { dim: usize, cap: usize },
    #[error("eigensolver failure: {0}")]
    EigensolverFailure(String),
    #[error("Lanczos did not converge after {max_iters} restarts (residual {residual:e})")]
    NoConvergence { max_iters: usize, residual: f64 },
    #[error(
        "ambiguous kernel in sector k={k}: eigenvalue {eigenvalue:e} lies between the energy threshold \
         {energy_threshold:e} and the gap threshold {gap_threshold:e}"
    )]
    AmbiguousKernel { k: usize, eigenvalue: f64, energy_threshold: f64, gap_threshold: f64 },
    #[error("invalid solver parameter: {0}")]
    InvalidParameter(String),
    #[error("full space of dimension 2^{n} exceeds the cap {cap}")]
    FullSpaceTooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Basis(#[from] BasisError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMode {
    Dense,
    Krylov,
}

/// Eigenvalues of `H` restricted to one `S^z` sector, ascending.
#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    pub n: usize,
    pub k: usize,
    pub eigenvalues: Vec<f64>,
    /// Column `p` pairs with `eigenvalues[p]`; unit norm.
    pub eigenvectors: Vec<Vec<f64>>,
    pub mode: SolverMode,
    /// `‖Hv − λv‖` for each reported pair.
    pub residual_norms: Vec<f64>,
}

/// Lanczos controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovParams {
    /// Largest Krylov basis before an explicit restart.
    pub max_subspace: usize,
    pub max_restarts: usize,
    /// Absolute residual target `‖Hv − λv‖`.
    pub residual_tol: f64,
    pub seed: u64,
}

impl Default for KrylovParams {
    fn default() -> Self {
        Self { max_subspace: 120, max_restarts: 60, residual_tol: 1e-9, seed: 0x5eed }
    }
}

fn sector_label(op: &ImplicitOperator) -> (usize, usize) {
    match op.basis().space() {
        Space::Sector { n, k } => (n, k),
        Space::Full { n } => (n, usize::MAX),
    }
}

fn residual_norm(op: &ImplicitOperator, v: &[f64], lambda: f64) -> f64 {
    let hv = op.apply_vec(v);
    hv.iter().zip(v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt()
}

/// Flips `v` so its first largest-magnitude entry is positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() + 1e-14 {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Full eigendecomposition of the materialized operator.
pub fn dense_spectrum(op: &ImplicitOperator, dense_cap: usize) -> Result<SectorSpectrum, SolveError> {
    let (n, k) = sector_label(op);
    let dim = op.dim();
    if dim > dense_cap {
        return Err(SolveError::SectorTooLargeForDense { dim, cap: dense_cap });
    }
    let m = op.materialize_dense_with_cap(dense_cap)?;
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0)
        .ok_or_else(|| SolveError::EigensolverFailure(format!("dense eigensolver did not converge on sector k={k}")))?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&p| eig.eigenvalues[p]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&p| {
            let mut v: Vec<f64> = eig.eigenvectors.column(p).iter().copied().collect();
            fix_sign(&mut v);
            v
        })
        .collect();
    let residual_norms =
        eigenvalues.iter().zip(&eigenvectors).map(|(&lambda, v)| residual_norm(op, v, lambda)).collect();
    Ok(SectorSpectrum { n, k, eigenvalues, eigenvectors, mode: SolverMode::Dense, residual_norms })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

/// Two passes of classical Gram–Schmidt against every vector in `sets`.
fn orthogonalize(w: &mut [f64], sets: &[&[Vec<f64>]]) {
    for _ in 0..2 {
        for set in sets {
            for q in set.iter() {
                let c = dot(q, w);
                axpy(-c, q, w);
            }
        }
    }
}

/// Lanczos iteration on the orthogonal complement of `locked`.
struct DeflatedLanczos<'a> {
    op: &'a ImplicitOperator,
    params: KrylovParams,
    rng: ChaCha8Rng,
}

/// One converged pair with its explicit residual.
struct RitzPair {
    value: f64,
    vector: Vec<f64>,
    residual: f64,
}

impl DeflatedLanczos<'_> {
    fn random_start(&mut self, locked: &[Vec<f64>]) -> Result<Vec<f64>, SolveError> {
        for _ in 0..8 {
            let mut v = random_real(&mut self.rng, self.op.dim());
            orthogonalize(&mut v, &[locked]);
            let nv = norm(&v);
            if nv > 1e-8 {
                v.iter_mut().for_each(|x| *x /= nv);
                return Ok(v);
            }
        }
        Err(SolveError::EigensolverFailure("no start vector orthogonal to the locked pairs".into()))
    }

    /// Lowest eigenpair of `H` restricted to the complement of `locked`.
    fn lowest(&mut self, locked: &[Vec<f64>]) -> Result<RitzPair, SolveError> {
        let dim = self.op.dim();
        let complement = dim - locked.len();
        if complement == 0 {
            return Err(SolveError::InvalidParameter("no eigenpairs left in the sector".into()));
        }
        let max_sub = self.params.max_subspace.max(2).min(complement);
        let mut start = self.random_start(locked)?;
        let mut last_residual = f64::INFINITY;

        for _restart in 0..=self.params.max_restarts {
            let mut basis: Vec<Vec<f64>> = vec![start.clone()];
            let mut alphas = Vec::new();
            let mut betas: Vec<f64> = Vec::new();
            let mut scale = 0.0f64;
            loop {
                let j = basis.len() - 1;
                let mut w = self.op.apply_vec(&basis[j]);
                let alpha = dot(&basis[j], &w);
                alphas.push(alpha);
                axpy(-alpha, &basis[j], &mut w);
                if j > 0 {
                    axpy(-betas[j - 1], &basis[j - 1], &mut w);
                }
                orthogonalize(&mut w, &[locked, &basis]);
                let beta = norm(&w);
                scale = scale.max(alpha.abs() + beta);
                if basis.len() >= max_sub || beta <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
                    break;
                }
                w.iter_mut().for_each(|x| *x /= beta);
                betas.push(beta);
                basis.push(w);
            }

            let m = alphas.len();
            let t = DMatrix::from_fn(m, m, |r, c| {
                if r == c {
                    alphas[r]
                } else if r + 1 == c {
                    betas[r]
                } else if c + 1 == r {
                    betas[c]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::try_new(t, f64::EPSILON, 0)
                .ok_or_else(|| SolveError::EigensolverFailure("tridiagonal eigensolver did not converge".into()))?;
            let lowest = (0..m)
                .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
                .expect("nonempty tridiagonal");
            let mut ritz = vec![0.0; dim];
            for (coef, q) in eig.eigenvectors.column(lowest).iter().zip(&basis) {
                axpy(*coef, q, &mut ritz);
            }
            orthogonalize(&mut ritz, &[locked]);
            let nr = norm(&ritz);
            ritz.iter_mut().for_each(|x| *x /= nr);
            // Rayleigh quotient of the cleaned vector, then the true residual.
            let hv = self.op.apply_vec(&ritz);
            let value = dot(&ritz, &hv);
            let residual = hv.iter().zip(&ritz).map(|(a, b)| (a - value * b).powi(2)).sum::<f64>().sqrt();
            if residual <= self.params.residual_tol {
                fix_sign(&mut ritz);
                return Ok(RitzPair { value, vector: ritz, residual });
            }
            last_residual = residual;
            start = ritz;
        }
        Err(SolveError::NoConvergence { max_iters: self.params.max_restarts, residual: last_residual })
    }
}

/// Locks eigenpairs from the bottom of the spectrum until `stop` says enough.
fn krylov_collect(
    op: &ImplicitOperator,
    params: KrylovParams,
    mut stop: impl FnMut(&[f64]) -> bool,
) -> Result<SectorSpectrum, SolveError> {
    let (n, k) = sector_label(op);
    let mut solver = DeflatedLanczos { op, params, rng: ChaCha8Rng::seed_from_u64(params.seed) };
    let mut values = Vec::new();
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    let mut residuals = Vec::new();
    while vectors.len() < op.dim() && !stop(&values) {
        let pair = solver.lowest(&vectors)?;
        values.push(pair.value);
        vectors.push(pair.vector);
        residuals.push(pair.residual);
    }
    // Deflation yields ascending values up to convergence noise; make it exact.
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    Ok(SectorSpectrum {
        n,
        k,
        eigenvalues: order.iter().map(|&p| values[p]).collect(),
        eigenvectors: order.iter().map(|&p| vectors[p].clone()).collect(),
        mode: SolverMode::Krylov,
        residual_norms: order.iter().map(|&p| residuals[p]).collect(),
    })
}

/// Lowest `count` eigenpairs by deflated Lanczos. Asking for more pairs than
/// the sector holds returns all of them.
pub fn krylov_lowest(op: &ImplicitOperator, count: usize, params: KrylovParams) -> Result<SectorSpectrum, SolveError> {
    if count == 0 {
        return Err(SolveError::InvalidParameter("requested zero eigenpairs".into()));
    }
    krylov_collect(op, params, |found| found.len() >= count)
}

/// Chooses between dense and Krylov solves and fixes the thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverPolicy {
    /// Sectors up to this dimension are diagonalized densely.
    pub dense_cap: usize,
    pub tolerances: Tolerances,
    pub krylov: KrylovParams,
    /// Cap on `2^N` for full-space ground vectors.
    pub full_space_cap: usize,
    /// Solve sectors on the rayon pool.
    pub parallel: bool,
}

impl Default for SolverPolicy {
    fn default() -> Self {
        Self {
            dense_cap: DEFAULT_DENSE_CAP,
            tolerances: Tolerances::default(),
            krylov: KrylovParams::default(),
            full_space_cap: DEFAULT_FULL_SPACE_CAP,
            parallel: true,
        }
    }
}

/// Kernel evidence for one sector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorKernel {
    pub k: usize,
    pub dim: usize,
    pub mode: SolverMode,
    pub kernel_dim: usize,
    pub lowest: f64,
    /// Smallest eigenvalue above the energy threshold, if the sector has one.
    pub first_excited: Option<f64>,
    pub max_residual: f64,
}

/// Orthonormal basis of `ker H`, embedded in the full `2^N` space.
#[derive(Debug, Clone)]
pub struct GroundSpace {
    pub n: usize,
    pub vectors: Vec<StateVector>,
    pub per_sector_counts: BTreeMap<usize, usize>,
    pub energy_threshold: f64,
    pub gap_threshold: f64,
    /// Smallest eigenvalue over all sectors.
    pub min_eigenvalue: f64,
    pub sectors: Vec<SectorKernel>,
}

impl GroundSpace {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Largest `‖Hv‖` over the stored vectors.
    pub fn max_energy_residual(&self, graph: &Arc<CouplingGraph>) -> Result<f64, SolveError> {
        let basis = Arc::new(Basis::full(self.n)?);
        let h = ImplicitOperator::hamiltonian(graph.clone(), basis)?;
        Ok(self.vectors.iter().map(|v| crate::basis::norm(&h.apply_vec(&v.amplitudes))).fold(0.0, f64::max))
    }
}

struct SectorSolve {
    kernel: SectorKernel,
    vectors: Vec<StateVector>,
}

fn solve_sector(
    graph: &Arc<CouplingGraph>,
    k: usize,
    policy: &SolverPolicy,
    energy_threshold: f64,
    gap_threshold: f64,
) -> Result<SectorSolve, SolveError> {
    let n = graph.vertex_count();
    let sector = SectorBasis::enumerate(n, k)?;
    let basis = Arc::new(Basis::Sector(sector.clone()));
    let h = ImplicitOperator::hamiltonian(graph.clone(), basis)?;
    let spectrum = if h.dim() <= policy.dense_cap {
        dense_spectrum(&h, policy.dense_cap)?
    } else {
        let mut params = policy.krylov;
        params.seed = params.seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(k as u64 + 1));
        // Stop once a pair lands above the kernel threshold.
        krylov_collect(&h, params, |found| found.last().is_some_and(|&v| v >= energy_threshold))?
    };
    let kernel_dim = spectrum.eigenvalues.iter().take_while(|&&v| v < energy_threshold).count();
    let first_excited = spectrum.eigenvalues.get(kernel_dim).copied();
    if let Some(eigenvalue) = first_excited {
        if eigenvalue <= gap_threshold {
            return Err(SolveError::AmbiguousKernel { k, eigenvalue, energy_threshold, gap_threshold });
        }
    }
    let vectors = spectrum.eigenvectors[..kernel_dim]
        .iter()
        .map(|v| StateVector::from_real(sector.space(), v).embed(&sector))
        .collect();
    let max_residual = spectrum.residual_norms[..kernel_dim].iter().copied().fold(0.0, f64::max);
    Ok(SectorSolve {
        kernel: SectorKernel {
            k,
            dim: h.dim(),
            mode: spectrum.mode,
            kernel_dim,
            lowest: spectrum.eigenvalues[0],
            first_excited,
            max_residual,
        },
        vectors,
    })
}

/// Modified Gram–Schmidt with a second pass; drops numerically dependent vectors.
pub fn orthonormalize(vectors: &mut Vec<StateVector>) {
    let mut out: Vec<StateVector> = Vec::with_capacity(vectors.len());
    for mut v in vectors.drain(..) {
        for _ in 0..2 {
            for q in &out {
                let c = crate::basis::inner(&q.amplitudes, &v.amplitudes);
                v.amplitudes.iter_mut().zip(&q.amplitudes).for_each(|(a, b)| *a -= c * b);
            }
        }
        let nv = v.norm();
        if nv > 1e-10 {
            v.amplitudes.iter_mut().for_each(|a| *a /= Complex64::new(nv, 0.0));
            out.push(v);
        }
    }
    *vectors = out;
}

/// Collects every eigenvector below the energy threshold, sector by sector.
pub fn extract_ground_space(graph: &CouplingGraph, policy: &SolverPolicy) -> Result<GroundSpace, SolveError> {
    let n = graph.vertex_count();
    let full_dim = 1usize.checked_shl(n as u32).unwrap_or(usize::MAX);
    if full_dim > policy.full_space_cap {
        return Err(SolveError::FullSpaceTooLarge { n, cap: policy.full_space_cap });
    }
    let tol = &policy.tolerances;
    let energy_threshold = tol.energy_threshold(graph.total_coupling());
    let gap_threshold = tol.gap_threshold(graph.min_coupling());
    let mut krylov = policy.krylov;
    krylov.residual_tol = krylov.residual_tol.min(tol.residual_threshold(graph.total_coupling()));
    let policy = SolverPolicy { krylov, ..*policy };
    let graph = Arc::new(graph.clone());

    let solve = |k: usize| solve_sector(&graph, k, &policy, energy_threshold, gap_threshold);
    let results: Vec<Result<SectorSolve, SolveError>> =
        if policy.parallel { (0..=n).into_par_iter().map(solve).collect() } else { (0..=n).map(solve).collect() };

    let mut vectors = Vec::new();
    let mut per_sector_counts = BTreeMap::new();
    let mut sectors = Vec::with_capacity(n + 1);
    let mut min_eigenvalue = f64::INFINITY;
    for result in results {
        let solved = result?;
        per_sector_counts.insert(solved.kernel.k, solved.kernel.kernel_dim);
        min_eigenvalue = min_eigenvalue.min(solved.kernel.lowest);
        vectors.extend(solved.vectors);
        sectors.push(solved.kernel);
    }
    orthonormalize(&mut vectors);
    Ok(GroundSpace { n, vectors, per_sector_counts, energy_threshold, gap_threshold, min_eigenvalue, sectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, CouplingRule, GraphKind};

    fn hamiltonian(g: &CouplingGraph, k: usize) -> ImplicitOperator {
        let basis = Arc::new(Basis::sector(g.vertex_count(), k).unwrap());
        ImplicitOperator::hamiltonian(Arc::new(g.clone()), basis).unwrap()
    }

    #[test]
    fn two_site_dense_spectrum() {
        let g = CouplingGraph::build(2, &[(0, 1, 1.0)]).unwrap();
        let s = dense_spectrum(&hamiltonian(&g, 1), DEFAULT_DENSE_CAP).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-15);
        assert!((s.eigenvalues[1] - 0.5).abs() < 1e-15);
        assert!(s.residual_norms.iter().all(|&r| r < 1e-14));
    }

    #[test]
    fn chain_has_one_zero_per_sector() {
        let g = generate(GraphKind::Chain(3), CouplingRule::Uniform(1.0)).unwrap();
        let zeros: usize = (0..=3)
            .map(|k| {
                let s = dense_spectrum(&hamiltonian(&g, k), DEFAULT_DENSE_CAP).unwrap();
                assert!(s.eigenvalues[0] >= -1e-12);
                s.eigenvalues.iter().filter(|v| v.abs() < 1e-9).count()
            })
            .sum();
        assert_eq!(zeros, 4);
    }

    #[test]
    fn dense_cap_is_enforced() {
        let g = generate(GraphKind::Chain(10), CouplingRule::Uniform(1.0)).unwrap();
        assert!(matches!(
            dense_spectrum(&hamiltonian(&g, 5), 100),
            Err(SolveError::SectorTooLargeForDense { dim: 252, cap: 100 })
        ));
    }

    #[test]
    fn krylov_matches_dense_on_small_sectors() {
        let g = generate(
            GraphKind::RandomConnected { vertex_count: 9, edge_prob: 0.3, seed: 4 },
            CouplingRule::RandomUniform { lo: 0.0, hi: 2.0, seed: 9 },
        )
        .unwrap();
        for k in 1..=4 {
            let h = hamiltonian(&g, k);
            let dense = dense_spectrum(&h, DEFAULT_DENSE_CAP).unwrap();
            let kry = krylov_lowest(&h, 3, KrylovParams::default()).unwrap();
            for (a, b) in dense.eigenvalues.iter().zip(&kry.eigenvalues) {
                assert!((a - b).abs() < 1e-9, "k={k}: dense {a} vs krylov {b}");
            }
            assert!(kry.residual_norms.iter().all(|&r| r <= 1e-9));
        }
    }

    #[test]
    fn krylov_handles_tiny_and_degenerate_sectors() {
        let g = generate(GraphKind::Complete(5), CouplingRule::Uniform(1.0)).unwrap();
        let h = hamiltonian(&g, 1);
        // K5, one flipped spin: {0} once and 5/4 four times.
        let kry = krylov_lowest(&h, 10, KrylovParams::default()).unwrap();
        assert_eq!(kry.eigenvalues.len(), 5);
        assert!(kry.eigenvalues[0].abs() < 1e-12);
        for v in &kry.eigenvalues[1..] {
            assert!((v - 1.25).abs() < 1e-10);
        }
        let single = hamiltonian(&g, 0);
        let kry = krylov_lowest(&single, 3, KrylovParams::default()).unwrap();
        assert_eq!(kry.eigenvalues, vec![0.0]);
    }

    #[test]
    fn krylov_is_deterministic() {
        let g = generate(GraphKind::Ring(10), CouplingRule::Uniform(1.0)).unwrap();
        let h = hamiltonian(&g, 5);
        let a = krylov_lowest(&h, 3, KrylovParams::default()).unwrap();
        let b = krylov_lowest(&h, 3, KrylovParams::default()).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }

    #[test]
    fn ground_space_examples() {
        let policy = SolverPolicy::default();
        let g = CouplingGraph::build(2, &[(0, 1, 1.0)]).unwrap();
        let gs = extract_ground_space(&g, &policy).unwrap();
        assert_eq!(gs.dim(), 3);
        assert_eq!(gs.per_sector_counts, BTreeMap::from([(0, 1), (1, 1), (2, 1)]));

        let ring = generate(GraphKind::Ring(4), CouplingRule::Uniform(1.0)).unwrap();
        assert_eq!(extract_ground_space(&ring, &policy).unwrap().dim(), 5);
    }

    #[test]
    fn krylov_policy_gives_same_ground_space_counts() {
        let g = generate(GraphKind::Grid { rows: 2, cols: 4 }, CouplingRule::Uniform(1.0)).unwrap();
        let policy = SolverPolicy { dense_cap: 1, ..SolverPolicy::default() };
        let gs = extract_ground_space(&g, &policy).unwrap();
        assert_eq!(gs.dim(), 9);
        assert!(gs.per_sector_counts.values().all(|&c| c == 1));
        assert!(gs.sectors.iter().filter(|s| s.dim > 1).all(|s| s.mode == SolverMode::Krylov));
        let energy = gs.max_energy_residual(&Arc::new(g)).unwrap();
        assert!(energy < 1e-9);
    }

    #[test]
    fn disconnected_graph_has_larger_kernel() {
        let g = CouplingGraph::build_allow_disconnected(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let gs = extract_ground_space(&g, &SolverPolicy::default()).unwrap();
        // Two independent triplets: 3 × 3 = 9 > N + 1.
        assert_eq!(gs.dim(), 9);
    }

    #[test]
    fn ambiguous_gap_fails_loudly() {
        let g = generate(GraphKind::Chain(4), CouplingRule::Uniform(1.0)).unwrap();
        let mut policy = SolverPolicy::default();
        policy.tolerances.gap = 10.0;
        assert!(matches!(extract_ground_space(&g, &policy), Err(SolveError::AmbiguousKernel { .. })));
    }

    #[test]
    fn full_space_cap_is_enforced() {
        let g = generate(GraphKind::Chain(12), CouplingRule::Uniform(1.0)).unwrap();
        let policy = SolverPolicy { full_space_cap: 1024, ..SolverPolicy::default() };
        assert!(matches!(extract_ground_space(&g, &policy), Err(SolveError::FullSpaceTooLarge { .. })));
    }
}
