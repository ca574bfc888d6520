//! Certificates for the ferromagnetic ground-space structure.
//!
//! Each check consumes a computed [`GroundSpace`] (or the graph itself) and
//! returns a [`ClauseResult`] holding a pass flag, the numeric evidence and
//! the thresholds it was judged against. A flag is always of the form
//! `evidence < threshold`, so loosening a threshold never turns a pass into a
//! failure.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::basis::{inner, norm, Basis, BasisError, StateVector};
use crate::config::Tolerances;
use crate::eigensolve::{extract_ground_space, orthonormalize, GroundSpace, SolveError, SolverPolicy};
use crate::graph::{CouplingGraph, GraphError};
use crate::operators::{
    edge_term_eigenvalues, rotated_product_state, total_spin_component, Axis, ImplicitOperator, OperatorError, Su2,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("exclusion arithmetic needs N >= 2, got {0}")]
    InvalidN(u64),
    #[error("rotation samples stayed nearly dependent after {attempts} attempts (min singular value {min_singular_value:e})")]
    DegenerateRotationSample { attempts: usize, min_singular_value: f64 },
    #[error("ground space is empty")]
    EmptyGroundSpace,
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Outcome of one certified statement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseResult {
    pub name: String,
    pub pass: bool,
    pub evidence: BTreeMap<String, Value>,
    pub thresholds: BTreeMap<String, f64>,
    /// Short label and headline number for the text table.
    #[serde(skip)]
    pub headline: (String, String, f64),
}

impl ClauseResult {
    fn new(name: &str, label: &str, metric: &str, value: f64, pass: bool) -> Self {
        Self {
            name: name.to_string(),
            pass,
            evidence: BTreeMap::new(),
            thresholds: BTreeMap::new(),
            headline: (label.to_string(), metric.to_string(), value),
        }
    }

    fn evidence(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.evidence.insert(key.to_string(), value.into());
        self
    }

    fn threshold(mut self, key: &str, value: f64) -> Self {
        self.thresholds.insert(key.to_string(), value);
        self
    }
}

fn full_basis(n: usize) -> Result<Arc<Basis>, VerifyError> {
    Ok(Arc::new(Basis::full(n)?))
}

fn total_spin_max(n: usize) -> f64 {
    let s = n as f64 / 2.0;
    s * (s + 1.0)
}

/// Maximal total spin: `S² v = (N/2)(N/2 + 1) v` for every ground vector.
pub fn verify_clause_a(gs: &GroundSpace, n: usize, tol: &Tolerances) -> Result<ClauseResult, VerifyError> {
    if gs.vectors.is_empty() {
        return Err(VerifyError::EmptyGroundSpace);
    }
    let target = total_spin_max(n);
    let s2 = ImplicitOperator::total_spin_squared(full_basis(n)?);
    let mut max_expectation_dev: f64 = 0.0;
    let mut max_residual: f64 = 0.0;
    let mut values = Vec::with_capacity(gs.vectors.len());
    for v in &gs.vectors {
        let w = s2.apply(v)?;
        let expectation = inner(&v.amplitudes, &w.amplitudes).re;
        values.push(expectation);
        max_expectation_dev = max_expectation_dev.max((expectation - target).abs());
        let residual: Vec<Complex64> = w.amplitudes.iter().zip(&v.amplitudes).map(|(a, b)| a - b * target).collect();
        max_residual = max_residual.max(norm(&residual));
    }
    let threshold = tol.total_spin * target;
    let worst = max_expectation_dev.max(max_residual);
    Ok(ClauseResult::new("max_total_spin", "a", "max dev", worst, worst < threshold)
        .evidence("expected_s2", target)
        .evidence("s2_expectations", values)
        .evidence("max_expectation_deviation", max_expectation_dev)
        .evidence("max_eigen_residual", max_residual)
        .threshold("total_spin", threshold))
}

/// Pairwise alignment: `(s_i·s_j) v = v/4` for every pair `i < j`, edge or not.
pub fn verify_clause_b(gs: &GroundSpace, graph: &CouplingGraph, tol: &Tolerances) -> Result<ClauseResult, VerifyError> {
    if gs.vectors.is_empty() {
        return Err(VerifyError::EmptyGroundSpace);
    }
    let n = graph.vertex_count();
    let basis = full_basis(n)?;
    let mut max_dev: f64 = 0.0;
    let mut max_dev_non_edge: f64 = 0.0;
    let mut worst_pair = (0, 1);
    // 3N/4 + 2 Σ_{i<j} ⟨s_i·s_j⟩ per vector, cross-checked against ⟨S²⟩.
    let mut s2_from_pairs = vec![0.75 * n as f64; gs.vectors.len()];
    let mut pairs = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            pairs += 1;
            let op = ImplicitOperator::pair_coupling(i, j, basis.clone())?;
            for (v, acc) in gs.vectors.iter().zip(s2_from_pairs.iter_mut()) {
                let w = op.apply(v)?;
                *acc += 2.0 * inner(&v.amplitudes, &w.amplitudes).re;
                let diff: Vec<Complex64> = w.amplitudes.iter().zip(&v.amplitudes).map(|(a, b)| a - b * 0.25).collect();
                let dev = norm(&diff);
                if dev > max_dev {
                    max_dev = dev;
                    worst_pair = (i, j);
                }
                if !graph.has_edge(i, j) {
                    max_dev_non_edge = max_dev_non_edge.max(dev);
                }
            }
        }
    }
    let s2 = ImplicitOperator::total_spin_squared(basis);
    let mut s2_consistency: f64 = 0.0;
    for (v, from_pairs) in gs.vectors.iter().zip(&s2_from_pairs) {
        let direct = inner(&v.amplitudes, &s2.apply(v)?.amplitudes).re;
        s2_consistency = s2_consistency.max((direct - from_pairs).abs());
    }
    let threshold = tol.pair_alignment;
    Ok(ClauseResult::new("pairwise_alignment", "b", "max dev", max_dev, max_dev < threshold)
        .evidence("max_deviation", max_dev)
        .evidence("max_deviation_non_edges", max_dev_non_edge)
        .evidence("worst_pair", vec![worst_pair.0, worst_pair.1])
        .evidence("pairs_checked", pairs)
        .evidence("s2_from_pairs_consistency", s2_consistency)
        .threshold("pair_alignment", threshold))
}

/// Witness that `N + 1` rotated product states span the ground space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanCertificate {
    /// Each rotation as `[[re, im]; 4]` in row-major order.
    pub rotations: Vec<[[f64; 2]; 4]>,
    /// Coefficients reproducing the first ground vector, as `[re, im]`.
    pub alphas: Vec<[f64; 2]>,
    pub witness_residual: f64,
    pub gram_min_singular_value: f64,
    pub max_membership_residual: f64,
    pub projector_distance: f64,
    pub attempts: usize,
}

impl SpanCertificate {
    pub fn passes(&self, tol: &Tolerances) -> bool {
        self.gram_min_singular_value > tol.gram_min_singular_value
            && self.max_membership_residual < tol.span_membership
            && self.projector_distance < tol.projector
    }
}

fn columns(vectors: &[StateVector]) -> DMatrix<Complex64> {
    let rows = vectors.first().map_or(0, |v| v.amplitudes.len());
    DMatrix::from_fn(rows, vectors.len(), |r, c| vectors[c].amplitudes[r])
}

/// `‖(I − QQ†) A‖₂` for `Q` with orthonormal columns.
fn projected_out_norm(q: &DMatrix<Complex64>, a: &DMatrix<Complex64>) -> f64 {
    if a.ncols() == 0 {
        return 0.0;
    }
    if q.ncols() == 0 {
        return a.clone().singular_values().max();
    }
    let residual = a - q * (q.adjoint() * a);
    residual.singular_values().max()
}

/// Span certificate for a given set of rotations.
pub fn span_certificate_with(gs: &GroundSpace, rotations: &[Su2]) -> Result<SpanCertificate, VerifyError> {
    let n = gs.n;
    let states: Vec<StateVector> = rotations.iter().map(|u| rotated_product_state(u, n)).collect::<Result<_, _>>()?;
    let q = columns(&gs.vectors);
    let p = columns(&states);

    let membership = (0..p.ncols()).map(|c| projected_out_norm(&q, &p.columns(c, 1).into_owned())).fold(0.0, f64::max);

    let gram = p.adjoint() * &p;
    let gram_min_singular_value = gram.clone().singular_values().min();

    let mut span = states.clone();
    orthonormalize(&mut span);
    let qp = columns(&span);
    let projector_distance =
        if qp.ncols() != q.ncols() { 1.0 } else { projected_out_norm(&q, &qp).max(projected_out_norm(&qp, &q)) };

    // Least-squares witness for the first ground vector: G α = P† v.
    let (alphas, witness_residual) = match gs.vectors.first() {
        Some(v) => {
            let rhs = p.adjoint() * nalgebra::DVector::from_column_slice(&v.amplitudes);
            match gram.clone().lu().solve(&rhs) {
                Some(alpha) => {
                    let rebuilt = &p * &alpha;
                    let resid: Vec<Complex64> = rebuilt.iter().zip(&v.amplitudes).map(|(a, b)| a - b).collect();
                    (alpha.iter().map(|a| [a.re, a.im]).collect(), norm(&resid))
                }
                None => (Vec::new(), f64::INFINITY),
            }
        }
        None => (Vec::new(), f64::INFINITY),
    };

    Ok(SpanCertificate {
        rotations: rotations
            .iter()
            .map(|u| {
                let m = u.0;
                [m[0][0], m[0][1], m[1][0], m[1][1]].map(|z| [z.re, z.im])
            })
            .collect(),
        alphas,
        witness_residual,
        gram_min_singular_value,
        max_membership_residual: membership,
        projector_distance,
        attempts: 1,
    })
}

/// Draws `N + 1` Haar rotations from `seed`, resampling (seed + 1, …) up to
/// five times while the product states are nearly dependent.
pub fn verify_clause_c(
    gs: &GroundSpace,
    n: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<SpanCertificate, VerifyError> {
    const MAX_ATTEMPTS: usize = 5;
    let mut worst = f64::NAN;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let rotations: Vec<Su2> = (0..=n).map(|_| Su2::haar(&mut rng)).collect();
        let mut cert = span_certificate_with(gs, &rotations)?;
        cert.attempts = attempt + 1;
        if cert.gram_min_singular_value > tol.gram_min_singular_value {
            return Ok(cert);
        }
        worst = cert.gram_min_singular_value;
    }
    Err(VerifyError::DegenerateRotationSample { attempts: MAX_ATTEMPTS, min_singular_value: worst })
}

/// Largest component of `S^α v` outside the ground space, over `α ∈ {x, y, z}`.
pub fn rotation_closure_residual(gs: &GroundSpace) -> f64 {
    let q = columns(&gs.vectors);
    let mut worst: f64 = 0.0;
    for v in &gs.vectors {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let w = total_spin_component(axis, gs.n, &v.amplitudes);
            let w = DMatrix::from_column_slice(w.len(), 1, &w);
            worst = worst.max(projected_out_norm(&q, &w));
        }
    }
    worst
}

/// Removable vertices: the DFS-leaf pair plus an exhaustive scan.
pub fn verify_lemma(graph: &CouplingGraph) -> Result<ClauseResult, VerifyError> {
    let pair = graph.find_removable_pair()?;
    let pair_valid = pair.first != pair.second
        && graph.is_connected_without(pair.first)?
        && graph.is_connected_without(pair.second)?;
    let removable = graph.removable_vertices();
    let count = removable.len();
    let pass = pair_valid && count >= 2;
    Ok(ClauseResult::new("lemma_pair", "lemma", "removable", count as f64, pass)
        .evidence("pair", vec![pair.first, pair.second])
        .evidence("pair_valid", pair_valid)
        .evidence("removable_vertices", removable)
        .evidence("removable_count", count))
}

/// Two-spin edge terms `(J/2)(¼ − s_i·s_j)` have spectrum `{0, 0, 0, J/2}`.
pub fn verify_edge_psd(graph: &CouplingGraph, tol: &Tolerances) -> Result<ClauseResult, VerifyError> {
    let mut max_dev: f64 = 0.0;
    let couplings = graph.distinct_couplings();
    for &j in &couplings {
        let values = edge_term_eigenvalues(j)?;
        let expected = [0.0, 0.0, 0.0, j / 2.0];
        for (v, e) in values.iter().zip(expected) {
            max_dev = max_dev.max((v - e).abs());
        }
    }
    Ok(ClauseResult::new("edge_psd", "edge psd", "max dev", max_dev, max_dev < tol.edge_spectrum)
        .evidence("distinct_couplings", couplings.len())
        .evidence("max_eigenvalue_deviation", max_dev)
        .threshold("edge_spectrum", tol.edge_spectrum))
}

/// Values `t = 2S` with `t(t + 2) = target`, restricted to the admissible
/// total spins `S ∈ {(N+1)/2, (N−1)/2, …}` of `N + 1` spins.
fn admissible_twice_spin_solutions(n: u64, target: u128) -> Vec<u64> {
    // t(t + 2) = target  ⇔  (t + 1)² = target + 1.
    let square = target + 1;
    let root = square.isqrt();
    if root * root != square || root == 0 {
        return Vec::new();
    }
    let t = (root - 1) as u64;
    if t <= n + 1 && t % 2 == (n + 1) % 2 {
        vec![t]
    } else {
        Vec::new()
    }
}

/// Whether `(n − k)(n + k + 2) = 2` has a solution with integer `k ≥ 0`,
/// by running over the factorizations of 2.
fn even_form_has_solution(n: i64) -> bool {
    [(1i64, 2i64), (2, 1), (-1, -2), (-2, -1)].iter().any(|&(a, b)| {
        // n − k = a, n + k + 2 = b
        let two_n = a + b - 2;
        let two_k = b - a - 2;
        two_n == 2 * n && two_k >= 0 && two_k % 2 == 0
    })
}

/// Whether `k(k + 1) = n(n + 3)` has a solution with integer `k ≥ 0`.
fn odd_form_has_solution(n: u64) -> bool {
    // (2k + 1)² = 4n(n + 3) + 1
    let square = 4 * n as u128 * (n as u128 + 3) + 1;
    let root = square.isqrt();
    root * root == square
}

/// Exact integer check of the total-spin exclusion for a subsystem of `N`
/// spins extended by one more.
///
/// With `t = 2S`, the `−3/4` branch requires `t(t+2) = N² + 4N − 5`, which
/// must have no admissible solution, while the `+1/4` branch
/// `t(t+2) = N² + 4N + 3` must be solved only by `t = N + 1`. The parity
/// specific forms `(n − k)(n + k + 2) = 2` (N = 2n) and `k(k+1) = n(n+3)`
/// (N = 2n + 1) must both be unsolvable.
pub fn exclusion_arithmetic(n: u64) -> Result<bool, VerifyError> {
    if n < 2 {
        return Err(VerifyError::InvalidN(n));
    }
    let big = n as u128;
    let minus = admissible_twice_spin_solutions(n, big * big + 4 * big - 5);
    let plus = admissible_twice_spin_solutions(n, big * big + 4 * big + 3);
    let parity_form =
        if n.is_multiple_of(2) { even_form_has_solution((n / 2) as i64) } else { odd_form_has_solution((n - 1) / 2) };
    Ok(minus.is_empty() && plus == [n + 1] && !parity_form)
}

/// `exclusion_arithmetic` over `2..=max_n`; returns the first failing `N`, if any.
pub fn exclusion_sweep(max_n: u64) -> Result<Option<u64>, VerifyError> {
    for n in 2..=max_n {
        if !exclusion_arithmetic(n)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

fn arithmetic_clause(n: usize) -> Result<ClauseResult, VerifyError> {
    let ok = exclusion_arithmetic(n as u64)?;
    Ok(ClauseResult::new("exclusion_arithmetic", "arithmetic", "N", n as f64, ok).evidence("n", n))
}

/// Everything certified for one graph.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub graph: GraphSummary,
    pub pass: bool,
    pub seed: u64,
    pub clauses: Vec<ClauseResult>,
    pub per_sector: Vec<crate::eigensolve::SectorKernel>,
    pub span_certificate: Option<SpanCertificate>,
    pub thresholds: BTreeMap<String, f64>,
    pub timings_ms: BTreeMap<String, f64>,
    pub version: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphSummary {
    pub n: usize,
    /// `[i, j, J]` triples.
    pub edges: Vec<(usize, usize, f64)>,
}

impl VerificationReport {
    pub fn clause(&self, name: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.name == name)
    }

    /// JSON tree; timings are emptied unless requested so output is reproducible.
    pub fn to_structured(&self, include_timings: bool) -> Value {
        let mut value = serde_json::to_value(self).expect("report serializes");
        if !include_timings {
            value["timings_ms"] = json!({});
        }
        value
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("graph: N={} edges={} seed={}\n", self.graph.n, self.graph.edges.len(), self.seed);
        for c in &self.clauses {
            let (label, metric, value) = &c.headline;
            out.push_str(&format!("clause {label}: {} ({metric} {value:.1e})\n", if c.pass { "PASS" } else { "FAIL" }));
        }
        let counts: Vec<String> = self.per_sector.iter().map(|s| format!("{}:{}", s.k, s.kernel_dim)).collect();
        out.push_str(&format!("per-sector kernel: {}\n", counts.join(" ")));
        out.push_str(&format!("overall: {}\n", if self.pass { "PASS" } else { "FAIL" }));
        out
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Extracts the ground space and certifies every statement about it.
pub fn full_verify(graph: &CouplingGraph, policy: &SolverPolicy, seed: u64) -> Result<VerificationReport, VerifyError> {
    let tol = policy.tolerances;
    let n = graph.vertex_count();
    let shared = Arc::new(graph.clone());
    let mut timings = BTreeMap::new();

    let start = Instant::now();
    let gs = extract_ground_space(graph, policy)?;
    timings.insert("ground_space".to_string(), ms(start));

    let mut clauses = Vec::new();

    let max_h_residual = gs.max_energy_residual(&shared)?;
    let energy_ok = gs.min_eigenvalue >= -tol.psd
        && gs.min_eigenvalue < gs.energy_threshold
        && max_h_residual < gs.energy_threshold;
    clauses.push(
        ClauseResult::new("ground_energy_zero", "energy", "min eigenvalue", gs.min_eigenvalue, energy_ok)
            .evidence("min_eigenvalue", gs.min_eigenvalue)
            .evidence("max_h_residual", max_h_residual)
            .threshold("energy_threshold", gs.energy_threshold)
            .threshold("psd", tol.psd),
    );

    let counts_ok = gs.per_sector_counts.values().all(|&c| c == 1);
    let min_gap = gs.sectors.iter().filter_map(|s| s.first_excited).fold(f64::INFINITY, f64::min);
    clauses.push(
        ClauseResult::new(
            "degeneracy_N_plus_1",
            "degeneracy",
            "kernel dim",
            gs.dim() as f64,
            gs.dim() == n + 1 && counts_ok,
        )
        .evidence("kernel_dim", gs.dim())
        .evidence("expected", n + 1)
        .evidence(
            "per_sector_counts",
            gs.per_sector_counts.iter().map(|(k, c)| (k.to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
        )
        .evidence("min_excitation", if min_gap.is_finite() { json!(min_gap) } else { Value::Null })
        .threshold("gap_threshold", gs.gap_threshold)
        .threshold("energy_threshold", gs.energy_threshold),
    );

    let start = Instant::now();
    if gs.vectors.is_empty() {
        return Err(VerifyError::EmptyGroundSpace);
    }
    clauses.push(verify_clause_a(&gs, n, &tol)?);
    clauses.push(verify_clause_b(&gs, graph, &tol)?);
    timings.insert("clauses_ab".to_string(), ms(start));

    let start = Instant::now();
    let (span_clause, certificate) = match verify_clause_c(&gs, n, seed, &tol) {
        Ok(cert) => {
            let closure = rotation_closure_residual(&gs);
            let pass = cert.passes(&tol) && closure < tol.rotation_closure;
            let clause = ClauseResult::new("product_state_span", "c", "projector dist", cert.projector_distance, pass)
                .evidence("projector_distance", cert.projector_distance)
                .evidence("gram_min_singular_value", cert.gram_min_singular_value)
                .evidence("max_membership_residual", cert.max_membership_residual)
                .evidence("witness_residual", cert.witness_residual)
                .evidence("rotation_closure_residual", closure)
                .evidence("attempts", cert.attempts);
            (clause, Some(cert))
        }
        Err(VerifyError::DegenerateRotationSample { attempts, min_singular_value }) => {
            let clause = ClauseResult::new("product_state_span", "c", "gram min sv", min_singular_value, false)
                .evidence("gram_min_singular_value", min_singular_value)
                .evidence("attempts", attempts);
            (clause, None)
        }
        Err(e) => return Err(e),
    };
    clauses.push(
        span_clause
            .threshold("projector", tol.projector)
            .threshold("span_membership", tol.span_membership)
            .threshold("gram_min_singular_value", tol.gram_min_singular_value)
            .threshold("rotation_closure", tol.rotation_closure),
    );
    timings.insert("clause_c".to_string(), ms(start));

    let start = Instant::now();
    clauses.push(verify_lemma(graph)?);
    clauses.push(verify_edge_psd(graph, &tol)?);
    clauses.push(arithmetic_clause(n)?);
    timings.insert("lemma_psd_arithmetic".to_string(), ms(start));

    let thresholds = BTreeMap::from([
        ("energy_threshold".to_string(), gs.energy_threshold),
        ("gap_threshold".to_string(), gs.gap_threshold),
        ("residual".to_string(), tol.residual_threshold(graph.total_coupling())),
        ("psd".to_string(), tol.psd),
        ("total_spin".to_string(), tol.total_spin * total_spin_max(n)),
        ("pair_alignment".to_string(), tol.pair_alignment),
        ("span_membership".to_string(), tol.span_membership),
        ("projector".to_string(), tol.projector),
        ("gram_min_singular_value".to_string(), tol.gram_min_singular_value),
        ("dense_cap".to_string(), policy.dense_cap as f64),
    ]);
    Ok(VerificationReport {
        graph: GraphSummary { n, edges: graph.edges().iter().map(|e| (e.i, e.j, e.coupling)).collect() },
        pass: clauses.iter().all(|c| c.pass),
        seed,
        clauses,
        per_sector: gs.sectors.clone(),
        span_certificate: certificate,
        thresholds,
        timings_ms: timings,
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}
