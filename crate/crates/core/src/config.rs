//! Numerical tolerances and size caps shared by every module.

use serde::{Deserialize, Serialize};

/// All thresholds used by the solvers and the verifier.
///
/// Thresholds marked "relative" are multiplied by a problem scale at the
/// point of use: `max(1, ΣJ)` for energies and residuals, `min J` for the
/// spectral gap, `S_max(S_max + 1)` for total spin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative kernel threshold: an eigenvalue below `energy * max(1, ΣJ)` counts as zero.
    pub energy: f64,
    /// Relative gap: the first nonzero level must exceed `gap * min J`.
    pub gap: f64,
    /// Relative eigenpair residual `‖Hv − λv‖ / max(1, ΣJ)`.
    pub residual: f64,
    /// Absolute slack below zero tolerated for the lowest eigenvalue.
    pub psd: f64,
    /// Relative total-spin deviation, scaled by `S_max(S_max + 1)`.
    pub total_spin: f64,
    /// Absolute deviation of `s_i·s_j` from 1/4.
    pub pair_alignment: f64,
    /// Residual of a product state after projection onto the ground space.
    pub span_membership: f64,
    /// Two-sided projector distance between product-state span and ground space.
    pub projector: f64,
    /// Lower bound on the Gram matrix's smallest singular value.
    pub gram_min_singular_value: f64,
    /// Residual of the spin-component closure check.
    pub rotation_closure: f64,
    /// Absolute eigenvalue tolerance of the two-spin edge-term check.
    pub edge_spectrum: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            energy: 1e-9,
            gap: 1e-6,
            residual: 1e-9,
            psd: 1e-12,
            total_spin: 1e-9,
            pair_alignment: 1e-9,
            span_membership: 1e-8,
            projector: 1e-7,
            gram_min_singular_value: 1e-6,
            rotation_closure: 1e-9,
            edge_spectrum: 1e-12,
        }
    }
}

impl Tolerances {
    /// Absolute kernel threshold for a graph with total coupling `total_j`.
    pub fn energy_threshold(&self, total_j: f64) -> f64 {
        self.energy * total_j.max(1.0)
    }

    pub fn gap_threshold(&self, min_j: f64) -> f64 {
        self.gap * min_j
    }

    pub fn residual_threshold(&self, total_j: f64) -> f64 {
        self.residual * total_j.max(1.0)
    }
}

/// Largest number of sites a basis may have.
pub const MAX_SITES: usize = 30;

/// Default cap on a sector's dimension for dense materialization.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Default cap on the number of stored amplitudes in one sector basis.
pub const DEFAULT_SECTOR_BUDGET: usize = 1 << 27;

/// Default cap on the full Hilbert-space dimension `2^N` for embedded vectors.
pub const DEFAULT_FULL_SPACE_CAP: usize = 1 << 20;
