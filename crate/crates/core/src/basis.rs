//! Bitmask bases for `N` spin-1/2 sites.
//!
//! Bit `i` of a mask is set when spin `i` points down, so the all-up state is
//! mask `0`. Total `S^z` is conserved by every operator in this crate, which
//! splits the `2^N` states into sectors labelled by the number `k` of down
//! spins, each of dimension `C(N, k)` and `S^z` eigenvalue `(N − 2k)/2`.

use num_complex::Complex64;
use thiserror::Error;

use crate::config::{DEFAULT_FULL_SPACE_CAP, DEFAULT_SECTOR_BUDGET, MAX_SITES};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("{n} sites exceed the hard cap of {MAX_SITES}")]
    TooManySites { n: usize },
    #[error("down count {k} exceeds site count {n}")]
    InvalidDownCount { n: usize, k: usize },
    #[error("sector (N={n}, k={k}) has {size} states, above the budget of {budget}")]
    SectorTooLarge { n: usize, k: usize, size: usize, budget: usize },
    #[error("need at least 2 sites, got {0}")]
    TooFewSites(usize),
}

pub type Mask = u32;

/// Exact binomial coefficient, `0` when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for t in 0..k {
        acc = acc * (n - t) as u128 / (t + 1) as u128;
    }
    acc as usize
}

/// Which part of the Hilbert space a vector or operator lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Sector { n: usize, k: usize },
    Full { n: usize },
}

impl Space {
    pub fn sites(&self) -> usize {
        match *self {
            Space::Sector { n, .. } | Space::Full { n } => n,
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Space::Sector { n, k } => binomial(n, k),
            Space::Full { n } => 1usize << n,
        }
    }
}

/// All masks with exactly `k` of `N` bits set, in increasing order.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    n: usize,
    k: usize,
    states: Vec<Mask>,
    /// `binom[p][t] = C(p, t)` for the combinatorial-number-system rank.
    binom: Vec<Vec<usize>>,
}

impl SectorBasis {
    pub fn enumerate(n: usize, k: usize) -> Result<Self, BasisError> {
        Self::enumerate_with_budget(n, k, DEFAULT_SECTOR_BUDGET)
    }

    pub fn enumerate_with_budget(n: usize, k: usize, budget: usize) -> Result<Self, BasisError> {
        if n > MAX_SITES {
            return Err(BasisError::TooManySites { n });
        }
        if k > n {
            return Err(BasisError::InvalidDownCount { n, k });
        }
        let size = binomial(n, k);
        if size > budget {
            return Err(BasisError::SectorTooLarge { n, k, size, budget });
        }
        let mut states = Vec::with_capacity(size);
        if k == 0 {
            states.push(0);
        } else {
            // Gosper's hack: next larger integer with the same popcount.
            let limit: u64 = 1u64 << n;
            let mut m: u64 = (1u64 << k) - 1;
            while m < limit {
                states.push(m as Mask);
                let c = m & m.wrapping_neg();
                let r = m + c;
                m = (((r ^ m) >> 2) / c) | r;
            }
        }
        debug_assert_eq!(states.len(), size);
        let binom = (0..=n).map(|p| (0..=k).map(|t| binomial(p, t)).collect()).collect();
        Ok(Self { n, k, states, binom })
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn down_count(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Mask] {
        &self.states
    }

    pub fn mask(&self, index: usize) -> Mask {
        self.states[index]
    }

    /// Position of `mask` in this sector, `None` if its popcount differs.
    ///
    /// Masks of equal popcount sorted as integers follow colex order, whose
    /// rank is `Σ_t C(p_t, t + 1)` over set-bit positions `p_0 < p_1 < …`.
    pub fn rank(&self, mask: Mask) -> Option<usize> {
        if mask.count_ones() as usize != self.k || (self.n < 32 && mask >> self.n != 0) {
            return None;
        }
        let mut rest = mask;
        let mut rank = 0;
        let mut t = 0;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            t += 1;
            rank += self.binom[p][t];
            rest &= rest - 1;
        }
        Some(rank)
    }

    pub fn space(&self) -> Space {
        Space::Sector { n: self.n, k: self.k }
    }

    /// Total `S^z` eigenvalue shared by every state of the sector.
    pub fn sz(&self) -> f64 {
        (self.n as f64 - 2.0 * self.k as f64) / 2.0
    }
}

/// Either one sector or the whole `2^N`-dimensional space.
///
/// Operators bind to a `Basis`; on the full space the index of a state is its mask.
#[derive(Debug, Clone)]
pub enum Basis {
    Sector(SectorBasis),
    Full { n: usize },
}

impl Basis {
    pub fn full(n: usize) -> Result<Self, BasisError> {
        if n > MAX_SITES {
            return Err(BasisError::TooManySites { n });
        }
        let dim = 1usize << n;
        if dim > DEFAULT_FULL_SPACE_CAP {
            return Err(BasisError::SectorTooLarge { n, k: n, size: dim, budget: DEFAULT_FULL_SPACE_CAP });
        }
        Ok(Basis::Full { n })
    }

    pub fn sector(n: usize, k: usize) -> Result<Self, BasisError> {
        SectorBasis::enumerate(n, k).map(Basis::Sector)
    }

    pub fn sites(&self) -> usize {
        match self {
            Basis::Sector(s) => s.sites(),
            Basis::Full { n } => *n,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Basis::Sector(s) => s.len(),
            Basis::Full { n } => 1usize << n,
        }
    }

    #[inline]
    pub fn mask(&self, index: usize) -> Mask {
        match self {
            Basis::Sector(s) => s.states[index],
            Basis::Full { .. } => index as Mask,
        }
    }

    #[inline]
    pub fn index(&self, mask: Mask) -> Option<usize> {
        match self {
            Basis::Sector(s) => s.rank(mask),
            Basis::Full { n } => ((mask as u64) < (1u64 << n)).then_some(mask as usize),
        }
    }

    pub fn space(&self) -> Space {
        match self {
            Basis::Sector(s) => s.space(),
            Basis::Full { n } => Space::Full { n: *n },
        }
    }
}

/// Complex amplitudes over a sector or the full space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub space: Space,
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(space: Space, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(space.dim(), amplitudes.len());
        Self { space, amplitudes }
    }

    pub fn zeros(space: Space) -> Self {
        Self { space, amplitudes: vec![Complex64::new(0.0, 0.0); space.dim()] }
    }

    pub fn from_real(space: Space, values: &[f64]) -> Self {
        Self::new(space, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Copies a sector vector into the full space (index = mask).
    pub fn embed(&self, basis: &SectorBasis) -> StateVector {
        assert_eq!(self.space, basis.space(), "vector does not live on this sector");
        let n = basis.sites();
        let mut out = StateVector::zeros(Space::Full { n });
        for (amp, &mask) in self.amplitudes.iter().zip(basis.states()) {
            out.amplitudes[mask as usize] = *amp;
        }
        out
    }

    /// Restricts a full-space vector to one sector, dropping other amplitudes.
    pub fn restrict(&self, basis: &SectorBasis) -> StateVector {
        assert_eq!(self.space, Space::Full { n: basis.sites() }, "expected a full-space vector");
        let amps = basis.states().iter().map(|&m| self.amplitudes[m as usize]).collect();
        StateVector::new(basis.space(), amps)
    }
}

/// The all-up state `|↑…↑⟩`: the single state of sector `k = 0`.
pub fn all_up_state(n: usize) -> Result<StateVector, BasisError> {
    if n < 2 {
        return Err(BasisError::TooFewSites(n));
    }
    if n > MAX_SITES {
        return Err(BasisError::TooManySites { n });
    }
    Ok(StateVector::new(Space::Sector { n, k: 0 }, vec![Complex64::new(1.0, 0.0)]))
}

/// Uniform superposition of every state with `k` down spins.
pub fn dicke_state(n: usize, k: usize) -> Result<StateVector, BasisError> {
    let basis = SectorBasis::enumerate(n, k)?;
    let amp = Complex64::new(1.0 / (basis.len() as f64).sqrt(), 0.0);
    Ok(StateVector::new(basis.space(), vec![amp; basis.len()]))
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨x, y⟩`, conjugate-linear in `x`.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}
