//! Second moments of site quadratures in Gibbs states of the lattice.
//!
//! Moments are raw symmetrized expectation values with ħ = 1, so a bare
//! oscillator of frequency ω in its ground state has ⟨q²⟩ = 1/(2mω) and
//! ⟨p²⟩ = mω/2. Symplectic eigenvalues derived from them are scaled by 2 so
//! that the vacuum has eigenvalue 1.

mod fourier;
mod oracle;
mod td_limit;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use fourier::{Correlator, SoftModePolicy};
pub use oracle::{direct_covariance_oracle, ORACLE_MAX_SITES};
pub use td_limit::{td_mode_frequency, td_pair_criteria, td_single_site_eigenvalue, TD_TOLERANCE};

/// Transverse (y) or axial (x) degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::X, Direction::Y];

    pub fn label(self) -> &'static str {
        match self {
            Direction::X => "x",
            Direction::Y => "y",
        }
    }
}

/// Covariance matrix of a set of (site, direction) oscillators, in
/// interleaved ordering (q₁, p₁, q₂, p₂, …).
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub modes: Vec<(usize, Direction)>,
    pub entries: DMatrix<f64>,
    /// Temperature in internal units.
    pub temperature: f64,
}

impl CovarianceMatrix {
    pub fn new(modes: Vec<(usize, Direction)>, entries: DMatrix<f64>, temperature: f64) -> Self {
        assert_eq!(entries.nrows(), 2 * modes.len());
        assert_eq!(entries.ncols(), 2 * modes.len());
        CovarianceMatrix { modes, entries, temperature }
    }

    /// Number of oscillators.
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Reduced state on the oscillators at the given positions of `modes`.
    pub fn restrict(&self, keep: &[usize]) -> CovarianceMatrix {
        let idx: Vec<usize> = keep.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        let entries = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.entries[(idx[i], idx[j])]);
        CovarianceMatrix {
            modes: keep.iter().map(|&k| self.modes[k]).collect(),
            entries,
            temperature: self.temperature,
        }
    }

    /// Reduced state on the oscillators matching a predicate.
    pub fn restrict_where(&self, pred: impl Fn(usize, Direction) -> bool) -> CovarianceMatrix {
        let keep: Vec<usize> = (0..self.len()).filter(|&k| pred(self.modes[k].0, self.modes[k].1)).collect();
        self.restrict(&keep)
    }

    /// Largest absolute entry difference to another matrix over the same modes.
    pub fn max_abs_diff(&self, other: &CovarianceMatrix) -> f64 {
        assert_eq!(self.modes, other.modes);
        (&self.entries - &other.entries).abs().max()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (&self.entries - self.entries.transpose()).abs().max() <= tol
    }
}

/// Single-site and two-site moments of one direction at separation τ.
///
/// The combinations `q_plus = varQ + covQ` etc. are carried separately: for a
/// chain with a zero-frequency mode they stay finite while the individual
/// moments do not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairMoments {
    pub direction: Direction,
    pub separation: usize,
    pub var_q: f64,
    pub var_p: f64,
    pub cov_q: f64,
    pub cov_p: f64,
    pub q_plus: f64,
    pub q_minus: f64,
    pub p_plus: f64,
    pub p_minus: f64,
}

impl PairMoments {
    pub fn new(direction: Direction, separation: usize, var_q: f64, var_p: f64, cov_q: f64, cov_p: f64) -> Self {
        PairMoments {
            direction,
            separation,
            var_q,
            var_p,
            cov_q,
            cov_p,
            q_plus: var_q + cov_q,
            q_minus: var_q - cov_q,
            p_plus: var_p + cov_p,
            p_minus: var_p - cov_p,
        }
    }

    /// The same moments with both covariances negated.
    pub fn with_negated_covariances(&self) -> Self {
        PairMoments {
            cov_q: -self.cov_q,
            cov_p: -self.cov_p,
            q_plus: self.q_minus,
            q_minus: self.q_plus,
            p_plus: self.p_minus,
            p_minus: self.p_plus,
            ..*self
        }
    }
}

/// `coth(ω / 2T)`, with the T = 0 limit 1.
pub fn thermal_factor(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 1.0;
    }
    let x = omega / (2.0 * temperature);
    if x > 20.0 {
        1.0
    } else {
        1.0 / x.tanh()
    }
}

/// `ω coth(ω / 2T)`, continuous through ω = 0 where it equals 2T.
pub fn thermal_weight(omega: f64, temperature: f64) -> f64 {
    if omega == 0.0 {
        2.0 * temperature.max(0.0)
    } else {
        omega * thermal_factor(omega, temperature)
    }
}
