//! Separability criteria, negativity and von Neumann entropies of Gaussian
//! states given by their covariance matrices.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::covariance::{CovarianceMatrix, Direction, PairMoments};
use crate::error::{Error, Result};
use crate::value::{Divergence, Extended, R_DIVERGENCE_THRESHOLD};

/// Symplectic eigenvalues below `1 − UNCERTAINTY_SLACK` violate the
/// uncertainty relation.
pub const UNCERTAINTY_SLACK: f64 = 1e-10;

/// `S₁ = 4⟨(q_j+q_k)²/2⟩⟨(p_j−p_k)²/2⟩ − 1` and `S₂` with the signs swapped.
pub fn separability_criteria(m: &PairMoments) -> (f64, f64) {
    (product_criterion(m.q_plus, m.p_minus), product_criterion(m.q_minus, m.p_plus))
}

fn product_criterion(q: f64, p: f64) -> f64 {
    if q.is_infinite() && p > 0.0 || p.is_infinite() && q > 0.0 {
        f64::INFINITY
    } else {
        4.0 * q * p - 1.0
    }
}

/// `E_N = Σ_k max(0, −½ ln(S_k + 1))`.
pub fn negativity(s1: f64, s2: f64) -> Result<f64> {
    let mut total = 0.0;
    for s in [s1, s2] {
        if s.is_nan() || s <= -1.0 {
            return Err(Error::Domain(format!("separability criterion {s} <= -1 is unphysical")));
        }
        total += (-0.5 * s.ln_1p()).max(0.0);
    }
    Ok(total)
}

/// Which criterion is violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Violation {
    None,
    S1,
    S2,
    /// Not expected for these states; kept so it can be reported.
    Both,
}

impl Violation {
    pub fn of(s1: f64, s2: f64) -> Violation {
        match (s1 < 0.0, s2 < 0.0) {
            (false, false) => Violation::None,
            (true, false) => Violation::S1,
            (false, true) => Violation::S2,
            (true, true) => Violation::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub direction: Direction,
    pub tau: usize,
    pub s1: f64,
    pub s2: f64,
    pub negativity: f64,
    pub violated: Violation,
}

pub fn entanglement_report(m: &PairMoments) -> Result<EntanglementReport> {
    let (s1, s2) = separability_criteria(m);
    Ok(EntanglementReport {
        direction: m.direction,
        tau: m.separation,
        s1,
        s2,
        negativity: negativity(s1, s2)?,
        violated: Violation::of(s1, s2),
    })
}

fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues `r = 2|eig(iΩσ)|`, one per oscillator, sorted
/// descending and not clamped.
pub fn symplectic_eigenvalues_raw(entries: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = entries.nrows();
    if dim == 0 || dim % 2 != 0 || entries.ncols() != dim {
        return Err(Error::NumericalFailure(format!("covariance matrix of shape {dim}x{}", entries.ncols())));
    }
    if entries.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure("covariance matrix has non-finite entries".into()));
    }
    // B = σ^½ Ω σ^½ is antisymmetric; BᵀB has each ν² twice
    let eig = SymmetricEigen::try_new(entries.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NumericalFailure("eigensolver did not converge".into()))?;
    if eig.eigenvalues.iter().any(|&v| v <= 0.0) {
        return Err(Error::NumericalFailure("covariance matrix is not positive definite".into()));
    }
    let root = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
        * eig.eigenvectors.transpose();
    let b = &root * symplectic_form(dim / 2) * &root;
    let btb = b.transpose() * &b;
    let nu2 = SymmetricEigen::try_new(btb, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NumericalFailure("eigensolver did not converge".into()))?
        .eigenvalues;
    let mut sorted: Vec<f64> = nu2.iter().map(|&v| v.max(0.0)).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(sorted.iter().step_by(2).map(|&v| 2.0 * v.sqrt()).collect())
}

/// Symplectic spectrum of a physical covariance matrix, each value clamped
/// up to 1.
pub fn symplectic_spectrum(cov: &CovarianceMatrix) -> Result<Vec<f64>> {
    let raw = symplectic_eigenvalues_raw(&cov.entries)?;
    if let Some(&min) = raw.last() {
        if min < 1.0 - UNCERTAINTY_SLACK {
            return Err(Error::Domain(format!("symplectic eigenvalue {min} violates the uncertainty relation")));
        }
    }
    Ok(raw.into_iter().map(|r| r.max(1.0)).collect())
}

/// Entropy of one thermal mode with symplectic eigenvalue r:
/// `((r+1)/2) ln((r+1)/2) − ((r−1)/2) ln((r−1)/2)`.
pub fn von_neumann_entropy(r: Extended) -> Result<Extended> {
    let r = match r {
        Extended::Infinite(d) => return Ok(Extended::Infinite(d)),
        Extended::Finite(r) => r,
    };
    if r.is_nan() || r < 1.0 - UNCERTAINTY_SLACK {
        return Err(Error::Domain(format!("symplectic eigenvalue {r} below 1")));
    }
    if r <= 1.0 {
        return Ok(Extended::Finite(0.0));
    }
    let plus = (r + 1.0) / 2.0;
    let minus = (r - 1.0) / 2.0;
    Ok(Extended::Finite(plus * plus.ln() - minus * minus.ln()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockEntropyReport {
    pub block_size: usize,
    pub direction: Option<Direction>,
    pub symplectic_eigenvalues: Vec<f64>,
    pub entropy: Extended,
}

/// `S_V = Σ_j S_V(r_j)` over the symplectic spectrum of the block.
pub fn block_entropy(cov: &CovarianceMatrix) -> Result<BlockEntropyReport> {
    let spectrum = symplectic_spectrum(cov)?;
    let direction = match cov.modes.first() {
        Some(&(_, d)) if cov.modes.iter().all(|&(_, e)| e == d) => Some(d),
        _ => None,
    };
    let mut total = 0.0;
    let mut divergent = false;
    for &r in &spectrum {
        if r > R_DIVERGENCE_THRESHOLD {
            divergent = true;
            continue;
        }
        total += von_neumann_entropy(Extended::Finite(r))?.as_f64();
    }
    Ok(BlockEntropyReport {
        block_size: cov.len(),
        direction,
        symplectic_eigenvalues: spectrum,
        entropy: if divergent { Extended::Infinite(Divergence::Threshold) } else { Extended::Finite(total) },
    })
}

/// Logarithmic negativity `Σ_k max(0, −ln r̃_k)` of the bipartition
/// {first oscillator} | {rest}, from the partially transposed covariance
/// matrix (momentum of the first oscillator reflected).
pub fn logarithmic_negativity(cov: &CovarianceMatrix) -> Result<f64> {
    let mut pt = cov.entries.clone();
    let dim = pt.nrows();
    for k in 0..dim {
        if k != 1 {
            pt[(1, k)] = -pt[(1, k)];
            pt[(k, 1)] = -pt[(k, 1)];
        }
    }
    let raw = symplectic_eigenvalues_raw(&pt)?;
    Ok(raw.iter().map(|&r| (-r.ln()).max(0.0)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn vacuum(m: f64, w: f64) -> PairMoments {
        PairMoments::new(Direction::X, 1, 1.0 / (2.0 * m * w), m * w / 2.0, 0.0, 0.0)
    }

    #[test]
    fn vacuum_is_separable_boundary() {
        let (s1, s2) = separability_criteria(&vacuum(2.0, 1.3));
        assert!(s1.abs() < 1e-15 && s2.abs() < 1e-15);
        assert_eq!(negativity(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn negativity_examples() {
        assert_relative_eq!(negativity(-0.4597, 2.3).unwrap(), -0.5 * 0.5403f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(negativity(-0.4597, 2.3).unwrap(), 0.3078, epsilon = 1e-4);
        assert_eq!(negativity(std::f64::consts::E.powi(2) - 1.0, 0.0).unwrap(), 0.0);
        assert!(matches!(negativity(-1.0, 0.0), Err(Error::Domain(_))));
        assert_eq!(negativity(-0.5, f64::INFINITY).unwrap(), 0.5 * 2f64.ln());
    }

    #[test]
    fn sign_flip_swaps_criteria() {
        let m = PairMoments::new(Direction::Y, 1, 0.3, 0.9, 0.1, -0.2);
        let (a1, a2) = separability_criteria(&m);
        let (b1, b2) = separability_criteria(&m.with_negated_covariances());
        assert_eq!((a1, a2), (b2, b1));
    }

    #[test]
    fn spectrum_of_simple_states() {
        let cov = CovarianceMatrix::new(vec![(0, Direction::X)], DMatrix::from_diagonal_element(2, 2, 0.5), 0.0);
        assert_relative_eq!(symplectic_spectrum(&cov).unwrap()[0], 1.0, max_relative = 1e-14);
        let c = 3.7;
        let cov = CovarianceMatrix::new(
            vec![(0, Direction::X)],
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c / (2.0 * 3.0), 3.0 * c / 2.0])),
            1.0,
        );
        assert_relative_eq!(symplectic_spectrum(&cov).unwrap()[0], c, max_relative = 1e-14);
    }

    #[test]
    fn entropy_values() {
        assert_eq!(von_neumann_entropy(Extended::Finite(1.0)).unwrap(), Extended::Finite(0.0));
        assert_relative_eq!(
            von_neumann_entropy(Extended::Finite(3.0)).unwrap().as_f64(),
            2.0 * 2f64.ln(),
            max_relative = 1e-15
        );
        let inf = Extended::Infinite(Divergence::QuadratureGrowth);
        assert_eq!(von_neumann_entropy(inf).unwrap(), inf);
        assert!(von_neumann_entropy(Extended::Finite(0.9)).is_err());
    }

    #[test]
    fn two_mode_squeezed_vacuum() {
        // σ = ½ [[cosh 2s I, sinh 2s Z], [sinh 2s Z, cosh 2s I]]
        let s: f64 = 0.4;
        let (c, sh) = ((2.0 * s).cosh() / 2.0, (2.0 * s).sinh() / 2.0);
        #[rustfmt::skip]
        let e = DMatrix::from_row_slice(4, 4, &[
            c, 0.0, sh, 0.0,
            0.0, c, 0.0, -sh,
            sh, 0.0, c, 0.0,
            0.0, -sh, 0.0, c,
        ]);
        let cov = CovarianceMatrix::new(vec![(0, Direction::X), (1, Direction::X)], e, 0.0);
        assert_relative_eq!(logarithmic_negativity(&cov).unwrap(), 2.0 * s, max_relative = 1e-12);
        let spec = symplectic_spectrum(&cov).unwrap();
        assert!(spec.iter().all(|&r| (r - 1.0).abs() < 1e-12));
        let single = cov.restrict(&[0]);
        let r = symplectic_spectrum(&single).unwrap()[0];
        assert_relative_eq!(r, (2.0 * s).cosh(), max_relative = 1e-12);
        let m = PairMoments::new(Direction::X, 1, c, c, sh, -sh);
        let (s1, s2) = separability_criteria(&m);
        assert_relative_eq!(negativity(s1, s2).unwrap(), 2.0 * s, max_relative = 1e-12);
    }
}
