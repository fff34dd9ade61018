//! Covariance from a dense diagonalization of the site-basis Hessian, with
//! no Fourier step. Used to validate the mode-sum path.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{thermal_factor, CovarianceMatrix, Direction};
use crate::error::{Error, Result};
use crate::lattice::{solve_equilibrium, taylor_coefficients, LatticeParams};

pub const ORACLE_MAX_SITES: usize = 64;

/// Hessian K of the harmonic potential `½ ξᵀ K ξ`, ξ = (x_0..x_{N−1}, y_0..y_{N−1}).
fn hessian(p: &LatticeParams, nu_t: f64) -> Result<DMatrix<f64>> {
    let config = solve_equilibrium(p, nu_t)?;
    let coeff = taylor_coefficients(p, &config);
    let n = p.sites;
    let q2 = p.charge * p.charge;
    let mut k = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        k[(j, j)] += p.mass * p.nu * p.nu;
        k[(n + j, n + j)] += p.mass * nu_t * nu_t;
    }
    for j in 0..n {
        for t in 1..=p.tau_max {
            let i = (j + t) % n;
            let (dx, dy, dxy) = coeff.at(t);
            // (Q²/2) d (u_i − u_j)² for each direction
            for (off, d) in [(0, dx), (n, dy)] {
                k[(off + j, off + j)] += q2 * d;
                k[(off + i, off + i)] += q2 * d;
                k[(off + j, off + i)] -= q2 * d;
                k[(off + i, off + j)] -= q2 * d;
            }
            // (Q²/2) (−1)^j d^xy (x_i − x_j)(y_i − y_j)
            let s = if j % 2 == 0 { 1.0 } else { -1.0 } * dxy * q2 / 2.0;
            for (xa, yb, sg) in [(i, i, 1.0), (i, j, -1.0), (j, i, -1.0), (j, j, 1.0)] {
                k[(xa, n + yb)] += sg * s;
                k[(n + yb, xa)] += sg * s;
            }
        }
    }
    Ok(k)
}

/// Full covariance matrix of all sites, both directions, at temperature `t`
/// (internal units), ordered as in
/// [`Correlator::full_covariance`](super::Correlator::full_covariance).
pub fn direct_covariance_oracle(p: &LatticeParams, nu_t: f64, t: f64) -> Result<CovarianceMatrix> {
    p.validate()?;
    if p.sites > ORACLE_MAX_SITES {
        return Err(Error::SizeLimitExceeded { sites: p.sites, max: ORACLE_MAX_SITES });
    }
    let n = p.sites;
    let k = hessian(p, nu_t)? / p.mass;
    let eig = SymmetricEigen::new(k.clone());
    let scale = k.abs().max();
    let mut qw = DVector::zeros(2 * n);
    let mut pw = DVector::zeros(2 * n);
    for (i, &w2) in eig.eigenvalues.iter().enumerate() {
        if w2 <= 1e-12 * scale {
            return Err(Error::Domain(format!("normal mode with squared frequency {w2:e}; moments diverge")));
        }
        let w = w2.sqrt();
        let c = thermal_factor(w, t);
        qw[i] = c / (2.0 * p.mass * w);
        pw[i] = p.mass * w * c / 2.0;
    }
    let u = &eig.eigenvectors;
    let qq = u * DMatrix::from_diagonal(&qw) * u.transpose();
    let pp = u * DMatrix::from_diagonal(&pw) * u.transpose();

    let modes: Vec<(usize, Direction)> =
        (0..n).flat_map(|s| Direction::BOTH.into_iter().map(move |d| (s, d))).collect();
    let index = |(s, d): (usize, Direction)| match d {
        Direction::X => s,
        Direction::Y => n + s,
    };
    let dim = modes.len();
    let mut entries = DMatrix::zeros(2 * dim, 2 * dim);
    for a in 0..dim {
        for b in 0..dim {
            let (ia, ib) = (index(modes[a]), index(modes[b]));
            entries[(2 * a, 2 * b)] = qq[(ia, ib)];
            entries[(2 * a + 1, 2 * b + 1)] = pp[(ia, ib)];
        }
    }
    Ok(CovarianceMatrix::new(modes, entries, t))
}
