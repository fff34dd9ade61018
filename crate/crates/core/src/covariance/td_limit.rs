//! Ground-state moments of the infinite linear chain as integrals over the
//! Brillouin zone. Mode sums `(1/N) Σ_l f(πl/N)` become `(2/π) ∫_0^{π/2} f`
//! because every integrand is symmetric about α = π/2.

use std::f64::consts::FRAC_PI_2;

use super::Direction;
use crate::error::{Error, Result};
use crate::lattice::{coulomb_constant, critical_potential_td, lattice_sum, softening_gap, LatticeParams};
use crate::spectrum::checked_sqrt;
use crate::value::{Divergence, Extended, R_DIVERGENCE_THRESHOLD};
use crate::quadrature::{integrate, integrate_to_singular_endpoint};

/// Absolute tolerance of every zone integral.
pub const TD_TOLERANCE: f64 = 1e-8;

fn require_linear(p: &LatticeParams, nu_t: f64) -> Result<()> {
    p.validate()?;
    if !(nu_t.is_finite() && nu_t > 0.0) {
        return Err(Error::InvalidParams(format!("nu_t must be finite and positive, got {nu_t}")));
    }
    if nu_t < critical_potential_td(p) {
        return Err(Error::InvalidParams(format!(
            "zone integrals need the linear configuration; nu_t = {nu_t} is below the softening point {}",
            critical_potential_td(p)
        )));
    }
    Ok(())
}

/// Normal-mode frequency of the infinite linear chain at phase α = πl/N.
pub fn td_mode_frequency(p: &LatticeParams, nu_t: f64, dir: Direction, alpha: f64) -> Result<f64> {
    let c = coulomb_constant(p);
    match dir {
        Direction::X => Ok((p.nu * p.nu + c * lattice_sum(alpha, p.tau_max)).sqrt()),
        Direction::Y => {
            let nu_c = critical_potential_td(p);
            checked_sqrt((nu_t - nu_c) * (nu_t + nu_c) + c / 2.0 * softening_gap(alpha, p.tau_max))
        }
    }
}

/// `num / (2 m ω)` with 0/0 = 0 at a soft point.
fn position_weight(num: f64, m: f64, omega: f64) -> f64 {
    if omega == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / (2.0 * m * omega)
    }
}

/// `(2/π) ∫_0^{π/2} (1 + s cos 2ατ) / (2mω) dα`.
fn position_integral(p: &LatticeParams, nu_t: f64, dir: Direction, tau: usize, s: f64) -> Result<Extended> {
    let m = p.mass;
    let f = |alpha: f64| {
        let num = 1.0 + s * (2.0 * alpha * tau as f64).cos();
        // frequencies were checked non-negative on entry
        let omega = td_mode_frequency(p, nu_t, dir, alpha).unwrap_or(0.0);
        position_weight(num.max(0.0), m, omega)
    };
    let v = integrate_to_singular_endpoint(f, 0.0, FRAC_PI_2, TD_TOLERANCE / 2.0)?;
    Ok(match v {
        Extended::Finite(x) => Extended::Finite(x / FRAC_PI_2),
        inf => inf,
    })
}

/// `(2/π) ∫_0^{π/2} mω (1 + s cos 2ατ) / 2 dα`.
fn momentum_integral(p: &LatticeParams, nu_t: f64, dir: Direction, tau: usize, s: f64) -> Result<f64> {
    let m = p.mass;
    let f = |alpha: f64| {
        let num = 1.0 + s * (2.0 * alpha * tau as f64).cos();
        let omega = td_mode_frequency(p, nu_t, dir, alpha).unwrap_or(0.0);
        m * omega * num / 2.0
    };
    Ok(integrate(f, 0.0, FRAC_PI_2, TD_TOLERANCE / 2.0)?.value / FRAC_PI_2)
}

fn criterion(q: Extended, p: f64) -> Extended {
    match q {
        Extended::Finite(q) => Extended::Finite(4.0 * q * p - 1.0),
        inf => inf,
    }
}

/// Separability criteria (S₁, S₂) of sites j, j + τ in the infinite chain at
/// T = 0, with S₁ built from ⟨(q_j + q_{j+τ})²⟩⟨(p_j − p_{j+τ})²⟩ and S₂
/// from the opposite signs.
pub fn td_pair_criteria(p: &LatticeParams, nu_t: f64, tau: usize, dir: Direction) -> Result<(Extended, Extended)> {
    require_linear(p, nu_t)?;
    if tau == 0 {
        return Err(Error::InvalidParams("separation must be at least 1".into()));
    }
    let q_plus = position_integral(p, nu_t, dir, tau, 1.0)?;
    let q_minus = position_integral(p, nu_t, dir, tau, -1.0)?;
    let p_plus = momentum_integral(p, nu_t, dir, tau, 1.0)?;
    let p_minus = momentum_integral(p, nu_t, dir, tau, -1.0)?;
    Ok((criterion(q_plus, p_minus), criterion(q_minus, p_plus)))
}

/// Symplectic eigenvalue `r = 2 sqrt(⟨q²⟩⟨p²⟩)` of a single site of the
/// infinite chain at T = 0.
pub fn td_single_site_eigenvalue(p: &LatticeParams, nu_t: f64, dir: Direction) -> Result<Extended> {
    require_linear(p, nu_t)?;
    let m = p.mass;
    let q = integrate_to_singular_endpoint(
        |alpha| position_weight(1.0, m, td_mode_frequency(p, nu_t, dir, alpha).unwrap_or(0.0)),
        0.0,
        FRAC_PI_2,
        TD_TOLERANCE / 2.0,
    )?;
    let mom = integrate(
        |alpha| m * td_mode_frequency(p, nu_t, dir, alpha).unwrap_or(0.0) / 2.0,
        0.0,
        FRAC_PI_2,
        TD_TOLERANCE / 2.0,
    )?
    .value
        / FRAC_PI_2;
    Ok(match q {
        Extended::Finite(q) => {
            let r = (2.0 * (q / FRAC_PI_2 * mom).sqrt()).max(1.0);
            if r > R_DIVERGENCE_THRESHOLD {
                Extended::Infinite(Divergence::Threshold)
            } else {
                Extended::Finite(r)
            }
        }
        inf => inf,
    })
}
