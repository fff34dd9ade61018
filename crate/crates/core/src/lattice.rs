//! Lattice model: parameters, unit conventions, equilibrium geometry and the
//! second-order expansion coefficients of the Coulomb interaction.
//!
//! Internally ħ = k_B = 1. Conversions to the reporting units
//! `[ν_t] = sqrt(Q²/(m a³))` and `[T] = [ν_t]/2` live in [`units`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::sin_pi_ratio;

/// Interaction model: nearest neighbour only, or truncated long range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "nn")]
    NearestNeighbour,
    #[serde(rename = "lr")]
    LongRange,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::NearestNeighbour => "nn",
            Model::LongRange => "lr",
        }
    }
}

/// Physical and numerical parameters of the periodic chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    /// Number of sites N (periodic).
    pub sites: usize,
    pub mass: f64,
    pub charge: f64,
    /// Axial lattice constant a.
    pub spacing: f64,
    /// Axial trap frequency ν.
    pub nu: f64,
    /// Interaction range; pairs with separation τ ≤ `tau_max` interact.
    pub tau_max: usize,
    pub model: Model,
}

impl LatticeParams {
    pub fn nearest_neighbour(sites: usize, mass: f64, charge: f64, spacing: f64, nu: f64) -> Self {
        LatticeParams { sites, mass, charge, spacing, nu, tau_max: 1, model: Model::NearestNeighbour }
    }

    pub fn long_range(
        sites: usize,
        mass: f64,
        charge: f64,
        spacing: f64,
        nu: f64,
        tau_max: usize,
    ) -> Self {
        LatticeParams { sites, mass, charge, spacing, nu, tau_max, model: Model::LongRange }
    }

    /// Q = 1, m = 2, a = 1, ν = 1, nearest neighbour.
    pub fn reference_nn(sites: usize) -> Self {
        Self::nearest_neighbour(sites, 2.0, 1.0, 1.0, 1.0)
    }

    /// Q = 1, m = 2, a = 14/15, ν = 1, interactions up to the fourth neighbour.
    pub fn reference_lr(sites: usize) -> Self {
        Self::long_range(sites, 2.0, 1.0, 14.0 / 15.0, 1.0, 4)
    }

    pub fn with_sites(&self, sites: usize) -> Self {
        LatticeParams { sites, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.sites < 2 {
            return bad(format!("need at least 2 sites, got {}", self.sites));
        }
        for (name, v) in [("mass", self.mass), ("spacing", self.spacing), ("nu", self.nu)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be finite and positive, got {v}"));
            }
        }
        // Q = 0 is the decoupled reference point and is allowed.
        if !(self.charge.is_finite() && self.charge >= 0.0) {
            return bad(format!("charge must be finite and non-negative, got {}", self.charge));
        }
        if self.tau_max == 0 {
            return bad("tau_max must be at least 1".into());
        }
        if self.model == Model::NearestNeighbour && self.tau_max != 1 {
            return bad(format!("nearest-neighbour model requires tau_max = 1, got {}", self.tau_max));
        }
        if 2 * self.tau_max >= self.sites {
            return bad(format!(
                "tau_max = {} must be below N/2 = {} to avoid counting a pair twice across the boundary",
                self.tau_max,
                self.sites as f64 / 2.0
            ));
        }
        Ok(())
    }

    /// The prefactor C = 4Q²/(m a³) of the dispersion relations.
    pub fn coulomb_constant(&self) -> f64 {
        coulomb_constant(self)
    }
}

/// C = 4Q²/(m a³).
pub fn coulomb_constant(p: &LatticeParams) -> f64 {
    4.0 * p.charge * p.charge / (p.mass * p.spacing.powi(3))
}

/// Reporting units.
pub mod units {
    use super::LatticeParams;

    /// [ν_t] = sqrt(Q²/(m a³)).
    pub fn frequency(p: &LatticeParams) -> f64 {
        (p.charge * p.charge / (p.mass * p.spacing.powi(3))).sqrt()
    }

    /// [T] = [ν_t] ħ / (2 k_B).
    pub fn temperature(p: &LatticeParams) -> f64 {
        frequency(p) / 2.0
    }
}

/// Σ_{τ odd ≤ τ_max} 1/τ³.
pub fn odd_harmonic_sum(tau_max: usize) -> f64 {
    (1..=tau_max).step_by(2).map(|t| 1.0 / (t as f64).powi(3)).sum()
}

/// Σ_τ sin²(ατ)/τ³ for a continuous phase α.
pub fn lattice_sum(alpha: f64, tau_max: usize) -> f64 {
    (1..=tau_max)
        .map(|t| {
            let s = (alpha * t as f64).sin();
            s * s / (t as f64).powi(3)
        })
        .sum()
}

/// Σ_τ sin²(π l τ/N)/τ³ on the Fourier grid.
pub fn lattice_sum_at(l: i64, n: usize, tau_max: usize) -> f64 {
    (1..=tau_max)
        .map(|t| {
            let s = sin_pi_ratio(l * t as i64, n as i64);
            s * s / (t as f64).powi(3)
        })
        .sum()
}

/// Distance of the lattice sum below its zone-boundary value,
/// `Σ_odd 1/τ³ − Σ_τ sin²(ατ)/τ³`, written so that it vanishes exactly at
/// α = π/2 and keeps full relative precision near it.
pub fn softening_gap(alpha: f64, tau_max: usize) -> f64 {
    (1..=tau_max)
        .map(|t| {
            let tf = t as f64;
            let w = 1.0 / tf.powi(3);
            if t % 2 == 1 {
                let c = (alpha * tf).cos();
                c * c * w
            } else {
                let s = (alpha * tf).sin();
                -s * s * w
            }
        })
        .sum()
}

/// [`softening_gap`] on the Fourier grid, α = π l / N.
pub fn softening_gap_at(l: i64, n: usize, tau_max: usize) -> f64 {
    let n = n as i64;
    (1..=tau_max)
        .map(|t| {
            let w = 1.0 / (t as f64).powi(3);
            let lt = l * t as i64;
            if t % 2 == 1 {
                // cos(π l τ / N) = sin(π (2 l τ + N) / 2N)
                let c = sin_pi_ratio(2 * lt + n, 2 * n);
                c * c * w
            } else {
                let s = sin_pi_ratio(lt, n);
                -s * s * w
            }
        })
        .sum()
}

/// Transverse trap value at which the linear chain softens, finite N:
/// `sqrt((C/2) · max_l Σ_τ sin²(π l τ/N)/τ³)`.
pub fn critical_potential(p: &LatticeParams) -> f64 {
    let max = (1..=p.sites as i64)
        .map(|l| lattice_sum_at(l, p.sites, p.tau_max))
        .fold(0.0, f64::max);
    (coulomb_constant(p) / 2.0 * max).sqrt()
}

/// Softening point in the thermodynamic limit: `sqrt((C/2) Σ_odd 1/τ³)`.
/// This is also the trap value below which the zig-zag equation has a
/// positive root.
pub fn critical_potential_td(p: &LatticeParams) -> f64 {
    (coulomb_constant(p) / 2.0 * odd_harmonic_sum(p.tau_max)).sqrt()
}

/// Equilibrium geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Configuration {
    Linear,
    /// Sites alternate at ±b/2 transverse to the axis.
    ZigZag { b: f64 },
}

impl Configuration {
    pub fn b(&self) -> f64 {
        match *self {
            Configuration::Linear => 0.0,
            Configuration::ZigZag { b } => b,
        }
    }

    pub fn is_zigzag(&self) -> bool {
        matches!(self, Configuration::ZigZag { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Configuration::Linear => "linear",
            Configuration::ZigZag { .. } => "zigzag",
        }
    }

    /// Equilibrium position of site j: (a j, ±b/2).
    pub fn equilibrium_position(&self, spacing: f64, j: usize) -> (f64, f64) {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        (spacing * j as f64, sign * self.b() / 2.0)
    }
}

/// Right-hand side of the zig-zag force balance divided by Q²:
/// Σ_{τ odd ≤ τ_max} ((τa)² + b²)^(-3/2).
fn transverse_restoring_sum(p: &LatticeParams, b: f64) -> f64 {
    (1..=p.tau_max)
        .step_by(2)
        .map(|t| {
            let ta = t as f64 * p.spacing;
            (ta * ta + b * b).powf(-1.5)
        })
        .sum()
}

/// Relative residual the equilibrium solver must reach.
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-12;

/// Solve the transverse force balance `m ν_t²/2 = Q² Σ_odd ((τa)² + b²)^(-3/2)`.
///
/// Returns `Linear` for ν_t at or above the softening point.
pub fn solve_equilibrium(p: &LatticeParams, nu_t: f64) -> Result<Configuration> {
    p.validate()?;
    if !(nu_t.is_finite() && nu_t > 0.0) {
        return Err(Error::InvalidParams(format!("nu_t must be finite and positive, got {nu_t}")));
    }
    if nu_t >= critical_potential_td(p) {
        return Ok(Configuration::Linear);
    }
    if p.sites % 2 != 0 {
        return Err(Error::OddZigZag { sites: p.sites });
    }

    let target = 0.5 * p.mass * nu_t * nu_t / (p.charge * p.charge);
    // g is strictly decreasing in b, positive at b = 0 below the threshold
    let g = |b: f64| transverse_restoring_sum(p, b) - target;

    let (mut lo, mut hi) = (0.0, 10.0 * p.spacing);
    let mut expansions = 0;
    while g(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 200 {
            return Err(Error::NoConvergence { what: "equilibrium bracket", residual: g(hi) / target });
        }
    }

    // bisection down to a narrow bracket
    while hi - lo > 1e-6 * p.spacing {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // secant polish, kept inside the bracket
    let (mut g_lo, mut g_hi) = (g(lo), g(hi));
    let mut b = 0.5 * (lo + hi);
    for _ in 0..100 {
        let cand = hi - g_hi * (hi - lo) / (g_hi - g_lo);
        b = if cand > lo && cand < hi { cand } else { 0.5 * (lo + hi) };
        let gb = g(b);
        if gb == 0.0 {
            break;
        }
        if gb > 0.0 {
            lo = b;
            g_lo = gb;
        } else {
            hi = b;
            g_hi = gb;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }

    let residual = (g(b) / target).abs();
    if residual >= EQUILIBRIUM_TOLERANCE || !(b > 0.0) {
        return Err(Error::NoConvergence { what: "equilibrium displacement", residual });
    }
    Ok(Configuration::ZigZag { b })
}

/// Second-order coefficients d_τ^x, d_τ^y, d_τ^xy for τ = 1..τ_max.
///
/// `dxy` holds the magnitude; the alternating sign (−1)^j is applied where
/// the Hamiltonian is assembled.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingCoefficients {
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub dxy: Vec<f64>,
}

impl CouplingCoefficients {
    /// Coefficient triple for separation τ (1-based).
    pub fn at(&self, tau: usize) -> (f64, f64, f64) {
        (self.dx[tau - 1], self.dy[tau - 1], self.dxy[tau - 1])
    }
}

pub fn taylor_coefficients(p: &LatticeParams, config: &Configuration) -> CouplingCoefficients {
    let a = p.spacing;
    let n = p.tau_max;
    let (mut dx, mut dy, mut dxy) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for t in 1..=n {
        let ta = t as f64 * a;
        match *config {
            Configuration::Linear => {
                let x = 1.0 / ta.powi(3);
                dx.push(x);
                dy.push(-x / 2.0);
                dxy.push(0.0);
            }
            Configuration::ZigZag { b } => {
                let bb = if t % 2 == 1 { b * b } else { 0.0 };
                let r5 = (ta * ta + bb).powf(2.5);
                dx.push((2.0 * ta * ta - bb) / (2.0 * r5));
                dy.push((2.0 * bb - ta * ta) / (2.0 * r5));
                dxy.push(if t % 2 == 1 { 3.0 * ta * b / (2.0 * r5) } else { 0.0 });
            }
        }
    }
    CouplingCoefficients { dx, dy, dxy }
}
