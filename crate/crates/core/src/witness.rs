//! Energy witness: every fully separable state of the chain has mean energy
//! at least `(N/2)(Ω_x + Ω_y + Ω_xy)`, so a Gibbs state below that bound is
//! entangled. The crossing temperature is the witness critical temperature.
//!
//! The single-site frequencies come from averaging the pair potential in a
//! product state with zero mean displacement: each site then feels
//! `Ω_u² = ν_u² + (2Q²/m) Σ_{τ>0} d_τ^u`.

use serde::Serialize;

use crate::covariance::{thermal_weight, Correlator, Direction, SoftModePolicy};
use crate::entanglement::separability_criteria;
use crate::error::{Error, Result};
use crate::lattice::{critical_potential_td, taylor_coefficients, Configuration, LatticeParams};
use crate::spectrum::{build_spectrum, ModeSpectrum};

/// Effective single-site frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveFrequencies {
    pub omega_x: f64,
    pub omega_y: f64,
    /// Cross coefficient summed with its alternating sign: the contributions
    /// of the two neighbours at ±τ cancel, leaving 0.
    pub omega_xy: f64,
    /// Cross coefficient summed over magnitudes, `(2Q²/m) Σ_{τ>0} |d_τ^xy|`.
    pub omega_xy_abs: f64,
}

pub fn effective_frequencies(p: &LatticeParams, nu_t: f64, config: &Configuration) -> Result<EffectiveFrequencies> {
    p.validate()?;
    let c = taylor_coefficients(p, config);
    let pref = 2.0 * p.charge * p.charge / p.mass;
    let wx2 = p.nu * p.nu + pref * c.dx.iter().sum::<f64>();
    let wy2 = nu_t * nu_t + pref * c.dy.iter().sum::<f64>();
    for (name, v) in [("x", wx2), ("y", wy2)] {
        if v < 0.0 {
            return Err(Error::Domain(format!("effective {name} frequency squared is negative ({v})")));
        }
    }
    // site j meets d^xy with sign (−1)^j from the pair (j, j+τ) and
    // (−1)^{j−τ} from (j−τ, j); for odd τ these cancel
    let signed: f64 = c
        .dxy
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let tau = k + 1;
            let back = if tau % 2 == 0 { 1.0 } else { -1.0 };
            d * (1.0 + back) / 2.0
        })
        .sum();
    Ok(EffectiveFrequencies {
        omega_x: wx2.sqrt(),
        omega_y: wy2.sqrt(),
        omega_xy: pref * signed,
        omega_xy_abs: pref * c.dxy.iter().map(|d| d.abs()).sum::<f64>(),
    })
}

/// `U(T) = Σ ω (n̄ + ½)` over all 2N normal modes; a zero-frequency mode
/// contributes T.
pub fn internal_energy(spectrum: &ModeSpectrum, temperature: f64) -> f64 {
    spectrum.all_frequencies().map(|w| thermal_weight(w, temperature) / 2.0).sum()
}

/// Separable energy bound `(N/2)(Ω_x + Ω_y + Ω_xy)` for a given Ω_xy.
pub fn separable_bound(sites: usize, f: &EffectiveFrequencies, omega_xy: f64) -> f64 {
    sites as f64 / 2.0 * (f.omega_x + f.omega_y + omega_xy)
}

/// Relative margin below which U(0) counts as touching the bound.
const BOUND_MARGIN: f64 = 1e-12;

/// Temperature where `U(T)` reaches `bound`, or `None` if the ground state
/// is already at or above it.
pub fn crossing_temperature(spectrum: &ModeSpectrum, bound: f64) -> Result<Option<f64>> {
    let u0 = internal_energy(spectrum, 0.0);
    if u0 >= bound * (1.0 - BOUND_MARGIN) {
        return Ok(None);
    }
    let p = &spectrum.params;
    let mut lo = 0.0;
    let mut hi = 100.0 * p.nu.max(spectrum.nu_t);
    let mut expansions = 0;
    while internal_energy(spectrum, hi) < bound {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 100 {
            return Err(Error::NoConvergence { what: "witness temperature bracket", residual: bound });
        }
    }
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if internal_energy(spectrum, mid) < bound {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub frequencies: EffectiveFrequencies,
    pub bound: f64,
    pub bound_abs: f64,
    pub temperature: f64,
    pub internal_energy: f64,
    pub ground_energy: f64,
    /// Crossing temperature against `bound`.
    pub tc: Option<f64>,
    /// Crossing temperature against `bound_abs`.
    pub tc_abs: Option<f64>,
}

impl WitnessReport {
    /// True when the Gibbs state at `temperature` is certified entangled.
    pub fn triggered(&self) -> bool {
        self.internal_energy < self.bound
    }
}

/// Witness quantities at ν_t and temperature T (internal units).
pub fn witness_report(p: &LatticeParams, nu_t: f64, temperature: f64) -> Result<WitnessReport> {
    let spectrum = build_spectrum(p, nu_t)?;
    witness_for(&spectrum, temperature)
}

pub fn witness_for(spectrum: &ModeSpectrum, temperature: f64) -> Result<WitnessReport> {
    let p = &spectrum.params;
    let f = effective_frequencies(p, spectrum.nu_t, &spectrum.config)?;
    let bound = separable_bound(p.sites, &f, f.omega_xy);
    let bound_abs = separable_bound(p.sites, &f, f.omega_xy_abs);
    Ok(WitnessReport {
        frequencies: f,
        bound,
        bound_abs,
        temperature,
        internal_energy: internal_energy(spectrum, temperature),
        ground_energy: internal_energy(spectrum, 0.0),
        tc: crossing_temperature(spectrum, bound)?,
        tc_abs: crossing_temperature(spectrum, bound_abs)?,
    })
}

/// Critical witness temperature at ν_t (internal units).
pub fn critical_temperature(p: &LatticeParams, nu_t: f64) -> Result<Option<f64>> {
    Ok(witness_report(p, nu_t, 0.0)?.tc)
}

/// Interval of ν_t below the softening point where nearest-neighbour
/// transverse negativity vanishes: S₁ ≥ 0 above `lower`, S₂ ≥ 0 below
/// `upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativityGap {
    /// Where S₁ turns negative going up.
    pub upper: f64,
    /// Where S₂ turns negative going down.
    pub lower: f64,
}

impl NegativityGap {
    /// Representative point c_y of the gap.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.upper + self.lower)
    }
}

fn transverse_criteria(p: &LatticeParams, nu_t: f64, temperature: f64) -> Result<(f64, f64)> {
    let corr = Correlator::new(build_spectrum(p, nu_t)?, temperature, SoftModePolicy::Divergent)?;
    Ok(separability_criteria(&corr.pair_moments(1, Direction::Y)))
}

fn bisect(mut lo: f64, mut hi: f64, inside_at_hi: impl Fn(f64) -> Result<bool>) -> Result<f64> {
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if inside_at_hi(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Locate the zero-negativity gap of the nearest-neighbour y pair below
/// the softening point, scanning down from it in steps of `step`·ν_c.
pub fn negativity_gap(p: &LatticeParams, temperature: f64, step: f64) -> Result<Option<NegativityGap>> {
    let crit = critical_potential_td(p);
    let mut prev = crit * (1.0 - 1e-6);
    let (s1, _) = transverse_criteria(p, prev, temperature)?;
    if s1 >= 0.0 {
        return Ok(None);
    }
    let mut k = 1;
    // first point where S₁ is no longer violated
    let upper = loop {
        let nu = crit * (1.0 - step * k as f64);
        if nu <= 0.0 {
            return Ok(None);
        }
        let (s1, _) = match transverse_criteria(p, nu, temperature) {
            Ok(s) => s,
            Err(Error::ImaginaryFrequency { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        if s1 >= 0.0 {
            break bisect(nu, prev, |x| Ok(transverse_criteria(p, x, temperature)?.0 < 0.0))?;
        }
        prev = nu;
        k += 1;
    };
    // continue down until S₂ is violated
    let mut prev = upper;
    loop {
        let nu = crit * (1.0 - step * k as f64);
        if nu <= 0.0 {
            return Ok(None);
        }
        let (_, s2) = match transverse_criteria(p, nu, temperature) {
            Ok(s) => s,
            Err(Error::ImaginaryFrequency { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        if s2 < 0.0 {
            let lower = bisect(nu, prev.min(crit), |x| Ok(transverse_criteria(p, x, temperature)?.1 >= 0.0))?;
            return Ok(Some(NegativityGap { upper, lower }));
        }
        prev = nu;
        k += 1;
    }
}
