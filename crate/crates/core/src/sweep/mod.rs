//! Parameter sweeps over ν_t and T producing one row of measures per grid
//! point.

mod config;
mod emit;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{ConfigFile, Grid, LatticeConfig, Measure, SweepConfig, SweepSpec, Units, DEFAULT_TD_SITES, MAX_TD_SITES};
pub use emit::{emit_csv, emit_json, format_g12, parse_csv, write_csv, write_json, CsvTable, Tabular, CSV_HEADER};

use crate::covariance::{td_pair_criteria, td_single_site_eigenvalue, Correlator, Direction, SoftModePolicy};
use crate::entanglement::{block_entropy, negativity, separability_criteria, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::lattice::{critical_potential_td, solve_equilibrium, LatticeParams};
use crate::spectrum::{build_spectrum, build_spectrum_in};
use crate::value::{Divergence, Extended};
use crate::witness::witness_for;

/// One grid point, in the reporting units of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "nuT")]
    pub nu_t: f64,
    #[serde(rename = "T")]
    pub temperature: f64,
    #[serde(rename = "configVariant")]
    pub config_variant: String,
    pub b: Option<f64>,
    #[serde(rename = "S1x")]
    pub s1x: Option<Extended>,
    #[serde(rename = "S2x")]
    pub s2x: Option<Extended>,
    #[serde(rename = "S1y")]
    pub s1y: Option<Extended>,
    #[serde(rename = "S2y")]
    pub s2y: Option<Extended>,
    #[serde(rename = "ENx")]
    pub en_x: Option<f64>,
    #[serde(rename = "ENy")]
    pub en_y: Option<f64>,
    #[serde(rename = "SV1x")]
    pub sv1x: Option<Extended>,
    #[serde(rename = "SV1y")]
    pub sv1y: Option<Extended>,
    #[serde(rename = "SV2x")]
    pub sv2x: Option<Extended>,
    #[serde(rename = "SV2y")]
    pub sv2y: Option<Extended>,
    #[serde(rename = "SV3x")]
    pub sv3x: Option<Extended>,
    #[serde(rename = "SV3y")]
    pub sv3y: Option<Extended>,
    #[serde(rename = "U")]
    pub internal_energy: Option<f64>,
    pub bound: Option<f64>,
    #[serde(rename = "Tc")]
    pub tc: Option<f64>,
    #[serde(rename = "witnessTriggered")]
    pub witness_triggered: Option<bool>,
    #[serde(rename = "SV1xDivergent")]
    pub sv1x_divergent: bool,
    #[serde(rename = "SV1yDivergent")]
    pub sv1y_divergent: bool,
    #[serde(rename = "SV2xDivergent")]
    pub sv2x_divergent: bool,
    #[serde(rename = "SV2yDivergent")]
    pub sv2y_divergent: bool,
    #[serde(rename = "SV3xDivergent")]
    pub sv3x_divergent: bool,
    #[serde(rename = "SV3yDivergent")]
    pub sv3y_divergent: bool,
    pub error: Option<String>,
}

impl SweepRow {
    fn empty(nu_t: f64, temperature: f64) -> Self {
        SweepRow {
            nu_t,
            temperature,
            config_variant: String::new(),
            b: None,
            s1x: None,
            s2x: None,
            s1y: None,
            s2y: None,
            en_x: None,
            en_y: None,
            sv1x: None,
            sv1y: None,
            sv2x: None,
            sv2y: None,
            sv3x: None,
            sv3y: None,
            internal_energy: None,
            bound: None,
            tc: None,
            witness_triggered: None,
            sv1x_divergent: false,
            sv1y_divergent: false,
            sv2x_divergent: false,
            sv2y_divergent: false,
            sv3x_divergent: false,
            sv3y_divergent: false,
            error: None,
        }
    }

    fn entropy_slot(&mut self, n: usize, dir: Direction) -> &mut Option<Extended> {
        match (n, dir) {
            (1, Direction::X) => &mut self.sv1x,
            (1, Direction::Y) => &mut self.sv1y,
            (2, Direction::X) => &mut self.sv2x,
            (2, Direction::Y) => &mut self.sv2y,
            (3, Direction::X) => &mut self.sv3x,
            (3, Direction::Y) => &mut self.sv3y,
            _ => unreachable!("block sizes are validated to 1..=3"),
        }
    }

    pub fn entropy(&self, n: usize, dir: Direction) -> Option<Extended> {
        match (n, dir) {
            (1, Direction::X) => self.sv1x,
            (1, Direction::Y) => self.sv1y,
            (2, Direction::X) => self.sv2x,
            (2, Direction::Y) => self.sv2y,
            (3, Direction::X) => self.sv3x,
            (3, Direction::Y) => self.sv3y,
            _ => None,
        }
    }

    fn refresh_flags(&mut self) {
        let div = |v: Option<Extended>| matches!(v, Some(Extended::Infinite(_)));
        self.sv1x_divergent = div(self.sv1x);
        self.sv1y_divergent = div(self.sv1y);
        self.sv2x_divergent = div(self.sv2x);
        self.sv2y_divergent = div(self.sv2y);
        self.sv3x_divergent = div(self.sv3x);
        self.sv3y_divergent = div(self.sv3y);
    }

    fn note(&mut self, e: Error) {
        let msg = e.to_string();
        self.error = Some(match self.error.take() {
            Some(prev) => format!("{prev}; {msg}"),
            None => msg,
        });
    }

    pub fn s(&self, which: usize, dir: Direction) -> Option<Extended> {
        match (which, dir) {
            (1, Direction::X) => self.s1x,
            (2, Direction::X) => self.s2x,
            (1, Direction::Y) => self.s1y,
            (2, Direction::Y) => self.s2y,
            _ => None,
        }
    }

    pub fn negativity(&self, dir: Direction) -> Option<f64> {
        match dir {
            Direction::X => self.en_x,
            Direction::Y => self.en_y,
        }
    }
}

/// Entropy of a contiguous block, with a soft-mode divergence surfaced as
/// an infinite value rather than an error.
fn block_entropy_of(corr: &Correlator, n: usize, dir: Direction) -> Result<Extended> {
    match corr.contiguous_block(n, dir) {
        Ok(cov) => Ok(block_entropy(&cov)?.entropy),
        Err(Error::SoftMode { .. }) => Ok(Extended::Infinite(Divergence::SoftMode)),
        Err(e) => Err(e),
    }
}

fn finite_criteria(corr: &Correlator, dir: Direction) -> Result<(Extended, Extended, f64)> {
    let (s1, s2) = separability_criteria(&corr.pair_moments(1, dir));
    let en = negativity(s1, s2)?;
    let wrap = |s: f64| {
        if s.is_infinite() {
            Extended::Infinite(Divergence::SoftMode)
        } else {
            Extended::Finite(s)
        }
    };
    Ok((wrap(s1), wrap(s2), en))
}

/// Divergent S values still carry a sign-free meaning: the criterion holds.
fn negativity_ext(s1: Extended, s2: Extended) -> Result<f64> {
    negativity(s1.as_f64(), s2.as_f64())
}

fn set_criteria(row: &mut SweepRow, dir: Direction, s1: Extended, s2: Extended, en: f64) {
    match dir {
        Direction::X => {
            row.s1x = Some(s1);
            row.s2x = Some(s2);
            row.en_x = Some(en);
        }
        Direction::Y => {
            row.s1y = Some(s1);
            row.s2y = Some(s2);
            row.en_y = Some(en);
        }
    }
}

/// Compute one grid point in internal units; the row it returns is not yet
/// converted.
fn sweep_point(spec: &SweepSpec, nu_t: f64, temperature: f64) -> SweepRow {
    let mut row = SweepRow::empty(nu_t, temperature);
    let p = &spec.params;
    let config = match solve_equilibrium(p, nu_t) {
        Ok(c) => c,
        Err(e) => {
            row.note(e);
            return row;
        }
    };
    row.config_variant = config.name().to_string();
    row.b = Some(config.b());

    let wants_states = spec.wants(Measure::Negativity) || spec.wants(Measure::Entropy) || spec.wants(Measure::BlockEntropy);
    if wants_states {
        let state_params = if spec.td_limit { p.with_sites(spec.td_sites) } else { p.clone() };
        let state_config = if spec.td_limit {
            match solve_equilibrium(&state_params, nu_t) {
                Ok(c) => c,
                Err(e) => {
                    row.note(e);
                    return finish(row);
                }
            }
        } else {
            config
        };
        let quadrature = spec.td_limit && temperature == 0.0 && nu_t >= critical_potential_td(p);
        let corr = build_spectrum_in(&state_params, nu_t, state_config)
            .and_then(|s| Correlator::new(s, temperature, SoftModePolicy::Divergent));
        match corr {
            Ok(corr) => fill_states(spec, &mut row, &corr, p, nu_t, quadrature),
            Err(e) => row.note(e),
        }
    }

    if spec.wants(Measure::Witness) {
        match build_spectrum_in(p, nu_t, config).and_then(|s| witness_for(&s, temperature)) {
            Ok(w) => {
                row.internal_energy = Some(w.internal_energy);
                row.bound = Some(w.bound);
                row.tc = w.tc;
                row.witness_triggered = Some(w.triggered());
            }
            Err(e) => row.note(e),
        }
    }
    finish(row)
}

fn finish(mut row: SweepRow) -> SweepRow {
    row.refresh_flags();
    row
}

fn fill_states(spec: &SweepSpec, row: &mut SweepRow, corr: &Correlator, p: &LatticeParams, nu_t: f64, quadrature: bool) {
    for dir in Direction::BOTH {
        if spec.wants(Measure::Negativity) {
            let r = if quadrature {
                td_pair_criteria(p, nu_t, 1, dir).and_then(|(s1, s2)| Ok((s1, s2, negativity_ext(s1, s2)?)))
            } else {
                finite_criteria(corr, dir)
            };
            match r {
                Ok((s1, s2, en)) => set_criteria(row, dir, s1, s2, en),
                Err(e) => row.note(e),
            }
        }
        let mut sizes: Vec<usize> = Vec::new();
        if spec.wants(Measure::Entropy) {
            sizes.push(1);
        }
        if spec.wants(Measure::BlockEntropy) {
            sizes.extend(spec.block_sizes.iter().copied());
        }
        sizes.sort_unstable();
        sizes.dedup();
        for n in sizes {
            let r = if quadrature && n == 1 {
                td_single_site_eigenvalue(p, nu_t, dir).and_then(von_neumann_entropy)
            } else {
                block_entropy_of(corr, n, dir)
            };
            match r {
                Ok(v) => *row.entropy_slot(n, dir) = Some(v),
                Err(e) => row.note(e),
            }
        }
    }
}

/// Convert a row from internal units to the reporting units.
fn to_output_units(spec: &SweepSpec, mut row: SweepRow) -> SweepRow {
    let fu = spec.frequency_unit();
    let tu = spec.temperature_unit();
    row.nu_t /= fu;
    row.temperature /= tu;
    row.internal_energy = row.internal_energy.map(|u| u / fu);
    row.bound = row.bound.map(|u| u / fu);
    row.tc = row.tc.map(|t| t / tu);
    row
}

/// Run every (ν_t, T) point of the grid, ν_t outer. Points run in parallel;
/// the output order is the grid order regardless of scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Vec<SweepRow> {
    let points: Vec<(f64, f64)> =
        spec.nu_t_grid.iter().flat_map(|&nu| spec.temperatures.iter().map(move |&t| (nu, t))).collect();
    points
        .par_iter()
        .map(|&(nu, t)| to_output_units(spec, sweep_point(spec, nu, t)))
        .collect()
}

/// Same as [`run_sweep`] with a single point, convenient for one-off queries.
pub fn sweep_single(spec: &SweepSpec, nu_t: f64, temperature: f64) -> SweepRow {
    to_output_units(spec, sweep_point(spec, nu_t, temperature))
}

/// One Fourier index of the spectrum at one ν_t, frequencies in the
/// reporting units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    #[serde(rename = "nuT")]
    pub nu_t: f64,
    #[serde(rename = "configVariant")]
    pub config_variant: String,
    pub l: usize,
    /// ω_x (linear) or ω_v (zig-zag).
    #[serde(rename = "omega1")]
    pub omega_1: f64,
    /// ω_y (linear) or ω_w (zig-zag).
    #[serde(rename = "omega2")]
    pub omega_2: f64,
}

/// Normal-mode frequencies for every ν_t of the grid.
pub fn spectrum_table(spec: &SweepSpec) -> Result<Vec<SpectrumRow>> {
    let fu = spec.frequency_unit();
    let per_point: Vec<Result<Vec<SpectrumRow>>> = spec
        .nu_t_grid
        .par_iter()
        .map(|&nu_t| {
            let s = build_spectrum(&spec.params, nu_t)?;
            Ok(s.modes
                .iter()
                .map(|m| {
                    let [w1, w2] = m.frequencies();
                    SpectrumRow {
                        nu_t: nu_t / fu,
                        config_variant: s.config.name().to_string(),
                        l: m.l(),
                        omega_1: w1 / fu,
                        omega_2: w2 / fu,
                    }
                })
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_point {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Witness quantities at one grid point, reporting units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessRow {
    #[serde(rename = "nuT")]
    pub nu_t: f64,
    #[serde(rename = "T")]
    pub temperature: f64,
    #[serde(rename = "configVariant")]
    pub config_variant: String,
    #[serde(rename = "OmegaX")]
    pub omega_x: Option<f64>,
    #[serde(rename = "OmegaY")]
    pub omega_y: Option<f64>,
    #[serde(rename = "OmegaXY")]
    pub omega_xy: Option<f64>,
    #[serde(rename = "OmegaXYAbs")]
    pub omega_xy_abs: Option<f64>,
    #[serde(rename = "U")]
    pub internal_energy: Option<f64>,
    #[serde(rename = "U0")]
    pub ground_energy: Option<f64>,
    pub bound: Option<f64>,
    #[serde(rename = "boundAbs")]
    pub bound_abs: Option<f64>,
    #[serde(rename = "Tc")]
    pub tc: Option<f64>,
    #[serde(rename = "TcAbs")]
    pub tc_abs: Option<f64>,
    #[serde(rename = "witnessTriggered")]
    pub witness_triggered: Option<bool>,
    pub error: Option<String>,
}

impl WitnessRow {
    pub(crate) fn empty(nu_t: f64, temperature: f64) -> Self {
        WitnessRow {
            nu_t,
            temperature,
            config_variant: String::new(),
            omega_x: None,
            omega_y: None,
            omega_xy: None,
            omega_xy_abs: None,
            internal_energy: None,
            ground_energy: None,
            bound: None,
            bound_abs: None,
            tc: None,
            tc_abs: None,
            witness_triggered: None,
            error: None,
        }
    }
}

fn witness_point(spec: &SweepSpec, nu_t: f64, temperature: f64) -> WitnessRow {
    let fu = spec.frequency_unit();
    let tu = spec.temperature_unit();
    let mut row = WitnessRow::empty(nu_t / fu, temperature / tu);
    let r = build_spectrum(&spec.params, nu_t).and_then(|s| Ok((s.config.name(), witness_for(&s, temperature)?)));
    match r {
        Ok((name, w)) => {
            let f = w.frequencies;
            row.config_variant = name.to_string();
            row.omega_x = Some(f.omega_x / fu);
            row.omega_y = Some(f.omega_y / fu);
            row.omega_xy = Some(f.omega_xy / fu);
            row.omega_xy_abs = Some(f.omega_xy_abs / fu);
            row.internal_energy = Some(w.internal_energy / fu);
            row.ground_energy = Some(w.ground_energy / fu);
            row.bound = Some(w.bound / fu);
            row.bound_abs = Some(w.bound_abs / fu);
            row.tc = w.tc.map(|t| t / tu);
            row.tc_abs = w.tc_abs.map(|t| t / tu);
            row.witness_triggered = Some(w.triggered());
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Witness rows over the (ν_t, T) grid, ν_t outer.
pub fn witness_table(spec: &SweepSpec) -> Vec<WitnessRow> {
    let points: Vec<(f64, f64)> =
        spec.nu_t_grid.iter().flat_map(|&nu| spec.temperatures.iter().map(move |&t| (nu, t))).collect();
    points.par_iter().map(|&(nu, t)| witness_point(spec, nu, t)).collect()
}
