//! TOML sweep configuration.
//!
//! ```toml
//! [lattice]
//! model = "nn"
//! sites = 20
//!
//! [sweep]
//! units = "scaled"
//! nu_t = { start = 1.0, stop = 2.0, points = 11 }
//! temperatures = [0.0, 0.1]
//! measures = ["negativity", "entropy", "block-entropy", "witness"]
//! ```
//!
//! Every key is optional. Missing lattice values fall back to the reference
//! parameter set of the chosen model.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{critical_potential_td, units, LatticeParams, Model};

/// Unit system of grid values and reported quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// ν_t in √(Q²/(m a³)), T in half of that.
    #[default]
    Scaled,
    /// Internal units, ħ = k_B = 1.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    Negativity,
    Entropy,
    BlockEntropy,
    Witness,
    Spectrum,
}

impl Measure {
    pub const DEFAULT: [Measure; 4] = [Measure::Negativity, Measure::Entropy, Measure::BlockEntropy, Measure::Witness];
}

/// A grid given either as explicit values or as an inclusive linear range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, points: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Values(v) => v.clone(),
            Grid::Range { start, stop, points } => match points {
                0 => vec![],
                1 => vec![*start],
                n => (0..*n).map(|k| start + (stop - start) * k as f64 / (*n - 1) as f64).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub model: Option<Model>,
    pub sites: Option<usize>,
    pub mass: Option<f64>,
    pub charge: Option<f64>,
    pub spacing: Option<f64>,
    pub nu: Option<f64>,
    pub tau_max: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub units: Option<Units>,
    /// ν_t values.
    pub nu_t: Option<Grid>,
    /// ν_t values as multiples of the softening point; exclusive with `nu_t`.
    pub nu_t_ratio: Option<Grid>,
    pub temperatures: Option<Grid>,
    pub measures: Option<Vec<Measure>>,
    pub block_sizes: Option<Vec<usize>>,
    pub td_limit: Option<bool>,
    /// Chain length standing in for the infinite chain where no zone
    /// integral is available.
    pub td_sites: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
}

pub const DEFAULT_TD_SITES: usize = 4096;
pub const MAX_TD_SITES: usize = 1 << 14;

/// Validated sweep. Grids are stored in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub params: LatticeParams,
    pub nu_t_grid: Vec<f64>,
    pub temperatures: Vec<f64>,
    pub measures: BTreeSet<Measure>,
    pub block_sizes: Vec<usize>,
    pub td_limit: bool,
    pub td_sites: usize,
    pub units: Units,
}

impl SweepSpec {
    pub fn frequency_unit(&self) -> f64 {
        match self.units {
            Units::Scaled => units::frequency(&self.params),
            Units::Raw => 1.0,
        }
    }

    pub fn temperature_unit(&self) -> f64 {
        match self.units {
            Units::Scaled => units::temperature(&self.params),
            Units::Raw => 1.0,
        }
    }

    pub fn wants(&self, m: Measure) -> bool {
        self.measures.contains(&m)
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn check_grid(name: &str, v: &[f64], allow_zero: bool) -> Result<()> {
    if v.is_empty() {
        return Err(config_err(format!("{name} grid is empty")));
    }
    for w in v.windows(2) {
        if !(w[1] > w[0]) {
            return Err(config_err(format!("{name} grid must be strictly increasing ({} then {})", w[0], w[1])));
        }
    }
    for &x in v {
        if !x.is_finite() || x < 0.0 || (!allow_zero && x == 0.0) {
            return Err(config_err(format!("{name} value {x} out of range")));
        }
    }
    Ok(())
}

impl ConfigFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn lattice_params(&self) -> Result<LatticeParams> {
        let l = &self.lattice;
        let model = l.model.unwrap_or(Model::NearestNeighbour);
        let sites = l.sites.unwrap_or(20);
        let mut p = match model {
            Model::NearestNeighbour => LatticeParams::reference_nn(sites),
            Model::LongRange => LatticeParams::reference_lr(sites),
        };
        if let Some(v) = l.mass {
            p.mass = v;
        }
        if let Some(v) = l.charge {
            p.charge = v;
        }
        if let Some(v) = l.spacing {
            p.spacing = v;
        }
        if let Some(v) = l.nu {
            p.nu = v;
        }
        if let Some(v) = l.tau_max {
            p.tau_max = v;
        }
        p.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(p)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let params = self.lattice_params()?;
        let s = &self.sweep;
        let units = s.units.unwrap_or_default();
        let fu = match units {
            Units::Scaled => units::frequency(&params),
            Units::Raw => 1.0,
        };
        let tu = match units {
            Units::Scaled => units::temperature(&params),
            Units::Raw => 1.0,
        };
        let nu_t_grid = match (&s.nu_t, &s.nu_t_ratio) {
            (Some(_), Some(_)) => return Err(config_err("give either nu_t or nu_t_ratio, not both")),
            (Some(g), None) => {
                let v = g.values();
                check_grid("nu_t", &v, false)?;
                v.into_iter().map(|x| x * fu).collect()
            }
            (None, Some(g)) => {
                let v = g.values();
                check_grid("nu_t_ratio", &v, false)?;
                let crit = critical_potential_td(&params);
                v.into_iter().map(|x| x * crit).collect()
            }
            (None, None) => vec![critical_potential_td(&params)],
        };
        if nu_t_grid.iter().any(|&x| !(x > 0.0)) {
            return Err(config_err("nu_t must be positive"));
        }
        let temperatures = match &s.temperatures {
            Some(g) => {
                let v = g.values();
                check_grid("temperatures", &v, true)?;
                v.into_iter().map(|x| x * tu).collect()
            }
            None => vec![0.0],
        };
        let measures: BTreeSet<Measure> = match &s.measures {
            Some(m) if m.is_empty() => return Err(config_err("measures list is empty")),
            Some(m) => m.iter().copied().collect(),
            None => Measure::DEFAULT.into_iter().collect(),
        };
        let block_sizes = s.block_sizes.clone().unwrap_or_else(|| vec![1, 2, 3]);
        if block_sizes.is_empty() || block_sizes.iter().any(|n| !(1..=3).contains(n)) {
            return Err(config_err(format!("block sizes must be drawn from 1, 2, 3; got {block_sizes:?}")));
        }
        let td_sites = s.td_sites.unwrap_or(DEFAULT_TD_SITES);
        if td_sites < 2 * params.tau_max + 1 || td_sites > MAX_TD_SITES || td_sites % 2 != 0 {
            return Err(config_err(format!("td_sites must be even and at most {MAX_TD_SITES}, got {td_sites}")));
        }
        Ok(SweepSpec {
            params,
            nu_t_grid,
            temperatures,
            measures,
            block_sizes,
            td_limit: s.td_limit.unwrap_or(false),
            td_sites,
            units,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let spec = ConfigFile::from_toml_str("").unwrap().sweep_spec().unwrap();
        assert_eq!(spec.params, LatticeParams::reference_nn(20));
        assert_eq!(spec.nu_t_grid, vec![1.0]);
        assert_eq!(spec.temperatures, vec![0.0]);
        assert_eq!(spec.block_sizes, vec![1, 2, 3]);
        assert!(!spec.td_limit);
    }

    #[test]
    fn scaled_units_convert_once() {
        let text = "[lattice]\nmodel = \"nn\"\n[sweep]\nnu_t = [1.0, 2.0]\ntemperatures = [0.0, 1.0]\n";
        let spec = ConfigFile::from_toml_str(text).unwrap().sweep_spec().unwrap();
        let fu = 0.5f64.sqrt();
        assert_eq!(spec.nu_t_grid, vec![fu, 2.0 * fu]);
        assert_eq!(spec.temperatures, vec![0.0, fu / 2.0]);
    }

    #[test]
    fn ranges_and_ratios() {
        let text = "[lattice]\nmodel = \"lr\"\nsites = 40\n[sweep]\nnu_t_ratio = { start = 0.5, stop = 1.5, points = 5 }\n";
        let spec = ConfigFile::from_toml_str(text).unwrap().sweep_spec().unwrap();
        assert_eq!(spec.params.tau_max, 4);
        let crit = critical_potential_td(&spec.params);
        assert_eq!(spec.nu_t_grid.len(), 5);
        assert!((spec.nu_t_grid[4] - 1.5 * crit).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_specs() {
        for text in [
            "[sweep]\nnu_t = [2.0, 1.0]\n",
            "[sweep]\nnu_t = []\n",
            "[sweep]\ntemperatures = [0.0, 0.0]\n",
            "[sweep]\nblock_sizes = [4]\n",
            "[sweep]\nnu_t = [1.0]\nnu_t_ratio = [1.0]\n",
            "[sweep]\nunknown = 1\n",
            "[lattice]\nsites = 1\n",
            "[lattice]\nmodel = \"nn\"\ntau_max = 3\n",
        ] {
            let r = ConfigFile::from_toml_str(text).and_then(|c| c.sweep_spec());
            assert!(matches!(r, Err(Error::Config(_))), "{text}: {r:?}");
        }
    }
}
