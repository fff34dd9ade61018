//! Site-basis moments assembled from the normal-mode spectrum.

use nalgebra::{DMatrix, Matrix4, Vector4};

use super::{thermal_factor, thermal_weight, CovarianceMatrix, Direction, PairMoments};
use crate::error::{Error, Result};
use crate::phase::{cos_pi_ratio, sin_pi_ratio};
use crate::spectrum::{ModeEntry, ModeSpectrum};

/// What to do with zero-frequency modes, whose position variance is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SoftModePolicy {
    /// Keep them: affected moments become `+inf`.
    #[default]
    Divergent,
    /// Drop them from every mode sum.
    Project,
}

/// Block-basis moments of one Fourier index, ordering (X, Px, Y, Py).
#[derive(Debug, Clone, Copy, Default)]
struct BlockMoments {
    qxx: f64,
    qyy: f64,
    qxy: f64,
    pxx: f64,
    pyy: f64,
    pxy: f64,
}

/// Thermal correlation functions of a lattice at fixed ν_t and T.
#[derive(Debug, Clone)]
pub struct Correlator {
    spectrum: ModeSpectrum,
    temperature: f64,
    policy: SoftModePolicy,
    blocks: Vec<BlockMoments>,
    soft: Vec<usize>,
}

/// `(1/N) Σ coef(l)·w(l)` with the convention 0·∞ = 0.
fn mode_sum(n: usize, coef: impl Fn(usize) -> f64, weight: impl Fn(usize) -> f64) -> f64 {
    let mut finite = 0.0;
    let mut infinite = 0.0;
    for l in 1..=n {
        let c = coef(l);
        if c == 0.0 {
            continue;
        }
        let w = weight(l);
        if w.is_infinite() {
            infinite += c.signum() * w.signum();
        } else {
            finite += c * w;
        }
    }
    if infinite != 0.0 {
        infinite.signum() * f64::INFINITY
    } else {
        finite / n as f64
    }
}

impl Correlator {
    /// `temperature` in internal units.
    pub fn new(spectrum: ModeSpectrum, temperature: f64, policy: SoftModePolicy) -> Result<Self> {
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::InvalidParams(format!("temperature must be finite and >= 0, got {temperature}")));
        }
        let m = spectrum.params.mass;
        let soft = spectrum.soft_modes();
        let blocks = spectrum
            .modes
            .iter()
            .map(|entry| match entry {
                ModeEntry::Linear { omega_x, omega_y, .. } => {
                    let pyy = m * thermal_weight(*omega_y, temperature) / 2.0;
                    let (qyy, pyy) = match (*omega_y == 0.0, policy) {
                        (false, _) => (thermal_factor(*omega_y, temperature) / (2.0 * m * omega_y), pyy),
                        (true, SoftModePolicy::Divergent) => (f64::INFINITY, pyy),
                        (true, SoftModePolicy::Project) => (0.0, 0.0),
                    };
                    let c = thermal_factor(*omega_x, temperature);
                    BlockMoments {
                        qxx: c / (2.0 * m * omega_x),
                        pxx: m * omega_x * c / 2.0,
                        qyy,
                        pyy,
                        ..Default::default()
                    }
                }
                ModeEntry::ZigZag { mode, .. } => {
                    let cv = thermal_factor(mode.omega_v, temperature) / 2.0;
                    let cw = thermal_factor(mode.omega_w, temperature) / 2.0;
                    let s = &mode.transform;
                    let sigma: Matrix4<f64> =
                        s.transpose() * Matrix4::from_diagonal(&Vector4::new(cv, cv, cw, cw)) * s;
                    BlockMoments {
                        qxx: sigma[(0, 0)],
                        pxx: sigma[(1, 1)],
                        qyy: sigma[(2, 2)],
                        pyy: sigma[(3, 3)],
                        qxy: sigma[(0, 2)],
                        pxy: sigma[(1, 3)],
                    }
                }
            })
            .collect();
        Ok(Correlator { spectrum, temperature, policy, blocks, soft })
    }

    pub fn spectrum(&self) -> &ModeSpectrum {
        &self.spectrum
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn policy(&self) -> SoftModePolicy {
        self.policy
    }

    pub fn sites(&self) -> usize {
        self.spectrum.sites()
    }

    fn zigzag(&self) -> bool {
        self.spectrum.config.is_zigzag()
    }

    /// Zero-frequency modes that enter the y moments with infinite weight.
    pub fn divergent_modes(&self) -> &[usize] {
        match self.policy {
            SoftModePolicy::Divergent => &self.soft,
            SoftModePolicy::Project => &[],
        }
    }

    fn block(&self, l: usize) -> &BlockMoments {
        &self.blocks[l - 1]
    }

    fn separation(&self, a: usize, b: usize) -> i64 {
        let n = self.sites() as i64;
        (b as i64 - a as i64).rem_euclid(n)
    }

    /// `(1/N) Σ_l cos(2π l d/N) w(l)` for a diagonal block weight.
    fn cos_sum(&self, d: i64, weight: impl Fn(&BlockMoments) -> f64) -> f64 {
        let n = self.sites();
        mode_sum(n, |l| cos_pi_ratio(2 * l as i64 * d, n as i64), |l| weight(self.block(l)))
    }

    /// `(1/N) Σ_l (1 + s·cos(2π l d/N)) w(l)` evaluated as one sum.
    fn pair_sum(&self, d: i64, s: f64, weight: impl Fn(&BlockMoments) -> f64) -> f64 {
        let n = self.sites();
        mode_sum(n, |l| 1.0 + s * cos_pi_ratio(2 * l as i64 * d, n as i64), |l| weight(self.block(l)))
    }

    fn parity(k: i64) -> f64 {
        if k.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// ⟨u_a v_b⟩ for positions (`momentum = false`) or momenta.
    pub fn moment(&self, a: usize, u: Direction, b: usize, v: Direction, momentum: bool) -> f64 {
        let n = self.sites() as i64;
        let d = self.separation(a, b);
        match (u, v) {
            (Direction::X, Direction::X) => {
                self.cos_sum(d, |m| if momentum { m.pxx } else { m.qxx })
            }
            (Direction::Y, Direction::Y) => {
                let sign = if self.zigzag() { Self::parity(d) } else { 1.0 };
                sign * self.cos_sum(d, |m| if momentum { m.pyy } else { m.qyy })
            }
            (Direction::X, Direction::Y) | (Direction::Y, Direction::X) => {
                if !self.zigzag() {
                    return 0.0;
                }
                let (xs, ys) = if u == Direction::X { (a, b) } else { (b, a) };
                let d = self.separation(xs, ys);
                let sum = mode_sum(
                    n as usize,
                    |l| sin_pi_ratio(2 * l as i64 * d, n),
                    |l| {
                        let m = self.block(l);
                        if momentum {
                            m.pxy
                        } else {
                            m.qxy
                        }
                    },
                );
                Self::parity(ys as i64) * sum
            }
        }
    }

    /// Moments of one direction for sites j and j + τ.
    pub fn pair_moments(&self, tau: usize, dir: Direction) -> PairMoments {
        let d = tau as i64;
        let (wq, wp): (fn(&BlockMoments) -> f64, fn(&BlockMoments) -> f64) = match dir {
            Direction::X => (|m| m.qxx, |m| m.pxx),
            Direction::Y => (|m| m.qyy, |m| m.pyy),
        };
        // transverse moments pick up (−1)^τ in the zig-zag gauge
        let s = if dir == Direction::Y && self.zigzag() { Self::parity(d) } else { 1.0 };
        let var_q = self.cos_sum(0, wq);
        let var_p = self.cos_sum(0, wp);
        let cov_q = s * self.cos_sum(d, wq);
        let cov_p = s * self.cos_sum(d, wp);
        PairMoments {
            direction: dir,
            separation: tau,
            var_q,
            var_p,
            cov_q,
            cov_p,
            q_plus: self.pair_sum(d, s, wq),
            q_minus: self.pair_sum(d, -s, wq),
            p_plus: self.pair_sum(d, s, wp),
            p_minus: self.pair_sum(d, -s, wp),
        }
    }

    /// Covariance matrix of the listed sites and directions, ordered site by
    /// site with directions in the given order.
    pub fn block_covariance(&self, sites: &[usize], directions: &[Direction]) -> Result<CovarianceMatrix> {
        let n = self.sites();
        if sites.is_empty() || directions.is_empty() {
            return Err(Error::InvalidParams("empty site or direction set".into()));
        }
        for (i, &s) in sites.iter().enumerate() {
            if s >= n {
                return Err(Error::InvalidParams(format!("site {s} outside 0..{n}")));
            }
            if sites[..i].contains(&s) {
                return Err(Error::InvalidParams(format!("site {s} listed twice")));
            }
        }
        if directions.contains(&Direction::Y) {
            if let Some(&l) = self.divergent_modes().first() {
                return Err(Error::SoftMode { l });
            }
        }
        let modes: Vec<(usize, Direction)> =
            sites.iter().flat_map(|&s| directions.iter().map(move |&d| (s, d))).collect();
        let k = modes.len();
        let mut entries = DMatrix::zeros(2 * k, 2 * k);
        for i in 0..k {
            for j in i..k {
                let (a, u) = modes[i];
                let (b, v) = modes[j];
                let q = self.moment(a, u, b, v, false);
                let p = self.moment(a, u, b, v, true);
                entries[(2 * i, 2 * j)] = q;
                entries[(2 * j, 2 * i)] = q;
                entries[(2 * i + 1, 2 * j + 1)] = p;
                entries[(2 * j + 1, 2 * i + 1)] = p;
            }
        }
        Ok(CovarianceMatrix::new(modes, entries, self.temperature))
    }

    /// Contiguous block of `len` sites starting at site 0, one direction.
    pub fn contiguous_block(&self, len: usize, dir: Direction) -> Result<CovarianceMatrix> {
        let sites: Vec<usize> = (0..len).collect();
        self.block_covariance(&sites, &[dir])
    }

    /// Every site, both directions.
    pub fn full_covariance(&self) -> Result<CovarianceMatrix> {
        let sites: Vec<usize> = (0..self.sites()).collect();
        self.block_covariance(&sites, &Direction::BOTH)
    }
}
