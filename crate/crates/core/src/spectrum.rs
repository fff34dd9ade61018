//! Normal modes of the harmonic lattice.
//!
//! In the linear configuration x and y decouple and each Fourier index has
//! two independent frequencies. In the zig-zag configuration the transverse
//! coordinate is first gauge transformed, `ỹ_j = (−1)^j y_j`, which shifts its
//! Fourier index by N/2 and leaves a 4×4 x–y block per index that is brought
//! to normal form by a real symplectic transformation.
//!
//! Phase-space ordering inside a block is (X, Px, Y, Py).

use nalgebra::{Matrix2, Matrix4};

use crate::error::{Error, Result};
use crate::lattice::{
    coulomb_constant, critical_potential_td, lattice_sum_at, softening_gap_at, solve_equilibrium,
    taylor_coefficients, Configuration, LatticeParams,
};
use crate::phase::sin_pi_ratio;

/// Radicands in `[-RADICAND_TOLERANCE, 0]` are rounding noise and clamp to 0.
pub const RADICAND_TOLERANCE: f64 = 1e-12;

/// Below this magnitude the x–y coupling is treated as exactly zero.
pub const DECOUPLED_TOLERANCE: f64 = 1e-14;

pub(crate) fn checked_sqrt(radicand: f64) -> Result<f64> {
    if radicand >= 0.0 {
        Ok(radicand.sqrt())
    } else if radicand >= -RADICAND_TOLERANCE {
        Ok(0.0)
    } else {
        Err(Error::ImaginaryFrequency { l: None, radicand })
    }
}

fn check_index(p: &LatticeParams, l: usize) -> Result<()> {
    if l == 0 || l > p.sites {
        return Err(Error::InvalidParams(format!("Fourier index {l} outside 1..={}", p.sites)));
    }
    Ok(())
}

/// Linear-configuration frequencies (ω_x, ω_y) at Fourier index l.
///
/// ω_y is computed as `(ν_t − ν_c)(ν_t + ν_c) + (C/2)·gap(l)` so that the
/// zone-boundary mode at the softening point comes out as an exact zero.
pub fn linear_dispersion(p: &LatticeParams, nu_t: f64, l: usize) -> Result<(f64, f64)> {
    check_index(p, l)?;
    let c = coulomb_constant(p);
    let li = l as i64;
    let omega_x = (p.nu * p.nu + c * lattice_sum_at(li, p.sites, p.tau_max)).sqrt();
    let nu_c = critical_potential_td(p);
    let radicand = (nu_t - nu_c) * (nu_t + nu_c) + c / 2.0 * softening_gap_at(li, p.sites, p.tau_max);
    let omega_y = checked_sqrt(radicand).map_err(|e| e.at_mode(l))?;
    Ok((omega_x, omega_y))
}

/// Squared block frequencies (ω̃_x², ω̃_y², ω̃_xy) at index l.
fn block_frequencies(p: &LatticeParams, config: &Configuration, nu_t: f64, l: usize) -> (f64, f64, f64) {
    let coeff = taylor_coefficients(p, config);
    let n = p.sites as i64;
    let li = l as i64;
    let pref = 4.0 * p.charge * p.charge / p.mass;
    let (mut sx, mut sy, mut sxy) = (0.0, 0.0, 0.0);
    for t in 1..=p.tau_max {
        let (dx, dy, dxy) = coeff.at(t);
        let ti = t as i64;
        let s = sin_pi_ratio(li * ti, n);
        sx += dx * s * s;
        // gauge-shifted index l + N/2
        let s = sin_pi_ratio((2 * li + n) * ti, 2 * n);
        sy += dy * s * s;
        if dxy != 0.0 {
            sxy += dxy * sin_pi_ratio(2 * li * ti, n);
        }
    }
    (
        p.nu * p.nu + pref * sx,
        nu_t * nu_t + pref * sy,
        p.charge * p.charge / p.mass * sxy,
    )
}

/// The 4×4 quadratic-form matrix of Fourier block l, with
/// `H_l = ξᵀ M_l ξ` and ξ = (X, Px, Y, Py).
///
/// A linear configuration is accepted and gives the decoupled block with the
/// transverse index shifted by N/2.
pub fn coupling_matrix(p: &LatticeParams, config: &Configuration, nu_t: f64, l: usize) -> Result<Matrix4<f64>> {
    p.validate()?;
    check_index(p, l)?;
    let (wx2, wy2, wxy) = block_frequencies(p, config, nu_t, l);
    let m = p.mass;
    let kin = 1.0 / (2.0 * m);
    #[rustfmt::skip]
    let mat = Matrix4::new(
        m / 2.0 * wx2, 0.0, m / 2.0 * wxy, 0.0,
        0.0,           kin, 0.0,           0.0,
        m / 2.0 * wxy, 0.0, m / 2.0 * wy2, 0.0,
        0.0,           0.0, 0.0,           kin,
    );
    Ok(mat)
}

/// Normal form of one 4×4 block.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticDiagonal {
    /// Larger normal-mode frequency.
    pub omega_v: f64,
    pub omega_w: f64,
    /// S with `S M Sᵀ = diag(ω_v/2, ω_v/2, ω_w/2, ω_w/2)`.
    pub transform: Matrix4<f64>,
    pub phi: f64,
    pub psi: f64,
}

/// Canonical form Ω₄ for (X, Px, Y, Py).
pub fn symplectic_form() -> Matrix4<f64> {
    #[rustfmt::skip]
    let omega = Matrix4::new(
        0.0, 1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, -1.0, 0.0,
    );
    omega
}

/// Diagonalize a block with the sparsity of [`coupling_matrix`].
///
/// The frequencies are `ω_{v,w} = sqrt((A + B ± R)/2)` with A = ω̃_x²,
/// B = ω̃_y², R = sqrt((A − B)² + 4ω̃_xy²). The eigenvectors of the
/// potential are `(φ, 2ω̃_xy)/sqrt(2ψ)` and its orthogonal partner,
/// with φ = A − B + R and ψ = Rφ.
pub fn symplectic_diagonalize(mat: &Matrix4<f64>) -> Result<SymplecticDiagonal> {
    let kin = mat[(1, 1)];
    let pattern_ok = kin > 0.0
        && mat[(3, 3)] == kin
        && [(0, 1), (0, 3), (1, 2), (1, 3), (2, 3)]
            .iter()
            .all(|&(i, j)| mat[(i, j)] == 0.0 && mat[(j, i)] == 0.0)
        && mat[(0, 2)] == mat[(2, 0)];
    if !pattern_ok {
        return Err(Error::InvalidParams("block matrix does not have the oscillator sparsity pattern".into()));
    }
    let m = 1.0 / (2.0 * kin);
    let a = 2.0 * mat[(0, 0)] / m;
    let b = 2.0 * mat[(2, 2)] / m;
    let w = 2.0 * mat[(0, 2)] / m;

    let delta = a - b;
    let r = delta.hypot(2.0 * w);
    let lambda_v = (a + b + r) / 2.0;
    if !(lambda_v > 0.0) {
        return Err(Error::ImaginaryFrequency { l: None, radicand: lambda_v });
    }
    let lambda_w = (a * b - w * w) / lambda_v;
    let omega_v = lambda_v.sqrt();
    let omega_w = checked_sqrt(lambda_w)?;
    if omega_w == 0.0 {
        return Err(Error::ImaginaryFrequency { l: None, radicand: lambda_w });
    }

    let (ev, ew, phi, psi) = if w.abs() <= DECOUPLED_TOLERANCE {
        if a >= b {
            ([1.0, 0.0], [0.0, 1.0], 2.0 * delta, 2.0 * delta * delta)
        } else {
            ([0.0, 1.0], [1.0, 0.0], 0.0, 0.0)
        }
    } else {
        let phi = if delta >= 0.0 { delta + r } else { 4.0 * w * w / (r - delta) };
        let psi = r * phi;
        let norm = (2.0 * psi).sqrt();
        ([phi / norm, 2.0 * w / norm], [-2.0 * w / norm, phi / norm], phi, psi)
    };

    let sv = (m * omega_v).sqrt();
    let sw = (m * omega_w).sqrt();
    #[rustfmt::skip]
    let transform = Matrix4::new(
        ev[0] / sv, 0.0,         ev[1] / sv, 0.0,
        0.0,        sv * ev[0],  0.0,        sv * ev[1],
        ew[0] / sw, 0.0,         ew[1] / sw, 0.0,
        0.0,        sw * ew[0],  0.0,        sw * ew[1],
    );
    Ok(SymplecticDiagonal { omega_v, omega_w, transform, phi, psi })
}

/// Symplectic eigenvalues of a positive quadratic form `ξᵀ M ξ`, computed as
/// the moduli of the eigenvalues of `i Ω (2M)`. Independent of
/// [`symplectic_diagonalize`]; returns them in descending order.
pub fn quadratic_form_frequencies(mat: &Matrix4<f64>) -> [f64; 2] {
    // (Ω 2M)² has eigenvalues −ω², each twice
    let g = symplectic_form() * mat * 2.0;
    let g2 = g * g;
    let ev = g2.complex_eigenvalues();
    let mut w: Vec<f64> = ev.iter().map(|z| (-z.re).max(0.0).sqrt()).collect();
    w.sort_by(|x, y| y.partial_cmp(x).unwrap());
    [w[0], w[2]]
}

/// Two-mode block of the zig-zag spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ZigZagMode {
    pub omega_v: f64,
    pub omega_w: f64,
    pub transform: Matrix4<f64>,
    pub coupling: Matrix4<f64>,
    pub phi: f64,
    pub psi: f64,
}

/// One Fourier index of the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeEntry {
    Linear { l: usize, omega_x: f64, omega_y: f64 },
    ZigZag { l: usize, mode: ZigZagMode },
}

impl ModeEntry {
    pub fn l(&self) -> usize {
        match self {
            ModeEntry::Linear { l, .. } | ModeEntry::ZigZag { l, .. } => *l,
        }
    }

    /// The two frequencies of this index: (ω_x, ω_y) or (ω_v, ω_w).
    pub fn frequencies(&self) -> [f64; 2] {
        match self {
            ModeEntry::Linear { omega_x, omega_y, .. } => [*omega_x, *omega_y],
            ModeEntry::ZigZag { mode, .. } => [mode.omega_v, mode.omega_w],
        }
    }
}

/// All normal modes at a given transverse trap frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    pub params: LatticeParams,
    pub nu_t: f64,
    pub config: Configuration,
    /// Entries for l = 1..=N in order.
    pub modes: Vec<ModeEntry>,
    /// Fourier index offset of the transverse coordinate: N/2 in the
    /// zig-zag configuration (from the gauge factor (−1)^j), else 0.
    pub y_index_shift: usize,
}

impl ModeSpectrum {
    pub fn sites(&self) -> usize {
        self.params.sites
    }

    /// Entry for index l (1-based).
    pub fn mode(&self, l: usize) -> &ModeEntry {
        &self.modes[l - 1]
    }

    /// Every frequency, 2N values.
    pub fn all_frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        self.modes.iter().flat_map(|m| m.frequencies())
    }

    /// Indices of zero-frequency modes.
    pub fn soft_modes(&self) -> Vec<usize> {
        self.modes
            .iter()
            .filter(|m| m.frequencies().iter().any(|&w| w == 0.0))
            .map(|m| m.l())
            .collect()
    }
}

/// Solve for the equilibrium and fill in all N Fourier indices.
pub fn build_spectrum(p: &LatticeParams, nu_t: f64) -> Result<ModeSpectrum> {
    let config = solve_equilibrium(p, nu_t)?;
    build_spectrum_in(p, nu_t, config)
}

/// As [`build_spectrum`] with an explicitly chosen configuration.
pub fn build_spectrum_in(p: &LatticeParams, nu_t: f64, config: Configuration) -> Result<ModeSpectrum> {
    p.validate()?;
    let n = p.sites;
    let mut modes = Vec::with_capacity(n);
    match config {
        Configuration::Linear => {
            for l in 1..=n {
                let (omega_x, omega_y) = linear_dispersion(p, nu_t, l)?;
                modes.push(ModeEntry::Linear { l, omega_x, omega_y });
            }
        }
        Configuration::ZigZag { .. } => {
            if n % 2 != 0 {
                return Err(Error::OddZigZag { sites: n });
            }
            for l in 1..=n {
                let coupling = coupling_matrix(p, &config, nu_t, l)?;
                let d = symplectic_diagonalize(&coupling).map_err(|e| e.at_mode(l))?;
                modes.push(ModeEntry::ZigZag {
                    l,
                    mode: ZigZagMode {
                        omega_v: d.omega_v,
                        omega_w: d.omega_w,
                        transform: d.transform,
                        coupling,
                        phi: d.phi,
                        psi: d.psi,
                    },
                });
            }
        }
    }
    let y_index_shift = if config.is_zigzag() { n / 2 } else { 0 };
    Ok(ModeSpectrum { params: p.clone(), nu_t, config, modes, y_index_shift })
}

/// Largest deviation of `S M Sᵀ` from its diagonal target, relative to ‖M‖.
pub fn diagonalization_residual(mat: &Matrix4<f64>, d: &Matrix4<f64>, omega_v: f64, omega_w: f64) -> f64 {
    let target = Matrix4::from_diagonal(&nalgebra::Vector4::new(
        omega_v / 2.0,
        omega_v / 2.0,
        omega_w / 2.0,
        omega_w / 2.0,
    ));
    let got = d * mat * d.transpose();
    let scale = mat.abs().max().max(target.abs().max());
    (got - target).abs().max() / scale
}

/// Largest entry of `S Ω Sᵀ − Ω`.
pub fn symplectic_residual(s: &Matrix4<f64>) -> f64 {
    let omega = symplectic_form();
    (s * omega * s.transpose() - omega).abs().max()
}

/// 2×2 potential block `[[A, w], [w, B]]` of a coupling matrix, in
/// frequency-squared units.
pub fn potential_block(mat: &Matrix4<f64>) -> Matrix2<f64> {
    let m = 1.0 / (2.0 * mat[(1, 1)]);
    Matrix2::new(mat[(0, 0)], mat[(0, 2)], mat[(2, 0)], mat[(2, 2)]) * (2.0 / m)
}
