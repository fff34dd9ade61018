use harmonic_lattice::covariance::{
    direct_covariance_oracle, td_pair_criteria, td_single_site_eigenvalue, Correlator, Direction, SoftModePolicy,
};
use harmonic_lattice::lattice::{critical_potential_td, LatticeParams};
use harmonic_lattice::spectrum::build_spectrum;

fn fourier(p: &LatticeParams, nu_t: f64, t: f64) -> Correlator {
    Correlator::new(build_spectrum(p, nu_t).unwrap(), t, SoftModePolicy::Divergent).unwrap()
}

#[test]
fn oracle_matches_fourier_path() {
    for n in [4, 6, 8, 12, 16] {
        for p in [LatticeParams::reference_nn(n), LatticeParams::long_range(n, 2.0, 1.0, 1.0, 1.0, (n - 1) / 2)] {
            let crit = critical_potential_td(&p);
            for nu_t in [1.3 * crit, 0.85 * crit, 0.6 * crit] {
                for t in [0.0, 0.25, 1.0] {
                    let dense = direct_covariance_oracle(&p, nu_t, t).unwrap();
                    let mode = fourier(&p, nu_t, t).full_covariance().unwrap();
                    let diff = dense.max_abs_diff(&mode);
                    assert!(diff < 1e-9, "N={n} tau_max={} nu_t={nu_t} T={t}: {diff:e}", p.tau_max);
                }
            }
        }
    }
}

use harmonic_lattice::entanglement::{separability_criteria, symplectic_spectrum};
use harmonic_lattice::value::{Divergence, Extended};
use std::f64::consts::PI;

#[test]
fn decoupled_chain_is_vacuum() {
    let mut p = LatticeParams::reference_lr(12);
    p.charge = 0.0;
    let c = fourier(&p, 1.4, 0.0);
    for dir in Direction::BOTH {
        for tau in 1..6 {
            let m = c.pair_moments(tau, dir);
            assert!(m.cov_q.abs() < 1e-15 && m.cov_p.abs() < 1e-15);
            assert!((m.var_q * m.var_p - 0.25).abs() < 1e-14);
        }
    }
    let dense = direct_covariance_oracle(&p, 1.4, 0.0).unwrap();
    let off_diag = dense.entries.iter().enumerate().filter(|(k, _)| k % (dense.entries.nrows() + 1) != 0);
    assert!(off_diag.map(|(_, v)| v.abs()).fold(0.0, f64::max) < 1e-15);
}

#[test]
fn critical_pair_criteria_in_infinite_chain() {
    let p = LatticeParams::reference_nn(20);
    let (s1, s2) = td_pair_criteria(&p, 1.0, 1, Direction::Y).unwrap();
    assert!((s1.as_f64() - (16.0 / (3.0 * PI * PI) - 1.0)).abs() < 1e-7, "{s1}");
    assert_eq!(s2, Extended::Infinite(Divergence::QuadratureGrowth));
}

#[test]
fn stiff_trap_decouples_transverse_direction() {
    let p = LatticeParams::reference_nn(20);
    let (s1, s2) = td_pair_criteria(&p, 1e4, 1, Direction::Y).unwrap();
    assert!(s1.as_f64().abs() < 1e-7 && s2.as_f64().abs() < 1e-7);
}

#[test]
fn zone_integrals_match_large_chain() {
    let p = LatticeParams::reference_nn(8192);
    let c = fourier(&p, 1.2, 0.0);
    let (s1, s2) = separability_criteria(&c.pair_moments(1, Direction::Y));
    let (t1, t2) = td_pair_criteria(&p, 1.2, 1, Direction::Y).unwrap();
    assert!((s1 - t1.as_f64()).abs() < 1e-3 && (s2 - t2.as_f64()).abs() < 1e-3);

    let c = fourier(&p, 1.5, 0.0);
    let m = c.pair_moments(1, Direction::Y);
    let r_finite = 2.0 * (m.var_q * m.var_p).sqrt();
    let r = td_single_site_eigenvalue(&p, 1.5, Direction::Y).unwrap().as_f64();
    assert!((r - r_finite).abs() < 1e-3);
    assert!(r > 1.0);
}

#[test]
fn single_site_eigenvalue_limits() {
    let p = LatticeParams::reference_nn(20);
    assert_eq!(
        td_single_site_eigenvalue(&p, 1.0, Direction::Y).unwrap(),
        Extended::Infinite(Divergence::QuadratureGrowth)
    );
    let mut q = p.clone();
    q.charge = 0.0;
    for dir in Direction::BOTH {
        let r = td_single_site_eigenvalue(&q, 1.3, dir).unwrap().as_f64();
        assert!((r - 1.0).abs() < 1e-12);
    }
}

#[test]
fn translation_invariance() {
    for (p, nu_t) in [(LatticeParams::reference_lr(16), 1.5), (LatticeParams::reference_lr(16), 0.9)] {
        let cov = fourier(&p, nu_t, 0.2).full_covariance().unwrap();
        let n = p.sites;
        let idx = |site: usize, dir: usize| 2 * (2 * site + dir);
        for dir in 0..2 {
            for tau in 0..n {
                let ref_q = cov.entries[(idx(0, dir), idx(tau, dir))];
                for j in 0..n {
                    let v = cov.entries[(idx(j, dir), idx((j + tau) % n, dir))] ;
                    assert!((v - ref_q).abs() < 1e-12, "dir {dir} tau {tau} j {j}");
                }
            }
        }
    }
}

#[test]
fn variances_grow_with_temperature() {
    let p = LatticeParams::reference_lr(12);
    for nu_t in [1.6, 0.9] {
        let mut last: Option<Vec<f64>> = None;
        for t in [0.0, 0.05, 0.2, 0.5, 1.0, 3.0] {
            let cov = fourier(&p, nu_t, t).full_covariance().unwrap();
            let diag: Vec<f64> = cov.entries.diagonal().iter().copied().collect();
            if let Some(prev) = &last {
                assert!(diag.iter().zip(prev).all(|(a, b)| a >= b));
            }
            last = Some(diag);
        }
    }
}

#[test]
fn linear_single_site_block_is_decoupled() {
    let p = LatticeParams::reference_nn(8);
    let cov = fourier(&p, 1.5, 0.3).block_covariance(&[3], &Direction::BOTH).unwrap();
    for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3), (0, 1), (2, 3)] {
        assert_eq!(cov.entries[(i, j)], 0.0);
    }
    let dense = direct_covariance_oracle(&p, 1.5, 0.3).unwrap().restrict(&[6, 7]);
    assert!(dense.max_abs_diff(&cov) < 1e-10);
}

#[test]
fn two_site_spectrum_matches_oracle() {
    let p = LatticeParams::reference_nn(8);
    let cov = fourier(&p, 1.2, 0.0).block_covariance(&[0, 1], &[Direction::Y]).unwrap();
    let dense = direct_covariance_oracle(&p, 1.2, 0.0).unwrap().restrict(&[1, 3]);
    let a = symplectic_spectrum(&cov).unwrap();
    let b = symplectic_spectrum(&dense).unwrap();
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-10));
    assert!(a[0] > 1.0);
}

#[test]
fn soft_mode_policies() {
    let p = LatticeParams::reference_nn(16);
    let spec = build_spectrum(&p, 1.0).unwrap();
    let div = Correlator::new(spec.clone(), 0.0, SoftModePolicy::Divergent).unwrap();
    let m = div.pair_moments(1, Direction::Y);
    assert!(m.var_q.is_infinite() && m.q_plus.is_finite() && m.q_minus.is_infinite());
    assert!(div.block_covariance(&[0], &[Direction::Y]).is_err());
    assert!(div.block_covariance(&[0], &[Direction::X]).is_ok());
    let proj = Correlator::new(spec, 0.0, SoftModePolicy::Project).unwrap();
    assert!(proj.pair_moments(1, Direction::Y).var_q.is_finite());
    assert!(proj.block_covariance(&[0, 1], &[Direction::Y]).is_ok());
}
