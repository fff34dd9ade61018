//! Adaptive Gauss–Kronrod (10/21 point) quadrature, with a refinement test
//! that tells an integrable endpoint singularity from a divergent one.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::value::{Divergence, Extended};

// Kronrod abscissae on [0, 1); odd indices are shared with the Gauss rule.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_396,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Default budget of subintervals for [`integrate`].
pub const MAX_SUBINTERVALS: usize = 2000;

/// Halvings the growth test must see in a row before declaring divergence.
const GROWTH_RUN: usize = 5;
/// Increment ratio that counts as non-decaying.
const GROWTH_RATIO: f64 = 0.9;
/// Depth of the endpoint refinement sequence.
const GROWTH_DEPTH: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Estimate { value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`, bisecting the
/// panel with the largest error estimate until the summed estimate drops
/// below `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    integrate_with_budget(&f, a, b, tol, MAX_SUBINTERVALS)
}

fn integrate_with_budget<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, budget: usize) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let first = gk21(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, est: first });
    let mut total = first;

    while total.error > tol || !total.value.is_finite() {
        if heap.len() >= budget {
            return Err(Error::QuadratureFailure { estimate: total.value, error: total.error });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a.min(worst.b) && mid < worst.a.max(worst.b)) {
            // panel too narrow to split in floating point
            return Err(Error::QuadratureFailure { estimate: total.value, error: total.error });
        }
        let left = gk21(f, worst.a, mid);
        let right = gk21(f, mid, worst.b);
        heap.push(Panel { a: worst.a, b: mid, est: left });
        heap.push(Panel { a: mid, b: worst.b, est: right });
        // resum rather than update in place so rounding does not drift
        total = heap.iter().fold(Estimate { value: 0.0, error: 0.0 }, |acc, p| Estimate {
            value: acc.value + p.est.value,
            error: acc.error + p.est.error,
        });
    }
    Ok(total)
}

/// Integrate a non-negative `f` over `[a, b]` that may be singular at `b`.
///
/// If the adaptive rule cannot reach `tol`, the contributions of the
/// shrinking endpoint shells `[b − h_{k−1}, b − h_k]`, `h_k = h_0/2^k`, are
/// examined: a run of increments that fail to decay (successive ratio at
/// least 0.9 over five halvings) means the integral diverges and
/// `Extended::Infinite` is returned. Otherwise the failure is reported.
pub fn integrate_to_singular_endpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Extended> {
    let failure = match integrate_with_budget(&f, a, b, tol, MAX_SUBINTERVALS) {
        Ok(est) => return Ok(Extended::Finite(est.value)),
        Err(e) => e,
    };
    if endpoint_growth(&f, a, b) {
        Ok(Extended::Infinite(Divergence::QuadratureGrowth))
    } else {
        Err(failure)
    }
}

/// True when the shell contributions near `b` stop decaying.
fn endpoint_growth<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> bool {
    let mut h = (b - a) / 64.0;
    let mut previous: Option<f64> = None;
    let mut run = 0;
    for _ in 0..GROWTH_DEPTH {
        let next = h / 2.0;
        // each shell is smooth away from b, so a single panel suffices
        let inc = gk21(f, b - h, b - next).value;
        if !inc.is_finite() {
            return true;
        }
        if let Some(prev) = previous {
            if prev > 0.0 && inc / prev >= GROWTH_RATIO {
                run += 1;
                if run >= GROWTH_RUN {
                    return true;
                }
            } else {
                run = 0;
            }
        }
        previous = Some(inc);
        h = next;
    }
    false
}
