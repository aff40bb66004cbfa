//! Globally adaptive 21-point Gauss–Kronrod quadrature on finite intervals.
//!
//! The integrand is split into caller-supplied panels first (for oscillatory
//! integrands these are aligned with the oscillation period), after which the
//! panel with the largest error estimate is bisected until the accumulated
//! error meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    /// Integral of `|f|`; sets the rounding floor of `error`.
    pub magnitude: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_panels: 200_000,
        }
    }
}

/// One Kronrod panel: (integral, error estimate, integral of |f|).
fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err, res_abs)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over the panels delimited by `edges` (sorted, at least two entries).
pub fn integrate_panels<F: Fn(f64) -> f64>(f: F, edges: &[f64], cfg: QuadConfig) -> Result<Estimate> {
    assert!(edges.len() >= 2, "need at least one panel");
    let mut heap = BinaryHeap::with_capacity(edges.len() * 2);
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    for w in edges.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (value, error, magnitude) = kronrod21(&f, w[0], w[1]);
        total += value;
        total_err += error;
        total_abs += magnitude;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
            magnitude,
        });
    }
    // Below the rounding floor of Σ|f| further bisection cannot help.
    let target = |total: f64, total_abs: f64| {
        cfg.abs_tol
            .max(cfg.rel_tol * total.abs())
            .max(100.0 * f64::EPSILON * total_abs)
    };
    while total_err > target(total, total_abs) {
        if heap.len() >= cfg.max_panels {
            return Err(Error::Quadrature {
                value: total,
                error: total_err,
            });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine precision; accept what we have.
            heap.push(worst);
            break;
        }
        let (v1, e1, m1) = kronrod21(&f, worst.a, mid);
        let (v2, e2, m2) = kronrod21(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        total_abs += m1 + m2 - worst.magnitude;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1, magnitude: m1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2, magnitude: m2 });
    }
    // Re-sum to shed the drift of the running totals.
    let (value, error, magnitude) = heap
        .iter()
        .fold((0.0, 0.0, 0.0), |(v, e, m), p| (v + p.value, e + p.error, m + p.magnitude));
    Ok(Estimate {
        value,
        error,
        magnitude,
        panels: heap.len(),
    })
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<Estimate> {
    integrate_panels(f, &[a, b], cfg)
}
