//! Globally adaptive Gauss–Kronrod quadrature (10-point Gauss / 21-point Kronrod).
//!
//! The error estimate follows the QUADPACK `qk21` heuristic. Integration starts from a
//! caller-supplied partition so that discontinuities and peaks can be placed on knots.

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

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 21-point Kronrod panel with its error estimate.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resg = 0.0;
    let mut resk = WGK[10] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for i in 0..10 {
        let dx = half * XGK[i];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[i] = f1;
        fv2[i] = f2;
        resk += WGK[i] * (f1 + f2);
        resabs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            resg += WG[i / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for i in 0..10 {
        resasc += WGK[i] * ((fv1[i] - reskh).abs() + (fv2[i] - reskh).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Piece { a, b, value, error }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    integrate_with_knots(f, &[a, b], opts)
}

/// Integrates `f` from the first to the last knot, starting from the partition given by
/// the (sorted) knots. Converged when the summed error estimate is below both the
/// absolute and the relative tolerance.
pub fn integrate_with_knots<F: Fn(f64) -> f64>(
    f: F,
    knots: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if knots.len() < 2 {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    if knots
        .windows(2)
        .any(|w| !(w[1] >= w[0]) || !w[1].is_finite())
        || !knots[0].is_finite()
    {
        return Err(Error::domain(
            "quadrature knots",
            "must be finite and non-decreasing",
        ));
    }

    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for w in knots.windows(2) {
        if w[1] > w[0] {
            let p = gk21(&f, w[0], w[1]);
            value += p.value;
            error += p.error;
            heap.push(p);
        }
    }

    let requested = |v: f64| opts.abs_tol.min(opts.rel_tol * v.abs());
    if !(value.is_finite() && error.is_finite()) {
        return Err(Error::NonConvergence {
            lower: knots[0],
            upper: knots[knots.len() - 1],
            achieved: error,
            requested: f64::NAN,
        });
    }
    while error > requested(value) && error > 1e-300 {
        if heap.len() >= opts.max_subdivisions {
            return Err(Error::NonConvergence {
                lower: knots[0],
                upper: knots[knots.len() - 1],
                achieved: error,
                requested: requested(value),
            });
        }
        let worst = heap.pop().expect("heap is non-empty while error > 0");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval cannot be split further in floating point.
            return Err(Error::NonConvergence {
                lower: worst.a,
                upper: worst.b,
                achieved: error,
                requested: requested(value),
            });
        }
        let left = gk21(&f, worst.a, mid);
        let right = gk21(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Resum from the pieces to drop the drift of the running updates.
    let pieces = heap.into_sorted_vec();
    let value = pieces.iter().map(|p| p.value).sum();
    let error = pieces.iter().map(|p| p.error).sum();
    Ok(QuadResult {
        value,
        error,
        intervals: pieces.len(),
    })
}
