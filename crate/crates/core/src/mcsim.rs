//! Monte Carlo estimators of coverage.
//!
//! * **Branch mirror** samples each normalized branch process on its own (thinned,
//!   radially piecewise-constant PPP) and mirrors the analytic branch integrals term
//!   by term. It converges to the rigorous analytic value.
//! * **Physical** samples the original K-tier network, marks blockage, associates the
//!   UE with the strongest mean received power and draws misalignment and fading on
//!   the serving link only. Its estimate is a true probability.
//!
//! Trial `i` draws from a ChaCha8 stream selected by `(seed, i)`, and per-trial
//! outcomes are reduced with integer counters, so estimates are bit-identical for any
//! thread count.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coverage::{
    network_alignment, Alignment, AlignmentDistribution, CoverageResult, Method,
};
use crate::error::{Error, Result};
use crate::netmodel::{BlockageModel, DirectivityLevels, NetworkConfig};
use crate::normalize::{NormalizedNetwork, PiecewiseDensity};

/// `ln(1e6)`: void probability target for the automatic window.
const VOID_EXPONENT: f64 = 13.815_510_557_964_274;
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimKind {
    #[default]
    BranchMirror,
    Physical,
}

impl fmt::Display for SimKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimKind::BranchMirror => "branch-mirror",
            SimKind::Physical => "physical",
        })
    }
}

impl FromStr for SimKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "branch-mirror" => Ok(SimKind::BranchMirror),
            "physical" => Ok(SimKind::Physical),
            other => Err(format!(
                "unknown simulation kind `{other}` (expected branch-mirror or physical)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum WindowRadius {
    /// Radius whose void probability is below 1e-6 for every sampled process, doubled.
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub network: NetworkConfig,
    pub trials: u64,
    pub seed: u64,
    pub window: WindowRadius,
    pub kind: SimKind,
    pub alignment: Alignment,
    /// Worker threads; `None` uses the global pool. Does not affect results.
    pub threads: Option<usize>,
}

impl SimConfig {
    pub fn new(network: NetworkConfig, kind: SimKind, trials: u64, seed: u64) -> Self {
        Self {
            network,
            trials,
            seed,
            window: WindowRadius::Auto,
            kind,
            alignment: Alignment::WithErrors,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    /// Physical trials whose window held no BS (recorded as outage).
    pub outage_trials: u64,
    /// `[los, nlos_inner, nlos_outer]` means, branch mirror only.
    pub branches: Option<[f64; 3]>,
}

impl McEstimate {
    /// Coverage record with a 95 % normal-approximation half-width.
    pub fn to_coverage_result(&self, method: Method) -> CoverageResult {
        let [los, inner, outer] = self.branches.unwrap_or([self.mean, 0.0, 0.0]);
        CoverageResult {
            p_los: los,
            p_nlos_inner: inner,
            p_nlos_outer: outer,
            p_cov: self.mean,
            method,
            ci_halfwidth: Some(1.96 * self.std_error),
        }
    }
}

/// Generator of trial `trial` under `seed`: one independent ChaCha stream per trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Homogeneous PPP on the disk of radius `window_radius` centred at the origin.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, window_radius: f64, rng: &mut R) -> Vec<[f64; 2]> {
    let mean = density * PI * window_radius * window_radius;
    let n = poisson(mean, rng);
    (0..n)
        .map(|_| {
            let r = window_radius * rng.random::<f64>().sqrt();
            let theta = 2.0 * PI * rng.random::<f64>();
            [r * theta.cos(), r * theta.sin()]
        })
        .collect()
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    Poisson::new(mean)
        .expect("positive finite mean")
        .sample(rng) as u64
}

/// Splits points into `(LOS, NLOS)`: inside the LOS ball each point is LOS with
/// probability `C`; beyond it every point is NLOS.
pub fn mark_blockage<R: Rng + ?Sized>(
    points: &[[f64; 2]],
    blockage: &BlockageModel,
    rng: &mut R,
) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let mut los = Vec::new();
    let mut nlos = Vec::new();
    for &p in points {
        let x = p[0].hypot(p[1]);
        if x <= blockage.los_radius && rng.random::<f64>() < blockage.los_fraction {
            los.push(p);
        } else {
            nlos.push(p);
        }
    }
    (los, nlos)
}

/// Alignment state (1..=4) of the serving link after Gaussian pointing errors on both
/// ends; a side is aligned iff its error stays within half its beamwidth.
pub fn draw_alignment_state<R: Rng + ?Sized>(
    bs_beamwidth: f64,
    ue_beamwidth: f64,
    sigma: f64,
    rng: &mut R,
) -> usize {
    if sigma == 0.0 {
        return 1;
    }
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and positive");
    let bs_main = normal.sample(rng).abs() <= bs_beamwidth / 2.0;
    let ue_main = normal.sample(rng).abs() <= ue_beamwidth / 2.0;
    match (bs_main, ue_main) {
        (true, true) => 1,
        (true, false) => 2,
        (false, true) => 3,
        (false, false) => 4,
    }
}

/// Directivity gain of the serving link for a common beamwidth.
pub fn draw_serving_gain<R: Rng + ?Sized>(
    beamwidth: f64,
    sigma: f64,
    levels: &DirectivityLevels,
    rng: &mut R,
) -> f64 {
    levels.level(draw_alignment_state(beamwidth, beamwidth, sigma, rng))
}

fn draw_state_from_weights<R: Rng + ?Sized>(dist: &AlignmentDistribution, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (j, w) in dist.weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return j + 1;
        }
    }
    // Rounding left a sliver above the cumulative sum; give it to the last state with mass.
    dist.weights
        .iter()
        .rposition(|&w| w > 0.0)
        .map_or(1, |j| j + 1)
}

/// Automatic window for a thinned piecewise process.
pub fn auto_window(profile: &PiecewiseDensity) -> f64 {
    let pref = profile.prefactor();
    let mut mass = 0.0;
    for (start, end, v) in profile.segments() {
        if v > 0.0 && pref > 0.0 {
            let seg = pref * PI * v * (end * end - start * start);
            if mass + seg >= VOID_EXPONENT {
                let r = (start * start + (VOID_EXPONENT - mass) / (pref * PI * v)).sqrt();
                return 2.0 * r;
            }
            mass += seg;
        }
    }
    // Total mass is below the target: the window only needs to hold every point.
    profile.breakpoints().last().copied().unwrap_or(0.0)
}

/// Distance to the nearest point of the thinned piecewise process inside the window.
/// Annuli are visited outward; the first non-empty one holds the nearest point, whose
/// squared radius is the minimum of `n` area-uniform draws.
pub fn sample_nearest<R: Rng + ?Sized>(
    profile: &PiecewiseDensity,
    window_radius: f64,
    rng: &mut R,
) -> Option<f64> {
    let pref = profile.prefactor();
    if pref == 0.0 {
        return None;
    }
    for (start, end, v) in profile.segments() {
        if start >= window_radius {
            break;
        }
        let end = end.min(window_radius);
        let (a2, b2) = (start * start, end * end);
        let n = poisson(pref * v * PI * (b2 - a2), rng);
        if n > 0 {
            let u: f64 = 1.0 - rng.random::<f64>();
            let s = 1.0 - u.powf(1.0 / n as f64);
            return Some((a2 + (b2 - a2) * s).sqrt());
        }
    }
    None
}

/// Integer tallies of one batch of trials.
#[derive(Debug, Clone, Default)]
struct Tally {
    /// Per threshold: covered trials per branch.
    branch_hits: Vec<[u64; 3]>,
    /// Per threshold: Σ (per-trial value)².
    sum_sq: Vec<u64>,
    outage: u64,
}

impl Tally {
    fn new(n_thresholds: usize) -> Self {
        Self {
            branch_hits: vec![[0; 3]; n_thresholds],
            sum_sq: vec![0; n_thresholds],
            outage: 0,
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.branch_hits.iter_mut().zip(&other.branch_hits) {
            for i in 0..3 {
                a[i] += b[i];
            }
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
        self.outage += other.outage;
        self
    }

    /// Records one trial given the SNR of each branch (`None` = no serving point).
    fn record(&mut self, snrs: &[Option<f64>; 3], thresholds: &[f64]) {
        for (t, &thr) in thresholds.iter().enumerate() {
            let mut value = 0u64;
            for (b, snr) in snrs.iter().enumerate() {
                if matches!(snr, Some(s) if *s > thr) {
                    self.branch_hits[t][b] += 1;
                    value += 1;
                }
            }
            self.sum_sq[t] += value * value;
        }
    }
}

fn run_trials<F>(sim: &SimConfig, n_thresholds: usize, trial: F) -> Result<Tally>
where
    F: Fn(u64, &mut Tally) -> Result<()> + Sync,
{
    if sim.trials == 0 {
        return Err(Error::domain("trials", "must be ≥ 1"));
    }
    let chunks = sim.trials.div_ceil(CHUNK);
    let work = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut tally = Tally::new(n_thresholds);
                for i in c * CHUNK..((c + 1) * CHUNK).min(sim.trials) {
                    trial(i, &mut tally)?;
                }
                Ok(tally)
            })
            .try_reduce(|| Tally::new(n_thresholds), |a, b| Ok(a.merge(b)))
    };
    match sim.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::domain("threads", e.to_string()))?
            .install(work),
        None => work(),
    }
}

fn estimates(tally: &Tally, trials: u64, branch_mirror: bool) -> Vec<McEstimate> {
    let n = trials as f64;
    tally
        .branch_hits
        .iter()
        .zip(&tally.sum_sq)
        .map(|(hits, &sq)| {
            let sum = (hits[0] + hits[1] + hits[2]) as f64;
            let mean = sum / n;
            let var = if trials > 1 {
                ((sq as f64 - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            McEstimate {
                mean,
                std_error: (var / n).sqrt(),
                trials,
                outage_trials: tally.outage,
                branches: branch_mirror.then(|| hits.map(|h| h as f64 / n)),
            }
        })
        .collect()
}

fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    if thresholds.iter().any(|t| !(*t >= 0.0) || t.is_nan()) {
        return Err(Error::domain(
            "threshold",
            "thresholds must be ≥ 0 (linear)",
        ));
    }
    Ok(())
}

/// Branch-mirror estimates for several linear thresholds from one set of trials.
pub fn run_branch_mirror_grid(sim: &SimConfig, thresholds: &[f64]) -> Result<Vec<McEstimate>> {
    check_thresholds(thresholds)?;
    let net = NormalizedNetwork::new(&sim.network)?;
    let dist = network_alignment(&sim.network, sim.alignment);
    let window = |p: &PiecewiseDensity| match sim.window {
        WindowRadius::Auto => auto_window(p),
        WindowRadius::Fixed(r) => r,
    };
    let los_windows: Vec<f64> = net.los.iter().map(window).collect();
    let inner_window = window(&net.nlos_inner);
    let outer_window = window(&net.nlos_outer);
    let ch = sim.network.channel;
    let fading =
        Exp::new(ch.fading_rate).map_err(|e| Error::domain("fading_rate", e.to_string()))?;

    let tally = run_trials(sim, thresholds.len(), |i, tally| {
        let mut rng = trial_rng(sim.seed, i);
        let j = draw_state_from_weights(&dist, &mut rng);
        let snr = |x: Option<f64>, alpha: f64, rng: &mut ChaCha8Rng| {
            x.map(|x| {
                let h: f64 = fading.sample(rng);
                h * x.powf(-alpha) / ch.noise
            })
        };
        let los = sample_nearest(net.los_profile(j), los_windows[j - 1], &mut rng);
        let los = snr(los, ch.alpha_los, &mut rng);
        let inner = sample_nearest(&net.nlos_inner, inner_window, &mut rng);
        let inner = snr(inner, ch.alpha_nlos, &mut rng);
        let outer = sample_nearest(&net.nlos_outer, outer_window, &mut rng);
        let outer = snr(outer, ch.alpha_nlos, &mut rng);
        tally.record(&[los, inner, outer], thresholds);
        Ok(())
    })?;
    Ok(estimates(&tally, sim.trials, true))
}

pub fn run_branch_mirror(sim: &SimConfig, threshold: f64) -> Result<McEstimate> {
    Ok(run_branch_mirror_grid(sim, &[threshold])?[0])
}

/// Window of the physical simulation: covers the LOS ball (when LOS links exist) and
/// twice the void radius of the sparsest tier.
pub fn physical_window(network: &NetworkConfig) -> f64 {
    let lambda_min = network
        .tiers
        .iter()
        .map(|t| t.density)
        .fold(f64::INFINITY, f64::min);
    let void = 2.0 * (VOID_EXPONENT / (PI * lambda_min)).sqrt();
    if network.blockage.los_fraction > 0.0 {
        void.max(network.blockage.los_radius)
    } else {
        void
    }
}

/// Physical-network estimates for several linear thresholds from one set of trials.
pub fn run_physical_grid(sim: &SimConfig, thresholds: &[f64]) -> Result<Vec<McEstimate>> {
    check_thresholds(thresholds)?;
    let net = &sim.network;
    let ch = net.channel;
    let window = match sim.window {
        WindowRadius::Auto => physical_window(net),
        WindowRadius::Fixed(r) => r,
    };
    let levels: Vec<DirectivityLevels> = (0..net.tiers.len())
        .map(|k| net.tier_levels(k))
        .collect::<Result<_>>()?;
    let bs_widths: Vec<f64> = (0..net.tiers.len())
        .map(|k| net.tier_bs_pattern(k).map(|p| p.beamwidth()))
        .collect::<Result<_>>()?;
    let sigma = match sim.alignment {
        Alignment::WithErrors => net.steering_sigma,
        Alignment::Perfect => 0.0,
    };
    let fading =
        Exp::new(ch.fading_rate).map_err(|e| Error::domain("fading_rate", e.to_string()))?;

    let tally = run_trials(sim, thresholds.len(), |i, tally| {
        let mut rng = trial_rng(sim.seed, i);
        // (mean power, tier, distance, los)
        let mut best: Option<(f64, usize, f64, bool)> = None;
        for (k, tier) in net.tiers.iter().enumerate() {
            let points = sample_ppp(tier.density, window, &mut rng);
            let (los, nlos) = mark_blockage(&points, &net.blockage, &mut rng);
            for (set, is_los) in [(los, true), (nlos, false)] {
                for p in set {
                    let x = p[0].hypot(p[1]);
                    let gain = if is_los { levels[k].level(1) } else { 1.0 };
                    let power = ch.snr(tier.power, 1.0, gain, x, is_los)? * ch.noise;
                    if best.is_none_or(|b| power > b.0) {
                        best = Some((power, k, x, is_los));
                    }
                }
            }
        }
        let snr = match best {
            None => {
                tally.outage += 1;
                None
            }
            Some((_, k, x, is_los)) => {
                let gain = if is_los {
                    let state = draw_alignment_state(
                        bs_widths[k],
                        net.ue_pattern.beamwidth(),
                        sigma,
                        &mut rng,
                    );
                    levels[k].level(state)
                } else {
                    1.0
                };
                let h: f64 = fading.sample(&mut rng);
                Some(ch.snr(net.tiers[k].power, h, gain, x, is_los)?)
            }
        };
        tally.record(&[snr, None, None], thresholds);
        Ok(())
    })?;
    Ok(estimates(&tally, sim.trials, false))
}

pub fn run_physical(sim: &SimConfig, threshold: f64) -> Result<McEstimate> {
    Ok(run_physical_grid(sim, &[threshold])?[0])
}

/// Dispatches on `sim.kind`.
pub fn run_grid(sim: &SimConfig, thresholds: &[f64]) -> Result<Vec<McEstimate>> {
    match sim.kind {
        SimKind::BranchMirror => run_branch_mirror_grid(sim, thresholds),
        SimKind::Physical => run_physical_grid(sim, thresholds),
    }
}
