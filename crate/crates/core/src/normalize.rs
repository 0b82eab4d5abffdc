//! Normalization of a K-tier network into a virtual unit-power network.
//!
//! A BS of power `p` seen with directivity gain `a` over a link with exponent `α`
//! delivers the same received power as a unit-power BS moved to `(p·a)^{-1/α}·x`.
//! Applying this map tier by tier turns every homogeneous tier PPP into a
//! homogeneous PPP of density `(p·a)^{2/α}·λ`, and the LOS ball of radius `d`
//! into a ball of radius `d·(p·a)^{-1/α}`. Superposing the scaled tiers yields
//! radially piecewise-constant densities, one per LOS alignment state plus an
//! inner/outer pair for NLOS links.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::netmodel::{NetworkConfig, TierConfig};

/// Relative distance under which two scaled radii are treated as one breakpoint.
const MERGE_RTOL: f64 = 1e-12;

/// Which normalized branch a scaled tier or profile belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainState {
    /// LOS link in alignment state `j ∈ 1..=4`.
    Los(usize),
    /// NLOS link; directivity is ignored.
    Nlos,
}

/// Image of one tier under the normalization map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledTier {
    pub scaled_density: f64,
    pub scaled_radius: f64,
    pub source_tier: usize,
    pub gain_state: GainState,
}

/// Factor `(p·a)^{-1/α}` that moves a BS to its unit-power location.
pub fn scale_factor(power: f64, gain: f64, alpha: f64) -> f64 {
    (power * gain).powf(-1.0 / alpha)
}

/// Location of the virtual unit-power BS equivalent to one at `position`.
pub fn normalized_location(position: [f64; 2], power: f64, gain: f64, alpha: f64) -> [f64; 2] {
    let s = scale_factor(power, gain, alpha);
    [s * position[0], s * position[1]]
}

pub fn scale_tier_los(
    tier: &TierConfig,
    gain: f64,
    alpha_los: f64,
    los_radius: f64,
) -> Result<ScaledTier> {
    if !(gain > 0.0 && gain.is_finite()) {
        return Err(Error::domain(
            "directivity gain",
            format!("must be > 0, got {gain}"),
        ));
    }
    let pa = tier.power * gain;
    Ok(ScaledTier {
        scaled_density: pa.powf(2.0 / alpha_los) * tier.density,
        scaled_radius: los_radius * pa.powf(-1.0 / alpha_los),
        source_tier: 0,
        gain_state: GainState::Los(1),
    })
}

pub fn scale_tier_nlos(tier: &TierConfig, alpha_nlos: f64, los_radius: f64) -> ScaledTier {
    ScaledTier {
        scaled_density: tier.power.powf(2.0 / alpha_nlos) * tier.density,
        scaled_radius: los_radius * tier.power.powf(-1.0 / alpha_nlos),
        source_tier: 0,
        gain_state: GainState::Nlos,
    }
}

/// Radial step function. `values[i]` applies on `(breakpoints[i-1], breakpoints[i]]`
/// (with an implicit breakpoint 0 in front), and the last value applies beyond the
/// final breakpoint.
///
/// `prefactor` is the thinning weight (`C`, `1−C` or `1`) that consumers apply; it is
/// never folded into `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseDensity {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    prefactor: f64,
}

impl PiecewiseDensity {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, prefactor: f64) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::domain(
                "piecewise density",
                format!(
                    "{} breakpoints need {} values, got {}",
                    breakpoints.len(),
                    breakpoints.len() + 1,
                    values.len()
                ),
            ));
        }
        let mut prev = 0.0;
        for &b in &breakpoints {
            if !(b > prev && b.is_finite()) {
                return Err(Error::domain(
                    "piecewise density",
                    "breakpoints must be positive, finite and strictly increasing",
                ));
            }
            prev = b;
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::domain(
                "piecewise density",
                "values must be finite and ≥ 0",
            ));
        }
        if !(0.0..=1.0).contains(&prefactor) {
            return Err(Error::domain(
                "piecewise density",
                format!("prefactor must lie in [0, 1], got {prefactor}"),
            ));
        }
        Ok(Self {
            breakpoints,
            values,
            prefactor,
        })
    }

    pub fn homogeneous(density: f64, prefactor: f64) -> Result<Self> {
        Self::new(Vec::new(), vec![density], prefactor)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn with_prefactor(&self, prefactor: f64) -> Result<Self> {
        Self::new(self.breakpoints.clone(), self.values.clone(), prefactor)
    }

    /// `(start, end, density)` per segment; the last segment ends at `+∞`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| {
            let start = if i == 0 { 0.0 } else { self.breakpoints[i - 1] };
            let end = self.breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
            (start, end, v)
        })
    }

    /// Index of the right-closed segment containing `x`.
    fn segment_index(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b < x)
    }

    pub fn density_at(&self, x: f64) -> Result<f64> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::domain("radius", format!("must be ≥ 0, got {x}")));
        }
        Ok(self.values[self.segment_index(x)])
    }

    /// Unthinned mean number of points within radius `x`: `∫₀ˣ 2πt·λ(t) dt`.
    pub fn radial_mass(&self, x: f64) -> f64 {
        let mut mass = 0.0;
        for (start, end, v) in self.segments() {
            if x <= start {
                break;
            }
            if v > 0.0 {
                let hi = end.min(x);
                mass += PI * v * (hi * hi - start * start);
            }
        }
        mass
    }

    /// Unthinned mean number of points in the whole plane (`+∞` unless the profile
    /// vanishes beyond its last breakpoint).
    pub fn total_mass(&self) -> f64 {
        if *self.values.last().unwrap() > 0.0 {
            f64::INFINITY
        } else {
            self.radial_mass(self.breakpoints.last().copied().unwrap_or(0.0))
        }
    }
}

/// Scaled `(radius, density)` pairs sorted by radius with coincident radii merged.
fn sorted_merged(mut tiers: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    // Sorting on both keys makes the result independent of tier order.
    tiers.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(tiers.len());
    for (r, lam) in tiers {
        match merged.last_mut() {
            Some(last) if (r - last.0).abs() <= MERGE_RTOL * r.max(last.0) => last.1 += lam,
            _ => merged.push((r, lam)),
        }
    }
    merged
}

/// Segment values `Σ_{l≥i} λ'_l`, zero beyond the last radius.
fn suffix_profile(tiers: Vec<(f64, f64)>, prefactor: f64) -> Result<PiecewiseDensity> {
    let merged = sorted_merged(tiers);
    let mut values = vec![0.0; merged.len() + 1];
    for i in (0..merged.len()).rev() {
        values[i] = values[i + 1] + merged[i].1;
    }
    PiecewiseDensity::new(
        merged.into_iter().map(|(r, _)| r).collect(),
        values,
        prefactor,
    )
}

/// Segment values `Σ_{l<i} λ'_l`, zero before the first radius.
fn prefix_profile(tiers: Vec<(f64, f64)>, prefactor: f64) -> Result<PiecewiseDensity> {
    let merged = sorted_merged(tiers);
    let mut values = vec![0.0; merged.len() + 1];
    for i in 0..merged.len() {
        values[i + 1] = values[i] + merged[i].1;
    }
    PiecewiseDensity::new(
        merged.into_iter().map(|(r, _)| r).collect(),
        values,
        prefactor,
    )
}

/// Per-tier images under the LOS map for alignment state `j`.
pub fn scaled_tiers_los(config: &NetworkConfig, j: usize) -> Result<Vec<ScaledTier>> {
    if !(1..=4).contains(&j) {
        return Err(Error::domain(
            "alignment state",
            format!("must be 1..=4, got {j}"),
        ));
    }
    config
        .tiers
        .iter()
        .enumerate()
        .map(|(k, tier)| {
            let gain = config.tier_levels(k)?.level(j);
            let scaled = scale_tier_los(
                tier,
                gain,
                config.channel.alpha_los,
                config.blockage.los_radius,
            )?;
            Ok(ScaledTier {
                source_tier: k,
                gain_state: GainState::Los(j),
                ..scaled
            })
        })
        .collect()
}

pub fn scaled_tiers_nlos(config: &NetworkConfig) -> Vec<ScaledTier> {
    config
        .tiers
        .iter()
        .enumerate()
        .map(|(k, tier)| ScaledTier {
            source_tier: k,
            ..scale_tier_nlos(tier, config.channel.alpha_nlos, config.blockage.los_radius)
        })
        .collect()
}

/// Scaled density of all tiers inside their scaled LOS circles, alignment state `j`.
/// Prefactor is the LOS fraction `C`.
pub fn build_los_profile(config: &NetworkConfig, j: usize) -> Result<PiecewiseDensity> {
    let tiers = scaled_tiers_los(config, j)?
        .into_iter()
        .map(|t| (t.scaled_radius, t.scaled_density))
        .collect();
    suffix_profile(tiers, config.blockage.los_fraction)
}

/// NLOS-scaled densities inside (prefactor `1−C`) and outside (prefactor `1`) the
/// scaled LOS circles. Both share the same breakpoints and sum to the total scaled
/// density everywhere.
pub fn build_nlos_profiles(config: &NetworkConfig) -> Result<(PiecewiseDensity, PiecewiseDensity)> {
    let tiers: Vec<(f64, f64)> = scaled_tiers_nlos(config)
        .into_iter()
        .map(|t| (t.scaled_radius, t.scaled_density))
        .collect();
    let inner = suffix_profile(tiers.clone(), 1.0 - config.blockage.los_fraction)?;
    let outer = prefix_profile(tiers, 1.0)?;
    Ok((inner, outer))
}

/// All normalized profiles of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedNetwork {
    /// LOS profiles for alignment states 1..=4.
    pub los: [PiecewiseDensity; 4],
    pub nlos_inner: PiecewiseDensity,
    pub nlos_outer: PiecewiseDensity,
}

impl NormalizedNetwork {
    pub fn new(config: &NetworkConfig) -> Result<Self> {
        let los = [
            build_los_profile(config, 1)?,
            build_los_profile(config, 2)?,
            build_los_profile(config, 3)?,
            build_los_profile(config, 4)?,
        ];
        let (nlos_inner, nlos_outer) = build_nlos_profiles(config)?;
        Ok(Self {
            los,
            nlos_inner,
            nlos_outer,
        })
    }

    /// LOS profile of alignment state `j` (1-based).
    pub fn los_profile(&self, j: usize) -> &PiecewiseDensity {
        &self.los[j - 1]
    }
}
