//! Physical-layer primitives: sectored antennas, directivity levels, the LOS-ball
//! blockage model, power-law path loss and the noise-limited SNR.
//!
//! Everything here is a plain value type or a pure function.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Converts a dB quantity to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// One network tier: every BS of the tier shares power, density and (optionally) beamwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierConfig {
    /// Transmit power in watts.
    pub power: f64,
    /// Base stations per square meter.
    pub density: f64,
    /// Per-tier BS main-lobe width in radians; `None` uses the network-wide BS pattern.
    pub beamwidth: Option<f64>,
}

impl TierConfig {
    pub fn new(power: f64, density: f64) -> Result<Self> {
        Self::with_beamwidth(power, density, None)
    }

    pub fn with_beamwidth(power: f64, density: f64, beamwidth: Option<f64>) -> Result<Self> {
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::domain(
                "tier power",
                format!("must be > 0, got {power}"),
            ));
        }
        if !(density > 0.0 && density.is_finite()) {
            return Err(Error::domain(
                "tier density",
                format!("must be > 0, got {density}"),
            ));
        }
        if let Some(w) = beamwidth {
            if !(w > 0.0 && w < TWO_PI) {
                return Err(Error::domain(
                    "tier beamwidth",
                    format!("must lie in (0, 2π) rad, got {w}"),
                ));
            }
        }
        Ok(Self {
            power,
            density,
            beamwidth,
        })
    }
}

/// Main-lobe gain of an ideal sector antenna that radiates the same total power as an
/// isotropic one: `ω·M + (2π−ω)·ε = 2π`. Returns `(M, m)` with `m = ε`.
pub fn main_lobe_gain(beamwidth: f64, sidelobe_level: f64) -> Result<(f64, f64)> {
    if !(beamwidth > 0.0 && beamwidth <= TWO_PI) {
        return Err(Error::domain(
            "beamwidth",
            format!("must lie in (0, 2π] rad, got {beamwidth}"),
        ));
    }
    if !(0.0..1.0).contains(&sidelobe_level) {
        return Err(Error::domain(
            "side-lobe level",
            format!("must lie in [0, 1), got {sidelobe_level}"),
        ));
    }
    let main = (TWO_PI - (TWO_PI - beamwidth) * sidelobe_level) / beamwidth;
    Ok((main, sidelobe_level))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AntennaMode {
    /// Main-lobe gain follows from beamwidth and side-lobe level by power conservation.
    Derived,
    /// Main and side-lobe gains are given directly and do not depend on beamwidth.
    Explicit,
}

/// Sectored antenna pattern: gain `M` inside `|θ| ≤ ω/2`, `m` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPattern {
    mode: AntennaMode,
    beamwidth: f64,
    main_gain: f64,
    side_gain: f64,
}

impl AntennaPattern {
    pub fn derived(beamwidth: f64, sidelobe_level: f64) -> Result<Self> {
        let (main_gain, side_gain) = main_lobe_gain(beamwidth, sidelobe_level)?;
        Self::checked(AntennaMode::Derived, beamwidth, main_gain, side_gain)
    }

    pub fn explicit(beamwidth: f64, main_gain: f64, side_gain: f64) -> Result<Self> {
        Self::checked(AntennaMode::Explicit, beamwidth, main_gain, side_gain)
    }

    fn checked(mode: AntennaMode, beamwidth: f64, main_gain: f64, side_gain: f64) -> Result<Self> {
        if !(beamwidth > 0.0 && beamwidth < TWO_PI) {
            return Err(Error::domain(
                "antenna beamwidth",
                format!("must lie in (0, 2π) rad, got {beamwidth}"),
            ));
        }
        if !(0.0..1.0).contains(&side_gain) || !(main_gain > 1.0 && main_gain.is_finite()) {
            return Err(Error::domain(
                "antenna gains",
                format!("need 0 ≤ m < 1 < M, got M={main_gain}, m={side_gain}"),
            ));
        }
        Ok(Self {
            mode,
            beamwidth,
            main_gain,
            side_gain,
        })
    }

    pub fn mode(&self) -> AntennaMode {
        self.mode
    }

    pub fn beamwidth(&self) -> f64 {
        self.beamwidth
    }

    pub fn main_gain(&self) -> f64 {
        self.main_gain
    }

    pub fn side_gain(&self) -> f64 {
        self.side_gain
    }

    /// Side-lobe level ε; in derived mode this is the generating parameter.
    pub fn sidelobe_level(&self) -> f64 {
        self.side_gain
    }

    /// Same antenna steered with a different main-lobe width. Derived patterns recompute
    /// `M` from the stored side-lobe level; explicit patterns keep their gains.
    pub fn with_beamwidth(&self, beamwidth: f64) -> Result<Self> {
        match self.mode {
            AntennaMode::Derived => Self::derived(beamwidth, self.side_gain),
            AntennaMode::Explicit => Self::explicit(beamwidth, self.main_gain, self.side_gain),
        }
    }
}

/// Total directivity gains `a_1..a_4` for (main,main), (main,side), (side,main), (side,side)
/// alignment of the serving BS and the UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectivityLevels(pub [f64; 4]);

impl DirectivityLevels {
    pub fn from_gains(bs_main: f64, bs_side: f64, ue_main: f64, ue_side: f64) -> Self {
        Self([
            bs_main * ue_main,
            bs_main * ue_side,
            bs_side * ue_main,
            bs_side * ue_side,
        ])
    }

    /// Gain of alignment state `j` (1-based).
    pub fn level(&self, j: usize) -> f64 {
        self.0[j - 1]
    }
}

pub fn directivity_levels(bs: &AntennaPattern, ue: &AntennaPattern) -> DirectivityLevels {
    DirectivityLevels::from_gains(bs.main_gain, bs.side_gain, ue.main_gain, ue.side_gain)
}

/// LOS-ball blockage: links no longer than `los_radius` are LOS with probability
/// `los_fraction`, longer links are always NLOS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockageModel {
    pub los_fraction: f64,
    pub los_radius: f64,
}

impl BlockageModel {
    pub fn new(los_fraction: f64, los_radius: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&los_fraction) {
            return Err(Error::domain(
                "los_fraction",
                format!("must lie in [0, 1], got {los_fraction}"),
            ));
        }
        if !(los_radius > 0.0 && los_radius.is_finite()) {
            return Err(Error::domain(
                "los_radius",
                format!("must be > 0, got {los_radius}"),
            ));
        }
        Ok(Self {
            los_fraction,
            los_radius,
        })
    }

    /// Dense-urban (Manhattan) fit: `C = 0.117`, `d = 200 m`.
    pub fn manhattan() -> Self {
        Self {
            los_fraction: 0.117,
            los_radius: 200.0,
        }
    }
}

/// Probability that a link of length `x` is LOS. The ball boundary is inclusive.
pub fn los_probability(x: f64, blockage: &BlockageModel) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::domain(
            "link length",
            format!("must be ≥ 0, got {x}"),
        ));
    }
    Ok(if x <= blockage.los_radius {
        blockage.los_fraction
    } else {
        0.0
    })
}

/// Power-law attenuation `x^{-α}`. A zero distance is reported as a singularity.
pub fn path_loss(x: f64, alpha: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::Singular("path loss at zero distance".into()));
    }
    if x < 0.0 || x.is_nan() {
        return Err(Error::domain(
            "link length",
            format!("must be > 0, got {x}"),
        ));
    }
    Ok(x.powf(-alpha))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    /// Rate `μ` of the exponential (Rayleigh power) fading; mean fade is `1/μ`.
    pub fading_rate: f64,
    /// Noise power `N`, linear.
    pub noise: f64,
}

impl ChannelModel {
    pub fn new(alpha_los: f64, alpha_nlos: f64, fading_rate: f64, noise: f64) -> Result<Self> {
        if !(alpha_los > 0.0 && alpha_nlos > 0.0) {
            return Err(Error::domain(
                "path-loss exponents",
                format!("must be > 0, got alpha_los={alpha_los}, alpha_nlos={alpha_nlos}"),
            ));
        }
        if alpha_los >= alpha_nlos {
            return Err(Error::domain(
                "path-loss exponents",
                format!("alpha_los must be < alpha_nlos, got {alpha_los} ≥ {alpha_nlos}"),
            ));
        }
        if !(fading_rate > 0.0 && fading_rate.is_finite()) {
            return Err(Error::domain(
                "fading_rate",
                format!("must be > 0, got {fading_rate}"),
            ));
        }
        if !(noise > 0.0 && noise.is_finite()) {
            return Err(Error::domain("noise", format!("must be > 0, got {noise}")));
        }
        Ok(Self {
            alpha_los,
            alpha_nlos,
            fading_rate,
            noise,
        })
    }

    /// Link SNR `p·h·a·x^{-α}/N` for a link of the given type.
    pub fn snr(&self, power: f64, fade: f64, gain: f64, x: f64, los: bool) -> Result<f64> {
        let alpha = if los { self.alpha_los } else { self.alpha_nlos };
        Ok(power * fade * gain * path_loss(x, alpha)? / self.noise)
    }
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            alpha_los: 2.0,
            alpha_nlos: 4.0,
            fading_rate: 1.0,
            noise: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub tiers: Vec<TierConfig>,
    pub bs_pattern: AntennaPattern,
    pub ue_pattern: AntennaPattern,
    pub blockage: BlockageModel,
    pub channel: ChannelModel,
    /// Standard deviation of the Gaussian beam-steering error, radians.
    pub steering_sigma: f64,
}

impl NetworkConfig {
    pub fn new(
        tiers: Vec<TierConfig>,
        bs_pattern: AntennaPattern,
        ue_pattern: AntennaPattern,
        blockage: BlockageModel,
        channel: ChannelModel,
        steering_sigma: f64,
    ) -> Result<Self> {
        if tiers.is_empty() {
            return Err(Error::domain("tiers", "at least one tier is required"));
        }
        if !(steering_sigma >= 0.0 && steering_sigma.is_finite()) {
            return Err(Error::domain(
                "steering_sigma",
                format!("must be ≥ 0, got {steering_sigma}"),
            ));
        }
        Ok(Self {
            tiers,
            bs_pattern,
            ue_pattern,
            blockage,
            channel,
            steering_sigma,
        })
    }

    /// BS pattern used by tier `k`, honouring a per-tier beamwidth override.
    pub fn tier_bs_pattern(&self, k: usize) -> Result<AntennaPattern> {
        match self.tiers[k].beamwidth {
            Some(w) => self.bs_pattern.with_beamwidth(w),
            None => Ok(self.bs_pattern),
        }
    }

    /// Directivity levels seen on links to BSs of tier `k`.
    pub fn tier_levels(&self, k: usize) -> Result<DirectivityLevels> {
        Ok(directivity_levels(
            &self.tier_bs_pattern(k)?,
            &self.ue_pattern,
        ))
    }

    /// Directivity levels of the network-wide patterns.
    pub fn levels(&self) -> DirectivityLevels {
        directivity_levels(&self.bs_pattern, &self.ue_pattern)
    }

    /// Both antennas steered to a common main-lobe width. Per-tier overrides are kept.
    pub fn with_beamwidth(&self, beamwidth: f64) -> Result<Self> {
        Ok(Self {
            bs_pattern: self.bs_pattern.with_beamwidth(beamwidth)?,
            ue_pattern: self.ue_pattern.with_beamwidth(beamwidth)?,
            ..self.clone()
        })
    }

    pub fn with_blockage(&self, blockage: BlockageModel) -> Self {
        Self {
            blockage,
            ..self.clone()
        }
    }

    pub fn with_steering_sigma(&self, steering_sigma: f64) -> Result<Self> {
        Self::new(
            self.tiers.clone(),
            self.bs_pattern,
            self.ue_pattern,
            self.blockage,
            self.channel,
            steering_sigma,
        )
    }

    /// Two-tier scenario used throughout the numerical examples: 1 W at 1/200 m⁻² and
    /// 5 W at 1/500 m⁻², 20° beams with 10 dB / −10 dB gains, 4° steering error,
    /// Manhattan blockage, α_L = 2, α_N = 4.
    pub fn two_tier_example() -> Self {
        let pattern = AntennaPattern::explicit(20f64.to_radians(), 10.0, 0.1)
            .expect("example pattern is valid");
        Self {
            tiers: vec![
                TierConfig {
                    power: 1.0,
                    density: 1.0 / 200.0,
                    beamwidth: None,
                },
                TierConfig {
                    power: 5.0,
                    density: 1.0 / 500.0,
                    beamwidth: None,
                },
            ],
            bs_pattern: pattern,
            ue_pattern: pattern,
            blockage: BlockageModel::manhattan(),
            channel: ChannelModel::default(),
            steering_sigma: 4f64.to_radians(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn main_lobe_gain_hand_values() {
        let (m_main, m_side) = main_lobe_gain(PI / 3.0, 0.1).unwrap();
        assert!((m_main - 5.5).abs() < 1e-12);
        assert_eq!(m_side, 0.1);

        let (iso, _) = main_lobe_gain(TWO_PI, 0.1).unwrap();
        assert!((iso - 1.0).abs() < 1e-15);

        let w = 20f64.to_radians();
        let (m20, _) = main_lobe_gain(w, 0.1).unwrap();
        assert!((m20 - 16.3).abs() < 1e-12, "{m20}");
        assert!((w * m20 + (TWO_PI - w) * 0.1 - TWO_PI).abs() < 1e-12);
    }

    #[test]
    fn main_lobe_gain_rejects_out_of_domain() {
        assert!(main_lobe_gain(0.0, 0.1).is_err());
        assert!(main_lobe_gain(7.0, 0.1).is_err());
        assert!(main_lobe_gain(1.0, 1.0).is_err());
        assert!(main_lobe_gain(1.0, -0.1).is_err());
    }

    #[test]
    fn levels_follow_state_order() {
        let p = AntennaPattern::explicit(0.3, 10.0, 0.1).unwrap();
        let DirectivityLevels(a) = directivity_levels(&p, &p);
        let expect = [100.0, 1.0, 1.0, 0.01];
        for (got, want) in a.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }

        let DirectivityLevels(a) = DirectivityLevels::from_gains(5.5, 0.1, 2.0, 0.2);
        let expect = [11.0, 1.1, 0.2, 0.02];
        for (got, want) in a.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }

        let DirectivityLevels(flat) = DirectivityLevels::from_gains(0.7, 0.7, 0.7, 0.7);
        assert!(flat.iter().all(|&v| v == flat[0]));
    }

    #[test]
    fn explicit_pattern_enforces_gain_ordering() {
        assert!(AntennaPattern::explicit(0.3, 1.0, 0.1).is_err());
        assert!(AntennaPattern::explicit(0.3, 10.0, 1.0).is_err());
        assert!(AntennaPattern::explicit(TWO_PI, 10.0, 0.1).is_err());
        assert!(AntennaPattern::derived(TWO_PI, 0.1).is_err());
    }

    #[test]
    fn los_ball_is_inclusive_step() {
        let b = BlockageModel::manhattan();
        assert_eq!(los_probability(100.0, &b).unwrap(), 0.117);
        assert_eq!(los_probability(300.0, &b).unwrap(), 0.0);
        let full = BlockageModel::new(1.0, 200.0).unwrap();
        assert_eq!(los_probability(200.0, &full).unwrap(), 1.0);
        assert!(los_probability(-1.0, &b).is_err());
    }

    #[test]
    fn path_loss_values_and_singularity() {
        assert_eq!(path_loss(1.0, 2.0).unwrap(), 1.0);
        assert!((path_loss(10.0, 2.0).unwrap() - 0.01).abs() < 1e-15);
        assert!((path_loss(10.0, 4.0).unwrap() - 1e-4).abs() < 1e-17);
        assert!(matches!(path_loss(0.0, 2.0), Err(Error::Singular(_))));
        assert!(path_loss(-3.0, 2.0).is_err());
    }

    #[test]
    fn channel_requires_los_exponent_below_nlos() {
        assert!(ChannelModel::new(4.0, 2.0, 1.0, 1.0).is_err());
        assert!(ChannelModel::new(2.0, 2.0, 1.0, 1.0).is_err());
        assert!(ChannelModel::new(2.0, 4.0, 0.0, 1.0).is_err());
        assert!(ChannelModel::new(2.0, 4.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn tier_override_recomputes_derived_gain() {
        let mut cfg = NetworkConfig::two_tier_example();
        cfg.bs_pattern = AntennaPattern::derived(20f64.to_radians(), 0.1).unwrap();
        cfg.ue_pattern = cfg.bs_pattern;
        cfg.tiers[1].beamwidth = Some(PI / 3.0);
        let a1 = cfg.tier_levels(1).unwrap().level(1);
        assert!((a1 - 5.5 * 16.3).abs() < 1e-9);
        assert_eq!(cfg.tier_levels(0).unwrap(), cfg.levels());
    }

    #[test]
    fn db_round_trip() {
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((db_to_linear(-10.0) - 0.1).abs() < 1e-15);
        assert!((linear_to_db(100.0) - 20.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn radiated_power_is_conserved(w in 1e-6f64..=TWO_PI, eps in 0.0f64..0.999) {
            let (main, side) = main_lobe_gain(w, eps).unwrap();
            prop_assert!((w * main + (TWO_PI - w) * side - TWO_PI).abs() <= 1e-12);
        }

        #[test]
        fn identical_patterns_order_levels(w in 0.01f64..6.2, eps in 0.0f64..0.99) {
            let p = AntennaPattern::derived(w, eps).unwrap();
            let DirectivityLevels(a) = directivity_levels(&p, &p);
            prop_assert!(a[0] >= a[1] && a[1] == a[2] && a[2] >= a[3]);
            prop_assert!(a[0] > a[3]);
        }

        #[test]
        fn los_probability_is_two_valued(x in 0.0f64..1e4, c in 0.0f64..=1.0) {
            let b = BlockageModel::new(c, 200.0).unwrap();
            let p = los_probability(x, &b).unwrap();
            prop_assert!(p == 0.0 || p == c);
        }

        #[test]
        fn path_loss_monotone(x in 1.0001f64..1e4, dx in 1e-3f64..10.0, a in 0.5f64..6.0, da in 1e-3f64..2.0) {
            prop_assert!(path_loss(x + dx, a).unwrap() < path_loss(x, a).unwrap());
            prop_assert!(path_loss(x, a + da).unwrap() < path_loss(x, a).unwrap());
        }
    }
}
