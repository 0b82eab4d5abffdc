//! Analytical coverage probability on the normalized network.
//!
//! Coverage splits into a LOS branch (one integral per alignment state, weighted by
//! the misalignment distribution) and two NLOS branches (inside and outside the
//! scaled LOS circles). Each branch integral is
//!
//! ```text
//!   ∫₀^∞ exp(−μ·T·N·x^α) · f(x) dx
//! ```
//!
//! where `f` is the nearest-point density of the branch's normalized profile.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{DirectivityLevels, NetworkConfig};
use crate::normalize::{NormalizedNetwork, PiecewiseDensity};
use crate::quadrature::{integrate_with_knots, QuadOptions};

/// Density exponent beyond which the outermost segment is cut off (`e^{-40}`).
const DENSITY_TAIL_EXPONENT: f64 = 40.0;
/// Fading exponent `μTN·x^α` beyond which the integrand is negligible.
const FADING_TAIL_EXPONENT: f64 = 50.0;

/// How the nearest-point density is built from a piecewise profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverageMode {
    /// Homogeneous nearest-distance formula with the local density substituted
    /// pointwise; the thinning weight is a plain prefactor.
    #[default]
    PaperLiteral,
    /// Nearest-point density of the thinned inhomogeneous PPP (void probability).
    Rigorous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alignment {
    #[default]
    WithErrors,
    Perfect,
}

impl fmt::Display for CoverageMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoverageMode::PaperLiteral => "paper-literal",
            CoverageMode::Rigorous => "rigorous",
        })
    }
}

impl FromStr for CoverageMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "paper-literal" => Ok(CoverageMode::PaperLiteral),
            "rigorous" => Ok(CoverageMode::Rigorous),
            other => Err(format!(
                "unknown mode `{other}` (expected paper-literal or rigorous)"
            )),
        }
    }
}

impl fmt::Display for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alignment::WithErrors => "with-errors",
            Alignment::Perfect => "perfect",
        })
    }
}

impl FromStr for Alignment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "with-errors" => Ok(Alignment::WithErrors),
            "perfect" => Ok(Alignment::Perfect),
            other => Err(format!(
                "unknown alignment `{other}` (expected with-errors or perfect)"
            )),
        }
    }
}

/// Probability that a half-normal pointing error stays inside `±beamwidth/2`.
pub fn alignment_probability(beamwidth: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        1.0
    } else {
        libm::erf(beamwidth / (2.0 * SQRT_2 * sigma))
    }
}

/// Distribution of the serving-link directivity gain over the four alignment states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentDistribution {
    pub levels: DirectivityLevels,
    pub weights: [f64; 4],
}

impl AlignmentDistribution {
    /// All mass on `a_1`.
    pub fn perfect(levels: DirectivityLevels) -> Self {
        Self {
            levels,
            weights: [1.0, 0.0, 0.0, 0.0],
        }
    }

    /// Independent BS and UE alignment with per-side probabilities.
    pub fn from_sides(bs_aligned: f64, ue_aligned: f64, levels: DirectivityLevels) -> Self {
        let (b, u) = (bs_aligned, ue_aligned);
        Self {
            levels,
            weights: [b * u, b * (1.0 - u), (1.0 - b) * u, (1.0 - b) * (1.0 - u)],
        }
    }

    /// Mean directivity gain.
    pub fn mean_gain(&self) -> f64 {
        self.weights
            .iter()
            .zip(self.levels.0)
            .map(|(w, a)| w * a)
            .sum()
    }
}

/// Misalignment distribution for a common BS/UE beamwidth.
pub fn alignment_distribution(
    beamwidth: f64,
    sigma: f64,
    levels: DirectivityLevels,
) -> AlignmentDistribution {
    let q = alignment_probability(beamwidth, sigma);
    AlignmentDistribution::from_sides(q, q, levels)
}

/// Alignment distribution of a network's serving link.
pub fn network_alignment(config: &NetworkConfig, alignment: Alignment) -> AlignmentDistribution {
    let levels = config.levels();
    match alignment {
        Alignment::Perfect => AlignmentDistribution::perfect(levels),
        Alignment::WithErrors => AlignmentDistribution::from_sides(
            alignment_probability(config.bs_pattern.beamwidth(), config.steering_sigma),
            alignment_probability(config.ue_pattern.beamwidth(), config.steering_sigma),
            levels,
        ),
    }
}

/// Density of the distance from the origin to the nearest point of the branch
/// process described by `profile`.
pub fn nearest_pdf(profile: &PiecewiseDensity, mode: CoverageMode, x: f64) -> Result<f64> {
    let lambda = profile.density_at(x)?;
    let pref = profile.prefactor();
    Ok(match mode {
        CoverageMode::PaperLiteral => pref * 2.0 * PI * x * lambda * (-PI * x * x * lambda).exp(),
        CoverageMode::Rigorous => {
            pref * 2.0 * PI * x * lambda * (-pref * profile.radial_mass(x)).exp()
        }
    })
}

/// Coverage contribution of one branch: `∫ exp(−snr_scale·x^α)·f(x) dx` with
/// `snr_scale = μ·T·N`.
///
/// Every segment is integrated separately and truncated once its integrand has decayed
/// by `e^{-50}` (fading) or `e^{-40}` (density) from its value at the segment start, so
/// each contribution keeps full relative accuracy however small it is.
pub fn branch_coverage(
    profile: &PiecewiseDensity,
    mode: CoverageMode,
    alpha: f64,
    snr_scale: f64,
    opts: &QuadOptions,
) -> Result<f64> {
    if !(snr_scale >= 0.0) {
        return Err(Error::domain(
            "threshold",
            format!("μ·T·N must be ≥ 0, got {snr_scale}"),
        ));
    }
    let pref = profile.prefactor();
    if pref == 0.0 {
        return Ok(0.0);
    }
    let fading_scale = if snr_scale > 0.0 {
        snr_scale.powf(-1.0 / alpha)
    } else {
        f64::INFINITY
    };

    let mut total = 0.0;
    for (start, end, lambda) in profile.segments() {
        if lambda == 0.0 {
            continue;
        }
        let effective = match mode {
            CoverageMode::PaperLiteral => lambda,
            CoverageMode::Rigorous => pref * lambda,
        };
        // Integrate in u = x − start so that the density decay, which can be steep
        // far from the origin, is resolved exactly.
        let k_density = DENSITY_TAIL_EXPONENT / (PI * effective);
        let density_cut = k_density / (start + (start * start + k_density).sqrt());
        let fading_cut = if snr_scale > 0.0 {
            ((FADING_TAIL_EXPONENT + snr_scale * start.powf(alpha)) / snr_scale).powf(1.0 / alpha)
                - start
        } else {
            f64::INFINITY
        };
        let width = (end - start).min(density_cut).min(fading_cut);
        if !(width > 0.0) {
            continue;
        }

        let base_mass = profile.radial_mass(start);
        let integrand = |u: f64| {
            let x = start + u;
            let density_exp = match mode {
                CoverageMode::PaperLiteral => PI * x * x * lambda,
                CoverageMode::Rigorous => pref * (base_mass + PI * lambda * u * (2.0 * start + u)),
            };
            let fading = if snr_scale > 0.0 {
                snr_scale * x.powf(alpha)
            } else {
                0.0
            };
            pref * 2.0 * PI * x * lambda * (-(density_exp + fading)).exp()
        };

        // Seed the partition geometrically around the peak of the integrand and, for
        // segments starting away from the origin, around the local decay length.
        let scale = fading_scale.min(1.0 / (PI * effective).sqrt());
        let decay = if start > 0.0 {
            let slope = 2.0 * PI * effective * start
                + if snr_scale > 0.0 {
                    alpha * snr_scale * start.powf(alpha - 1.0)
                } else {
                    0.0
                };
            1.0 / slope
        } else {
            f64::INFINITY
        };
        let mut knots = vec![0.0, width];
        for k in -4..=8 {
            for u in [scale * 2f64.powi(k) - start, decay * 2f64.powi(k)] {
                if u > 0.0 && u < width {
                    knots.push(u);
                }
            }
        }
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        total += integrate_with_knots(integrand, &knots, opts)?.value;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy)]
pub struct CoverageQuery<'a> {
    /// SNR threshold `T`, linear.
    pub threshold: f64,
    pub config: &'a NetworkConfig,
    pub mode: CoverageMode,
    pub alignment: Alignment,
}

impl<'a> CoverageQuery<'a> {
    pub fn new(
        config: &'a NetworkConfig,
        threshold: f64,
        mode: CoverageMode,
        alignment: Alignment,
    ) -> Self {
        Self {
            threshold,
            config,
            mode,
            alignment,
        }
    }

    fn snr_scale(&self) -> Result<f64> {
        if !(self.threshold >= 0.0 && self.threshold.is_finite()) {
            return Err(Error::domain(
                "threshold",
                format!("must be finite and ≥ 0, got {}", self.threshold),
            ));
        }
        let ch = &self.config.channel;
        Ok(ch.fading_rate * self.threshold * ch.noise)
    }
}

/// Computation that produced a coverage value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic(CoverageMode, Alignment),
    BranchMirror(Alignment),
    Physical,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Analytic(mode, al) => write!(f, "{mode}/{al}"),
            Method::BranchMirror(al) => write!(f, "mc-branch-mirror/{al}"),
            Method::Physical => f.write_str("mc-physical"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageResult {
    pub p_los: f64,
    pub p_nlos_inner: f64,
    pub p_nlos_outer: f64,
    pub p_cov: f64,
    pub method: Method,
    pub ci_halfwidth: Option<f64>,
}

impl CoverageResult {
    pub fn from_branches(p_los: f64, p_nlos_inner: f64, p_nlos_outer: f64, method: Method) -> Self {
        Self {
            p_los,
            p_nlos_inner,
            p_nlos_outer,
            p_cov: p_los + p_nlos_inner + p_nlos_outer,
            method,
            ci_halfwidth: None,
        }
    }
}

fn los_with(
    query: &CoverageQuery<'_>,
    network: &NormalizedNetwork,
    opts: &QuadOptions,
) -> Result<f64> {
    let c = query.snr_scale()?;
    let dist = network_alignment(query.config, query.alignment);
    let alpha = query.config.channel.alpha_los;
    let mut total = 0.0;
    for (j, &w) in dist.weights.iter().enumerate() {
        if w > 0.0 {
            total += w * branch_coverage(network.los_profile(j + 1), query.mode, alpha, c, opts)?;
        }
    }
    Ok(total)
}

fn nlos_with(
    query: &CoverageQuery<'_>,
    network: &NormalizedNetwork,
    opts: &QuadOptions,
) -> Result<(f64, f64)> {
    let c = query.snr_scale()?;
    let alpha = query.config.channel.alpha_nlos;
    Ok((
        branch_coverage(&network.nlos_inner, query.mode, alpha, c, opts)?,
        branch_coverage(&network.nlos_outer, query.mode, alpha, c, opts)?,
    ))
}

/// Probability of LOS coverage, summed over alignment states.
pub fn coverage_los(query: &CoverageQuery<'_>) -> Result<f64> {
    let network = NormalizedNetwork::new(query.config)?;
    los_with(query, &network, &QuadOptions::default())
}

/// NLOS coverage inside and outside the scaled LOS circles. Directivity gains do not
/// enter NLOS links.
pub fn coverage_nlos(query: &CoverageQuery<'_>) -> Result<(f64, f64)> {
    let network = NormalizedNetwork::new(query.config)?;
    nlos_with(query, &network, &QuadOptions::default())
}

/// Branch-decomposed coverage. The branch sum is reported as is and may exceed one
/// in paper-literal mode at low thresholds.
pub fn coverage(query: &CoverageQuery<'_>) -> Result<CoverageResult> {
    coverage_with(query, &QuadOptions::default())
}

pub fn coverage_with(query: &CoverageQuery<'_>, opts: &QuadOptions) -> Result<CoverageResult> {
    let network = NormalizedNetwork::new(query.config)?;
    let p_los = los_with(query, &network, opts)?;
    let (inner, outer) = nlos_with(query, &network, opts)?;
    Ok(CoverageResult::from_branches(
        p_los,
        inner,
        outer,
        Method::Analytic(query.mode, query.alignment),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::BlockageModel;
    use crate::normalize::build_nlos_profiles;

    /// Maclaurin series for erf, independent of the library implementation.
    fn erf_series(x: f64) -> f64 {
        let mut sum = 0.0f64;
        let mut term = x;
        let mut n = 0u32;
        while term.abs() > 1e-18 * sum.abs().max(1e-300) || n < 5 {
            sum += term / (2 * n + 1) as f64;
            n += 1;
            term *= -x * x / n as f64;
        }
        2.0 / PI.sqrt() * sum
    }

    #[test]
    fn alignment_weights_match_series_oracle() {
        let w = 20f64.to_radians();
        let s = 4f64.to_radians();
        let q_oracle = erf_series(w / (2.0 * SQRT_2 * s));
        assert!(
            (q_oracle - 0.987_580_669_348_447_7_f64).abs() < 1e-14,
            "{q_oracle}"
        );
        let dist = alignment_distribution(w, s, DirectivityLevels([100.0, 1.0, 1.0, 0.01]));
        let want = [
            q_oracle * q_oracle,
            q_oracle * (1.0 - q_oracle),
            (1.0 - q_oracle) * q_oracle,
            (1.0 - q_oracle) * (1.0 - q_oracle),
        ];
        for (got, want) in dist.weights.iter().zip(want) {
            assert!((got - want).abs() < 1e-12);
        }
        // 30-digit reference values.
        let frozen = [
            0.975_315_578_470_728,
            0.012_265_090_877_719_68,
            0.012_265_090_877_719_68,
            1.542_397_738_325_857e-4,
        ];
        for (got, want) in dist.weights.iter().zip(frozen) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!((dist.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn alignment_limits() {
        let lv = DirectivityLevels([4.0, 2.0, 2.0, 1.0]);
        assert_eq!(
            alignment_distribution(0.3, 0.0, lv).weights,
            [1.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            alignment_distribution(0.0, 0.1, lv).weights,
            [0.0, 0.0, 0.0, 1.0]
        );
    }

    #[test]
    fn weights_shift_toward_misalignment_with_sigma() {
        let lv = DirectivityLevels([4.0, 2.0, 2.0, 1.0]);
        let w = 0.35;
        let mut prev = alignment_distribution(w, 0.05, lv).weights;
        for k in 2..40 {
            let cur = alignment_distribution(w, 0.05 + 0.01 * k as f64, lv).weights;
            assert!(cur[0] < prev[0] && cur[3] > prev[3]);
            assert!((cur.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prev = cur;
        }
    }

    #[test]
    fn nearest_pdf_hand_values() {
        let cfg = NetworkConfig::two_tier_example();
        let (inner, _) = build_nlos_profiles(&cfg).unwrap();
        let lam = 5e-3 + 5f64.sqrt() / 500.0;
        let lit = nearest_pdf(&inner, CoverageMode::PaperLiteral, 10.0).unwrap();
        let want = 0.883 * 2.0 * PI * 10.0 * lam * (-PI * 100.0 * lam).exp();
        assert!((lit - want).abs() < 1e-15);
        assert!((lit - 0.0268).abs() < 1e-4);

        let rig = nearest_pdf(&inner, CoverageMode::Rigorous, 10.0).unwrap();
        let want = 0.883 * 2.0 * PI * 10.0 * lam * (-0.883 * PI * 100.0 * lam).exp();
        assert!((rig - want).abs() < 1e-15);
        assert!((rig - 0.0380).abs() < 1e-4);

        let los = crate::normalize::build_los_profile(&cfg, 1).unwrap();
        for mode in [CoverageMode::PaperLiteral, CoverageMode::Rigorous] {
            assert_eq!(nearest_pdf(&los, mode, 25.0).unwrap(), 0.0);
            assert!(nearest_pdf(&los, mode, -1.0).is_err());
        }
    }

    #[test]
    fn single_segment_closed_form() {
        let profile = PiecewiseDensity::new(vec![100.0], vec![1.0 / PI, 0.0], 1.0).unwrap();
        let opts = QuadOptions::default();
        for mode in [CoverageMode::PaperLiteral, CoverageMode::Rigorous] {
            let v = branch_coverage(&profile, mode, 2.0, 1.0, &opts).unwrap();
            let want = 0.5 * (1.0 - (-2e4f64).exp());
            assert!((v - want).abs() < 1e-12, "{mode}: {v}");
        }
    }

    #[test]
    fn vanishing_threshold_gives_branch_mass() {
        let profile = PiecewiseDensity::new(vec![200.0], vec![1.0 / 200.0, 0.0], 0.117).unwrap();
        let v = branch_coverage(
            &profile,
            CoverageMode::PaperLiteral,
            2.0,
            1e-14,
            &QuadOptions::default(),
        )
        .unwrap();
        let mass = 0.117 * (1.0 - (-PI * 200.0f64).exp());
        assert!((v - mass).abs() < 1e-9);
        assert!((v - 0.117).abs() < 1e-9);
    }

    #[test]
    fn zero_los_fraction_kills_los_branch() {
        let cfg = NetworkConfig::two_tier_example()
            .with_blockage(BlockageModel::new(0.0, 200.0).unwrap());
        for mode in [CoverageMode::PaperLiteral, CoverageMode::Rigorous] {
            let q = CoverageQuery::new(&cfg, 1.0, mode, Alignment::WithErrors);
            assert_eq!(coverage_los(&q).unwrap(), 0.0);
        }
        let full = NetworkConfig::two_tier_example()
            .with_blockage(BlockageModel::new(1.0, 200.0).unwrap());
        let q = CoverageQuery::new(
            &full,
            1.0,
            CoverageMode::PaperLiteral,
            Alignment::WithErrors,
        );
        assert_eq!(coverage_nlos(&q).unwrap().0, 0.0);
    }

    #[test]
    fn empty_profiles_give_zero() {
        let profile = PiecewiseDensity::new(vec![50.0], vec![0.0, 0.0], 1.0).unwrap();
        for mode in [CoverageMode::PaperLiteral, CoverageMode::Rigorous] {
            assert_eq!(
                branch_coverage(&profile, mode, 4.0, 1.0, &QuadOptions::default()).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn huge_threshold_means_no_coverage() {
        let cfg = NetworkConfig::two_tier_example();
        for mode in [CoverageMode::PaperLiteral, CoverageMode::Rigorous] {
            let r = coverage(&CoverageQuery::new(&cfg, 1e12, mode, Alignment::WithErrors)).unwrap();
            assert!(r.p_cov <= 1e-6, "{r:?}");
            assert_eq!(r.p_cov, r.p_los + r.p_nlos_inner + r.p_nlos_outer);
        }
    }

    #[test]
    fn far_segments_keep_relative_accuracy() {
        // Outer ring whose whole contribution sits deep in the fading tail.
        let (a, lam, c) = (
            283.795_676_699_564_6,
            0.034_436_848_105_956_91,
            4.015_005_757_796_073e-3,
        );
        let p = PiecewiseDensity::new(vec![a], vec![0.0, lam], 1.0).unwrap();
        let exact = PI * lam / (PI * lam + c) * (-c * a * a).exp();
        let got =
            branch_coverage(&p, CoverageMode::Rigorous, 2.0, c, &QuadOptions::default()).unwrap();
        assert!(
            ((got - exact) / exact).abs() < 1e-10,
            "{got:e} vs {exact:e}"
        );

        // Dense ring far out: steep decay of the rigorous void probability.
        let (a, lam, c) = (2_553.422_055_096, 7.341_149_919_254_431, 1.2e-9);
        let p = PiecewiseDensity::new(vec![a], vec![0.0, lam], 0.5).unwrap();
        let rate = 0.5 * PI * lam + c;
        let exact = 0.5 * PI * lam / rate * (-c * a * a).exp();
        let got =
            branch_coverage(&p, CoverageMode::Rigorous, 2.0, c, &QuadOptions::default()).unwrap();
        assert!(
            ((got - exact) / exact).abs() < 1e-10,
            "{got:e} vs {exact:e}"
        );
    }

    fn arb_profile() -> impl proptest::strategy::Strategy<Value = PiecewiseDensity> {
        use proptest::prelude::*;
        (
            proptest::collection::vec(1.0f64..400.0, 0..5),
            0.05f64..=1.0,
        )
            .prop_flat_map(|(mut bps, pref)| {
                bps.sort_by(f64::total_cmp);
                bps.dedup_by(|a, b| *a - *b < 1e-3);
                let n = bps.len() + 1;
                (
                    Just(bps),
                    proptest::collection::vec(prop_oneof![Just(0.0), 1e-5f64..0.05], n),
                    Just(pref),
                )
            })
            .prop_map(|(bps, vals, pref)| PiecewiseDensity::new(bps, vals, pref).unwrap())
    }

    proptest::proptest! {
        #[test]
        fn rigorous_pdf_integrates_to_one_minus_void(profile in arb_profile()) {
            let mut finite = profile.values().to_vec();
            *finite.last_mut().unwrap() = 0.0;
            let p = PiecewiseDensity::new(profile.breakpoints().to_vec(), finite, profile.prefactor()).unwrap();
            let got = branch_coverage(&p, CoverageMode::Rigorous, 4.0, 0.0, &QuadOptions::default()).unwrap();
            let want = -(-p.prefactor() * p.total_mass()).exp_m1();
            proptest::prop_assert!((got - want).abs() <= 1e-9 * want.max(1e-300), "{} vs {}", got, want);
        }

        #[test]
        fn branches_non_increasing_in_threshold(t_db in -20.0f64..40.0, step in 0.1f64..10.0, c in 0.0f64..=1.0) {
            let cfg = NetworkConfig::two_tier_example().with_blockage(BlockageModel::new(c, 200.0).unwrap());
            for mode in [CoverageMode::PaperLiteral, CoverageMode::Rigorous] {
                let at = |db: f64| coverage(&CoverageQuery::new(&cfg, 10f64.powf(db / 10.0), mode, Alignment::WithErrors)).unwrap();
                let (lo, hi) = (at(t_db), at(t_db + step));
                proptest::prop_assert!(hi.p_los <= lo.p_los * (1.0 + 1e-12));
                proptest::prop_assert!(hi.p_nlos_inner <= lo.p_nlos_inner * (1.0 + 1e-12));
                proptest::prop_assert!(hi.p_nlos_outer <= lo.p_nlos_outer * (1.0 + 1e-12) + 1e-300);
            }
        }

        #[test]
        fn paper_literal_is_monotone_in_los_fraction(t_db in -10.0f64..30.0, c1 in 0.0f64..=1.0, c2 in 0.0f64..=1.0) {
            let (lo, hi) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };
            let at = |c: f64| {
                let cfg = NetworkConfig::two_tier_example().with_blockage(BlockageModel::new(c, 200.0).unwrap());
                coverage(&CoverageQuery::new(&cfg, 10f64.powf(t_db / 10.0), CoverageMode::PaperLiteral, Alignment::WithErrors)).unwrap()
            };
            let (a, b) = (at(lo), at(hi));
            proptest::prop_assert!(b.p_los >= a.p_los * (1.0 - 1e-12));
            proptest::prop_assert!(b.p_nlos_inner <= a.p_nlos_inner * (1.0 + 1e-12));
        }
    }

    #[test]
    fn rejects_negative_threshold() {
        let cfg = NetworkConfig::two_tier_example();
        let q = CoverageQuery::new(&cfg, -1.0, CoverageMode::PaperLiteral, Alignment::Perfect);
        assert!(coverage(&q).is_err());
    }

    #[test]
    fn mode_and_alignment_parse() {
        assert_eq!(
            "rigorous".parse::<CoverageMode>().unwrap(),
            CoverageMode::Rigorous
        );
        assert_eq!("perfect".parse::<Alignment>().unwrap(), Alignment::Perfect);
        assert!("sloppy".parse::<CoverageMode>().is_err());
        assert_eq!(
            Method::Analytic(CoverageMode::PaperLiteral, Alignment::WithErrors).to_string(),
            "paper-literal/with-errors"
        );
    }
}
