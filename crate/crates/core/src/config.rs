//! Run configuration: a TOML document in user units (dB, degrees, watts, meters,
//! per-m²) that is validated into model types.
//!
//! ```toml
//! [[tier]]
//! power_w = 1.0
//! density_per_m2 = "1/200"
//!
//! [[tier]]
//! power_w = 5.0
//! density_per_m2 = "1/500"
//!
//! [bs_antenna]
//! mode = "derived"
//! beamwidth_deg = 20.0
//! sidelobe_db = -10.0
//! ```
//!
//! Omitted sections fall back to: Manhattan blockage (C = 0.117, d = 200 m),
//! α_L = 2, α_N = 4, μ = 1, noise 0 dB (N = 1, so thresholds are `T·N`), 4° steering
//! error with alignment errors enabled, paper-literal coverage mode, and 20° explicit
//! antennas with 10 dB / −10 dB gains.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::coverage::{Alignment, CoverageMode};
use crate::error::{Error, Result};
use crate::mcsim::{SimConfig, SimKind, WindowRadius};
use crate::netmodel::{
    db_to_linear, AntennaPattern, BlockageModel, ChannelModel, NetworkConfig, TierConfig,
};
use crate::sweep::{SweepAxis, SweepSpec};

/// A density given as a number or as a `"a/b"` / decimal string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DensityValue {
    Number(f64),
    Text(String),
}

impl DensityValue {
    pub fn value(&self) -> std::result::Result<f64, String> {
        match self {
            DensityValue::Number(v) => Ok(*v),
            DensityValue::Text(s) => parse_rational(s),
        }
    }
}

fn parse_rational(s: &str) -> std::result::Result<f64, String> {
    let bad = || format!("`{s}` is neither a number nor a ratio like \"1/200\"");
    match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0.0 {
                return Err(format!("`{s}` divides by zero"));
            }
            Ok(num / den)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TierDoc {
    pub power_w: f64,
    pub density_per_m2: DensityValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beamwidth_deg: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AntennaModeDoc {
    Explicit,
    Derived,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntennaDoc {
    pub mode: AntennaModeDoc,
    pub beamwidth_deg: f64,
    /// Explicit mode only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub main_gain_db: Option<f64>,
    /// Explicit mode only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_gain_db: Option<f64>,
    /// Derived mode only: side-lobe level ε in dB.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sidelobe_db: Option<f64>,
}

impl Default for AntennaDoc {
    fn default() -> Self {
        Self {
            mode: AntennaModeDoc::Explicit,
            beamwidth_deg: 20.0,
            main_gain_db: Some(10.0),
            side_gain_db: Some(-10.0),
            sidelobe_db: None,
        }
    }
}

impl AntennaDoc {
    fn pattern(&self, field: &str) -> Result<AntennaPattern> {
        let w = self.beamwidth_deg.to_radians();
        let wrap = |e: Error| Error::config(field, e.to_string());
        match self.mode {
            AntennaModeDoc::Explicit => {
                if self.sidelobe_db.is_some() {
                    return Err(Error::config(
                        format!("{field}.sidelobe_db"),
                        "only valid in derived mode; use side_gain_db",
                    ));
                }
                let main = self.main_gain_db.ok_or_else(|| {
                    Error::config(format!("{field}.main_gain_db"), "required in explicit mode")
                })?;
                let side = self.side_gain_db.ok_or_else(|| {
                    Error::config(format!("{field}.side_gain_db"), "required in explicit mode")
                })?;
                AntennaPattern::explicit(w, db_to_linear(main), db_to_linear(side)).map_err(wrap)
            }
            AntennaModeDoc::Derived => {
                if self.main_gain_db.is_some() || self.side_gain_db.is_some() {
                    return Err(Error::config(
                        field,
                        "main_gain_db/side_gain_db are fixed by beamwidth and sidelobe_db in derived mode",
                    ));
                }
                let eps = self.sidelobe_db.ok_or_else(|| {
                    Error::config(format!("{field}.sidelobe_db"), "required in derived mode")
                })?;
                AntennaPattern::derived(w, db_to_linear(eps)).map_err(wrap)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BlockageDoc {
    pub los_fraction: f64,
    pub los_radius_m: f64,
}

impl Default for BlockageDoc {
    fn default() -> Self {
        Self {
            los_fraction: 0.117,
            los_radius_m: 200.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelDoc {
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    pub fading_rate: f64,
    pub noise_db: f64,
}

impl Default for ChannelDoc {
    fn default() -> Self {
        Self {
            alpha_los: 2.0,
            alpha_nlos: 4.0,
            fading_rate: 1.0,
            noise_db: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlignmentDoc {
    pub mode: Alignment,
    pub steering_sigma_deg: f64,
}

impl Default for AlignmentDoc {
    fn default() -> Self {
        Self {
            mode: Alignment::WithErrors,
            steering_sigma_deg: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisDoc {
    pub mode: CoverageMode,
    pub thresholds_db: Vec<f64>,
}

impl Default for AnalysisDoc {
    fn default() -> Self {
        Self {
            mode: CoverageMode::PaperLiteral,
            thresholds_db: (-2..=6).map(|k| 5.0 * k as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationDoc {
    pub kind: SimKind,
    pub trials: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_radius_m: Option<f64>,
}

impl Default for SimulationDoc {
    fn default() -> Self {
        Self {
            kind: SimKind::BranchMirror,
            trials: 100_000,
            seed: 1,
            window_radius_m: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepDoc {
    /// Fixed threshold for beamwidth and LOS-fraction sweeps.
    pub threshold_db: f64,
    pub beamwidths_deg: Vec<f64>,
    pub beamwidth_range_deg: [f64; 2],
}

impl Default for SweepDoc {
    fn default() -> Self {
        Self {
            threshold_db: 10.0,
            beamwidths_deg: (1..=12).map(|k| 5.0 * k as f64).collect(),
            beamwidth_range_deg: [5.0, 60.0],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// The configuration file as written by the user, with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    #[serde(rename = "tier", default)]
    pub tiers: Vec<TierDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bs_antenna: Option<AntennaDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ue_antenna: Option<AntennaDoc>,
    #[serde(default)]
    pub blockage: BlockageDoc,
    #[serde(default)]
    pub channel: ChannelDoc,
    #[serde(default)]
    pub alignment: AlignmentDoc,
    #[serde(default)]
    pub analysis: AnalysisDoc,
    #[serde(default)]
    pub simulation: SimulationDoc,
    #[serde(default)]
    pub sweep: SweepDoc,
    #[serde(default)]
    pub output: OutputDoc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSettings {
    pub mode: CoverageMode,
    pub alignment: Alignment,
    pub thresholds_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub threshold_db: f64,
    pub beamwidths_deg: Vec<f64>,
    pub beamwidth_range_deg: (f64, f64),
}

/// Validated configuration of one CLI run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub document: ConfigDocument,
    pub network: NetworkConfig,
    pub analysis: AnalysisSettings,
    pub simulation: SimConfig,
    pub sweep: SweepSettings,
    pub output: Option<PathBuf>,
}

fn check_increasing(field: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::config(field, "must not be empty"));
    }
    if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config(
            field,
            "values must be finite and strictly increasing",
        ));
    }
    Ok(())
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let document: ConfigDocument = toml::from_str(text).map_err(|e| {
        let mut msg = e.to_string();
        msg.retain(|c| c != '\n');
        Error::ConfigSyntax(msg)
    })?;
    RunConfig::from_document(document)
}

impl RunConfig {
    pub fn from_document(document: ConfigDocument) -> Result<Self> {
        let doc = &document;
        if doc.tiers.is_empty() {
            return Err(Error::config("tier", "at least one [[tier]] is required"));
        }
        let tiers = doc
            .tiers
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let field = format!("tier[{k}]");
                let density = t
                    .density_per_m2
                    .value()
                    .map_err(|e| Error::config(format!("{field}.density_per_m2"), e))?;
                TierConfig::with_beamwidth(t.power_w, density, t.beamwidth_deg.map(f64::to_radians))
                    .map_err(|e| Error::config(&field, e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;

        let (bs_doc, ue_doc) = match (&doc.bs_antenna, &doc.ue_antenna) {
            (Some(b), Some(u)) => (b.clone(), u.clone()),
            (Some(b), None) => (b.clone(), b.clone()),
            (None, Some(u)) => (u.clone(), u.clone()),
            (None, None) => (AntennaDoc::default(), AntennaDoc::default()),
        };
        let bs_pattern = bs_doc.pattern("bs_antenna")?;
        let ue_pattern = ue_doc.pattern("ue_antenna")?;

        let blockage = BlockageModel::new(doc.blockage.los_fraction, doc.blockage.los_radius_m)
            .map_err(|e| Error::config("blockage", e.to_string()))?;
        let ch = &doc.channel;
        let channel = ChannelModel::new(
            ch.alpha_los,
            ch.alpha_nlos,
            ch.fading_rate,
            db_to_linear(ch.noise_db),
        )
        .map_err(|e| Error::config("channel", e.to_string()))?;
        let sigma = doc.alignment.steering_sigma_deg;
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::config(
                "alignment.steering_sigma_deg",
                format!("must be ≥ 0, got {sigma}"),
            ));
        }
        let network = NetworkConfig::new(
            tiers,
            bs_pattern,
            ue_pattern,
            blockage,
            channel,
            sigma.to_radians(),
        )
        .map_err(|e| Error::config("network", e.to_string()))?;

        check_increasing("analysis.thresholds_db", &doc.analysis.thresholds_db)?;
        check_increasing("sweep.beamwidths_deg", &doc.sweep.beamwidths_deg)?;
        if let Some(bad) = doc
            .sweep
            .beamwidths_deg
            .iter()
            .find(|w| !(**w > 0.0 && **w < 360.0))
        {
            return Err(Error::config(
                "sweep.beamwidths_deg",
                format!("{bad}° is outside (0°, 360°)"),
            ));
        }
        let [lo, hi] = doc.sweep.beamwidth_range_deg;
        if !(lo > 0.0 && hi >= lo && hi < 360.0) {
            return Err(Error::config(
                "sweep.beamwidth_range_deg",
                format!("need 0 < lo ≤ hi < 360, got [{lo}, {hi}]"),
            ));
        }
        if !doc.sweep.threshold_db.is_finite() {
            return Err(Error::config("sweep.threshold_db", "must be finite"));
        }

        let sim = &doc.simulation;
        if sim.trials == 0 {
            return Err(Error::config("simulation.trials", "must be ≥ 1"));
        }
        let window = match sim.window_radius_m {
            None => WindowRadius::Auto,
            Some(r) if r > 0.0 && r.is_finite() => WindowRadius::Fixed(r),
            Some(r) => {
                return Err(Error::config(
                    "simulation.window_radius_m",
                    format!("must be > 0, got {r}"),
                ))
            }
        };
        let simulation = SimConfig {
            network: network.clone(),
            trials: sim.trials,
            seed: sim.seed,
            window,
            kind: sim.kind,
            alignment: doc.alignment.mode,
            threads: None,
        };

        Ok(Self {
            network,
            analysis: AnalysisSettings {
                mode: doc.analysis.mode,
                alignment: doc.alignment.mode,
                thresholds_db: doc.analysis.thresholds_db.clone(),
            },
            simulation,
            sweep: SweepSettings {
                threshold_db: doc.sweep.threshold_db,
                beamwidths_deg: doc.sweep.beamwidths_deg.clone(),
                beamwidth_range_deg: (lo, hi),
            },
            output: doc.output.path.clone(),
            document,
        })
    }

    /// The built-in two-tier example scenario.
    pub fn example() -> Self {
        parse_config(EXAMPLE_CONFIG).expect("built-in example is valid")
    }

    /// Normalized TOML form of the configuration (defaults written out).
    pub fn to_toml(&self) -> String {
        toml::to_string(&self.document).expect("config document is serializable")
    }

    /// Sweep specification along `axis` with the given modes.
    pub fn sweep_spec(&self, axis: SweepAxis, modes: Vec<(CoverageMode, Alignment)>) -> SweepSpec {
        let grid = match axis {
            SweepAxis::ThresholdDb => self.analysis.thresholds_db.clone(),
            SweepAxis::BeamwidthDeg => self.sweep.beamwidths_deg.clone(),
            SweepAxis::LosFraction => vec![0.0, self.network.blockage.los_fraction, 1.0],
        };
        SweepSpec {
            base: self.network.clone(),
            axis,
            grid,
            threshold_db: self.sweep.threshold_db,
            modes,
        }
    }
}

/// Two tiers (1 W at 1/200 m⁻², 5 W at 1/500 m⁻²) with every other section defaulted.
pub const EXAMPLE_CONFIG: &str = r#"[[tier]]
power_w = 1.0
density_per_m2 = "1/200"

[[tier]]
power_w = 5.0
density_per_m2 = "1/500"
"#;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_echoes_two_tier_parameters() {
        let rc = RunConfig::example();
        assert_eq!(rc.network, NetworkConfig::two_tier_example());
        assert_eq!(rc.analysis.mode, CoverageMode::PaperLiteral);
        assert_eq!(rc.analysis.alignment, Alignment::WithErrors);
        assert_eq!(rc.network.channel, ChannelModel::default());
        assert_eq!(rc.network.blockage, BlockageModel::manhattan());
    }

    #[test]
    fn rejects_swapped_exponents() {
        let text = format!("{EXAMPLE_CONFIG}\n[channel]\nalpha_los = 4.0\nalpha_nlos = 2.0\n");
        let err = parse_config(&text).unwrap_err();
        assert!(
            err.to_string().contains("alpha_los must be < alpha_nlos"),
            "{err}"
        );
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn rejects_unknown_keys_with_location() {
        let text = format!("{EXAMPLE_CONFIG}fooo = 1\n");
        let err = parse_config(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("fooo"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
        assert!(!msg.contains('\n'));
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = parse_config("[[tier]\npower_w = 1").unwrap_err();
        assert!(matches!(err, Error::ConfigSyntax(_)));
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn densities_accept_ratios_and_numbers() {
        assert_eq!(parse_rational("1/200").unwrap(), 0.005);
        assert_eq!(parse_rational(" 3 / 4 ").unwrap(), 0.75);
        assert_eq!(parse_rational("0.01").unwrap(), 0.01);
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());

        let rc = parse_config("[[tier]]\npower_w = 2.0\ndensity_per_m2 = 0.004\n").unwrap();
        assert_eq!(rc.network.tiers[0].density, 0.004);
        let err = parse_config("[[tier]]\npower_w = 2.0\ndensity_per_m2 = \"x\"\n").unwrap_err();
        assert!(err.to_string().contains("tier[0].density_per_m2"));
    }

    #[test]
    fn derived_antenna_from_db() {
        let text = format!(
            "{EXAMPLE_CONFIG}\n[bs_antenna]\nmode = \"derived\"\nbeamwidth_deg = 60.0\nsidelobe_db = -10.0\n"
        );
        let rc = parse_config(&text).unwrap();
        assert!((rc.network.bs_pattern.main_gain() - 5.5).abs() < 1e-12);
        assert_eq!(rc.network.ue_pattern, rc.network.bs_pattern);

        let bad = format!("{EXAMPLE_CONFIG}\n[bs_antenna]\nmode = \"derived\"\nbeamwidth_deg = 60.0\nmain_gain_db = 3.0\nsidelobe_db = -10.0\n");
        assert!(parse_config(&bad).is_err());
    }

    #[test]
    fn semantic_errors_name_the_field() {
        let cases = [
            (
                "[[tier]]\npower_w = -1.0\ndensity_per_m2 = 0.1\n",
                "tier[0]",
            ),
            ("", "tier"),
            (
                &format!("{EXAMPLE_CONFIG}[blockage]\nlos_fraction = 1.5\n"),
                "blockage",
            ),
            (
                &format!("{EXAMPLE_CONFIG}[analysis]\nthresholds_db = [3.0, 1.0]\n"),
                "analysis.thresholds_db",
            ),
            (
                &format!("{EXAMPLE_CONFIG}[simulation]\ntrials = 0\n"),
                "simulation.trials",
            ),
            (
                &format!("{EXAMPLE_CONFIG}[alignment]\nsteering_sigma_deg = -1.0\n"),
                "alignment.steering_sigma_deg",
            ),
        ];
        for (text, field) in cases {
            match parse_config(text).unwrap_err() {
                Error::Config { field: f, .. } => assert_eq!(f, field),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn serialize_then_parse_is_idempotent() {
        let text = format!(
            "{EXAMPLE_CONFIG}\n[ue_antenna]\nmode = \"derived\"\nbeamwidth_deg = 30.0\nsidelobe_db = -13.0\n\n[simulation]\nseed = 77\nwindow_radius_m = 900.0\n\n[output]\npath = \"out.csv\"\n"
        );
        let first = parse_config(&text).unwrap();
        let second = parse_config(&first.to_toml()).unwrap();
        assert_eq!(first, second);
        assert_eq!(first.to_toml(), second.to_toml());
        assert_eq!(second.output, Some(PathBuf::from("out.csv")));
    }

    proptest::proptest! {
        #[test]
        fn round_trip_holds_for_random_documents(
            tiers in proptest::collection::vec((0.01f64..100.0, 1u32..2000, proptest::option::of(1.0f64..90.0)), 1..4),
            c in 0.0f64..=1.0,
            d in 1.0f64..500.0,
            alphas in (1.5f64..3.0, 3.0f64..6.0),
            sigma in 0.0f64..10.0,
            noise_db in -20.0f64..20.0,
            derived in proptest::bool::ANY,
            seed in proptest::num::u64::ANY,
        ) {
            let mut text = String::new();
            for (p, den, w) in &tiers {
                text += &format!("[[tier]]\npower_w = {p:?}\ndensity_per_m2 = \"1/{den}\"\n");
                if let Some(w) = w {
                    text += &format!("beamwidth_deg = {w:?}\n");
                }
            }
            if derived {
                text += "[ue_antenna]\nmode = \"derived\"\nbeamwidth_deg = 30.0\nsidelobe_db = -12.5\n";
            }
            text += &format!(
                "[blockage]\nlos_fraction = {c:?}\nlos_radius_m = {d:?}\n[channel]\nalpha_los = {:?}\nalpha_nlos = {:?}\nnoise_db = {noise_db:?}\n[alignment]\nsteering_sigma_deg = {sigma:?}\n[simulation]\nseed = {seed}\n",
                alphas.0, alphas.1
            );
            let first = parse_config(&text).unwrap();
            let second = parse_config(&first.to_toml()).unwrap();
            proptest::prop_assert_eq!(first, second);
        }
    }
}
